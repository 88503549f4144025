//! Intersection theory on `L = U ⊕ A_{m_1-1} ⊕ ... ⊕ A_{m_s-1}`.
//!
//! Basis order is `S_0, F`, then `C^{(j)}_1 .. C^{(j)}_{m_j-1}` for each
//! fiber in turn. `C^{(j)}_0` is never a basis element; it is expanded as
//! `F - sum_{k>=1} C^{(j)}_k`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{qi, QMatrix, Q};
use crate::surface_model::{ComponentAssignment, FiberConfiguration};

#[derive(Clone, Debug)]
pub struct LatticeBasis {
    config: FiberConfiguration,
    offsets: Vec<usize>,
    rank: usize,
    entries: Vec<(usize, usize, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisorVector {
    pub coefficients: Vec<Q>,
}

impl DivisorVector {
    pub fn zero(rank: usize) -> Self {
        DivisorVector { coefficients: vec![Q::zero(); rank] }
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn add_scaled(&mut self, other: &DivisorVector, factor: &Q) {
        for (x, y) in self.coefficients.iter_mut().zip(&other.coefficients) {
            if !y.is_zero() {
                *x += factor * y;
            }
        }
    }
}

impl LatticeBasis {
    pub fn new(config: &FiberConfiguration) -> Self {
        let mut offsets = Vec::with_capacity(config.len());
        let mut next = 2;
        for &m in config.fiber_lengths() {
            offsets.push(next);
            next += (m - 1) as usize;
        }
        let mut basis = LatticeBasis { config: config.clone(), offsets, rank: next, entries: Vec::new() };
        basis.entries = basis.gram_entries();
        basis
    }

    pub fn config(&self) -> &FiberConfiguration {
        &self.config
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Basis position of `C^{(j)}_k`, `k >= 1`.
    fn index(&self, j: usize, k: u64) -> usize {
        self.offsets[j] + (k - 1) as usize
    }

    fn check(&self, j: usize, k: u64) -> Result<u64> {
        let m = *self
            .config
            .fiber_lengths()
            .get(j)
            .ok_or(Error::FiberIndexOutOfRange { index: j, len: self.config.len() })?;
        if k >= m {
            return Err(Error::ComponentIndexOutOfRange { k, modulus: m });
        }
        Ok(m)
    }

    fn basis_vector(&self, i: usize) -> DivisorVector {
        let mut v = DivisorVector::zero(self.rank);
        v.coefficients[i] = Q::one();
        v
    }

    pub fn zero_section(&self) -> DivisorVector {
        self.basis_vector(0)
    }

    pub fn fiber(&self) -> DivisorVector {
        self.basis_vector(1)
    }

    /// Nonzero Gram entries `(row, col, value)` with `row <= col`.
    fn gram_entries(&self) -> Vec<(usize, usize, i64)> {
        let mut out = vec![(0, 0, -(self.config.chi() as i64)), (0, 1, 1)];
        for (j, &m) in self.config.fiber_lengths().iter().enumerate() {
            for k in 1..m {
                let i = self.index(j, k);
                out.push((i, i, -2));
                if k + 1 < m {
                    out.push((i, i + 1, 1));
                }
            }
        }
        out
    }

    pub fn gram_matrix(&self) -> QMatrix {
        let mut g = QMatrix::zeros(self.rank, self.rank);
        for &(i, j, v) in &self.entries {
            g.set(i, j, qi(v));
            g.set(j, i, qi(v));
        }
        g
    }

    /// Bilinear pairing `v . G . w`.
    pub fn intersect(&self, v: &DivisorVector, w: &DivisorVector) -> Result<Q> {
        for x in [v, w] {
            if x.len() != self.rank {
                return Err(Error::DimensionMismatch { expected: self.rank, actual: x.len() });
            }
        }
        // clear denominators so the sum runs over integers
        let scale = |x: &[Q]| x.iter().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let (da, db) = (scale(&v.coefficients), scale(&w.coefficients));
        let lift = |x: &[Q], d: &BigInt| -> Vec<BigInt> { x.iter().map(|c| c.numer() * (d / c.denom())).collect() };
        let (a, b) = (lift(&v.coefficients, &da), lift(&w.coefficients, &db));
        let mut total = BigInt::zero();
        for &(i, j, g) in &self.entries {
            let cross = if i == j {
                if a[i].is_zero() || b[i].is_zero() {
                    continue;
                }
                &a[i] * &b[i]
            } else {
                if (a[i].is_zero() || b[j].is_zero()) && (a[j].is_zero() || b[i].is_zero()) {
                    continue;
                }
                &a[i] * &b[j] + &a[j] * &b[i]
            };
            total += cross * g;
        }
        let total = Q::new(total, da * db);
        Ok(total)
    }

    /// Class of the component `C^{(j)}_k`.
    pub fn component_class(&self, j: usize, k: u64) -> Result<DivisorVector> {
        let m = self.check(j, k)?;
        if k >= 1 {
            return Ok(self.basis_vector(self.index(j, k)));
        }
        let mut v = self.fiber();
        for i in 1..m {
            v.coefficients[self.index(j, i)] = -Q::one();
        }
        Ok(v)
    }

    /// Correction divisor `D^{(j)}_k`: coefficient `(m-k) i` on `C_i` for
    /// `i <= k`, `k (m-i)` for `i > k`; zero when `k = 0`.
    pub fn d_divisor(&self, j: usize, k: u64) -> Result<DivisorVector> {
        let m = self.check(j, k)?;
        let mut v = DivisorVector::zero(self.rank);
        if k == 0 {
            return Ok(v);
        }
        for i in 1..m {
            let c = if i <= k { (m - k) * i } else { k * (m - i) };
            v.coefficients[self.index(j, i)] = qi(c as i64);
        }
        Ok(v)
    }

    /// Checks `D^{(j)}_k . C^{(j')}_l = m_j δ_{jj'} (1-δ_{k0}) (δ_{l0} - δ_{lk})`
    /// and `D^{(j)}_k . S_0 = 0` over every index.
    pub fn verify_d_lemma(&self) -> DLemmaReport {
        let s0 = self.zero_section();
        let lengths = self.config.fiber_lengths().to_vec();
        let mut checks = 0;
        for (j, &m) in lengths.iter().enumerate() {
            for k in 0..m {
                let d = self.d_divisor(j, k).expect("indices in range");
                let with_s0 = self.intersect(&d, &s0).expect("same lattice");
                checks += 1;
                if !with_s0.is_zero() {
                    return DLemmaReport::failed(checks, j, k, None, with_s0, Q::zero());
                }
                for (j2, &m2) in lengths.iter().enumerate() {
                    for l in 0..m2 {
                        let c = self.component_class(j2, l).expect("indices in range");
                        let got = self.intersect(&d, &c).expect("same lattice");
                        let expected = if j != j2 || k == 0 {
                            0
                        } else {
                            m as i64 * ((l == 0) as i64 - (l == k) as i64)
                        };
                        checks += 1;
                        if got != qi(expected) {
                            return DLemmaReport::failed(checks, j, k, Some((j2, l)), got, qi(expected));
                        }
                    }
                }
            }
        }
        DLemmaReport { passed: true, checks, counterexample: None }
    }

    /// `S_0 + chi F - sum_j (1/m_j) D^{(j)}_{k_j}` for a nonzero section.
    pub fn section_class(&self, a: &ComponentAssignment) -> Result<DivisorVector> {
        if a.components().len() != self.config.len() {
            return Err(Error::LengthMismatch { expected: self.config.len(), actual: a.components().len() });
        }
        if a.is_zero() {
            return Err(Error::ZeroSection);
        }
        let mut v = self.zero_section();
        v.coefficients[1] = qi(self.config.chi() as i64);
        for (j, (&k, &m)) in a.components().iter().zip(self.config.fiber_lengths()).enumerate() {
            let d = self.d_divisor(j, k)?;
            v.add_scaled(&d, &-Q::new(1.into(), (m as i64).into()));
        }
        Ok(v)
    }

    /// Intersects the section class with `F`, `S_0` and every fiber
    /// component, and reports its self-intersection.
    pub fn verify_section_class(&self, a: &ComponentAssignment) -> Result<SectionClassReport> {
        let v = self.section_class(a)?;
        let with_fiber = self.intersect(&v, &self.fiber())?;
        let with_zero_section = self.intersect(&v, &self.zero_section())?;
        let mut component_mismatch = None;
        'outer: for (j, (&k, &m)) in a.components().iter().zip(self.config.fiber_lengths()).enumerate() {
            for l in 0..m {
                let c = self.component_class(j, l)?;
                let got = self.intersect(&v, &c)?;
                let expected = qi((l == k) as i64);
                if got != expected {
                    component_mismatch = Some(ComponentMismatch { fiber: j, component: l, got, expected });
                    break 'outer;
                }
            }
        }
        let self_intersection = self.intersect(&v, &v)?;
        let minus_chi = -qi(self.config.chi() as i64);
        Ok(SectionClassReport {
            meets_fiber_once: with_fiber.is_one(),
            with_fiber,
            disjoint_from_zero_section: with_zero_section.is_zero(),
            with_zero_section,
            component_mismatch,
            self_intersection_is_minus_chi: self_intersection == minus_chi,
            self_intersection,
            class: v,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DLemmaCounterexample {
    pub fiber: usize,
    pub k: u64,
    /// `None` for the pairing with `S_0`, otherwise `(fiber, l)` of `C_l`.
    pub against: Option<(usize, u64)>,
    pub got: Q,
    pub expected: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DLemmaReport {
    pub passed: bool,
    pub checks: usize,
    pub counterexample: Option<DLemmaCounterexample>,
}

impl DLemmaReport {
    fn failed(checks: usize, fiber: usize, k: u64, against: Option<(usize, u64)>, got: Q, expected: Q) -> Self {
        DLemmaReport {
            passed: false,
            checks,
            counterexample: Some(DLemmaCounterexample { fiber, k, against, got, expected }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentMismatch {
    pub fiber: usize,
    pub component: u64,
    pub got: Q,
    pub expected: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionClassReport {
    pub class: DivisorVector,
    pub with_fiber: Q,
    pub meets_fiber_once: bool,
    pub with_zero_section: Q,
    pub disjoint_from_zero_section: bool,
    pub component_mismatch: Option<ComponentMismatch>,
    pub self_intersection: Q,
    pub self_intersection_is_minus_chi: bool,
}

impl SectionClassReport {
    /// The linear checks: `F`, `S_0` and the Kronecker pattern on components.
    pub fn linear_checks_pass(&self) -> bool {
        self.meets_fiber_once && self.disjoint_from_zero_section && self.component_mismatch.is_none()
    }

    pub fn all_pass(&self) -> bool {
        self.linear_checks_pass() && self.self_intersection_is_minus_chi
    }
}
