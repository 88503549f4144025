//! Distribution numbers and the linear system `P_n M_n = (1/6) 1`.
//!
//! For a section whose order divides `n`, every fraction `f_j = k_j/m_j`
//! is a multiple of `1/n`. The oriented numbers `M'_i` collect the fiber
//! lengths at `f_j = i/n`, normalised by `12 chi`; the unoriented `M_i`
//! merge `i` with `n - i`.

use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::{q, qi, LinearSolution, QMatrix, Q};
use crate::numtheory::is_odd_prime;
use crate::surface_model::{ComponentAssignment, FiberConfiguration};

/// `<x>`: the representative of `x mod Z` in `[0, 1)`.
pub fn frac_part(x: &Q) -> Q {
    x - Q::from_integer(x.numer().div_floor(x.denom()))
}

/// `P(x) = x (1 - x)`.
pub fn p_poly(x: &Q) -> Q {
    x * (Q::one() - x)
}

fn p_at(alpha: u64, i: u64, n: u64) -> Q {
    p_poly(&q(((alpha * i) % n) as i64, n as i64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionVector {
    pub n: u64,
    /// `M'_0 .. M'_{n-1}`.
    pub oriented: Vec<Q>,
    /// `M_0 .. M_{[n/2]}`.
    pub unoriented: Vec<Q>,
}

impl DistributionVector {
    fn from_oriented(n: u64, oriented: Vec<Q>) -> Self {
        let half = (n / 2) as usize;
        let n = n as usize;
        let unoriented = (0..=half)
            .map(|i| {
                if i == 0 || 2 * i == n {
                    oriented[i].clone()
                } else {
                    &oriented[i] + &oriented[n - i]
                }
            })
            .collect();
        DistributionVector { n: n as u64, oriented, unoriented }
    }
}

/// Oriented and unoriented distribution numbers of `a` relative to its
/// claimed order.
pub fn distribution_of(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<DistributionVector> {
    if !config.is_strict() {
        return Err(Error::NotStrict);
    }
    let n = a.order();
    let mut counts = vec![0u64; n as usize];
    for (index, (&k, &m)) in a.components().iter().zip(config.fiber_lengths()).enumerate() {
        if !(k * n).is_multiple_of(m) {
            return Err(Error::NotMultipleOfInverseOrder { index, k, modulus: m, order: n });
        }
        counts[(k * n / m) as usize] += m;
    }
    let e = config.euler_number() as i64;
    let oriented = counts.iter().map(|&c| q(c as i64, e)).collect();
    Ok(DistributionVector::from_oriented(n, oriented))
}

/// Coefficient matrix of size `[n/2]`, entry `(alpha, i) = P(<alpha i / n>)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PMatrix {
    pub n: u64,
    pub entries: QMatrix,
}

pub fn build_p_matrix(n: u64) -> Result<PMatrix> {
    if n < 2 {
        return Err(Error::OrderTooSmall(n));
    }
    let size = (n / 2) as usize;
    let entries = QMatrix::from_fn(size, size, |a, i| p_at(a as u64 + 1, i as u64 + 1, n));
    Ok(PMatrix { n, entries })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistributionSolution {
    pub n: u64,
    pub matrix: PMatrix,
    /// Particular solution `M_1 .. M_{[n/2]}` plus nullspace directions.
    pub system: LinearSolution,
    /// `M_0` of the particular solution, from `sum M = 1`.
    pub m0: Q,
}

impl DistributionSolution {
    pub fn is_unique(&self) -> bool {
        self.system.is_unique()
    }

    /// `M_0 .. M_{[n/2]}` when the system has a unique solution.
    pub fn unoriented(&self) -> Option<Vec<Q>> {
        self.is_unique().then(|| {
            std::iter::once(self.m0.clone()).chain(self.system.particular.iter().cloned()).collect()
        })
    }
}

/// Solves `P_n M = (1/6) 1` exactly. `M_0` comes from normalisation.
pub fn solve_distribution(n: u64) -> Result<DistributionSolution> {
    let matrix = build_p_matrix(n)?;
    let rhs = vec![q(1, 6); matrix.entries.rows()];
    let system = matrix.entries.solve(&rhs)?;
    let m0 = Q::one() - system.particular.iter().sum::<Q>();
    Ok(DistributionSolution { n, matrix, system, m0 })
}

/// Row sums of `P_p`; each equals `(p^2 - 1) / 12 p`.
pub fn row_sums(p: u64) -> Result<Vec<Q>> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let m = build_p_matrix(p)?;
    Ok((0..m.entries.rows()).map(|r| m.entries.row(r).iter().sum()).collect())
}

pub fn p_matrix_determinant(p: u64) -> Result<Q> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(build_p_matrix(p)?.entries.determinant())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultipleCheck {
    pub alpha: u64,
    /// `sum_j P(<alpha f_j>) m_j`, compared with `2 chi`.
    pub per_fiber: Q,
    /// `sum_i P(<alpha i/n>) M_i`, compared with `1/6`.
    pub collected: Q,
    pub holds: bool,
    /// `per_fiber / 12 chi == collected`.
    pub forms_agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplesReport {
    pub n: u64,
    pub checks: Vec<MultipleCheck>,
}

impl MultiplesReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds && c.forms_agree)
    }

    pub fn first_failure(&self) -> Option<u64> {
        self.checks.iter().find(|c| !(c.holds && c.forms_agree)).map(|c| c.alpha)
    }
}

/// Quadratic relation for every nonzero multiple `alpha S`, `1 <= alpha < n`,
/// in both the per-fiber and the distribution-weighted form.
pub fn check_multiples_relation(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<MultiplesReport> {
    let dist = distribution_of(config, a)?;
    let n = a.order();
    let two_chi = qi(2 * config.chi() as i64);
    let e = qi(config.euler_number() as i64);
    let mut checks = Vec::new();
    for alpha in 1..n {
        if a.multiple(config, alpha as i64).is_zero() {
            continue;
        }
        let per_fiber: Q = a
            .components()
            .iter()
            .zip(config.fiber_lengths())
            .map(|(&k, &m)| p_poly(&frac_part(&q((alpha * k) as i64, m as i64))) * qi(m as i64))
            .sum();
        let collected: Q = (1..=n / 2)
            .map(|i| p_at(alpha, i, n) * &dist.unoriented[i as usize])
            .sum();
        let holds = per_fiber == two_chi && collected == q(1, 6);
        let forms_agree = &per_fiber / &e == collected;
        checks.push(MultipleCheck { alpha, per_fiber, collected, holds, forms_agree });
    }
    Ok(MultiplesReport { n, checks })
}

/// Unoriented values forced for a section of odd prime order `p`:
/// `M_0 = 1/(p+1)`, `M_i = 2p/(p^2-1)`.
pub fn prime_order_values(p: u64) -> Result<Vec<Q>> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let p = p as i64;
    let mut v = vec![q(1, p + 1)];
    v.extend(std::iter::repeat_n(q(2 * p, p * p - 1), ((p - 1) / 2) as usize));
    Ok(v)
}
