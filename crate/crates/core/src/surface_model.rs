//! Fiber configurations and component-number assignments.
//!
//! A semistable surface is reduced to its cycle lengths `m_j` and `chi`; a
//! torsion section is reduced to the component index `k_j` it meets in each
//! cycle, taken in `[0, m_j)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numtheory::{gcd, lcm};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiberConfiguration {
    fiber_lengths: Vec<u64>,
    chi: u64,
    strict: bool,
}

impl FiberConfiguration {
    /// Validates cycle lengths and `chi`. When `strict`, also requires
    /// `sum m_j = 12 chi`.
    pub fn new(lengths: &[i64], chi: i64, strict: bool) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::EmptyConfiguration);
        }
        if let Some((index, &value)) = lengths.iter().enumerate().find(|(_, &m)| m < 1) {
            return Err(Error::NonPositiveLength { index, value });
        }
        if chi < 1 {
            return Err(Error::NonPositiveChi(chi));
        }
        let fiber_lengths: Vec<u64> = lengths.iter().map(|&m| m as u64).collect();
        let chi = chi as u64;
        let sum: u64 = fiber_lengths.iter().sum();
        if strict && sum != 12 * chi {
            return Err(Error::EulerMismatch { sum, expected: 12 * chi });
        }
        Ok(FiberConfiguration { fiber_lengths, chi, strict })
    }

    pub fn strict(lengths: &[i64], chi: i64) -> Result<Self> {
        Self::new(lengths, chi, true)
    }

    pub fn fiber_lengths(&self) -> &[u64] {
        &self.fiber_lengths
    }

    pub fn len(&self) -> usize {
        self.fiber_lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fiber_lengths.is_empty()
    }

    pub fn chi(&self) -> u64 {
        self.chi
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Topological Euler number `e = 12 chi`.
    pub fn euler_number(&self) -> u64 {
        12 * self.chi
    }

    pub fn fiber_sum(&self) -> u64 {
        self.fiber_lengths.iter().sum()
    }

    /// Builds a validated assignment with claimed order `order`.
    pub fn assignment(&self, components: &[i64], order: u64) -> Result<ComponentAssignment> {
        if order == 0 {
            return Err(Error::NonPositiveOrder);
        }
        let ks = self.check_components(components)?;
        for (index, (&k, &m)) in ks.iter().zip(&self.fiber_lengths).enumerate() {
            if !(order * k).is_multiple_of(m) {
                return Err(Error::NotTorsionOfOrder { index, value: k, modulus: m, order });
            }
        }
        Ok(ComponentAssignment { components: ks, order })
    }

    /// Builds an assignment whose claimed order is its exact order.
    pub fn assignment_exact(&self, components: &[i64]) -> Result<ComponentAssignment> {
        let ks = self.check_components(components)?;
        let order = exact_order(&self.fiber_lengths, &ks);
        Ok(ComponentAssignment { components: ks, order })
    }

    pub fn zero_section(&self) -> ComponentAssignment {
        ComponentAssignment { components: vec![0; self.len()], order: 1 }
    }

    fn check_components(&self, components: &[i64]) -> Result<Vec<u64>> {
        if components.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), actual: components.len() });
        }
        components
            .iter()
            .zip(&self.fiber_lengths)
            .enumerate()
            .map(|(index, (&k, &m))| {
                if k < 0 || k as u64 >= m {
                    Err(Error::ComponentOutOfRange { index, value: k, modulus: m })
                } else {
                    Ok(k as u64)
                }
            })
            .collect()
    }

    fn check_fiber(&self, j: usize) -> Result<u64> {
        self.fiber_lengths
            .get(j)
            .copied()
            .ok_or(Error::FiberIndexOutOfRange { index: j, len: self.len() })
    }
}

/// Component numbers `k_j` of a candidate torsion section with claimed
/// order `n`. Constructed through [`FiberConfiguration::assignment`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentAssignment {
    components: Vec<u64>,
    order: u64,
}

impl ComponentAssignment {
    pub fn components(&self) -> &[u64] {
        &self.components
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|&k| k == 0)
    }

    /// Least `alpha >= 1` with `alpha * k_j = 0 mod m_j` for every `j`.
    pub fn order_of(&self, config: &FiberConfiguration) -> u64 {
        exact_order(config.fiber_lengths(), &self.components)
    }

    /// Reverses the orientation of fiber `j`: `k_j -> (m_j - k_j) mod m_j`.
    pub fn reorient(&self, config: &FiberConfiguration, j: usize) -> Result<ComponentAssignment> {
        let m = config.check_fiber(j)?;
        let mut components = self.components.clone();
        components[j] = (m - components[j]) % m;
        Ok(ComponentAssignment { components, order: self.order })
    }

    /// Orients every fiber so that `k_j <= m_j / 2`.
    pub fn minimal_form(&self, config: &FiberConfiguration) -> ComponentAssignment {
        let components = self
            .components
            .iter()
            .zip(config.fiber_lengths())
            .map(|(&k, &m)| d_m_unchecked(m, k))
            .collect();
        ComponentAssignment { components, order: self.order }
    }

    pub fn is_minimal(&self, config: &FiberConfiguration) -> bool {
        self.components.iter().zip(config.fiber_lengths()).all(|(&k, &m)| 2 * k <= m)
    }

    /// Component numbers of `alpha * S`: entrywise `alpha * k_j mod m_j`.
    /// The claimed order becomes `n / gcd(alpha, n)`.
    pub fn multiple(&self, config: &FiberConfiguration, alpha: i64) -> ComponentAssignment {
        let components = self
            .components
            .iter()
            .zip(config.fiber_lengths())
            .map(|(&k, &m)| {
                let m = m as i128;
                ((alpha as i128 * k as i128).rem_euclid(m)) as u64
            })
            .collect();
        let n = self.order;
        let g = gcd(alpha.unsigned_abs() % n, n);
        ComponentAssignment { components, order: n / g }
    }

    /// Entrywise sum in `⊕ Z/m_j`; the claimed order is the lcm of both.
    pub fn add(&self, config: &FiberConfiguration, other: &ComponentAssignment) -> ComponentAssignment {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .zip(config.fiber_lengths())
            .map(|((&a, &b), &m)| (a + b) % m)
            .collect();
        ComponentAssignment { components, order: lcm(self.order, other.order) }
    }

    /// Same component numbers with a different claimed order.
    pub fn with_order(&self, config: &FiberConfiguration, order: u64) -> Result<ComponentAssignment> {
        let ks: Vec<i64> = self.components.iter().map(|&k| k as i64).collect();
        config.assignment(&ks, order)
    }
}

fn exact_order(lengths: &[u64], ks: &[u64]) -> u64 {
    ks.iter().zip(lengths).fold(1, |acc, (&k, &m)| lcm(acc, m / gcd(k, m)))
}

fn d_m_unchecked(m: u64, k: u64) -> u64 {
    k.min(m - k)
}

/// `d_m(k) = min(k, m - k)` for `0 <= k < m`.
pub fn d_m(m: u64, k: u64) -> Result<u64> {
    if k >= m {
        return Err(Error::ComponentIndexOutOfRange { k, modulus: m });
    }
    Ok(d_m_unchecked(m, k))
}
