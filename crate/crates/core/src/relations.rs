//! Scalar relations satisfied by the component numbers of a nonzero torsion
//! section: the quadratic relation, the component-number sums, the `k²/m`
//! form, the integrality statement, the Fixed Point Rule and the Euler
//! number divisibility for prime order.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{fmt_q, is_integer, q, qi, Q};
use crate::numtheory::{is_odd_prime, is_prime};
use crate::surface_model::{d_m, ComponentAssignment, FiberConfiguration};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationId {
    Quadratic,
    SumOrder2,
    SumOrder3Plus,
    K2,
    Integrality,
    FixedPoint,
    EulerDivisibility,
}

impl RelationId {
    pub fn name(self) -> &'static str {
        match self {
            RelationId::Quadratic => "quadratic",
            RelationId::SumOrder2 => "sum_order2",
            RelationId::SumOrder3Plus => "sum_order3plus",
            RelationId::K2 => "k2",
            RelationId::Integrality => "integrality",
            RelationId::FixedPoint => "fixed_point",
            RelationId::EulerDivisibility => "euler_divisibility",
        }
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `holds` is exactly `lhs == rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub relation: RelationId,
    pub lhs: Q,
    pub rhs: Q,
    pub holds: bool,
}

impl RelationReport {
    pub fn new(relation: RelationId, lhs: Q, rhs: Q) -> Self {
        let holds = lhs == rhs;
        RelationReport { relation, lhs, rhs, holds }
    }
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.holds { "holds" } else { "FAILS" };
        write!(f, "{}: {} vs {} [{}]", self.relation, fmt_q(&self.lhs), fmt_q(&self.rhs), verdict)
    }
}

fn chi_q(config: &FiberConfiguration) -> Q {
    qi(config.chi() as i64)
}

fn pairs<'a>(config: &'a FiberConfiguration, a: &'a ComponentAssignment) -> impl Iterator<Item = (u64, u64)> + 'a {
    a.components().iter().copied().zip(config.fiber_lengths().iter().copied())
}

/// `sum_j k_j (1 - k_j / m_j)`.
pub fn quadratic_lhs(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<Q> {
    if a.is_zero() {
        return Err(Error::ZeroSection);
    }
    Ok(pairs(config, a).map(|(k, m)| q((k * (m - k)) as i64, m as i64)).sum())
}

/// Quadratic relation: `sum_j k_j (1 - k_j/m_j) = 2 chi`.
pub fn check_quadratic(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<RelationReport> {
    Ok(RelationReport::new(RelationId::Quadratic, quadratic_lhs(config, a)?, chi_q(config) * qi(2)))
}

/// Order two: `sum_j k_j = 4 chi`.
pub fn check_sum_order2(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<RelationReport> {
    let order = a.order_of(config);
    if order != 2 {
        return Err(Error::WrongOrder { expected: "2".into(), actual: order });
    }
    let sum: u64 = a.components().iter().sum();
    Ok(RelationReport::new(RelationId::SumOrder2, qi(sum as i64), chi_q(config) * qi(4)))
}

/// Order at least three: `sum_j d_{m_j}(k_j) = 3 chi`, orientation free.
pub fn check_sum_order3plus(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<RelationReport> {
    let order = a.order_of(config);
    if order < 3 {
        return Err(Error::WrongOrder { expected: ">= 3".into(), actual: order });
    }
    let sum: u64 = pairs(config, a).map(|(k, m)| d_m(m, k).expect("validated component")).sum();
    Ok(RelationReport::new(RelationId::SumOrder3Plus, qi(sum as i64), chi_q(config) * qi(3)))
}

/// Whichever component-number sum applies to the exact order of `a`.
pub fn check_sum_relation(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<RelationReport> {
    match a.order_of(config) {
        1 => Err(Error::ZeroSection),
        2 => check_sum_order2(config, a),
        _ => check_sum_order3plus(config, a),
    }
}

/// `sum_j k_j^2 / m_j = chi` (order >= 3) or `2 chi` (order 2), for
/// minimal component numbers.
pub fn check_k2_relation(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<RelationReport> {
    if let Some(index) = pairs(config, a).position(|(k, m)| 2 * k > m) {
        return Err(Error::NonMinimal { index });
    }
    let order = a.order_of(config);
    if order < 2 {
        return Err(Error::ZeroSection);
    }
    let lhs: Q = pairs(config, a).map(|(k, m)| q((k * k) as i64, m as i64)).sum();
    let rhs = if order == 2 { chi_q(config) * qi(2) } else { chi_q(config) };
    Ok(RelationReport::new(RelationId::K2, lhs, rhs))
}

/// `sum_j (m_j - 1) k_j^2 / (2 m_j)`; the report's `rhs` is the floor of
/// the sum, so `holds` means the sum is an integer.
pub fn integrality_statement(config: &FiberConfiguration, a: &ComponentAssignment) -> RelationReport {
    let lhs: Q = pairs(config, a).map(|(k, m)| q(((m - 1) * k * k) as i64, (2 * m) as i64)).sum();
    let rhs = Q::from_integer(lhs.numer().div_floor(lhs.denom()));
    let report = RelationReport::new(RelationId::Integrality, lhs, rhs);
    debug_assert_eq!(report.holds, is_integer(&report.lhs));
    report
}

/// Fixed Point Rule for a section of prime order `p`:
/// `sum {m_j : k_j != 0} = 12 chi p / (p + 1)`.
pub fn fixed_point_sum(config: &FiberConfiguration, a: &ComponentAssignment, p: u64) -> Result<RelationReport> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let order = a.order_of(config);
    if order != p {
        return Err(Error::WrongOrder { expected: p.to_string(), actual: order });
    }
    let lhs: u64 = pairs(config, a).filter(|&(k, _)| k != 0).map(|(_, m)| m).sum();
    let rhs = q((12 * config.chi() * p) as i64, (p + 1) as i64);
    Ok(RelationReport::new(RelationId::FixedPoint, qi(lhs as i64), rhs))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerDivisibility {
    /// `lhs = 12 chi mod (p^2 - 1)/2`, `rhs = 0`.
    pub report: RelationReport,
    pub divisor: u64,
    pub euler_number: u64,
    /// Smallest Euler number compatible with a section of order `p`.
    pub minimal_euler: u64,
}

/// Necessary condition for a section of odd prime order `p`:
/// `(p^2 - 1)/2` divides `e = 12 chi`.
pub fn euler_divisibility(p: u64, chi: u64) -> Result<EulerDivisibility> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let divisor = (p * p - 1) / 2;
    let euler_number = 12 * chi;
    let report = RelationReport::new(RelationId::EulerDivisibility, qi((euler_number % divisor) as i64), qi(0));
    Ok(EulerDivisibility { report, divisor, euler_number, minimal_euler: divisor })
}

/// Every relation applicable to `a` given its exact order.
pub fn check_all(config: &FiberConfiguration, a: &ComponentAssignment) -> Result<Vec<RelationReport>> {
    let mut out = vec![check_quadratic(config, a)?, check_sum_relation(config, a)?];
    out.push(check_k2_relation(config, &a.minimal_form(config))?);
    out.push(integrality_statement(config, a));
    let order = a.order_of(config);
    if is_prime(order) {
        out.push(fixed_point_sum(config, a, order)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k3() -> FiberConfiguration {
        FiberConfiguration::strict(&[1, 1, 1, 7, 7, 7], 2).unwrap()
    }
    fn x6321() -> FiberConfiguration {
        FiberConfiguration::strict(&[6, 3, 2, 1], 1).unwrap()
    }
    fn x3333() -> FiberConfiguration {
        FiberConfiguration::strict(&[3, 3, 3, 3], 1).unwrap()
    }

    #[test]
    fn quadratic_examples() {
        let a = k3().assignment(&[0, 0, 0, 1, 2, 3], 7).unwrap();
        assert_eq!(quadratic_lhs(&k3(), &a).unwrap(), qi(4));
        let s2 = x6321().assignment(&[3, 0, 1, 0], 2).unwrap();
        assert!(check_quadratic(&x6321(), &s2).unwrap().holds);
        assert_eq!(quadratic_lhs(&x6321(), &x6321().zero_section()), Err(Error::ZeroSection));
        for j in 0..6 {
            let b = a.reorient(&k3(), j).unwrap();
            assert_eq!(quadratic_lhs(&k3(), &b).unwrap(), qi(4));
        }
    }

    #[test]
    fn sum_relations() {
        let c = x6321();
        let s2 = c.assignment(&[3, 0, 1, 0], 2).unwrap();
        let r = check_sum_order2(&c, &s2).unwrap();
        assert_eq!((r.lhs.clone(), r.holds), (qi(4), true));
        let bad = c.assignment(&[3, 0, 0, 0], 2).unwrap();
        let r = check_sum_order2(&c, &bad).unwrap();
        assert_eq!((r.lhs, r.holds), (qi(3), false));

        let s3 = c.assignment(&[2, 1, 0, 0], 3).unwrap();
        assert!(check_sum_order3plus(&c, &s3).unwrap().holds);
        let s6 = c.assignment(&[5, 1, 1, 0], 6).unwrap();
        let r = check_sum_order3plus(&c, &s6).unwrap();
        assert_eq!((r.lhs, r.holds), (qi(3), true));
        let a = k3().assignment(&[0, 0, 0, 1, 2, 3], 7).unwrap();
        assert_eq!(check_sum_order3plus(&k3(), &a).unwrap().lhs, qi(6));

        assert!(matches!(check_sum_order2(&c, &s3), Err(Error::WrongOrder { .. })));
        assert!(matches!(check_sum_order3plus(&c, &s2), Err(Error::WrongOrder { .. })));
    }

    #[test]
    fn order_two_components_are_half_lengths() {
        let c = x6321();
        for k0 in 0..6 {
            for k1 in 0..3 {
                for k2 in 0..2 {
                    let a = c.assignment_exact(&[k0, k1, k2, 0]).unwrap();
                    if a.order_of(&c) == 2 {
                        for (&k, &m) in a.components().iter().zip(c.fiber_lengths()) {
                            assert!(k == 0 || 2 * k == m);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn k2_examples() {
        let c = x6321();
        let r = check_k2_relation(&c, &c.assignment(&[2, 1, 0, 0], 3).unwrap()).unwrap();
        assert_eq!((r.lhs, r.holds), (qi(1), true));
        let r = check_k2_relation(&c, &c.assignment(&[3, 0, 1, 0], 2).unwrap()).unwrap();
        assert_eq!((r.lhs, r.holds), (qi(2), true));
        let r = check_k2_relation(&k3(), &k3().assignment(&[0, 0, 0, 1, 2, 3], 7).unwrap()).unwrap();
        assert_eq!((r.lhs, r.holds), (qi(2), true));
        assert_eq!(
            check_k2_relation(&c, &c.assignment(&[4, 2, 0, 0], 3).unwrap()),
            Err(Error::NonMinimal { index: 0 })
        );
    }

    #[test]
    fn integrality_examples() {
        let c = x6321();
        let r = integrality_statement(&c, &c.assignment(&[3, 0, 1, 0], 2).unwrap());
        assert_eq!((r.lhs, r.holds), (qi(4), true));
        let r = integrality_statement(&k3(), &k3().assignment(&[0, 0, 0, 1, 2, 3], 7).unwrap());
        assert_eq!((r.lhs, r.holds), (qi(6), true));
        let r = integrality_statement(&c, &c.assignment(&[1, 0, 0, 0], 6).unwrap());
        assert_eq!(r.lhs, q(5, 12));
        assert!(!r.holds);
    }

    #[test]
    fn fixed_point_examples() {
        let r = fixed_point_sum(&k3(), &k3().assignment(&[0, 0, 0, 1, 2, 3], 7).unwrap(), 7).unwrap();
        assert_eq!((r.lhs.clone(), r.rhs.clone(), r.holds), (qi(21), qi(21), true));
        let c = x6321();
        let r = fixed_point_sum(&c, &c.assignment(&[3, 0, 1, 0], 2).unwrap(), 2).unwrap();
        assert_eq!((r.lhs, r.holds), (qi(8), true));
        let x = x3333();
        let r = fixed_point_sum(&x, &x.assignment(&[0, 1, 1, 1], 3).unwrap(), 3).unwrap();
        assert_eq!((r.lhs, r.holds), (qi(9), true));
        let s6 = c.assignment(&[5, 1, 1, 0], 6).unwrap();
        assert_eq!(fixed_point_sum(&c, &s6, 6), Err(Error::NotPrime(6)));
        assert!(matches!(fixed_point_sum(&c, &s6, 3), Err(Error::WrongOrder { .. })));
    }

    #[test]
    fn euler_divisibility_examples() {
        let d = euler_divisibility(7, 2).unwrap();
        assert!(d.report.holds);
        assert_eq!(d.minimal_euler, 24);
        assert!(euler_divisibility(5, 1).unwrap().report.holds);
        assert!(euler_divisibility(5, 7).unwrap().report.holds);
        assert!(!euler_divisibility(7, 1).unwrap().report.holds);
        assert_eq!(euler_divisibility(2, 1), Err(Error::NotOddPrime(2)));
        assert_eq!(euler_divisibility(9, 1), Err(Error::NotOddPrime(9)));
    }

    // Exhaustive small cases for the derived equivalences between relations.
    fn all_assignments(c: &FiberConfiguration) -> Vec<ComponentAssignment> {
        let mut out = vec![vec![]];
        for &m in c.fiber_lengths() {
            out = out
                .into_iter()
                .flat_map(|p: Vec<i64>| (0..m as i64).map(move |k| [p.clone(), vec![k]].concat()))
                .collect();
        }
        out.into_iter().map(|ks| c.assignment_exact(&ks).unwrap()).collect()
    }

    #[test]
    fn derived_equivalences_exhaustive() {
        let configs = [
            FiberConfiguration::strict(&[6, 3, 2, 1], 1).unwrap(),
            FiberConfiguration::strict(&[4, 4, 2, 2], 1).unwrap(),
            FiberConfiguration::strict(&[5, 5, 1, 1], 1).unwrap(),
            FiberConfiguration::strict(&[3, 3, 3, 3], 1).unwrap(),
            FiberConfiguration::strict(&[8, 2, 1, 1], 1).unwrap(),
            FiberConfiguration::strict(&[6, 6], 1).unwrap(),
        ];
        for c in &configs {
            for a in all_assignments(c).into_iter().filter(|a| !a.is_zero()) {
                let quad = check_quadratic(c, &a).unwrap().holds;
                let n = a.order_of(c);
                if n == 2 {
                    assert_eq!(check_sum_order2(c, &a).unwrap().holds, quad, "{a:?}");
                } else {
                    let twice = check_quadratic(c, &a.multiple(c, 2)).unwrap().holds;
                    if quad && twice {
                        assert!(check_sum_order3plus(c, &a).unwrap().holds, "{a:?}");
                    }
                }
                // any two of {quadratic, sum, k2} imply the third
                let min = a.minimal_form(c);
                let sum_ok = check_sum_relation(c, &a).unwrap().holds;
                let k2 = check_k2_relation(c, &min).unwrap().holds;
                let held = [quad, sum_ok, k2].iter().filter(|&&h| h).count();
                assert_ne!(held, 2, "{a:?}");
                if quad {
                    assert!(integrality_statement(c, &a).holds, "{a:?}");
                }
            }
        }
    }

    #[test]
    fn raw_sum_is_not_orientation_free() {
        let c = x6321();
        let a = c.assignment(&[2, 1, 0, 0], 3).unwrap();
        let b = a.reorient(&c, 0).unwrap();
        let raw = |x: &ComponentAssignment| x.components().iter().sum::<u64>();
        assert_ne!(raw(&a), raw(&b));
        assert_eq!(check_sum_order3plus(&c, &a).unwrap().lhs, check_sum_order3plus(&c, &b).unwrap().lhs);
    }

    proptest! {
        #[test]
        fn integrality_invariant_mod_one_under_reorient(
            ms in prop::collection::vec(1i64..12, 1..6),
            seed in prop::collection::vec(0i64..1000, 6),
            j in 0usize..6,
        ) {
            let c = FiberConfiguration::new(&ms, 1, false).unwrap();
            let ks: Vec<i64> = ms.iter().zip(&seed).map(|(m, s)| s % m).collect();
            let a = c.assignment_exact(&ks).unwrap();
            let b = a.reorient(&c, j % c.len()).unwrap();
            let diff = integrality_statement(&c, &a).lhs - integrality_statement(&c, &b).lhs;
            prop_assert!(is_integer(&diff));
            if !a.is_zero() {
                prop_assert_eq!(quadratic_lhs(&c, &a).unwrap(), quadratic_lhs(&c, &b).unwrap());
            }
        }
    }
}
