//! Enumeration of component-number assignments compatible with a torsion
//! section of a given order, and closure checks for generated subgroups.
//!
//! The master constraint is the quadratic relation for every nonzero
//! multiple `alpha S`. Every term `P(<alpha f_j>) m_j` is nonnegative, so a
//! partial sum above `2 chi` prunes the branch. Solutions are necessary
//! conditions only; nothing here asserts that a surface realises them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_traits::Zero;

use crate::distribution::{distribution_of, solve_distribution};
use crate::error::{Error, Result};
use crate::exact::{q, qi, Q};
use crate::numtheory::{factorize, gcd};
use crate::relations::{check_quadratic, check_sum_relation, RelationReport};
use crate::surface_model::{ComponentAssignment, FiberConfiguration};

#[derive(Clone, Debug)]
pub struct EnumerationQuery {
    pub config: FiberConfiguration,
    pub order: u64,
    pub up_to_symmetry: bool,
    /// Keep only solutions whose unoriented distribution equals the unique
    /// solution of `P_n M = (1/6) 1` (when the system is nonsingular).
    pub require_distribution: bool,
    /// Keep only solutions that generate, together with this section, a
    /// subgroup whose nonzero elements all pass the relations.
    pub partner: Option<ComponentAssignment>,
}

impl EnumerationQuery {
    pub fn new(config: FiberConfiguration, order: u64) -> Self {
        EnumerationQuery { config, order, up_to_symmetry: false, require_distribution: false, partner: None }
    }

    pub fn up_to_symmetry(mut self, yes: bool) -> Self {
        self.up_to_symmetry = yes;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionSet {
    /// All solutions, or one lexicographically least representative per
    /// orbit when enumerating up to symmetry. Sorted lexicographically.
    pub assignments: Vec<ComponentAssignment>,
    pub raw_count: usize,
    pub orbit_count: usize,
    /// Orbit size for each representative, in representative order.
    pub orbit_sizes: Vec<usize>,
}

impl SolutionSet {
    pub fn is_empty(&self) -> bool {
        self.raw_count == 0
    }
}

struct Search<'a> {
    config: &'a FiberConfiguration,
    n: u64,
    bound: Q,
    /// `choices[j]`: admissible `k` with `n k = 0 mod m_j`, each with its
    /// terms `P(<alpha k / m_j>) m_j` for `alpha = 1 .. n-1`.
    choices: Vec<Vec<(u64, Vec<Q>)>>,
    found: Vec<Vec<u64>>,
}

impl Search<'_> {
    fn run(&mut self, j: usize, prefix: &mut Vec<u64>, sums: &[Q]) {
        if j == self.choices.len() {
            if sums.iter().all(|s| *s == self.bound) {
                let lengths = self.config.fiber_lengths();
                let order = prefix
                    .iter()
                    .zip(lengths)
                    .fold(1, |acc, (&k, &m)| num_integer::lcm(acc, m / gcd(k, m)));
                if order == self.n {
                    self.found.push(prefix.clone());
                }
            }
            return;
        }
        for idx in 0..self.choices[j].len() {
            let (k, ref terms) = self.choices[j][idx];
            let next: Vec<Q> = sums.iter().zip(terms).map(|(s, t)| s + t).collect();
            if next.iter().any(|s| *s > self.bound) {
                continue;
            }
            prefix.push(k);
            self.run(j + 1, prefix, &next);
            prefix.pop();
        }
    }
}

fn admissible(m: u64, n: u64) -> Vec<u64> {
    let step = m / gcd(n, m);
    (0..m).step_by(step as usize).collect()
}

/// Backtracking search over `k_j` with `n k_j = 0 mod m_j`. Accepts a
/// candidate iff its exact order is `n` and the quadratic relation holds
/// for every multiple `alpha S`, `1 <= alpha < n`.
pub fn enumerate(query: &EnumerationQuery) -> Result<SolutionSet> {
    let config = &query.config;
    if !config.is_strict() {
        return Err(Error::NotStrict);
    }
    let n = query.order;
    if n < 2 {
        return Err(Error::OrderTooSmall(n));
    }
    if let Some(p) = &query.partner {
        if p.components().len() != config.len() {
            return Err(Error::LengthMismatch { expected: config.len(), actual: p.components().len() });
        }
    }
    let choices = config
        .fiber_lengths()
        .iter()
        .map(|&m| {
            admissible(m, n)
                .into_iter()
                .map(|k| {
                    let terms = (1..n).map(|a| {
                        let r = (a * k) % m;
                        q((r * (m - r)) as i64, m as i64)
                    });
                    (k, terms.collect())
                })
                .collect()
        })
        .collect();
    let mut search = Search {
        config,
        n,
        bound: qi(2 * config.chi() as i64),
        choices,
        found: Vec::new(),
    };
    let zero = vec![Q::zero(); (n - 1) as usize];
    search.run(0, &mut Vec::new(), &zero);

    let expected_distribution = if query.require_distribution {
        solve_distribution(n)?.unoriented()
    } else {
        None
    };

    let mut raw = Vec::new();
    for ks in search.found {
        let ks: Vec<i64> = ks.iter().map(|&k| k as i64).collect();
        let a = config.assignment(&ks, n)?;
        if let Some(expected) = &expected_distribution {
            if distribution_of(config, &a)?.unoriented != *expected {
                continue;
            }
        }
        if let Some(partner) = &query.partner {
            if !verify_group_closure(config, &[a.clone(), partner.clone()])?.all_valid {
                continue;
            }
        }
        raw.push(a);
    }
    raw.sort();

    let mut orbits: BTreeMap<ComponentAssignment, usize> = BTreeMap::new();
    for a in &raw {
        *orbits.entry(canonicalize(config, a)).or_default() += 1;
    }
    let raw_count = raw.len();
    let orbit_count = orbits.len();
    let (assignments, orbit_sizes) = if query.up_to_symmetry {
        orbits.into_iter().unzip()
    } else {
        let sizes = raw.iter().map(|a| orbits[&canonicalize(config, a)]).collect();
        (raw, sizes)
    };
    Ok(SolutionSet { assignments, raw_count, orbit_count, orbit_sizes })
}

/// Lexicographically least element of the orbit of `a` under fiber
/// reorientation and permutations of fibers with equal length.
pub fn canonicalize(config: &FiberConfiguration, a: &ComponentAssignment) -> ComponentAssignment {
    let minimal = a.minimal_form(config);
    let lengths = config.fiber_lengths();
    let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (j, &m) in lengths.iter().enumerate() {
        classes.entry(m).or_default().push(j);
    }
    let mut ks: Vec<i64> = minimal.components().iter().map(|&k| k as i64).collect();
    for positions in classes.values() {
        let mut values: Vec<i64> = positions.iter().map(|&j| ks[j]).collect();
        values.sort_unstable();
        for (&j, v) in positions.iter().zip(values) {
            ks[j] = v;
        }
    }
    config.assignment(&ks, a.order()).expect("orbit preserves validity")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElementReport {
    pub element: ComponentAssignment,
    pub checks: Vec<RelationReport>,
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupClosureReport {
    /// Every element of the generated subgroup, zero first, then sorted.
    pub elements: Vec<ComponentAssignment>,
    /// Relation checks for each nonzero element.
    pub nonzero: Vec<GroupElementReport>,
    /// Invariant factors `d_1 | d_2 | ...`, each > 1; empty for the trivial group.
    pub invariant_factors: Vec<u64>,
    pub all_valid: bool,
}

impl GroupClosureReport {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() <= 1
    }
}

/// Subgroup of `⊕ Z/m_j` generated by `generators`; checks the quadratic
/// relation and the order-appropriate sum relation on every nonzero element.
pub fn verify_group_closure(
    config: &FiberConfiguration,
    generators: &[ComponentAssignment],
) -> Result<GroupClosureReport> {
    for g in generators {
        if g.components().len() != config.len() {
            return Err(Error::LengthMismatch { expected: config.len(), actual: g.components().len() });
        }
    }
    let zero = config.zero_section();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    seen.insert(zero.components().to_vec());
    let mut queue = VecDeque::from([zero.clone()]);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = x.add(config, g);
            if seen.insert(y.components().to_vec()) {
                queue.push_back(y);
            }
        }
    }
    let elements: Vec<ComponentAssignment> = seen
        .iter()
        .map(|ks| {
            let ks: Vec<i64> = ks.iter().map(|&k| k as i64).collect();
            config.assignment_exact(&ks)
        })
        .collect::<Result<_>>()?;

    let mut nonzero = Vec::new();
    for e in elements.iter().filter(|e| !e.is_zero()) {
        let checks = vec![check_quadratic(config, e)?, check_sum_relation(config, e)?];
        let valid = checks.iter().all(|c| c.holds);
        nonzero.push(GroupElementReport { element: e.clone(), checks, valid });
    }
    let all_valid = nonzero.iter().all(|r| r.valid);
    let orders: Vec<u64> = elements.iter().map(|e| e.order()).collect();
    let invariant_factors = invariant_factors(&orders);
    Ok(GroupClosureReport { elements, nonzero, invariant_factors, all_valid })
}

/// Invariant factors of a finite abelian group from the orders of all its
/// elements. For each prime `p`, `|G[p^i]| / |G[p^{i-1}]| = p^{c_i}` where
/// `c_i` counts cyclic `p`-factors of order at least `p^i`.
pub fn invariant_factors(element_orders: &[u64]) -> Vec<u64> {
    let size = element_orders.len() as u64;
    let mut factors_by_rank: Vec<u64> = Vec::new();
    for (p, e) in factorize(size) {
        let killed = |pk: u64| element_orders.iter().filter(|&&o| pk.is_multiple_of(o)).count() as u64;
        // exponents of the cyclic p-factors, largest first
        let mut exps: Vec<u32> = Vec::new();
        let mut prev = 1u64;
        let mut pk = 1u64;
        for i in 1..=e {
            pk *= p;
            let cur = killed(pk);
            let mut ratio = cur / prev;
            let mut c = 0usize;
            while ratio > 1 {
                ratio /= p;
                c += 1;
            }
            // c factors have order >= p^i
            for (slot, x) in exps.iter_mut().enumerate() {
                if slot < c {
                    *x = i;
                }
            }
            while exps.len() < c {
                exps.push(i);
            }
            prev = cur;
        }
        while factors_by_rank.len() < exps.len() {
            factors_by_rank.push(1);
        }
        for (slot, x) in exps.iter().enumerate() {
            factors_by_rank[slot] *= p.pow(*x);
        }
    }
    factors_by_rank.reverse();
    factors_by_rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::quadratic_lhs;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn k3() -> FiberConfiguration {
        FiberConfiguration::strict(&[1, 1, 1, 7, 7, 7], 2).unwrap()
    }
    fn x6321() -> FiberConfiguration {
        FiberConfiguration::strict(&[6, 3, 2, 1], 1).unwrap()
    }
    fn x3333() -> FiberConfiguration {
        FiberConfiguration::strict(&[3, 3, 3, 3], 1).unwrap()
    }

    // Every vector in prod [0, m_j), filtered directly by the stated rule.
    fn brute_force(c: &FiberConfiguration, n: u64) -> Vec<Vec<u64>> {
        let mut all: Vec<Vec<u64>> = vec![vec![]];
        for &m in c.fiber_lengths() {
            all = all.into_iter().flat_map(|p| (0..m).map(move |k| [p.clone(), vec![k]].concat())).collect();
        }
        all.into_iter()
            .filter(|ks| {
                let ks: Vec<i64> = ks.iter().map(|&k| k as i64).collect();
                let a = c.assignment_exact(&ks).unwrap();
                a.order() == n
                    && (1..n as i64).all(|al| quadratic_lhs(c, &a.multiple(c, al)).unwrap() == qi(2 * c.chi() as i64))
            })
            .collect()
    }

    // BFS over reorientations and transpositions of equal-length fibers.
    fn orbit(c: &FiberConfiguration, a: &ComponentAssignment) -> BTreeSet<Vec<u64>> {
        let lengths = c.fiber_lengths();
        let mut seen = BTreeSet::from([a.components().to_vec()]);
        let mut queue = vec![a.components().to_vec()];
        while let Some(x) = queue.pop() {
            let mut next = Vec::new();
            for j in 0..x.len() {
                let mut y = x.clone();
                y[j] = (lengths[j] - y[j]) % lengths[j];
                next.push(y);
                for i in 0..j {
                    if lengths[i] == lengths[j] {
                        let mut y = x.clone();
                        y.swap(i, j);
                        next.push(y);
                    }
                }
            }
            for y in next {
                if seen.insert(y.clone()) {
                    queue.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn k3_order_seven() {
        let c = k3();
        let oracle = brute_force(&c, 7);
        assert_eq!(oracle.len(), 48);
        let all = enumerate(&EnumerationQuery::new(c.clone(), 7)).unwrap();
        assert_eq!(all.assignments.iter().map(|a| a.components().to_vec()).collect::<Vec<_>>(), oracle);
        let reps = enumerate(&EnumerationQuery::new(c, 7).up_to_symmetry(true)).unwrap();
        assert_eq!((reps.raw_count, reps.orbit_count), (48, 1));
        assert_eq!(reps.assignments[0].components(), &[0, 0, 0, 1, 2, 3]);
        assert_eq!(reps.orbit_sizes, vec![48]);
    }

    #[test]
    fn x6321_orders_two_and_three() {
        let c = x6321();
        let s = enumerate(&EnumerationQuery::new(c.clone(), 2)).unwrap();
        assert_eq!(s.raw_count, 1);
        assert_eq!(s.assignments[0].components(), &[3, 0, 1, 0]);
        assert_eq!(brute_force(&c, 2), vec![vec![3, 0, 1, 0]]);

        let s = enumerate(&EnumerationQuery::new(c.clone(), 3).up_to_symmetry(true)).unwrap();
        assert_eq!(brute_force(&c, 3).len(), 4);
        assert_eq!((s.raw_count, s.orbit_count), (4, 1));
        assert_eq!(s.assignments[0].components(), &[2, 1, 0, 0]);

        let s = enumerate(&EnumerationQuery::new(c.clone(), 6)).unwrap();
        assert_eq!(s.raw_count, brute_force(&c, 6).len());
        assert!(s.assignments.iter().any(|a| a.components() == [5, 1, 1, 0]));
    }

    #[test]
    fn x3333_order_three() {
        let c = x3333();
        let s = enumerate(&EnumerationQuery::new(c.clone(), 3)).unwrap();
        assert_eq!(brute_force(&c, 3).len(), 32);
        assert_eq!(s.raw_count, 32);
        for a in &s.assignments {
            assert_eq!(a.components().iter().filter(|&&k| k == 0).count(), 1);
        }
    }

    #[test]
    fn enumerate_preconditions() {
        let loose = FiberConfiguration::new(&[3, 3], 1, false).unwrap();
        assert_eq!(enumerate(&EnumerationQuery::new(loose, 3)), Err(Error::NotStrict));
        assert_eq!(enumerate(&EnumerationQuery::new(x6321(), 1)), Err(Error::OrderTooSmall(1)));
    }

    #[test]
    fn filters() {
        let c = k3();
        let mut query = EnumerationQuery::new(c.clone(), 7);
        query.require_distribution = true;
        assert_eq!(enumerate(&query).unwrap().raw_count, 48);

        let c = x3333();
        let s1 = c.assignment(&[0, 1, 1, 1], 3).unwrap();
        let mut query = EnumerationQuery::new(c.clone(), 3);
        query.partner = Some(s1);
        let s = enumerate(&query).unwrap();
        assert!(s.raw_count > 0 && s.raw_count < 32);
        assert!(s.assignments.iter().any(|a| a.components() == [1, 0, 2, 1]));
        // [1, 1, 1, 0] with S_1 yields (1, 2, 2, 1), which has no zero entry
        assert!(!s.assignments.iter().any(|a| a.components() == [1, 1, 1, 0]));
    }

    #[test]
    fn canonical_forms() {
        let c = k3();
        let a = c.assignment(&[0, 0, 0, 4, 2, 6], 7).unwrap();
        assert_eq!(canonicalize(&c, &a).components(), &[0, 0, 0, 1, 2, 3]);
        let b = x6321().assignment(&[3, 0, 1, 0], 2).unwrap();
        assert_eq!(canonicalize(&x6321(), &b), b);
    }

    #[test]
    fn canonical_form_is_orbit_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let shapes: [&[i64]; 4] = [&[4, 4, 2, 2], &[3, 3, 3, 3], &[5, 1, 5, 1], &[6, 2, 6, 2, 1]];
        for _ in 0..200 {
            let ms = shapes[rng.gen_range(0..shapes.len())];
            let c = FiberConfiguration::new(ms, 1, false).unwrap();
            let ks: Vec<i64> = ms.iter().map(|&m| rng.gen_range(0..m)).collect();
            let a = c.assignment_exact(&ks).unwrap();
            let canon = canonicalize(&c, &a);
            let min = orbit(&c, &a).into_iter().next().unwrap();
            assert_eq!(canon.components(), &min[..]);
            assert_eq!(canonicalize(&c, &canon), canon);
        }
    }

    #[test]
    fn orbit_sizes_sum_to_raw_count() {
        for (c, n) in [(x3333(), 3), (k3(), 7), (x6321(), 6)] {
            let s = enumerate(&EnumerationQuery::new(c.clone(), n).up_to_symmetry(true)).unwrap();
            assert_eq!(s.orbit_sizes.iter().sum::<usize>(), s.raw_count);
            for (rep, &size) in s.assignments.iter().zip(&s.orbit_sizes) {
                assert_eq!(orbit(&c, rep).len(), size);
            }
        }
    }

    #[test]
    fn group_closure_x3333() {
        let c = x3333();
        let gens = [c.assignment(&[0, 1, 1, 1], 3).unwrap(), c.assignment(&[1, 0, 2, 1], 3).unwrap()];
        let r = verify_group_closure(&c, &gens).unwrap();
        assert_eq!(r.order(), 9);
        assert_eq!(r.invariant_factors, vec![3, 3]);
        assert!(r.all_valid);
        assert_eq!(r.nonzero.len(), 8);
        for e in &r.nonzero {
            assert_eq!(e.element.components().iter().filter(|&&k| k == 0).count(), 1);
        }
    }

    #[test]
    fn group_closure_x6321() {
        let c = x6321();
        let gens = [c.assignment(&[3, 0, 1, 0], 2).unwrap(), c.assignment(&[2, 1, 0, 0], 3).unwrap()];
        let r = verify_group_closure(&c, &gens).unwrap();
        assert_eq!(r.invariant_factors, vec![6]);
        assert!(r.all_valid);
        let order6: Vec<_> = r.nonzero.iter().filter(|e| e.element.order() == 6).collect();
        assert!(order6.iter().any(|e| e.element.components() == [5, 1, 1, 0]));
    }

    #[test]
    fn group_closure_trivial_and_invalid() {
        let c = x6321();
        let r = verify_group_closure(&c, &[c.zero_section()]).unwrap();
        assert_eq!(r.order(), 1);
        assert!(r.invariant_factors.is_empty());
        assert!(r.all_valid);

        let bad = c.assignment(&[1, 0, 0, 0], 6).unwrap();
        let r = verify_group_closure(&c, &[bad]).unwrap();
        assert!(!r.all_valid);
    }

    #[test]
    fn invariant_factor_counts() {
        // Z/2 x Z/4 x Z/3 = Z/2 x Z/12
        let mut orders = Vec::new();
        for a in 0..2u64 {
            for b in 0..4u64 {
                for c in 0..3u64 {
                    let o = |x: u64, m: u64| m / gcd(x, m);
                    orders.push(num_integer::lcm(num_integer::lcm(o(a, 2), o(b, 4)), o(c, 3)));
                }
            }
        }
        assert_eq!(invariant_factors(&orders), vec![2, 12]);
        assert_eq!(invariant_factors(&[1]), Vec::<u64>::new());
    }
}
