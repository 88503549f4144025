//! Dirichlet characters mod an odd prime `p` with values in `Q(ζ_{p-1})`,
//! the Bernoulli polynomials up to `B_2`, generalized Bernoulli numbers
//! `B_{2,χ}`, and the nonvanishing certificate for the scalars
//! `s_χ = sum_a χ(a) P(<a/p>)` over even characters.
//!
//! Field elements are polynomials in `ζ` reduced modulo the cyclotomic
//! polynomial `Φ_{p-1}`. Since `Φ_d` is irreducible the quotient is a field
//! and an element is zero exactly when every coefficient is zero.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::distribution::p_poly;
use crate::error::{Error, Result};
use crate::exact::{fmt_q, q, Q};
use crate::numtheory::{divisors, euler_phi, factorize, is_odd_prime};

/// Integer coefficients of `Φ_d`, lowest degree first.
pub fn cyclotomic_polynomial(d: u64) -> Vec<BigInt> {
    assert!(d >= 1, "cyclotomic polynomial of order 0");
    // x^d - 1
    let mut num = vec![BigInt::zero(); d as usize + 1];
    num[0] = BigInt::from(-1);
    num[d as usize] = BigInt::one();
    for e in divisors(d).into_iter().filter(|&e| e < d) {
        num = div_monic(&num, &cyclotomic_polynomial(e));
    }
    num
}

// Exact division by a monic integer polynomial; panics on a remainder.
fn div_monic(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qlen = rem.len() - dd;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dd].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    assert!(rem.iter().all(Zero::is_zero), "inexact cyclotomic division");
    quot
}

/// An element of `Q(ζ_d)`, stored as coefficients of `1, ζ, ..., ζ^{φ(d)-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycloElement {
    pub conductor: u64,
    pub coefficients: Vec<Q>,
}

impl CycloElement {
    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Zero::is_zero)
    }

    /// The value as a rational number, if it lies in `Q`.
    pub fn as_rational(&self) -> Option<Q> {
        if self.coefficients.iter().skip(1).all(Zero::is_zero) {
            Some(self.coefficients.first().cloned().unwrap_or_else(Q::zero))
        } else {
            None
        }
    }

    pub fn scale(&self, factor: &Q) -> CycloElement {
        CycloElement {
            conductor: self.conductor,
            coefficients: self.coefficients.iter().map(|c| c * factor).collect(),
        }
    }

    fn zip_with(&self, other: &CycloElement, f: impl Fn(&Q, &Q) -> Q) -> CycloElement {
        assert_eq!(self.conductor, other.conductor, "elements of different cyclotomic fields");
        CycloElement {
            conductor: self.conductor,
            coefficients: self.coefficients.iter().zip(&other.coefficients).map(|(a, b)| f(a, b)).collect(),
        }
    }
}

impl Add for &CycloElement {
    type Output = CycloElement;
    fn add(self, rhs: &CycloElement) -> CycloElement {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &CycloElement {
    type Output = CycloElement;
    fn sub(self, rhs: &CycloElement) -> CycloElement {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Neg for &CycloElement {
    type Output = CycloElement;
    fn neg(self) -> CycloElement {
        self.scale(&-Q::one())
    }
}

impl fmt::Display for CycloElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => fmt_q(c),
                1 => format!("{}*z", fmt_q(c)),
                _ => format!("{}*z^{}", fmt_q(c), i),
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// `Q(ζ_d) = Q[x] / Φ_d` together with the reduced powers of `ζ`.
#[derive(Debug)]
pub struct CyclotomicField {
    conductor: u64,
    degree: usize,
    modulus: Vec<BigInt>,
    powers: Vec<Vec<Q>>,
}

impl CyclotomicField {
    pub fn new(d: u64) -> Self {
        let modulus = cyclotomic_polynomial(d);
        let degree = euler_phi(d) as usize;
        debug_assert_eq!(modulus.len(), degree + 1);
        let mut powers = Vec::with_capacity(d as usize);
        let mut cur = vec![Q::zero(); degree];
        cur[0] = Q::one();
        for _ in 0..d {
            powers.push(cur.clone());
            // multiply by x and reduce using x^degree = -sum_{i<degree} c_i x^i
            let top = cur.pop().expect("degree >= 1");
            cur.insert(0, Q::zero());
            if !top.is_zero() {
                for (c, m) in cur.iter_mut().zip(&modulus) {
                    *c -= &top * Q::from_integer(m.clone());
                }
            }
        }
        CyclotomicField { conductor: d, degree, modulus, powers }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.modulus
    }

    pub fn zero(&self) -> CycloElement {
        CycloElement { conductor: self.conductor, coefficients: vec![Q::zero(); self.degree] }
    }

    pub fn from_rational(&self, x: Q) -> CycloElement {
        let mut e = self.zero();
        e.coefficients[0] = x;
        e
    }

    pub fn one(&self) -> CycloElement {
        self.from_rational(Q::one())
    }

    /// `ζ^k` for any integer `k`.
    pub fn zeta_pow(&self, k: i64) -> CycloElement {
        let idx = k.rem_euclid(self.conductor as i64) as usize;
        CycloElement { conductor: self.conductor, coefficients: self.powers[idx].clone() }
    }

    /// `sum_k sums[k] ζ^k` for `k = 0 .. d-1`.
    pub fn from_exponent_sums(&self, sums: &[Q]) -> CycloElement {
        assert_eq!(sums.len() as u64, self.conductor);
        let mut out = vec![Q::zero(); self.degree];
        for (c, pow) in sums.iter().zip(&self.powers) {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(pow) {
                *o += c * p;
            }
        }
        CycloElement { conductor: self.conductor, coefficients: out }
    }

    pub fn mul(&self, a: &CycloElement, b: &CycloElement) -> CycloElement {
        let mut sums = vec![Q::zero(); self.conductor as usize];
        let d = self.conductor as usize;
        for (i, x) in a.coefficients.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coefficients.iter().enumerate() {
                if !y.is_zero() {
                    sums[(i + j) % d] += x * y;
                }
            }
        }
        self.from_exponent_sums(&sums)
    }

    /// Image under `ζ -> ζ^{-1}` (complex conjugation).
    pub fn conjugate(&self, a: &CycloElement) -> CycloElement {
        let d = self.conductor as usize;
        let mut sums = vec![Q::zero(); d];
        for (i, x) in a.coefficients.iter().enumerate() {
            sums[(d - i) % d] += x;
        }
        self.from_exponent_sums(&sums)
    }
}

/// Least primitive root modulo an odd prime.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_odd_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    let factors: Vec<u64> = factorize(p - 1).into_iter().map(|(f, _)| f).collect();
    let g = (2..p)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (p - 1) / f, p) != 1))
        .expect("every prime has a primitive root");
    Ok(g)
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// The character `χ_t` mod `p` with `χ_t(g) = ζ_{p-1}^t`, `g` the least
/// primitive root. `χ(0) = 0`.
#[derive(Clone, Debug)]
pub struct DirichletCharacter {
    modulus: u64,
    index: u64,
    generator: u64,
    field: Arc<CyclotomicField>,
    /// `log[a]` with `g^{log[a]} = a mod p`; entry 0 unused.
    log: Arc<Vec<u64>>,
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn generator(&self) -> u64 {
        self.generator
    }

    pub fn field(&self) -> &CyclotomicField {
        &self.field
    }

    pub fn is_trivial(&self) -> bool {
        self.index == 0
    }

    /// `χ(-1) = 1`, equivalently `t` even.
    pub fn is_even(&self) -> bool {
        self.index.is_multiple_of(2)
    }

    /// Exponent `e` with `χ(a) = ζ^e`, or `None` when `p | a`.
    pub fn exponent(&self, a: u64) -> Option<u64> {
        let a = a % self.modulus;
        (a != 0).then(|| self.index * self.log[a as usize] % (self.modulus - 1))
    }

    pub fn value(&self, a: u64) -> CycloElement {
        match self.exponent(a) {
            Some(e) => self.field.zeta_pow(e as i64),
            None => self.field.zero(),
        }
    }

    pub fn conjugate(&self) -> DirichletCharacter {
        let d = self.modulus - 1;
        DirichletCharacter { index: (d - self.index) % d, ..self.clone() }
    }

    /// `sum_{a=1}^{p-1} w(a) χ(a)` for rational weights.
    fn weighted_sum(&self, weight: impl Fn(u64) -> Q) -> CycloElement {
        let mut sums = vec![Q::zero(); (self.modulus - 1) as usize];
        for a in 1..self.modulus {
            let e = self.exponent(a).expect("unit");
            sums[e as usize] += weight(a);
        }
        self.field.from_exponent_sums(&sums)
    }
}

/// All `p - 1` characters mod `p`, indexed by `t = 0 .. p-2`.
pub fn characters(p: u64) -> Result<Vec<DirichletCharacter>> {
    let g = primitive_root(p)?;
    let field = Arc::new(CyclotomicField::new(p - 1));
    let mut log = vec![0u64; p as usize];
    let mut x = 1u64;
    for e in 0..p - 1 {
        log[x as usize] = e;
        x = x * g % p;
    }
    let log = Arc::new(log);
    Ok((0..p - 1)
        .map(|t| DirichletCharacter { modulus: p, index: t, generator: g, field: field.clone(), log: log.clone() })
        .collect())
}

pub fn character(p: u64, t: u64) -> Result<DirichletCharacter> {
    let mut all = characters(p)?;
    if t >= p - 1 {
        return Err(Error::ComponentIndexOutOfRange { k: t, modulus: p - 1 });
    }
    Ok(all.swap_remove(t as usize))
}

/// Bernoulli polynomial `B_k` for `k <= 2`, coefficients lowest first.
pub fn bernoulli_poly(k: u32) -> Result<Vec<Q>> {
    match k {
        0 => Ok(vec![Q::one()]),
        1 => Ok(vec![q(-1, 2), Q::one()]),
        2 => Ok(vec![q(1, 6), q(-1, 1), Q::one()]),
        _ => Err(Error::UnsupportedBernoulli(k)),
    }
}

pub fn eval_poly(coefficients: &[Q], x: &Q) -> Q {
    coefficients.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
}

/// `P(x)` through its Bernoulli form `B_2(0) - B_2(x)`.
pub fn p_via_bernoulli(x: &Q) -> Q {
    let b2 = bernoulli_poly(2).expect("B_2");
    eval_poly(&b2, &Q::zero()) - eval_poly(&b2, x)
}

/// `B_{k,χ} = p^{k-1} sum_{a=0}^{p-1} χ(a) B_k(<a/p>)`, only `k = 2`.
pub fn generalized_bernoulli(chi: &DirichletCharacter, k: u32) -> Result<CycloElement> {
    if k != 2 {
        return Err(Error::UnsupportedBernoulli(k));
    }
    let b2 = bernoulli_poly(2)?;
    let p = chi.modulus() as i64;
    let sum = chi.weighted_sum(|a| eval_poly(&b2, &q(a as i64, p)));
    Ok(sum.scale(&q(p, 1)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SChi {
    pub index: u64,
    pub even: bool,
    /// `sum_a χ(a) P(<a/p>)`.
    pub direct: CycloElement,
    /// `(-1/p) B_{2,χ}`, only for nontrivial `χ`.
    pub via_bernoulli: Option<CycloElement>,
}

impl SChi {
    pub fn routes_agree(&self) -> Option<bool> {
        self.via_bernoulli.as_ref().map(|b| *b == self.direct)
    }
}

pub fn s_chi(chi: &DirichletCharacter) -> SChi {
    let p = chi.modulus() as i64;
    let direct = chi.weighted_sum(|a| p_poly(&q(a as i64, p)));
    let via_bernoulli = (!chi.is_trivial()).then(|| {
        generalized_bernoulli(chi, 2).expect("k = 2").scale(&q(-1, p))
    });
    SChi { index: chi.index(), even: chi.is_even(), direct, via_bernoulli }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NonvanishingReport {
    pub p: u64,
    /// One entry per even character.
    pub even: Vec<SChi>,
    pub all_nonzero: bool,
    /// Both routes agree for every nontrivial even character.
    pub routes_agree: bool,
    /// `s_χ = 0` for every odd character.
    pub odd_vanish: bool,
}

impl NonvanishingReport {
    pub fn passed(&self) -> bool {
        self.all_nonzero && self.routes_agree && self.odd_vanish
    }
}

/// Certifies `s_χ != 0` for all `(p-1)/2` even characters mod `p`.
pub fn verify_nonvanishing(p: u64) -> Result<NonvanishingReport> {
    let chars = characters(p)?;
    let (even_chars, odd_chars): (Vec<_>, Vec<_>) = chars.iter().partition(|c| c.is_even());
    let even: Vec<SChi> = even_chars.iter().map(|c| s_chi(c)).collect();
    let all_nonzero = even.iter().all(|s| !s.direct.is_zero());
    let routes_agree = even.iter().all(|s| s.routes_agree().unwrap_or(true));
    let odd_vanish = odd_chars.iter().all(|c| s_chi(c).direct.is_zero());
    Ok(NonvanishingReport { p, even, all_nonzero, routes_agree, odd_vanish })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupActionReport {
    pub p: u64,
    /// `S_α = S_{p-α}` for all `α`.
    pub reflection: bool,
    /// `a · S_1 = S_a` for all units `a`.
    pub action: bool,
    /// `a · ω_χ(S_1) = χ^{-1}(a) ω_χ(S_1)` for every character and unit.
    pub eigenvectors: bool,
    /// First coordinate of `ω_χ(S_1)` is `s_χ` for every character.
    pub first_coordinate: bool,
}

impl GroupActionReport {
    pub fn passed(&self) -> bool {
        self.reflection && self.action && self.eigenvectors && self.first_coordinate
    }
}

/// Checks the `(Z/p)^×` action on the vectors `(S_α)_k = P(<αk/p>)`.
pub fn group_action_check(p: u64) -> Result<GroupActionReport> {
    let chars = characters(p)?;
    let pi = p as i64;
    let s_vec = |alpha: u64| -> Vec<Q> { (0..p).map(|k| p_poly(&q(((alpha * k) % p) as i64, pi))).collect() };
    let act = |a: u64, v: &[Q]| -> Vec<Q> { (0..p).map(|k| v[((a * k) % p) as usize].clone()).collect() };

    let vectors: Vec<Vec<Q>> = (0..p).map(s_vec).collect();
    let reflection = (1..p).all(|al| vectors[al as usize] == vectors[(p - al) as usize]);
    let action = (1..p).all(|a| act(a, &vectors[1]) == vectors[a as usize]);

    let mut eigenvectors = true;
    let mut first_coordinate = true;
    for chi in &chars {
        let field = chi.field();
        // ω_χ(S_1)_k = sum_a χ(a) P(<ak/p>)
        let omega: Vec<CycloElement> = (0..p)
            .map(|k| chi.weighted_sum(|a| vectors[a as usize][k as usize].clone()))
            .collect();
        first_coordinate &= omega[1] == s_chi(chi).direct;
        for a in 1..p {
            let inv = field.zeta_pow(-(chi.exponent(a).expect("unit") as i64));
            for k in 0..p {
                let lhs = &omega[((a * k) % p) as usize];
                if *lhs != field.mul(&inv, &omega[k as usize]) {
                    eigenvectors = false;
                }
            }
        }
    }
    Ok(GroupActionReport { p, reflection, action, eigenvectors, first_coordinate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::qi;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        for d in 1..40 {
            assert_eq!(cyclotomic_polynomial(d).len() as u64, euler_phi(d) + 1);
        }
    }

    #[test]
    fn zeta_has_order_d() {
        for d in [2u64, 4, 6, 10, 12, 30] {
            let f = CyclotomicField::new(d);
            let z = f.zeta_pow(1);
            let mut acc = f.one();
            for k in 1..=d {
                acc = f.mul(&acc, &z);
                assert_eq!(acc == f.one(), k == d, "d = {d}, k = {k}");
            }
        }
    }

    #[test]
    fn primitive_roots() {
        assert_eq!(primitive_root(5), Ok(2));
        assert_eq!(primitive_root(7), Ok(3));
        assert_eq!(primitive_root(3), Ok(2));
        assert_eq!(primitive_root(2), Err(Error::NotOddPrime(2)));
        assert_eq!(primitive_root(15), Err(Error::NotOddPrime(15)));
        // exhaustive order check for 23
        let order = |g: u64| (1..23).find(|&k| pow_mod(g, k, 23) == 1).unwrap();
        let least = (2..23).find(|&g| order(g) == 22).unwrap();
        assert_eq!(least, 5);
        assert_eq!(primitive_root(23), Ok(least));
    }

    #[test]
    fn character_tables_are_multiplicative() {
        for p in [3u64, 5, 7, 11, 13] {
            for chi in characters(p).unwrap() {
                let f = chi.field();
                for a in 1..p {
                    for b in 1..p {
                        assert_eq!(f.mul(&chi.value(a), &chi.value(b)), chi.value(a * b % p));
                    }
                }
                let minus_one = chi.value(p - 1);
                assert_eq!(minus_one == f.one(), chi.is_even());
                if chi.is_trivial() {
                    assert!((1..p).all(|a| chi.value(a) == f.one()));
                }
                assert!(chi.value(0).is_zero());
            }
        }
    }

    #[test]
    fn bernoulli_polynomials() {
        assert_eq!(bernoulli_poly(2).unwrap(), vec![q(1, 6), qi(-1), qi(1)]);
        assert_eq!(eval_poly(&bernoulli_poly(2).unwrap(), &qi(0)), q(1, 6));
        assert_eq!(bernoulli_poly(3), Err(Error::UnsupportedBernoulli(3)));
    }

    proptest! {
        #[test]
        fn p_plus_b2_is_one_sixth(a in -500i64..500, b in 1i64..500) {
            let x = q(a, b);
            prop_assert_eq!(p_poly(&x) + eval_poly(&bernoulli_poly(2).unwrap(), &x), q(1, 6));
            prop_assert_eq!(p_via_bernoulli(&x), p_poly(&x));
        }
    }

    // Term by term: sum_a χ(a) B_2(a/p), built from individual character
    // values rather than the exponent-bucket path.
    fn oracle_bernoulli(chi: &DirichletCharacter) -> CycloElement {
        let f = chi.field();
        let p = chi.modulus() as i64;
        let b2 = bernoulli_poly(2).unwrap();
        let mut acc = f.zero();
        for a in 0..chi.modulus() {
            acc = &acc + &f.mul(&chi.value(a), &f.from_rational(eval_poly(&b2, &q(a as i64, p))));
        }
        acc.scale(&q(p, 1))
    }

    #[test]
    fn quadratic_character_mod_5() {
        let chi = character(5, 2).unwrap();
        let b = generalized_bernoulli(&chi, 2).unwrap();
        assert_eq!(b.as_rational(), Some(q(4, 5)));
        assert_eq!(b, oracle_bernoulli(&chi));
        let s = s_chi(&chi);
        assert_eq!(s.direct.as_rational(), Some(q(-4, 25)));
        let direct = p_poly(&q(1, 5)) - p_poly(&q(2, 5)) - p_poly(&q(3, 5)) + p_poly(&q(4, 5));
        assert_eq!(direct, q(-4, 25));
        assert_eq!(s.routes_agree(), Some(true));
    }

    #[test]
    fn trivial_character() {
        for p in [3u64, 5, 7, 11, 13] {
            let chi = character(p, 0).unwrap();
            let pi = p as i64;
            let s = s_chi(&chi);
            assert_eq!(s.direct.as_rational(), Some(q(pi * pi - 1, 6 * pi)));
            assert_eq!(s.via_bernoulli, None);
            let b = generalized_bernoulli(&chi, 2).unwrap();
            assert_eq!(b, oracle_bernoulli(&chi));
            assert_eq!(b.as_rational(), Some(q(-(pi - 1), 6)));
        }
        assert_eq!(generalized_bernoulli(&character(5, 0).unwrap(), 1), Err(Error::UnsupportedBernoulli(1)));
    }

    #[test]
    fn conjugate_character_symmetry() {
        for p in [5u64, 7, 11, 13] {
            for chi in characters(p).unwrap() {
                let f = chi.field();
                let b = generalized_bernoulli(&chi, 2).unwrap();
                let bbar = generalized_bernoulli(&chi.conjugate(), 2).unwrap();
                assert_eq!(f.conjugate(&b), bbar);
                assert_eq!(b, oracle_bernoulli(&chi));
            }
        }
    }

    #[test]
    fn odd_characters_vanish() {
        for p in [5u64, 7, 11, 13, 17] {
            for chi in characters(p).unwrap().iter().filter(|c| !c.is_even()) {
                assert!(s_chi(chi).direct.is_zero());
            }
        }
    }

    #[test]
    fn nonvanishing_small_primes() {
        let r = verify_nonvanishing(5).unwrap();
        assert_eq!(r.even.len(), 2);
        assert!(r.passed());
        let r = verify_nonvanishing(3).unwrap();
        assert_eq!(r.even.len(), 1);
        assert!(r.even[0].direct.as_rational().is_some());
        assert!(r.passed());
        assert!(verify_nonvanishing(9).is_err());
    }

    #[test]
    fn group_action() {
        for p in [3u64, 5, 7, 11] {
            let r = group_action_check(p).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
