//! Exact rational scalars and dense matrices over ℚ.
//!
//! Determinants use fraction-free (Bareiss) elimination on an integer
//! matrix obtained by clearing row denominators. Linear solves use
//! Gauss-Jordan elimination over `BigRational` and report the full affine
//! solution set when the system is singular.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

/// `num/den` as an exact rational.
pub fn q(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Formats as `num/den`, always including the denominator.
pub fn fmt_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `a/b` or a bare integer.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

/// Solution set `particular + span(nullspace)` of a linear system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearSolution {
    pub particular: Vec<Q>,
    pub nullspace: Vec<Vec<Q>>,
}

impl LinearSolution {
    pub fn is_unique(&self) -> bool {
        self.nullspace.is_empty()
    }
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Q) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMatrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        QMatrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Q) {
        self.data[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Exact determinant. Row denominators are cleared first, then the
    /// integer matrix is reduced with Bareiss' fraction-free recurrence.
    pub fn determinant(&self) -> Q {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Q::one();
        }
        let mut scale = BigInt::one();
        let mut m: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        for i in 0..n {
            let row = self.row(i);
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            m.push(row.iter().map(|x| x.numer() * (&l / x.denom())).collect());
        }
        Q::new(bareiss_determinant(m), scale)
    }

    /// Solves `self * x = rhs`. Returns the reduced particular solution
    /// (free variables set to zero) together with a nullspace basis.
    pub fn solve(&self, rhs: &[Q]) -> Result<LinearSolution> {
        assert_eq!(rhs.len(), self.rows);
        let (rows, cols) = (self.rows, self.cols);
        let mut a: Vec<Vec<Q>> = (0..rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(rhs[i].clone());
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(r, p);
            let inv = a[r][c].recip();
            for x in a[r].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = a[r].clone();
            for (i, row) in a.iter_mut().enumerate() {
                if i != r && !row[c].is_zero() {
                    let f = row[c].clone();
                    for (x, y) in row.iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        if a[r..].iter().any(|row| !row[cols].is_zero()) {
            return Err(Error::InconsistentSystem);
        }
        let mut particular = vec![Q::zero(); cols];
        for (i, &c) in pivots.iter().enumerate() {
            particular[c] = a[i][cols].clone();
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let nullspace = free
            .iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); cols];
                v[f] = Q::one();
                for (i, &c) in pivots.iter().enumerate() {
                    v[c] = -a[i][f].clone();
                }
                v
            })
            .collect();
        Ok(LinearSolution { particular, nullspace })
    }
}

impl fmt::Display for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(fmt_q).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Bareiss fraction-free elimination. Every intermediate division is exact.
pub fn bareiss_determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                debug_assert!((&v % &prev).is_zero());
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect())
    }

    // Leibniz expansion over all permutations.
    fn leibniz(m: &QMatrix) -> Q {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for pos in 0..=p.len() {
                    let mut v = p.clone();
                    v.insert(pos, n - 1);
                    out.push(v);
                }
            }
            out
        }
        let n = m.rows();
        perms(n)
            .into_iter()
            .map(|p| {
                let inversions = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                let prod: Q = (0..n).map(|i| m.get(i, p[i]).clone()).product();
                if inversions % 2 == 0 { prod } else { -prod }
            })
            .sum()
    }

    #[test]
    fn formatting_always_has_denominator() {
        assert_eq!(fmt_q(&qi(4)), "4/1");
        assert_eq!(fmt_q(&q(-2, 6)), "-1/3");
        assert_eq!(parse_q("-1/3"), Some(q(-1, 3)));
        assert_eq!(parse_q("7"), Some(qi(7)));
        assert_eq!(parse_q("1/0"), None);
    }

    #[test]
    fn determinant_matches_leibniz() {
        let m = QMatrix::from_fn(4, 4, |i, j| q((i * 7 + j * j) as i64 % 5 - 2, (i + j + 1) as i64));
        assert_eq!(m.determinant(), leibniz(&m));
        let singular = qm(&[&[1, 2], &[2, 4]]);
        assert!(singular.determinant().is_zero());
        // zero leading pivot needs a swap
        let swap = qm(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]]);
        assert_eq!(swap.determinant(), leibniz(&swap));
    }

    #[test]
    fn solve_unique_and_singular() {
        let m = qm(&[&[2, 1], &[1, 3]]);
        let s = m.solve(&[qi(3), qi(5)]).unwrap();
        assert!(s.is_unique());
        assert_eq!(m.mul_vec(&s.particular), vec![qi(3), qi(5)]);

        let sing = qm(&[&[1, 1], &[2, 2]]);
        let s = sing.solve(&[qi(1), qi(2)]).unwrap();
        assert_eq!(s.nullspace.len(), 1);
        assert_eq!(sing.mul_vec(&s.particular), vec![qi(1), qi(2)]);
        assert!(sing.mul_vec(&s.nullspace[0]).iter().all(Zero::is_zero));

        assert_eq!(sing.solve(&[qi(1), qi(3)]), Err(Error::InconsistentSystem));
    }
}
