use std::fmt;
use std::ops::{Deref, Index};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer vector, indexed either by all vertices or by the unfrozen ones.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVec(pub Vec<i64>);

impl LatticeVec {
    pub fn zeros(n: usize) -> Self {
        Self(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, o: &[i64]) -> Self {
        Self(self.0.iter().zip(o).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &[i64]) -> Self {
        Self(self.0.iter().zip(o).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: i64) -> Self {
        Self(self.0.iter().map(|a| a * k).collect())
    }

    pub fn dot(&self, o: &[i64]) -> i64 {
        self.0.iter().zip(o).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn is_nonneg(&self) -> bool {
        self.0.iter().all(|&a| a >= 0)
    }

    pub fn total(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn pos_part(&self) -> Self {
        Self(self.0.iter().map(|&a| a.max(0)).collect())
    }

    pub fn neg_part(&self) -> Self {
        Self(self.0.iter().map(|&a| (-a).max(0)).collect())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] != 0).collect()
    }
}

impl Deref for LatticeVec {
    type Target = [i64];
    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for LatticeVec {
    fn from(v: Vec<i64>) -> Self {
        Self(v)
    }
}

impl From<&[i64]> for LatticeVec {
    fn from(v: &[i64]) -> Self {
        Self(v.to_vec())
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Integer skew-symmetric form `lambda(g, h) = g^T L h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i64>>", into = "Vec<Vec<i64>>")]
pub struct SkewForm {
    m: Vec<Vec<i64>>,
}

impl SkewForm {
    pub fn new(m: Vec<Vec<i64>>) -> Result<Self> {
        let n = m.len();
        for (i, row) in m.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Dimension { expected: n, got: row.len() });
            }
            for j in 0..n {
                if row[j] != -m[j][i] {
                    return Err(Error::IncompatiblePair(format!(
                        "quantum form is not skew-symmetric at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { m })
    }

    pub fn zero(n: usize) -> Self {
        Self { m: vec![vec![0; n]; n] }
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn eval(&self, g: &[i64], h: &[i64]) -> i64 {
        let mut s = 0;
        for (i, gi) in g.iter().enumerate() {
            if *gi == 0 {
                continue;
            }
            s += gi * self.m[i].iter().zip(h).map(|(a, b)| a * b).sum::<i64>();
        }
        s
    }

    /// `L h`
    pub fn apply(&self, h: &[i64]) -> Vec<i64> {
        self.m.iter().map(|row| row.iter().zip(h).map(|(a, b)| a * b).sum()).collect()
    }

    /// `E^T L E`
    pub fn congruent(&self, e: &[Vec<i64>]) -> Self {
        let n = self.m.len();
        let mut le = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                le[i][j] = (0..n).map(|k| self.m[i][k] * e[k][j]).sum();
            }
        }
        let mut out = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in 0..n {
                out[i][j] = (0..n).map(|k| e[k][i] * le[k][j]).sum();
            }
        }
        Self { m: out }
    }

    /// Simultaneous permutation: new index `a` takes old index `perm[a]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut out = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                out[a][b] = self.m[perm[a]][perm[b]];
            }
        }
        Self { m: out }
    }

    /// Restriction to the given index list.
    pub fn restrict(&self, idx: &[usize]) -> Self {
        self.permuted(idx)
    }
}

impl Index<(usize, usize)> for SkewForm {
    type Output = i64;
    fn index(&self, (i, j): (usize, usize)) -> &i64 {
        &self.m[i][j]
    }
}

impl TryFrom<Vec<Vec<i64>>> for SkewForm {
    type Error = Error;
    fn try_from(m: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(m)
    }
}

impl From<SkewForm> for Vec<Vec<i64>> {
    fn from(s: SkewForm) -> Self {
        s.m
    }
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Integer value of a rational, if it is one and fits.
pub fn rat_to_i64(q: &BigRational) -> Option<i64> {
    if !q.is_integer() {
        return None;
    }
    i64::try_from(q.to_integer()).ok()
}

/// Row echelon data of a rational matrix.
pub struct Echelon {
    pub rank: usize,
    pub pivot_cols: Vec<usize>,
    /// rows of the original matrix that were used as pivots, in pivot order
    pub pivot_rows: Vec<usize>,
}

/// Rank and pivot rows of `m`; rows are processed in order so the pivot rows
/// form a maximal independent prefix-greedy subset.
pub fn independent_rows(m: &[Vec<BigRational>]) -> Echelon {
    let mut basis: Vec<(usize, Vec<BigRational>)> = Vec::new();
    let mut pivot_rows = Vec::new();
    for (ri, row) in m.iter().enumerate() {
        let mut r = row.clone();
        for (pc, b) in &basis {
            if !r[*pc].is_zero() {
                let f = r[*pc].clone() / &b[*pc];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(pc) = r.iter().position(|x| !x.is_zero()) {
            basis.push((pc, r));
            pivot_rows.push(ri);
        }
    }
    Echelon {
        rank: basis.len(),
        pivot_cols: basis.iter().map(|(c, _)| *c).collect(),
        pivot_rows,
    }
}

pub fn rank(m: &[Vec<BigRational>]) -> usize {
    independent_rows(m).rank
}

pub fn to_rat_matrix(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    m.iter().map(|r| r.iter().map(|&a| rat(a)).collect()).collect()
}

/// Inverse of a square rational matrix.
pub fn inverse(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pr = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Some solution of `A x = b`, or `None` if inconsistent.
pub fn solve(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(r, x)| {
            let mut r = r.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let pv = m[row][col].clone();
        for x in m[row].iter_mut() {
            *x /= &pv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pr = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    if m[row..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    let mut x = vec![BigRational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: i64, b: i64) -> i64 {
    num_integer::lcm(a, b)
}

/// Vector divided by the gcd of its entries, with the gcd.
pub fn primitive(v: &[i64]) -> (Vec<i64>, i64) {
    let g = v.iter().fold(0, |acc, &x| gcd(acc, x)).abs();
    if g == 0 {
        return (v.to_vec(), 0);
    }
    (v.iter().map(|x| x / g).collect(), g)
}

pub fn sign(q: &BigRational) -> i32 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_form_checks() {
        assert!(SkewForm::new(vec![vec![0, 1], vec![1, 0]]).is_err());
        let l = SkewForm::new(vec![vec![0, 2], vec![-2, 0]]).unwrap();
        assert_eq!(l.eval(&[1, 0], &[0, 1]), 2);
        assert_eq!(l.eval(&[0, 1], &[1, 0]), -2);
    }

    #[test]
    fn inverse_and_solve() {
        let m = to_rat_matrix(&[vec![2, 1], vec![1, 1]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, to_rat_matrix(&[vec![1, -1], vec![-1, 2]]));
        let x = solve(&m, &[rat(3), rat(2)]).unwrap();
        assert_eq!(x, vec![rat(1), rat(1)]);
        let sing = to_rat_matrix(&[vec![1, 1], vec![2, 2]]);
        assert!(inverse(&sing).is_none());
        assert!(solve(&sing, &[rat(1), rat(3)]).is_none());
    }

    #[test]
    fn echelon_rank() {
        let m = to_rat_matrix(&[vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0], vec![1, 0, 0]]);
        let e = independent_rows(&m);
        assert_eq!(e.rank, 3);
        assert_eq!(e.pivot_rows, vec![0, 1, 3]);
    }
}
