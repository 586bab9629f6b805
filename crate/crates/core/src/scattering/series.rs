use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::ring::{LatticeVec, Laurent, PStar, VCoeff};

/// Univariate power series `1 + sum_{j>=1} c_j t^j`, stored without the
/// constant term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WallFunction {
    /// `coeffs[j - 1]` is the coefficient of `t^j`
    pub coeffs: Vec<BigInt>,
}

impl WallFunction {
    pub fn one() -> Self {
        Self::default()
    }

    /// `1 + t`
    pub fn binomial() -> Self {
        Self { coeffs: vec![BigInt::one()] }
    }

    pub fn coeff(&self, j: usize) -> BigInt {
        if j == 0 {
            return BigInt::one();
        }
        self.coeffs.get(j - 1).cloned().unwrap_or_default()
    }

    pub fn is_trivial(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add_coeff(&mut self, j: usize, c: &BigInt) {
        if self.coeffs.len() < j {
            self.coeffs.resize(j, BigInt::zero());
        }
        self.coeffs[j - 1] += c;
        while self.coeffs.last().is_some_and(|x| x.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Dense coefficients `[1, c_1, ..., c_jmax]`.
    pub fn dense(&self, jmax: usize) -> Vec<BigInt> {
        (0..=jmax).map(|j| self.coeff(j)).collect()
    }

    pub fn mul_dense(a: &[BigInt], b: &[BigInt], jmax: usize) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); jmax + 1];
        for (i, x) in a.iter().enumerate().take(jmax + 1) {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate().take(jmax + 1 - i) {
                out[i + j] += x * y;
            }
        }
        out
    }

    /// `f^e` truncated at `t^jmax`, for any integer `e`.
    pub fn pow(&self, e: i64, jmax: usize) -> Vec<BigInt> {
        let base = if e >= 0 { self.dense(jmax) } else { self.inverse(jmax) };
        let mut out = vec![BigInt::zero(); jmax + 1];
        out[0] = BigInt::one();
        let mut k = e.unsigned_abs();
        let mut b = base;
        while k > 0 {
            if k & 1 == 1 {
                out = Self::mul_dense(&out, &b, jmax);
            }
            k >>= 1;
            if k > 0 {
                b = Self::mul_dense(&b, &b, jmax);
            }
        }
        out
    }

    /// `1 / f` truncated at `t^jmax`.
    pub fn inverse(&self, jmax: usize) -> Vec<BigInt> {
        let f = self.dense(jmax);
        let mut g = vec![BigInt::zero(); jmax + 1];
        g[0] = BigInt::one();
        for j in 1..=jmax {
            let mut s = BigInt::zero();
            for i in 1..=j {
                s += &f[i] * &g[j - i];
            }
            g[j] = -s;
        }
        g
    }

    /// Product with another wall function, truncated at `t^jmax`.
    pub fn mul(&self, other: &Self, jmax: usize) -> Self {
        let d = Self::mul_dense(&self.dense(jmax), &other.dense(jmax), jmax);
        let mut out = Self { coeffs: d[1..].to_vec() };
        while out.coeffs.last().is_some_and(|x| x.is_zero()) {
            out.coeffs.pop();
        }
        out
    }

    /// Map `k -> coefficient` for the nonzero terms.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| ((j + 1).to_string(), c.to_string()))
            .collect()
    }
}

/// Truncated element `x^base * sum_n c_n y^n` with `y^n = x^{p*(n)}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesElement {
    pub base: LatticeVec,
    pub terms: BTreeMap<LatticeVec, BigInt>,
}

impl SeriesElement {
    /// `x^base`, with `r` unfrozen directions.
    pub fn monomial(base: LatticeVec, r: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(LatticeVec::zeros(r), BigInt::one());
        Self { base, terms }
    }

    pub fn add_term(&mut self, n: LatticeVec, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(n.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&n);
        }
    }

    pub fn coeff(&self, n: &LatticeVec) -> BigInt {
        self.terms.get(n).cloned().unwrap_or_default()
    }

    /// Drops terms of total degree above `k`.
    pub fn truncate(&self, k: i64) -> Self {
        Self {
            base: self.base.clone(),
            terms: self.terms.iter().filter(|(n, _)| n.total() <= k).map(|(n, c)| (n.clone(), c.clone())).collect(),
        }
    }

    pub fn to_laurent(&self, pstar: &PStar) -> Laurent {
        Laurent::from_terms(
            self.base.dim(),
            self.terms.iter().map(|(n, c)| (self.base.add(&pstar.apply(n)), VCoeff::from_big(c.clone()))),
        )
    }
}
