use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::lattice::{LatticeVec, SkewForm};
use super::vcoeff::{join_signed, VCoeff};
use crate::error::{Error, Result};

/// Element of the (quantum) torus `Z[v^{±1}][x_i^{±1}]`.
///
/// Terms are kept in lex order of the exponent vector. The product is the
/// twisted one `x^g * x^h = v^{lambda(g,h)} x^{g+h}` when a form is supplied and
/// the commutative one otherwise.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent {
    dim: usize,
    terms: BTreeMap<LatticeVec, VCoeff>,
}

impl Laurent {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::monomial(LatticeVec::zeros(dim))
    }

    pub fn monomial(exp: LatticeVec) -> Self {
        Self::term(exp, VCoeff::one())
    }

    pub fn term(exp: LatticeVec, c: VCoeff) -> Self {
        let dim = exp.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { dim, terms }
    }

    /// `x_i` in dimension `dim`.
    pub fn var(dim: usize, i: usize) -> Self {
        Self::monomial(LatticeVec::unit(dim, i))
    }

    pub fn from_terms<I: IntoIterator<Item = (LatticeVec, VCoeff)>>(dim: usize, iter: I) -> Self {
        let mut out = Self::zero(dim);
        for (e, c) in iter {
            out.add_term(e, &c);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&LatticeVec, &VCoeff)> + '_ {
        self.terms.iter()
    }

    pub fn exponents(&self) -> impl Iterator<Item = &LatticeVec> + '_ {
        self.terms.keys()
    }

    pub fn coeff(&self, e: &LatticeVec) -> VCoeff {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn add_term(&mut self, e: LatticeVec, c: &VCoeff) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(e.dim(), self.dim);
        match self.terms.get_mut(&e) {
            Some(x) => {
                x.add_assign_ref(c);
                if x.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension { expected: self.dim, got: other.dim });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), &c.neg());
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &VCoeff) -> Self {
        Self::from_terms(self.dim, self.terms.iter().map(|(e, a)| (e.clone(), a.mul(c))))
    }

    /// `x^a * self` without twist.
    pub fn shift(&self, a: &[i64]) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.add(a), c.clone())).collect(),
        }
    }

    /// Product, twisted by `lambda` when given.
    pub fn mul(&self, other: &Self, lambda: Option<&SkewForm>) -> Result<Self> {
        self.check_dim(other)?;
        if let Some(l) = lambda {
            if l.dim() != self.dim {
                return Err(Error::Dimension { expected: self.dim, got: l.dim() });
            }
        }
        let mut out = Self::zero(self.dim);
        let lh: Vec<(Vec<i64>, &LatticeVec, &VCoeff)> = other
            .terms
            .iter()
            .map(|(h, c)| (lambda.map(|l| l.apply(h)).unwrap_or_default(), h, c))
            .collect();
        for (g, a) in &self.terms {
            for (lhv, h, b) in &lh {
                let t = if lambda.is_some() { g.dot(lhv) } else { 0 };
                out.add_term(g.add(h), &a.mul(b).shift(t));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32, lambda: Option<&SkewForm>) -> Result<Self> {
        let mut out = Self::one(self.dim);
        for _ in 0..k {
            out = out.mul(self, lambda)?;
        }
        Ok(out)
    }

    /// Right division: the unique `q` with `q * divisor = self`.
    pub fn exact_div(&self, divisor: &Self, lambda: Option<&SkewForm>) -> Result<Self> {
        self.check_dim(divisor)?;
        if divisor.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.dim));
        }
        let (lo_a, hi_a) = self.bounding_box();
        let (lo_b, hi_b) = divisor.bounding_box();
        let lo: Vec<i64> = lo_a.iter().zip(&lo_b).map(|(a, b)| a - b).collect();
        let hi: Vec<i64> = hi_a.iter().zip(&hi_b).map(|(a, b)| a - b).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::InexactDivision);
        }
        let (h, cb) = divisor.terms.iter().next_back().unwrap();
        let mut rem = self.clone();
        let mut q = Self::zero(self.dim);
        while let Some((ga, ca)) = rem.terms.iter().next_back().map(|(a, b)| (a.clone(), b.clone())) {
            let g = ga.sub(h);
            if g.iter().zip(lo.iter().zip(&hi)).any(|(x, (l, u))| x < l || x > u) {
                return Err(Error::InexactDivision);
            }
            let twist = lambda.map(|l| l.eval(&g, h)).unwrap_or(0);
            let c = ca.exact_div(&cb.shift(twist)).ok_or(Error::InexactDivision)?;
            let t = Self::term(g.clone(), c.clone());
            for (e, a) in t.mul(divisor, lambda)?.terms {
                rem.add_term(e, &a.neg());
            }
            q.add_term(g, &c);
        }
        Ok(q)
    }

    /// Coordinatewise minimum and maximum exponents.
    pub fn bounding_box(&self) -> (Vec<i64>, Vec<i64>) {
        let mut lo = vec![i64::MAX; self.dim];
        let mut hi = vec![i64::MIN; self.dim];
        for e in self.terms.keys() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(e[i]);
                hi[i] = hi[i].max(e[i]);
            }
        }
        (lo, hi)
    }

    /// Bar involution: `v -> v^{-1}` on coefficients, monomials fixed.
    pub fn bar(&self) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.bar())).collect(),
        }
    }

    pub fn is_bar_invariant(&self) -> bool {
        self.bar() == *self
    }

    /// Specialization `v = 1`.
    pub fn eval_at_one(&self) -> Self {
        Self::from_terms(
            self.dim,
            self.terms.iter().map(|(e, c)| (e.clone(), VCoeff::from_big(c.eval_at_one()))),
        )
    }

    pub fn is_classical(&self) -> bool {
        self.terms.values().all(|c| c.is_classical())
    }

    /// All coefficients have nonnegative integer coefficients in `v`.
    pub fn is_positive(&self) -> bool {
        self.terms.values().all(|c| c.all_nonneg())
    }

    /// Evaluation at an integer point with `v = 1`; negative exponents must be
    /// invertible, so callers pass nonzero values.
    pub fn eval_rational(&self, point: &[num_rational::BigRational]) -> num_rational::BigRational {
        let mut s = num_rational::BigRational::from_integer(BigInt::from(0));
        for (e, c) in &self.terms {
            let mut t = num_rational::BigRational::from_integer(c.eval_at_one());
            for (p, &k) in point.iter().zip(e.iter()) {
                if k >= 0 {
                    t *= num_traits::pow(p.clone(), k as usize);
                } else {
                    t /= num_traits::pow(p.clone(), (-k) as usize);
                }
            }
            s += t;
        }
        s
    }

    /// Keeps only the terms satisfying `keep`.
    pub fn filter<F: Fn(&LatticeVec) -> bool>(&self, keep: F) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().filter(|(e, _)| keep(e)).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// Applies a linear change of exponents; colliding terms add up.
    pub fn map_exponents<F: Fn(&LatticeVec) -> LatticeVec>(&self, dim: usize, f: F) -> Self {
        Self::from_terms(dim, self.terms.iter().map(|(e, c)| (f(e), c.clone())))
    }

    fn fmt_term(e: &LatticeVec, c: &VCoeff) -> String {
        let mono = format!("x^{e}");
        if c.is_classical() {
            let k = c.coeff(0);
            if k.is_one() {
                mono
            } else if k == -BigInt::one() {
                format!("-{mono}")
            } else {
                format!("{k} * {mono}")
            }
        } else if c.len() == 1 {
            format!("{c} * {mono}")
        } else {
            format!("({c}) * {mono}")
        }
    }

    /// Evaluates every coefficient at `v = 1` and reports whether all are
    /// nonnegative.
    pub fn classical_nonneg(&self) -> bool {
        self.terms.values().all(|c| !c.eval_at_one().is_negative())
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| Self::fmt_term(e, c)).collect();
        write!(f, "{}", join_signed(&parts))
    }
}

#[derive(Serialize, Deserialize)]
struct LaurentRepr {
    dim: usize,
    terms: Vec<(Vec<i64>, Vec<(i64, String)>)>,
}

impl Serialize for Laurent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LaurentRepr {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.0.clone(), c.terms().map(|(k, a)| (k, a.to_string())).collect()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Laurent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = LaurentRepr::deserialize(d)?;
        let mut out = Laurent::zero(r.dim);
        for (e, cs) in r.terms {
            let mut c = VCoeff::zero();
            for (k, a) in cs {
                let a: BigInt = a.parse().map_err(serde::de::Error::custom)?;
                c.add_term(k, &a);
            }
            out.add_term(LatticeVec(e), &c);
        }
        Ok(out)
    }
}
