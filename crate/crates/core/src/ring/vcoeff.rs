use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Laurent polynomial in the quantum parameter `v` with integer coefficients.
///
/// Exponents of `v` map to nonzero coefficients; the classical case is a single
/// entry at exponent 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VCoeff {
    terms: BTreeMap<i64, BigInt>,
}

impl VCoeff {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_big(BigInt::from(c))
    }

    pub fn from_big(c: BigInt) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * v^e`
    pub fn monomial(c: BigInt, e: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    /// `v^e`
    pub fn v_pow(e: i64) -> Self {
        Self::monomial(BigInt::one(), e)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, BigInt)>>(iter: I) -> Self {
        let mut out = Self::zero();
        for (e, c) in iter {
            out.add_term(e, &c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// True when no positive or negative power of `v` occurs.
    pub fn is_classical(&self) -> bool {
        self.terms.keys().all(|&e| e == 0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_default()
    }

    /// Specialization `v = 1`.
    pub fn eval_at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn all_nonneg(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// `v -> v^{-1}`
    pub fn bar(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect(),
        }
    }

    /// Multiplication by `v^e`.
    pub fn shift(&self, e: i64) -> Self {
        if e == 0 {
            return self.clone();
        }
        Self {
            terms: self.terms.iter().map(|(k, c)| (k + e, c.clone())).collect(),
        }
    }

    pub fn add_term(&mut self, e: i64, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_default();
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, c);
        }
    }

    pub fn sub_assign_ref(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, &-c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign_ref(other);
        out
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            return other.scale_shift(c, *e);
        }
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, &(c1 * c2));
            }
        }
        out
    }

    /// `c * v^e * self`
    pub fn scale_shift(&self, c: &BigInt, e: i64) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, a)| (k + e, a * c)).collect(),
        }
    }

    /// Exact quotient `self / other` in `Z[v^{±1}]`, `None` if it does not exist.
    pub fn exact_div(&self, other: &Self) -> Option<Self> {
        if other.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if other.terms.len() == 1 {
            let (e, c) = other.terms.iter().next().unwrap();
            let mut terms = BTreeMap::new();
            for (k, a) in &self.terms {
                let (q, r) = a.div_rem(c);
                if !r.is_zero() {
                    return None;
                }
                terms.insert(k - e, q);
            }
            return Some(Self { terms });
        }
        // dense long division from the top degree
        let a_lo = *self.terms.keys().next().unwrap();
        let a_hi = *self.terms.keys().next_back().unwrap();
        let b_lo = *other.terms.keys().next().unwrap();
        let b_hi = *other.terms.keys().next_back().unwrap();
        if a_hi - a_lo < b_hi - b_lo {
            return None;
        }
        let mut rem: Vec<BigInt> = (a_lo..=a_hi).map(|e| self.coeff(e)).collect();
        let b: Vec<BigInt> = (b_lo..=b_hi).map(|e| other.coeff(e)).collect();
        let db = b.len() - 1;
        let lead = &b[db];
        let mut q = BTreeMap::new();
        let mut top = rem.len() - 1;
        while top >= db {
            if !rem[top].is_zero() {
                let (c, r) = rem[top].div_rem(lead);
                if !r.is_zero() {
                    return None;
                }
                let shift = top - db;
                for (i, bi) in b.iter().enumerate() {
                    rem[shift + i] -= &c * bi;
                }
                q.insert(a_lo + shift as i64 - b_lo, c);
            }
            if top == 0 {
                break;
            }
            top -= 1;
        }
        if rem.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self { terms: q })
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    fn fmt_term(e: i64, c: &BigInt) -> String {
        let vpart = match e {
            0 => String::new(),
            1 => "v".to_string(),
            _ => format!("v^{e}"),
        };
        if vpart.is_empty() {
            return c.to_string();
        }
        if c.is_one() {
            vpart
        } else if *c == -BigInt::one() {
            format!("-{vpart}")
        } else {
            format!("{c}*{vpart}")
        }
    }
}

/// Joins signed term strings with ` + ` and ` - `.
pub(crate) fn join_signed(parts: &[String]) -> String {
    let mut out = String::new();
    for (i, p) in parts.iter().enumerate() {
        if i == 0 {
            out.push_str(p);
        } else if let Some(rest) = p.strip_prefix('-') {
            out.push_str(" - ");
            out.push_str(rest);
        } else {
            out.push_str(" + ");
            out.push_str(p);
        }
    }
    out
}

impl fmt::Display for VCoeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| Self::fmt_term(*e, c)).collect();
        write!(f, "{}", join_signed(&parts))
    }
}

impl From<i64> for VCoeff {
    fn from(c: i64) -> Self {
        Self::from_int(c)
    }
}

impl From<BigInt> for VCoeff {
    fn from(c: BigInt) -> Self {
        Self::from_big(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vc(pairs: &[(i64, i64)]) -> VCoeff {
        VCoeff::from_terms(pairs.iter().map(|&(e, c)| (e, BigInt::from(c))))
    }

    #[test]
    fn division_roundtrip() {
        let a = vc(&[(-1, 1), (1, 1)]);
        let b = vc(&[(0, 2), (3, -1), (5, 7)]);
        let p = a.mul(&b);
        assert_eq!(p.exact_div(&a).unwrap(), b);
        assert_eq!(p.exact_div(&b).unwrap(), a);
        assert!(vc(&[(0, 1), (1, 1)]).exact_div(&vc(&[(0, 2)])).is_none());
        assert!(vc(&[(0, 1), (2, 1)]).exact_div(&vc(&[(0, 1), (1, 1)])).is_none());
    }

    #[test]
    fn display() {
        assert_eq!(vc(&[(-1, 1), (0, -2), (1, 3)]).to_string(), "v^-1 - 2 + 3*v");
        assert_eq!(vc(&[(0, 5)]).to_string(), "5");
        assert_eq!(vc(&[(1, -1)]).to_string(), "-v");
    }

    #[test]
    fn bar_and_eval() {
        let a = vc(&[(-2, 3), (1, 1)]);
        assert_eq!(a.bar(), vc(&[(2, 3), (-1, 1)]));
        assert_eq!(a.eval_at_one(), BigInt::from(4));
    }
}
