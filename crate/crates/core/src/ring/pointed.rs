use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::lattice::{independent_rows, inverse, to_rat_matrix, LatticeVec};
use super::laurent::Laurent;
use super::vcoeff::VCoeff;
use crate::error::{Error, Result};

/// The map `p*: n -> B~ n` of a seed together with a left inverse on its image.
///
/// The left inverse is stored as an integer matrix over a common denominator,
/// built from an invertible square block of rows of `B~`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PStar {
    bt: Vec<Vec<i64>>,
    rows: Vec<usize>,
    lint: Vec<Vec<i64>>,
    den: i64,
}

impl PStar {
    /// `bt` has one row per vertex and one column per unfrozen vertex.
    pub fn new(bt: Vec<Vec<i64>>) -> Result<Self> {
        let r = bt.first().map(|row| row.len()).unwrap_or(0);
        let m = to_rat_matrix(&bt);
        let ech = independent_rows(&m);
        if ech.rank < r {
            return Err(Error::Rank);
        }
        let rows = ech.pivot_rows;
        let block: Vec<_> = rows.iter().map(|&i| m[i].clone()).collect();
        let inv = inverse(&block).ok_or(Error::Rank)?;
        let den = inv
            .iter()
            .flatten()
            .fold(num_bigint::BigInt::from(1), |acc, q| num_integer::lcm(acc, q.denom().clone()));
        let lint = inv
            .iter()
            .map(|row| {
                row.iter()
                    .map(|q| i64::try_from(q.numer() * (&den / q.denom())).expect("entry fits in i64"))
                    .collect()
            })
            .collect();
        Ok(Self { bt, rows, lint, den: i64::try_from(den).expect("denominator fits in i64") })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.bt.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.bt
    }

    /// `p*(n)` as a vector indexed by all vertices.
    pub fn apply(&self, n: &[i64]) -> LatticeVec {
        LatticeVec(self.bt.iter().map(|row| row.iter().zip(n).map(|(a, b)| a * b).sum()).collect())
    }

    /// The unique integer `n` with `p*(n) = diff`, if any.
    pub fn preimage(&self, diff: &[i64]) -> Option<LatticeVec> {
        let mut n = Vec::with_capacity(self.rows.len());
        for row in &self.lint {
            let s: i64 = row.iter().zip(&self.rows).map(|(a, &i)| a * diff[i]).sum();
            if s % self.den != 0 {
                return None;
            }
            n.push(s / self.den);
        }
        let n = LatticeVec(n);
        if self.apply(&n).0 != diff {
            return None;
        }
        Some(n)
    }

    /// Scaled height: strictly decreases along `e -> e + p*(n)` for `n >= 0`, `n != 0`.
    pub fn height(&self, e: &[i64]) -> i64 {
        -self
            .lint
            .iter()
            .map(|row| row.iter().zip(&self.rows).map(|(a, &i)| a * e[i]).sum::<i64>())
            .sum::<i64>()
    }

    /// `g1` is dominated by `g2`: `g1 = g2 + p*(n)` with `n >= 0`.
    pub fn dominated(&self, g1: &[i64], g2: &[i64]) -> bool {
        let diff: Vec<i64> = g1.iter().zip(g2).map(|(a, b)| a - b).collect();
        self.preimage(&diff).is_some_and(|n| n.is_nonneg())
    }
}

/// A pointed element split into its degree and F-polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointedElement {
    pub element: Laurent,
    pub degree: LatticeVec,
    /// coefficient of `x^{degree + p*(n)}`, keyed by `n`
    pub fpoly: BTreeMap<LatticeVec, VCoeff>,
}

impl PointedElement {
    /// Unfrozen positions `k` with `n_k > 0` for some term.
    pub fn support(&self) -> BTreeSet<usize> {
        self.fpoly.keys().flat_map(|n| n.support()).collect()
    }

    /// Coordinatewise maximum of `n` over the terms.
    pub fn supp_dim(&self) -> LatticeVec {
        let r = self.fpoly.keys().next().map(|n| n.dim()).unwrap_or(0);
        let mut out = LatticeVec::zeros(r);
        for n in self.fpoly.keys() {
            for k in 0..r {
                out.0[k] = out.0[k].max(n[k]);
            }
        }
        out
    }

    /// Exponents `n` of the F-polynomial with nonzero classical coefficient.
    pub fn classical_exponents(&self) -> Vec<Vec<i64>> {
        self.fpoly
            .iter()
            .filter(|(_, c)| !c.eval_at_one().is_zero())
            .map(|(n, _)| n.0.clone())
            .collect()
    }

    pub fn quantum_exponents(&self) -> Vec<Vec<i64>> {
        self.fpoly.keys().map(|n| n.0.clone()).collect()
    }
}

/// The dominance-maximal exponent, when unique, with its coefficient.
pub fn leading(a: &Laurent, pstar: &PStar) -> Result<(LatticeVec, VCoeff)> {
    let mut best: Option<(i64, &LatticeVec)> = None;
    let mut tie = false;
    for e in a.exponents() {
        let h = pstar.height(e);
        match best {
            Some((bh, _)) if h < bh => {}
            Some((bh, _)) if h == bh => tie = true,
            _ => {
                best = Some((h, e));
                tie = false;
            }
        }
    }
    let (_, g) = best.ok_or(Error::NotPointed)?;
    if tie {
        return Err(Error::NotPointed);
    }
    for e in a.exponents() {
        if !pstar.dominated(e, g) {
            return Err(Error::NotPointed);
        }
    }
    Ok((g.clone(), a.coeff(g)))
}

/// Splits a pointed element into degree and F-polynomial.
pub fn extract_pointed(a: &Laurent, pstar: &PStar) -> Result<PointedElement> {
    let (g, c) = leading(a, pstar)?;
    if !c.is_one() {
        return Err(Error::NotNormalized(g.to_string()));
    }
    let mut fpoly = BTreeMap::new();
    for (e, c) in a.terms() {
        let n = pstar.preimage(&e.sub(&g)).ok_or(Error::NotPointed)?;
        fpoly.insert(n, c.clone());
    }
    Ok(PointedElement { element: a.clone(), degree: g, fpoly })
}

/// Rebuilds `sum_n c_n x^{g + p*(n)}` from an F-polynomial.
pub fn assemble(degree: &LatticeVec, fpoly: &BTreeMap<LatticeVec, VCoeff>, pstar: &PStar) -> Laurent {
    Laurent::from_terms(
        degree.dim(),
        fpoly.iter().map(|(n, c)| (degree.add(&pstar.apply(n)), c.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> PStar {
        PStar::new(vec![vec![0, 1], vec![-1, 0]]).unwrap()
    }

    #[test]
    fn dominance_oracle() {
        let p = a2();
        // p*(e1) = (0,-1), p*(e2) = (1,0)
        assert!(p.dominated(&[-1, 0], &[-1, 1]));
        assert!(!p.dominated(&[-1, 1], &[-1, 0]));
        assert!(p.dominated(&[0, 0], &[-1, 1]));
        assert!(p.dominated(&[3, 5], &[3, 5]));
    }

    #[test]
    fn rank_error() {
        assert_eq!(PStar::new(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]), Err(Error::Rank));
    }

    #[test]
    fn extract_a2_variable() {
        // x1' = x^(-1,0) + x^(-1,1), pointed at (-1,1)
        let p = a2();
        let a = Laurent::monomial(LatticeVec(vec![-1, 0]))
            .add(&Laurent::monomial(LatticeVec(vec![-1, 1])))
            .unwrap();
        let pe = extract_pointed(&a, &p).unwrap();
        assert_eq!(pe.degree, LatticeVec(vec![-1, 1]));
        assert_eq!(pe.fpoly.len(), 2);
        assert!(pe.fpoly.contains_key(&LatticeVec(vec![1, 0])));
        assert_eq!(assemble(&pe.degree, &pe.fpoly, &p), a);
        let two = a.add(&Laurent::monomial(LatticeVec(vec![5, 5]))).unwrap();
        assert_eq!(extract_pointed(&two, &p), Err(Error::NotPointed));
    }
}
