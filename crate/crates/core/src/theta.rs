//! Broken lines and truncated theta functions.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::{ExchangeGraph, Expander};
use crate::freezing::FreezeSpec;
use crate::ring::lattice::{rat, rat_frac, rat_to_i64, solve};
use crate::ring::{LatticeVec, Laurent};
use crate::scattering::{locate, reachable_chambers, ScatteringDiagram, SeriesElement, Wall, WallFunction};

const PRIMES: [i64; 6] = [1009, 1013, 1019, 1021, 1031, 1033];

/// Point of `Int(C^+)` with coordinates `1 + 1/p` for distinct primes `p`.
pub fn default_base_point(r: usize) -> Vec<BigRational> {
    (0..r).map(|i| rat(1) + rat_frac(1, PRIMES[i % PRIMES.len()])).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub exponent: LatticeVec,
    /// `n` with `exponent = m + p*(n)`
    pub n: LatticeVec,
    pub coefficient: String,
    /// wall index and projected point where this segment starts; `None` for
    /// the unbounded first segment
    pub bend: Option<(usize, Vec<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BrokenLine {
    pub m: LatticeVec,
    pub segments: Vec<Segment>,
}

impl BrokenLine {
    pub fn final_n(&self) -> &LatticeVec {
        &self.segments.last().unwrap().n
    }
}

struct Search<'a> {
    diag: &'a ScatteringDiagram,
    m: LatticeVec,
    r: usize,
    lines: Vec<BrokenLine>,
    /// backward stack: (exponent, n, coefficient of the bend, bend)
    stack: Vec<(LatticeVec, LatticeVec, BigInt, Option<(usize, Vec<BigRational>)>)>,
}

impl Search<'_> {
    fn exponent(&self, n: &LatticeVec) -> LatticeVec {
        self.m.add(&self.diag.pstar().apply(n))
    }

    fn record(&mut self) {
        let mut segs = Vec::new();
        let mut acc = BigInt::one();
        // stack is stored from Q backwards
        for (e, n, c, bend) in self.stack.iter().rev() {
            acc *= c;
            let bend = bend.as_ref().map(|(w, p)| (*w, p.iter().map(|x| x.to_string()).collect()));
            segs.push(Segment { exponent: e.clone(), n: n.clone(), coefficient: acc.to_string(), bend });
        }
        self.lines.push(BrokenLine { m: self.m.clone(), segments: segs });
    }

    /// Walks backwards from `p` along the projection of `exp(n)`.
    fn walk(&mut self, p: &[BigRational], n: &LatticeVec) -> Result<()> {
        if n.is_zero() {
            self.record();
            return Ok(());
        }
        let e = self.exponent(n);
        let dir: Vec<BigRational> = self.diag.seed().unfrozen().iter().map(|&k| rat(e[k])).collect();
        let mut hits: BTreeMap<BigRational, Vec<usize>> = BTreeMap::new();
        for (idx, w) in self.diag.walls().iter().enumerate() {
            let hp = w.height(p);
            let hd = w.height(&dir);
            if hd.is_zero() {
                continue;
            }
            let s = -hp / hd;
            if !s.is_positive() {
                continue;
            }
            let x: Vec<BigRational> = p.iter().zip(&dir).map(|(a, b)| a + &s * b).collect();
            if w.contains(&x) {
                hits.entry(s).or_default().push(idx);
            }
        }
        for (s, idxs) in hits {
            let x: Vec<BigRational> = p.iter().zip(&dir).map(|(a, b)| a + &s * b).collect();
            let normal = &self.diag.walls()[idxs[0]].normal;
            if idxs.iter().any(|&i| &self.diag.walls()[i].normal != normal) || (self.r >= 2 && x.iter().all(|v| v.is_zero())) {
                return Err(Error::BadBasePoint(format!("broken line for m = {} meets the singular locus", self.m)));
            }
            let mut f = WallFunction::one();
            let jmax = (n.total() / normal.total()).max(0) as usize;
            for &i in &idxs {
                f = f.mul(&self.diag.walls()[i].func, jmax);
            }
            let wall: &Wall = &self.diag.walls()[idxs[0]];
            for j in 1..=jmax {
                let prev = n.sub(&normal.scale(j as i64));
                if !prev.is_nonneg() {
                    continue;
                }
                let ep = self.exponent(&prev);
                let a = wall.pairing(&ep).abs();
                if a == 0 {
                    continue;
                }
                let c = f.pow(a, jmax)[j].clone();
                if c.is_zero() {
                    continue;
                }
                self.stack.push((ep, prev.clone(), BigInt::one(), None));
                let top = self.stack.len() - 2;
                self.stack[top].2 = c;
                self.stack[top].3 = Some((idxs[0], x.clone()));
                self.walk(&x, &prev)?;
                self.stack[top].2 = BigInt::one();
                self.stack[top].3 = None;
                self.stack.pop();
            }
        }
        Ok(())
    }
}

/// All broken lines for `m` ending at `q` whose final `y`-degree is at most
/// the diagram's order.
pub fn enumerate_broken_lines(diag: &ScatteringDiagram, m: &LatticeVec, q: &[BigRational]) -> Result<Vec<BrokenLine>> {
    if let Some(w) = diag.walls().iter().find(|w| w.contains(q)) {
        return Err(Error::BadBasePoint(format!("base point lies on the wall with normal {}", w.normal)));
    }
    let r = diag.rank();
    let mut s = Search { diag, m: m.clone(), r, lines: Vec::new(), stack: Vec::new() };
    for n in box_vectors(r, diag.order()) {
        let e = s.exponent(&n);
        s.stack.push((e, n.clone(), BigInt::one(), None));
        s.walk(q, &n)?;
        s.stack.pop();
    }
    s.lines.sort_by(|a, b| a.final_n().cmp(b.final_n()).then_with(|| a.segments.len().cmp(&b.segments.len())));
    Ok(s.lines)
}

/// Nonnegative vectors of total degree at most `k`, in lexicographic order.
pub fn box_vectors(r: usize, k: i64) -> Vec<LatticeVec> {
    let mut out = vec![LatticeVec::zeros(r)];
    for p in 0..r {
        let mut next = Vec::new();
        for v in &out {
            let used = v.total();
            for a in 0..=(k - used) {
                let mut w = v.clone();
                w.0[p] = a;
                next.push(w);
            }
        }
        out = next;
    }
    out.sort();
    out
}

/// `theta_{Q,m}` as a truncated series `x^m * sum_n c_n y^n`.
pub fn theta_series(diag: &ScatteringDiagram, m: &LatticeVec, q: &[BigRational]) -> Result<SeriesElement> {
    let lines = enumerate_broken_lines(diag, m, q)?;
    let mut out = SeriesElement { base: m.clone(), terms: BTreeMap::new() };
    for l in &lines {
        let c: BigInt = l.segments.last().unwrap().coefficient.parse().unwrap();
        out.add_term(l.final_n().clone(), &c);
    }
    Ok(out)
}

pub fn theta(diag: &ScatteringDiagram, m: &LatticeVec, q: &[BigRational]) -> Result<Laurent> {
    Ok(theta_series(diag, m, q)?.to_laurent(diag.pstar()))
}

/// Freezing of a theta function against the theta function of the frozen
/// seed's diagram; returns both sides.
pub fn freeze_theta_check(
    diag: &ScatteringDiagram,
    frozen: &ScatteringDiagram,
    spec: &FreezeSpec,
    m: &LatticeVec,
    q: &[BigRational],
) -> Result<(Laurent, Laurent)> {
    let th = theta_series(diag, m, q)?;
    let seed = diag.seed();
    let mut z = SeriesElement { base: m.clone(), terms: BTreeMap::new() };
    for (n, c) in &th.terms {
        if !spec.kills(seed, n) {
            z.add_term(spec.restrict_n(seed, n), c);
        }
    }
    let qf: Vec<BigRational> = q
        .iter()
        .zip(seed.unfrozen())
        .filter(|(_, k)| !spec.f().contains(k))
        .map(|(x, _)| x.clone())
        .collect();
    let rhs = theta_series(frozen, m, &qf)?;
    Ok((z.to_laurent(frozen.pstar()), rhs.to_laurent(frozen.pstar())))
}

/// Result of the shift search for vertex `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShiftSearch {
    pub found: Option<i64>,
    pub predicted: i64,
}

/// Smallest `d <= d_max` such that `theta_{g + d f_k}` has no `y_k` in its
/// support, together with the bound from the pairing inequality.
pub fn property_s_search(diag: &ScatteringDiagram, g: &LatticeVec, k: usize, d_max: i64) -> Result<ShiftSearch> {
    let seed = diag.seed();
    let pos = seed.position(k).ok_or(Error::FrozenMutation(k))?;
    let q = default_base_point(diag.rank());
    let mut found = None;
    for d in 0..=d_max {
        let m = g.add(&LatticeVec::unit(seed.n(), k).scale(d));
        let th = theta_series(diag, &m, &q)?;
        if th.terms.keys().all(|n| n[pos] == 0) {
            found = Some(d);
            break;
        }
    }
    Ok(ShiftSearch { found, predicted: predicted_shift(diag, g, k, pos) })
}

/// Smallest `d >= 0` with `<g + d f_k + p*(n'), n0> > 0` for all wall normals
/// `n0` through `k` and all `n'` below the order.
fn predicted_shift(diag: &ScatteringDiagram, g: &LatticeVec, k: usize, pos: usize) -> i64 {
    let mut best = 0;
    for w in diag.walls().iter().filter(|w| w.normal[pos] > 0) {
        let wk = w.pairing(&LatticeVec::unit(g.dim(), k));
        for n in box_vectors(diag.rank(), diag.order()) {
            let base = w.pairing_series(g, &n);
            if base <= 0 {
                // base + d * wk > 0
                best = best.max(-base / wk + 1);
            }
        }
    }
    best
}

/// Theta function of `m` in a reachable chamber of rank beyond two: the
/// localized cluster monomial of the seed whose chamber contains `m`.
pub fn theta_cluster_chamber(ex: &Expander, graph: &ExchangeGraph, m: &LatticeVec) -> Result<Laurent> {
    let chambers = reachable_chambers(ex, graph)?;
    let idx = locate(&chambers, m).ok_or_else(|| Error::NotFound(graph.nodes.iter().map(|n| n.depth).max().unwrap_or(0)))?;
    let node = &graph.nodes[idx];
    let n = m.dim();
    let a: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| rat(node.g_vectors[j][i])).collect()).collect();
    let b: Vec<BigRational> = m.iter().map(|&x| rat(x)).collect();
    let sol = solve(&a, &b).ok_or_else(|| Error::NotInSpan(m.to_string()))?;
    let av: Vec<i64> = sol.iter().map(rat_to_i64).collect::<Option<_>>().ok_or_else(|| Error::NotInSpan(m.to_string()))?;
    let st = &node.state;
    let classical = Expander::new(ex.initial().classical())?;
    let cst = classical.run(&st.word)?;
    classical.normalized_monomial(&cst, &av)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn positive_chamber_is_monomial() {
        let seed = catalog::a2().classical();
        let d = ScatteringDiagram::complete(&seed, 6).unwrap();
        let q = default_base_point(2);
        for m in [[0, 0], [1, 0], [2, 3]] {
            let m = LatticeVec(m.to_vec());
            assert_eq!(theta(&d, &m, &q).unwrap(), Laurent::monomial(m));
        }
    }

    #[test]
    fn example_lines() {
        let seed = catalog::example4().classical();
        let d = ScatteringDiagram::complete(&seed, 4).unwrap();
        let m = LatticeVec(vec![-1, 0]);
        let lines = enumerate_broken_lines(&d, &m, &default_base_point(1)).unwrap();
        assert_eq!(lines.len(), 2);
        assert_eq!(theta(&d, &m, &default_base_point(1)).unwrap().to_string(), "x^(-1,0) + x^(-1,1)");
    }

    #[test]
    fn order_zero() {
        let seed = catalog::a2().classical();
        let d = ScatteringDiagram::complete(&seed, 0).unwrap();
        let m = LatticeVec(vec![-1, -1]);
        assert_eq!(theta(&d, &m, &default_base_point(2)).unwrap(), Laurent::monomial(m));
    }
}
