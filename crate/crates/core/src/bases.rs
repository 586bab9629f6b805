//! Pointed families, unitriangular decompositions and the bases induced on a
//! frozen seed.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

use num_rational::BigRational;
use serde_json::json;

use crate::error::{Error, Result};
use crate::expansion::{ExchangeGraph, Expander};
use crate::freezing::Freezer;
use crate::report::Report;
use crate::ring::lattice::{rat, rat_to_i64, solve};
use crate::ring::{extract_pointed, LatticeVec, Laurent, PStar, PointedElement, SkewForm, VCoeff};
use crate::scattering::{locate, reachable_chambers, Chamber, ScatteringDiagram};
use crate::seed::Seed;
use crate::theta;

/// Coefficients of an element in a pointed family, keyed by degree.
pub type Row = BTreeMap<LatticeVec, VCoeff>;

/// A family `{s_g}` with `s_g` pointed at `g`.
pub trait PointedFamily: Send + Sync {
    fn label(&self) -> String;
    fn element(&self, g: &LatticeVec) -> Result<Laurent>;
}

type Cache = Mutex<HashMap<LatticeVec, Laurent>>;

fn cached(cache: &Cache, g: &LatticeVec, f: impl FnOnce() -> Result<Laurent>) -> Result<Laurent> {
    if let Some(z) = cache.lock().unwrap().get(g) {
        return Ok(z.clone());
    }
    let z = f()?;
    cache.lock().unwrap().insert(g.clone(), z.clone());
    Ok(z)
}

/// Localized cluster monomials of the seeds of an explored exchange graph.
pub struct ClusterMonomials {
    ex: Expander,
    graph: ExchangeGraph,
    chambers: Vec<Chamber>,
    cache: Cache,
}

impl ClusterMonomials {
    pub fn new(seed: &Seed, depth: usize) -> Result<Self> {
        let ex = Expander::new(seed.clone())?;
        let graph = ExchangeGraph::explore(&ex, depth)?;
        let chambers = reachable_chambers(&ex, &graph)?;
        Ok(Self { ex, graph, chambers, cache: Mutex::new(HashMap::new()) })
    }

    pub fn expander(&self) -> &Expander {
        &self.ex
    }

    pub fn graph(&self) -> &ExchangeGraph {
        &self.graph
    }
}

impl PointedFamily for ClusterMonomials {
    fn label(&self) -> String {
        "cluster".into()
    }

    fn element(&self, g: &LatticeVec) -> Result<Laurent> {
        cached(&self.cache, g, || {
            let idx = locate(&self.chambers, g).ok_or_else(|| Error::NotInSpan(format!("{g} lies in no explored chamber")))?;
            let node = &self.graph.nodes[idx];
            let n = g.dim();
            let a: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| rat(node.g_vectors[j][i])).collect()).collect();
            let b: Vec<BigRational> = g.iter().map(|&x| rat(x)).collect();
            let av: Option<Vec<i64>> = solve(&a, &b).and_then(|s| s.iter().map(rat_to_i64).collect());
            let av = av.ok_or_else(|| Error::NotInSpan(g.to_string()))?;
            self.ex.normalized_monomial(&node.state, &av)
        })
    }
}

/// Truncated theta functions of a completed diagram (classical).
pub struct ThetaFamily {
    diag: ScatteringDiagram,
    q: Vec<BigRational>,
    cache: Cache,
}

impl ThetaFamily {
    pub fn new(diag: ScatteringDiagram) -> Self {
        let q = theta::default_base_point(diag.rank());
        Self { diag, q, cache: Mutex::new(HashMap::new()) }
    }

    pub fn diagram(&self) -> &ScatteringDiagram {
        &self.diag
    }
}

impl PointedFamily for ThetaFamily {
    fn label(&self) -> String {
        "theta".into()
    }

    fn element(&self, g: &LatticeVec) -> Result<Laurent> {
        cached(&self.cache, g, || theta::theta(&self.diag, g, &self.q))
    }
}

/// `z_g = s_g + s_{g + p*(n)}` when `g_i` is even, `z_g = s_g` otherwise,
/// where `i` is the first coordinate with `p*(n)_i` odd. Both transitions are
/// finite and unitriangular.
pub struct Perturbed<'a> {
    pub inner: &'a dyn PointedFamily,
    pub shift: LatticeVec,
    pub pstar: PStar,
}

impl PointedFamily for Perturbed<'_> {
    fn label(&self) -> String {
        format!("{}+shift{}", self.inner.label(), self.shift)
    }

    fn element(&self, g: &LatticeVec) -> Result<Laurent> {
        let v = self.pstar.apply(&self.shift);
        let i = v.iter().position(|x| x % 2 != 0).ok_or_else(|| Error::Domain(format!("p*{} has no odd entry", self.shift)))?;
        if g[i] % 2 != 0 {
            return self.inner.element(g);
        }
        self.inner.element(g)?.add(&self.inner.element(&g.add(&v))?)
    }
}

/// `{z_{F,g} s_g}`.
pub struct FrozenImage<'a> {
    pub inner: &'a dyn PointedFamily,
    pub freezer: &'a Freezer,
}

impl PointedFamily for FrozenImage<'_> {
    fn label(&self) -> String {
        format!("frozen{}({})", self.freezer.spec().label(), self.inner.label())
    }

    fn element(&self, g: &LatticeVec) -> Result<Laurent> {
        self.freezer.freeze_at(&self.inner.element(g)?, g)
    }
}

/// `s'_g = x^{-D} . s_{g + D}` with `D = sum_{j in F} d_j f_j`.
pub struct Localized<'a> {
    pub inner: &'a dyn PointedFamily,
    pub freezer: &'a Freezer,
    pub d_max: i64,
    /// added to every minimal `d_j`
    pub extra: i64,
}

impl Localized<'_> {
    /// Minimal shifts making `s_{g + D}` free of `F` in its support.
    pub fn shifts(&self, g: &LatticeVec) -> Result<Option<LatticeVec>> {
        let seed = self.freezer.seed();
        let pstar = self.freezer.expander().pstar();
        let n = g.dim();
        let mut dvec = LatticeVec::zeros(n);
        for &j in self.freezer.spec().f() {
            let pos = seed.position(j).unwrap();
            let mut hit = None;
            for d in 0..=self.d_max {
                let mut t = dvec.clone();
                t.0[j] = d;
                let s = extract_pointed(&self.inner.element(&g.add(&t))?, pstar)?;
                if !s.support().contains(&pos) {
                    hit = Some(d);
                    break;
                }
            }
            match hit {
                Some(d) => dvec.0[j] = d,
                None => return Ok(None),
            }
        }
        for &j in self.freezer.spec().f() {
            dvec.0[j] += self.extra;
        }
        Ok(Some(dvec))
    }
}

impl PointedFamily for Localized<'_> {
    fn label(&self) -> String {
        format!("localized{}({})", self.freezer.spec().label(), self.inner.label())
    }

    fn element(&self, g: &LatticeVec) -> Result<Laurent> {
        let dvec = self
            .shifts(g)?
            .ok_or_else(|| Error::NotFound(self.d_max as usize))?;
        let s = self.inner.element(&g.add(&dvec))?;
        normalized_product(&dvec.neg(), &s, &g.add(&dvec), self.freezer.expander().lambda0())
    }
}

/// `x^a . z = v^{-lambda(a, deg z)} x^a * z`.
pub fn normalized_product(a: &LatticeVec, z: &Laurent, deg: &LatticeVec, lambda: Option<&SkewForm>) -> Result<Laurent> {
    let p = Laurent::monomial(a.clone()).mul(z, lambda)?;
    let e = lambda.map(|l| l.eval(a, deg)).unwrap_or(0);
    Ok(p.scale(&VCoeff::v_pow(-e)))
}

/// Degrees `g` with `|g_i| <= r`, in lexicographic order.
pub fn degree_box(n: usize, r: i64) -> Vec<LatticeVec> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                (-r..=r).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.into_iter().map(LatticeVec).collect()
}

const STEP_CAP: usize = 10_000;

/// Greedy elimination along a dominance-maximal term.
pub fn decompose(z: &Laurent, fam: &dyn PointedFamily, pstar: &PStar) -> Result<Row> {
    let mut rest = z.clone();
    let mut row = Row::new();
    for _ in 0..STEP_CAP {
        let Some((g, c)) = rest
            .terms()
            .max_by(|a, b| pstar.height(a.0).cmp(&pstar.height(b.0)).then(a.0.cmp(b.0)))
            .map(|(e, c)| (e.clone(), c.clone()))
        else {
            return Ok(row);
        };
        let s = fam.element(&g)?;
        if s.coeff(&g) != VCoeff::one() {
            return Err(Error::NotPointed);
        }
        rest = rest.sub(&s.scale(&c))?;
        row.insert(g, c);
    }
    Err(Error::NotInSpan(format!("no termination within {STEP_CAP} steps")))
}

/// Leading degree `top` with coefficient one, all other degrees dominated by it.
pub fn is_unitriangular(row: &Row, top: &LatticeVec, pstar: &PStar) -> bool {
    row.get(top) == Some(&VCoeff::one()) && row.keys().all(|g| g == top || pstar.dominated(g, top))
}

/// Unitriangular with the off-leading coefficients in `v^{-1} Z[v^{-1}]`.
pub fn is_m_unitriangular(row: &Row, top: &LatticeVec, pstar: &PStar) -> bool {
    is_unitriangular(row, top, pstar)
        && row.iter().all(|(g, c)| g == top || c.max_exp().is_none_or(|e| e < 0))
}

fn pointed(z: &Laurent, pstar: &PStar) -> Result<PointedElement> {
    extract_pointed(z, pstar)
}

fn le(a: &LatticeVec, b: &LatticeVec) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x <= y)
}

/// Local support (and support dimension) of `v^{-lambda(g1,g2)} s_{g1} * s_{g2}`.
pub fn check_local_support(
    fam: &dyn PointedFamily,
    ex: &Expander,
    pairs: &[(LatticeVec, LatticeVec)],
    instance: &str,
) -> Result<Report> {
    const ID: &str = "local-support";
    let pstar = ex.pstar();
    let l = ex.lambda0();
    for (g1, g2) in pairs {
        let s1 = fam.element(g1)?;
        let s2 = fam.element(g2)?;
        let prod = normalized_product_pair(&s1, g1, &s2, g2, l)?;
        let row = decompose(&prod, fam, pstar)?;
        let top = g1.add(g2);
        if !is_unitriangular(&row, &top, pstar) {
            return Ok(Report::falsified(ID, instance, json!({"g1": g1, "g2": g2, "reason": "not unitriangular"})));
        }
        let p1 = pointed(&s1, pstar)?;
        let p2 = pointed(&s2, pstar)?;
        let mut union = p1.support();
        union.extend(p2.support());
        let bound = p1.supp_dim().add(&p2.supp_dim());
        for g in row.keys() {
            let p = pointed(&fam.element(g)?, pstar)?;
            if !p.support().is_subset(&union) {
                return Ok(Report::falsified(ID, instance, json!({"g1": g1, "g2": g2, "g": g, "reason": "support"})));
            }
            let sd = p.supp_dim();
            if !le(&sd, &bound) || (g != &top && sd == bound) {
                return Ok(Report::falsified(ID, instance, json!({"g1": g1, "g2": g2, "g": g, "reason": "support dimension"})));
            }
        }
    }
    Ok(Report::verified(ID, instance, json!({"pairs": pairs.len()})))
}

/// `v^{-lambda(g1,g2)} s1 * s2`
pub fn normalized_product_pair(
    s1: &Laurent,
    g1: &LatticeVec,
    s2: &Laurent,
    g2: &LatticeVec,
    lambda: Option<&SkewForm>,
) -> Result<Laurent> {
    let e = lambda.map(|l| l.eval(g1, g2)).unwrap_or(0);
    Ok(s1.mul(s2, lambda)?.scale(&VCoeff::v_pow(-e)))
}

/// Locality of the transition from `s` to `z`.
pub fn check_local_transition(
    s: &dyn PointedFamily,
    z: &dyn PointedFamily,
    pstar: &PStar,
    degrees: &[LatticeVec],
    instance: &str,
) -> Result<Report> {
    const ID: &str = "local-transition";
    for g in degrees {
        let zg = z.element(g)?;
        let row = decompose(&zg, s, pstar)?;
        if !is_unitriangular(&row, g, pstar) {
            return Ok(Report::falsified(ID, instance, json!({"g": g, "reason": "not unitriangular"})));
        }
        let pz = pointed(&zg, pstar)?;
        for h in row.keys() {
            let ps = pointed(&s.element(h)?, pstar)?;
            let (a, b) = (ps.supp_dim(), pz.supp_dim());
            if !ps.support().is_subset(&pz.support()) || !le(&a, &b) || (h != g && a == b && !a.is_zero()) {
                return Ok(Report::falsified(ID, instance, json!({"g": g, "h": h})));
            }
        }
    }
    Ok(Report::verified(ID, instance, json!({"degrees": degrees.len()})))
}

/// `s'_g = z_{F,g} s_g` on a set of degrees, and independence of the shift.
pub fn compare_localization(
    fam: &dyn PointedFamily,
    freezer: &Freezer,
    degrees: &[LatticeVec],
    d_max: i64,
    instance: &str,
) -> Result<Report> {
    const ID: &str = "induced-basis";
    let frozen = FrozenImage { inner: fam, freezer };
    let loc = Localized { inner: fam, freezer, d_max, extra: 0 };
    let loc1 = Localized { inner: fam, freezer, d_max, extra: 1 };
    let mut shifts = BTreeMap::new();
    for g in degrees {
        let Some(dv) = loc.shifts(g)? else {
            return Ok(Report::inconclusive(ID, instance, json!({"g": g, "d_max": d_max})));
        };
        let a = frozen.element(g)?;
        let b = loc.element(g)?;
        let c = loc1.element(g)?;
        if a != b || b != c {
            return Ok(Report::falsified(
                ID,
                instance,
                json!({"g": g, "frozen": a.to_string(), "localized": b.to_string(), "shifted": c.to_string()}),
            ));
        }
        shifts.insert(g.to_string(), dv);
    }
    let max_shift = shifts.values().flat_map(|d| d.iter().copied()).max().unwrap_or(0);
    Ok(Report::verified(ID, instance, json!({"degrees": degrees.len(), "max_shift": max_shift})))
}

/// Property (S) on a set of degrees: for each `k` in `F` a finite shift
/// clears `k` from the support.
pub fn check_shift_property(
    fam: &dyn PointedFamily,
    freezer: &Freezer,
    degrees: &[LatticeVec],
    d_max: i64,
    instance: &str,
) -> Result<Report> {
    const ID: &str = "property-s";
    let seed = freezer.seed();
    let pstar = freezer.expander().pstar();
    let mut worst = 0;
    for g in degrees {
        for &k in freezer.spec().f() {
            let pos = seed.position(k).unwrap();
            let mut found = None;
            for d in 0..=d_max {
                let h = g.add(&LatticeVec::unit(g.dim(), k).scale(d));
                if !pointed(&fam.element(&h)?, pstar)?.support().contains(&pos) {
                    found = Some(d);
                    break;
                }
            }
            match found {
                Some(d) => worst = worst.max(d),
                None => return Ok(Report::inconclusive(ID, instance, json!({"g": g, "k": k + 1, "d_max": d_max}))),
            }
        }
    }
    Ok(Report::verified(ID, instance, json!({"degrees": degrees.len(), "max_d": worst})))
}

/// Factorization of the frozen family in direction `F` and the shift-product
/// identity `s_{g + d f_k} = v^{-lambda(d f_k, g)} x_k^d * z_F s_g` whenever
/// `k` is outside the support of the left side.
pub fn check_shift_product(
    fam: &dyn PointedFamily,
    freezer: &Freezer,
    degrees: &[LatticeVec],
    d_max: i64,
    instance: &str,
) -> Result<Report> {
    const ID: &str = "shift-product";
    let seed = freezer.seed();
    let pstar = freezer.expander().pstar();
    let l = freezer.expander().lambda0();
    let frozen = FrozenImage { inner: fam, freezer };
    let mut checked = 0;
    for &k in freezer.spec().f() {
        let single = Freezer::new(seed, &[k])?;
        let frozen_k = FrozenImage { inner: fam, freezer: &single };
        let fk = LatticeVec::unit(seed.n(), k);
        let pos = seed.position(k).unwrap();
        for g in degrees {
            for (fam_f, what) in [(&frozen, "factorization"), (&frozen_k, "factorization at k")] {
                let lhs = normalized_product(&fk, &fam_f.element(g)?, g, l)?;
                if lhs != fam_f.element(&g.add(&fk))? {
                    return Ok(Report::falsified(ID, instance, json!({"g": g, "k": k + 1, "reason": what})));
                }
            }
            for d in 0..=d_max {
                let s = fam.element(&g.add(&fk.scale(d)))?;
                if pointed(&s, pstar)?.support().contains(&pos) {
                    continue;
                }
                let prod = normalized_product(&fk.scale(d), &frozen_k.element(g)?, g, l)?;
                if prod != s {
                    return Ok(Report::falsified(ID, instance, json!({"g": g, "k": k + 1, "d": d})));
                }
                checked += 1;
                break;
            }
        }
    }
    Ok(Report::verified(ID, instance, json!({"identities": checked})))
}

/// The images of the frozen transports of two families span the same space
/// on `degrees`: every `z_{F,g} z_g` decomposes over `{z_{F,h} s_h}` and
/// conversely.
pub fn check_basis_independence(
    s: &dyn PointedFamily,
    z: &dyn PointedFamily,
    freezer: &Freezer,
    degrees: &[LatticeVec],
    instance: &str,
) -> Result<Report> {
    const ID: &str = "basis-independence";
    let fs = FrozenImage { inner: s, freezer };
    let fz = FrozenImage { inner: z, freezer };
    let pstar = freezer.frozen_expander().pstar();
    for g in degrees {
        for (a, b) in [(&fz, &fs), (&fs, &fz)] {
            let row = decompose(&a.element(g)?, b, pstar)?;
            if !is_unitriangular(&row, g, pstar) {
                return Ok(Report::falsified(ID, instance, json!({"g": g})));
            }
        }
    }
    Ok(Report::verified(ID, instance, json!({"degrees": degrees.len()})))
}

/// The transport `z^S: sum b_g s_g -> sum b_g z_{F,g} s_g`.
pub fn transport(z: &Laurent, fam: &dyn PointedFamily, freezer: &Freezer) -> Result<Laurent> {
    let row = decompose(z, fam, freezer.expander().pstar())?;
    let mut out = Laurent::zero(z.dim());
    for (g, c) in &row {
        out = out.add(&freezer.freeze_at(&fam.element(g)?, g)?.scale(c))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn example_transport() {
        let seed = catalog::example4();
        let fam = ClusterMonomials::new(&seed, 4).unwrap();
        let fr = Freezer::new(&seed, &[0]).unwrap();
        let st = fam.expander().run(&[0]).unwrap();
        let l = seed.lambda();
        let x1 = Laurent::var(2, 0);
        let prod = x1.mul(&st.vars[0], l).unwrap();
        let row = decompose(&prod, &fam, fam.expander().pstar()).unwrap();
        assert_eq!(row.len(), 2);
        let lhs = transport(&prod, &fam, &fr).unwrap();
        let rhs = transport(&x1, &fam, &fr).unwrap().mul(&transport(&st.vars[0], &fam, &fr).unwrap(), l).unwrap();
        assert_ne!(lhs, rhs);
        assert_eq!(rhs, Laurent::one(2));
    }

    #[test]
    fn boxes() {
        assert_eq!(degree_box(2, 1).len(), 9);
        assert_eq!(degree_box(2, 1)[0], LatticeVec(vec![-1, -1]));
    }
}
