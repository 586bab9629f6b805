//! Instance-level verification harnesses, addressed by stable ids.

use std::collections::BTreeSet;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::bases::{self, ClusterMonomials, PointedFamily, ThetaFamily};
use crate::error::{Error, Result};
use crate::expansion::{ExchangeGraph, Expander, SeedState};
use crate::freezing::{FreezeSpec, Freezer};
use crate::report::{Report, Status};
use crate::ring::lattice::{rat, rat_frac};
use crate::ring::newton::same_hull;
use crate::ring::{extract_pointed, LatticeVec, Laurent};
use crate::scattering::{reachable_chambers, Automorphism, ScatteringDiagram};
use crate::seed::Seed;
use crate::theta;

/// Which pointed family the basis harnesses use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    Cluster,
    Theta,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub seed: Seed,
    pub name: String,
    /// `None` runs every nonempty subset of the unfrozen vertices
    pub freeze: Option<Vec<usize>>,
    pub depth: usize,
    pub word_len: usize,
    pub order: i64,
    pub box_r: i64,
    pub d_max: i64,
    pub samples: usize,
    pub loops: usize,
    pub rng_seed: u64,
    pub basis: BasisKind,
}

impl VerifyConfig {
    pub fn new(seed: Seed, name: &str) -> Self {
        Self {
            seed,
            name: name.to_string(),
            freeze: None,
            depth: 8,
            word_len: 8,
            order: 6,
            box_r: 2,
            d_max: 10,
            samples: 10,
            loops: 20,
            rng_seed: 0,
            basis: BasisKind::Cluster,
        }
    }

    fn freeze_sets(&self) -> Vec<Vec<usize>> {
        if let Some(f) = &self.freeze {
            return vec![f.clone()];
        }
        let uf = self.seed.unfrozen();
        (1u32..(1 << uf.len()))
            .map(|mask| uf.iter().enumerate().filter(|(p, _)| mask & (1 << p) != 0).map(|(_, &k)| k).collect())
            .collect()
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.rng_seed)
    }

    fn instance(&self, extra: &str) -> String {
        if extra.is_empty() {
            self.name.clone()
        } else {
            format!("{} {}", self.name, extra)
        }
    }
}

/// Harness ids with a one-line description.
pub const THEOREMS: &[(&str, &str)] = &[
    ("example-freezing", "freezing a one-vertex seed: images, multiplicativity, transport non-multiplicativity"),
    ("laurent-positivity", "every mutation word yields a Laurent polynomial with positive coefficients"),
    ("quantum-consistency", "bar-invariance, classical limit and equal Newton polytopes of quantum variables"),
    ("exchange-graph", "exchange graph size and completeness"),
    ("injective-reachable", "injective-reachability of the seed and of every freezing"),
    ("freeze-cluster-monomial", "frozen localized cluster monomials are localized cluster monomials"),
    ("freeze-mutation", "freezing commutes with mutation along words avoiding F"),
    ("chamber-containment", "each chamber lies in a reachable chamber of the frozen seed"),
    ("scattering-consistency", "completed diagram has trivial path-ordered products around sampled loops"),
    ("pushforward", "pushforward of the diagram equals the frozen seed's diagram"),
    ("theta-positive", "theta functions of the positive chamber are monomials"),
    ("theta-cluster", "theta functions of chamber g-vectors are cluster variables"),
    ("theta-base-change", "theta functions agree for base points in one chamber"),
    ("freeze-theta", "frozen theta functions are theta functions of the frozen diagram"),
    ("property-s", "shifts along f_k clear k from the support"),
    ("induced-basis", "localized functions equal frozen functions, independent of the shift"),
    ("local-support", "products decompose unitriangularly with local support"),
    ("local-transition", "transition from cluster monomials to theta functions is local"),
    ("shift-product", "factorization and shift-product identities"),
    ("basis-independence", "frozen transports of two pointed bases span the same space"),
];

/// Runs one harness.
pub fn run(id: &str, cfg: &VerifyConfig) -> Result<Vec<Report>> {
    match dispatch(id, cfg) {
        Err(Error::UnsupportedRank(r)) => Ok(vec![Report::inconclusive(id, cfg.instance(""), json!({"rank": r}))]),
        r => r,
    }
}

fn dispatch(id: &str, cfg: &VerifyConfig) -> Result<Vec<Report>> {
    match id {
        "example-freezing" => example_freezing(cfg),
        "laurent-positivity" => laurent_positivity(cfg).map(|r| vec![r]),
        "quantum-consistency" => quantum_consistency(cfg).map(|r| vec![r]),
        "exchange-graph" => exchange_graph(cfg).map(|r| vec![r]),
        "injective-reachable" => injective_reachable(cfg),
        "freeze-cluster-monomial" => per_freeze(cfg, freeze_cluster_monomial),
        "freeze-mutation" => per_freeze(cfg, freeze_mutation),
        "chamber-containment" => per_freeze(cfg, chamber_containment),
        "scattering-consistency" => scattering_consistency(cfg).map(|r| vec![r]),
        "pushforward" => per_freeze(cfg, pushforward),
        "theta-positive" => theta_positive(cfg).map(|r| vec![r]),
        "theta-cluster" => theta_cluster(cfg).map(|r| vec![r]),
        "theta-base-change" => theta_base_change(cfg).map(|r| vec![r]),
        "freeze-theta" => per_freeze(cfg, freeze_theta),
        "property-s" | "induced-basis" | "shift-product" | "basis-independence" => per_freeze(cfg, |c, f| basis_harness(id, c, f)),
        "local-support" => local_support(cfg).map(|r| vec![r]),
        "local-transition" => local_transition(cfg).map(|r| vec![r]),
        _ => Err(Error::Parse(format!("unknown theorem id '{id}'"))),
    }
}

fn per_freeze(cfg: &VerifyConfig, f: impl Fn(&VerifyConfig, &[usize]) -> Result<Report>) -> Result<Vec<Report>> {
    cfg.freeze_sets().iter().map(|fs| f(cfg, fs)).collect()
}

fn label(seed: &Seed, f: &[usize]) -> String {
    FreezeSpec::new(seed, f).map(|s| format!("F={}", s.label())).unwrap_or_default()
}

fn example_freezing(cfg: &VerifyConfig) -> Result<Vec<Report>> {
    let seed = &cfg.seed;
    let k = *cfg.freeze.as_ref().and_then(|f| f.first()).unwrap_or(&seed.unfrozen()[0]);
    let fr = Freezer::new(seed, &[k])?;
    let ex = fr.expander();
    let l = ex.lambda0();
    let st = ex.run(&[k])?;
    let xk = Laurent::var(seed.n(), k);
    let xk1 = st.vars[k].clone();
    let inst = cfg.instance(&label(seed, &[k]));
    let mut out = Vec::new();

    let img = fr.freeze(&xk1)?;
    let deg = extract_pointed(&xk1, ex.pstar())?.degree;
    let status = if img == Laurent::monomial(deg.clone()) { Status::Verified } else { Status::Falsified };
    out.push(Report::new(
        "example-freezing",
        inst.clone(),
        status,
        json!({"mutated": xk1.to_string(), "frozen": img.to_string()}),
    ));

    let fam = ClusterMonomials::new(seed, cfg.depth)?;
    let mut rng = cfg.rng();
    let mut bad = None;
    for _ in 0..cfg.samples {
        let g1 = random_vec(&mut rng, seed.n(), cfg.box_r);
        let g2 = random_vec(&mut rng, seed.n(), cfg.box_r);
        if let Some((a, b)) = fr.check_multiplicativity(&fam.element(&g1)?, &fam.element(&g2)?)? {
            bad = Some(json!({"g1": g1, "g2": g2, "lhs": a.to_string(), "rhs": b.to_string()}));
            break;
        }
    }
    out.push(match bad {
        None => Report::verified("freeze-multiplicative", inst.clone(), json!({"pairs": cfg.samples})),
        Some(w) => Report::falsified("freeze-multiplicative", inst.clone(), w),
    });

    let prod = xk.mul(&xk1, l)?;
    let lhs = bases::transport(&prod, &fam, &fr)?;
    let rhs = bases::transport(&xk, &fam, &fr)?.mul(&bases::transport(&xk1, &fam, &fr)?, l)?;
    let status = if lhs != rhs { Status::Verified } else { Status::Falsified };
    out.push(Report::new(
        "transport-not-multiplicative",
        inst,
        status,
        json!({"product": prod.to_string(), "transport_of_product": lhs.to_string(), "product_of_transports": rhs.to_string()}),
    ));
    Ok(out)
}

fn random_vec<R: Rng>(rng: &mut R, n: usize, r: i64) -> LatticeVec {
    LatticeVec((0..n).map(|_| rng.gen_range(-r..=r)).collect())
}

/// Depth-first walk over words without immediate repetitions.
fn walk_words(ex: &Expander, st: &SeedState, len: usize, visit: &mut dyn FnMut(&SeedState) -> bool) -> Result<bool> {
    if !visit(st) {
        return Ok(false);
    }
    if st.word.len() == len {
        return Ok(true);
    }
    for &k in ex.initial().unfrozen() {
        if st.word.last() == Some(&k) {
            continue;
        }
        let next = ex.mutate_state(st, k)?;
        if !walk_words(ex, &next, len, visit)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn laurent_positivity(cfg: &VerifyConfig) -> Result<Report> {
    const ID: &str = "laurent-positivity";
    let ex = Expander::new(cfg.seed.clone())?;
    let mut words = 0usize;
    let mut witness = None;
    let res = walk_words(&ex, &ex.initial_state(), cfg.word_len, &mut |st| {
        words += 1;
        for (i, z) in st.vars.iter().enumerate() {
            if !z.is_positive() {
                witness = Some(json!({"word": one_based(&st.word), "var": i + 1, "value": z.to_string()}));
                return false;
            }
        }
        true
    });
    let inst = cfg.instance(&format!("len<={}", cfg.word_len));
    match res {
        Err(e @ (Error::InexactDivision | Error::Positivity(_))) => {
            Ok(Report::falsified(ID, inst, json!({"error": e.to_string()})))
        }
        Err(e) => Err(e),
        Ok(_) => Ok(match witness {
            None => Report::verified(ID, inst, json!({"words": words})),
            Some(w) => Report::falsified(ID, inst, w),
        }),
    }
}

fn one_based(w: &[usize]) -> Vec<usize> {
    w.iter().map(|k| k + 1).collect()
}

fn quantum_consistency(cfg: &VerifyConfig) -> Result<Report> {
    const ID: &str = "quantum-consistency";
    let inst = cfg.instance(&format!("depth<={}", cfg.depth));
    if cfg.seed.lambda().is_none() {
        return Ok(Report::inconclusive(ID, inst, json!({"reason": "seed has no quantization"})));
    }
    let ex = Expander::new(cfg.seed.clone())?;
    let cl = Expander::new(cfg.seed.classical())?;
    let graph = ExchangeGraph::explore(&ex, cfg.depth)?;
    let mut count = 0;
    for node in &graph.nodes {
        let cst = cl.run(&node.state.word)?;
        for (i, z) in node.state.vars.iter().enumerate() {
            let fail = |reason: &str| {
                Report::falsified(ID, inst.clone(), json!({"word": one_based(&node.state.word), "var": i + 1, "reason": reason}))
            };
            if !z.is_bar_invariant() {
                return Ok(fail("bar"));
            }
            if z.eval_at_one() != cst.vars[i] {
                return Ok(fail("classical limit"));
            }
            let p = extract_pointed(z, ex.pstar())?;
            if !same_hull(&p.quantum_exponents(), &p.classical_exponents()) {
                return Ok(fail("newton polytope"));
            }
            count += 1;
        }
    }
    Ok(Report::verified(ID, inst, json!({"seeds": graph.len(), "variables": count})))
}

fn exchange_graph(cfg: &VerifyConfig) -> Result<Report> {
    const ID: &str = "exchange-graph";
    let ex = Expander::new(cfg.seed.clone())?;
    let g = ExchangeGraph::explore(&ex, cfg.depth)?;
    let w = json!({"seeds": g.len(), "edges": g.edges.len(), "cycle": g.is_cycle(), "complete": g.complete});
    let inst = cfg.instance(&format!("depth<={}", cfg.depth));
    Ok(if g.complete { Report::verified(ID, inst, w) } else { Report::inconclusive(ID, inst, w) })
}

fn injective_reachable(cfg: &VerifyConfig) -> Result<Vec<Report>> {
    const ID: &str = "injective-reachable";
    let mut out = Vec::new();
    let mut sets = vec![Vec::new()];
    sets.extend(cfg.freeze_sets());
    for f in sets {
        let seed = cfg.seed.freeze(&f)?;
        let ex = Expander::new(seed)?;
        let g = ExchangeGraph::explore(&ex, cfg.depth)?;
        let inst = cfg.instance(&if f.is_empty() { String::new() } else { label(&cfg.seed, &f) });
        out.push(match g.find_injective_reachable(&ex) {
            Ok(ir) => Report::verified(ID, inst, json!({"word": one_based(&ir.word), "sigma": one_based(&ir.sigma)})),
            Err(Error::NotFound(d)) => Report::inconclusive(ID, inst, json!({"depth": d})),
            Err(e) => return Err(e),
        });
    }
    Ok(out)
}

fn freeze_cluster_monomial(cfg: &VerifyConfig, f: &[usize]) -> Result<Report> {
    const ID: &str = "freeze-cluster-monomial";
    let fr = Freezer::new(&cfg.seed, f)?;
    let fam = ClusterMonomials::new(&cfg.seed, cfg.depth)?;
    let fg = ExchangeGraph::explore(fr.frozen_expander(), cfg.depth)?;
    let inst = cfg.instance(&format!("{} box={} depth<={}", label(&cfg.seed, f), cfg.box_r, cfg.depth));
    let degrees = bases::degree_box(cfg.seed.n(), cfg.box_r);
    let results: Vec<Result<Option<bool>>> = degrees
        .par_iter()
        .map(|g| {
            let z = match fam.element(g) {
                Ok(z) => z,
                // outside the explored cluster complex: not an instance
                Err(Error::NotInSpan(_)) => return Ok(Some(false)),
                Err(e) => return Err(e),
            };
            match fr.identify_frozen_cluster_monomial(&z, &fg) {
                Ok(_) => Ok(Some(true)),
                Err(Error::NotFound(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut missing = Vec::new();
    let mut skipped = Vec::new();
    let mut found = 0;
    for (g, r) in degrees.iter().zip(results) {
        match r? {
            Some(true) => found += 1,
            Some(false) => skipped.push(g.clone()),
            None => missing.push(g.clone()),
        }
    }
    let w = json!({"identified": found, "skipped": skipped, "missing": missing});
    Ok(if missing.is_empty() { Report::verified(ID, inst, w) } else { Report::inconclusive(ID, inst, w) })
}

fn freeze_mutation(cfg: &VerifyConfig, f: &[usize]) -> Result<Report> {
    const ID: &str = "freeze-mutation";
    let fr = Freezer::new(&cfg.seed, f)?;
    let ex = fr.expander();
    let graph = ExchangeGraph::explore(ex, cfg.depth)?;
    let r: Vec<usize> = fr.spec().r().to_vec();
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    words.extend(r.iter().map(|&k| vec![k]));
    if r.len() >= 2 {
        words.push(vec![r[0], r[1]]);
    }
    let inst = cfg.instance(&label(&cfg.seed, f));
    let mut checked = 0;
    for node in &graph.nodes {
        for i in 0..cfg.seed.n() {
            for w in &words {
                if !fr.freeze_commutes_with_mutation(&node.state, i, w)? {
                    return Ok(Report::falsified(
                        ID,
                        inst,
                        json!({"target": one_based(&node.state.word), "var": i + 1, "word": one_based(w)}),
                    ));
                }
                checked += 1;
            }
        }
    }
    Ok(Report::verified(ID, inst, json!({"checks": checked})))
}

fn chamber_containment(cfg: &VerifyConfig, f: &[usize]) -> Result<Report> {
    const ID: &str = "chamber-containment";
    let fr = Freezer::new(&cfg.seed, f)?;
    let ex = fr.expander();
    let g = ExchangeGraph::explore(ex, cfg.depth)?;
    let fg = ExchangeGraph::explore(fr.frozen_expander(), cfg.depth)?;
    let chambers = reachable_chambers(ex, &g)?;
    let frozen = reachable_chambers(fr.frozen_expander(), &fg)?;
    let inst = cfg.instance(&label(&cfg.seed, f));
    for ch in &chambers {
        if !frozen.iter().any(|c| c.contains(ch)) {
            return Ok(Report::falsified(ID, inst, json!({"word": one_based(&ch.word)})));
        }
    }
    Ok(Report::verified(ID, inst, json!({"chambers": chambers.len(), "frozen_chambers": frozen.len()})))
}

fn complete(cfg: &VerifyConfig, seed: &Seed) -> Result<ScatteringDiagram> {
    ScatteringDiagram::complete(&seed.classical(), cfg.order)
}

fn scattering_consistency(cfg: &VerifyConfig) -> Result<Report> {
    const ID: &str = "scattering-consistency";
    let inst = cfg.instance(&format!("K={}", cfg.order));
    let d = match complete(cfg, &cfg.seed) {
        Ok(d) => d,
        Err(Error::UnsupportedRank(r)) => return Ok(Report::inconclusive(ID, inst, json!({"rank": r}))),
        Err(e) => return Err(e),
    };
    let mut rng = cfg.rng();
    let mut passed = 0;
    if d.rank() == 2 {
        while passed < cfg.loops {
            let pts = ScatteringDiagram::sample_loop(&mut rng);
            match d.path_product(&pts, cfg.order) {
                Ok(a) if a.is_identity() => passed += 1,
                Ok(_) => {
                    let pts: Vec<Vec<String>> = pts.iter().map(|p| p.iter().map(|x| x.to_string()).collect()).collect();
                    return Ok(Report::falsified(ID, inst, json!({"loop": pts})));
                }
                Err(Error::NonGenericPath(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
    let walls: Vec<serde_json::Value> =
        d.outgoing().map(|w| json!({"normal": w.normal, "fn": w.func.to_map()})).collect();
    Ok(Report::verified(ID, inst, json!({"loops": passed, "outgoing": walls})))
}

fn restrict_aut(a: &Automorphism, spec: &FreezeSpec, seed: &Seed) -> Vec<String> {
    a.images
        .iter()
        .map(|img| {
            let terms: Vec<String> = img
                .terms
                .iter()
                .map(|(n, c)| {
                    debug_assert!(!spec.kills(seed, n));
                    format!("{}:{}", spec.restrict_n(seed, n), c)
                })
                .collect();
            terms.join(" ")
        })
        .collect()
}

fn pushforward(cfg: &VerifyConfig, f: &[usize]) -> Result<Report> {
    const ID: &str = "pushforward";
    let seed = cfg.seed.classical();
    let spec = FreezeSpec::new(&seed, f)?;
    let inst = cfg.instance(&format!("{} K={}", label(&seed, f), cfg.order));
    let d = complete(cfg, &seed)?;
    let push = d.freeze_pushforward(&spec);
    let frozen = complete(cfg, &seed.freeze(f)?)?;
    let a = restrict_aut(&push.p_d()?, &spec, &seed);
    let b: Vec<String> = frozen
        .p_d()?
        .images
        .iter()
        .map(|img| img.terms.iter().map(|(n, c)| format!("{n}:{c}")).collect::<Vec<_>>().join(" "))
        .collect();
    let walls_push: BTreeSet<(LatticeVec, Vec<String>)> =
        push.walls().iter().map(|w| (spec.restrict_n(&seed, &w.normal), w.func.coeffs.iter().map(|c| c.to_string()).collect())).collect();
    let walls_frozen: BTreeSet<(LatticeVec, Vec<String>)> =
        frozen.walls().iter().map(|w| (w.normal.clone(), w.func.coeffs.iter().map(|c| c.to_string()).collect())).collect();
    let w = json!({"walls": walls_push.len(), "same_walls": walls_push == walls_frozen});
    Ok(if a == b { Report::verified(ID, inst, w) } else { Report::falsified(ID, inst, json!({"pushforward": a, "frozen": b})) })
}

fn theta_diagram(cfg: &VerifyConfig) -> Result<ScatteringDiagram> {
    complete(cfg, &cfg.seed)
}

fn theta_positive(cfg: &VerifyConfig) -> Result<Report> {
    const ID: &str = "theta-positive";
    let d = theta_diagram(cfg)?;
    let q = theta::default_base_point(d.rank());
    let mut rng = cfg.rng();
    let inst = cfg.instance(&format!("K={}", cfg.order));
    let mut seen = BTreeSet::new();
    while seen.len() < cfg.samples {
        let m = LatticeVec(
            (0..cfg.seed.n())
                .map(|i| if cfg.seed.is_unfrozen(i) { rng.gen_range(0..=5) } else { rng.gen_range(-3..=3) })
                .collect(),
        );
        if !seen.insert(m.clone()) {
            continue;
        }
        let th = theta::theta(&d, &m, &q)?;
        if th != Laurent::monomial(m.clone()) {
            return Ok(Report::falsified(ID, inst, json!({"m": m, "theta": th.to_string()})));
        }
    }
    Ok(Report::verified(ID, inst, json!({"m": seen.into_iter().collect::<Vec<_>>()})))
}

fn theta_cluster(cfg: &VerifyConfig) -> Result<Report> {
    const ID: &str = "theta-cluster";
    let seed = cfg.seed.classical();
    let ex = Expander::new(seed.clone())?;
    let graph = ExchangeGraph::explore(&ex, cfg.depth)?;
    let inst = cfg.instance(&format!("K={} depth<={}", cfg.order, cfg.depth));
    if seed.rank() > 2 {
        let mut count = 0;
        for node in &graph.nodes {
            for &k in seed.unfrozen() {
                let th = theta::theta_cluster_chamber(&ex, &graph, &node.g_vectors[k])?;
                if th != node.state.vars[k] {
                    return Ok(Report::falsified(ID, inst, json!({"word": one_based(&node.state.word), "var": k + 1})));
                }
                count += 1;
            }
        }
        return Ok(Report::verified(ID, inst, json!({"mode": "cluster-chamber", "variables": count})));
    }
    let d = complete(cfg, &seed)?;
    let q = theta::default_base_point(d.rank());
    let mut count = 0;
    for node in &graph.nodes {
        for &k in seed.unfrozen() {
            let g = &node.g_vectors[k];
            let z = &node.state.vars[k];
            let fdeg = extract_pointed(z, ex.pstar())?.fpoly.keys().map(|n| n.total()).max().unwrap_or(0);
            if fdeg > cfg.order {
                continue;
            }
            let th = theta::theta(&d, g, &q)?;
            if &th != z {
                return Ok(Report::falsified(ID, inst, json!({"g": g, "theta": th.to_string(), "variable": z.to_string()})));
            }
            count += 1;
        }
    }
    Ok(Report::verified(ID, inst, json!({"mode": "broken-lines", "variables": count})))
}

fn theta_base_change(cfg: &VerifyConfig) -> Result<Report> {
    const ID: &str = "theta-base-change";
    let d = theta_diagram(cfg)?;
    let r = d.rank();
    let q = theta::default_base_point(r);
    let q2: Vec<BigRational> = (0..r).map(|i| rat(2 + i as i64) + rat_frac(1, 1049 + 2 * i as i64)).collect();
    let mut rng = cfg.rng();
    let inst = cfg.instance(&format!("K={}", cfg.order));
    for _ in 0..cfg.samples {
        let m = random_vec(&mut rng, cfg.seed.n(), cfg.box_r);
        let a = theta::theta(&d, &m, &q)?;
        let b = theta::theta(&d, &m, &q2)?;
        if a != b {
            return Ok(Report::falsified(ID, inst, json!({"m": m, "q": a.to_string(), "q2": b.to_string()})));
        }
    }
    Ok(Report::verified(ID, inst, json!({"samples": cfg.samples})))
}

fn freeze_theta(cfg: &VerifyConfig, f: &[usize]) -> Result<Report> {
    const ID: &str = "freeze-theta";
    let seed = cfg.seed.classical();
    let spec = FreezeSpec::new(&seed, f)?;
    let d = complete(cfg, &seed)?;
    let fd = complete(cfg, &seed.freeze(f)?)?;
    let q = theta::default_base_point(d.rank());
    let mut rng = cfg.rng();
    let inst = cfg.instance(&format!("{} K={}", label(&seed, f), cfg.order));
    let mut ms = Vec::new();
    let cap = (2 * cfg.box_r as usize + 1).saturating_pow(seed.n() as u32);
    while ms.len() < cfg.samples.min(cap) {
        let m = random_vec(&mut rng, seed.n(), cfg.box_r);
        if ms.contains(&m) {
            continue;
        }
        let (a, b) = theta::freeze_theta_check(&d, &fd, &spec, &m, &q)?;
        if a != b {
            return Ok(Report::falsified(ID, inst, json!({"m": m, "frozen_theta": a.to_string(), "theta_of_frozen": b.to_string()})));
        }
        ms.push(m);
    }
    Ok(Report::verified(ID, inst, json!({"m": ms})))
}

fn family(cfg: &VerifyConfig, seed: &Seed) -> Result<Box<dyn PointedFamily>> {
    Ok(match cfg.basis {
        BasisKind::Cluster => Box::new(ClusterMonomials::new(seed, cfg.depth)?),
        BasisKind::Theta => Box::new(ThetaFamily::new(complete(cfg, seed)?)),
    })
}

fn family_seed(cfg: &VerifyConfig) -> Seed {
    match cfg.basis {
        BasisKind::Cluster => cfg.seed.clone(),
        BasisKind::Theta => cfg.seed.classical(),
    }
}

fn basis_harness(id: &str, cfg: &VerifyConfig, f: &[usize]) -> Result<Report> {
    let seed = family_seed(cfg);
    let fam = family(cfg, &seed)?;
    let fr = Freezer::new(&seed, f)?;
    let degrees = bases::degree_box(seed.n(), cfg.box_r);
    let basis = match cfg.basis {
        BasisKind::Cluster => "cluster",
        BasisKind::Theta => "theta",
    };
    let inst = cfg.instance(&format!("{} box={} basis={basis}", label(&seed, f), cfg.box_r));
    match id {
        "property-s" => bases::check_shift_property(fam.as_ref(), &fr, &degrees, cfg.d_max, &inst),
        "induced-basis" => bases::compare_localization(fam.as_ref(), &fr, &degrees, cfg.d_max, &inst),
        "shift-product" => bases::check_shift_product(fam.as_ref(), &fr, &degrees, cfg.d_max, &inst),
        _ => {
            let ex = Expander::new(seed.clone())?;
            let shift = (0..seed.rank())
                .map(|p| LatticeVec::unit(seed.rank(), p))
                .find(|n| ex.pstar().apply(n).iter().any(|x| x % 2 != 0))
                .ok_or_else(|| Error::Domain("no shift with an odd image".into()))?;
            let pert = bases::Perturbed { inner: fam.as_ref(), shift, pstar: ex.pstar().clone() };
            bases::check_basis_independence(fam.as_ref(), &pert, &fr, &degrees, &inst)
        }
    }
}

fn all_pairs(degrees: &[LatticeVec]) -> Vec<(LatticeVec, LatticeVec)> {
    degrees.iter().flat_map(|a| degrees.iter().map(move |b| (a.clone(), b.clone()))).collect()
}

fn local_support(cfg: &VerifyConfig) -> Result<Report> {
    let seed = family_seed(cfg);
    let fam = family(cfg, &seed)?;
    let ex = Expander::new(seed.clone())?;
    let degrees = bases::degree_box(seed.n(), cfg.box_r);
    let inst = cfg.instance(&format!("box={} basis={}", cfg.box_r, fam.label()));
    truncation_guard(bases::check_local_support(fam.as_ref(), &ex, &all_pairs(&degrees), &inst), "local-support", &inst)
}

fn local_transition(cfg: &VerifyConfig) -> Result<Report> {
    let seed = cfg.seed.classical();
    let s = ClusterMonomials::new(&seed, cfg.depth)?;
    let z = ThetaFamily::new(complete(cfg, &seed)?);
    let degrees = bases::degree_box(seed.n(), cfg.box_r);
    let inst = cfg.instance(&format!("box={} K={}", cfg.box_r, cfg.order));
    truncation_guard(bases::check_local_transition(&s, &z, s.expander().pstar(), &degrees, &inst), "local-transition", &inst)
}

/// A decomposition that does not terminate usually means the truncation order
/// is too small for the theta functions involved.
fn truncation_guard(r: Result<Report>, id: &str, inst: &str) -> Result<Report> {
    match r {
        Err(Error::NotInSpan(e)) => Ok(Report::inconclusive(id, inst, json!({"reason": e}))),
        r => r,
    }
}
