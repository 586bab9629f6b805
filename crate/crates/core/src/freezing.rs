//! Freezing operators: term filters attached to a subset of unfrozen vertices.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::expansion::{reduce_word, ExchangeGraph, Expander, SeedState};
use crate::ring::lattice::{rat, rat_to_i64, solve};
use crate::ring::{extract_pointed, LatticeVec, Laurent, PointedElement, VCoeff};
use crate::seed::Seed;

/// A subset `F` of the unfrozen vertices and its complement `R`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreezeSpec {
    f: Vec<usize>,
    r: Vec<usize>,
}

impl FreezeSpec {
    pub fn new(seed: &Seed, f: &[usize]) -> Result<Self> {
        let fs: BTreeSet<usize> = f.iter().copied().collect();
        if let Some(&k) = fs.iter().find(|&&k| !seed.is_unfrozen(k)) {
            return Err(Error::BadFreeze(format!("vertex {} is not unfrozen", k + 1)));
        }
        let r = seed.unfrozen().iter().copied().filter(|k| !fs.contains(k)).collect();
        Ok(Self { f: fs.into_iter().collect(), r })
    }

    pub fn f(&self) -> &[usize] {
        &self.f
    }

    pub fn r(&self) -> &[usize] {
        &self.r
    }

    /// `n` is indexed by the unfrozen positions of `seed`.
    pub fn kills(&self, seed: &Seed, n: &[i64]) -> bool {
        seed.unfrozen().iter().zip(n).any(|(k, &x)| x != 0 && self.f.contains(k))
    }

    /// Coordinates of `n` on `R`, in the order of the frozen seed's positions.
    pub fn restrict_n(&self, seed: &Seed, n: &[i64]) -> LatticeVec {
        LatticeVec(
            seed.unfrozen()
                .iter()
                .zip(n)
                .filter(|(k, _)| !self.f.contains(k))
                .map(|(_, &x)| x)
                .collect(),
        )
    }

    /// Inverse of [`restrict_n`](Self::restrict_n), padding `F` with zeros.
    pub fn extend_n(&self, seed: &Seed, n: &[i64]) -> LatticeVec {
        let mut it = n.iter();
        LatticeVec(
            seed.unfrozen()
                .iter()
                .map(|k| if self.f.contains(k) { 0 } else { *it.next().unwrap() })
                .collect(),
        )
    }

    pub fn label(&self) -> String {
        let v: Vec<String> = self.f.iter().map(|k| (k + 1).to_string()).collect();
        format!("{{{}}}", v.join(","))
    }
}

/// Term filter on F-polynomials: `y^n -> 0` when `supp n` meets `F`.
pub fn freeze_fpoly(
    fpoly: &BTreeMap<LatticeVec, VCoeff>,
    spec: &FreezeSpec,
    seed: &Seed,
) -> BTreeMap<LatticeVec, VCoeff> {
    fpoly
        .iter()
        .filter(|(n, _)| !spec.kills(seed, n))
        .map(|(n, c)| (spec.restrict_n(seed, n), c.clone()))
        .collect()
}

/// Freezing data for a seed: the original and frozen expansion engines.
#[derive(Clone, Debug)]
pub struct Freezer {
    spec: FreezeSpec,
    ex: Expander,
    frozen: Expander,
}

impl Freezer {
    pub fn new(seed: &Seed, f: &[usize]) -> Result<Self> {
        let spec = FreezeSpec::new(seed, f)?;
        let ex = Expander::new(seed.clone())?;
        let frozen = Expander::new(seed.freeze(f)?)?;
        Ok(Self { spec, ex, frozen })
    }

    pub fn spec(&self) -> &FreezeSpec {
        &self.spec
    }

    pub fn expander(&self) -> &Expander {
        &self.ex
    }

    pub fn frozen_expander(&self) -> &Expander {
        &self.frozen
    }

    pub fn seed(&self) -> &Seed {
        self.ex.initial()
    }

    /// `z_{F,m}`: keeps the terms `x^{m + p*(n)}` with `supp n` disjoint from `F`.
    pub fn freeze_at(&self, z: &Laurent, m: &LatticeVec) -> Result<Laurent> {
        let ps = self.ex.pstar();
        let seed = self.seed();
        let mut out = Laurent::zero(z.dim());
        for (e, c) in z.terms() {
            let n = ps
                .preimage(&e.sub(m))
                .filter(|n| n.is_nonneg())
                .ok_or_else(|| Error::Domain(e.to_string()))?;
            if !self.spec.kills(seed, &n) {
                out.add_term(e.clone(), c);
            }
        }
        Ok(out)
    }

    /// `z_{F, deg z}` of a pointed element, pointed in the frozen seed.
    pub fn freeze_pointed(&self, z: &PointedElement) -> Result<PointedElement> {
        let out = self.freeze_at(&z.element, &z.degree)?;
        extract_pointed(&out, self.frozen.pstar())
    }

    pub fn freeze(&self, z: &Laurent) -> Result<Laurent> {
        let p = extract_pointed(z, self.ex.pstar())?;
        self.freeze_at(z, &p.degree)
    }

    /// `z(z1) * z(z2) = z(z1 * z2)` for pointed `z1, z2`; returns the two sides
    /// when they differ.
    pub fn check_multiplicativity(&self, z1: &Laurent, z2: &Laurent) -> Result<Option<(Laurent, Laurent)>> {
        let l = self.ex.lambda0();
        let p1 = extract_pointed(z1, self.ex.pstar())?;
        let p2 = extract_pointed(z2, self.ex.pstar())?;
        let lhs = self.freeze_at(z1, &p1.degree)?.mul(&self.freeze_at(z2, &p2.degree)?, l)?;
        let rhs = self.freeze_at(&z1.mul(z2, l)?, &p1.degree.add(&p2.degree))?;
        Ok(if lhs == rhs { None } else { Some((lhs, rhs)) })
    }

    fn check_word(&self, word: &[usize]) -> Result<()> {
        match word.iter().find(|k| self.spec.f.contains(k)) {
            Some(&k) => Err(Error::BadFreeze(format!("word touches frozen vertex {}", k + 1))),
            None => Ok(()),
        }
    }

    /// Freezing in `t0` against freezing in `t = word(t0)` followed by the
    /// substitution of the frozen seed's variables. `target` is a state of the
    /// original graph and `i` one of its variables.
    pub fn freeze_commutes_with_mutation(&self, target: &SeedState, i: usize, word: &[usize]) -> Result<bool> {
        self.check_word(word)?;
        let lhs = self.freeze(&target.vars[i])?;
        let st = self.ex.run(word)?;
        let local = Expander::new(st.seed.clone())?;
        let mut path: Vec<usize> = st.word.iter().rev().copied().collect();
        path.extend(target.word.iter().copied());
        let z_t = local.run(&reduce_word(&path))?.vars[i].clone();
        let local_freeze = Freezer::new(&st.seed, &self.spec.f)?;
        let zt_frozen = local_freeze.freeze(&z_t)?;
        let fst = self.frozen.run(word)?;
        let rhs = self.frozen.substitute(&zt_frozen, &fst)?;
        Ok(lhs == rhs)
    }

    /// Finds a seed of the frozen graph in which `z(z)` is a localized cluster
    /// monomial; returns its word and exponent.
    pub fn identify_frozen_cluster_monomial(
        &self,
        z: &Laurent,
        graph: &ExchangeGraph,
    ) -> Result<(Vec<usize>, LatticeVec)> {
        let fz = self.freeze(z)?;
        let g = extract_pointed(&fz, self.frozen.pstar())?.degree;
        let n = g.dim();
        let seed = self.frozen.initial();
        for node in &graph.nodes {
            let cols = &node.g_vectors;
            let a: Vec<Vec<BigRational>> = (0..n).map(|i| (0..n).map(|j| rat(cols[j][i])).collect()).collect();
            let b: Vec<BigRational> = g.iter().map(|&x| rat(x)).collect();
            let Some(sol) = solve(&a, &b) else { continue };
            let Some(av) = sol.iter().map(rat_to_i64).collect::<Option<Vec<i64>>>() else { continue };
            if seed.unfrozen().iter().any(|&k| av[k] < 0) {
                continue;
            }
            let mono = self.frozen.normalized_monomial(&node.state, &av)?;
            if mono == fz {
                return Ok((node.state.word.clone(), LatticeVec(av)));
            }
        }
        Err(Error::NotFound(graph.nodes.iter().map(|n| n.depth).max().unwrap_or(0)))
    }

    /// A word over `R` reaching the seed of `target` (up to permutation), found
    /// among the seeds of the frozen graph.
    pub fn reachability_reduction(&self, target: &SeedState, graph: &ExchangeGraph) -> Result<Vec<usize>> {
        let key = |gs: &[LatticeVec], seed: &Seed| {
            let mut v: Vec<LatticeVec> = gs.to_vec();
            v.sort();
            (v, seed.canonical())
        };
        let want = key(&self.ex.g_matrix(target)?, &target.seed);
        for node in &graph.nodes {
            let st = self.ex.run(&node.state.word)?;
            if key(&self.ex.g_matrix(&st)?, &st.seed) == want {
                return Ok(node.state.word.clone());
            }
        }
        Err(Error::NotFound(graph.nodes.iter().map(|n| n.depth).max().unwrap_or(0)))
    }

    /// The variables `x_j(t0)`, `j` in `F`, are all cluster variables of `target`.
    pub fn contains_frozen_initials(&self, target: &SeedState) -> Result<bool> {
        let gs = self.ex.g_matrix(target)?;
        let n = self.seed().n();
        Ok(self.spec.f.iter().all(|&j| gs.contains(&LatticeVec::unit(n, j))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn example_freezing() {
        let seed = catalog::example4().classical();
        let fr = Freezer::new(&seed, &[0]).unwrap();
        let st = fr.expander().run(&[0]).unwrap();
        let x1p = &st.vars[0];
        assert_eq!(fr.freeze(x1p).unwrap().to_string(), "x^(-1,0)");
        let x1 = Laurent::var(2, 0);
        assert_eq!(fr.check_multiplicativity(&x1, x1p).unwrap(), None);
        let one_plus = Laurent::one(2).add(&Laurent::var(2, 1)).unwrap();
        assert_eq!(fr.freeze_at(&one_plus, &LatticeVec(vec![0, 0])).unwrap(), Laurent::one(2));
    }

    #[test]
    fn fpoly_filter() {
        let seed = catalog::a2();
        let spec = FreezeSpec::new(&seed, &[0]).unwrap();
        let f: BTreeMap<LatticeVec, VCoeff> =
            [(vec![0, 0], 1), (vec![0, 1], 1), (vec![1, 1], 1)].into_iter().map(|(n, c)| (LatticeVec(n), VCoeff::from_int(c))).collect();
        let out = freeze_fpoly(&f, &spec, &seed);
        assert_eq!(out.len(), 2);
        assert!(out.contains_key(&LatticeVec(vec![1])));
        assert!(matches!(FreezeSpec::new(&catalog::example4(), &[1]), Err(Error::BadFreeze(_))));
    }

    #[test]
    fn domain_error() {
        let seed = catalog::a2();
        let fr = Freezer::new(&seed, &[0]).unwrap();
        let z = Laurent::monomial(LatticeVec(vec![-1, 0]));
        assert!(matches!(fr.freeze_at(&z, &LatticeVec(vec![0, 0])), Err(Error::Domain(_))));
    }
}
