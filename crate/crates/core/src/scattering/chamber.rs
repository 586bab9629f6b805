use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::expansion::{ExchangeGraph, Expander, SeedState};
use crate::ring::lattice::rat_frac;
use crate::ring::LatticeVec;

/// Cone of a seed: spanned by its g-vectors and `-f_j` for frozen `j`, cut out
/// by its c-vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    pub word: Vec<usize>,
    pub generators: Vec<LatticeVec>,
    /// c-vectors, indexed by unfrozen positions
    pub normals: Vec<LatticeVec>,
    unfrozen: Vec<usize>,
    d: Vec<i64>,
}

impl Chamber {
    /// Builds the chamber of `st` and checks that both descriptions agree.
    pub fn of_state(ex: &Expander, st: &SeedState) -> Result<Self> {
        let seed = ex.initial();
        let n = seed.n();
        let mut generators = ex.g_matrix(st)?;
        for j in seed.frozen() {
            generators.push(LatticeVec::unit(n, j).neg());
        }
        let r = seed.rank();
        let normals = (0..r).map(|p| st.c_vector(p)).collect();
        let ch = Self { word: st.word.clone(), generators, normals, unfrozen: seed.unfrozen().to_vec(), d: seed.d().to_vec() };
        // g-vector of position p lies on every facet but the p-th
        let uf = st.seed.unfrozen();
        for (p, &v) in uf.iter().enumerate() {
            for q in 0..r {
                let x = ch.pair(&ch.generators[v], &ch.normals[q]);
                let ok = if p == q { x.is_positive() } else { x.is_zero() };
                if !ok {
                    return Err(Error::SignCoherence(format!("chamber of word {:?} is not simplicial", st.word)));
                }
            }
        }
        for j in st.seed.frozen() {
            if ch.normals.iter().any(|c| !ch.pair(&ch.generators[j], c).is_zero()) {
                return Err(Error::SignCoherence(format!("frozen g-vector off the lineality space at word {:?}", st.word)));
            }
        }
        Ok(ch)
    }

    /// `<m, c> = sum_p m_{u_p} c_p / d_{u_p}`
    pub fn pair(&self, m: &[i64], c: &[i64]) -> BigRational {
        self.unfrozen.iter().zip(c).map(|(&k, &x)| rat_frac(m[k] * x, self.d[k])).sum()
    }

    pub fn contains_point(&self, m: &[i64]) -> bool {
        self.normals.iter().all(|c| !self.pair(m, c).is_negative())
    }

    pub fn contains_interior(&self, m: &[i64]) -> bool {
        self.normals.iter().all(|c| self.pair(m, c).is_positive())
    }

    /// Every generator of `other` lies in `self`.
    pub fn contains(&self, other: &Chamber) -> bool {
        other.generators.iter().all(|g| self.contains_point(g))
    }

    /// Normal of the common facet when the chambers are adjacent.
    pub fn shared_facet(&self, other: &Chamber) -> Option<LatticeVec> {
        let common: Vec<&LatticeVec> = self.generators.iter().filter(|g| other.generators.contains(g)).collect();
        if common.len() + 1 != self.generators.len() {
            return None;
        }
        self.normals.iter().find(|c| common.iter().all(|g| self.pair(g, c).is_zero())).cloned()
    }
}

/// Chambers of all seeds of an explored exchange graph, in node order.
pub fn reachable_chambers(ex: &Expander, graph: &ExchangeGraph) -> Result<Vec<Chamber>> {
    graph.nodes.iter().map(|nd| Chamber::of_state(ex, &nd.state)).collect()
}

/// Index of the first chamber containing `m`.
pub fn locate(chambers: &[Chamber], m: &[i64]) -> Option<usize> {
    chambers.iter().position(|c| c.contains_point(m))
}
