//! Laurent expansions of cluster variables in the initial seed.

mod graph;
mod tropical;

pub use graph::{ExchangeGraph, GraphNode, InjectiveReachable};
pub use tropical::{tropical_mutation, tropical_word};

use crate::error::{Error, Result};
use crate::ring::{extract_pointed, LatticeVec, Laurent, PStar, PointedElement, SkewForm, VCoeff};
use crate::seed::Seed;

/// A seed reached from the initial one, with its variables expanded in the
/// initial torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeedState {
    pub seed: Seed,
    /// one entry per vertex; frozen ones stay `x^{f_j}`
    pub vars: Vec<Laurent>,
    /// `cmat[i][j]`: coordinate `i` of the c-vector at unfrozen position `j`
    pub cmat: Vec<Vec<i64>>,
    /// mutation word from the initial seed, 0-based vertices
    pub word: Vec<usize>,
}

impl SeedState {
    pub fn c_vector(&self, pos: usize) -> LatticeVec {
        LatticeVec(self.cmat.iter().map(|row| row[pos]).collect())
    }
}

/// Expansion engine rooted at an initial seed.
#[derive(Clone, Debug)]
pub struct Expander {
    initial: Seed,
    pstar: PStar,
}

impl Expander {
    pub fn new(initial: Seed) -> Result<Self> {
        let pstar = initial.pstar()?;
        Ok(Self { initial, pstar })
    }

    pub fn initial(&self) -> &Seed {
        &self.initial
    }

    pub fn pstar(&self) -> &PStar {
        &self.pstar
    }

    /// Twisting form of the initial torus.
    pub fn lambda0(&self) -> Option<&SkewForm> {
        self.initial.lambda()
    }

    pub fn initial_state(&self) -> SeedState {
        let n = self.initial.n();
        let r = self.initial.rank();
        SeedState {
            seed: self.initial.clone(),
            vars: (0..n).map(|i| Laurent::var(n, i)).collect(),
            cmat: (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect(),
            word: Vec::new(),
        }
    }

    /// Normalized cluster monomial `X(t)^a` for `a` in `Z^I`.
    pub fn normalized_monomial(&self, state: &SeedState, a: &[i64]) -> Result<Laurent> {
        let n = self.initial.n();
        if a.len() != n {
            return Err(Error::Dimension { expected: n, got: a.len() });
        }
        let a = LatticeVec(a.to_vec());
        let p = a.pos_part();
        let q = a.neg_part();
        let xp = self.nonneg_monomial(state, &p)?;
        if q.is_zero() {
            return Ok(xp);
        }
        let xq = self.nonneg_monomial(state, &q)?;
        let twist = state.seed.lambda().map(|l| l.eval(&a, &q)).unwrap_or(0);
        xp.scale(&VCoeff::v_pow(twist)).exact_div(&xq, self.lambda0())
    }

    fn nonneg_monomial(&self, state: &SeedState, c: &[i64]) -> Result<Laurent> {
        let n = self.initial.n();
        let l0 = self.lambda0();
        let mut out = Laurent::one(n);
        for (i, &ci) in c.iter().enumerate() {
            if ci > 0 {
                out = out.mul(&state.vars[i].pow(ci as u32, l0)?, l0)?;
            }
        }
        if let Some(lt) = state.seed.lambda() {
            let mut s = 0;
            for i in 0..n {
                for j in i + 1..n {
                    s += c[i] * c[j] * lt[(i, j)];
                }
            }
            out = out.scale(&VCoeff::v_pow(-s));
        }
        Ok(out)
    }

    /// Mutation of a state at the unfrozen vertex `k`.
    pub fn mutate_state(&self, state: &SeedState, k: usize) -> Result<SeedState> {
        let seed = &state.seed;
        if k >= seed.n() {
            return Err(Error::InvalidSeed(format!("vertex {} out of range", k + 1)));
        }
        let kp = seed.position(k).ok_or(Error::FrozenMutation(k + 1))?;
        let n = seed.n();
        let col: Vec<i64> = (0..n).map(|i| seed.b(i, k)).collect();
        let cp: Vec<i64> = col.iter().map(|&b| b.max(0)).collect();
        let cm: Vec<i64> = col.iter().map(|&b| (-b).max(0)).collect();
        let ek = LatticeVec::unit(n, k);
        let tw = |c: &[i64]| seed.lambda().map(|l| l.eval(c, &ek)).unwrap_or(0);
        let num = self
            .normalized_monomial(state, &cp)?
            .scale(&VCoeff::v_pow(tw(&cp)))
            .add(&self.normalized_monomial(state, &cm)?.scale(&VCoeff::v_pow(tw(&cm))))?;
        let new_var = num.exact_div(&state.vars[k], self.lambda0())?;
        if !new_var.classical_nonneg() {
            return Err(Error::Positivity(format!("negative coefficient in {new_var}")));
        }
        let mut vars = state.vars.clone();
        vars[k] = new_var;
        let cmat = mutate_cmatrix(seed, &state.cmat, kp);
        for j in 0..cmat.len() {
            let col: Vec<i64> = cmat.iter().map(|r| r[j]).collect();
            if col.iter().all(|&x| x == 0) || (col.iter().any(|&x| x > 0) && col.iter().any(|&x| x < 0)) {
                return Err(Error::SignCoherence(format!("c-vector {:?}", col)));
            }
        }
        let mut word = state.word.clone();
        word.push(k);
        Ok(SeedState { seed: seed.mutate(k)?, vars, cmat, word })
    }

    pub fn run(&self, word: &[usize]) -> Result<SeedState> {
        let mut s = self.initial_state();
        for &k in word {
            s = self.mutate_state(&s, k)?;
        }
        Ok(s)
    }

    pub fn pointed(&self, state: &SeedState, i: usize) -> Result<PointedElement> {
        extract_pointed(&state.vars[i], &self.pstar)
    }

    pub fn g_vector(&self, state: &SeedState, i: usize) -> Result<LatticeVec> {
        Ok(self.pointed(state, i)?.degree)
    }

    /// Columns are the g-vectors of all variables of the state.
    pub fn g_matrix(&self, state: &SeedState) -> Result<Vec<LatticeVec>> {
        (0..state.vars.len()).map(|i| self.g_vector(state, i)).collect()
    }

    /// Expresses `sum_a c_a x(t)^a` in the initial torus, `a` over all vertices.
    pub fn substitute(&self, z: &Laurent, state: &SeedState) -> Result<Laurent> {
        let n = self.initial.n();
        if z.dim() != n {
            return Err(Error::Dimension { expected: n, got: z.dim() });
        }
        if z.is_zero() {
            return Ok(Laurent::zero(n));
        }
        let (lo, _) = z.bounding_box();
        let dvec = LatticeVec(lo.iter().map(|&x| (-x).max(0)).collect());
        let mut num = Laurent::zero(n);
        for (a, c) in z.terms() {
            let twist = state.seed.lambda().map(|l| l.eval(a, &dvec)).unwrap_or(0);
            let m = self.nonneg_monomial(state, &a.add(&dvec))?;
            num = num.add(&m.scale(&c.shift(twist)))?;
        }
        if dvec.is_zero() {
            return Ok(num);
        }
        num.exact_div(&self.nonneg_monomial(state, &dvec)?, self.lambda0())
    }

    /// g-vectors of the variables of `target`, measured in the seed `base`.
    pub fn psi_linear(&self, base: &SeedState, target: &SeedState) -> Result<Vec<LatticeVec>> {
        let ex = Expander::new(base.seed.clone())?;
        let mut word: Vec<usize> = base.word.iter().rev().copied().collect();
        word.extend(target.word.iter().copied());
        let st = ex.run(&reduce_word(&word))?;
        ex.g_matrix(&st)
    }
}

/// Cancels adjacent repeated letters.
pub fn reduce_word(word: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    for &k in word {
        if out.last() == Some(&k) {
            out.pop();
        } else {
            out.push(k);
        }
    }
    out
}

/// C-matrix recursion at unfrozen position `kp`, using the principal part of
/// the exchange matrix before mutation.
pub fn mutate_cmatrix(seed: &Seed, c: &[Vec<i64>], kp: usize) -> Vec<Vec<i64>> {
    let uf = seed.unfrozen();
    let k = uf[kp];
    let r = c.len();
    let mut out = c.to_vec();
    for i in 0..r {
        let cik = c[i][kp];
        for (j, &vj) in uf.iter().enumerate() {
            if j == kp {
                out[i][j] = -cik;
            } else {
                let bkj = seed.b(k, vj);
                out[i][j] = c[i][j] + cik.max(0) * bkj.max(0) - (-cik).max(0) * (-bkj).max(0);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ex4() -> Expander {
        let s = Seed::from_int(vec![vec![0, -1], vec![1, 0]], vec![0], vec![1, 1], Some(vec![vec![0, 1], vec![-1, 0]])).unwrap();
        Expander::new(s).unwrap()
    }

    #[test]
    fn example_variable() {
        let ex = ex4();
        let s = ex.run(&[0]).unwrap();
        assert_eq!(s.vars[0].to_string(), "x^(-1,0) + x^(-1,1)");
        assert_eq!(ex.g_vector(&s, 0).unwrap(), LatticeVec(vec![-1, 0]));
        let f = ex.pointed(&s, 0).unwrap().fpoly;
        assert_eq!(f.len(), 2);
        assert!(f.contains_key(&LatticeVec(vec![1])));
    }

    #[test]
    fn a2_first_step() {
        let s = Seed::from_int(vec![vec![0, 1], vec![-1, 0]], vec![0, 1], vec![1, 1], Some(vec![vec![0, -1], vec![1, 0]])).unwrap();
        let ex = Expander::new(s).unwrap();
        let st = ex.run(&[0]).unwrap();
        assert_eq!(st.vars[0].eval_at_one().to_string(), "x^(-1,0) + x^(-1,1)");
        assert_eq!(st.c_vector(0), LatticeVec(vec![-1, 0]));
        assert_eq!(st.c_vector(1), LatticeVec(vec![1, 1]));
    }

    #[test]
    fn reduce() {
        assert_eq!(reduce_word(&[0, 1, 1, 0, 2]), vec![2]);
    }
}
