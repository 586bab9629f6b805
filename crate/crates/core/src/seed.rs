//! Seeds: exchange data, compatibility, mutation and freezing.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ring::lattice::{independent_rows, rat, rat_to_i64, SkewForm};
use crate::ring::PStar;

/// Sign choice in the matrix form of mutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

/// A seed without cluster variables. Vertices are `0..n` internally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Seed {
    n: usize,
    unfrozen: Vec<usize>,
    b: Vec<Vec<BigRational>>,
    d: Vec<i64>,
    lambda: Option<SkewForm>,
    labels: Vec<String>,
}

fn pos(x: i64) -> i64 {
    x.max(0)
}

impl Seed {
    pub fn new(
        b: Vec<Vec<BigRational>>,
        unfrozen: Vec<usize>,
        d: Vec<i64>,
        lambda: Option<SkewForm>,
        labels: Option<Vec<String>>,
    ) -> Result<Self> {
        let n = b.len();
        let labels = labels.unwrap_or_else(|| (1..=n).map(|i| format!("x{i}")).collect());
        let mut unfrozen = unfrozen;
        unfrozen.sort_unstable();
        unfrozen.dedup();
        let seed = Self { n, unfrozen, b, d, lambda, labels };
        seed.validate()?;
        Ok(seed)
    }

    /// Integer matrix convenience constructor.
    pub fn from_int(b: Vec<Vec<i64>>, unfrozen: Vec<usize>, d: Vec<i64>, lambda: Option<Vec<Vec<i64>>>) -> Result<Self> {
        let b = b.into_iter().map(|r| r.into_iter().map(rat).collect()).collect();
        let lambda = lambda.map(SkewForm::new).transpose()?;
        Self::new(b, unfrozen, d, lambda, None)
    }

    /// Builds a seed from the `I x I_uf` block only. Frozen columns are filled
    /// in from skew-symmetrizability on unfrozen rows and with zeros elsewhere.
    pub fn from_btilde(bt: Vec<Vec<i64>>, unfrozen: Vec<usize>, d: Vec<i64>, lambda: Option<Vec<Vec<i64>>>) -> Result<Self> {
        let n = bt.len();
        let mut b = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            if bt[i].len() != unfrozen.len() {
                return Err(Error::Dimension { expected: unfrozen.len(), got: bt[i].len() });
            }
            for (p, &k) in unfrozen.iter().enumerate() {
                b[i][k] = rat(bt[i][p]);
            }
        }
        for &k in &unfrozen {
            for j in 0..n {
                if !unfrozen.contains(&j) {
                    // b_kj = -(d_k / d_j) b_jk
                    b[k][j] = -BigRational::new(BigInt::from(d[k]), BigInt::from(d[j])) * &b[j][k];
                }
            }
        }
        let lambda = lambda.map(SkewForm::new).transpose()?;
        Self::new(b, unfrozen, d, lambda, None)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.d.len() != n {
            return Err(Error::Dimension { expected: n, got: self.d.len() });
        }
        if self.labels.len() != n {
            return Err(Error::Dimension { expected: n, got: self.labels.len() });
        }
        if let Some(&k) = self.unfrozen.iter().find(|&&k| k >= n) {
            return Err(Error::InvalidSeed(format!("unfrozen vertex {} out of range", k + 1)));
        }
        if self.d.iter().any(|&x| x <= 0) {
            return Err(Error::InvalidSeed("symmetrizers must be positive".into()));
        }
        for row in &self.b {
            if row.len() != n {
                return Err(Error::Dimension { expected: n, got: row.len() });
            }
        }
        for i in 0..n {
            for j in 0..n {
                let lhs = &self.b[i][j] / rat(self.d[i]);
                let rhs = -(&self.b[j][i] / rat(self.d[j]));
                if lhs != rhs {
                    return Err(Error::InvalidSeed(format!("not skew-symmetrizable at ({},{})", i + 1, j + 1)));
                }
                if (self.is_unfrozen(i) || self.is_unfrozen(j)) && !self.b[i][j].is_integer() {
                    return Err(Error::InvalidSeed(format!("entry ({},{}) must be an integer", i + 1, j + 1)));
                }
            }
        }
        let bt: Vec<Vec<BigRational>> = (0..n)
            .map(|i| self.unfrozen.iter().map(|&k| self.b[i][k].clone()).collect())
            .collect();
        if !self.unfrozen.is_empty() && independent_rows(&bt).rank < self.unfrozen.len() {
            return Err(Error::Rank);
        }
        if let Some(l) = &self.lambda {
            if l.dim() != n {
                return Err(Error::Dimension { expected: n, got: l.dim() });
            }
            self.check_compatibility()?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.unfrozen.len()
    }

    pub fn unfrozen(&self) -> &[usize] {
        &self.unfrozen
    }

    pub fn frozen(&self) -> Vec<usize> {
        (0..self.n).filter(|i| !self.is_unfrozen(*i)).collect()
    }

    pub fn is_unfrozen(&self, i: usize) -> bool {
        self.unfrozen.binary_search(&i).is_ok()
    }

    /// Position of an unfrozen vertex in the unfrozen list.
    pub fn position(&self, k: usize) -> Option<usize> {
        self.unfrozen.binary_search(&k).ok()
    }

    pub fn b_rat(&self, i: usize, j: usize) -> &BigRational {
        &self.b[i][j]
    }

    pub fn b_full(&self) -> &[Vec<BigRational>] {
        &self.b
    }

    /// Integer entry; only valid when `i` or `j` is unfrozen.
    pub fn b(&self, i: usize, j: usize) -> i64 {
        rat_to_i64(&self.b[i][j]).expect("entry touching an unfrozen vertex is an integer")
    }

    /// The `I x I_uf` block as integers.
    pub fn btilde(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.unfrozen.iter().map(|&k| self.b(i, k)).collect()).collect()
    }

    pub fn pstar(&self) -> Result<PStar> {
        PStar::new(self.btilde())
    }

    pub fn d(&self) -> &[i64] {
        &self.d
    }

    pub fn lambda(&self) -> Option<&SkewForm> {
        self.lambda.as_ref()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Same exchange data without the quantum form.
    pub fn classical(&self) -> Self {
        Self { lambda: None, ..self.clone() }
    }

    /// The diagonal values `lambda(f_k, p*(e_k))`, one per unfrozen vertex.
    pub fn check_compatibility(&self) -> Result<Vec<i64>> {
        let l = self
            .lambda
            .as_ref()
            .ok_or_else(|| Error::IncompatiblePair("no quantum form".into()))?;
        let bt = self.btilde();
        let mut dd = Vec::new();
        for (p, &k) in self.unfrozen.iter().enumerate() {
            let col: Vec<i64> = bt.iter().map(|r| r[p]).collect();
            let lc = l.apply(&col);
            for (i, &x) in lc.iter().enumerate() {
                if i == k {
                    if x <= 0 {
                        return Err(Error::IncompatiblePair(format!("diagonal value {x} at vertex {}", k + 1)));
                    }
                    dd.push(x);
                } else if x != 0 {
                    return Err(Error::IncompatiblePair(format!(
                        "lambda(f_{}, p*(e_{})) = {x}",
                        i + 1,
                        k + 1
                    )));
                }
            }
        }
        Ok(dd)
    }

    /// `E_eps` for mutation at `k`.
    pub fn e_matrix(&self, k: usize, eps: Sign) -> Vec<Vec<i64>> {
        let e = eps.value();
        let mut m: Vec<Vec<i64>> = (0..self.n).map(|i| (0..self.n).map(|j| i64::from(i == j)).collect()).collect();
        for i in 0..self.n {
            m[i][k] = if i == k { -1 } else { pos(-e * self.b(i, k)) };
        }
        m
    }

    /// `F_eps` for mutation at `k`.
    pub fn f_matrix(&self, k: usize, eps: Sign) -> Vec<Vec<i64>> {
        let e = eps.value();
        let mut m: Vec<Vec<i64>> = (0..self.n).map(|i| (0..self.n).map(|j| i64::from(i == j)).collect()).collect();
        for j in 0..self.n {
            m[k][j] = if j == k { -1 } else { pos(e * self.b(k, j)) };
        }
        m
    }

    /// Mutation at the unfrozen vertex `k` via `B' = E B F`, `Lambda' = E^T Lambda E`.
    pub fn mutate_with(&self, k: usize, eps: Sign) -> Result<Self> {
        if k >= self.n {
            return Err(Error::InvalidSeed(format!("vertex {} out of range", k + 1)));
        }
        if !self.is_unfrozen(k) {
            return Err(Error::FrozenMutation(k + 1));
        }
        let n = self.n;
        let e = self.e_matrix(k, eps);
        let f = self.f_matrix(k, eps);
        let mut eb = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for a in 0..n {
                    if e[i][a] != 0 {
                        s += rat(e[i][a]) * &self.b[a][j];
                    }
                }
                eb[i][j] = s;
            }
        }
        let mut b = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for a in 0..n {
                    if f[a][j] != 0 {
                        s += &eb[i][a] * rat(f[a][j]);
                    }
                }
                b[i][j] = s;
            }
        }
        let lambda = self.lambda.as_ref().map(|l| l.congruent(&e));
        let out = Self { n, unfrozen: self.unfrozen.clone(), b, d: self.d.clone(), lambda, labels: self.labels.clone() };
        out.validate()?;
        Ok(out)
    }

    pub fn mutate(&self, k: usize) -> Result<Self> {
        self.mutate_with(k, Sign::Plus)
    }

    /// Entrywise mutation rule, used as a cross-check of the matrix form.
    pub fn mutate_entrywise(&self, k: usize) -> Result<Vec<Vec<BigRational>>> {
        if !self.is_unfrozen(k) {
            return Err(Error::FrozenMutation(k + 1));
        }
        let n = self.n;
        let mut b = self.b.clone();
        for i in 0..n {
            for j in 0..n {
                if i == k || j == k {
                    b[i][j] = -&self.b[i][j];
                } else {
                    let bik = &self.b[i][k];
                    let bkj = &self.b[k][j];
                    let p = |x: &BigRational| if x.is_positive() { x.clone() } else { BigRational::zero() };
                    b[i][j] = &self.b[i][j] + p(bik) * p(bkj) - p(&-bik) * p(&-bkj);
                }
            }
        }
        Ok(b)
    }

    /// Freezes the vertices in `f`.
    pub fn freeze(&self, f: &[usize]) -> Result<Self> {
        let fs: BTreeSet<usize> = f.iter().copied().collect();
        if let Some(&k) = fs.iter().find(|&&k| !self.is_unfrozen(k)) {
            return Err(Error::BadFreeze(format!("vertex {} is not unfrozen", k + 1)));
        }
        let unfrozen = self.unfrozen.iter().copied().filter(|k| !fs.contains(k)).collect();
        let out = Self { unfrozen, ..self.clone() };
        out.validate()?;
        Ok(out)
    }

    /// Relabels unfrozen vertices: slot `unfrozen[p]` receives vertex `unfrozen[perm[p]]`.
    pub fn permute_unfrozen(&self, perm: &[usize]) -> Self {
        let full = self.full_permutation(perm);
        let n = self.n;
        let b = (0..n).map(|i| (0..n).map(|j| self.b[full[i]][full[j]].clone()).collect()).collect();
        Self {
            n,
            unfrozen: self.unfrozen.clone(),
            b,
            d: full.iter().map(|&i| self.d[i]).collect(),
            lambda: self.lambda.as_ref().map(|l| l.permuted(&full)),
            labels: full.iter().map(|&i| self.labels[i].clone()).collect(),
        }
    }

    /// Extends a permutation of unfrozen positions to all vertices.
    pub fn full_permutation(&self, perm: &[usize]) -> Vec<usize> {
        let mut full: Vec<usize> = (0..self.n).collect();
        for (p, &q) in perm.iter().enumerate() {
            full[self.unfrozen[p]] = self.unfrozen[q];
        }
        full
    }

    pub(crate) fn data_key(&self) -> String {
        let mut s = String::new();
        for row in &self.b {
            for x in row {
                s.push_str(&x.to_string());
                s.push(',');
            }
            s.push(';');
        }
        s.push('|');
        for x in &self.d {
            s.push_str(&x.to_string());
            s.push(',');
        }
        s.push('|');
        if let Some(l) = &self.lambda {
            for row in l.rows() {
                for x in row {
                    s.push_str(&x.to_string());
                    s.push(',');
                }
                s.push(';');
            }
        }
        s
    }

    /// Representative of the seed up to permutations of unfrozen vertices.
    pub fn canonical(&self) -> Self {
        let r = self.unfrozen.len();
        if r <= 7 {
            let mut best: Option<(String, Self)> = None;
            let mut perm: Vec<usize> = (0..r).collect();
            permutations(&mut perm, 0, &mut |p| {
                let s = self.permute_unfrozen(p);
                let key = s.data_key();
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    best = Some((key, s));
                }
            });
            best.map(|(_, s)| s).unwrap_or_else(|| self.clone())
        } else {
            let mut perm: Vec<usize> = (0..r).collect();
            let rows: Vec<String> = self
                .unfrozen
                .iter()
                .map(|&k| self.b[k].iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                .collect();
            perm.sort_by(|&a, &b| rows[a].cmp(&rows[b]));
            self.permute_unfrozen(&perm)
        }
    }

    /// Hex digest of the canonical form.
    pub fn id(&self) -> String {
        let c = self.canonical();
        let mut h = Sha256::new();
        h.update(c.data_key().as_bytes());
        h.update(format!("{:?}", c.unfrozen).as_bytes());
        let digest = h.finalize();
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> SeedFile {
        SeedFile {
            n: self.n,
            unfrozen: self.unfrozen.iter().map(|k| k + 1).collect(),
            b: self.b.iter().map(|r| r.iter().map(|x| RatEntry::Str(x.to_string())).collect()).collect(),
            d: self.d.clone(),
            lambda: self.lambda.as_ref().map(|l| l.rows().to_vec()),
            labels: Some(self.labels.clone()),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let f: SeedFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        f.into_seed()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("seed serializes")
    }
}

fn permutations(a: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == a.len() {
        f(a);
        return;
    }
    for i in k..a.len() {
        a.swap(k, i);
        permutations(a, k + 1, f);
        a.swap(k, i);
    }
}

/// A matrix entry in a seed file: `"p/q"`, `"p"` or a bare integer.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatEntry {
    Int(i64),
    Str(String),
}

impl RatEntry {
    fn to_rat(&self) -> Result<BigRational> {
        match self {
            RatEntry::Int(x) => Ok(rat(*x)),
            RatEntry::Str(s) => s.trim().parse::<BigRational>().map_err(|e| Error::Parse(format!("{s}: {e}"))),
        }
    }
}

/// On-disk seed format; vertex indices are 1-based.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeedFile {
    pub n: usize,
    pub unfrozen: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<RatEntry>>,
    pub d: Vec<i64>,
    #[serde(rename = "Lambda")]
    pub lambda: Option<Vec<Vec<i64>>>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
}

impl SeedFile {
    pub fn into_seed(self) -> Result<Seed> {
        if self.b.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: self.b.len() });
        }
        if self.unfrozen.iter().any(|&k| k == 0 || k > self.n) {
            return Err(Error::InvalidSeed("unfrozen indices are 1-based and at most n".into()));
        }
        let b = self
            .b
            .iter()
            .map(|r| r.iter().map(RatEntry::to_rat).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let lambda = self.lambda.map(SkewForm::new).transpose()?;
        Seed::new(b, self.unfrozen.iter().map(|k| k - 1).collect(), self.d, lambda, self.labels)
    }
}

impl fmt::Display for Seed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_json_string())
    }
}
