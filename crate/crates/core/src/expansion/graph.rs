use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::{Expander, SeedState};
use crate::error::{Error, Result};
use crate::ring::LatticeVec;

/// A vertex of the exchange graph.
#[derive(Clone, Debug)]
pub struct GraphNode {
    pub state: SeedState,
    pub g_vectors: Vec<LatticeVec>,
    pub depth: usize,
    pub id: String,
}

/// Exchange graph explored breadth-first up to a depth bound.
#[derive(Clone, Debug)]
pub struct ExchangeGraph {
    pub nodes: Vec<GraphNode>,
    /// `(a, b, vertex)` with `a < b`
    pub edges: Vec<(usize, usize, usize)>,
    /// no mutation of a visited seed leaves the visited set
    pub complete: bool,
}

/// Seed `t0[1]` found by the g-vector test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InjectiveReachable {
    pub node: usize,
    pub word: Vec<usize>,
    /// `sigma[k]`: unfrozen position of the variable with unfrozen g-part `-e_k`
    pub sigma: Vec<usize>,
}

fn state_key(st: &SeedState, g: &[LatticeVec]) -> String {
    let uf = st.seed.unfrozen();
    let mut perm: Vec<usize> = (0..uf.len()).collect();
    perm.sort_by(|&a, &b| g[uf[a]].cmp(&g[uf[b]]));
    let seed = st.seed.permute_unfrozen(&perm);
    let mut key = String::new();
    for &p in &perm {
        let _ = write!(key, "{};", g[uf[p]]);
    }
    key.push_str(&seed.data_key());
    key
}

fn digest(key: &str) -> String {
    let d = Sha256::digest(key.as_bytes());
    d.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

impl ExchangeGraph {
    /// Breadth-first exploration; neighbour states are computed in parallel
    /// and merged in a fixed order.
    pub fn explore(ex: &Expander, max_depth: usize) -> Result<Self> {
        let init = ex.initial_state();
        let g0 = ex.g_matrix(&init)?;
        let key0 = state_key(&init, &g0);
        let mut index: HashMap<String, usize> = HashMap::new();
        index.insert(key0.clone(), 0);
        let mut nodes = vec![GraphNode { state: init, g_vectors: g0, depth: 0, id: digest(&key0) }];
        let mut edges: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        let mut complete = true;
        let mut frontier = vec![0usize];
        let uf: Vec<usize> = ex.initial().unfrozen().to_vec();
        while !frontier.is_empty() {
            let jobs: Vec<(usize, usize)> = frontier.iter().flat_map(|&a| uf.iter().map(move |&k| (a, k))).collect();
            let results: Vec<Result<(SeedState, Vec<LatticeVec>, String)>> = jobs
                .par_iter()
                .map(|&(a, k)| {
                    let st = ex.mutate_state(&nodes[a].state, k)?;
                    let g = ex.g_matrix(&st)?;
                    let key = state_key(&st, &g);
                    Ok((st, g, key))
                })
                .collect();
            let mut next = Vec::new();
            for ((a, k), res) in jobs.into_iter().zip(results) {
                let (st, g, key) = res?;
                let b = match index.get(&key) {
                    Some(&b) => b,
                    None => {
                        let depth = nodes[a].depth + 1;
                        if depth > max_depth {
                            complete = false;
                            continue;
                        }
                        let b = nodes.len();
                        index.insert(key.clone(), b);
                        nodes.push(GraphNode { state: st, g_vectors: g, depth, id: digest(&key) });
                        next.push(b);
                        b
                    }
                };
                let e = (a.min(b), a.max(b), k);
                if !edges.iter().any(|&(x, y, _)| x == e.0 && y == e.1) {
                    edges.insert(e);
                }
            }
            frontier = next;
        }
        Ok(Self { nodes, edges: edges.into_iter().collect(), complete })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Vertex degrees in the undirected graph.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for &(a, b, _) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    /// Connected, every vertex of degree two.
    pub fn is_cycle(&self) -> bool {
        let n = self.nodes.len();
        n >= 3 && self.edges.len() == n && self.degrees().iter().all(|&d| d == 2)
    }

    /// First seed (in BFS order) passing the g-vector test for `t0[1]`.
    pub fn find_injective_reachable(&self, ex: &Expander) -> Result<InjectiveReachable> {
        let uf = ex.initial().unfrozen();
        for (idx, node) in self.nodes.iter().enumerate() {
            if let Some(sigma) = match_negated(uf, &node.g_vectors) {
                return Ok(InjectiveReachable { node: idx, word: node.state.word.clone(), sigma });
            }
        }
        Err(Error::NotFound(self.nodes.iter().map(|n| n.depth).max().unwrap_or(0)))
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph exchange {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{}\"];", n.id);
        }
        for &(a, b, k) in &self.edges {
            let _ = writeln!(s, "  n{a} -- n{b} [label=\"{}\"];", k + 1);
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Node<'a> {
            index: usize,
            id: &'a str,
            depth: usize,
            word: Vec<usize>,
            g_vectors: &'a [LatticeVec],
            c_matrix: &'a [Vec<i64>],
        }
        let nodes: Vec<Node> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| Node {
                index: i,
                id: &n.id,
                depth: n.depth,
                word: n.state.word.iter().map(|k| k + 1).collect(),
                g_vectors: &n.g_vectors,
                c_matrix: &n.state.cmat,
            })
            .collect();
        let edges: Vec<(usize, usize, usize)> = self.edges.iter().map(|&(a, b, k)| (a, b, k + 1)).collect();
        serde_json::json!({ "complete": self.complete, "nodes": nodes, "edges": edges })
    }
}

/// Greedy matching of unfrozen g-vector parts to `-e_k`.
fn match_negated(uf: &[usize], g: &[LatticeVec]) -> Option<Vec<usize>> {
    let mut sigma = Vec::with_capacity(uf.len());
    let mut used = vec![false; uf.len()];
    for k in 0..uf.len() {
        let hit = (0..uf.len()).find(|&p| {
            !used[p] && uf.iter().enumerate().all(|(q, &v)| g[uf[p]][v] == if q == k { -1 } else { 0 })
        })?;
        used[hit] = true;
        sigma.push(hit);
    }
    Some(sigma)
}
