//! Exact convex-hull comparisons for small integer point sets.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::lattice::{rank, rat, solve};

/// `p` lies in the convex hull of `pts`.
///
/// Carathéodory: it suffices to test affinely independent subsets of size at
/// most `dim + 1`.
pub fn in_hull(p: &[i64], pts: &[Vec<i64>]) -> bool {
    if pts.iter().any(|q| q.as_slice() == p) {
        return true;
    }
    let dim = p.len();
    let max_k = (dim + 1).min(pts.len());
    let mut idx = Vec::new();
    (2..=max_k).any(|k| subsets(pts.len(), k, 0, &mut idx, &mut |s| barycentric(p, pts, s)))
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
    if cur.len() == k {
        return f(cur);
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        if subsets(n, k, i + 1, cur, f) {
            cur.pop();
            return true;
        }
        cur.pop();
    }
    false
}

fn barycentric(p: &[i64], pts: &[Vec<i64>], s: &[usize]) -> bool {
    let dim = p.len();
    // rows: coordinates and the affine constraint; columns: chosen points
    let mut a: Vec<Vec<BigRational>> = (0..dim).map(|i| s.iter().map(|&j| rat(pts[j][i])).collect()).collect();
    a.push(vec![BigRational::one(); s.len()]);
    if rank(&transpose(&a)) < s.len() {
        return false;
    }
    let mut b: Vec<BigRational> = p.iter().map(|&x| rat(x)).collect();
    b.push(BigRational::one());
    match solve(&a, &b) {
        Some(x) => x.iter().all(|t| !t.is_negative()) && x.iter().any(|t| !t.is_zero()),
        None => false,
    }
}

fn transpose(a: &[Vec<BigRational>]) -> Vec<Vec<BigRational>> {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Vertices of the convex hull, in input order.
pub fn hull_vertices(pts: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut uniq: Vec<Vec<i64>> = Vec::new();
    for p in pts {
        if !uniq.contains(p) {
            uniq.push(p.clone());
        }
    }
    uniq.iter()
        .enumerate()
        .filter(|(i, p)| {
            let others: Vec<Vec<i64>> =
                uniq.iter().enumerate().filter(|(j, _)| j != i).map(|(_, q)| q.clone()).collect();
            !in_hull(p, &others)
        })
        .map(|(_, p)| p.clone())
        .collect()
}

/// The two point sets have the same convex hull.
pub fn same_hull(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
    let mut va = hull_vertices(a);
    let mut vb = hull_vertices(b);
    va.sort();
    vb.sort();
    va == vb
}
