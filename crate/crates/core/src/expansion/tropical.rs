use crate::error::Result;
use crate::ring::LatticeVec;
use crate::seed::Seed;

/// Tropical change of coordinates from `t` to `mu_k t`, with `b` read in `t`.
pub fn tropical_mutation(seed: &Seed, k: usize, m: &[i64]) -> LatticeVec {
    let mk = m[k];
    LatticeVec(
        (0..m.len())
            .map(|i| {
                if i == k {
                    return -mk;
                }
                let b = seed.b(i, k);
                if b >= 0 {
                    m[i] + b * mk.max(0)
                } else {
                    m[i] + b * (-mk).max(0)
                }
            })
            .collect(),
    )
}

/// Composite along a word starting at `seed`.
pub fn tropical_word(seed: &Seed, word: &[usize], m: &[i64]) -> Result<LatticeVec> {
    let mut s = seed.clone();
    let mut v = LatticeVec(m.to_vec());
    for &k in word {
        v = tropical_mutation(&s, k, &v);
        s = s.mutate(k)?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_seed() {
        let s = Seed::from_int(vec![vec![0, -1], vec![1, 0]], vec![0], vec![1, 1], None).unwrap();
        assert_eq!(tropical_mutation(&s, 0, &[-1, 0]), LatticeVec(vec![1, 0]));
        assert_eq!(tropical_mutation(&s, 0, &[0, 3]), LatticeVec(vec![0, 3]));
    }
}
