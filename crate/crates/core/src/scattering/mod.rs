//! Order-truncated scattering diagrams with wall functions in one variable.

mod chamber;
mod diagram;
mod series;

pub use chamber::{locate, reachable_chambers, Chamber};
pub use diagram::{Automorphism, Crossing, ScatteringDiagram, Shape, Wall};
pub use series::{SeriesElement, WallFunction};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::expansion::{ExchangeGraph, Expander};
    use crate::ring::LatticeVec;
    use num_bigint::BigInt;

    #[test]
    fn a2_completion() {
        let seed = catalog::a2().classical();
        let inc = ScatteringDiagram::incoming(&seed, 4).unwrap();
        assert!(!inc.loop_product(2).unwrap().is_identity());
        let d = ScatteringDiagram::complete(&seed, 8).unwrap();
        let out: Vec<&Wall> = d.outgoing().collect();
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].normal, LatticeVec(vec![1, 1]));
        assert_eq!(out[0].func, WallFunction::binomial());
    }

    #[test]
    fn kronecker_completion() {
        let seed = catalog::kronecker().classical();
        let mut counts = Vec::new();
        for k in 1..=5 {
            let d = ScatteringDiagram::complete(&seed, k).unwrap();
            assert!(d.loop_product(k).unwrap().is_identity());
            counts.push(d.outgoing().count());
        }
        assert_eq!(counts[0], 0);
        assert!(counts[4] > counts[1]);
    }

    #[test]
    fn wall_cross_and_back() {
        let seed = catalog::a2().classical();
        let d = ScatteringDiagram::incoming(&seed, 5).unwrap();
        let x = SeriesElement::monomial(LatticeVec(vec![1, 0]), 2);
        let y = d.cross(&x, &d.walls()[0], 1, 5);
        assert_eq!(y.coeff(&LatticeVec(vec![1, 0])), BigInt::from(1));
        let back = d.cross(&y, &d.walls()[0], -1, 5);
        assert_eq!(back, x);
    }

    #[test]
    fn a2_chambers() {
        let ex = Expander::new(catalog::a2()).unwrap();
        let g = ExchangeGraph::explore(&ex, 10).unwrap();
        let ch = reachable_chambers(&ex, &g).unwrap();
        assert_eq!(ch.len(), 5);
        assert!(ch[0].contains_interior(&[1, 1]));
        for a in -4i64..=4 {
            for b in -4i64..=4 {
                assert!(locate(&ch, &[a, b]).is_some());
            }
        }
        for &(a, b, _) in &g.edges {
            assert!(ch[a].shared_facet(&ch[b]).is_some());
        }
    }
}
