mod common;

use std::collections::BTreeMap;

use cobarlie::dgl::CobarAlgebra;
use cobarlie::fincat;
use cobarlie::homalg::{lemma_pq, BigradedComplex, ChainComplex, FilteredComplex, QMatrix};
use cobarlie::simplicial::SimplicialSpace;
use cobarlie::Error;
use common::{cellular_product, power, skeletal, tables, ShuffleMap};

/// The truncated cobar complex assembled generically from its columns and
/// the maps induced by `f_n` agrees with the direct construction.
#[test]
fn bigraded_total_complex_matches_cobar_algebra() {
    for (expr, n_max, q_max) in [("S2", 3, 6), ("S3", 2, 7), ("S2vS2", 2, 5)] {
        let space = SimplicialSpace::parse_expression(expr).unwrap();
        let t = tables(expr, q_max);
        let cols: Vec<_> = (1..=n_max).map(|n| power(&t, n)).collect();
        let mut columns = BTreeMap::new();
        let mut external = BTreeMap::new();
        for n in 1..=n_max {
            columns.insert(n as i64, cols[n - 1].to_chain_complex());
            if n < n_max {
                let f = fincat::cobar_differential(n).unwrap();
                for q in 0..=q_max {
                    let m = cols[n - 1].induced_q(&f, &cols[n], q).unwrap();
                    external.insert((n as i64, q as i64), m);
                }
            }
        }
        let total = BigradedComplex::new(columns, external).unwrap().total_complex().unwrap();
        let r = CobarAlgebra::build(&space, n_max, q_max, None).unwrap();
        let (lo, hi) = r.degree_range();
        let direct = r.homology_ranks(lo, hi);
        for (d, rank) in total.betti() {
            assert_eq!(direct.get(&d).copied().unwrap_or(0), rank, "{expr} t={d}");
        }
    }
}

/// In the stable range the homology of the truncated cobar complex of S² is
/// that of the loop space: one class in each degree.
#[test]
fn loop_space_homology_of_s2() {
    let r = CobarAlgebra::build(&SimplicialSpace::sphere(2).unwrap(), 3, 7, None).unwrap();
    let h = r.homology_ranks(0, 3);
    assert_eq!((h[&1], h[&2], h[&3]), (1, 1, 1));
}

#[test]
fn shuffle_map_on_mixed_wedge_is_quasi_iso() {
    let t = tables("S2vS3", 6);
    let c: Vec<_> = (0..=2).map(|n| power(&t, n)).collect();
    assert!(ShuffleMap::new(&c[1], &c[1], &c[2]).is_quasi_iso_through(5));
}

#[test]
fn lemma_on_products_and_wedges() {
    let dim = |part: &str| -> i64 {
        part.find('e').map_or(0, |i| {
            part[i + 1..].chars().take_while(char::is_ascii_digit).collect::<String>().parse().unwrap()
        })
    };
    for expr in ["S2xS2", "S2xS3", "S3xS3"] {
        let space = SimplicialSpace::parse_expression(expr).unwrap();
        let f = cellular_product(&space, &dim);
        let l = lemma_pq(&f).unwrap();
        assert!(l.all_hold(), "{expr}");
        // P/Q is the cellular complex: one cell per product of sphere cells
        let dims: Vec<usize> = l.quotient.degrees().map(|d| l.quotient.dim(d)).collect();
        let betti: Vec<usize> = space.normalized_chains(space.max_dim()).betti().into_iter().map(|e| e.1).collect();
        assert_eq!(dims, betti, "{expr}");
    }
    let wedge = SimplicialSpace::parse_expression("S2vS3").unwrap();
    assert!(lemma_pq(&skeletal(&wedge)).unwrap().all_hold());
}

#[test]
fn lemma_refuses_unconcentrated_filtrations() {
    // everything at level 0: H_2(gr_0) ≠ 0
    let c = SimplicialSpace::sphere(2).unwrap().normalized_chains(2);
    let levels = c.degrees().map(|d| vec![0; c.dim(d)]).collect();
    let f = FilteredComplex::new(c, levels).unwrap();
    assert!(matches!(lemma_pq(&f), Err(Error::HypothesisFailed(m)) if m.contains("(0, 2)")));
}

#[test]
fn lemma_with_nontrivial_differential() {
    // A: a₀, b₀ in degree 0; e₁ in degree 1 with ∂e = b − a; levels 0, 0, 1.
    // gr_0 = two points, so H_0(gr_0) = 2 and gr_1 = e in degree 1.
    let bound = QMatrix::from_rows(&[vec![cobarlie::rational::q(-1)], vec![cobarlie::rational::q(1)]]);
    let a = ChainComplex::new(0, vec![QMatrix::zeros(0, 2), bound]).unwrap();
    let f = FilteredComplex::new(a, vec![vec![0, 0], vec![1]]).unwrap();
    let l = lemma_pq(&f).unwrap();
    assert!(l.all_hold());
    assert_eq!((l.quotient.dim(0), l.quotient.dim(1)), (2, 1));
    assert_eq!(l.quotient.betti(), vec![(0, 1), (1, 0)]);
}
