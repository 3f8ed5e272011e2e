use cobarlie::bar::{BarComplex, CDGAlgebra, Chain};
use cobarlie::fincat::{self, DMorphism, SetMap};
use cobarlie::freelie::{self, GradedGenerators, TensorElement};
use cobarlie::homalg::QMatrix;
use cobarlie::rational::{neg_one_pow, q};
use cobarlie::Q;
use num_traits::Zero;
use proptest::prelude::*;

fn permutation(n: usize) -> impl Strategy<Value = SetMap> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(move |v| SetMap::new(n, &v).unwrap())
}

fn word(len: usize, letters: u16) -> impl Strategy<Value = Vec<u16>> {
    proptest::collection::vec(0..letters, len)
}

fn gens() -> GradedGenerators {
    GradedGenerators::new(&["a", "b", "c"], &[1, 2, 3]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realization_is_contravariant((a, b, w) in (2usize..6).prop_flat_map(|n| (permutation(n), permutation(n), word(n, 3)))) {
        let g = gens();
        let t = TensorElement::word(&w);
        let ab = DMorphism::from_map(a.compose(&b).unwrap());
        let lhs = fincat::realize(&ab, &g, &t).unwrap();
        let inner = fincat::realize(&DMorphism::from_map(a), &g, &t).unwrap();
        let rhs = fincat::realize(&DMorphism::from_map(b), &g, &inner).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn w_is_a_quasi_idempotent_on_words(w in (1usize..6).prop_flat_map(|n| word(n, 3))) {
        let g = gens();
        let n = w.len();
        let wn = fincat::w_element(n).unwrap();
        let once = freelie::right_action(&wn, &g, &TensorElement::word(&w)).unwrap();
        let twice = freelie::right_action(&wn, &g, &once).unwrap();
        prop_assert_eq!(twice, once.scale(&q(n as i64)));
        prop_assert!(freelie::in_lie(&g, &once).unwrap());
    }

    #[test]
    fn shuffle_is_graded_commutative_and_associative(
        u in proptest::collection::vec(0usize..3, 1..3),
        v in proptest::collection::vec(0usize..3, 1..3),
        x in proptest::collection::vec(0usize..3, 1..2),
    ) {
        let a = CDGAlgebra::wedge(&CDGAlgebra::builtin("H(S2vS3)").unwrap(), &CDGAlgebra::sphere(4).unwrap()).unwrap();
        let b = BarComplex::new(&a, 5).unwrap();
        let sign = q(neg_one_pow(b.total_degree(&u) * b.total_degree(&v)));
        let uv = b.shuffle(&u, &v);
        let vu: Chain = b.shuffle(&v, &u).into_iter().map(|(k, c)| (k, c * &sign)).collect();
        prop_assert_eq!(&uv, &vu);
        let left = b.apply(&uv, |w| b.shuffle(w, &x));
        let vx = b.shuffle(&v, &x);
        let right = b.apply(&vx, |w| b.shuffle(&u, w));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn rank_nullity(entries in proptest::collection::vec(-2i64..3, 12)) {
        let rows: Vec<Vec<Q>> = entries.chunks(4).map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        let m = QMatrix::from_rows(&rows);
        let ker = m.kernel();
        prop_assert_eq!(m.rank() + ker.len(), 4);
        for k in &ker {
            prop_assert!(m.apply(k).iter().all(|(_, c)| c.is_zero()));
        }
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }
}
