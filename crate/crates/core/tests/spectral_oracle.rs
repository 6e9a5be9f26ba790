//! The in-crate eigensolver checked against nalgebra on random Laplacians.

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

use risnet::graph::{algebraic_connectivity, laplacian, rank_one_add, spectrum, Graph};
use risnet::linalg::SymmetricEigen as OwnEigen;
use risnet::optimize::secular_lambda2;

fn graph_from(n: usize, mask: &[(bool, f64)]) -> Graph<f64> {
    let mut edges = Vec::new();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            let (on, w) = mask[k];
            if on {
                edges.push((i, j, w));
            }
            k += 1;
        }
    }
    Graph::uavs_only(n, edges).unwrap()
}

fn oracle_values(g: &Graph<f64>) -> Vec<f64> {
    let l = laplacian(g);
    let n = l.dim();
    let m = DMatrix::from_fn(n, n, |i, j| l.matrix()[(i, j)]);
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

fn random_graph() -> impl Strategy<Value = Graph<f64>> {
    (2usize..=20).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec((prop::bool::weighted(0.35), 0.05f64..5.0), pairs)
            .prop_map(move |mask| graph_from(n, &mask))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn eigenvalues_match_nalgebra(g in random_graph()) {
        let s = spectrum(&laplacian(&g)).unwrap();
        let want = oracle_values(&g);
        let scale = want.last().unwrap().abs().max(1.0);
        for (a, b) in s.eigenvalues.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn fiedler_pair_is_an_eigenpair(g in random_graph()) {
        let l = laplacian(&g);
        let s = spectrum(&l).unwrap();
        let lv = l.matrix().mul_vec(&s.fiedler_vector);
        let res: f64 = lv.iter().zip(&s.fiedler_vector).map(|(a, b)| (a - s.fiedler_value * b).powi(2)).sum::<f64>().sqrt();
        prop_assert!(res < 1e-8);
        let norm: f64 = s.fiedler_vector.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assert!((norm - 1.0).abs() < 1e-10);
        let first = s.fiedler_vector.iter().find(|x| x.abs() > 1e-12).copied().unwrap_or(1.0);
        prop_assert!(first > 0.0);
        let sum: f64 = s.fiedler_vector.iter().sum();
        prop_assert!(sum.abs() < 1e-8, "Fiedler vector not orthogonal to ones: {sum}");
    }

    #[test]
    fn connectivity_matches_components(g in random_graph()) {
        let l2 = algebraic_connectivity(&laplacian(&g)).unwrap();
        prop_assert_eq!(l2 > 1e-9, g.component_count() == 1);
    }

    #[test]
    fn secular_root_matches_nalgebra(g in random_graph(), i in 0usize..20, j in 0usize..20, w in 0.05f64..4.0) {
        let n = g.n_nodes();
        let (i, j) = (i % n, j % n);
        prop_assume!(i != j && n >= 3);
        let l = laplacian(&g);
        let s = spectrum(&l).unwrap();
        prop_assume!(s.gap() > 1e-6 * s.largest().max(1.0));
        let root = secular_lambda2(&s, w, i, j).unwrap();
        let after = rank_one_add(&l, i, j, w).unwrap();
        let m = DMatrix::from_fn(n, n, |a, b| after.matrix()[(a, b)]);
        let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        prop_assert!((root - v[1]).abs() < 1e-8, "{root} vs {}", v[1]);
    }
}

#[test]
fn own_solver_handles_general_symmetric_matrices() {
    let rows = vec![
        vec![4.0, 1.0, -2.0, 0.5],
        vec![1.0, -3.0, 0.0, 2.0],
        vec![-2.0, 0.0, 1.0, -1.0],
        vec![0.5, 2.0, -1.0, 6.0],
    ];
    let own = OwnEigen::values_only(&risnet::linalg::DenseMatrix::from_rows(&rows).unwrap()).unwrap();
    let m = DMatrix::from_fn(4, 4, |i, j| rows[i][j]);
    let mut want: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (a, b) in own.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }
}

#[test]
fn single_precision_tracks_double() {
    let edges = [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 0, 1.5), (1, 3, 1.0), (3, 4, 2.5)];
    let g64 = Graph::<f64>::uavs_only(5, edges).unwrap();
    let g32 = Graph::<f32>::uavs_only(5, edges.map(|(i, j, w)| (i, j, w as f32))).unwrap();
    let s64 = spectrum(&laplacian(&g64)).unwrap();
    let s32 = spectrum(&laplacian(&g32)).unwrap();
    for (a, b) in s32.eigenvalues.iter().zip(&s64.eigenvalues) {
        assert!((f64::from(*a) - b).abs() < 1e-4);
    }
    for (a, b) in s32.fiedler_vector.iter().zip(&s64.fiedler_vector) {
        assert!((f64::from(*a) - b).abs() < 1e-3);
    }
}
