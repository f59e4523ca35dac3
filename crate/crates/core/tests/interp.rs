use std::f64::consts::TAU;

use circle_nbody::interp::{NodeSet, SeedBasis};
use num_complex::Complex64;
use proptest::prelude::*;

fn node_sets(max_n: usize) -> impl Strategy<Value = NodeSet> {
    (1..=max_n)
        .prop_flat_map(|n| prop::collection::vec(-3.2..3.2f64, n))
        .prop_filter_map("nodes too close", |v| {
            let ok = (0..v.len()).all(|a| (a + 1..v.len()).all(|b| (v[a] - v[b]).sin().abs() > 1e-2));
            ok.then(|| NodeSet::new(v).unwrap())
        })
}

fn coefficients(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

proptest! {
    #[test]
    fn seeds_are_two_pi_periodic(n in 1usize..9, t in -10.0..10.0f64) {
        let b = SeedBasis::new(n);
        for k in 0..n {
            prop_assert!((b.eval(k, t + TAU) - b.eval(k, t)).norm() < 1e-12);
        }
        let exps: Vec<i64> = (0..n).map(|k| b.exponent(k)).collect();
        let mirrored: Vec<i64> = exps.iter().rev().map(|e| -e).collect();
        prop_assert_eq!(exps, mirrored);
    }

    #[test]
    fn kronecker(nodes in node_sets(10)) {
        for n in 0..nodes.len() {
            for m in 0..nodes.len() {
                let want = if n == m { 1.0 } else { 0.0 };
                prop_assert!((nodes.interp_q(n, nodes.nodes()[m]) - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn interpolation_reproduces_seed_combinations(
        (nodes, h) in node_sets(8).prop_flat_map(|s| { let n = s.len(); (Just(s), coefficients(n)) }),
        t in -4.0..4.0f64,
    ) {
        let b = nodes.basis();
        let values: Vec<Complex64> = nodes.nodes().iter().map(|&x| b.combination(&h, x)).collect();
        let exact = b.combination(&h, t);
        let got = nodes.interpolate(&values, t);
        let scale = 1.0 + values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!((got - exact).norm() < 1e-9 * scale, "{} vs {}", got, exact);
    }

    #[test]
    fn real_data_interpolates_to_real(
        (nodes, h) in node_sets(7).prop_flat_map(|s| { let n = s.len(); (Just(s), coefficients(n)) }),
        t in -4.0..4.0f64,
    ) {
        let n = nodes.len();
        // Conjugation-symmetric coefficients give a real function.
        let sym: Vec<Complex64> = (0..n).map(|m| 0.5 * (h[m] + h[n - 1 - m].conj())).collect();
        let b = nodes.basis();
        let values: Vec<Complex64> = nodes.nodes().iter().map(|&x| b.combination(&sym, x)).collect();
        for v in &values {
            prop_assert!(v.im.abs() < 1e-12);
        }
        let got = nodes.interpolate(&values, t);
        prop_assert!(got.im.abs() < 1e-12 * (1.0 + got.norm()) * 1e2, "{}", got);
    }

    #[test]
    fn diff_matrix_is_exact_on_each_seed(nodes in node_sets(8)) {
        let d = nodes.diff_matrix();
        let b = nodes.basis();
        for k in 0..nodes.len() {
            let f: Vec<Complex64> = nodes.nodes().iter().map(|&x| b.eval(k, x)).collect();
            let df = d.apply(&f);
            for (x, got) in nodes.nodes().iter().zip(&df) {
                let exact = b.eval_derivative(k, *x);
                prop_assert!((got - exact).norm() < 1e-10 * (1.0 + exact.norm()) * 1e2);
            }
        }
    }

    #[test]
    fn sigma_independent_of_product_order(nodes in node_sets(8)) {
        let th = nodes.nodes();
        for n in 0..th.len() {
            let forward = nodes.sigma(n);
            let backward: f64 = (0..th.len()).rev().filter(|&l| l != n).map(|l| (th[n] - th[l]).sin()).product();
            prop_assert!((forward - backward).abs() <= 1e-14 * forward.abs().max(1e-300));
        }
    }
}
