use curvlab::constructions::build_counterexample;
use curvlab::curvature::*;
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const PAIRS: [(usize, usize); 5] = [(6, 2), (6, 3), (7, 2), (7, 3), (7, 4)];

fn max_diff(a: &RiemannData, b: &RiemannData) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn fd_matches_exact_on_every_example() {
    for (n, m) in PAIRS {
        let metric = build_counterexample(n, m, 1.0, 0.5).unwrap();
        let chart = metric.to_chart();
        for i in 0..20 {
            let r = -9.5 + 19.0 * i as f64 / 19.0;
            let exact = riemann_exact(&metric, r).unwrap();
            let fd = riemann_fd(&chart, &metric.chart_point(r), 1e-3).unwrap();
            let tol = 1e-5_f64.max(1e-5 * exact.scale());
            let diff = max_diff(&exact, &fd);
            assert!(diff <= tol, "({n},{m}) r={r}: {diff} > {tol}");
        }
    }
}

#[test]
fn hand_values_six_two() {
    // u = exp(r^2/2), f = exp(-r^2/4)
    let metric = build_counterexample(6, 2, 1.0, 0.3).unwrap();
    let b = metric.blocks();
    let (k, t) = (b.radial_index(), b.torus_index(0));
    let r = 0.5;
    let rd = riemann_exact(&metric, r).unwrap();
    assert!((rd.sectional(0, k) - (0.5 - r * r / 4.0)).abs() < 1e-12);
    // one torus direction for m = 2: torus-torus block is empty, torus-r is
    // -(2/m) u''/u - (2/m)(2/m - 1)(u'/u)^2 = -(1 + r^2)
    assert!((rd.sectional(t, k) + (1.0 + r * r)).abs() < 1e-12);
    let rd0 = riemann_exact(&metric, 0.0).unwrap();
    assert!((rd0.ricci(k, k) - 1.0).abs() < 1e-12);
}

#[test]
fn torus_torus_hand_value() {
    // m = 3 has two torus directions: -(4/m^2)(u'/u)^2.
    let metric = build_counterexample(7, 3, 1.0, 0.3).unwrap();
    let b = metric.blocks();
    let r = 0.7;
    let u = metric.profile().u(r);
    let expect = -(4.0 / 9.0) * (u.d1 / u.value).powi(2);
    let rd = riemann_exact(&metric, r).unwrap();
    assert!((rd.sectional(b.torus_index(0), b.torus_index(1)) - expect).abs() < 1e-12);
}

#[test]
fn chart_examples() {
    let s2 = CoordinateMetric::new(
        2,
        vec![(0.1, 3.0), (-10.0, 10.0)],
        std::sync::Arc::new(|x: &[f64]| {
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, x[0].sin().powi(2)]))
        }),
    );
    let rd = riemann_fd(&s2, &[1.0, 0.0], 1e-3).unwrap();
    assert!((rd.sectional(0, 1) - 1.0).abs() < 1e-6);

    let flat = CoordinateMetric::constant(DMatrix::identity(3, 3), vec![(-1.0, 1.0); 3]);
    let rd = riemann_fd(&flat, &[0.0; 3], 1e-3).unwrap();
    assert!(rd.components().iter().all(|c| c.abs() < 1e-10));
}

#[test]
fn round_sphere_contractions() {
    for n in 2..=7 {
        let rd = RiemannData::constant_curvature(n, 1.0);
        let (ricci, scalar) = ricci_scalar(&rd);
        for a in 0..n {
            for b in 0..n {
                let want = if a == b { (n - 1) as f64 } else { 0.0 };
                assert!((ricci[a * n + b] - want).abs() < 1e-12);
            }
        }
        assert!((scalar - (n * (n - 1)) as f64).abs() < 1e-12);
    }
}

#[test]
fn exact_tensors_satisfy_symmetries() {
    for (n, m) in PAIRS {
        for eps in [0.01, 0.5, 3.0] {
            let metric = build_counterexample(n, m, 1.0, eps).unwrap();
            for i in 0..41 {
                let r = -10.0 + 0.5 * i as f64;
                let rd = riemann_exact(&metric, r).unwrap();
                let d = rd.symmetry_defects();
                let tol = 1e-9 * d.scale.max(1.0);
                assert!(
                    d.antisymmetry <= tol && d.pair_symmetry <= tol && d.bianchi <= tol,
                    "{d:?}"
                );
                assert!(d.contraction <= 1e-9 * d.scale.max(1.0) * n as f64);
            }
        }
    }
}

#[test]
fn random_tensors_satisfy_symmetries() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        let rd = random_curvature(3 + i % 5, 3, &mut rng);
        assert!(rd.satisfies_symmetries(1e-12));
    }
}

#[test]
fn json_round_trip() {
    let metric = build_counterexample(7, 3, 2.0, 0.25).unwrap();
    let back = WarpedTorusMetric::from_json(&metric.to_json()).unwrap();
    assert_eq!(back.to_json(), metric.to_json());
    let v: serde_json::Value = serde_json::from_str(&metric.to_json()).unwrap();
    for key in ["n", "m", "epsilon", "profile", "r_domain"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for key in ["case", "lambda", "params"] {
        assert!(v["profile"].get(key).is_some(), "{key}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn scaling_divides_sectionals(idx in 0usize..5, r in -3.0f64..3.0) {
        let (n, m) = PAIRS[idx];
        let metric = build_counterexample(n, m, 1.0, 0.5).unwrap();
        let chart = metric.to_chart();
        let x = metric.chart_point(r);
        let a = riemann_fd(&chart, &x, 1e-3).unwrap();
        let b = riemann_fd(&chart.scaled(2.0), &x, 1e-3).unwrap();
        prop_assert!(max_diff(&b, &a.scaled_metric(2.0)) <= 1e-8 * a.scale().max(1.0));
        for p in 0..n {
            for q in (p + 1)..n {
                let want = a.sectional(p, q) / 4.0;
                prop_assert!((b.sectional(p, q) - want).abs() <= 1e-8 * a.scale().max(1.0));
            }
        }
    }

    #[test]
    fn exact_fd_agree_at_random_points(idx in 0usize..5, r in -6.0f64..6.0, eps in 0.1f64..2.0) {
        let (n, m) = PAIRS[idx];
        let metric = build_counterexample(n, m, 1.0, eps).unwrap();
        let exact = riemann_exact(&metric, r).unwrap();
        let fd = riemann_fd(&metric.to_chart(), &metric.chart_point(r), 1e-3).unwrap();
        prop_assert!(max_diff(&exact, &fd) <= 1e-5_f64.max(1e-5 * exact.scale()));
    }
}
