use curvlab::constructions::*;
use curvlab::curvature::riemann_exact;
use curvlab::curvature::{Jet, ProfileCase};
use curvlab::frame::{cm_of_frame, Frame};
use curvlab::Rational;

const PAIRS: [(usize, usize); 5] = [(6, 2), (6, 3), (7, 2), (7, 3), (7, 4)];
const LAMBDAS: [f64; 3] = [0.5, 1.0, 2.0];

/// Closed-form `(u, f)` values written out directly from the two branches.
fn closed_form(n: usize, m: usize, lambda: f64) -> impl Fn(f64) -> (f64, f64) {
    let (nf, mf) = (n as f64, m as f64);
    let s = nf - mf;
    let c3 = -2.0 / (s - 2.0);
    let c4 = (s - 2.0 * mf / (mf - 1.0)) / ((s - 2.0) * (s - 2.0));
    move |r: f64| {
        if c4.abs() < 1e-15 {
            (
                (mf * lambda * r * r / ((2.0 * mf - 2.0) * (s - 2.0))).exp(),
                (-lambda * r * r / (2.0 * (s - 2.0))).exp(),
            )
        } else {
            let c = ((c4 * lambda).sqrt() * r).cosh();
            (
                c.powf(-mf * c3 / ((2.0 * mf - 2.0) * c4)),
                c.powf((c3 - 1.0) / (s * c4)),
            )
        }
    }
}

/// The ODE residual from central differences of plain function values,
/// with the size of its largest term.
fn fd_residual(
    n: usize,
    m: usize,
    lambda: f64,
    uf: &impl Fn(f64) -> (f64, f64),
    r: f64,
) -> (f64, f64) {
    let h = 1e-4;
    let ((um, fm), (u0, f0), (up, fp)) = (uf(r - h), uf(r), uf(r + h));
    let (u1, f1) = ((up - um) / (2.0 * h), (fp - fm) / (2.0 * h));
    let (u2, f2) = (
        (up - 2.0 * u0 + um) / (h * h),
        (fp - 2.0 * f0 + fm) / (h * h),
    );
    let (k, s) = ((2.0 * m as f64 - 2.0) / m as f64, (n - m) as f64);
    let terms = [
        k * u2 / u0,
        k * s * (f1 / f0) * (u1 / u0),
        s * f2 / f0,
        lambda,
    ];
    (
        terms.iter().sum(),
        terms.iter().fold(0.0, |a, t| a.max(t.abs())),
    )
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

#[test]
fn profile_examples() {
    let s = solve_profile(6, 2, 1.0).unwrap();
    assert_eq!(s.case, ProfileCase::Equality);
    for r in [-1.5, 0.0, 0.5, 2.0] {
        assert!((s.profile.u(r).value - (r * r / 2.0).exp()).abs() < 1e-12 * (r * r / 2.0).exp());
        assert!((s.profile.f(r).value - (-r * r / 4.0).exp()).abs() < 1e-12);
    }

    let s = solve_profile(7, 2, 1.0).unwrap();
    assert_eq!(s.case, ProfileCase::Strict);
    assert_eq!((s.c3, s.c4), (Rational::new(-2, 3), Rational::new(1, 9)));
    for r in [-2.0_f64, 0.3, 4.0] {
        let want = (r / 3.0).cosh().powi(-3);
        assert!((s.profile.f(r).value - want).abs() < 1e-12);
    }

    let s = solve_profile(7, 4, 1.0).unwrap();
    assert_eq!(s.case, ProfileCase::Strict);
    assert_eq!(
        (s.c3, s.c4),
        (Rational::from_integer(-2), Rational::new(1, 3))
    );

    assert!(matches!(
        solve_profile(6, 4, 1.0),
        Err(ConstructionError::Unsupported(_))
    ));
    assert!(matches!(
        solve_profile(5, 2, 1.0),
        Err(ConstructionError::Unsupported(_))
    ));
}

#[test]
fn profiles_match_closed_forms() {
    for (n, m) in PAIRS {
        for lambda in LAMBDAS {
            let s = solve_profile(n, m, lambda).unwrap();
            let uf = closed_form(n, m, lambda);
            for r in grid(-5.0, 5.0, 41) {
                let (u, f) = uf(r);
                assert!(
                    (s.profile.u(r).value - u).abs() <= 1e-12 * u,
                    "({n},{m},{lambda}) r={r}"
                );
                assert!((s.profile.f(r).value - f).abs() <= 1e-12 * f.max(1e-300));
            }
        }
    }
}

#[test]
fn ode_residual_vanishes() {
    let s = solve_profile(6, 2, 1.0).unwrap();
    assert!(ode_residual(6, 2, 1.0, &s, 0.5).abs() < 1e-12);
    for (n, m) in PAIRS {
        for lambda in LAMBDAS {
            let s = solve_profile(n, m, lambda).unwrap();
            let worst = grid(-5.0, 5.0, 101)
                .into_iter()
                .map(|r| ode_residual(n, m, lambda, &s, r).abs())
                .fold(0.0, f64::max);
            assert!(worst < 1e-9, "({n},{m},{lambda}): {worst}");
        }
    }
}

#[test]
fn finite_difference_oracle_agrees() {
    for (n, m) in PAIRS {
        for lambda in LAMBDAS {
            let uf = closed_form(n, m, lambda);
            for r in grid(-3.0, 3.0, 13) {
                let (res, size) = fd_residual(n, m, lambda, &uf, r);
                assert!(res.abs() < 1e-6 * size, "({n},{m},{lambda}) r={r}: {res}");
            }
        }
    }
}

struct Perturbed(ProfileSolution);

impl RadialFunctions for Perturbed {
    fn u(&self, r: f64) -> Jet {
        self.0
            .profile
            .u(r)
            .mul(&Jet::new(1.0 + 0.01 * r * r, 0.02 * r, 0.02))
    }

    fn f(&self, r: f64) -> Jet {
        self.0.profile.f(r)
    }
}

#[test]
fn perturbed_profile_is_caught() {
    for (n, m) in PAIRS {
        let p = Perturbed(solve_profile(n, m, 1.0).unwrap());
        assert!(ode_residual(n, m, 1.0, &p, 1.0).abs() > 1e-3, "({n},{m})");
    }
}

#[test]
fn chains() {
    let c = build_chain(7, 3).unwrap();
    assert_eq!(
        c.k_sequence,
        vec![
            Rational::new(4, 3),
            Rational::from_integer(1),
            Rational::from_integer(0)
        ]
    );
    assert_eq!(
        c.function_exponents,
        vec![
            Rational::from_integer(1),
            Rational::new(2, 3),
            Rational::new(1, 3)
        ]
    );
    assert_eq!(c.fiber_exponent, Rational::new(4, 3));
    assert!(c.holds());

    let c = build_chain(6, 2).unwrap();
    assert_eq!(
        c.k_sequence,
        vec![Rational::from_integer(1), Rational::from_integer(0)]
    );
    // fiber coefficient u^2
    assert_eq!(c.fiber_exponent, Rational::from_integer(2));

    for n in 3..=12 {
        for m in 1..n {
            let c = build_chain(n, m).unwrap();
            assert_eq!(*c.k_sequence.last().unwrap(), Rational::from_integer(0));
            assert!(c.holds(), "({n},{m})");
        }
    }
    assert!(build_chain(5, 1).unwrap().is_empty());
}

#[test]
fn lift_identities() {
    for (n, m) in [(7, 3), (7, 4)] {
        let sol = solve_profile(n, m, 1.0).unwrap();
        for j in 0..m - 1 {
            for r in [-1.5, -0.4, 0.0, 0.7, 2.0] {
                let ric = lift_ricci_check(&sol, 0.5, j, r, 1e-3).unwrap();
                assert!(ric.residual.abs() < 1e-5, "{ric:?}");
                let lap = lift_laplacian_check(&sol, 0.5, j, r, 1e-3).unwrap();
                assert!(lap.residual.abs() < 1e-9, "{lap:?}");
            }
        }
    }
}

#[test]
fn counterexample_examples() {
    let g = build_counterexample(6, 2, 1.0, 0.1).unwrap();
    let b = g.blocks();
    let chart = g.to_chart();
    for r in [0.0, 0.8, -1.3] {
        let metric = chart.eval(&g.chart_point(r));
        let t = b.torus_index(0);
        assert!((metric[(t, t)] - (r * r).exp()).abs() < 1e-12 * (r * r).exp());
    }

    let g = build_counterexample(7, 4, 1.0, 0.2).unwrap();
    let b = g.blocks();
    assert_eq!(g.coordinate_frame_indices().len(), 4);
    let r = 0.9;
    let metric = g.to_chart().eval(&g.chart_point(r));
    for i in 0..3 {
        let t = b.torus_index(i);
        assert!((metric[(t, t)] - g.profile().u(r).value).abs() < 1e-12);
    }

    assert!(build_counterexample(6, 3, 1.0, 0.1).is_ok());
    assert!(build_counterexample(6, 4, 1.0, 0.1).is_err());
}

#[test]
fn coordinate_frame_equals_lambda() {
    for (n, m) in PAIRS {
        for lambda in LAMBDAS {
            let g = build_counterexample(n, m, lambda, 0.3).unwrap();
            let f = Frame::coordinate(n, &g.coordinate_frame_indices()).unwrap();
            for r in grid(-10.0, 10.0, 41) {
                let v = cm_of_frame(&riemann_exact(&g, r).unwrap(), &f).unwrap();
                assert!(
                    (v - lambda).abs() < 1e-9 * lambda.max(1.0),
                    "({n},{m},{lambda}) r={r}: {v}"
                );
            }
        }
    }
}

#[test]
fn positivity_verdicts() {
    let g = build_counterexample_on(6, 2, 1.0, 0.05, 6.0).unwrap();
    let rep = verify_uniform_positivity(&g, 1.0, &uniform_grid(6.0, 121), 1500, 7).unwrap();
    assert!(rep.pass, "{:?}", rep.worst);
    assert!(rep.worst.value >= 1.0 - 1e-6);
    assert!(rep.coordinate_frame_error() < 1e-9);

    let g = build_counterexample_on(6, 2, 1.0, 10.0, 6.0).unwrap();
    let rep = verify_uniform_positivity(&g, 1.0, &uniform_grid(6.0, 31), 1500, 7).unwrap();
    assert!(!rep.pass);
    assert!(rep.worst.value < 1.0);
    assert!(rep.coordinate_frame_error() < 1e-9);
}

#[test]
fn epsilon_search_small_budget() {
    let grid = GridSpec {
        r_max: 6.0,
        points: 25,
    };
    for (n, m) in [(6, 2), (7, 4)] {
        let s = search_epsilon(n, m, 1.0, grid, 800, 3).unwrap();
        assert!(s.epsilon_star > 0.0 && s.epsilon_star <= 1.0);
        assert!(s.report.pass);
        assert_eq!(s.tried.last(), Some(&(s.epsilon_star, true)));
        assert!((s.tightness.epsilon - 2.0 * s.epsilon_star).abs() < 1e-15);
    }
    assert!(search_epsilon(6, 4, 1.0, grid, 800, 3).is_err());
}
