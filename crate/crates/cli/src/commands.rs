//! Subcommand bodies. Each returns the finished report and its CSV tables;
//! file output happens in `main`.

use curvlab::constructions::{
    build_chain, build_counterexample_on, ode_residual, search_epsilon, solve_profile,
    uniform_grid, verify_refined, ConstructionError, GridSpec, PositivityReport,
};
use curvlab::curvature::riemann_exact;
use curvlab::diameter::{
    bound_table, c0_identity_check, c0_identity_sweep, model_radius, rotational_diameter,
    sphere_torus_model, GraphResolution,
};
use curvlab::frame::{cm_min, cm_of_frame, Frame};
use curvlab::inequalities::{
    admissibility_sweep, admissible, admissible_sets, brendle_min, check_d_third_expression,
    check_recursion, chen_min_ratio, d_of, gamma_equivalence_sweep, MatrixWitness,
};
use curvlab::report::{RunConfig, VerificationReport};
use serde::Serialize;
use serde_json::json;

use crate::output::Table;

/// Exit status 2 for usage errors, 1 for anything else that stops a run.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.into())
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Runtime(e.into())
}

pub struct Run {
    pub report: VerificationReport,
    pub stem: String,
    pub tables: Vec<Table>,
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {v}")))
    }
}

fn require_admissible(n: usize, m: usize) -> Result<(), CliError> {
    let rec = admissible(n, m).map_err(usage)?;
    if !rec.admissible {
        return Err(usage(format!(
            "(n, m) = ({n}, {m}) is not admissible: m^2-mn+2n-2 = {}, m^2-mn+m+n = {}",
            rec.ineq1, rec.ineq2
        )));
    }
    Ok(())
}

/// Construction-level failures that stem from the arguments.
fn construction(e: ConstructionError) -> CliError {
    match e {
        ConstructionError::Unsupported(_) => usage(e),
        other => runtime(other),
    }
}

/// Residual tolerance relative to the size of `lambda`.
const ODE_TOL: f64 = 1e-9;

#[derive(Serialize)]
struct PositivityRow {
    role: &'static str,
    epsilon: f64,
    pass: bool,
    worst_r: f64,
    worst_value: f64,
    coordinate_min: f64,
    coordinate_max: f64,
    grid_points: usize,
    refinement_levels: usize,
}

impl PositivityRow {
    fn new(role: &'static str, r: &PositivityReport) -> Self {
        PositivityRow {
            role,
            epsilon: r.epsilon,
            pass: r.pass,
            worst_r: r.worst.r,
            worst_value: r.worst.value,
            coordinate_min: r.coordinate_frame_value_range[0],
            coordinate_max: r.coordinate_frame_value_range[1],
            grid_points: r.grid.points,
            refinement_levels: r.refinement_levels,
        }
    }
}

#[derive(Serialize)]
struct TriedRow {
    epsilon: f64,
    pass: bool,
}

pub fn verify_examples(
    cfg: &RunConfig,
    n: usize,
    m: usize,
    lambda: f64,
    epsilon: Option<f64>,
) -> Result<Run, CliError> {
    check_positive("lambda", lambda)?;
    if let Some(e) = epsilon {
        check_positive("epsilon", e)?;
    }
    build_counterexample_on(n, m, lambda, epsilon.unwrap_or(1.0), cfg.r_max)
        .map_err(construction)?;
    let sol = solve_profile(n, m, lambda).map_err(construction)?;
    let chain = build_chain(n, m).map_err(construction)?;

    let radii = uniform_grid(cfg.r_max, cfg.grid_points);
    let residual_max = radii
        .iter()
        .map(|&r| ode_residual(n, m, lambda, &sol, r).abs())
        .fold(0.0_f64, f64::max);
    let residual_ok = residual_max <= ODE_TOL * lambda.max(1.0);

    let grid = GridSpec {
        r_max: cfg.r_max,
        points: cfg.grid_points,
    };
    let (report, tightness, tried, epsilon_star) = match epsilon {
        Some(e) => {
            let metric =
                build_counterexample_on(n, m, lambda, e, cfg.r_max).map_err(construction)?;
            let rep = verify_refined(&metric, lambda, grid, cfg.frame_budget, cfg.seed)
                .map_err(construction)?;
            (rep, None, vec![], None)
        }
        None => match search_epsilon(n, m, lambda, grid, cfg.frame_budget, cfg.seed) {
            Ok(s) => (s.report, Some(s.tightness), s.tried, Some(s.epsilon_star)),
            Err(ConstructionError::SearchFailed(best)) => (*best, None, vec![], None),
            Err(e) => return Err(construction(e)),
        },
    };
    let coordinate_error = report.coordinate_frame_error();
    let coordinate_ok = coordinate_error <= 1e-9 * lambda.max(1.0);
    let pass = report.pass && coordinate_ok && residual_ok && chain.holds();

    let witnesses = json!({
        "n": n,
        "m": m,
        "lambda": lambda,
        "profile": sol,
        "ode_residual_max": residual_max,
        "lift_chain": chain,
        "epsilon_star": epsilon_star,
        "epsilon_tried": tried.iter().map(|(e, p)| json!({"epsilon": e, "pass": p})).collect::<Vec<_>>(),
        "coordinate_frame_error": coordinate_error,
        "positivity": report,
        "tightness": tightness,
    });
    let mut rows = vec![PositivityRow::new("verified", &report)];
    if let Some(t) = &tightness {
        rows.push(PositivityRow::new("tightness", t));
    }
    let tried_rows: Vec<TriedRow> = tried
        .iter()
        .map(|&(epsilon, pass)| TriedRow { epsilon, pass })
        .collect();
    Ok(Run {
        report: VerificationReport::new("verify-examples", pass, witnesses, cfg),
        stem: format!("verify-examples-n{n}-m{m}"),
        tables: vec![
            Table::from_rows("positivity", &rows)?,
            Table::from_rows("epsilon-search", &tried_rows)?,
        ],
    })
}

#[derive(Serialize)]
struct CheckRow {
    check: &'static str,
    rows: usize,
    failures: usize,
}

#[derive(Serialize)]
struct AdmissibleRow {
    n: usize,
    m: usize,
    ineq1: String,
    ineq2: String,
    admissible: bool,
}

#[derive(Serialize)]
struct DRow {
    n: usize,
    m: usize,
    first: String,
    second: String,
    third: String,
    d: String,
}

#[derive(Serialize)]
struct RecursionCsv {
    n: usize,
    m: usize,
    ell: usize,
    n_ell: usize,
    m_ell: usize,
    admissible: bool,
    d: String,
    rhs: String,
    holds: bool,
}

#[derive(Serialize)]
struct GammaRow {
    n: usize,
    m: usize,
    gamma_side: bool,
    polynomial_side: bool,
    agree: bool,
}

#[derive(Serialize)]
struct C0Row {
    n: usize,
    m: usize,
    d: usize,
    gamma: String,
    inverse_c0: String,
    rhs: String,
    holds: bool,
}

/// Admissible `m` for `n = 3..=7`, as stated for the dimension ranges.
const EXPECTED_SETS: [(usize, &[usize]); 5] = [
    (3, &[1, 2]),
    (4, &[1, 2, 3]),
    (5, &[1, 2, 3, 4]),
    (6, &[1, 4, 5]),
    (7, &[1, 5, 6]),
];

pub fn scan_algebra(cfg: &RunConfig) -> Result<Run, CliError> {
    let sweep = admissibility_sweep(3..=12);
    let sets = admissible_sets(3..=7);
    let set_failures = EXPECTED_SETS
        .iter()
        .zip(&sets)
        .filter(|((n, ms), (got_n, got))| n != got_n || *ms != got.as_slice())
        .count();

    let pairs: Vec<(usize, usize)> = sweep
        .iter()
        .filter(|r| r.admissible)
        .map(|r| (r.n, r.m))
        .collect();
    let d_table: Vec<_> = pairs
        .iter()
        .map(|&(n, m)| d_of(n, m).expect("admissible"))
        .collect();
    let third = check_d_third_expression();
    let recursion: Vec<_> = pairs
        .iter()
        .filter(|&&(n, m)| n <= 7 && m >= 2)
        .map(|&(n, m)| check_recursion(n, m).expect("admissible"))
        .collect();
    let recursion_failures = recursion.iter().filter(|r| !r.pass).count();
    let gamma = gamma_equivalence_sweep(12);
    let gamma_failures = gamma.iter().filter(|g| !g.agree()).count();
    let c0 = c0_identity_sweep(3..=7);
    let c0_failures = c0.iter().filter(|c| !c.holds).count();

    let checks = vec![
        CheckRow {
            check: "admissible-sets",
            rows: sets.len(),
            failures: set_failures,
        },
        CheckRow {
            check: "d-third-expression",
            rows: third.rows.len(),
            failures: third.failures,
        },
        CheckRow {
            check: "recursion",
            rows: recursion.len(),
            failures: recursion_failures,
        },
        CheckRow {
            check: "gamma-equivalence",
            rows: gamma.len(),
            failures: gamma_failures,
        },
        CheckRow {
            check: "c0-identity",
            rows: c0.len(),
            failures: c0_failures,
        },
    ];
    let pass = checks.iter().all(|c| c.failures == 0);

    let witnesses = json!({
        "checks": checks,
        "admissible_sets": sets,
        "admissibility": sweep,
        "d_table": d_table,
        "d_third_expression": third,
        "recursion": recursion,
        "gamma_equivalence": gamma,
        "c0_identity": c0,
    });

    let s =
        |q: &Option<curvlab::Rational>, none: &str| q.map_or(none.to_string(), |q| q.to_string());
    let tables = vec![
        Table::from_rows("checks", &checks)?,
        Table::from_rows(
            "admissibility",
            &sweep
                .iter()
                .map(|r| AdmissibleRow {
                    n: r.n,
                    m: r.m,
                    ineq1: r.ineq1.to_string(),
                    ineq2: r.ineq2.to_string(),
                    admissible: r.admissible,
                })
                .collect::<Vec<_>>(),
        )?,
        Table::from_rows(
            "d-table",
            &d_table
                .iter()
                .map(|d| DRow {
                    n: d.n,
                    m: d.m,
                    first: s(&d.candidates[0], "inf"),
                    second: s(&d.candidates[1], "inf"),
                    third: s(&d.candidates[2], "inf"),
                    d: d.value.to_string(),
                })
                .collect::<Vec<_>>(),
        )?,
        Table::from_rows(
            "recursion",
            &recursion
                .iter()
                .flat_map(|r| &r.rows)
                .map(|r| RecursionCsv {
                    n: r.n,
                    m: r.m,
                    ell: r.ell,
                    n_ell: r.n_ell,
                    m_ell: r.m_ell,
                    admissible: r.admissible,
                    d: s(&r.d, ""),
                    rhs: s(&r.rhs, "-inf"),
                    holds: r.holds,
                })
                .collect::<Vec<_>>(),
        )?,
        Table::from_rows(
            "gamma-equivalence",
            &gamma
                .iter()
                .map(|g| GammaRow {
                    n: g.n,
                    m: g.m,
                    gamma_side: g.gamma_side,
                    polynomial_side: g.polynomial_side,
                    agree: g.agree(),
                })
                .collect::<Vec<_>>(),
        )?,
        Table::from_rows(
            "c0-identity",
            &c0.iter()
                .map(|c| C0Row {
                    n: c.n,
                    m: c.m,
                    d: c.d,
                    gamma: c.gamma.to_string(),
                    inverse_c0: c.inverse_c0.to_string(),
                    rhs: c.rhs.to_string(),
                    holds: c.holds,
                })
                .collect::<Vec<_>>(),
        )?,
    ];
    Ok(Run {
        report: VerificationReport::new("scan-algebra", pass, witnesses, cfg),
        stem: "scan-algebra".into(),
        tables,
    })
}

#[derive(Serialize)]
struct WitnessRow {
    kind: &'static str,
    n: usize,
    m: usize,
    value: f64,
    h: f64,
    bound: f64,
    gap: f64,
    pass: bool,
    matrix: String,
}

impl WitnessRow {
    fn new(kind: &'static str, w: &MatrixWitness) -> Self {
        WitnessRow {
            kind,
            n: w.n,
            m: w.m,
            value: w.ratio,
            h: w.h,
            bound: w.bound,
            gap: w.gap,
            pass: w.pass,
            matrix: w.flattened(),
        }
    }
}

pub fn matrix_inequalities(
    cfg: &RunConfig,
    n: usize,
    m: usize,
    starts: usize,
) -> Result<Run, CliError> {
    require_admissible(n, m)?;
    if starts == 0 {
        return Err(usage("--starts must be positive"));
    }
    let chen = chen_min_ratio(n, m, starts, cfg.seed).map_err(runtime)?;
    let brendle = brendle_min(n, m, starts, cfg.seed).map_err(runtime)?;
    let pass = chen.pass && brendle.pass;
    let witnesses = json!({
        "d": d_of(n, m).map_err(runtime)?,
        "chen": chen,
        "brendle": brendle,
        "starts": starts,
    });
    let rows = [
        WitnessRow::new("chen", &chen),
        WitnessRow::new("brendle", &brendle),
    ];
    Ok(Run {
        report: VerificationReport::new("matrix-inequalities", pass, witnesses, cfg),
        stem: format!("matrix-inequalities-n{n}-m{m}"),
        tables: vec![Table::from_rows("witnesses", &rows)?],
    })
}

#[derive(Serialize)]
struct BoundRow {
    n: usize,
    m: usize,
    gamma: String,
    lambda: f64,
    cm_bound: f64,
    shen_ye: Option<f64>,
    antonelli_xu: Option<f64>,
    model_diameter: Option<f64>,
}

/// Agreement required between the model diameter and the bound.
const MODEL_TOL: f64 = 0.02;

pub fn diameter(
    cfg: &RunConfig,
    n: usize,
    m: usize,
    lambda: f64,
    ratio: Option<f64>,
    res: GraphResolution,
) -> Result<Run, CliError> {
    require_admissible(n, m)?;
    check_positive("lambda", lambda)?;
    if let Some(r) = ratio {
        check_positive("ratio", r)?;
    }
    let table = bound_table(n, m, lambda, ratio).map_err(usage)?;
    let identity = if m >= 2 {
        Some(c0_identity_check(n, m).map_err(runtime)?)
    } else {
        None
    };
    // The product S^3(sqrt(2/lambda)) x T^{n-3} exists for m = n - 2.
    let model = if m + 2 == n && n >= 4 {
        let rho = model_radius(lambda);
        let diam = rotational_diameter(
            |r| rho * (r / rho).sin(),
            (0.0, std::f64::consts::PI * rho),
            2,
            res,
        )
        .map_err(usage)?;
        let cm = cm_min(
            &sphere_torus_model(n, lambda).map_err(runtime)?,
            m,
            cfg.frame_budget,
            cfg.seed,
        )
        .map_err(runtime)?;
        let rel = (diam - table.cm_bound).abs() / table.cm_bound;
        Some(json!({
            "radius": rho,
            "diameter": diam,
            "relative_error": rel,
            "cm_min": cm.value,
            "agrees": rel <= MODEL_TOL,
            "resolution": res,
        }))
    } else {
        None
    };
    let pass = identity.as_ref().is_none_or(|c| c.holds)
        && model
            .as_ref()
            .is_none_or(|v| v["agrees"].as_bool() == Some(true));
    let row = BoundRow {
        n,
        m,
        gamma: table.gamma.to_string(),
        lambda,
        cm_bound: table.cm_bound,
        shen_ye: table.shen_ye,
        antonelli_xu: table.antonelli_xu,
        model_diameter: model.as_ref().and_then(|v| v["diameter"].as_f64()),
    };
    let witnesses = json!({
        "bounds": table,
        "c0_identity": identity,
        "model": model,
    });
    Ok(Run {
        report: VerificationReport::new("diameter", pass, witnesses, cfg),
        stem: format!("diameter-n{n}-m{m}"),
        tables: vec![Table::from_rows("bounds", &[row])?],
    })
}

#[derive(Serialize)]
struct CurvatureRow {
    r: f64,
    sphere_sphere: f64,
    sphere_radial: f64,
    sphere_torus: f64,
    torus_radial: f64,
    torus_torus: f64,
    ricci_sphere: f64,
    ricci_radial: f64,
    ricci_torus: f64,
    scalar: f64,
    coordinate_cm: f64,
    symmetry_defect: f64,
}

/// Relative tolerance on the algebraic curvature identities.
const SYMMETRY_TOL: f64 = 1e-12;

pub fn curvature_report(
    cfg: &RunConfig,
    n: usize,
    m: usize,
    lambda: f64,
    epsilon: f64,
) -> Result<Run, CliError> {
    check_positive("lambda", lambda)?;
    check_positive("epsilon", epsilon)?;
    let metric = build_counterexample_on(n, m, lambda, epsilon, cfg.r_max).map_err(construction)?;
    let blocks = metric.blocks();
    let coord = Frame::coordinate(n, &metric.coordinate_frame_indices()).map_err(runtime)?;
    let (k, t) = (blocks.radial_index(), blocks.torus_index(0));
    let mut rows = Vec::new();
    let mut pass = true;
    for r in uniform_grid(cfg.r_max, cfg.grid_points) {
        let rd = riemann_exact(&metric, r).map_err(runtime)?;
        let [ss, sr, st, tr, tt] = blocks.block_sectionals(r);
        let d = rd.symmetry_defects();
        let defect = d
            .antisymmetry
            .max(d.pair_symmetry)
            .max(d.bianchi)
            .max(d.contraction);
        pass &= rd.satisfies_symmetries(SYMMETRY_TOL);
        rows.push(CurvatureRow {
            r,
            sphere_sphere: ss,
            sphere_radial: sr,
            sphere_torus: st,
            torus_radial: tr,
            torus_torus: tt,
            ricci_sphere: rd.ricci(0, 0),
            ricci_radial: rd.ricci(k, k),
            ricci_torus: rd.ricci(t, t),
            scalar: rd.scalar(),
            coordinate_cm: cm_of_frame(&rd, &coord).map_err(runtime)?,
            symmetry_defect: defect,
        });
    }
    let witnesses = json!({
        "metric": metric.to_json_value(),
        "rows": rows,
    });
    Ok(Run {
        report: VerificationReport::new("curvature-report", pass, witnesses, cfg),
        stem: format!("curvature-report-n{n}-m{m}"),
        tables: vec![Table::from_rows("curvature", &rows)?],
    })
}
