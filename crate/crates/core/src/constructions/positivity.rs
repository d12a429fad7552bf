//! The warped torus metrics `dr^2 + eps^2 f^2 h + u^{4/m} (dx_1^2 + ...)` and
//! grid verification of their uniform positivity.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{solve_profile, ConstructionError};
use crate::curvature::{riemann_exact, WarpedTorusMetric};
use crate::frame::{cm_min, cm_of_frame, Frame};
use crate::report::mix_seed;

pub const DEFAULT_R_MAX: f64 = 10.0;
pub const DEFAULT_GRID_POINTS: usize = 121;
/// A grid passes when its minimum is at least `lambda (1 - PASS_MARGIN)`.
pub const PASS_MARGIN: f64 = 1e-6;
const MAX_REFINEMENTS: usize = 4;
const REFINE_TOL: f64 = 1e-4;
const MAX_HALVINGS: i32 = 20;

/// Uniform grid `points` samples on `[-r_max, r_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub r_max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            r_max: DEFAULT_R_MAX,
            points: DEFAULT_GRID_POINTS,
        }
    }
}

pub fn uniform_grid(r_max: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.0];
    }
    (0..points)
        .map(|i| -r_max + 2.0 * r_max * i as f64 / (points - 1) as f64)
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    #[serde(rename = "R")]
    pub r_max: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub r: f64,
    pub value: f64,
    pub frame: Frame,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    pub pass: bool,
    pub lambda: f64,
    pub epsilon: f64,
    pub grid: GridSummary,
    pub worst: Witness,
    /// `[min, max]` of `C_m(d_r, e_{x_1}, .., e_{x_{m-1}})` over the grid.
    pub coordinate_frame_value_range: [f64; 2],
    pub n: usize,
    pub m: usize,
    pub refinement_levels: usize,
    pub frame_budget: usize,
    pub seed: u64,
    /// Radii outside the grid interval are not checked.
    pub unverified_tail: String,
}

impl PositivityReport {
    /// Largest deviation of the coordinate-frame value from `lambda`.
    pub fn coordinate_frame_error(&self) -> f64 {
        let [lo, hi] = self.coordinate_frame_value_range;
        (lo - self.lambda).abs().max((hi - self.lambda).abs())
    }
}

/// The metric of the given range on `[-r_max, r_max]`.
pub fn build_counterexample_on(
    n: usize,
    m: usize,
    lambda: f64,
    epsilon: f64,
    r_max: f64,
) -> Result<WarpedTorusMetric, ConstructionError> {
    if !(6..=7).contains(&n) || m < 2 || m + 3 > n {
        return Err(ConstructionError::Unsupported(format!(
            "(n, m) = ({n}, {m}) outside 6 <= n <= 7, 2 <= m <= n - 3"
        )));
    }
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(ConstructionError::Unsupported(format!(
            "R = {r_max} must be positive"
        )));
    }
    let sol = solve_profile(n, m, lambda)?;
    Ok(WarpedTorusMetric::new(
        n,
        m,
        epsilon,
        lambda,
        sol.profile,
        (-r_max, r_max),
    )?)
}

pub fn build_counterexample(
    n: usize,
    m: usize,
    lambda: f64,
    epsilon: f64,
) -> Result<WarpedTorusMetric, ConstructionError> {
    build_counterexample_on(n, m, lambda, epsilon, DEFAULT_R_MAX)
}

#[derive(Clone, Debug)]
struct PointResult {
    r: f64,
    value: f64,
    frame: Frame,
    coordinate_value: f64,
}

fn evaluate_points(
    metric: &WarpedTorusMetric,
    grid: &[f64],
    frame_budget: usize,
    seed: u64,
) -> Result<Vec<PointResult>, ConstructionError> {
    let coord = Frame::coordinate(metric.n(), &metric.coordinate_frame_indices())?;
    grid.par_iter()
        .map(|&r| {
            let rd = riemann_exact(metric, r)?;
            let res = cm_min(&rd, metric.m(), frame_budget, mix_seed(seed, r.to_bits()))?;
            Ok(PointResult {
                r,
                value: res.value,
                frame: res.argmin,
                coordinate_value: cm_of_frame(&rd, &coord)?,
            })
        })
        .collect()
}

fn worst_of(points: &[PointResult]) -> &PointResult {
    points
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value).then(a.r.total_cmp(&b.r)))
        .expect("nonempty grid")
}

fn assemble(
    metric: &WarpedTorusMetric,
    lambda: f64,
    points: &[PointResult],
    levels: usize,
    frame_budget: usize,
    seed: u64,
) -> PositivityReport {
    let worst = worst_of(points);
    let lo = points
        .iter()
        .map(|p| p.coordinate_value)
        .fold(f64::INFINITY, f64::min);
    let hi = points
        .iter()
        .map(|p| p.coordinate_value)
        .fold(f64::NEG_INFINITY, f64::max);
    let r_max = points.iter().fold(0.0_f64, |a, p| a.max(p.r.abs()));
    PositivityReport {
        pass: worst.value >= lambda * (1.0 - PASS_MARGIN),
        lambda,
        epsilon: metric.epsilon(),
        grid: GridSummary {
            r_max,
            points: points.len(),
        },
        worst: Witness {
            r: worst.r,
            value: worst.value,
            frame: worst.frame.clone(),
        },
        coordinate_frame_value_range: [lo, hi],
        n: metric.n(),
        m: metric.m(),
        refinement_levels: levels,
        frame_budget,
        seed,
        unverified_tail: format!("|r| > {r_max}"),
    }
}

fn check_grid(metric: &WarpedTorusMetric, grid: &[f64]) -> Result<(), ConstructionError> {
    if grid.is_empty() || grid.iter().any(|r| !r.is_finite()) {
        return Err(ConstructionError::Unsupported(
            "grid must be finite and nonempty".into(),
        ));
    }
    let (lo, hi) = metric.r_domain();
    if let Some(r) = grid.iter().find(|r| **r < lo || **r > hi) {
        return Err(ConstructionError::Unsupported(format!(
            "grid radius {r} outside the metric domain [{lo}, {hi}]"
        )));
    }
    Ok(())
}

/// Minimizes `C_m` at every grid radius; passes iff the grid minimum is at
/// least `lambda (1 - 1e-6)`.
pub fn verify_uniform_positivity(
    metric: &WarpedTorusMetric,
    lambda: f64,
    r_grid: &[f64],
    frame_budget: usize,
    seed: u64,
) -> Result<PositivityReport, ConstructionError> {
    check_grid(metric, r_grid)?;
    let points = evaluate_points(metric, r_grid, frame_budget, seed)?;
    Ok(assemble(metric, lambda, &points, 0, frame_budget, seed))
}

/// [`verify_uniform_positivity`] on a uniform grid, then, while the grid
/// passes, inserting midpoints until the minimum moves by less than `1e-4`
/// (at most four refinements).
pub fn verify_refined(
    metric: &WarpedTorusMetric,
    lambda: f64,
    grid: GridSpec,
    frame_budget: usize,
    seed: u64,
) -> Result<PositivityReport, ConstructionError> {
    let mut radii = uniform_grid(grid.r_max, grid.points);
    check_grid(metric, &radii)?;
    let mut points = evaluate_points(metric, &radii, frame_budget, seed)?;
    let mut report = assemble(metric, lambda, &points, 0, frame_budget, seed);
    for level in 1..=MAX_REFINEMENTS {
        if !report.pass || radii.len() < 2 {
            break;
        }
        let mids: Vec<f64> = radii.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let before = report.worst.value;
        points.extend(evaluate_points(metric, &mids, frame_budget, seed)?);
        points.sort_by(|a, b| a.r.total_cmp(&b.r));
        radii = points.iter().map(|p| p.r).collect();
        report = assemble(metric, lambda, &points, level, frame_budget, seed);
        if (report.worst.value - before).abs() < REFINE_TOL {
            break;
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsilonSearch {
    pub epsilon_star: f64,
    pub report: PositivityReport,
    /// The verification at `2 epsilon_star`.
    pub tightness: PositivityReport,
    /// `(epsilon, pass)` in search order.
    pub tried: Vec<(f64, bool)>,
}

/// Tries `epsilon = 2^-t`, `t = 0..=20`, and returns the first that passes
/// together with the verification at twice that value.
pub fn search_epsilon(
    n: usize,
    m: usize,
    lambda: f64,
    grid: GridSpec,
    frame_budget: usize,
    seed: u64,
) -> Result<EpsilonSearch, ConstructionError> {
    build_counterexample_on(n, m, lambda, 1.0, grid.r_max)?;
    let mut tried = Vec::new();
    let mut previous: Option<PositivityReport> = None;
    let mut best: Option<PositivityReport> = None;
    for t in 0..=MAX_HALVINGS {
        let epsilon = 2f64.powi(-t);
        let metric = build_counterexample_on(n, m, lambda, epsilon, grid.r_max)?;
        let report = verify_refined(&metric, lambda, grid, frame_budget, seed)?;
        tried.push((epsilon, report.pass));
        if report.pass {
            let tightness = match previous {
                Some(p) => p,
                None => {
                    let wide = build_counterexample_on(n, m, lambda, 2.0 * epsilon, grid.r_max)?;
                    verify_refined(&wide, lambda, grid, frame_budget, seed)?
                }
            };
            return Ok(EpsilonSearch {
                epsilon_star: epsilon,
                report,
                tightness,
                tried,
            });
        }
        if best
            .as_ref()
            .is_none_or(|b| report.worst.value > b.worst.value)
        {
            best = Some(report.clone());
        }
        previous = Some(report);
    }
    Err(ConstructionError::SearchFailed(Box::new(
        best.expect("at least one attempt"),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_endpoints() {
        let g = uniform_grid(6.0, 121);
        assert_eq!(g.len(), 121);
        assert_eq!((g[0], g[60], g[120]), (-6.0, 0.0, 6.0));
        assert!((g[1] - g[0] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn range_check() {
        assert!(build_counterexample(6, 3, 1.0, 0.1).is_ok());
        assert!(build_counterexample(6, 4, 1.0, 0.1).is_err());
        assert!(build_counterexample(5, 2, 1.0, 0.1).is_err());
        assert!(build_counterexample(8, 2, 1.0, 0.1).is_err());
    }

    #[test]
    fn torus_coefficient_is_u_squared_for_m2() {
        let g = build_counterexample(6, 2, 1.0, 0.1).unwrap();
        let b = g.blocks();
        assert_eq!(b.torus_power, 2.0);
        let r: f64 = 1.3;
        let coeff = g.profile().u(r).value.powf(b.torus_power);
        assert!((coeff - (r * r).exp()).abs() < 1e-12 * coeff);
    }
}
