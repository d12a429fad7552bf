//! The circle-lift chain `Sigma = Sigma_0 -> Sigma_1 -> ... -> Sigma_{m-1}`,
//! each step adding one circle with coefficient `u_j^{2 delta}`.
//!
//! On `Sigma_j` the spectral coefficient is `k_j = (2m-2-2j)/(m-j)` and the
//! function is `u_j = u^{(m-j)/m}`. Lifting with parameter `k = k_{j+1}`
//! uses `gamma = 2/(4-k)`, `delta = (4-2k)/(4-k)` and requires
//! `4/(4-k_{j+1}) = k_j`.

use num_traits::Zero;
use serde::Serialize;

use super::{to_f64, ConstructionError, ProfileSolution};
use crate::curvature::{riemann_fd, Jet, WarpedProduct};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftStep {
    pub j: usize,
    /// Spectral coefficient on `Sigma_j`.
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub input_coefficient: Rational,
    /// The lift parameter `k = k_{j+1}`.
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub lift_k: Rational,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub gamma: Rational,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub delta: Rational,
    /// Exponent of `u` in `u_j`.
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub input_exponent: Rational,
    /// Exponent of `u` in `u_j^gamma`.
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub output_exponent: Rational,
    /// Exponent of `u` in the new circle coefficient `u_j^{2 delta}`.
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub fiber_exponent: Rational,
    pub coefficient_ok: bool,
    pub exponent_ok: bool,
    pub fiber_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftChain {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "crate::rational_serde::seq")]
    pub k_sequence: Vec<Rational>,
    #[serde(serialize_with = "crate::rational_serde::seq")]
    pub function_exponents: Vec<Rational>,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub fiber_exponent: Rational,
    pub steps: Vec<LiftStep>,
}

impl LiftChain {
    /// Number of lifts.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Every step identity holds and the sequence ends at `k = 0`.
    pub fn holds(&self) -> bool {
        self.k_sequence.last().is_none_or(|k| k.is_zero())
            && self
                .steps
                .iter()
                .all(|s| s.coefficient_ok && s.exponent_ok && s.fiber_ok)
    }
}

fn k_of(m: i64, j: i64) -> Rational {
    Rational::new(2 * m - 2 - 2 * j, m - j)
}

pub fn build_chain(n: usize, m: usize) -> Result<LiftChain, ConstructionError> {
    if m < 1 || m >= n {
        return Err(ConstructionError::Unsupported(format!(
            "(n, m) = ({n}, {m}) violates 1 <= m <= n - 1"
        )));
    }
    let mi = m as i64;
    let k_sequence: Vec<Rational> = (0..mi).map(|j| k_of(mi, j)).collect();
    let function_exponents: Vec<Rational> = (0..mi).map(|j| Rational::new(mi - j, mi)).collect();
    let fiber_exponent = Rational::new(4, mi);
    let four = Rational::from_integer(4);
    let two = Rational::from_integer(2);
    let steps = (0..m.saturating_sub(1))
        .map(|j| {
            let k = k_sequence[j + 1];
            let gamma = two / (four - k);
            let delta = (four - two * k) / (four - k);
            let input_exponent = function_exponents[j];
            let output_exponent = input_exponent * gamma;
            let fiber = input_exponent * two * delta;
            LiftStep {
                j,
                input_coefficient: k_sequence[j],
                lift_k: k,
                gamma,
                delta,
                input_exponent,
                output_exponent,
                fiber_exponent: fiber,
                coefficient_ok: four / (four - k) == k_sequence[j],
                exponent_ok: output_exponent == function_exponents[j + 1],
                fiber_ok: fiber == fiber_exponent,
            }
        })
        .collect();
    Ok(LiftChain {
        n,
        m,
        k_sequence,
        function_exponents,
        fiber_exponent,
        steps,
    })
}

/// Two independent evaluations of one identity at radius `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LiftCheck {
    pub j: usize,
    pub r: f64,
    pub numeric: f64,
    pub formula: f64,
    pub residual: f64,
}

/// `Sigma_j` and its lift `Sigma_{j+1}` for the given profile solution.
fn level_pair(
    sol: &ProfileSolution,
    epsilon: f64,
    j: usize,
) -> Result<(WarpedProduct, WarpedProduct, LiftStep), ConstructionError> {
    let chain = build_chain(sol.n, sol.m)?;
    let step = chain.steps.get(j).cloned().ok_or_else(|| {
        ConstructionError::Unsupported(format!("lift step j = {j} outside 0..{}", chain.len()))
    })?;
    let base = WarpedProduct {
        sphere_dim: sol.n - sol.m,
        torus_count: j,
        torus_power: to_f64(chain.fiber_exponent),
        epsilon,
        profile: sol.profile.clone(),
    };
    let lifted = WarpedProduct {
        torus_count: j + 1,
        ..base.clone()
    };
    Ok((base, lifted, step))
}

/// Finite-difference `Ric(e_theta, e_theta)` of the lifted metric against
/// `-Delta_Sigma(u_j^delta) / u_j^delta`.
pub fn lift_ricci_check(
    sol: &ProfileSolution,
    epsilon: f64,
    j: usize,
    r: f64,
    step: f64,
) -> Result<LiftCheck, ConstructionError> {
    let (base, lifted, ls) = level_pair(sol, epsilon, j)?;
    let chart = lifted.to_chart((r - 1.0, r + 1.0));
    let fd = riemann_fd(&chart, &lifted.chart_point(r), step)?;
    let theta = lifted.torus_index(j);
    let numeric = fd.ricci(theta, theta);
    let w = sol.profile.u(r).powf(to_f64(ls.input_exponent * ls.delta));
    let formula = -base.radial_laplacian(&w, r) / w.value;
    Ok(LiftCheck {
        j,
        r,
        numeric,
        formula,
        residual: numeric - formula,
    })
}

/// `Delta_M v` from a finite-difference volume density of the lifted chart
/// against `Delta_Sigma v + <grad u_j^delta, grad v> / u_j^delta`, for the
/// lifted function `v = u_j^gamma`.
pub fn lift_laplacian_check(
    sol: &ProfileSolution,
    epsilon: f64,
    j: usize,
    r: f64,
    step: f64,
) -> Result<LiftCheck, ConstructionError> {
    let (base, lifted, ls) = level_pair(sol, epsilon, j)?;
    let u = sol.profile.u(r);
    let v: Jet = u.powf(to_f64(ls.output_exponent));
    let w: Jet = u.powf(to_f64(ls.input_exponent * ls.delta));

    let chart = lifted.to_chart((r - 1.0, r + 1.0));
    let x0 = lifted.chart_point(r);
    let k = lifted.radial_index();
    let log_density = |rr: f64| {
        let mut x = x0.clone();
        x[k] = rr;
        0.5 * chart.eval(&x).determinant().ln()
    };
    let d_log = (log_density(r - 2.0 * step) - 8.0 * log_density(r - step)
        + 8.0 * log_density(r + step)
        - log_density(r + 2.0 * step))
        / (12.0 * step);
    let numeric = v.d2 + d_log * v.d1;
    let formula = base.radial_laplacian(&v, r) + w.log_d1() * v.d1;
    Ok(LiftCheck {
        j,
        r,
        numeric,
        formula,
        residual: numeric - formula,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::solve_profile;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn m3_chain() {
        let c = build_chain(6, 3).unwrap();
        assert_eq!(c.k_sequence, vec![q(4, 3), q(1, 1), q(0, 1)]);
        assert_eq!(c.function_exponents, vec![q(1, 1), q(2, 3), q(1, 3)]);
        assert_eq!(c.fiber_exponent, q(4, 3));
        assert_eq!(c.len(), 2);
        assert!(c.holds());
    }

    #[test]
    fn m2_chain_has_square_fiber() {
        let c = build_chain(6, 2).unwrap();
        assert_eq!(c.k_sequence, vec![q(1, 1), q(0, 1)]);
        assert_eq!(c.steps[0].fiber_exponent, q(2, 1));
    }

    #[test]
    fn m1_is_trivial() {
        let c = build_chain(4, 1).unwrap();
        assert!(c.is_empty());
        assert!(c.holds());
        assert!(build_chain(4, 4).is_err());
    }

    #[test]
    fn lift_identities_on_six_two() {
        let sol = solve_profile(6, 2, 1.0).unwrap();
        for r in [-1.3, 0.0, 0.5, 1.7] {
            let ric = lift_ricci_check(&sol, 0.5, 0, r, 1e-3).unwrap();
            assert!(ric.residual.abs() < 1e-5, "{ric:?}");
            let lap = lift_laplacian_check(&sol, 0.5, 0, r, 1e-3).unwrap();
            assert!(lap.residual.abs() < 1e-9, "{lap:?}");
        }
    }
}
