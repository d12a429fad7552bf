//! Explicit examples: closed-form profile solutions of the bottom spectral
//! ODE, the circle-lift chain, and the warped torus metrics with uniformly
//! positive m-intermediate curvature.

mod chain;
mod positivity;

pub use chain::{
    build_chain, lift_laplacian_check, lift_ricci_check, LiftChain, LiftCheck, LiftStep,
};
pub use positivity::{
    build_counterexample, build_counterexample_on, search_epsilon, uniform_grid, verify_refined,
    verify_uniform_positivity, EpsilonSearch, GridSpec, GridSummary, PositivityReport, Witness,
    DEFAULT_GRID_POINTS, DEFAULT_R_MAX, PASS_MARGIN,
};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::curvature::{CurvatureError, Jet, Profile, ProfileCase};
use crate::frame::FrameError;
use crate::Rational;

#[derive(Debug, Error, Clone)]
pub enum ConstructionError {
    #[error("unsupported parameters: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Curvature(#[from] CurvatureError),
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error("no epsilon in the search set passes; best report at epsilon = {}", .0.epsilon)]
    SearchFailed(Box<PositivityReport>),
}

/// Radial functions `u`, `f` with analytic derivatives.
pub trait RadialFunctions {
    fn u(&self, r: f64) -> Jet;
    fn f(&self, r: f64) -> Jet;
}

impl RadialFunctions for Profile {
    fn u(&self, r: f64) -> Jet {
        Profile::u(self, r)
    }

    fn f(&self, r: f64) -> Jet {
        Profile::f(self, r)
    }
}

/// Closed-form solution of the bottom ODE for a given `(n, m, lambda)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileSolution {
    pub n: usize,
    pub m: usize,
    pub lambda: f64,
    pub case: ProfileCase,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub c3: Rational,
    /// Zero exactly in the equality case.
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub c4: Rational,
    #[serde(serialize_with = "ser_profile")]
    pub profile: Profile,
}

fn ser_profile<S: serde::Serializer>(p: &Profile, s: S) -> Result<S::Ok, S::Error> {
    s.collect_map(p.params())
}

impl RadialFunctions for ProfileSolution {
    fn u(&self, r: f64) -> Jet {
        self.profile.u(r)
    }

    fn f(&self, r: f64) -> Jet {
        self.profile.f(r)
    }
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub(crate) fn to_f64(x: Rational) -> f64 {
    x.to_f64().expect("small rational")
}

/// Checks `2 <= m`, `n - m >= 3` and `4/(n-m) <= (2m-2)/m`.
pub fn construction_range(n: usize, m: usize) -> Result<(), ConstructionError> {
    if m < 2 {
        return Err(ConstructionError::Unsupported(format!(
            "m = {m} violates 2 <= m"
        )));
    }
    if n < m + 3 {
        return Err(ConstructionError::Unsupported(format!(
            "(n, m) = ({n}, {m}) violates n - m >= 3"
        )));
    }
    let (ni, mi) = (n as i64, m as i64);
    if q(4, ni - mi) > q(2 * mi - 2, mi) {
        return Err(ConstructionError::Unsupported(format!(
            "(n, m) = ({n}, {m}) violates 4/(n-m) <= (2m-2)/m"
        )));
    }
    Ok(())
}

/// `C3 = -2/(n-m-2)` and `C4 = ((n-m) - 2m/(m-1))/(n-m-2)^2`.
pub fn profile_constants(n: usize, m: usize) -> (Rational, Rational) {
    let (ni, mi) = (n as i64, m as i64);
    let s = ni - mi;
    let c3 = q(-2, s - 2);
    let c4 =
        (Rational::from_integer(s) - q(2 * mi, mi - 1)) / Rational::from_integer((s - 2) * (s - 2));
    (c3, c4)
}

pub fn solve_profile(
    n: usize,
    m: usize,
    lambda: f64,
) -> Result<ProfileSolution, ConstructionError> {
    construction_range(n, m)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(ConstructionError::Unsupported(format!(
            "lambda = {lambda} must be positive"
        )));
    }
    let (c3, c4) = profile_constants(n, m);
    let (nf, mf) = (n as f64, m as f64);
    let (case, profile) = if c4.is_zero() {
        let s2 = nf - mf - 2.0;
        (
            ProfileCase::Equality,
            Profile::Gaussian {
                u_rate: mf * lambda / ((2.0 * mf - 2.0) * s2),
                f_rate: -lambda / (2.0 * s2),
            },
        )
    } else {
        debug_assert!(c4.is_positive());
        let mq = Rational::from_integer(m as i64);
        let u_power = -(mq * c3) / (Rational::from_integer(2 * m as i64 - 2) * c4);
        let f_power = (c3 - Rational::one()) / (Rational::from_integer((n - m) as i64) * c4);
        (
            ProfileCase::Strict,
            Profile::CoshPower {
                frequency: (to_f64(c4) * lambda).sqrt(),
                u_power: to_f64(u_power),
                f_power: to_f64(f_power),
            },
        )
    };
    Ok(ProfileSolution {
        n,
        m,
        lambda,
        case,
        c3,
        c4,
        profile,
    })
}

/// LHS minus RHS of the bottom ODE
/// `(2m-2)/m (u''/u + (n-m) f'/f u'/u) = -(n-m) f''/f - lambda`.
pub fn ode_residual<P: RadialFunctions + ?Sized>(
    n: usize,
    m: usize,
    lambda: f64,
    sol: &P,
    r: f64,
) -> f64 {
    let (u, f) = (sol.u(r), sol.f(r));
    let (k, s) = ((2.0 * m as f64 - 2.0) / m as f64, (n - m) as f64);
    k * (u.ratio_d2() + s * f.log_d1() * u.log_d1()) + s * f.ratio_d2() + lambda
}
