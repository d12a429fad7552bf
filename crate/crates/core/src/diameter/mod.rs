//! Diameter bounds from a positive first eigenfunction of `-gamma Delta + Ric`,
//! the constant `C_0(n, m)` of the `C_m` diameter estimate, and numerical
//! diameters of rotationally symmetric metrics.

mod graph;

pub use graph::{diameter_trend, rotational_diameter, GraphResolution, TrendPoint};

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::constructions::to_f64;
use crate::curvature::RiemannData;
use crate::inequalities::{admissible, third_expression, InequalityError};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiameterError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("(n, m) = ({n}, {m}) is not admissible")]
    Inadmissible { n: usize, m: usize },
    #[error(transparent)]
    Inequality(#[from] InequalityError),
}

type Result<T> = std::result::Result<T, DiameterError>;

fn param<T>(msg: String) -> Result<T> {
    Err(DiameterError::Parameter(msg))
}

/// Inputs of the eigenfunction diameter bounds. `lambda` is the Ricci-level
/// constant of each hypothesis; `ratio` is `u_max / u_min`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundInput {
    pub d: usize,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub gamma: Rational,
    pub lambda: f64,
    pub ratio: Option<f64>,
}

impl BoundInput {
    pub fn new(d: usize, gamma: Rational, lambda: f64) -> Self {
        BoundInput {
            d,
            gamma,
            lambda,
            ratio: None,
        }
    }

    pub fn with_ratio(self, ratio: f64) -> Self {
        BoundInput {
            ratio: Some(ratio),
            ..self
        }
    }

    fn check_common(&self) -> Result<()> {
        if self.d < 3 {
            return param(format!("dimension d = {} must be at least 3", self.d));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return param(format!("lambda = {} must be positive", self.lambda));
        }
        if self.gamma.is_negative() {
            return param(format!("gamma = {} must be nonnegative", self.gamma));
        }
        Ok(())
    }
}

/// `(d-3)^2 / (4/gamma - d + 1)`, taken as 0 when `d = 3` or `gamma = 0`.
fn shen_ye_correction(d: usize, gamma: Rational) -> Rational {
    if d == 3 || gamma.is_zero() {
        return Rational::zero();
    }
    let di = d as i64;
    Rational::from_integer((di - 3) * (di - 3))
        / (Rational::from_integer(4) / gamma - Rational::from_integer(di - 1))
}

/// `sqrt(d - 1 + (d-3)^2/(4/gamma - d + 1)) * pi / sqrt((d-1) lambda)`, valid
/// for `gamma < 4/(d-1)` (`gamma <= 2` when `d = 3`).
pub fn shen_ye_bound(input: &BoundInput) -> Result<f64> {
    input.check_common()?;
    let d = input.d;
    let limit = Rational::new(4, d as i64 - 1);
    let ok = if d == 3 {
        input.gamma <= limit
    } else {
        input.gamma < limit
    };
    if !ok {
        return param(format!(
            "gamma = {} outside the range for d = {d}",
            input.gamma
        ));
    }
    let k = Rational::from_integer(d as i64 - 1) + shen_ye_correction(d, input.gamma);
    Ok(to_f64(k).sqrt() * std::f64::consts::PI / ((d - 1) as f64 * input.lambda).sqrt())
}

/// `pi / sqrt(lambda) * ratio^{gamma (d-3)/(d-1)}`, valid for
/// `0 <= gamma <= (d-1)/(d-2)`.
pub fn antonelli_xu_bound(input: &BoundInput) -> Result<f64> {
    input.check_common()?;
    let d = input.d as i64;
    if input.gamma > Rational::new(d - 1, d - 2) {
        return param(format!("gamma = {} exceeds (d-1)/(d-2)", input.gamma));
    }
    let Some(ratio) = input.ratio else {
        return param("the ratio u_max/u_min is required".into());
    };
    if !(ratio > 0.0 && ratio.is_finite()) {
        return param(format!("ratio = {ratio} must be positive"));
    }
    let exponent = to_f64(input.gamma * Rational::new(d - 3, d - 1));
    Ok(std::f64::consts::PI / input.lambda.sqrt() * ratio.powf(exponent))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct C0Value {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub value: Rational,
}

/// `C_0 = (m^2 - mn + m + n) / (2 (m^2 - mn + 2n - 2))` on admissible pairs.
pub fn c0(n: usize, m: usize) -> Result<C0Value> {
    if !admissible(n, m)?.admissible {
        return Err(DiameterError::Inadmissible { n, m });
    }
    Ok(C0Value {
        n,
        m,
        value: third_expression(n, m),
    })
}

/// `pi / sqrt(lambda C_0)`.
pub fn cm_diameter_bound(n: usize, m: usize, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return param(format!("lambda = {lambda} must be positive"));
    }
    let c = to_f64(c0(n, m)?.value);
    Ok(std::f64::consts::PI / (lambda * c).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct C0Identity {
    pub n: usize,
    pub m: usize,
    /// Slice dimension `n - m + 1`.
    pub d: usize,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub gamma: Rational,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub inverse_c0: Rational,
    /// `(d-1) + (d-3)^2/(4/gamma - d + 1)`.
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub rhs: Rational,
    pub holds: bool,
}

/// Exact check of `1/C_0 = (d-1) + (d-3)^2/(4/gamma - d + 1)` with
/// `d = n - m + 1`, `gamma = (2m-2)/m`.
pub fn c0_identity_check(n: usize, m: usize) -> Result<C0Identity> {
    if m < 2 {
        return param("the identity needs m >= 2 (gamma = 0 otherwise)".into());
    }
    let c = c0(n, m)?;
    let d = n - m + 1;
    let gamma = Rational::new(2 * m as i64 - 2, m as i64);
    let rhs = Rational::from_integer(d as i64 - 1) + shen_ye_correction(d, gamma);
    let inverse_c0 = c.value.recip();
    Ok(C0Identity {
        n,
        m,
        d,
        gamma,
        inverse_c0,
        rhs,
        holds: inverse_c0 == rhs,
    })
}

/// The identity on every admissible pair with `m >= 2` and `n` in range.
pub fn c0_identity_sweep(ns: std::ops::RangeInclusive<usize>) -> Vec<C0Identity> {
    ns.flat_map(|n| (2..n).map(move |m| (n, m)))
        .filter(|&(n, m)| admissible(n, m).is_ok_and(|r| r.admissible))
        .map(|(n, m)| c0_identity_check(n, m).expect("admissible pair"))
        .collect()
}

/// All three bounds for a pair. The eigenfunction bounds are evaluated at
/// the slice dimension with the Ricci-level constant `lambda / (d - 1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTable {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub gamma: Rational,
    pub lambda: f64,
    pub cm_bound: f64,
    pub shen_ye: Option<f64>,
    pub antonelli_xu: Option<f64>,
}

pub fn bound_table(n: usize, m: usize, lambda: f64, ratio: Option<f64>) -> Result<BoundTable> {
    let cm_bound = cm_diameter_bound(n, m, lambda)?;
    let d = n - m + 1;
    let gamma = Rational::new(2 * m as i64 - 2, m as i64);
    let (shen_ye, antonelli_xu) = if d >= 3 {
        let input = BoundInput::new(d, gamma, lambda / (d - 1) as f64);
        let ax = ratio.and_then(|r| antonelli_xu_bound(&input.with_ratio(r)).ok());
        (shen_ye_bound(&input).ok(), ax)
    } else {
        (None, None)
    };
    Ok(BoundTable {
        n,
        m,
        d,
        gamma,
        lambda,
        cm_bound,
        shen_ye,
        antonelli_xu,
    })
}

/// Radius `sqrt(2/lambda)` of the round `S^3` factor whose product with a
/// flat `T^{n-3}` has `C_{n-2} = lambda`.
pub fn model_radius(lambda: f64) -> f64 {
    (2.0 / lambda).sqrt()
}

/// Curvature of `S^3(sqrt(2/lambda)) x T^{n-3}`; frame indices `0..3` are
/// the sphere.
pub fn sphere_torus_model(n: usize, lambda: f64) -> Result<RiemannData> {
    if n < 4 {
        return param(format!("the model needs n >= 4, got {n}"));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return param(format!("lambda = {lambda} must be positive"));
    }
    let kappa = lambda / 2.0;
    Ok(RiemannData::from_sectional(n, |a, b| {
        if a < 3 && b < 3 {
            kappa
        } else {
            0.0
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn shen_ye_examples() {
        let pi = std::f64::consts::PI;
        let b = shen_ye_bound(&BoundInput::new(3, q(2, 1), 1.0)).unwrap();
        assert!((b - pi).abs() < 1e-12);
        let b = shen_ye_bound(&BoundInput::new(4, q(1, 1), 1.0)).unwrap();
        assert!((b - 2.0 * pi / 3f64.sqrt()).abs() < 1e-12);
        let b = shen_ye_bound(&BoundInput::new(4, q(1, 1), 1.0 / 3.0)).unwrap();
        assert!((b - 2.0 * pi).abs() < 1e-12);
        assert!(shen_ye_bound(&BoundInput::new(4, q(4, 3), 1.0)).is_err());
        assert!(shen_ye_bound(&BoundInput::new(3, q(5, 2), 1.0)).is_err());
    }

    #[test]
    fn antonelli_xu_examples() {
        let pi = std::f64::consts::PI;
        let b = antonelli_xu_bound(&BoundInput::new(3, q(1, 2), 1.0).with_ratio(5.0)).unwrap();
        assert!((b - pi).abs() < 1e-12);
        let b = antonelli_xu_bound(&BoundInput::new(4, q(1, 1), 1.0).with_ratio(2.0)).unwrap();
        assert!((b - pi * 2f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(antonelli_xu_bound(&BoundInput::new(4, q(1, 1), 1.0)).is_err());
        assert!(antonelli_xu_bound(&BoundInput::new(4, q(2, 1), 1.0).with_ratio(2.0)).is_err());
    }

    #[test]
    fn c0_examples() {
        assert_eq!(c0(5, 2).unwrap().value, q(1, 4));
        assert_eq!(c0(7, 6).unwrap().value, q(7, 12));
        assert_eq!(c0(6, 4).unwrap().value, q(1, 2));
        assert!(c0(7, 4).is_err());
        let pi = std::f64::consts::PI;
        assert!((cm_diameter_bound(5, 2, 1.0).unwrap() - 2.0 * pi).abs() < 1e-12);
        assert!(
            (cm_diameter_bound(7, 6, 1.0).unwrap() - pi * (12.0f64 / 7.0).sqrt()).abs() < 1e-12
        );
    }

    #[test]
    fn identity_examples() {
        let c = c0_identity_check(5, 2).unwrap();
        assert_eq!((c.inverse_c0, c.rhs), (q(4, 1), q(4, 1)));
        let c = c0_identity_check(7, 6).unwrap();
        assert_eq!(c.rhs, q(12, 7));
        assert!(c.holds);
        assert!(c0_identity_check(5, 1).is_err());
        assert!(c0_identity_sweep(3..=7).iter().all(|c| c.holds));
    }

    #[test]
    fn table_translates_lambda() {
        let t = bound_table(5, 2, 1.0, Some(1.0)).unwrap();
        let pi = std::f64::consts::PI;
        assert!((t.shen_ye.unwrap() - t.cm_bound).abs() < 1e-12);
        assert!((t.antonelli_xu.unwrap() - pi * 3f64.sqrt()).abs() < 1e-12);
        assert!(bound_table(7, 6, 1.0, None).unwrap().shen_ye.is_none());
    }
}
