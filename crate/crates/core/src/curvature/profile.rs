//! Radial profile functions carrying analytic first and second derivatives.

use std::collections::BTreeMap;

use super::CurvatureError;

/// Value of a scalar function of `r` together with its first two derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

impl Jet {
    pub fn new(value: f64, d1: f64, d2: f64) -> Self {
        Jet { value, d1, d2 }
    }

    pub fn constant(value: f64) -> Self {
        Jet {
            value,
            d1: 0.0,
            d2: 0.0,
        }
    }

    /// `(log h)'` for a positive function `h`.
    pub fn log_d1(&self) -> f64 {
        self.d1 / self.value
    }

    /// `h''/h`.
    pub fn ratio_d2(&self) -> f64 {
        self.d2 / self.value
    }

    /// Chain rule for `h^p`, valid for `h > 0`.
    pub fn powf(&self, p: f64) -> Jet {
        let v = self.value.powf(p);
        let l1 = self.log_d1();
        let l2 = self.ratio_d2();
        Jet {
            value: v,
            d1: p * l1 * v,
            d2: (p * (p - 1.0) * l1 * l1 + p * l2) * v,
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        Jet {
            value: self.value * other.value,
            d1: self.d1 * other.value + self.value * other.d1,
            d2: self.d2 * other.value + 2.0 * self.d1 * other.d1 + self.value * other.d2,
        }
    }
}

/// Discriminator of the closed-form profile families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileCase {
    /// `u = exp(a r^2)`, `f = exp(b r^2)`.
    Equality,
    /// `u = cosh(w r)^p`, `f = cosh(w r)^q`.
    Strict,
    /// `u` and `f` constant.
    Constant,
}

impl ProfileCase {
    pub fn name(&self) -> &'static str {
        match self {
            ProfileCase::Equality => "equality",
            ProfileCase::Strict => "strict",
            ProfileCase::Constant => "constant",
        }
    }
}

/// The pair of radial functions `(u, f)` defining a warped torus metric.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Constant {
        u: f64,
        f: f64,
    },
    Gaussian {
        u_rate: f64,
        f_rate: f64,
    },
    CoshPower {
        frequency: f64,
        u_power: f64,
        f_power: f64,
    },
}

fn gaussian(rate: f64, r: f64) -> Jet {
    let v = (rate * r * r).exp();
    let l1 = 2.0 * rate * r;
    Jet::new(v, l1 * v, (2.0 * rate + l1 * l1) * v)
}

fn cosh_power(w: f64, p: f64, r: f64) -> Jet {
    let c = (w * r).cosh();
    let t = (w * r).tanh();
    let v = c.powf(p);
    // (log v)' = p w tanh, v''/v = (log v)'' + ((log v)')^2
    let l1 = p * w * t;
    let l2 = p * w * w * (1.0 - t * t);
    Jet::new(v, l1 * v, (l2 + l1 * l1) * v)
}

impl Profile {
    pub fn case(&self) -> ProfileCase {
        match self {
            Profile::Constant { .. } => ProfileCase::Constant,
            Profile::Gaussian { .. } => ProfileCase::Equality,
            Profile::CoshPower { .. } => ProfileCase::Strict,
        }
    }

    pub fn u(&self, r: f64) -> Jet {
        match *self {
            Profile::Constant { u, .. } => Jet::constant(u),
            Profile::Gaussian { u_rate, .. } => gaussian(u_rate, r),
            Profile::CoshPower {
                frequency, u_power, ..
            } => cosh_power(frequency, u_power, r),
        }
    }

    pub fn f(&self, r: f64) -> Jet {
        match *self {
            Profile::Constant { f, .. } => Jet::constant(f),
            Profile::Gaussian { f_rate, .. } => gaussian(f_rate, r),
            Profile::CoshPower {
                frequency, f_power, ..
            } => cosh_power(frequency, f_power, r),
        }
    }

    pub fn params(&self) -> BTreeMap<String, f64> {
        let pairs: Vec<(&str, f64)> = match *self {
            Profile::Constant { u, f } => vec![("u", u), ("f", f)],
            Profile::Gaussian { u_rate, f_rate } => vec![("u_rate", u_rate), ("f_rate", f_rate)],
            Profile::CoshPower {
                frequency,
                u_power,
                f_power,
            } => vec![
                ("frequency", frequency),
                ("u_power", u_power),
                ("f_power", f_power),
            ],
        };
        pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    pub fn from_params(
        case: ProfileCase,
        params: &BTreeMap<String, f64>,
    ) -> Result<Profile, CurvatureError> {
        let get = |key: &str| {
            params
                .get(key)
                .copied()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    CurvatureError::Input(format!(
                        "profile case `{}` needs a finite `{key}` parameter",
                        case.name()
                    ))
                })
        };
        let profile = match case {
            ProfileCase::Constant => Profile::Constant {
                u: get("u")?,
                f: get("f")?,
            },
            ProfileCase::Equality => Profile::Gaussian {
                u_rate: get("u_rate")?,
                f_rate: get("f_rate")?,
            },
            ProfileCase::Strict => Profile::CoshPower {
                frequency: get("frequency")?,
                u_power: get("u_power")?,
                f_power: get("f_power")?,
            },
        };
        if let Profile::Constant { u, f } = profile {
            if u <= 0.0 || f <= 0.0 {
                return Err(CurvatureError::Input(
                    "constant profile values must be positive".into(),
                ));
            }
        }
        Ok(profile)
    }
}
