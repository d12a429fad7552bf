//! Exact curvature of the multiply warped metrics
//! `dr^2 + eps^2 f(r)^2 h_sphere + u(r)^q (dx_1^2 + ... + dx_t^2)`.
//!
//! Frame index layout: sphere directions `0..k`, then `e_r` at `k`, then torus
//! directions `k+1..k+1+t`. The coordinate chart uses the same ordering
//! `(y_1..y_k, r, x_1..x_t)`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::fd::CoordinateMetric;
use super::profile::{Jet, Profile, ProfileCase};
use super::{CurvatureError, RiemannData};

/// Block data of a warped product over the `r` line: a round sphere factor of
/// dimension `sphere_dim` scaled by `eps f(r)` and `torus_count` circles each
/// with metric coefficient `u(r)^torus_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedProduct {
    pub sphere_dim: usize,
    pub torus_count: usize,
    pub torus_power: f64,
    pub epsilon: f64,
    pub profile: Profile,
}

/// Radial quantities every component formula is written in.
#[derive(Clone, Copy, Debug)]
struct Radial {
    f: Jet,
    /// `phi'/phi` for the torus scale `phi = u^(torus_power/2)`.
    phi_l1: f64,
    /// `phi''/phi`.
    phi_l2: f64,
}

impl WarpedProduct {
    pub fn dim(&self) -> usize {
        self.sphere_dim + 1 + self.torus_count
    }

    pub fn radial_index(&self) -> usize {
        self.sphere_dim
    }

    pub fn torus_index(&self, i: usize) -> usize {
        self.sphere_dim + 1 + i
    }

    fn radial(&self, r: f64) -> Radial {
        let f = self.profile.f(r);
        let u = self.profile.u(r);
        let q = 0.5 * self.torus_power;
        let ul1 = u.log_d1();
        Radial {
            f,
            phi_l1: q * ul1,
            phi_l2: q * u.ratio_d2() + q * (q - 1.0) * ul1 * ul1,
        }
    }

    /// Sectional curvatures of the coordinate planes, by block:
    /// (sphere-sphere, sphere-r, sphere-torus, torus-r, torus-torus).
    pub fn block_sectionals(&self, r: f64) -> [f64; 5] {
        let rad = self.radial(r);
        let fl1 = rad.f.log_d1();
        let ss = 1.0 / (self.epsilon * self.epsilon * rad.f.value * rad.f.value) - fl1 * fl1;
        let sr = -rad.f.ratio_d2();
        let st = -fl1 * rad.phi_l1;
        let tr = -rad.phi_l2;
        let tt = -rad.phi_l1 * rad.phi_l1;
        [ss, sr, st, tr, tt]
    }

    pub fn riemann(&self, r: f64) -> RiemannData {
        let [ss, sr, st, tr, tt] = self.block_sectionals(r);
        let k = self.sphere_dim;
        RiemannData::from_sectional(self.dim(), |a, b| {
            // a < b
            match (a < k, a == k, b < k, b == k) {
                (true, _, true, _) => ss,
                (true, _, _, true) => sr,
                (true, _, false, false) => st,
                (_, true, _, _) => tr,
                _ => tt,
            }
        })
    }

    /// `r`-only Laplacian of a radial function: `w'' + H(r) w'` with
    /// `H = k f'/f + t phi'/phi` the mean curvature of the level sets.
    pub fn radial_laplacian(&self, w: &Jet, r: f64) -> f64 {
        w.d2 + self.level_set_mean_curvature(r) * w.d1
    }

    pub fn level_set_mean_curvature(&self, r: f64) -> f64 {
        let rad = self.radial(r);
        self.sphere_dim as f64 * rad.f.log_d1() + self.torus_count as f64 * rad.phi_l1
    }

    /// Coordinate chart `(y_1..y_k, r, x_1..x_t)` with hyperspherical angles on
    /// the sphere factor.
    pub fn to_chart(&self, r_domain: (f64, f64)) -> CoordinateMetric {
        let k = self.sphere_dim;
        let t = self.torus_count;
        let dim = self.dim();
        let this = self.clone();
        let mut chart_box = Vec::with_capacity(dim);
        for i in 0..k {
            if i + 1 < k {
                chart_box.push((0.05, PI - 0.05));
            } else {
                chart_box.push((-PI, PI));
            }
        }
        chart_box.push(r_domain);
        chart_box.extend(std::iter::repeat_n((-100.0, 100.0), t));
        let g = move |x: &[f64]| {
            let mut g = DMatrix::<f64>::zeros(dim, dim);
            let r = x[k];
            let f = this.profile.f(r).value;
            let scale = this.epsilon * this.epsilon * f * f;
            let mut h = 1.0;
            for i in 0..k {
                g[(i, i)] = scale * h;
                let s = x[i].sin();
                h *= s * s;
            }
            g[(k, k)] = 1.0;
            let torus = this.profile.u(r).value.powf(this.torus_power);
            for i in 0..t {
                g[(k + 1 + i, k + 1 + i)] = torus;
            }
            g
        };
        CoordinateMetric::new(dim, chart_box, Arc::new(g))
    }

    /// Canonical chart point over radius `r`, away from the angular
    /// coordinate singularities.
    pub fn chart_point(&self, r: f64) -> Vec<f64> {
        let k = self.sphere_dim;
        let mut x = vec![0.0; self.dim()];
        for (i, xi) in x.iter_mut().enumerate().take(k) {
            *xi = if i + 1 < k { 1.1 - 0.1 * i as f64 } else { 0.3 };
        }
        x[k] = r;
        x
    }

    /// Diagonal of the round sphere metric `h` at chart point `x`.
    pub fn sphere_metric_diagonal(&self, x: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.sphere_dim);
        let mut h = 1.0;
        for xi in x.iter().take(self.sphere_dim) {
            out.push(h);
            let s = xi.sin();
            h *= s * s;
        }
        out
    }
}

/// The metric `dr^2 + eps^2 f^2 h_{S^{n-m}} + u^{4/m} (dx_1^2 + ... + dx_{m-1}^2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WarpedTorusMetric {
    n: usize,
    m: usize,
    epsilon: f64,
    lambda: f64,
    profile: Profile,
    r_domain: (f64, f64),
}

impl WarpedTorusMetric {
    pub fn new(
        n: usize,
        m: usize,
        epsilon: f64,
        lambda: f64,
        profile: Profile,
        r_domain: (f64, f64),
    ) -> Result<Self, CurvatureError> {
        if !(3..=7).contains(&n) {
            return Err(CurvatureError::Input(format!(
                "dimension n = {n} outside 3..=7"
            )));
        }
        if m < 1 || m >= n {
            return Err(CurvatureError::Input(format!(
                "m = {m} must satisfy 1 <= m <= n-1"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(CurvatureError::Input(format!(
                "epsilon = {epsilon} must be positive"
            )));
        }
        let (lo, hi) = r_domain;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(CurvatureError::Input(format!(
                "degenerate r domain [{lo}, {hi}]"
            )));
        }
        let metric = WarpedTorusMetric {
            n,
            m,
            epsilon,
            lambda,
            profile,
            r_domain,
        };
        for i in 0..=200 {
            let r = lo + (hi - lo) * i as f64 / 200.0;
            let (u, f) = (metric.profile.u(r).value, metric.profile.f(r).value);
            if !(u > 0.0 && f > 0.0 && u.is_finite() && f.is_finite()) {
                return Err(CurvatureError::Input(format!(
                    "profile not positive and finite at r = {r}: u = {u}, f = {f}"
                )));
            }
        }
        Ok(metric)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn r_domain(&self) -> (f64, f64) {
        self.r_domain
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self, CurvatureError> {
        WarpedTorusMetric::new(
            self.n,
            self.m,
            epsilon,
            self.lambda,
            self.profile.clone(),
            self.r_domain,
        )
    }

    pub fn sphere_dim(&self) -> usize {
        self.n - self.m
    }

    pub fn radial_index(&self) -> usize {
        self.n - self.m
    }

    /// Frame indices of `(e_r, e_{x_1}, ..., e_{x_{m-1}})`.
    pub fn coordinate_frame_indices(&self) -> Vec<usize> {
        (self.n - self.m..self.n).collect()
    }

    pub fn blocks(&self) -> WarpedProduct {
        WarpedProduct {
            sphere_dim: self.n - self.m,
            torus_count: self.m - 1,
            torus_power: 4.0 / self.m as f64,
            epsilon: self.epsilon,
            profile: self.profile.clone(),
        }
    }

    fn check_r(&self, r: f64) -> Result<(), CurvatureError> {
        let (lo, hi) = self.r_domain;
        if r.is_finite() && r >= lo && r <= hi {
            Ok(())
        } else {
            Err(CurvatureError::Domain(format!(
                "r = {r} outside [{lo}, {hi}]"
            )))
        }
    }

    pub fn to_chart(&self) -> CoordinateMetric {
        self.blocks().to_chart(self.r_domain)
    }

    pub fn chart_point(&self, r: f64) -> Vec<f64> {
        self.blocks().chart_point(r)
    }

    pub fn to_json_value(&self) -> WarpedTorusMetricJson {
        WarpedTorusMetricJson {
            n: self.n,
            m: self.m,
            epsilon: self.epsilon,
            profile: ProfileJson {
                case: self.profile.case(),
                lambda: self.lambda,
                params: self.profile.params(),
            },
            r_domain: [self.r_domain.0, self.r_domain.1],
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("metric serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CurvatureError> {
        let raw: WarpedTorusMetricJson = serde_json::from_str(text)
            .map_err(|e| CurvatureError::Input(format!("metric JSON: {e}")))?;
        raw.try_into()
    }
}

/// On-disk layout of a [`WarpedTorusMetric`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarpedTorusMetricJson {
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub profile: ProfileJson,
    pub r_domain: [f64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileJson {
    pub case: ProfileCase,
    pub lambda: f64,
    pub params: BTreeMap<String, f64>,
}

impl TryFrom<WarpedTorusMetricJson> for WarpedTorusMetric {
    type Error = CurvatureError;

    fn try_from(raw: WarpedTorusMetricJson) -> Result<Self, Self::Error> {
        let profile = Profile::from_params(raw.profile.case, &raw.profile.params)?;
        WarpedTorusMetric::new(
            raw.n,
            raw.m,
            raw.epsilon,
            raw.profile.lambda,
            profile,
            (raw.r_domain[0], raw.r_domain[1]),
        )
    }
}

/// Index slot in the `(y_alpha, r, x_i)` block structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Sphere(usize),
    Radial,
    Torus(usize),
}

/// Value of a Christoffel symbol `Gamma^upper_{a b}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Symbol {
    Value(f64),
    /// The symbol equals this coefficient times `h_{alpha beta}`.
    TimesSphereMetric(f64),
    /// `Gamma^gamma_{alpha beta}(h)` of the round sphere chart.
    SphereInternal,
}

/// The nonzero Christoffel symbol families of a warped torus metric at one radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChristoffelTable {
    pub r: f64,
    /// `Gamma^beta_{alpha r} = (f'/f) delta`.
    pub sphere_radial: f64,
    /// `Gamma^r_{alpha beta} = -eps^2 f f' h_{alpha beta}` (coefficient of `h`).
    pub radial_sphere: f64,
    /// `Gamma^j_{i r} = (2u'/(m u)) delta`.
    pub torus_radial: f64,
    /// `Gamma^r_{i j} = -(2u'/(m u)) u^{4/m} delta`.
    pub radial_torus: f64,
}

impl ChristoffelTable {
    /// `Gamma^upper_{a b}`, symmetric in the lower slots.
    pub fn symbol(&self, upper: Slot, a: Slot, b: Slot) -> Symbol {
        use Slot::*;
        let (a, b) = match (a, b) {
            (Radial, other) => (other, Radial),
            (Torus(i), Sphere(j)) => (Sphere(j), Torus(i)),
            pair => pair,
        };
        match (upper, a, b) {
            (Radial, Sphere(_), Sphere(_)) => Symbol::TimesSphereMetric(self.radial_sphere),
            (Sphere(_), Sphere(_), Sphere(_)) => Symbol::SphereInternal,
            (Sphere(g), Sphere(al), Radial) if g == al => Symbol::Value(self.sphere_radial),
            (Torus(j), Torus(i), Radial) if i == j => Symbol::Value(self.torus_radial),
            (Radial, Torus(i), Torus(j)) if i == j => Symbol::Value(self.radial_torus),
            _ => Symbol::Value(0.0),
        }
    }
}

pub fn christoffel_exact(
    metric: &WarpedTorusMetric,
    r: f64,
) -> Result<ChristoffelTable, CurvatureError> {
    metric.check_r(r)?;
    let f = metric.profile.f(r);
    let u = metric.profile.u(r);
    let m = metric.m as f64;
    let eps2 = metric.epsilon * metric.epsilon;
    let torus = 2.0 * u.log_d1() / m;
    Ok(ChristoffelTable {
        r,
        sphere_radial: f.log_d1(),
        radial_sphere: -eps2 * f.value * f.d1,
        torus_radial: torus,
        radial_torus: -torus * u.value.powf(4.0 / m),
    })
}

pub fn riemann_exact(metric: &WarpedTorusMetric, r: f64) -> Result<RiemannData, CurvatureError> {
    metric.check_r(r)?;
    Ok(metric.blocks().riemann(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambda_one_62() -> WarpedTorusMetric {
        WarpedTorusMetric::new(
            6,
            2,
            0.1,
            1.0,
            Profile::Gaussian {
                u_rate: 0.5,
                f_rate: -0.25,
            },
            (-10.0, 10.0),
        )
        .unwrap()
    }

    #[test]
    fn christoffel_examples() {
        let g = lambda_one_62();
        let c = christoffel_exact(&g, 0.5).unwrap();
        // (2/m)(u'/u) = r
        assert!((c.torus_radial - 0.5).abs() < 1e-15);
        assert_eq!(
            c.symbol(Slot::Torus(0), Slot::Radial, Slot::Torus(0)),
            Symbol::Value(c.torus_radial)
        );
        let at0 = christoffel_exact(&g, 0.0).unwrap();
        assert_eq!(at0.sphere_radial, 0.0);

        let flat = WarpedTorusMetric::new(
            5,
            3,
            1.0,
            0.0,
            Profile::Constant { u: 1.0, f: 1.0 },
            (-1.0, 1.0),
        )
        .unwrap();
        let c = christoffel_exact(&flat, 0.3).unwrap();
        assert_eq!(c.sphere_radial, 0.0);
        assert_eq!(c.radial_sphere, 0.0);
        assert_eq!(c.torus_radial, 0.0);
        assert_eq!(c.radial_torus, 0.0);
    }

    #[test]
    fn listed_zero_symbols_are_zero() {
        use Slot::*;
        let c = christoffel_exact(&lambda_one_62(), 0.7).unwrap();
        let zero = Symbol::Value(0.0);
        for (up, a, b) in [
            (Torus(0), Sphere(0), Sphere(1)),
            (Torus(0), Sphere(0), Radial),
            (Radial, Sphere(0), Radial),
            (Sphere(1), Sphere(0), Torus(0)),
            (Torus(0), Sphere(0), Torus(0)),
            (Radial, Sphere(0), Torus(0)),
            (Sphere(0), Radial, Radial),
            (Radial, Radial, Radial),
            (Torus(0), Radial, Radial),
            (Sphere(0), Radial, Torus(0)),
            (Radial, Radial, Torus(0)),
            (Sphere(0), Torus(0), Torus(0)),
            (Sphere(0), Sphere(1), Radial),
        ] {
            assert_eq!(c.symbol(up, a, b), zero, "{up:?} {a:?} {b:?}");
        }
        assert_eq!(
            c.symbol(Sphere(0), Sphere(1), Sphere(2)),
            Symbol::SphereInternal
        );
    }

    #[test]
    fn riemann_examples() {
        let g = lambda_one_62();
        let r = riemann_exact(&g, 0.5).unwrap();
        let k = g.radial_index();
        // sphere-r: -f''/f = 1/2 - r^2/4
        assert!((r.sectional(0, k) - 0.4375).abs() < 1e-14);
        // torus-r for m = 2: -u''/u = -(1 + r^2)
        assert!((r.sectional(k + 1, k) + 1.25).abs() < 1e-14);
        let at0 = riemann_exact(&g, 0.0).unwrap();
        assert!((at0.ricci(k, k) - 1.0).abs() < 1e-14);
        assert!(r.satisfies_symmetries(0.0));
    }

    #[test]
    fn torus_torus_block() {
        // m = 3 gives two torus directions; -(4/m^2)(u'/u)^2 with u'/u = r at rate 1/2
        let g = WarpedTorusMetric::new(
            6,
            3,
            0.5,
            1.0,
            Profile::Gaussian {
                u_rate: 0.5,
                f_rate: -0.25,
            },
            (-5.0, 5.0),
        )
        .unwrap();
        let r = riemann_exact(&g, 0.5).unwrap();
        let k = g.radial_index();
        assert!((r.sectional(k + 1, k + 2) + 4.0 / 9.0 * 0.25).abs() < 1e-14);
    }

    #[test]
    fn product_with_flat_factors() {
        let g = WarpedTorusMetric::new(
            6,
            2,
            1.0,
            0.0,
            Profile::Constant { u: 1.0, f: 1.0 },
            (-1.0, 1.0),
        )
        .unwrap();
        let r = riemann_exact(&g, 0.2).unwrap();
        let k = g.sphere_dim();
        for a in 0..6 {
            for b in 0..6 {
                let expect = if a != b && a < k && b < k { 1.0 } else { 0.0 };
                assert_eq!(r.sectional(a, b), expect);
            }
        }
    }

    #[test]
    fn domain_and_input_errors() {
        let g = lambda_one_62();
        assert!(matches!(
            riemann_exact(&g, 11.0),
            Err(CurvatureError::Domain(_))
        ));
        assert!(matches!(
            christoffel_exact(&g, f64::NAN),
            Err(CurvatureError::Domain(_))
        ));
        let p = Profile::Constant { u: 1.0, f: 1.0 };
        assert!(WarpedTorusMetric::new(6, 6, 1.0, 1.0, p.clone(), (0.0, 1.0)).is_err());
        assert!(WarpedTorusMetric::new(6, 2, 0.0, 1.0, p.clone(), (0.0, 1.0)).is_err());
        assert!(WarpedTorusMetric::new(6, 2, 1.0, 1.0, p, (1.0, 1.0)).is_err());
    }

    #[test]
    fn json_layout() {
        let g = lambda_one_62();
        let text = g.to_json();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["epsilon", "m", "n", "profile", "r_domain"]);
        assert_eq!(v["profile"]["case"], "equality");
        assert_eq!(v["profile"]["lambda"], 1.0);
        assert_eq!(WarpedTorusMetric::from_json(&text).unwrap(), g);
        assert!(WarpedTorusMetric::from_json(r#"{"n": 6}"#).is_err());
    }

    #[test]
    fn m_equal_one_has_no_torus() {
        let g = WarpedTorusMetric::new(
            4,
            1,
            1.0,
            1.0,
            Profile::Gaussian {
                u_rate: 0.0,
                f_rate: -0.1,
            },
            (-2.0, 2.0),
        )
        .unwrap();
        assert_eq!(g.blocks().torus_count, 0);
        let r = riemann_exact(&g, 0.4).unwrap();
        assert_eq!(r.dim(), 4);
        assert!(r.satisfies_symmetries(0.0));
    }
}
