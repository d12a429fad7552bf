//! Curvature tensors of warped torus metrics and of explicit coordinate charts.
//!
//! Components are always reported in an orthonormal frame with the convention
//! that `R[a][b][a][b]` is the sectional curvature of the plane `e_a ^ e_b`,
//! `ricci[a][b] = sum_c R[c][a][c][b]` and `scalar = trace(ricci)`.

mod fd;
mod profile;
mod warped;

pub use fd::{christoffel_fd, riemann_fd, CoordinateMetric, MetricFn};
pub use profile::{Jet, Profile, ProfileCase};
pub use warped::{
    christoffel_exact, riemann_exact, ChristoffelTable, ProfileJson, Slot, Symbol, WarpedProduct,
    WarpedTorusMetric, WarpedTorusMetricJson,
};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurvatureError {
    #[error("point outside the domain: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    Input(String),
}

/// Orthonormal-frame curvature data at a point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RiemannData {
    dim: usize,
    /// Row-major `dim^4` table.
    components: Vec<f64>,
    /// Row-major `dim^2` table.
    ricci: Vec<f64>,
    scalar: f64,
}

#[inline]
fn idx4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

impl RiemannData {
    /// Builds the data from a full component table; Ricci and scalar curvature
    /// are filled by contraction.
    pub fn from_components(dim: usize, components: Vec<f64>) -> Self {
        assert_eq!(
            components.len(),
            dim.pow(4),
            "component table must be dim^4"
        );
        let mut data = RiemannData {
            dim,
            components,
            ricci: vec![0.0; dim * dim],
            scalar: 0.0,
        };
        let (ricci, scalar) = ricci_scalar(&data);
        data.ricci = ricci;
        data.scalar = scalar;
        data
    }

    /// Curvature operator that is diagonal on coordinate bivectors, with
    /// sectional curvature `sectional(a, b)` on `e_a ^ e_b` (`a < b`).
    pub fn from_sectional(dim: usize, sectional: impl Fn(usize, usize) -> f64) -> Self {
        let mut comps = vec![0.0; dim.pow(4)];
        for a in 0..dim {
            for b in (a + 1)..dim {
                let k = sectional(a, b);
                comps[idx4(dim, a, b, a, b)] = k;
                comps[idx4(dim, b, a, b, a)] = k;
                comps[idx4(dim, a, b, b, a)] = -k;
                comps[idx4(dim, b, a, a, b)] = -k;
            }
        }
        RiemannData::from_components(dim, comps)
    }

    /// Space form of constant sectional curvature `kappa`.
    pub fn constant_curvature(dim: usize, kappa: f64) -> Self {
        RiemannData::from_sectional(dim, |_, _| kappa)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.components[idx4(self.dim, a, b, c, d)]
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn ricci(&self, a: usize, b: usize) -> f64 {
        self.ricci[a * self.dim + b]
    }

    pub fn ricci_table(&self) -> &[f64] {
        &self.ricci
    }

    pub fn ricci_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.ricci)
    }

    pub fn scalar(&self) -> f64 {
        self.scalar
    }

    pub fn sectional(&self, a: usize, b: usize) -> f64 {
        self.component(a, b, a, b)
    }

    /// Largest absolute component, used as the reference scale for tolerances.
    pub fn scale(&self) -> f64 {
        self.components.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// `Rm(x, y, z, w)` for arbitrary vectors in frame coordinates.
    pub fn rm(&self, x: &[f64], y: &[f64], z: &[f64], w: &[f64]) -> f64 {
        let n = self.dim;
        let mut total = 0.0;
        for a in 0..n {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..n {
                if y[b] == 0.0 {
                    continue;
                }
                let xy = x[a] * y[b];
                for c in 0..n {
                    if z[c] == 0.0 {
                        continue;
                    }
                    let base = idx4(n, a, b, c, 0);
                    let mut inner = 0.0;
                    for d in 0..n {
                        inner += self.components[base + d] * w[d];
                    }
                    total += xy * z[c] * inner;
                }
            }
        }
        total
    }

    /// `Ric(x, y)`.
    pub fn ric(&self, x: &[f64], y: &[f64]) -> f64 {
        let n = self.dim;
        let mut total = 0.0;
        for a in 0..n {
            for b in 0..n {
                total += x[a] * self.ricci[a * n + b] * y[b];
            }
        }
        total
    }

    /// Curvature of the metric `c^2 g`: every orthonormal component divided by `c^2`.
    pub fn scaled_metric(&self, c: f64) -> RiemannData {
        let s = 1.0 / (c * c);
        RiemannData::from_components(self.dim, self.components.iter().map(|v| v * s).collect())
    }

    /// Largest violations of the algebraic curvature identities.
    pub fn symmetry_defects(&self) -> SymmetryDefects {
        let n = self.dim;
        let mut out = SymmetryDefects {
            scale: self.scale(),
            ..Default::default()
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let r = self.component(a, b, c, d);
                        out.antisymmetry = out
                            .antisymmetry
                            .max((r + self.component(b, a, c, d)).abs())
                            .max((r + self.component(a, b, d, c)).abs());
                        out.pair_symmetry = out
                            .pair_symmetry
                            .max((r - self.component(c, d, a, b)).abs());
                        let cyc = r + self.component(b, c, a, d) + self.component(c, a, b, d);
                        out.bianchi = out.bianchi.max(cyc.abs());
                    }
                }
            }
        }
        let (ricci, scalar) = ricci_scalar(self);
        out.contraction = ricci
            .iter()
            .zip(&self.ricci)
            .fold((scalar - self.scalar).abs(), |m, (a, b)| {
                m.max((a - b).abs())
            });
        out
    }

    /// All identities hold within `rel_tol` of the component scale (absolute
    /// `rel_tol` when the tensor vanishes).
    pub fn satisfies_symmetries(&self, rel_tol: f64) -> bool {
        let d = self.symmetry_defects();
        let tol = rel_tol * d.scale.max(1.0);
        d.antisymmetry <= tol && d.pair_symmetry <= tol && d.bianchi <= tol && d.contraction <= tol
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct SymmetryDefects {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
    pub contraction: f64,
    pub scale: f64,
}

/// Ricci table (row-major) and scalar curvature by contraction of the
/// component table.
pub fn ricci_scalar(data: &RiemannData) -> (Vec<f64>, f64) {
    let n = data.dim;
    let mut ricci = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            ricci[a * n + b] = (0..n).map(|c| data.component(c, a, c, b)).sum();
        }
    }
    let scalar = (0..n).map(|a| ricci[a * n + a]).sum();
    (ricci, scalar)
}

/// Kulkarni-Nomizu product `h (.) k` of two symmetric `n x n` tables.
pub fn kulkarni_nomizu(n: usize, h: &DMatrix<f64>, k: &DMatrix<f64>) -> Vec<f64> {
    let mut out = vec![0.0; n.pow(4)];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out[idx4(n, a, b, c, d)] = h[(a, c)] * k[(b, d)] + h[(b, d)] * k[(a, c)]
                        - h[(a, d)] * k[(b, c)]
                        - h[(b, c)] * k[(a, d)];
                }
            }
        }
    }
    out
}

/// Random algebraic curvature tensor: a signed sum of `terms` halved
/// Kulkarni-Nomizu squares of Gaussian symmetric matrices. Every such tensor
/// has the full Riemann symmetries including the first Bianchi identity.
pub fn random_curvature<R: Rng + ?Sized>(dim: usize, terms: usize, rng: &mut R) -> RiemannData {
    let mut comps = vec![0.0; dim.pow(4)];
    for _ in 0..terms {
        let mut s = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in i..dim {
                let v: f64 = rng.sample(StandardNormal);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        for (o, v) in comps.iter_mut().zip(kulkarni_nomizu(dim, &s, &s)) {
            *o += 0.5 * sign * v;
        }
    }
    RiemannData::from_components(dim, comps)
}
