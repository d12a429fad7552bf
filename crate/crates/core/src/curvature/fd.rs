//! Finite-difference curvature of an explicit coordinate chart.
//!
//! Christoffel symbols come from fourth-order central differences of the
//! metric coefficients; their derivatives from the same stencil applied once
//! more. Components are then rotated into the orthonormal frame `L^{-T}`
//! given by the Cholesky factor `g = L L^T`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use super::{CurvatureError, RiemannData};

pub type MetricFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// A metric given by its coefficient table on a coordinate box.
#[derive(Clone)]
pub struct CoordinateMetric {
    dim: usize,
    chart_box: Vec<(f64, f64)>,
    g: MetricFn,
}

impl fmt::Debug for CoordinateMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoordinateMetric")
            .field("dim", &self.dim)
            .field("chart_box", &self.chart_box)
            .finish_non_exhaustive()
    }
}

impl CoordinateMetric {
    pub fn new(dim: usize, chart_box: Vec<(f64, f64)>, g: MetricFn) -> Self {
        assert_eq!(
            chart_box.len(),
            dim,
            "chart box needs one interval per coordinate"
        );
        CoordinateMetric { dim, chart_box, g }
    }

    /// Chart with a constant coefficient table.
    pub fn constant(table: DMatrix<f64>, chart_box: Vec<(f64, f64)>) -> Self {
        let dim = table.nrows();
        CoordinateMetric::new(dim, chart_box, Arc::new(move |_: &[f64]| table.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn chart_box(&self) -> &[(f64, f64)] {
        &self.chart_box
    }

    pub fn eval(&self, x: &[f64]) -> DMatrix<f64> {
        (self.g)(x)
    }

    /// The metric `c^2 g` on the same chart.
    pub fn scaled(&self, c: f64) -> CoordinateMetric {
        let g = self.g.clone();
        let s = c * c;
        CoordinateMetric::new(
            self.dim,
            self.chart_box.clone(),
            Arc::new(move |x: &[f64]| g(x) * s),
        )
    }

    fn check_stencil(&self, x: &[f64], reach: f64) -> Result<(), CurvatureError> {
        if x.len() != self.dim {
            return Err(CurvatureError::Input(format!(
                "point has {} coordinates, chart has {}",
                x.len(),
                self.dim
            )));
        }
        for (i, (&xi, &(lo, hi))) in x.iter().zip(&self.chart_box).enumerate() {
            if !(xi - reach >= lo && xi + reach <= hi) {
                return Err(CurvatureError::Domain(format!(
                    "stencil [{}, {}] in coordinate {i} leaves [{lo}, {hi}]",
                    xi - reach,
                    xi + reach
                )));
            }
        }
        Ok(())
    }
}

const WEIGHTS: [(f64, f64); 4] = [(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)];

/// Fourth-order central difference of a vector-valued function along `dir`.
fn central4(
    func: &dyn Fn(&[f64]) -> Result<Vec<f64>, CurvatureError>,
    x: &[f64],
    dir: usize,
    h: f64,
) -> Result<Vec<f64>, CurvatureError> {
    let mut acc: Option<Vec<f64>> = None;
    let mut p = x.to_vec();
    for &(offset, w) in &WEIGHTS {
        p[dir] = x[dir] + offset * h;
        let v = func(&p)?;
        match acc.as_mut() {
            None => acc = Some(v.into_iter().map(|e| w * e).collect()),
            Some(a) => a.iter_mut().zip(v).for_each(|(a, e)| *a += w * e),
        }
    }
    let scale = 1.0 / (12.0 * h);
    Ok(acc.unwrap().into_iter().map(|e| e * scale).collect())
}

fn inverse_spd(g: &DMatrix<f64>) -> Result<DMatrix<f64>, CurvatureError> {
    g.clone()
        .cholesky()
        .map(|c| c.inverse())
        .ok_or_else(|| CurvatureError::Input("metric is not positive definite".into()))
}

/// `Gamma^a_{bc}` at `x` as a row-major `n^3` table.
fn christoffel_at(
    metric: &CoordinateMetric,
    x: &[f64],
    h: f64,
) -> Result<Vec<f64>, CurvatureError> {
    let n = metric.dim;
    let g = metric.eval(x);
    let ginv = inverse_spd(&g)?;
    let flat = |p: &[f64]| Ok(metric.eval(p).as_slice().to_vec());
    // dg[c][a][b] = d_c g_ab (nalgebra storage is column-major; g is symmetric)
    let mut dg = vec![0.0; n * n * n];
    for c in 0..n {
        let d = central4(&flat, x, c, h)?;
        for a in 0..n {
            for b in 0..n {
                dg[(c * n + a) * n + b] = d[b * n + a];
            }
        }
    }
    let mut gamma = vec![0.0; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    let lowered =
                        dg[(b * n + d) * n + c] + dg[(c * n + d) * n + b] - dg[(d * n + b) * n + c];
                    s += ginv[(a, d)] * lowered;
                }
                gamma[(a * n + b) * n + c] = 0.5 * s;
            }
        }
    }
    Ok(gamma)
}

/// Christoffel symbols `Gamma^a_{bc}` (row-major `n^3`) by central differences.
pub fn christoffel_fd(
    metric: &CoordinateMetric,
    x: &[f64],
    step: f64,
) -> Result<Vec<f64>, CurvatureError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CurvatureError::Input(format!(
            "step {step} must be positive"
        )));
    }
    metric.check_stencil(x, 2.0 * step)?;
    christoffel_at(metric, x, step)
}

/// Orthonormal-frame Riemann tensor of a coordinate metric at `x`.
pub fn riemann_fd(
    metric: &CoordinateMetric,
    x: &[f64],
    step: f64,
) -> Result<RiemannData, CurvatureError> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(CurvatureError::Input(format!(
            "step {step} must be positive"
        )));
    }
    metric.check_stencil(x, 4.0 * step)?;
    let n = metric.dim;
    let g = metric.eval(x);
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| CurvatureError::Input("metric is not positive definite".into()))?;
    let gamma = christoffel_at(metric, x, step)?;
    let gamma_fn = |p: &[f64]| christoffel_at(metric, p, step);
    // dgamma[e][a][b][c] = d_e Gamma^a_{bc}
    let n3 = n * n * n;
    let mut dgamma = vec![0.0; n * n3];
    for e in 0..n {
        let d = central4(&gamma_fn, x, e, step)?;
        dgamma[e * n3..(e + 1) * n3].copy_from_slice(&d);
    }
    let gam = |a: usize, b: usize, c: usize| gamma[(a * n + b) * n + c];
    let dgam = |e: usize, a: usize, b: usize, c: usize| dgamma[e * n3 + (a * n + b) * n + c];

    // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
    let mut up = vec![0.0; n * n3];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgam(c, a, d, b) - dgam(d, a, c, b);
                    for e in 0..n {
                        v += gam(a, c, e) * gam(e, d, b) - gam(a, d, e) * gam(e, c, b);
                    }
                    up[((a * n + b) * n + c) * n + d] = v;
                }
            }
        }
    }
    let mut low = vec![0.0; n * n3];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    low[((a * n + b) * n + c) * n + d] = (0..n)
                        .map(|e| g[(a, e)] * up[((e * n + b) * n + c) * n + d])
                        .sum();
                }
            }
        }
    }

    let frame = chol
        .l()
        .transpose()
        .try_inverse()
        .ok_or_else(|| CurvatureError::Input("singular Cholesky factor".into()))?;
    // contract one slot at a time: T'[..., j, ...] = sum_i T[..., i, ...] E[i][j]
    let mut t = low;
    for slot in 0..4 {
        let stride = n.pow(3 - slot as u32);
        let mut next = vec![0.0; t.len()];
        for (pos, out) in next.iter_mut().enumerate() {
            let j = (pos / stride) % n;
            let base = pos - j * stride;
            *out = (0..n).map(|i| t[base + i * stride] * frame[(i, j)]).sum();
        }
        t = next;
    }
    Ok(RiemannData::from_components(n, t))
}
