//! The m-intermediate curvature `C_m` of an orthonormal frame and its
//! minimization over all frames at a point.
//!
//! For an orthonormal `m`-frame `e_1..e_m` completed to a basis `e_1..e_n`,
//!
//! ```text
//! C_m(e_1..e_m) = sum_{p<=m} sum_{q>p} Rm(e_p, e_q, e_p, e_q)
//!               = sum_{p<=m} Ric(e_p, e_p) - sum_{p<q<=m} Rm(e_p, e_q, e_p, e_q).
//! ```
//!
//! The second form shows that `C_m` only depends on the projector
//! `P = F F^T` onto the spanned plane.

mod objective;
mod search;

pub use objective::CmObjective;
pub use search::{cm_min, cm_min_oracle, CmMethod, CmResult};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curvature::RiemannData;

/// Orthonormality tolerance for [`Frame`] columns.
pub const ORTHONORMAL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("frame columns are not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// An ordered orthonormal `m`-tuple in `R^n`, stored as the columns of an
/// `n x m` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FrameJson", into = "FrameJson")]
pub struct Frame {
    columns: DMatrix<f64>,
}

#[derive(Serialize, Deserialize)]
struct FrameJson {
    dim: usize,
    count: usize,
    columns: Vec<Vec<f64>>,
}

impl From<Frame> for FrameJson {
    fn from(f: Frame) -> Self {
        FrameJson {
            dim: f.dim(),
            count: f.count(),
            columns: (0..f.count()).map(|j| f.column(j)).collect(),
        }
    }
}

impl TryFrom<FrameJson> for Frame {
    type Error = FrameError;

    fn try_from(j: FrameJson) -> Result<Self, FrameError> {
        if j.columns.len() != j.count || j.columns.iter().any(|c| c.len() != j.dim) {
            return Err(FrameError::DimensionMismatch(
                "column table does not match dim/count".into(),
            ));
        }
        let flat: Vec<f64> = j.columns.into_iter().flatten().collect();
        Frame::new(DMatrix::from_column_slice(j.dim, j.count, &flat))
    }
}

/// Orthonormality defect `max |F^T F - I|`.
fn defect(columns: &DMatrix<f64>) -> f64 {
    let gram = columns.transpose() * columns;
    let m = gram.nrows();
    let mut worst = 0.0_f64;
    for i in 0..m {
        for j in 0..m {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}

/// Modified Gram-Schmidt, applied twice. Returns `false` when the columns are
/// numerically dependent.
pub(crate) fn gram_schmidt(mat: &mut DMatrix<f64>) -> bool {
    let m = mat.ncols();
    for j in 0..m {
        for _ in 0..2 {
            for i in 0..j {
                let dot = mat.column(i).dot(&mat.column(j));
                let qi = mat.column(i).clone_owned();
                mat.column_mut(j).axpy(-dot, &qi, 1.0);
            }
        }
        let norm = mat.column(j).norm();
        if !(norm > 1e-12) {
            return false;
        }
        mat.column_mut(j).unscale_mut(norm);
    }
    true
}

impl Frame {
    pub fn new(columns: DMatrix<f64>) -> Result<Self, FrameError> {
        if columns.ncols() == 0 || columns.ncols() > columns.nrows() {
            return Err(FrameError::DimensionMismatch(format!(
                "{} columns in dimension {}",
                columns.ncols(),
                columns.nrows()
            )));
        }
        let d = defect(&columns);
        if !(d <= ORTHONORMAL_TOL) {
            return Err(FrameError::NotOrthonormal(d));
        }
        Ok(Frame { columns })
    }

    /// Gram-Schmidt orthonormalization of the columns of `mat`.
    pub fn orthonormalize(mut mat: DMatrix<f64>) -> Result<Self, FrameError> {
        if !gram_schmidt(&mut mat) {
            return Err(FrameError::Parameter(
                "columns are linearly dependent".into(),
            ));
        }
        Frame::new(mat)
    }

    /// The coordinate frame `(e_{i_1}, .., e_{i_m})`.
    pub fn coordinate(dim: usize, indices: &[usize]) -> Result<Self, FrameError> {
        let mut mat = DMatrix::zeros(dim, indices.len());
        for (j, &i) in indices.iter().enumerate() {
            if i >= dim {
                return Err(FrameError::DimensionMismatch(format!(
                    "index {i} in dimension {dim}"
                )));
            }
            mat[(i, j)] = 1.0;
        }
        Frame::new(mat)
    }

    /// Orthonormalized Gaussian matrix.
    pub fn random<R: Rng + ?Sized>(dim: usize, count: usize, rng: &mut R) -> Self {
        loop {
            let mat = DMatrix::from_fn(dim, count, |_, _| rng.sample::<f64, _>(StandardNormal));
            if let Ok(f) = Frame::orthonormalize(mat) {
                return f;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn count(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.columns.column(j).iter().copied().collect()
    }

    /// Indices `i` such that the frame is exactly `(e_{i_1}, .., e_{i_m})`.
    pub fn coordinate_indices(&self) -> Option<Vec<usize>> {
        (0..self.count())
            .map(|j| {
                let col = self.columns.column(j);
                let hot: Vec<usize> = (0..self.dim()).filter(|&i| col[i] != 0.0).collect();
                (hot.len() == 1 && col[hot[0]] == 1.0).then(|| hot[0])
            })
            .collect()
    }

    /// Orthonormal basis of `R^n` whose first `m` columns are this frame.
    pub fn complete(&self) -> DMatrix<f64> {
        complete_basis(&self.columns)
    }
}

/// Extends orthonormal columns to an orthonormal basis by Gram-Schmidt on the
/// standard basis vectors, taken in order.
pub(crate) fn complete_basis(cols: &DMatrix<f64>) -> DMatrix<f64> {
    let n = cols.nrows();
    let mut out: Vec<nalgebra::DVector<f64>> = (0..cols.ncols())
        .map(|j| cols.column(j).clone_owned())
        .collect();
    for i in 0..n {
        if out.len() == n {
            break;
        }
        let mut v = nalgebra::DVector::zeros(n);
        v[i] = 1.0;
        for _ in 0..2 {
            for c in &out {
                let dot = c.dot(&v);
                v.axpy(-dot, c, 1.0);
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            out.push(v / norm);
        }
    }
    DMatrix::from_columns(&out)
}

fn check_dims(r: &RiemannData, f: &Frame) -> Result<(), FrameError> {
    if r.dim() != f.dim() {
        return Err(FrameError::DimensionMismatch(format!(
            "curvature dimension {} vs frame dimension {}",
            r.dim(),
            f.dim()
        )));
    }
    Ok(())
}

/// `C_m` through the Ricci decomposition
/// `sum_p Ric(e_p, e_p) - sum_{p<q} Rm(e_p, e_q, e_p, e_q)`.
pub fn cm_of_frame(r: &RiemannData, f: &Frame) -> Result<f64, FrameError> {
    check_dims(r, f)?;
    let cols: Vec<Vec<f64>> = (0..f.count()).map(|j| f.column(j)).collect();
    let mut total = 0.0;
    for (p, ep) in cols.iter().enumerate() {
        total += r.ric(ep, ep);
        for eq in &cols[p + 1..] {
            total -= r.rm(ep, eq, ep, eq);
        }
    }
    debug_assert!({
        let direct = cm_double_sum(r, f)?;
        (direct - total).abs() <= 1e-8 * (1.0 + r.scale())
    });
    Ok(total)
}

/// `C_m` straight from the definition: the double sum of sectional
/// curvatures over `p <= m`, `q > p` in a completed orthonormal basis.
pub fn cm_double_sum(r: &RiemannData, f: &Frame) -> Result<f64, FrameError> {
    check_dims(r, f)?;
    let basis = f.complete();
    let n = f.dim();
    let col = |j: usize| -> Vec<f64> { basis.column(j).iter().copied().collect() };
    let mut total = 0.0;
    for p in 0..f.count() {
        let ep = col(p);
        for q in (p + 1)..n {
            let eq = col(q);
            total += r.rm(&ep, &eq, &ep, &eq);
        }
    }
    Ok(total)
}
