//! Multi-start minimization of `C_m` over orthonormal frames.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::objective::CmObjective;
use super::{cm_of_frame, complete_basis, gram_schmidt, Frame, FrameError};
use crate::curvature::RiemannData;

/// Random samples kept as descent starts.
const SAMPLE_STARTS: usize = 4;
/// Best coordinate frames used as descent starts.
const COORDINATE_STARTS: usize = 2;
const MAX_ITERATIONS: usize = 500;
const MIN_STEP: f64 = 1e-10;
const MAX_SWEEPS: usize = 200;
/// Coordinate frames within this (scale-relative) distance of the best value win ties.
const TIE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CmMethod {
    CoordinateEnumeration,
    RandomSampling,
    ProjectedDescent,
}

/// Best frame found. `value` is an upper bound for the true minimum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmResult {
    pub value: f64,
    pub argmin: Frame,
    pub evaluations: u64,
    pub method: CmMethod,
    /// Best pure random sample minus `value`.
    pub sampling_gap: f64,
}

fn validate(r: &RiemannData, m: usize) -> Result<(), FrameError> {
    if m < 1 || m > r.dim() {
        return Err(FrameError::Parameter(format!(
            "m = {m} must lie in 1..={}",
            r.dim()
        )));
    }
    Ok(())
}

/// Lexicographic `m`-subsets of `0..n`.
fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..m).collect();
    loop {
        out.push(cur.clone());
        let mut i = m;
        while i > 0 && cur[i - 1] == n - m + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..m {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Gram-Schmidt on a column-major `n x m` buffer.
fn orthonormalize_slice(buf: &mut [f64], n: usize, m: usize) -> bool {
    for j in 0..m {
        for _ in 0..2 {
            for i in 0..j {
                let dot: f64 = (0..n).map(|a| buf[i * n + a] * buf[j * n + a]).sum();
                for a in 0..n {
                    buf[j * n + a] -= dot * buf[i * n + a];
                }
            }
        }
        let norm = (0..n).map(|a| buf[j * n + a].powi(2)).sum::<f64>().sqrt();
        if !(norm > 1e-12) {
            return false;
        }
        for a in 0..n {
            buf[j * n + a] /= norm;
        }
    }
    true
}

struct Search<'a> {
    obj: &'a CmObjective,
    evaluations: u64,
}

impl Search<'_> {
    fn value(&mut self, f: &DMatrix<f64>) -> f64 {
        self.evaluations += 1;
        self.obj.value(f)
    }

    /// Projected gradient descent with Armijo backtracking; the iterate is
    /// re-orthonormalized after each step.
    fn descend(&mut self, mut f: DMatrix<f64>, mut val: f64) -> (f64, DMatrix<f64>) {
        let mut t: f64 = 0.25;
        'outer: for _ in 0..MAX_ITERATIONS {
            let (_, grad) = self.obj.value_and_gradient(&f);
            let tangent = &grad - &f * (f.transpose() * &grad);
            let g2 = tangent.norm_squared();
            if !(g2 > 0.0) {
                break;
            }
            t = t.max(MIN_STEP / g2.sqrt());
            loop {
                if t * g2.sqrt() < MIN_STEP {
                    break 'outer;
                }
                let mut cand = &f - &tangent * t;
                if gram_schmidt(&mut cand) {
                    let v = self.value(&cand);
                    if v <= val - 1e-4 * t * g2 {
                        f = cand;
                        val = v;
                        t *= 2.0;
                        break;
                    }
                }
                t *= 0.5;
            }
        }
        (val, f)
    }

    /// Column sweeps: with the other columns fixed, `C` is the quadratic form
    /// `x^T M x` in the free column, minimized by the lowest eigenvector of `M`
    /// on the orthogonal complement. Monotone and insensitive to scale.
    fn sweep(&mut self, mut f: DMatrix<f64>, mut val: f64) -> (f64, DMatrix<f64>) {
        let (n, m) = f.shape();
        for _ in 0..MAX_SWEEPS {
            let start = val;
            for j in 0..m {
                let rest = f.clone().remove_column(j);
                let basis = complete_basis(&rest);
                let comp = basis.columns(m - 1, n - m + 1).clone_owned();
                let mat = self.obj.curvature_matrix(&(&rest * rest.transpose()));
                let small = comp.transpose() * &mat * &comp;
                let eig = SymmetricEigen::new(small);
                let imin = eig.eigenvalues.imin();
                let x = &comp * eig.eigenvectors.column(imin);
                let mut cand = f.clone();
                cand.set_column(j, &x);
                if !gram_schmidt(&mut cand) {
                    continue;
                }
                let v = self.value(&cand);
                if v < val {
                    f = cand;
                    val = v;
                }
            }
            if start - val <= 1e-15 * (1.0 + val.abs()) {
                break;
            }
        }
        (val, f)
    }

    fn refine(&mut self, f: DMatrix<f64>, val: f64) -> (f64, DMatrix<f64>) {
        let (val, f) = self.descend(f, val);
        self.sweep(f, val)
    }
}

/// Minimizes `C_m` over orthonormal `m`-frames: coordinate enumeration,
/// `budget` seeded random frames, then descent from the best starts.
pub fn cm_min(r: &RiemannData, m: usize, budget: usize, seed: u64) -> Result<CmResult, FrameError> {
    validate(r, m)?;
    if budget == 0 {
        return Err(FrameError::Parameter(
            "frame budget must be at least 1".into(),
        ));
    }
    let n = r.dim();
    let obj = CmObjective::new(r);
    let mut search = Search {
        obj: &obj,
        evaluations: 0,
    };

    let mut coordinate: Vec<(f64, Vec<usize>)> = subsets(n, m)
        .into_iter()
        .map(|s| {
            let f = Frame::coordinate(n, &s).expect("valid subset");
            (search.value(f.columns()), s)
        })
        .collect();
    // stable sort keeps lexicographic order among equal values
    coordinate.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; n * m];
    let mut kept: Vec<(f64, Vec<f64>)> = Vec::with_capacity(SAMPLE_STARTS + 1);
    for _ in 0..budget {
        loop {
            for v in buf.iter_mut() {
                *v = rng.sample(StandardNormal);
            }
            if orthonormalize_slice(&mut buf, n, m) {
                break;
            }
        }
        let v = obj.value_columns(&buf, m);
        search.evaluations += 1;
        if kept.len() < SAMPLE_STARTS || v < kept[kept.len() - 1].0 {
            let pos = kept.partition_point(|(w, _)| *w <= v);
            kept.insert(pos, (v, buf.clone()));
            kept.truncate(SAMPLE_STARTS);
        }
    }
    let best_sample = kept[0].0;

    let mut best: Option<(f64, DMatrix<f64>, CmMethod)> = None;
    let mut offer = |v: f64, f: DMatrix<f64>, method: CmMethod| {
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, f, method));
        }
    };
    offer(
        best_sample,
        DMatrix::from_column_slice(n, m, &kept[0].1),
        CmMethod::RandomSampling,
    );
    for (v, s) in coordinate.iter().take(COORDINATE_STARTS) {
        let f = Frame::coordinate(n, s)
            .expect("valid subset")
            .columns()
            .clone();
        let (rv, rf) = search.refine(f, *v);
        offer(rv, rf, CmMethod::ProjectedDescent);
    }
    for (v, cols) in &kept {
        let (rv, rf) = search.refine(DMatrix::from_column_slice(n, m, cols), *v);
        offer(rv, rf, CmMethod::ProjectedDescent);
    }
    let (best_val, best_f, method) = best.expect("at least one candidate");

    let (coord_val, coord_set) = &coordinate[0];
    let tol = TIE_TOL * best_val.abs().max(1.0);
    let (argmin, method) = if *coord_val <= best_val + tol {
        (
            Frame::coordinate(n, coord_set)?,
            CmMethod::CoordinateEnumeration,
        )
    } else {
        (Frame::new(best_f)?, method)
    };
    let value = cm_of_frame(r, &argmin)?;
    Ok(CmResult {
        value,
        argmin,
        evaluations: search.evaluations,
        method,
        sampling_gap: best_sample - value,
    })
}

/// Plain random-sampling minimum of `C_m` over `samples` frames, evaluated
/// through [`cm_of_frame`]. No descent; used to validate [`cm_min`].
pub fn cm_min_oracle(
    r: &RiemannData,
    m: usize,
    samples: usize,
    seed: u64,
) -> Result<f64, FrameError> {
    validate(r, m)?;
    if samples == 0 {
        return Err(FrameError::Parameter(
            "sample count must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    for _ in 0..samples {
        let f = Frame::random(r.dim(), m, &mut rng);
        best = best.min(cm_of_frame(r, &f)?);
    }
    Ok(best)
}
