//! The quadratic form
//! `N(A) = |A|^2 + sum_{i=2}^{m} sum_{j=i+1}^{n} (a_ii a_jj - a_ij^2)`
//! on symmetric `(n-1) x (n-1)` matrices indexed `2..n`, its ratio to
//! `H^2 = (tr A)^2`, and its minimum on the traceless unit sphere.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::{admissible, d_of, ineq1, InequalityError};
use crate::constructions::to_f64;

pub const DEFAULT_STARTS: usize = 64;
const MAX_ITERATIONS: usize = 20_000;
const TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChenForm {
    pub n: usize,
    pub m: usize,
}

impl ChenForm {
    pub fn new(n: usize, m: usize) -> Self {
        ChenForm { n, m }
    }

    pub fn size(&self) -> usize {
        self.n - 1
    }

    /// Whether the matrix positions `p < q` (1-based indices `p+2`, `q+2`)
    /// appear in the double sum.
    fn coupled(&self, p: usize, q: usize) -> bool {
        p + 2 <= self.m && q > p
    }

    pub fn numerator(&self, a: &DMatrix<f64>) -> f64 {
        let s = self.size();
        let mut total = a.norm_squared();
        for p in 0..s {
            for q in (p + 1)..s {
                if self.coupled(p, q) {
                    total += a[(p, p)] * a[(q, q)] - a[(p, q)] * a[(p, q)];
                }
            }
        }
        total
    }

    /// Gradient for the Frobenius inner product: `dN = <G, dA>` along
    /// symmetric directions.
    pub fn gradient(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let s = self.size();
        let mut g = 2.0 * a;
        for p in 0..s {
            for q in (p + 1)..s {
                if self.coupled(p, q) {
                    g[(p, p)] += a[(q, q)];
                    g[(q, q)] += a[(p, p)];
                    g[(p, q)] -= a[(p, q)];
                    g[(q, p)] -= a[(q, p)];
                }
            }
        }
        g
    }

    /// `N(A) / (tr A)^2`.
    pub fn ratio(&self, a: &DMatrix<f64>) -> f64 {
        let h = a.trace();
        self.numerator(a) / (h * h)
    }

    fn random_symmetric<R: Rng>(&self, rng: &mut R) -> DMatrix<f64> {
        let s = self.size();
        let g = DMatrix::from_fn(s, s, |_, _| rng.sample::<f64, _>(StandardNormal));
        (&g + g.transpose()) * 0.5
    }

    fn traceless_part(&self, a: &DMatrix<f64>) -> DMatrix<f64> {
        let s = self.size();
        a - DMatrix::identity(s, s) * (a.trace() / s as f64)
    }

    /// Steepest descent with exact line search on `tr A = 1`.
    fn descend_trace_one(&self, mut a: DMatrix<f64>) -> DMatrix<f64> {
        for _ in 0..MAX_ITERATIONS {
            let g = self.gradient(&a);
            let d = -self.traceless_part(&g);
            let dn = d.norm();
            if dn < TOL {
                break;
            }
            let slope = g.dot(&d);
            let curv = self.numerator(&d);
            if !(curv > 0.0) {
                break;
            }
            let t = -slope / (2.0 * curv);
            a += &d * t;
            if (t * dn).abs() < TOL {
                break;
            }
        }
        a
    }

    /// Rayleigh-Ritz iteration for `N` on the unit sphere of traceless
    /// matrices over `span{A, gradient, previous step}`.
    fn descend_sphere(&self, mut a: DMatrix<f64>) -> DMatrix<f64> {
        let mut prev: Option<DMatrix<f64>> = None;
        for _ in 0..MAX_ITERATIONS {
            let g = self.gradient(&a);
            let p = self.traceless_part(&g);
            let d = &p - &a * p.dot(&a);
            if d.norm() < TOL {
                break;
            }
            let mut basis = vec![a.clone()];
            for v in std::iter::once(d).chain(prev.take()) {
                let mut v = v;
                for b in &basis {
                    v -= b * v.dot(b);
                }
                let nv = v.norm();
                if nv > 1e-10 {
                    basis.push(v / nv);
                }
            }
            let grads: Vec<DMatrix<f64>> = basis.iter().map(|b| self.gradient(b)).collect();
            let k = basis.len();
            let gram = DMatrix::from_fn(k, k, |i, j| {
                0.25 * (grads[i].dot(&basis[j]) + grads[j].dot(&basis[i]))
            });
            let eig = SymmetricEigen::new(gram);
            let c = eig.eigenvectors.column(eig.eigenvalues.imin()).into_owned();
            let step = basis[1..]
                .iter()
                .zip(c.iter().skip(1))
                .fold(DMatrix::zeros(a.nrows(), a.ncols()), |acc, (b, ci)| {
                    acc + b * *ci
                });
            // Re-project: the trace direction is unstable under the iteration.
            let next = self.traceless_part(&(&a * c[0] + &step));
            let moved = step.norm();
            a = &next / next.norm();
            prev = Some(step);
            if moved < TOL {
                break;
            }
        }
        a
    }
}

/// Best matrix found by a minimization, with the bound it is compared to.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixWitness {
    pub n: usize,
    pub m: usize,
    /// Row-major, rows and columns indexed `2..n`.
    pub matrix: Vec<Vec<f64>>,
    pub ratio: f64,
    #[serde(rename = "H")]
    pub h: f64,
    pub bound: f64,
    /// `ratio - bound`.
    pub gap: f64,
    pub pass: bool,
    pub starts: usize,
}

impl MatrixWitness {
    pub fn matrix(&self) -> DMatrix<f64> {
        let s = self.matrix.len();
        DMatrix::from_fn(s, s, |i, j| self.matrix[i][j])
    }

    /// Row-major entries joined by `;`, for CSV cells.
    pub fn flattened(&self) -> String {
        self.matrix
            .iter()
            .flatten()
            .map(|v| format!("{v:.12}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

fn rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)]).collect())
        .collect()
}

fn check_starts(budget: usize) -> Result<(), InequalityError> {
    if budget == 0 {
        return Err(InequalityError::Parameter(
            "at least one start is needed".into(),
        ));
    }
    Ok(())
}

/// Minimum of `N(A)/H^2` over symmetric matrices; passes when the minimum is
/// at least `D(n, m) - 1e-9`.
pub fn chen_min_ratio(
    n: usize,
    m: usize,
    budget: usize,
    seed: u64,
) -> Result<MatrixWitness, InequalityError> {
    check_starts(budget)?;
    let d = to_f64(d_of(n, m)?.value);
    let form = ChenForm::new(n, m);
    let s = form.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for _ in 0..budget {
        let a0 = form.random_symmetric(&mut rng);
        let a0 = &a0 + DMatrix::identity(s, s) * ((1.0 - a0.trace()) / s as f64);
        let a = form.descend_trace_one(a0);
        let r = form.ratio(&a);
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, a));
        }
    }
    let (ratio, a) = best.expect("budget >= 1");
    Ok(MatrixWitness {
        n,
        m,
        matrix: rows(&a),
        ratio,
        h: a.trace(),
        bound: d,
        gap: ratio - d,
        pass: ratio >= d - 1e-9,
        starts: budget,
    })
}

/// Minimum of `N(A)` over traceless symmetric matrices with `|A| = 1`;
/// passes when it is strictly positive (`> 1e-3`).
pub fn brendle_min(
    n: usize,
    m: usize,
    budget: usize,
    seed: u64,
) -> Result<MatrixWitness, InequalityError> {
    check_starts(budget)?;
    admissible(n, m)?;
    if ineq1(n, m) <= crate::Rational::from_integer(0) {
        return Err(InequalityError::Parameter(format!(
            "(n, m) = ({n}, {m}) has m^2 - mn + 2n - 2 <= 0"
        )));
    }
    let form = ChenForm::new(n, m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DMatrix<f64>)> = None;
    for _ in 0..budget {
        let a0 = form.traceless_part(&form.random_symmetric(&mut rng));
        let a = form.descend_sphere(&a0 / a0.norm());
        let v = form.numerator(&a);
        if best.as_ref().is_none_or(|b| v < b.0) {
            best = Some((v, a));
        }
    }
    let (value, a) = best.expect("budget >= 1");
    Ok(MatrixWitness {
        n,
        m,
        matrix: rows(&a),
        ratio: value,
        h: a.trace(),
        bound: 0.0,
        gap: value,
        pass: value > 1e-3,
        starts: budget,
    })
}
