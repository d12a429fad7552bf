//! Fast evaluation of `C_m` as a quadratic function of the projector
//! `P = F F^T`:
//!
//! ```text
//! C(P) = tr(Ric P) - 1/2 sum_{abcd} R_abcd P_ac P_bd
//! ```
//!
//! `P` is symmetric, so the form is stored on the `n(n+1)/2` independent
//! entries `P_ac`, `a <= c`.

use nalgebra::DMatrix;

use crate::curvature::RiemannData;

#[derive(Clone, Debug)]
pub struct CmObjective {
    n: usize,
    pairs: Vec<(usize, usize)>,
    /// Coefficient of `p_k` in the linear part.
    linear: Vec<f64>,
    /// Packed upper triangle, `sum_{k<=l} quad[k,l] p_k p_l` is the full double contraction.
    quad: Vec<f64>,
    components: Vec<f64>,
    ricci: Vec<f64>,
}

impl CmObjective {
    pub fn new(r: &RiemannData) -> Self {
        let n = r.dim();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |c| (a, c))).collect();
        let orbit = |(a, c): (usize, usize)| -> Vec<(usize, usize)> {
            if a == c {
                vec![(a, c)]
            } else {
                vec![(a, c), (c, a)]
            }
        };
        let linear = pairs
            .iter()
            .map(|&k| orbit(k).iter().map(|&(a, c)| r.ricci(a, c)).sum())
            .collect();
        let np = pairs.len();
        let mut quad = Vec::with_capacity(np * (np + 1) / 2);
        for k in 0..np {
            for l in k..np {
                let mut q = 0.0;
                for &(a, c) in &orbit(pairs[k]) {
                    for &(b, d) in &orbit(pairs[l]) {
                        q += r.component(a, b, c, d);
                    }
                }
                quad.push(if k == l { q } else { 2.0 * q });
            }
        }
        CmObjective {
            n,
            pairs,
            linear,
            quad,
            components: r.components().to_vec(),
            ricci: r.ricci_table().to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn value_of_packed(&self, p: &[f64]) -> f64 {
        let np = p.len();
        let mut lin = 0.0;
        let mut quad = 0.0;
        let mut idx = 0;
        for k in 0..np {
            lin += self.linear[k] * p[k];
            let mut row = 0.0;
            for l in k..np {
                row += self.quad[idx] * p[l];
                idx += 1;
            }
            quad += p[k] * row;
        }
        lin - 0.5 * quad
    }

    /// `C` at the plane spanned by the orthonormal columns of a column-major
    /// `n x m` slice.
    pub fn value_columns(&self, cols: &[f64], m: usize) -> f64 {
        let n = self.n;
        let mut p = [0.0; 64];
        let p = if self.pairs.len() <= 64 {
            &mut p[..self.pairs.len()]
        } else {
            return self.value_projector(&projector(cols, n, m));
        };
        for (slot, &(a, c)) in p.iter_mut().zip(&self.pairs) {
            let mut s = 0.0;
            for j in 0..m {
                s += cols[j * n + a] * cols[j * n + c];
            }
            *slot = s;
        }
        self.value_of_packed(p)
    }

    pub fn value(&self, f: &DMatrix<f64>) -> f64 {
        self.value_columns(f.as_slice(), f.ncols())
    }

    pub fn value_projector(&self, proj: &DMatrix<f64>) -> f64 {
        let p: Vec<f64> = self.pairs.iter().map(|&(a, c)| proj[(a, c)]).collect();
        self.value_of_packed(&p)
    }

    /// `M(P) = Ric - S(P)` with `S(P)_ac = sum_bd R_abcd P_bd`. Restricted to
    /// a column `x` orthogonal to the rest of the frame, `C` changes by
    /// `x^T M(P_rest) x`, and the Euclidean gradient of `C(F F^T)` is `2 M(P) F`.
    pub fn curvature_matrix(&self, proj: &DMatrix<f64>) -> DMatrix<f64> {
        let n = self.n;
        let mut out = DMatrix::from_row_slice(n, n, &self.ricci);
        for a in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for b in 0..n {
                    let base = ((a * n + b) * n + c) * n;
                    for d in 0..n {
                        s += self.components[base + d] * proj[(b, d)];
                    }
                }
                out[(a, c)] -= s;
            }
        }
        out
    }

    /// Value and Euclidean gradient with respect to the frame matrix.
    pub fn value_and_gradient(&self, f: &DMatrix<f64>) -> (f64, DMatrix<f64>) {
        let proj = f * f.transpose();
        let m = self.curvature_matrix(&proj);
        (self.value_projector(&proj), 2.0 * m * f)
    }
}

pub(crate) fn projector(cols: &[f64], n: usize, m: usize) -> DMatrix<f64> {
    let f = DMatrix::from_column_slice(n, m, cols);
    &f * f.transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::random_curvature;
    use crate::frame::{cm_of_frame, Frame};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn agrees_with_direct_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 3..=7 {
            let r = random_curvature(n, 3, &mut rng);
            let obj = CmObjective::new(&r);
            for m in 1..=n {
                let f = Frame::random(n, m, &mut rng);
                let direct = cm_of_frame(&r, &f).unwrap();
                let fast = obj.value(f.columns());
                assert!(
                    (direct - fast).abs() < 1e-10 * (1.0 + r.scale()),
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = random_curvature(6, 4, &mut rng);
        let obj = CmObjective::new(&r);
        // the polynomial C(F F^T) is defined for any F, not just orthonormal ones
        let f = Frame::random(6, 3, &mut rng).columns().clone();
        let (_, grad) = obj.value_and_gradient(&f);
        let h = 1e-5;
        for i in 0..6 {
            for j in 0..3 {
                let mut fp = f.clone();
                fp[(i, j)] += h;
                let mut fm = f.clone();
                fm[(i, j)] -= h;
                let fd = (obj.value(&fp) - obj.value(&fm)) / (2.0 * h);
                assert!(
                    (fd - grad[(i, j)]).abs() <= 1e-6 * grad.amax().max(1.0),
                    "({i},{j}): {fd} vs {}",
                    grad[(i, j)]
                );
            }
        }
    }

    #[test]
    fn column_update_is_quadratic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = random_curvature(5, 3, &mut rng);
        let obj = CmObjective::new(&r);
        let f = Frame::random(5, 3, &mut rng);
        let rest = f.columns().columns(0, 2).clone_owned();
        let x = f.columns().column(2).clone_owned();
        let base = obj.value(&rest);
        let m = obj.curvature_matrix(&(&rest * rest.transpose()));
        let predicted = base + (x.transpose() * &m * &x)[(0, 0)];
        assert!((predicted - obj.value(f.columns())).abs() < 1e-10 * (1.0 + r.scale()));
    }
}
