//! Exact rational checks of the dimension conditions and constants, plus the
//! two matrix inequalities on second fundamental forms.
//!
//! All `(n, m)`-indexed quantities are computed in `Ratio<i64>`; floating
//! point only appears inside the matrix minimizations.

mod matrix;

pub use matrix::{brendle_min, chen_min_ratio, ChenForm, MatrixWitness, DEFAULT_STARTS};

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InequalityError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("(n, m) = ({n}, {m}) is not admissible")]
    Inadmissible { n: usize, m: usize },
}

fn int(x: i64) -> Rational {
    Rational::from_integer(x)
}

fn check_pair(n: usize, m: usize) -> Result<(i64, i64), InequalityError> {
    if m < 1 || m >= n {
        return Err(InequalityError::Parameter(format!(
            "(n, m) = ({n}, {m}) needs 1 <= m < n"
        )));
    }
    Ok((n as i64, m as i64))
}

/// `m^2 - mn + 2n - 2`.
pub fn ineq1(n: usize, m: usize) -> Rational {
    let (n, m) = (n as i64, m as i64);
    int(m * m - m * n + 2 * n - 2)
}

/// `m^2 - mn + m + n`.
pub fn ineq2(n: usize, m: usize) -> Rational {
    let (n, m) = (n as i64, m as i64);
    int(m * m - m * n + m + n)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityRecord {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub ineq1: Rational,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub ineq2: Rational,
    pub admissible: bool,
}

pub fn admissible(n: usize, m: usize) -> Result<AdmissibilityRecord, InequalityError> {
    check_pair(n, m)?;
    let (a, b) = (ineq1(n, m), ineq2(n, m));
    Ok(AdmissibilityRecord {
        n,
        m,
        ineq1: a,
        ineq2: b,
        admissible: a.is_positive() && b.is_positive(),
    })
}

/// All pairs `1 <= m < n` for `n` in the range.
pub fn admissibility_sweep(ns: std::ops::RangeInclusive<usize>) -> Vec<AdmissibilityRecord> {
    ns.flat_map(|n| (1..n).map(move |m| admissible(n, m).expect("valid pair")))
        .collect()
}

/// The admissible `m` for each `n`.
pub fn admissible_sets(ns: std::ops::RangeInclusive<usize>) -> Vec<(usize, Vec<usize>)> {
    ns.map(|n| {
        (
            n,
            (1..n)
                .filter(|&m| admissible(n, m).expect("valid pair").admissible)
                .collect(),
        )
    })
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DValue {
    pub n: usize,
    pub m: usize,
    /// `m/(2m-2)`, `1/(n-m)` and the third expression; `None` is `+inf` (`m = 1`).
    #[serde(serialize_with = "ser_candidates")]
    pub candidates: [Option<Rational>; 3],
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub value: Rational,
}

fn ser_candidates<S: serde::Serializer>(
    c: &[Option<Rational>; 3],
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_seq(
        c.iter()
            .map(|q| q.map_or("inf".to_string(), |q| q.to_string())),
    )
}

/// `(m^2 - mn + m + n) / (2 (m^2 - mn + 2n - 2))`; also the constant `C_0`.
pub fn third_expression(n: usize, m: usize) -> Rational {
    ineq2(n, m) / (int(2) * ineq1(n, m))
}

pub fn d_of(n: usize, m: usize) -> Result<DValue, InequalityError> {
    let (ni, mi) = check_pair(n, m)?;
    if !admissible(n, m)?.admissible {
        return Err(InequalityError::Inadmissible { n, m });
    }
    let first = (m > 1).then(|| Rational::new(mi, 2 * mi - 2));
    let candidates = [
        first,
        Some(Rational::new(1, ni - mi)),
        Some(third_expression(n, m)),
    ];
    let value = candidates
        .iter()
        .flatten()
        .copied()
        .min()
        .expect("finite candidate");
    Ok(DValue {
        n,
        m,
        candidates,
        value,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DThirdRow {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub d: Rational,
    #[serde(serialize_with = "crate::rational_serde::one")]
    pub third: Rational,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DThirdReport {
    pub rows: Vec<DThirdRow>,
    pub failures: usize,
}

/// `D(n, m)` equals the third expression on every admissible pair with
/// `3 <= n <= 7`, `m >= 2`.
pub fn check_d_third_expression() -> DThirdReport {
    let rows: Vec<DThirdRow> = (3..=7)
        .flat_map(|n| (2..n).map(move |m| (n, m)))
        .filter_map(|(n, m)| d_of(n, m).ok())
        .map(|d| {
            let third = third_expression(d.n, d.m);
            DThirdRow {
                n: d.n,
                m: d.m,
                d: d.value,
                third,
                equal: d.value == third,
            }
        })
        .collect();
    let failures = rows.iter().filter(|r| !r.equal).count();
    DThirdReport { rows, failures }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursionRow {
    pub n: usize,
    pub m: usize,
    pub ell: usize,
    pub n_ell: usize,
    pub m_ell: usize,
    pub admissible: bool,
    #[serde(serialize_with = "opt_rational")]
    pub d: Option<Rational>,
    /// `(ell - 1)/(2 ell)`; `None` is `-inf` at `ell = 0`.
    #[serde(serialize_with = "opt_rhs")]
    pub rhs: Option<Rational>,
    pub holds: bool,
}

fn opt_rational<S: serde::Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_str(""),
    }
}

fn opt_rhs<S: serde::Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&q.to_string()),
        None => s.serialize_str("-inf"),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecursionReport {
    pub n: usize,
    pub m: usize,
    pub rows: Vec<RecursionRow>,
    pub pass: bool,
}

/// `D(n - l, m - l) >= (l - 1)/(2l)` for `l = 0..=m-2`; the `l = 0` row is
/// vacuous. Inadmissible intermediate pairs are reported as failing rows.
pub fn check_recursion(n: usize, m: usize) -> Result<RecursionReport, InequalityError> {
    if !admissible(n, m)?.admissible {
        return Err(InequalityError::Inadmissible { n, m });
    }
    if m < 2 {
        return Err(InequalityError::Parameter(
            "the recursion needs m >= 2".into(),
        ));
    }
    let rows: Vec<RecursionRow> = (0..=m - 2)
        .map(|ell| {
            let (n_ell, m_ell) = (n - ell, m - ell);
            let d = d_of(n_ell, m_ell).ok().map(|d| d.value);
            let rhs = (ell > 0).then(|| Rational::new(ell as i64 - 1, 2 * ell as i64));
            let holds = match (d, rhs) {
                (Some(d), Some(rhs)) => d >= rhs,
                (Some(_), None) => true,
                (None, _) => false,
            };
            RecursionRow {
                n,
                m,
                ell,
                n_ell,
                m_ell,
                admissible: d.is_some(),
                d,
                rhs,
                holds,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.holds);
    Ok(RecursionReport { n, m, rows, pass })
}

/// Both sides of `(2m-2)/m < 4/(n-m)  <=>  m^2 - mn + m + n > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GammaEquivalence {
    pub n: usize,
    pub m: usize,
    pub gamma_side: bool,
    pub polynomial_side: bool,
}

impl GammaEquivalence {
    pub fn agree(&self) -> bool {
        self.gamma_side == self.polynomial_side
    }
}

pub fn gamma_equivalence(n: usize, m: usize) -> Result<GammaEquivalence, InequalityError> {
    let (ni, mi) = check_pair(n, m)?;
    Ok(GammaEquivalence {
        n,
        m,
        gamma_side: Rational::new(2 * mi - 2, mi) < Rational::new(4, ni - mi),
        polynomial_side: ineq2(n, m).is_positive(),
    })
}

pub fn check_gamma_equivalence(n: usize, m: usize) -> Result<bool, InequalityError> {
    Ok(gamma_equivalence(n, m)?.agree())
}

pub fn gamma_equivalence_sweep(max_n: usize) -> Vec<GammaEquivalence> {
    (2..=max_n)
        .flat_map(|n| (1..n).map(move |m| gamma_equivalence(n, m).expect("valid pair")))
        .collect()
}

/// With `eps = k - k^2/4`, `1 + k^2/(4 eps) = 4/(4 - k)` for `0 < k < 4`.
pub fn stability_identity(k: Rational) -> Result<bool, InequalityError> {
    if !(k.is_positive() && k < int(4)) {
        return Err(InequalityError::Parameter(format!(
            "k = {k} outside (0, 4)"
        )));
    }
    let eps = k - k * k / int(4);
    debug_assert!(!eps.is_zero());
    Ok(int(1) + k * k / (int(4) * eps) == int(4) / (int(4) - k))
}
