//! Numerical laboratory for m-intermediate curvature on warped torus metrics.
//!
//! The crate is organised around five subsystems:
//!
//! * [`curvature`]: exact and finite-difference Riemann tensors,
//! * [`frame`]: evaluation and minimization of `C_m` over orthonormal frames,
//! * [`constructions`]: the explicit profile solutions, circle lifts and
//!   positively curved warped torus metrics,
//! * [`inequalities`]: exact rational sweeps and the matrix inequalities,
//! * [`diameter`]: diameter bounds and geodesic-graph diameter estimates.
//!
//! [`report`] holds the run configuration and report types shared with the CLI.

pub mod constructions;
pub mod curvature;
pub mod diameter;
pub mod frame;
pub mod inequalities;
pub mod report;

mod rational_serde;

pub type Rational = num_rational::Ratio<i64>;
