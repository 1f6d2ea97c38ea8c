//! Thinplate spline kernels on the sphere `S^(d-1)`.
//!
//! The crate evaluates the zonal kernels `k_{d,m,l}(xi)` by their Gegenbauer
//! series and, where known, by closed forms; it provides a quadrature
//! implementation of the operators `T_lambda`, `T*_lambda` and the kernel
//! recurrence built from them; and it solves the mixed interpolation /
//! penalized least-squares problem whose solution is a spline in the span of
//! the kernel translates plus a low-degree spherical polynomial trend.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod fit;
pub mod io;
pub mod kernel;
pub mod operator;
pub mod quadrature;
pub mod special;
pub mod trend;
pub mod verify;

pub use error::{Error, Result};

pub use fit::{
    assemble, solve_fit, solve_fit_with_report, FitProblem, FitReport, PointSet, SplineModel,
};
pub use kernel::{k_closed, k_series, kernel, EvalMethod, KernelSpec, SeriesControl};
pub use operator::recurrence_k;
pub use trend::TrendBasis;
