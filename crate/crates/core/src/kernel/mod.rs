//! Evaluation of the zonal kernels `k_{d,m,l}` and the two-point kernel
//! `K(x, y) = k(x . y)`.

mod closed;
mod series;

pub use closed::{even_general, in_catalog, k_closed, k_verbatim, odd_general, singular_at_one};
pub use series::{k_series, partial_sum, tail_bound, SeriesControl, SeriesMethod, DIAGONAL_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMethod {
    #[serde(rename = "closed")]
    ClosedForm,
    Series,
    #[default]
    Auto,
}

impl std::str::FromStr for EvalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "closed" | "closedform" | "closed-form" => Ok(Self::ClosedForm),
            "series" => Ok(Self::Series),
            "auto" => Ok(Self::Auto),
            other => Err(Error::Parse(format!(
                "unknown method {other:?} (closed, series, auto)"
            ))),
        }
    }
}

/// Identifies `k_{d,m,l}` and how to evaluate it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub d: usize,
    pub m: usize,
    pub ell: usize,
    #[serde(default)]
    pub method: EvalMethod,
}

impl KernelSpec {
    pub fn new(d: usize, m: usize, ell: usize) -> Result<Self> {
        let spec = Self {
            d,
            m,
            ell,
            method: EvalMethod::Auto,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_method(mut self, method: EvalMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Domain(format!(
                "dimension d must be >= 2, got {}",
                self.d
            )));
        }
        if self.m < 1 {
            return Err(Error::Domain("order m must be >= 1".into()));
        }
        Ok(())
    }

    pub fn lambda(&self) -> f64 {
        (self.d as f64 - 2.0) / 2.0
    }

    /// Whether the closed form applies.
    pub fn has_closed_form(&self) -> bool {
        self.ell == 0 && in_catalog(self.d, self.m)
    }

    /// `k(1)` is finite.
    pub fn finite_on_diagonal(&self) -> bool {
        !singular_at_one(self.d, self.m)
    }

    /// Evaluates `k_{d,m,l}(xi)` per `method`, using `ctl` whenever the series is summed.
    pub fn eval_with(&self, xi: f64, ctl: &mut SeriesControl) -> Result<f64> {
        self.validate()?;
        match self.method {
            EvalMethod::ClosedForm => {
                if self.ell != 0 {
                    return Err(Error::NotInCatalog {
                        d: self.d,
                        m: self.m,
                        ell: self.ell,
                    });
                }
                k_closed(self.d, self.m, xi)
            }
            EvalMethod::Series => k_series(self, xi, ctl),
            EvalMethod::Auto if self.has_closed_form() => k_closed(self.d, self.m, xi),
            EvalMethod::Auto => k_series(self, xi, ctl),
        }
    }

    pub fn eval(&self, xi: f64) -> Result<f64> {
        self.eval_with(xi, &mut SeriesControl::default())
    }
}

/// Dot product of two unit vectors clamped into `[-1, 1]`.
pub fn unit_dot(d: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    for v in [x, y] {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!(
                "vector is not unit length (norm {norm})"
            )));
        }
    }
    Ok(x.iter()
        .zip(y)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        .clamp(-1.0, 1.0))
}

/// `K(x, y) = k_{d,m,l}(x . y)` for unit vectors `x, y` in `R^d`.
pub fn kernel(spec: &KernelSpec, x: &[f64], y: &[f64]) -> Result<f64> {
    spec.eval(unit_dot(spec.d, x, y)?)
}
