//! Series evaluation of `k_{d,m,l}(xi) = sum_{n > l} [n(n + d - 2)]^(-m) N_{d,n} W_n(xi)`.
//!
//! Two routes. When the majorant tail bound reaches the tolerance within a
//! modest number of terms the partial sum is used directly. Otherwise the
//! series is summed in the Abel sense through
//!
//! `k(xi) = int_0^inf psi(t) [P(e^-t, xi) - sum_{n <= l} Z_n(xi) e^(-nt)] dt`
//!
//! where `P(r, xi) = (1 - r^2) / (1 - 2 xi r + r^2)^(d/2) = sum_n Z_n(xi) r^n`
//! and `psi` is the inverse Laplace transform of `[n(n + a)]^(-m)`, `a = d - 2`.

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::special::{check_unit_interval, dim_n_f64};

use super::KernelSpec;

/// Distance from `xi = 1` below which a point is treated as the diagonal.
pub const DIAGONAL_TOL: f64 = 1e-12;

const DEFAULT_MAX_TERMS: usize = 10_000_000;
const DIRECT_PREFERRED: usize = 400_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesMethod {
    Direct,
    Abel,
}

/// Truncation policy and per-call diagnostics for [`k_series`].
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesControl {
    pub abs_tol: f64,
    pub max_terms: usize,
    /// Permit the Abel integral when direct summation is too slow or not absolutely convergent.
    pub allow_abel: bool,
    pub used_terms: usize,
    pub tail_estimate: f64,
    pub method_used: Option<SeriesMethod>,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self::new(1e-12)
    }
}

impl SeriesControl {
    pub fn new(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            max_terms: DEFAULT_MAX_TERMS,
            allow_abel: true,
            used_terms: 0,
            tail_estimate: f64::NAN,
            method_used: None,
        }
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }

    pub fn direct_only(mut self) -> Self {
        self.allow_abel = false;
        self
    }

    /// Default control with `max_terms` taken from `SPHERE_TPS_MAX_TERMS` when set.
    pub fn from_env(abs_tol: f64) -> Result<Self> {
        let mut ctl = Self::new(abs_tol);
        if let Ok(s) = std::env::var("SPHERE_TPS_MAX_TERMS") {
            ctl.max_terms = s.trim().parse().map_err(|_| {
                Error::Parse(format!("SPHERE_TPS_MAX_TERMS: not an integer: {s:?}"))
            })?;
        }
        Ok(ctl)
    }
}

/// Upper bound on `sum_{n > big_n} N_{d,n} [n(n + d - 2)]^(-m)` from
/// `N_{d,n} <= d n^(d-2)` and the integral test.
pub fn tail_bound(d: usize, m: usize, big_n: usize) -> Result<f64> {
    if 2 * m < d {
        return Err(Error::Unbounded { d, m });
    }
    if big_n == 0 {
        return Err(Error::Domain("tail_bound needs N >= 1".into()));
    }
    let s = (2 * m + 1 - d) as f64;
    Ok(d as f64 * (big_n as f64).powf(-s) / s)
}

/// Smallest `N` with `tail_bound(d, m, N) <= tol`, saturating at `usize::MAX`.
fn terms_needed(d: usize, m: usize, tol: f64) -> Result<usize> {
    let s = (2 * m + 1 - d) as f64;
    if 2 * m < d {
        return Err(Error::Unbounded { d, m });
    }
    let n = (d as f64 / (s * tol)).powf(1.0 / s).ceil();
    let mut n = if n.is_finite() && n < 1e18 {
        n.max(1.0) as usize
    } else {
        usize::MAX
    };
    while n < usize::MAX && tail_bound(d, m, n)? > tol {
        n += 1;
    }
    Ok(n)
}

/// Successive `Z_n(xi) = N_{d,n} W_n(xi)` for `n = 0, 1, 2, ...`.
pub(crate) struct ZonalIter {
    d: usize,
    lambda: f64,
    xi: f64,
    n: usize,
    prev: f64,
    cur: f64,
}

impl ZonalIter {
    pub(crate) fn new(d: usize, xi: f64) -> Self {
        let lambda = (d as f64 - 2.0) / 2.0;
        Self {
            d,
            lambda,
            xi,
            n: 0,
            prev: 0.0,
            cur: 1.0,
        }
    }
}

impl Iterator for ZonalIter {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        let n = self.n;
        let z = if n == 0 {
            1.0
        } else if self.d == 2 {
            2.0 * self.cur
        } else {
            (n as f64 + self.lambda) / self.lambda * self.cur
        };
        // advance the Chebyshev (d = 2) or Gegenbauer recurrence to degree n + 1
        let next = if self.d == 2 {
            if n == 0 {
                self.xi
            } else {
                2.0 * self.xi * self.cur - self.prev
            }
        } else {
            let k = (n + 1) as f64;
            let l = self.lambda;
            (2.0 * self.xi * (k + l - 1.0) * self.cur - (k + 2.0 * l - 2.0) * self.prev) / k
        };
        self.prev = self.cur;
        self.cur = next;
        self.n += 1;
        Some(z)
    }
}

fn coefficient(n: usize, d: usize, m: usize) -> f64 {
    let nf = n as f64;
    (nf * (nf + d as f64 - 2.0)).powi(-(m as i32))
}

/// Partial sum `sum_{n = l+1}^{big_n}` with compensated accumulation.
pub fn partial_sum(d: usize, m: usize, ell: usize, xi: f64, big_n: usize) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for (n, z) in ZonalIter::new(d, xi).enumerate().take(big_n + 1) {
        if n <= ell {
            continue;
        }
        let term = coefficient(n, d, m) * z;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `k_{d,m,l}(xi)` by its Gegenbauer series.
pub fn k_series(spec: &KernelSpec, xi: f64, ctl: &mut SeriesControl) -> Result<f64> {
    let (d, m, ell) = (spec.d, spec.m, spec.ell);
    spec.validate()?;
    let xi = check_unit_interval(xi)?;
    if !(ctl.abs_tol > 0.0) {
        return Err(Error::Domain(format!(
            "abs_tol must be positive, got {}",
            ctl.abs_tol
        )));
    }
    let diagonal = 1.0 - xi <= DIAGONAL_TOL;
    let xi = if diagonal { 1.0 } else { xi };
    let absolutely = 2 * m > d - 1;
    if diagonal && !absolutely {
        return Err(Error::SingularPoint { d, m, xi });
    }
    if absolutely {
        let n = terms_needed(d, m, ctl.abs_tol)?;
        if n <= ctl.max_terms && (n <= DIRECT_PREFERRED || !ctl.allow_abel) {
            let value = partial_sum(d, m, ell, xi, n.max(ell + 1));
            ctl.used_terms = n;
            ctl.tail_estimate = tail_bound(d, m, n)?;
            ctl.method_used = Some(SeriesMethod::Direct);
            return Ok(value);
        }
    }
    if !ctl.allow_abel {
        let tail = if absolutely {
            tail_bound(d, m, ctl.max_terms.max(1))?
        } else {
            f64::INFINITY
        };
        return Err(Error::NonConvergent {
            abs_tol: ctl.abs_tol,
            max_terms: ctl.max_terms,
            tail,
        });
    }
    abel(d, m, ell, xi, ctl)
}

/// `psi(t)` with `int_0^inf e^(-nt) psi(t) dt = [n (n + a)]^(-m)`.
pub(crate) fn laplace_weight(t: f64, m: usize, a: f64) -> f64 {
    let p = 2 * m - 1;
    let lead = t.powi(p as i32) / factorial(p);
    if a == 0.0 {
        return lead;
    }
    if a * t <= 2.0 {
        let mut term = lead;
        let mut sum = term;
        let mf = m as f64;
        for k in 0..200 {
            let kf = k as f64;
            term *= -a * t * (mf + kf) / ((kf + 1.0) * (2.0 * mf + kf));
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return sum;
    }
    let mut poly = 0.0;
    let mut expo = 0.0;
    for j in 1..=m {
        let c = binomial(2 * m - j - 1, m - j) * if (m - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let power = (2 * m - j) as i32;
        let basis = t.powi(j as i32 - 1) / factorial(j - 1);
        poly += c * a.powi(-power) * basis;
        expo += c * (-a).powi(-power) * basis;
    }
    poly + (-a * t).exp() * expo
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn binomial(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| (n + 1 - i) as f64 / i as f64).product()
}

/// `sum_{n > l} Z_n(xi) r^n` for `r <= 1/2`, together with its majorant
/// `sum_{n > l} N_{d,n} r^n`.
fn small_r_tail(d: usize, ell: usize, xi: f64, r: f64) -> (f64, f64) {
    let mut sum = 0.0;
    let mut major = 0.0;
    let mut rn = 1.0;
    for (n, z) in ZonalIter::new(d, xi).enumerate().take(20_000) {
        if n > ell {
            let dim = dim_n_f64(d, n);
            sum += z * rn;
            major += dim * rn;
            if n > ell + 2 * d && dim * rn <= 1e-18 * major {
                break;
            }
        }
        rn *= r;
        if rn == 0.0 {
            break;
        }
    }
    (sum, major)
}

/// `P(e^-t, xi) - sum_{n <= l} Z_n(xi) e^(-nt)`.
fn bracket(d: usize, ell: usize, xi: f64, t: f64) -> f64 {
    let r = (-t).exp();
    if r <= 0.5 {
        return small_r_tail(d, ell, xi, r).0;
    }
    let one_minus_r = -(-t).exp_m1();
    let num = -(-2.0 * t).exp_m1();
    let den = one_minus_r * one_minus_r + 2.0 * r * (1.0 - xi);
    let poisson = num / den.powf(d as f64 / 2.0);
    let head: f64 = ZonalIter::new(d, xi)
        .take(ell + 1)
        .enumerate()
        .map(|(n, z)| z * r.powi(n as i32))
        .sum();
    poisson - head
}

fn abel(d: usize, m: usize, ell: usize, xi: f64, ctl: &mut SeriesControl) -> Result<f64> {
    let a = d as f64 - 2.0;
    let t0 = std::f64::consts::LN_2;
    let f = |t: f64| {
        if t == 0.0 {
            // the integrand extends continuously; the quadrature never samples endpoints
            return 0.0;
        }
        laplace_weight(t, m, a) * bracket(d, ell, xi, t)
    };

    // truncate where the majorant of the integrand is negligible
    let cutoff = 1e-4 * ctl.abs_tol;
    let mut t_max = t0 + 1.0;
    loop {
        let r = (-t_max).exp();
        let (_, major) = small_r_tail(d, ell, 1.0, r);
        if laplace_weight(t_max, m, a) * major <= cutoff || t_max > 2000.0 {
            break;
        }
        t_max *= 1.25;
    }

    let mut breaks = vec![0.0];
    let scale = (2.0 * (1.0 - xi)).sqrt();
    let mut s = t0 / 2.0;
    while s > scale && s > 1e-6 {
        s /= 4.0;
    }
    while s < t0 {
        breaks.push(s);
        s *= 4.0;
    }
    breaks.push(t0);
    let mut s = t0 * 2.0;
    while s < t_max {
        breaks.push(s);
        s *= 2.0;
    }
    breaks.push(t_max);

    let result = integrate(f, &breaks, 0.25 * ctl.abs_tol, 0.0)?;
    ctl.used_terms = result.evaluations;
    ctl.tail_estimate = result.error + cutoff;
    ctl.method_used = Some(SeriesMethod::Abel);
    if ctl.tail_estimate > ctl.abs_tol {
        return Err(Error::NonConvergent {
            abs_tol: ctl.abs_tol,
            max_terms: ctl.max_terms,
            tail: ctl.tail_estimate,
        });
    }
    Ok(result.value)
}
