//! Closed forms of `k_{d,m}` (trend degree 0).
//!
//! Notation: `u = (1 - x) / 2`, `v = pi/2 + arcsin x` (so `v = pi - theta`).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::coeffs::{even_coeffs, odd_coeffs, EvenCoeffs, OddCoeffs};
use crate::error::{Error, Result};
use crate::special::{check_unit_interval, polylog, ZETA3};

use super::series::DIAGONAL_TOL;

const PI2: f64 = PI * PI;
const MAX_GENERAL_D: usize = 30;
/// Below this `v` the even-`d` forms switch to their Taylor expansion about `x = -1`.
const ANTIPODAL_V: f64 = 0.8;
const ANTIPODAL_TERMS: usize = 60;

/// Whether `(d, m)` has a closed form.
pub fn in_catalog(d: usize, m: usize) -> bool {
    matches!((d, m), (2, 1..=4) | (3, 1..=3) | (4, 1..=2) | (5, 1..=2))
        || (m == 1 && (3..=MAX_GENERAL_D).contains(&d))
}

/// Whether `k_{d,m}` is infinite at `xi = 1`.
pub fn singular_at_one(d: usize, m: usize) -> bool {
    2 * m < d
}

fn uv(x: f64) -> (f64, f64, f64) {
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    let v = s.atan2(-x);
    ((1.0 - x) / 2.0, v, s)
}

/// `k_{d,m}(xi)` from the closed-form catalogue.
pub fn k_closed(d: usize, m: usize, xi: f64) -> Result<f64> {
    if !in_catalog(d, m) {
        return Err(Error::NotInCatalog { d, m, ell: 0 });
    }
    let x = check_unit_interval(xi)?;
    if singular_at_one(d, m) && 1.0 - x <= DIAGONAL_TOL {
        return Err(Error::SingularPoint { d, m, xi });
    }
    if m == 1 && d >= 3 {
        return if d.is_multiple_of(2) {
            even_general(d, x)
        } else {
            odd_general(d, x)
        };
    }
    k_verbatim(d, m, x)
}

/// The individually listed catalogue entries, evaluated exactly as written.
///
/// The even-`d`, `m = 1` entries carry a removable `0/0` at `x = -1`; there the
/// value is the limit. Kept separate from [`k_closed`] so the general
/// even/odd formulas can be checked against them.
pub fn k_verbatim(d: usize, m: usize, xi: f64) -> Result<f64> {
    let x = check_unit_interval(xi)?;
    if singular_at_one(d, m) && 1.0 - x <= DIAGONAL_TOL {
        return Err(Error::SingularPoint { d, m, xi });
    }
    let (u, v, s) = uv(x);
    let v2 = v * v;
    let value = match (d, m) {
        (2, 1) => 0.5 * v2 - PI2 / 6.0,
        (2, 2) => -v2 * v2 / 24.0 + PI2 * v2 / 12.0 - 7.0 * PI2 * PI2 / 360.0,
        (2, 3) => {
            let p4 = PI2 * PI2;
            v2 * v2 * v2 / 720.0 - PI2 * v2 * v2 / 144.0 + 7.0 * p4 * v2 / 720.0
                - 31.0 * p4 * PI2 / 15120.0
        }
        (2, 4) => {
            let p4 = PI2 * PI2;
            let v4 = v2 * v2;
            -v4 * v4 / 40320.0 + PI2 * v4 * v2 / 4320.0 - 7.0 * p4 * v4 / 8640.0
                + 31.0 * p4 * PI2 * v2 / 30240.0
                - 127.0 * p4 * p4 / 604800.0
        }
        (3, 1) => -u.ln() - 1.0,
        (3, 2) => polylog(2, 1.0 - u)? + 1.0 - PI2 / 6.0,
        (3, 3) => {
            let log_li2 = if u == 0.0 {
                0.0
            } else {
                u.ln() * polylog(2, u)?
            };
            -2.0 * polylog(3, u)? - polylog(2, 1.0 - u)? + log_li2 + 2.0 * ZETA3 + PI2 / 6.0 - 2.0
        }
        (4, 1) if x == -1.0 => -0.75,
        (4, 1) => 0.5 * x * v / s - 0.25,
        (4, 2) => v2 / 8.0 + 1.0 / 16.0 - PI2 / 24.0,
        (5, 1) => -u.ln() / 3.0 + 1.0 / (6.0 * u) - 7.0 / 9.0,
        (5, 2) => {
            let h = 1.0 + x;
            let log_over = if h == 0.0 {
                -0.5
            } else {
                (-h / 2.0).ln_1p() / h
            };
            polylog(2, 1.0 - u)? / 9.0 - 2.0 * u.ln() / 9.0 + log_over / 9.0 + 1.0 / 81.0
                - PI2 / 54.0
        }
        (6, 1) | (8, 1) if x == -1.0 => even_general(d, x)?,
        (6, 1) => {
            let w = s * s;
            x * v * (0.25 / s + 0.125 / (w * s)) + 0.125 / w - 5.0 / 16.0
        }
        (8, 1) => {
            let w = s * s;
            x * v * (1.0 / (6.0 * s) + 1.0 / (12.0 * w * s) + 1.0 / (16.0 * w * w * s))
                + 1.0 / (16.0 * w)
                + 1.0 / (16.0 * w * w)
                - 5.0 / 18.0
        }
        (7, 1) => -u.ln() / 5.0 + 1.0 / (10.0 * u) + 1.0 / (60.0 * u * u) - 43.0 / 75.0,
        (9, 1) => {
            -u.ln() / 7.0 + 1.0 / (14.0 * u) + 1.0 / (70.0 * u * u) + 1.0 / (420.0 * u.powi(3))
                - 337.0 / 735.0
        }
        (11, 1) => {
            -u.ln() / 9.0
                + 1.0 / (18.0 * u)
                + 1.0 / (84.0 * u * u)
                + 1.0 / (378.0 * u.powi(3))
                + 1.0 / (2520.0 * u.powi(4))
                - 1091.0 / 2835.0
        }
        _ => return Err(Error::NotInCatalog { d, m, ell: 0 }),
    };
    Ok(value)
}

struct EvenForm {
    coeffs: EvenCoeffs,
    /// Taylor coefficients in `w = v^2` about `x = -1`.
    antipodal: Vec<f64>,
}

fn series_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut out = vec![0.0; n];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate().take(n - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Expansion of `k_{2 lambda + 2, 1}` about the antipode. Away from `x = 1` the
/// kernel solves `(1 - x^2) k'' - (2 lambda + 1) x k' = 1` regularly at `x = -1`,
/// i.e. `dk/dv = sin(v)^(-2 lambda) int_0^v sin(p)^(2 lambda) dp`. The constant
/// term is matched to the direct formula at `v = ANTIPODAL_V`.
fn antipodal_taylor(coeffs: &EvenCoeffs) -> Vec<f64> {
    let lambda = coeffs.lambda;
    let n = ANTIPODAL_TERMS;
    // sin(p)/p as a series in w = p^2
    let mut sinc = vec![0.0; n];
    let mut t = 1.0;
    for (k, c) in sinc.iter_mut().enumerate() {
        *c = t;
        t *= -1.0 / ((2 * k + 2) as f64 * (2 * k + 3) as f64);
    }
    let mut pow = vec![0.0; n];
    pow[0] = 1.0;
    for _ in 0..2 * lambda {
        pow = series_mul(&pow, &sinc);
    }
    let inner: Vec<f64> = pow
        .iter()
        .enumerate()
        .map(|(k, c)| c / (2 * lambda + 2 * k + 1) as f64)
        .collect();
    // ratio = inner / pow
    let mut ratio = vec![0.0; n];
    for k in 0..n {
        let acc: f64 = (1..=k).map(|i| pow[i] * ratio[k - i]).sum();
        ratio[k] = (inner[k] - acc) / pow[0];
    }
    let mut taylor = vec![0.0; n + 1];
    for (k, r) in ratio.iter().enumerate() {
        taylor[k + 1] = r / (2 * k + 2) as f64;
    }
    let w = ANTIPODAL_V * ANTIPODAL_V;
    let rest = taylor.iter().rev().fold(0.0, |acc, c| acc * w + c);
    taylor[0] = even_direct(coeffs, -ANTIPODAL_V.cos()) - rest;
    taylor
}

fn even_form(lambda: usize) -> Result<Arc<EvenForm>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<EvenForm>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().expect("cache poisoned").get(&lambda) {
        return Ok(f.clone());
    }
    let coeffs = even_coeffs(lambda)?;
    let antipodal = antipodal_taylor(&coeffs);
    let form = Arc::new(EvenForm { coeffs, antipodal });
    cache
        .lock()
        .expect("cache poisoned")
        .insert(lambda, form.clone());
    Ok(form)
}

fn odd_form(kappa: usize) -> Result<Arc<OddCoeffs>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<OddCoeffs>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(f) = cache.lock().expect("cache poisoned").get(&kappa) {
        return Ok(f.clone());
    }
    let form = Arc::new(odd_coeffs(kappa)?);
    cache
        .lock()
        .expect("cache poisoned")
        .insert(kappa, form.clone());
    Ok(form)
}

/// `k_{2 lambda + 2, 1}` from the general even formula.
pub fn even_general(d: usize, x: f64) -> Result<f64> {
    if d < 4 || d % 2 == 1 || d > MAX_GENERAL_D {
        return Err(Error::NotInCatalog { d, m: 1, ell: 0 });
    }
    let form = even_form((d - 2) / 2)?;
    let (_, v, _) = uv(x);
    if v < ANTIPODAL_V {
        let w = v * v;
        return Ok(form.antipodal.iter().rev().fold(0.0, |acc, c| acc * w + c));
    }
    Ok(even_direct(&form.coeffs, x))
}

fn even_direct(e: &EvenCoeffs, x: f64) -> f64 {
    let (_, v, s) = uv(x);
    let inv = 1.0 / s;
    let inv2 = inv * inv;
    let mut p = inv; // s^(1 - 2j)
    let mut odd = 0.0;
    for c in &e.c {
        odd += c * p;
        p *= inv2;
    }
    let mut p = inv2;
    let mut even = 0.0;
    for dj in &e.dcoef {
        even += dj * p;
        p *= inv2;
    }
    x * v * odd + even - e.cconst
}

/// `k_{2 kappa + 3, 1}` from the general odd formula.
pub fn odd_general(d: usize, x: f64) -> Result<f64> {
    if d < 3 || d.is_multiple_of(2) || d > MAX_GENERAL_D {
        return Err(Error::NotInCatalog { d, m: 1, ell: 0 });
    }
    let o = odd_form((d - 3) / 2)?;
    let u = (1.0 - x) / 2.0;
    let one_minus_x = 1.0 - x;
    let mut value = o.g[0] * u.ln() - o.dconst;
    let inv = 1.0 / one_minus_x;
    let mut p = inv;
    for g in &o.g[1..] {
        value += g * p;
        p *= inv;
    }
    Ok(value)
}
