//! Gegenbauer polynomials, spherical-harmonic dimension counts, the
//! dilogarithm and trilogarithm on `[0, 1]`, and the Beta / Gamma constants
//! consumed by the kernel formulas.

use std::f64::consts::{LN_2, PI};

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Apery's constant.
pub const ZETA3: f64 = 1.202_056_903_159_594_3;

const EDGE_TOL: f64 = 1e-12;

/// Degree `n` and order `lambda` of a Gegenbauer polynomial `C_n^lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerIndex {
    pub n: usize,
    pub lambda: f64,
}

impl GegenbauerIndex {
    pub fn new(n: usize, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain(format!(
                "Gegenbauer order must be >= 0, got {lambda}"
            )));
        }
        Ok(Self { n, lambda })
    }

    /// Order attached to the sphere `S^(d-1)`, `lambda = (d - 2) / 2`.
    pub fn for_dimension(n: usize, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {d}")));
        }
        Self::new(n, (d as f64 - 2.0) / 2.0)
    }
}

/// Checks `|x| <= 1` up to rounding slack and clamps into `[-1, 1]`.
pub(crate) fn check_unit_interval(x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + EDGE_TOL {
        return Err(Error::Domain(format!("argument {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// `C_n^lambda(x)` by the three-term recurrence. Requires `lambda > 0`.
pub fn gegenbauer(idx: GegenbauerIndex, x: f64) -> Result<f64> {
    let x = check_unit_interval(x)?;
    if !(idx.lambda > 0.0) {
        return Err(Error::Domain(
            "gegenbauer needs lambda > 0; use zonal_w for d = 2".into(),
        ));
    }
    Ok(gegenbauer_raw(idx.n, idx.lambda, x))
}

pub(crate) fn gegenbauer_raw(n: usize, lambda: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * lambda * x;
    for k in 2..=n {
        let kf = k as f64;
        let next = (2.0 * x * (kf + lambda - 1.0) * cur - (kf + 2.0 * lambda - 2.0) * prev) / kf;
        prev = cur;
        cur = next;
    }
    cur
}

/// Zonal polynomial `W_n^lambda(xi)`, the Gegenbauer polynomial normalized to
/// `W_n(1) = 1`, with `lambda = (d - 2) / 2`. For `d = 2` this is the
/// Chebyshev limit `cos(n arccos xi)`.
pub fn zonal_w(n: usize, d: usize, xi: f64) -> Result<f64> {
    let xi = check_unit_interval(xi)?;
    if d < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {d}")));
    }
    if d == 2 {
        return Ok((n as f64 * xi.acos()).cos());
    }
    let lambda = (d as f64 - 2.0) / 2.0;
    Ok(gegenbauer_raw(n, lambda, xi) / gegenbauer_raw(n, lambda, 1.0))
}

fn binom_u128(upper: i64, lower: i64) -> Result<u128> {
    if lower < 0 || upper < 0 || lower > upper {
        return Ok(0);
    }
    let k = lower.min(upper - lower) as u128;
    let n = upper as u128;
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc
            .checked_mul(n - k + i)
            .ok_or_else(|| Error::Overflow(format!("binomial({upper}, {lower})")))?
            / i;
    }
    Ok(acc)
}

/// `N_{d,n}`, the dimension of the degree-`n` spherical harmonics on
/// `S^(d-1)`. Binomials with a negative lower index are zero.
pub fn dim_n(d: usize, n: usize) -> Result<u128> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {d}")));
    }
    let (d, n) = (d as i64, n as i64);
    let a = binom_u128(n + d - 1, n)?;
    let b = binom_u128(n + d - 3, n - 2)?;
    Ok(a - b)
}

/// `N_{d,n}` in floating point, valid far beyond the `u128` range of [`dim_n`].
pub fn dim_n_f64(d: usize, n: usize) -> f64 {
    if n == 0 {
        return 1.0;
    }
    if d == 2 {
        return 2.0;
    }
    // N_{d,n} = (2n + d - 2) / (d - 2) * binom(n + d - 3, d - 3)
    let mut binom = 1.0;
    for i in 1..=(d - 3) {
        binom *= (n + i) as f64 / i as f64;
    }
    (2 * n + d - 2) as f64 / (d - 2) as f64 * binom
}

/// Cached `N_{d,n}` for `n = 0..len`.
#[derive(Debug, Clone)]
pub struct DimensionTable {
    d: usize,
    values: Vec<u128>,
}

impl DimensionTable {
    pub fn new(d: usize, len: usize) -> Result<Self> {
        let values = (0..len).map(|n| dim_n(d, n)).collect::<Result<Vec<_>>>()?;
        Ok(Self { d, values })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn get(&self, n: usize) -> Option<u128> {
        self.values.get(n).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn power_series_polylog(s: i32, z: f64) -> f64 {
    let mut sum = 0.0;
    let mut zk = z;
    for k in 1..200 {
        let term = zk / (k as f64).powi(s);
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        zk *= z;
    }
    sum
}

// zeta(-n) for n = 0..=15
const ZETA_NEG: [f64; 16] = [
    -0.5,
    -1.0 / 12.0,
    0.0,
    1.0 / 120.0,
    0.0,
    -1.0 / 252.0,
    0.0,
    1.0 / 240.0,
    0.0,
    -1.0 / 132.0,
    0.0,
    691.0 / 32760.0,
    0.0,
    -1.0 / 12.0,
    0.0,
    3617.0 / 8160.0,
];

fn li2(z: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else if z == 1.0 {
        PI * PI / 6.0
    } else if z <= 0.5 {
        power_series_polylog(2, z)
    } else {
        PI * PI / 6.0 - z.ln() * (-z).ln_1p() - power_series_polylog(2, 1.0 - z)
    }
}

fn li3(z: f64) -> f64 {
    if z == 0.0 {
        return 0.0;
    }
    if z == 1.0 {
        return ZETA3;
    }
    if z <= 0.5 {
        return power_series_polylog(3, z);
    }
    // Expansion in mu = ln z, convergent for |mu| < 2 pi.
    let mu = z.ln();
    let mut sum = ZETA3 + PI * PI / 6.0 * mu + 0.5 * mu * mu * (1.5 - (-mu).ln());
    let mut pow = mu * mu / 2.0;
    for (n, zeta) in ZETA_NEG.iter().enumerate() {
        let k = n + 3;
        pow *= mu / k as f64;
        sum += zeta * pow;
    }
    sum
}

/// `Li_s(z)` for `s` in `{2, 3}` and `z` in `[0, 1]`.
pub fn polylog(s: u32, z: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&z) {
        return Err(Error::Domain(format!(
            "polylog argument {z} outside [0, 1]"
        )));
    }
    match s {
        2 => Ok(li2(z)),
        3 => Ok(li3(z)),
        _ => Err(Error::Domain(format!("polylog order {s} not in {{2, 3}}"))),
    }
}

/// `f_mu = int_{-1}^{1} (1 - y^2)^mu dy`, exact products when `2 mu` is an integer.
pub fn beta_f(mu: f64) -> Result<f64> {
    if !(mu > -1.0) || !mu.is_finite() {
        return Err(Error::Domain(format!("beta_f needs mu > -1, got {mu}")));
    }
    let twice = 2.0 * mu;
    if twice == twice.round() && twice <= 400.0 {
        let twice = twice as i64;
        // f_mu = f_{mu-1} * 2mu / (2mu + 1), from f_0 = 2 or f_{-1/2} = pi
        let (mut f, mut t) = if twice % 2 == 0 { (2.0, 0) } else { (PI, -1) };
        while t < twice {
            t += 2;
            f *= t as f64 / (t + 1) as f64;
        }
        return Ok(f);
    }
    Ok(PI.sqrt() * (ln_gamma(mu + 1.0) - ln_gamma(mu + 1.5)).exp())
}

/// Squared norm `h_n^lambda` of `C_n^lambda` under the weight `(1 - x^2)^(lambda - 1/2)`.
pub fn h_const(n: usize, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!(
            "h_const needs lambda > 0, got {lambda}"
        )));
    }
    let nf = n as f64;
    let ln_h = PI.ln() + ln_gamma(2.0 * lambda + nf)
        - (2.0 * lambda - 1.0) * LN_2
        - ln_gamma(nf + 1.0)
        - (lambda + nf).ln()
        - 2.0 * ln_gamma(lambda);
    let h = ln_h.exp();
    if !h.is_finite() || h == 0.0 {
        return Err(Error::Overflow(format!(
            "h_n^lambda for n = {n}, lambda = {lambda}"
        )));
    }
    Ok(h)
}

/// Surface area `sigma_d` of `S^(d-1)`.
pub fn surface_area(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {d}")));
    }
    let half = d as f64 / 2.0;
    Ok(2.0 * (half * PI.ln() - ln_gamma(half)).exp())
}
