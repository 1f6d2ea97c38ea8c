//! Exact coefficients of the closed forms of `k_{d,1}`.
//!
//! Even `d = 2 lambda + 2`:
//! `k(x) = x v sum_j c_j (1 - x^2)^(1/2 - j) + sum_j d_j (1 - x^2)^(-j) - C_lambda`
//! with `v = pi/2 + arcsin x`.
//!
//! Odd `d = 2 kappa + 3`:
//! `k(x) = g_0 ln((1 - x) / 2) + sum_{nu >= 1} g_nu (1 - x)^(-nu) - D_lambda`.
//!
//! Everything is computed with big rationals and converted at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_ORDER: usize = 30;

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `n!!` with `(-1)!! = 0!! = 1`.
fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

fn factorial(n: i64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

fn pow2(e: i64) -> BigRational {
    if e >= 0 {
        BigRational::from_integer(BigInt::one() << e as usize)
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// `f_{k + 1/2} / pi = (2k + 1)!! / (2k + 2)!!` for `k >= -1`.
fn half_beta_over_pi(k: i64) -> BigRational {
    ratio(double_factorial(2 * k + 1), double_factorial(2 * k + 2))
}

/// `f_k = 2^(2k + 1) (k!)^2 / (2k + 1)!` for integer `k >= 0`.
fn integer_beta(k: i64) -> BigRational {
    pow2(2 * k + 1) * ratio(factorial(k) * factorial(k), factorial(2 * k + 1))
}

/// Exact coefficients for even `d = 2 lambda + 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvenCoeffsExact {
    pub lambda: usize,
    /// `a_0 .. a_lambda`
    pub a: Vec<BigRational>,
    /// `b_1 .. b_lambda`
    pub b: Vec<BigRational>,
    /// `c_1 .. c_lambda`
    pub c: Vec<BigRational>,
    /// `d_1 .. d_{lambda - 1}`
    pub dcoef: Vec<BigRational>,
    pub cconst: BigRational,
}

/// Floating-point view of [`EvenCoeffsExact`].
#[derive(Debug, Clone, PartialEq)]
pub struct EvenCoeffs {
    pub lambda: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub dcoef: Vec<f64>,
    pub cconst: f64,
}

fn check_order(what: &str, value: usize, min: usize) -> Result<()> {
    if value < min {
        return Err(Error::Domain(format!(
            "{what} must be >= {min}, got {value}"
        )));
    }
    if value > MAX_ORDER {
        return Err(Error::Overflow(format!(
            "{what} = {value} exceeds {MAX_ORDER}"
        )));
    }
    Ok(())
}

pub fn even_coeffs_exact(lambda: usize) -> Result<EvenCoeffsExact> {
    check_order("lambda", lambda, 1)?;
    let l = lambda as i64;
    let tail = ratio(double_factorial(2 * l - 1), double_factorial(2 * l));
    let a_j = |j: i64| ratio(double_factorial(2 * j - 2), double_factorial(2 * j - 1)) * &tail;
    let mut a = vec![a_j(1)];
    a.extend((1..=l).map(a_j));

    let b_tail = ratio(double_factorial(2 * l - 2), double_factorial(2 * l - 1));
    let b: Vec<BigRational> = (1..=l)
        .map(|j| {
            ratio(BigInt::one(), BigInt::from(2 * j - 1))
                * ratio(double_factorial(2 * j - 1), double_factorial(2 * j - 2))
                * &b_tail
        })
        .collect();
    let c: Vec<BigRational> = b.iter().map(|bj| &a[0] * bj).collect();
    let dcoef: Vec<BigRational> = (1..l)
        .map(|j| (&a[(l - j) as usize] - &c[j as usize]) / int(2 * j))
        .collect();

    let mut num = BigRational::zero();
    for j in 1..=l {
        num += &c[(j - 1) as usize] * half_beta_over_pi(l - j) / int(2 * (l - j + 1));
    }
    for j in 1..l {
        num += &dcoef[(j - 1) as usize] * half_beta_over_pi(l - j - 1);
    }
    let cconst = num / half_beta_over_pi(l - 1);
    Ok(EvenCoeffsExact {
        lambda,
        a,
        b,
        c,
        dcoef,
        cconst,
    })
}

pub fn even_coeffs(lambda: usize) -> Result<EvenCoeffs> {
    let e = even_coeffs_exact(lambda)?;
    let v = |xs: &[BigRational]| xs.iter().map(to_f64).collect::<Vec<_>>();
    Ok(EvenCoeffs {
        lambda,
        a: v(&e.a),
        b: v(&e.b),
        c: v(&e.c),
        dcoef: v(&e.dcoef),
        cconst: to_f64(&e.cconst),
    })
}

/// Exact coefficients for odd `d = 2 kappa + 3`.
#[derive(Debug, Clone, PartialEq)]
pub struct OddCoeffsExact {
    pub kappa: usize,
    /// `g_0 .. g_kappa`
    pub g: Vec<BigRational>,
    pub dconst: BigRational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OddCoeffs {
    pub kappa: usize,
    pub g: Vec<f64>,
    pub dconst: f64,
}

pub fn odd_coeffs_exact(kappa: usize) -> Result<OddCoeffsExact> {
    check_order("kappa", kappa, 0)?;
    let k = kappa as i64;
    let denom = factorial(2 * k + 1);
    let mut g = vec![ratio(BigInt::from(-1), BigInt::from(2 * k + 1))];
    for nu in 1..=k {
        let num = (BigInt::one() << nu as usize)
            * binomial(k, nu)
            * factorial(nu - 1)
            * factorial(2 * k - nu);
        g.push(ratio(num, denom.clone()));
    }
    let mut num = &g[0] * log_moment_exact(kappa)?;
    for nu in 1..=kappa {
        num += &g[nu] * g_at_one_exact(nu, kappa)?;
    }
    let dconst = num / integer_beta(k);
    Ok(OddCoeffsExact { kappa, g, dconst })
}

pub fn odd_coeffs(kappa: usize) -> Result<OddCoeffs> {
    let o = odd_coeffs_exact(kappa)?;
    Ok(OddCoeffs {
        kappa,
        g: o.g.iter().map(to_f64).collect(),
        dconst: to_f64(&o.dconst),
    })
}

/// `int_{-1}^{1} (1 - x^2)^kappa (1 - x)^(-nu) dx`.
pub fn g_at_one_exact(nu: usize, kappa: usize) -> Result<BigRational> {
    if nu > kappa {
        return Err(Error::Domain(format!(
            "need 0 <= nu <= kappa, got nu = {nu}, kappa = {kappa}"
        )));
    }
    let (n, k) = (nu as i64, kappa as i64);
    Ok(pow2(2 * k - n + 1) * ratio(factorial(k) * factorial(k - n), factorial(2 * k - n + 1)))
}

#[allow(non_snake_case)]
pub fn G_at_one(nu: usize, kappa: usize) -> Result<f64> {
    g_at_one_exact(nu, kappa).map(|r| to_f64(&r))
}

/// `sum_{nu=0}^{beta} binom(beta, nu) (-1)^nu / (alpha - nu)` by its closed
/// form `(-1)^beta beta! / (alpha (alpha - 1) ... (alpha - beta))`.
pub fn j_sum_exact(beta: usize, alpha: i64) -> Result<BigRational> {
    let b = beta as i64;
    let mut den = BigInt::one();
    for nu in 0..=b {
        let f = alpha - nu;
        if f == 0 {
            return Err(Error::DivisionByZero(format!(
                "alpha - nu vanishes at nu = {nu} (alpha = {alpha}, beta = {beta})"
            )));
        }
        den *= f;
    }
    let sign = if beta.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    Ok(ratio(sign * factorial(b), den))
}

#[allow(non_snake_case)]
pub fn J_sum(beta: usize, alpha: i64) -> Result<f64> {
    j_sum_exact(beta, alpha).map(|r| to_f64(&r))
}

/// `int_{-1}^{1} (1 - x^2)^kappa ln((1 - x) / 2) dx`.
pub fn log_moment_exact(kappa: usize) -> Result<BigRational> {
    let k = kappa as i64;
    let mut sum = BigRational::zero();
    for nu in 0..=k {
        let den = BigInt::from(2 * k - nu + 1);
        let term = ratio(binomial(k, nu), &den * &den);
        if nu % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let signed = if kappa.is_multiple_of(2) { -sum } else { sum };
    Ok(pow2(2 * k + 1) * signed)
}

pub fn log_moment(kappa: usize) -> Result<f64> {
    log_moment_exact(kappa).map(|r| to_f64(&r))
}

/// Truncated power series in `w` with rational coefficients.
fn series_mul(a: &[BigRational], b: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

fn series_inverse(a: &[BigRational], len: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); len];
    out[0] = BigRational::one() / &a[0];
    for n in 1..len {
        let mut acc = BigRational::zero();
        for k in 1..=n.min(a.len() - 1) {
            acc += &a[k] * &out[n - k];
        }
        out[n] = -acc / &a[0];
    }
    out
}

/// Taylor coefficients `t_0 .. t_{terms-1}` of the even-`d` closed form of
/// `k_{2 lambda + 2, 1}` as a power series in `w = v^2` about the antipode
/// `x = -1` (`v = 0`). The closed form has a removable singularity there;
/// the negative powers are checked to cancel exactly.
pub fn even_antipodal_series(lambda: usize, terms: usize) -> Result<Vec<f64>> {
    let e = even_coeffs_exact(lambda)?;
    let shift = lambda; // lowest power is w^{-(lambda - 1)}; one slot of headroom
    let len = terms + shift;
    let mut sinc = Vec::with_capacity(len);
    let mut cos = Vec::with_capacity(len);
    // sin(v)/v = sum (-1)^k w^k / (2k+1)!,  cos v = sum (-1)^k w^k / (2k)!
    let mut even = BigInt::one();
    for k in 0..len as i64 {
        if k > 0 {
            even *= (2 * k - 1) * (2 * k);
        }
        let odd = &even * BigInt::from(2 * k + 1);
        let sign = if k % 2 == 0 {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        cos.push(ratio(sign.clone(), even.clone()));
        sinc.push(ratio(sign, odd));
    }
    let q = series_inverse(&sinc, len);
    // laurent[i] holds the coefficient of w^{i - shift}
    let mut laurent = vec![BigRational::zero(); len];
    let mut qpow = q.clone(); // q^(2j - 1), starting at j = 1
    let q2 = series_mul(&q, &q, len);
    for j in 1..=lambda {
        if j > 1 {
            qpow = series_mul(&qpow, &q2, len);
        }
        // -c_j cos(v) q^(2j-1) w^{-(j-1)}
        let term = series_mul(&cos, &qpow, len);
        let offset = shift - (j - 1);
        for (i, t) in term.iter().enumerate() {
            if i + offset < len {
                laurent[i + offset] -= &e.c[j - 1] * t;
            }
        }
        if j < lambda {
            // d_j q^(2j) w^{-j}
            let qq = series_mul(&qpow, &q, len);
            let offset = shift - j;
            for (i, t) in qq.iter().enumerate() {
                if i + offset < len {
                    laurent[i + offset] += &e.dcoef[j - 1] * t;
                }
            }
        }
    }
    laurent[shift] -= &e.cconst;
    if let Some(bad) = laurent[..shift].iter().position(|r| !r.is_zero()) {
        return Err(Error::Domain(format!(
            "antipodal expansion for lambda = {lambda} keeps w^{} with coefficient {}",
            bad as i64 - shift as i64,
            to_f64(&laurent[bad]).abs()
        )));
    }
    Ok(laurent[shift..].iter().map(to_f64).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use approx::assert_abs_diff_eq;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn even_examples() {
        let e = even_coeffs_exact(1).unwrap();
        assert_eq!(e.c, vec![q(1, 2)]);
        assert_eq!(e.cconst, q(1, 4));
        assert!(e.dcoef.is_empty());

        let e = even_coeffs_exact(2).unwrap();
        assert_eq!(e.c, vec![q(1, 4), q(1, 8)]);
        assert_eq!(e.dcoef, vec![q(1, 8)]);
        assert_eq!(e.cconst, q(5, 16));

        let e = even_coeffs_exact(3).unwrap();
        assert_eq!(e.c, vec![q(1, 6), q(1, 12), q(1, 16)]);
        assert_eq!(e.dcoef, vec![q(1, 16), q(1, 16)]);
        assert_eq!(e.cconst, q(5, 18));

        let f = even_coeffs(3).unwrap();
        assert_abs_diff_eq!(f.cconst, 5.0 / 18.0, epsilon = 1e-15);
        assert!(matches!(even_coeffs(0), Err(Error::Domain(_))));
        assert!(matches!(even_coeffs(31), Err(Error::Overflow(_))));
    }

    #[test]
    fn even_invariants() {
        for lambda in 1..=30 {
            let e = even_coeffs_exact(lambda).unwrap();
            let l = lambda as i64;
            assert_eq!(e.a[0], e.a[1]);
            assert_eq!(e.a[lambda], q(1, 2 * l));
            assert_eq!(e.b[lambda - 1], q(1, 2 * l - 1));
            assert_eq!(&e.a[0] * &e.b[0], e.a[lambda], "a_0 b_1 = a_lambda");
            for j in 0..lambda {
                assert_eq!(e.c[j], &e.a[0] * &e.b[j]);
            }
        }
    }

    #[test]
    fn odd_examples() {
        let o = odd_coeffs_exact(2).unwrap();
        assert_eq!(o.g, vec![q(-1, 5), q(1, 5), q(1, 15)]);
        assert_eq!(o.dconst, q(43, 75));
        assert_eq!(odd_coeffs_exact(3).unwrap().dconst, q(337, 735));
        assert_eq!(odd_coeffs_exact(4).unwrap().dconst, q(1091, 2835));
        // kappa = 0 reproduces k_{3,1} = -ln u - 1
        let o = odd_coeffs_exact(0).unwrap();
        assert_eq!(o.g, vec![q(-1, 1)]);
        assert_eq!(o.dconst, q(1, 1));
        // the d = 9 and d = 11 catalogue coefficients of u^{-nu}, (1 - x)^{-nu} = (2u)^{-nu}
        let o = odd_coeffs_exact(3).unwrap();
        let u_coeffs: Vec<_> = (1..=3).map(|nu| &o.g[nu] / pow2(nu as i64)).collect();
        assert_eq!(u_coeffs, vec![q(1, 14), q(1, 70), q(1, 420)]);
        let o = odd_coeffs_exact(4).unwrap();
        let u_coeffs: Vec<_> = (1..=4).map(|nu| &o.g[nu] / pow2(nu as i64)).collect();
        assert_eq!(u_coeffs, vec![q(1, 18), q(1, 84), q(1, 378), q(1, 2520)]);
    }

    #[test]
    fn odd_invariants() {
        for kappa in 0..=30 {
            let o = odd_coeffs_exact(kappa).unwrap();
            let k = kappa as i64;
            assert_eq!(o.g[0], q(-1, 2 * k + 1));
            if kappa >= 1 {
                assert_eq!(o.g[1], q(1, 2 * k + 1));
            }
        }
        assert!(matches!(odd_coeffs(31), Err(Error::Overflow(_))));
    }

    #[test]
    fn g_at_one_examples() {
        assert_eq!(g_at_one_exact(0, 0).unwrap(), q(2, 1));
        assert_eq!(g_at_one_exact(1, 2).unwrap(), q(4, 3));
        assert_eq!(g_at_one_exact(2, 2).unwrap(), q(8, 3));
        assert!(G_at_one(3, 2).is_err());
    }

    #[test]
    fn g_at_one_matches_quadrature() {
        for kappa in 0..=8usize {
            for nu in 0..=kappa {
                let f = |x: f64| (1.0 - x * x).powi(kappa as i32) * (1.0 - x).powi(-(nu as i32));
                let r = integrate(f, &[-1.0, 0.0, 1.0], 1e-13, 1e-14).unwrap();
                let want = G_at_one(nu, kappa).unwrap();
                assert!(
                    (r.value - want).abs() <= 1e-10 * want.max(1.0),
                    "kappa={kappa} nu={nu}"
                );
            }
        }
    }

    #[test]
    fn j_sum_examples() {
        assert_eq!(j_sum_exact(0, 5).unwrap(), q(1, 5));
        assert_eq!(j_sum_exact(2, 5).unwrap(), q(1, 30));
        assert_eq!(j_sum_exact(1, 3).unwrap(), q(-1, 6));
        assert!(matches!(J_sum(3, 2), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn j_sum_matches_brute_force() {
        for beta in 0..=12usize {
            for alpha in -12i64..=25 {
                let b = beta as i64;
                let valid = (0..=b).all(|nu| alpha - nu != 0);
                if !valid {
                    assert!(j_sum_exact(beta, alpha).is_err());
                    continue;
                }
                let brute = (0..=b).fold(BigRational::zero(), |acc, nu| {
                    let t = BigRational::new(binomial(b, nu), BigInt::from(alpha - nu));
                    if nu % 2 == 0 {
                        acc + t
                    } else {
                        acc - t
                    }
                });
                assert_eq!(
                    j_sum_exact(beta, alpha).unwrap(),
                    brute,
                    "beta={beta} alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn log_moment_examples() {
        assert_eq!(log_moment_exact(0).unwrap(), q(-2, 1));
        // 2^3 (1/9 - 1/4) = -10/9 with sign (-1)^2
        assert_eq!(log_moment_exact(1).unwrap(), q(-10, 9));
        assert_abs_diff_eq!(
            log_moment(2).unwrap(),
            -32.0 * (1.0 / 25.0 - 2.0 / 16.0 + 1.0 / 9.0),
            epsilon = 1e-14
        );
        for kappa in 0..=6usize {
            let f = |x: f64| (1.0 - x * x).powi(kappa as i32) * ((1.0 - x) / 2.0).ln();
            let r = integrate(f, &[-1.0, 0.0, 1.0], 1e-13, 1e-14).unwrap();
            assert_abs_diff_eq!(r.value, log_moment(kappa).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn antipodal_series_matches_closed_form_value() {
        for lambda in 1..=5 {
            let t = even_antipodal_series(lambda, 30).unwrap();
            let e = even_coeffs(lambda).unwrap();
            // evaluate at v = 0.7 both ways
            let v: f64 = 0.7;
            let x = -v.cos();
            let s = v.sin();
            let direct: f64 = (1..=lambda)
                .map(|j| e.c[j - 1] * x * v * s.powi(1 - 2 * j as i32))
                .sum::<f64>()
                + (1..lambda)
                    .map(|j| e.dcoef[j - 1] * s.powi(-2 * j as i32))
                    .sum::<f64>()
                - e.cconst;
            let w = v * v;
            let series: f64 = t.iter().rev().fold(0.0, |acc, c| acc * w + c);
            assert_abs_diff_eq!(direct, series, epsilon = 1e-12);
        }
    }
}
