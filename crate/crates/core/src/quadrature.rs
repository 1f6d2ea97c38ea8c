//! Quadrature primitives: Gauss-Legendre panels with cumulative integration
//! matrices, and a globally adaptive Gauss-Kronrod (7, 15) integrator.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `P_0(t), ..., P_{n}(t)`.
fn legendre_all(n: usize, t: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(t);
    }
    for k in 2..=n {
        let kf = k as f64;
        let next = ((2.0 * kf - 1.0) * t * p[k - 1] - (kf - 1.0) * p[k - 2]) / kf;
        p.push(next);
    }
    p
}

/// A Gauss-Legendre reference panel on `[-1, 1]` that can integrate its
/// polynomial interpolant from `-1` to any point.
#[derive(Debug, Clone)]
pub struct GaussPanel {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `legendre[j][k] = P_k(t_j) (2k + 1) / 2 * w_j`
    legendre: Vec<Vec<f64>>,
    /// `cumulative[i][j] = int_{-1}^{t_i} l_j(s) ds`
    cumulative: Vec<Vec<f64>>,
}

impl GaussPanel {
    pub fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        let legendre: Vec<Vec<f64>> = nodes
            .iter()
            .zip(&weights)
            .map(|(&t, &w)| {
                legendre_all(n - 1, t)
                    .into_iter()
                    .enumerate()
                    .map(|(k, p)| p * (2.0 * k as f64 + 1.0) / 2.0 * w)
                    .collect()
            })
            .collect();
        let mut panel = Self {
            nodes,
            weights,
            legendre,
            cumulative: Vec::new(),
        };
        panel.cumulative = panel
            .nodes
            .iter()
            .map(|&t| panel.cumulative_row(t))
            .collect();
        panel
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Row `r_j = int_{-1}^{t} l_j(s) ds` for the Lagrange basis at the nodes.
    pub fn cumulative_row(&self, t: f64) -> Vec<f64> {
        let n = self.len();
        let p = legendre_all(n, t);
        // int_{-1}^t P_k = (P_{k+1}(t) - P_{k-1}(t)) / (2k + 1), and t + 1 for k = 0
        let ints: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 {
                    t + 1.0
                } else {
                    (p[k + 1] - p[k - 1]) / (2.0 * k as f64 + 1.0)
                }
            })
            .collect();
        self.legendre
            .iter()
            .map(|row| row.iter().zip(&ints).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Cumulative integrals from `-1` to every node, given values at the nodes.
    pub fn cumulative(&self, values: &[f64]) -> Vec<f64> {
        self.cumulative
            .iter()
            .map(|row| row.iter().zip(values).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Value of the interpolant through `values` at `t`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        let n = self.len();
        let p = legendre_all(n - 1, t);
        self.legendre
            .iter()
            .zip(values)
            .map(|(row, v)| v * row.iter().zip(&p).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Result<Segment> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut abs = WGK[7] * fc.abs();
    let mut finite = fc.is_finite();
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        let s = f1 + f2;
        finite &= s.is_finite();
        kronrod += WGK[j] * s;
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    if !finite {
        return Err(Error::QuadratureFailure(format!(
            "non-finite integrand on [{a}, {b}]"
        )));
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * h,
        error: ((kronrod - gauss) * h).abs(),
        abs: abs * h.abs(),
    })
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Globally adaptive Gauss-Kronrod integration of `f` over the
/// concatenation of the intervals given by `breaks` (ascending).
///
/// The requested tolerance is relaxed to a rounding floor proportional to
/// `int |f|`; the returned `error` is the honest estimate either way.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<Integral> {
    const MAX_SEGMENTS: usize = 20_000;
    let mut segments: Vec<Segment> = Vec::new();
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            segments.push(gk15(&mut f, w[0], w[1])?);
        }
    }
    let mut evaluations = 15 * segments.len();
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let floor = 50.0 * f64::EPSILON * segments.iter().map(|s| s.abs).sum::<f64>();
        if error <= abs_tol.max(rel_tol * value.abs()).max(floor) {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if segments.len() >= MAX_SEGMENTS {
            return Err(Error::QuadratureFailure(format!(
                "no convergence after {MAX_SEGMENTS} subdivisions (error {error:e})"
            )));
        }
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty");
        let Segment { a, b, .. } = segments.swap_remove(idx);
        let mid = 0.5 * (a + b);
        if !(mid > a && mid < b) {
            return Err(Error::QuadratureFailure(format!(
                "interval [{a}, {b}] cannot be bisected further"
            )));
        }
        segments.push(gk15(&mut f, a, mid)?);
        segments.push(gk15(&mut f, mid, b)?);
        evaluations += 30;
    }
}
