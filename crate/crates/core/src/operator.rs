//! The operators
//!
//! `T f(x)  = - int_{-1}^{x} (1 - y^2)^(-lambda - 1/2) int_{-1}^{y} (1 - z^2)^(lambda - 1/2) f(z) dz dy`
//! `T* f(x) = - int_{x}^{1}  (1 - y^2)^(-lambda - 1/2) int_{y}^{1}  (1 - z^2)^(lambda - 1/2) f(z) dz dy`
//!
//! the weighted inner product `[f, g] = int f g (1 - x^2)^(lambda - 1/2) dx`, and
//! the kernel recurrence built from them.
//!
//! Everything is computed on a fixed grid in `phi` with `x = -cos(phi)`, where
//! the weights become powers of `sin(phi)`. The grid is a union of Gauss panels
//! refined geometrically toward both endpoints, so the nested integrals reduce
//! to cumulative panel sums and tolerate integrable endpoint singularities.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::quadrature::GaussPanel;

const PANEL_NODES: usize = 20;
const GRADING_LEVELS: usize = 40;

/// A function on `[-1, 1]` known through an evaluation callback. The flags
/// record whether the endpoints are finite; the grid never samples them.
pub struct TabulatedFunction<'a> {
    f: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
    pub finite_at_minus_one: bool,
    pub finite_at_one: bool,
}

impl<'a> TabulatedFunction<'a> {
    pub fn new(f: impl Fn(f64) -> f64 + Sync + 'a) -> Self {
        Self {
            f: Box::new(f),
            finite_at_minus_one: true,
            finite_at_one: true,
        }
    }

    pub fn singular_at_one(mut self) -> Self {
        self.finite_at_one = false;
        self
    }

    pub fn singular_at_minus_one(mut self) -> Self {
        self.finite_at_minus_one = false;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

/// Graded quadrature grid for a fixed `lambda > 0`.
#[derive(Debug, Clone)]
pub struct OperatorGrid {
    lambda: f64,
    panel: GaussPanel,
    breaks: Vec<f64>,
    phi: Vec<f64>,
    x: Vec<f64>,
    /// `sin(phi)^(2 lambda)`
    sin_pow: Vec<f64>,
    /// quadrature weights in `phi`
    weights: Vec<f64>,
}

impl OperatorGrid {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            let d = (2.0 * lambda + 2.0).round().max(0.0) as usize;
            return Err(Error::DegenerateLambda(d));
        }
        let mut left = vec![0.0];
        for k in (0..GRADING_LEVELS).rev() {
            left.push(FRAC_PI_2 * 0.5f64.powi(k as i32));
        }
        let mut breaks = left.clone();
        for b in left.iter().rev().skip(1) {
            breaks.push(PI - b);
        }
        let panel = GaussPanel::new(PANEL_NODES);
        let mut phi = Vec::new();
        let mut weights = Vec::new();
        for w in breaks.windows(2) {
            let (mid, half) = ((w[0] + w[1]) / 2.0, (w[1] - w[0]) / 2.0);
            for (t, wt) in panel.nodes.iter().zip(&panel.weights) {
                phi.push(mid + half * t);
                weights.push(half * wt);
            }
        }
        let x = phi.iter().map(|p| -p.cos()).collect();
        let sin_pow = phi.iter().map(|p| p.sin().powf(2.0 * lambda)).collect();
        Ok(Self {
            lambda,
            panel,
            breaks,
            phi,
            x,
            sin_pow,
            weights,
        })
    }

    pub fn for_dimension(d: usize) -> Result<Self> {
        if d < 3 {
            return Err(Error::DegenerateLambda(d));
        }
        Self::new((d as f64 - 2.0) / 2.0)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Grid abscissae in `x`, ascending.
    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn sample(&self, f: &TabulatedFunction) -> Vec<f64> {
        self.x.iter().map(|&x| f.eval(x)).collect()
    }

    /// `[f, g]_lambda` for functions given by their values at the nodes.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(&self.sin_pow)
            .zip(f.iter().zip(g))
            .map(|((w, s), (a, b))| w * s * a * b)
            .sum()
    }

    /// `int_0^phi values` at every node, panel by panel.
    fn cumulative(&self, values: &[f64]) -> Vec<f64> {
        let n = PANEL_NODES;
        let mut out = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        for (p, w) in self.breaks.windows(2).enumerate() {
            let half = (w[1] - w[0]) / 2.0;
            let chunk = &values[p * n..(p + 1) * n];
            out.extend(
                self.panel
                    .cumulative(chunk)
                    .into_iter()
                    .map(|c| acc + half * c),
            );
            acc += half
                * chunk
                    .iter()
                    .zip(&self.panel.weights)
                    .map(|(v, w)| v * w)
                    .sum::<f64>();
        }
        out
    }

    fn reversed(values: &[f64]) -> Vec<f64> {
        values.iter().rev().copied().collect()
    }

    /// `T f` for `f` given at the nodes.
    pub fn apply_t(&self, f: &[f64]) -> Result<GridFunction> {
        if f.len() != self.x.len() {
            return Err(Error::DimensionMismatch {
                expected: self.x.len(),
                got: f.len(),
            });
        }
        let h: Vec<f64> = f.iter().zip(&self.sin_pow).map(|(a, s)| a * s).collect();
        let left = self.cumulative(&h);
        // the grid is symmetric, so the integral from phi to pi is a reversed cumulative
        let right = Self::reversed(&self.cumulative(&Self::reversed(&h)));
        let scale: f64 = h
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| (a * w).abs())
            .sum();
        let mut total: f64 = h.iter().zip(&self.weights).map(|(a, w)| a * w).sum();
        if total.abs() <= 1e-13 * scale {
            total = 0.0;
        }
        let outer: Vec<f64> = self
            .phi
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                let inner = if p <= FRAC_PI_2 {
                    left[i]
                } else {
                    total - right[i]
                };
                inner / self.sin_pow[i]
            })
            .collect();
        let cum = self.cumulative(&outer);
        let n = PANEL_NODES;
        let mut starts = Vec::with_capacity(self.breaks.len() - 1);
        let mut acc = 0.0;
        for (p, w) in self.breaks.windows(2).enumerate() {
            starts.push(acc);
            let half = (w[1] - w[0]) / 2.0;
            acc += half
                * outer[p * n..(p + 1) * n]
                    .iter()
                    .zip(&self.panel.weights)
                    .map(|(v, w)| v * w)
                    .sum::<f64>();
        }
        Ok(GridFunction {
            grid: self.clone(),
            values: cum.iter().map(|c| -c).collect(),
            outer,
            starts,
            end: -acc,
            divergent_at_end: total != 0.0 && self.lambda >= 0.5,
            mirrored: false,
            offset: 0.0,
            scale: 1.0,
        })
    }

    /// `T* f` for `f` given at the nodes, via `T* f(x) = T[f(-.)](-x)`.
    pub fn apply_tstar(&self, f: &[f64]) -> Result<GridFunction> {
        let mut g = self.apply_t(&Self::reversed(f))?;
        g.values.reverse();
        g.mirrored = true;
        Ok(g)
    }
}

/// Result of `T` or `T*` on an [`OperatorGrid`], affinely transformed as
/// `offset + scale * (T f)`.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: OperatorGrid,
    values: Vec<f64>,
    outer: Vec<f64>,
    starts: Vec<f64>,
    end: f64,
    divergent_at_end: bool,
    mirrored: bool,
    offset: f64,
    scale: f64,
}

impl GridFunction {
    /// Values at the grid nodes.
    pub fn values(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| self.offset + self.scale * v)
            .collect()
    }

    pub fn shifted(mut self, offset: f64, scale: f64) -> Self {
        self.offset = offset + scale * self.offset;
        self.scale *= scale;
        self
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let x = crate::special::check_unit_interval(x)?;
        let x = if self.mirrored { -x } else { x };
        let phi = (-x).acos();
        let raw = if phi >= PI {
            if self.divergent_at_end {
                let side = if self.mirrored { "-1" } else { "1" };
                return Err(Error::QuadratureFailure(format!(
                    "operator image diverges at x = {side} (f has nonzero weighted mean)"
                )));
            }
            self.end
        } else {
            let g = &self.grid;
            let p = g
                .breaks
                .partition_point(|b| *b <= phi)
                .saturating_sub(1)
                .min(g.breaks.len() - 2);
            let (a, b) = (g.breaks[p], g.breaks[p + 1]);
            let half = (b - a) / 2.0;
            let t = ((phi - a) / half - 1.0).clamp(-1.0, 1.0);
            let row = g.panel.cumulative_row(t);
            let chunk = &self.outer[p * PANEL_NODES..(p + 1) * PANEL_NODES];
            -(self.starts[p] + half * row.iter().zip(chunk).map(|(r, v)| r * v).sum::<f64>())
        };
        Ok(self.offset + self.scale * raw)
    }
}

/// `[f, g]_lambda`.
pub fn inner_lambda(f: &TabulatedFunction, g: &TabulatedFunction, lambda: f64) -> Result<f64> {
    let grid = OperatorGrid::new(lambda)?;
    let value = grid.inner(&grid.sample(f), &grid.sample(g));
    if !value.is_finite() {
        return Err(Error::QuadratureFailure(
            "inner product is not finite".into(),
        ));
    }
    Ok(value)
}

/// `(T_lambda f)(x)`.
pub fn apply_t(f: &TabulatedFunction, lambda: f64, x: f64) -> Result<f64> {
    let grid = OperatorGrid::new(lambda)?;
    grid.apply_t(&grid.sample(f))?.eval(x)
}

/// `(T*_lambda f)(x)`.
pub fn apply_tstar(f: &TabulatedFunction, lambda: f64, x: f64) -> Result<f64> {
    let grid = OperatorGrid::new(lambda)?;
    grid.apply_tstar(&grid.sample(f))?.eval(x)
}

/// The functions `k_{d,1}, ..., k_{d,m}` generated by
/// `k_1 = [e0, T e0] / [e0, e0] - T e0` and
/// `k_m = T k_{m-1} - [e0, T k_{m-1}] / [e0, e0]`.
pub struct KernelRecurrence {
    pub d: usize,
    steps: Vec<GridFunction>,
    grid: OperatorGrid,
}

impl KernelRecurrence {
    pub fn new(d: usize, m_target: usize) -> Result<Self> {
        if m_target == 0 {
            return Err(Error::Domain("recurrence needs m >= 1".into()));
        }
        let grid = OperatorGrid::for_dimension(d)?;
        let e0 = vec![1.0; grid.nodes().len()];
        let norm = grid.inner(&e0, &e0);
        let t_e0 = grid.apply_t(&e0)?;
        let c = grid.inner(&e0, &t_e0.values()) / norm;
        let mut steps = vec![t_e0.shifted(c, -1.0)];
        for _ in 1..m_target {
            let prev = steps.last().expect("non-empty").values();
            let t = grid.apply_t(&prev)?;
            let c = grid.inner(&e0, &t.values()) / norm;
            steps.push(t.shifted(-c, 1.0));
        }
        Ok(Self { d, steps, grid })
    }

    /// `k_{d,m}(x)` for `1 <= m <= m_target`.
    pub fn eval(&self, m: usize, x: f64) -> Result<f64> {
        let step = self
            .steps
            .get(m.wrapping_sub(1))
            .ok_or_else(|| Error::Domain(format!("m = {m} outside 1..={}", self.steps.len())))?;
        step.eval(x)
    }

    /// `[k_{d,m}, e0]_lambda` on the grid.
    pub fn mean(&self, m: usize) -> Result<f64> {
        let step = self
            .steps
            .get(m.wrapping_sub(1))
            .ok_or_else(|| Error::Domain(format!("m = {m}")))?;
        let e0 = vec![1.0; self.grid.nodes().len()];
        Ok(self.grid.inner(&step.values(), &e0))
    }
}

/// `k_{d,m}(x)` by the operator recurrence.
pub fn recurrence_k(d: usize, m_target: usize, x: f64) -> Result<f64> {
    KernelRecurrence::new(d, m_target)?.eval(m_target, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::k_closed;
    use crate::special::{beta_f, gegenbauer, h_const, polylog, GegenbauerIndex};
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cn(n: usize, lambda: f64) -> impl Fn(f64) -> f64 + Sync {
        move |x| gegenbauer(GegenbauerIndex::new(n, lambda).unwrap(), x.clamp(-1.0, 1.0)).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let one = TabulatedFunction::new(|_| 1.0);
        assert_abs_diff_eq!(
            inner_lambda(&one, &one, 1.0).unwrap(),
            PI / 2.0,
            epsilon = 1e-13
        );
        let (c1, c2) = (
            TabulatedFunction::new(cn(1, 1.0)),
            TabulatedFunction::new(cn(2, 1.0)),
        );
        assert_abs_diff_eq!(inner_lambda(&c1, &c2, 1.0).unwrap(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(
            inner_lambda(&c2, &c2, 1.0).unwrap(),
            h_const(2, 1.0).unwrap(),
            epsilon = 1e-12
        );
        for lambda in [0.5, 1.5, 2.5, 4.0] {
            assert_abs_diff_eq!(
                inner_lambda(&one, &one, lambda).unwrap(),
                beta_f(lambda - 0.5).unwrap(),
                epsilon = 1e-12
            );
        }
        assert!(matches!(
            inner_lambda(&one, &one, 0.0),
            Err(Error::DegenerateLambda(2))
        ));
    }

    #[test]
    fn gegenbauer_orthogonality() {
        for lambda in [0.5, 1.0, 1.5, 3.0] {
            let grid = OperatorGrid::new(lambda).unwrap();
            let vals: Vec<Vec<f64>> = (0..=20)
                .map(|n| grid.sample(&TabulatedFunction::new(cn(n, lambda))))
                .collect();
            for n in 0..=20 {
                for m in 0..=20 {
                    let got = grid.inner(&vals[n], &vals[m]);
                    let (hn, hm) = (h_const(n, lambda).unwrap(), h_const(m, lambda).unwrap());
                    let want = if n == m { hn } else { 0.0 };
                    assert!(
                        (got - want).abs() <= 1e-10 * (hn * hm).sqrt(),
                        "lambda={lambda} n={n} m={m}: {got}"
                    );
                }
            }
        }
    }

    #[test]
    fn eigen_relations() {
        for lambda in [1.0, 1.5, 2.0] {
            for n in 1..=6 {
                let f = TabulatedFunction::new(cn(n, lambda));
                let grid = OperatorGrid::new(lambda).unwrap();
                let t = grid.apply_t(&grid.sample(&f)).unwrap();
                let ts = grid.apply_tstar(&grid.sample(&f)).unwrap();
                let nn = (n as f64) * (n as f64 + 2.0 * lambda);
                for i in 0..=10 {
                    let x = -1.0 + 0.2 * i as f64;
                    let want_t = (f.eval(x) - f.eval(-1.0)) / nn;
                    let want_ts = (f.eval(x) - f.eval(1.0)) / nn;
                    assert!(
                        (t.eval(x).unwrap() - want_t).abs() <= 1e-9,
                        "T lambda={lambda} n={n} x={x}"
                    );
                    assert!(
                        (ts.eval(x).unwrap() - want_ts).abs() <= 1e-9,
                        "T* lambda={lambda} n={n} x={x}"
                    );
                }
            }
        }
        let zero = TabulatedFunction::new(|_| 0.0);
        assert_eq!(apply_t(&zero, 1.0, 0.3).unwrap(), 0.0);
        assert_eq!(apply_tstar(&zero, 1.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn t_of_constant_at_lambda_one() {
        let one = TabulatedFunction::new(|_| 1.0);
        for x in [-1.0f64, -0.9, -0.3, 0.0, 0.4, 0.95] {
            let s = (1.0 - x * x).sqrt();
            let want = if x == -1.0 {
                0.0
            } else {
                -(0.5 * x * (-x).acos() / s + 0.5)
            };
            assert_abs_diff_eq!(apply_t(&one, 1.0, x).unwrap(), want, epsilon = 1e-11);
        }
        assert!(matches!(
            apply_t(&one, 1.0, 1.0),
            Err(Error::QuadratureFailure(_))
        ));
        assert!(matches!(
            apply_tstar(&one, 1.0, -1.0),
            Err(Error::QuadratureFailure(_))
        ));
    }

    #[test]
    fn adjointness() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let lambda = [0.5, 1.0, 1.5, 2.0][rng.gen_range(0..4)];
            let pf: Vec<f64> = (0..rng.gen_range(1..6))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let pg: Vec<f64> = (0..rng.gen_range(1..6))
                .map(|_| rng.gen_range(-1.0..1.0))
                .collect();
            let poly = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, a| acc * x + a);
            let grid = OperatorGrid::new(lambda).unwrap();
            let f: Vec<f64> = grid.nodes().iter().map(|&x| poly(&pf, x)).collect();
            let g: Vec<f64> = grid.nodes().iter().map(|&x| poly(&pg, x)).collect();
            let lhs = grid.inner(&grid.apply_t(&f).unwrap().values(), &g);
            let rhs = grid.inner(&f, &grid.apply_tstar(&g).unwrap().values());
            assert!(
                (lhs - rhs).abs() <= 1e-7 * (1.0 + lhs.abs()),
                "lambda={lambda}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn recurrence_examples() {
        assert_abs_diff_eq!(recurrence_k(4, 1, 0.0).unwrap(), -0.25, epsilon = 1e-9);
        let v = PI / 2.0;
        assert_abs_diff_eq!(
            recurrence_k(4, 2, 0.0).unwrap(),
            v * v / 8.0 + 1.0 / 16.0 - PI * PI / 24.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(
            recurrence_k(3, 2, -1.0).unwrap(),
            1.0 - PI * PI / 6.0,
            epsilon = 1e-9
        );
        assert_abs_diff_eq!(polylog(2, 0.0).unwrap(), 0.0, epsilon = 0.0);
        assert!(matches!(
            recurrence_k(2, 1, 0.0),
            Err(Error::DegenerateLambda(2))
        ));
    }

    #[test]
    fn recurrence_matches_closed_forms_and_has_zero_mean() {
        for (d, m) in [(3, 3), (4, 2), (5, 2), (6, 1), (7, 1), (8, 1)] {
            let rec = KernelRecurrence::new(d, m).unwrap();
            for mm in 1..=m {
                assert!(rec.mean(mm).unwrap().abs() <= 1e-12, "({d},{mm}) mean");
                for i in 0..=18 {
                    let x = -0.9 + 0.1 * i as f64;
                    let want = k_closed(d, mm, x).unwrap();
                    let got = rec.eval(mm, x).unwrap();
                    assert!(
                        (got - want).abs() <= 1e-8 * want.abs().max(1.0),
                        "({d},{mm}) x={x}: {got} vs {want}"
                    );
                }
            }
        }
    }
}
