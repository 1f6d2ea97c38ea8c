//! Mixed interpolation / penalized least-squares fitting.
//!
//! With points `x_1..x_n` of which the first `p` are smoothed and the rest
//! interpolated, the fitted spline `s = sum_i a_i K(., x_i) + sum_j b_j u_j`
//! solves
//!
//! ```text
//! (K_X + mu W) a + C_X^T b = y
//!            C_X a          = 0
//! ```
//!
//! with `W = blockdiag(R, 0)` and `C_X` the trend basis evaluated at the points.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{KernelSpec, SeriesControl};
use crate::trend::TrendBasis;

/// Accepted deviation of an input vector's norm from 1 before normalization.
pub const NORM_TOL: f64 = 1e-6;
/// Minimum chordal distance between distinct centers.
pub const DISTINCT_TOL: f64 = 1e-9;

/// Unit vectors in `R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub d: usize,
    pub points: Vec<Vec<f64>>,
}

impl PointSet {
    /// Normalizes the points and checks they are pairwise distinct.
    pub fn new(d: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        let set = Self::queries(d, points)?;
        set.check_distinct()?;
        Ok(set)
    }

    /// Normalizes the points without the distinctness check, for evaluation sites.
    pub fn queries(d: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("dimension must be >= 2, got {d}")));
        }
        let mut out = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
            let norm = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
                return Err(Error::Domain(format!(
                    "point {i} has norm {norm}, expected 1 within {NORM_TOL}"
                )));
            }
            out.push(p.iter().map(|c| c / norm).collect());
        }
        Ok(Self { d, points: out })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn check_distinct(&self) -> Result<()> {
        for i in 0..self.len() {
            for j in 0..i {
                let dist = chordal(&self.points[i], &self.points[j]);
                if dist <= DISTINCT_TOL {
                    return Err(Error::DuplicatePoints { i: j, j: i, dist });
                }
            }
        }
        Ok(())
    }
}

fn chordal(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x * y)
        .sum::<f64>()
        .clamp(-1.0, 1.0)
}

#[derive(Debug, Clone)]
pub struct FitProblem {
    pub spec: KernelSpec,
    pub pts: PointSet,
    pub y: Vec<f64>,
    pub mu: f64,
    /// Points `0..p` are smoothed, `p..n` interpolated.
    pub p: usize,
    /// `p x p` weight block; identity when `None`.
    pub r: Option<DMatrix<f64>>,
    /// Absolute tolerance for kernel entries that need the series.
    pub series_tol: f64,
}

impl FitProblem {
    /// Pure interpolation problem (`p = 0`).
    pub fn interpolation(spec: KernelSpec, pts: PointSet, y: Vec<f64>) -> Self {
        Self {
            spec,
            pts,
            y,
            mu: 0.0,
            p: 0,
            r: None,
            series_tol: 1e-12,
        }
    }

    pub fn smoothing(spec: KernelSpec, pts: PointSet, y: Vec<f64>, mu: f64, p: usize) -> Self {
        Self {
            spec,
            pts,
            y,
            mu,
            p,
            r: None,
            series_tol: 1e-12,
        }
    }

    pub fn with_weights(mut self, r: DMatrix<f64>) -> Self {
        self.r = Some(r);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let n = self.pts.len();
        if self.pts.d != self.spec.d {
            return Err(Error::DimensionMismatch {
                expected: self.spec.d,
                got: self.pts.d,
            });
        }
        if self.y.len() != n {
            return Err(Error::InvalidProblem(format!(
                "{} values for {n} points",
                self.y.len()
            )));
        }
        if let Some(i) = self.y.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidProblem(format!("value {i} is not finite")));
        }
        if self.p > n {
            return Err(Error::InvalidProblem(format!(
                "split index p = {} exceeds n = {n}",
                self.p
            )));
        }
        if self.mu.is_nan() || self.mu < 0.0 || !self.mu.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "smoothing parameter must be >= 0, got {}",
                self.mu
            )));
        }
        if self.p > 0 && self.mu == 0.0 {
            return Err(Error::InvalidProblem(
                "smoothed points (p > 0) need mu > 0".into(),
            ));
        }
        if let Some(r) = &self.r {
            if r.nrows() != self.p || r.ncols() != self.p {
                return Err(Error::InvalidProblem(format!(
                    "weight block is {}x{}, expected {}x{}",
                    r.nrows(),
                    r.ncols(),
                    self.p,
                    self.p
                )));
            }
            let asym = (r - r.transpose()).amax();
            if asym > 1e-12 * r.amax().max(1.0) {
                return Err(Error::InvalidProblem(
                    "weight block is not symmetric".into(),
                ));
            }
            if r.clone().cholesky().is_none() {
                return Err(Error::InvalidProblem(
                    "weight block is not positive definite".into(),
                ));
            }
        }
        Ok(())
    }

    fn basis(&self) -> Result<TrendBasis> {
        TrendBasis::new(self.spec.d, self.spec.ell)
    }
}

/// Matrices of the saddle system.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub kx: DMatrix<f64>,
    pub cx: DMatrix<f64>,
    pub w: DMatrix<f64>,
}

fn kernel_matrix(spec: &KernelSpec, a: &PointSet, b: &PointSet, tol: f64) -> Result<DMatrix<f64>> {
    let base = SeriesControl::from_env(tol)?;
    let rows: Vec<Result<Vec<f64>>> = a
        .points
        .par_iter()
        .map(|x| {
            let mut ctl = base.clone();
            b.points
                .iter()
                .map(|y| spec.eval_with(dot(x, y), &mut ctl))
                .collect()
        })
        .collect();
    let mut m = DMatrix::zeros(a.len(), b.len());
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row?.into_iter().enumerate() {
            m[(i, j)] = v;
        }
    }
    Ok(m)
}

fn trend_matrix(basis: &TrendBasis, pts: &PointSet) -> Result<DMatrix<f64>> {
    let q = basis.dim();
    let mut c = DMatrix::zeros(q, pts.len());
    for (j, x) in pts.points.iter().enumerate() {
        for (i, v) in basis.eval(x)?.into_iter().enumerate() {
            c[(i, j)] = v;
        }
    }
    Ok(c)
}

/// Numerical rank of `c` by column-pivoted QR of `c^T`.
fn rank(c: &DMatrix<f64>) -> usize {
    if c.nrows() == 0 || c.ncols() == 0 {
        return 0;
    }
    let qr = c.transpose().col_piv_qr();
    let r = qr.r();
    let tol = 1e-10 * c.norm();
    (0..r.nrows().min(r.ncols()))
        .filter(|&i| r[(i, i)].abs() > tol)
        .count()
}

pub fn assemble(prob: &FitProblem) -> Result<Assembled> {
    prob.validate()?;
    let spec = &prob.spec;
    if !spec.finite_on_diagonal() {
        return Err(Error::SingularKernelDiagonal {
            d: spec.d,
            m: spec.m,
        });
    }
    let basis = prob.basis()?;
    let n = prob.pts.len();
    let q = basis.dim();
    let cx = trend_matrix(&basis, &prob.pts)?;
    let rk = rank(&cx);
    if rk < q {
        return Err(Error::NotUnisolvent { rank: rk, q });
    }
    let mut kx = kernel_matrix(spec, &prob.pts, &prob.pts, prob.series_tol)?;
    // exact symmetry
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (kx[(i, j)] + kx[(j, i)]);
            kx[(i, j)] = v;
            kx[(j, i)] = v;
        }
    }
    let mut w = DMatrix::zeros(n, n);
    if prob.p > 0 {
        let r = prob
            .r
            .clone()
            .unwrap_or_else(|| DMatrix::identity(prob.p, prob.p));
        w.view_mut((0, 0), (prob.p, prob.p)).copy_from(&r);
    }
    Ok(Assembled { kx, cx, w })
}

/// A fitted spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineModel {
    pub spec: KernelSpec,
    pub centers: PointSet,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub basis: TrendBasis,
    pub series_tol: f64,
}

/// Diagnostics of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub n: usize,
    pub q: usize,
    /// `||(K_X + mu W) a + C_X^T b - y||_inf`
    pub residual: f64,
    /// `||C_X a||_inf`
    pub side_condition: f64,
    /// `a^T K_X a`
    pub energy: f64,
    /// `max_{i >= p} |s(x_i) - y_i|`
    pub interpolation_residual: f64,
    pub rcond: f64,
}

pub fn solve_fit(prob: &FitProblem) -> Result<SplineModel> {
    solve_fit_with_report(prob).map(|(m, _)| m)
}

pub fn solve_fit_with_report(prob: &FitProblem) -> Result<(SplineModel, FitReport)> {
    let Assembled { kx, cx, w } = assemble(prob)?;
    let n = kx.nrows();
    let q = cx.nrows();
    let mut m = DMatrix::zeros(n + q, n + q);
    m.view_mut((0, 0), (n, n)).copy_from(&(&kx + &w * prob.mu));
    m.view_mut((0, n), (n, q)).copy_from(&cx.transpose());
    m.view_mut((n, 0), (q, n)).copy_from(&cx);
    let mut rhs = DVector::zeros(n + q);
    rhs.rows_mut(0, n)
        .copy_from(&DVector::from_column_slice(&prob.y));

    let lu = m.clone().full_piv_lu();
    let u = lu.u();
    let diag: Vec<f64> = (0..n + q).map(|i| u[(i, i)].abs()).collect();
    let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let rcond = if hi > 0.0 { lo / hi } else { 0.0 };
    if rcond.is_nan() || rcond <= 1e-15 {
        return Err(Error::SingularSystem { rcond });
    }
    let mut sol = lu.solve(&rhs).ok_or(Error::SingularSystem { rcond })?;
    // one step of iterative refinement
    let r = &rhs - &m * &sol;
    if let Some(delta) = lu.solve(&r) {
        sol += delta;
    }
    if sol.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularSystem { rcond });
    }
    let a = sol.rows(0, n).into_owned();
    let b = sol.rows(n, q).into_owned();
    let y = DVector::from_column_slice(&prob.y);
    let fitted = &kx * &a + cx.transpose() * &b;
    let residual = ((&kx + &w * prob.mu) * &a + cx.transpose() * &b - &y).amax();
    let side_condition = (&cx * &a).amax();
    let energy = a.dot(&(&kx * &a));
    let interpolation_residual = (prob.p..n)
        .map(|i| (fitted[i] - y[i]).abs())
        .fold(0.0, f64::max);
    let model = SplineModel {
        spec: prob.spec,
        centers: prob.pts.clone(),
        a: a.iter().copied().collect(),
        b: b.iter().copied().collect(),
        basis: prob.basis()?,
        series_tol: prob.series_tol,
    };
    let report = FitReport {
        n,
        q,
        residual,
        side_condition,
        energy,
        interpolation_residual,
        rcond,
    };
    Ok((model, report))
}

impl SplineModel {
    /// `s(z)` at each query point.
    pub fn evaluate(&self, query: &PointSet) -> Result<Vec<f64>> {
        if query.d != self.spec.d {
            return Err(Error::DimensionMismatch {
                expected: self.spec.d,
                got: query.d,
            });
        }
        if query.is_empty() {
            return Ok(Vec::new());
        }
        let k = kernel_matrix(&self.spec, query, &self.centers, self.series_tol)?;
        let mut out = Vec::with_capacity(query.len());
        for (i, z) in query.points.iter().enumerate() {
            let trend: f64 = self
                .basis
                .eval(z)?
                .iter()
                .zip(&self.b)
                .map(|(u, b)| u * b)
                .sum();
            let kern: f64 = (0..self.a.len()).map(|j| k[(i, j)] * self.a[j]).sum();
            out.push(kern + trend);
        }
        Ok(out)
    }

    pub fn evaluate_one(&self, z: &[f64]) -> Result<f64> {
        Ok(self.evaluate(&PointSet::queries(self.spec.d, vec![z.to_vec()])?)?[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn spec(d: usize, m: usize) -> KernelSpec {
        KernelSpec::new(d, m, 0).unwrap()
    }

    fn octahedron_plus() -> PointSet {
        let s = 1.0 / 3f64.sqrt();
        PointSet::new(
            3,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![-1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, -1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.0, 0.0, -1.0],
                vec![s, s, s],
                vec![-s, s, -s],
            ],
        )
        .unwrap()
    }

    #[test]
    fn point_set_validation() {
        let p = PointSet::new(3, vec![vec![0.0, 0.0, 1.0 + 5e-7]]).unwrap();
        assert_eq!(p.points[0][2], 1.0);
        assert!(PointSet::new(3, vec![vec![0.0, 0.0, 1.1]]).is_err());
        assert!(matches!(
            PointSet::new(3, vec![vec![0.0, 0.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        let dup = PointSet::new(2, vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(
            dup,
            Err(Error::DuplicatePoints { i: 0, j: 2, .. })
        ));
        assert!(PointSet::queries(2, vec![vec![1.0, 0.0], vec![1.0, 0.0]]).is_ok());
    }

    #[test]
    fn assemble_examples() {
        let one = PointSet::new(3, vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let a = assemble(&FitProblem::interpolation(spec(3, 2), one, vec![2.0])).unwrap();
        assert_abs_diff_eq!(a.kx[(0, 0)], 1.0, epsilon = 1e-12);
        assert_eq!(a.cx[(0, 0)], 1.0);
        assert_eq!(a.w.amax(), 0.0);

        let anti =
            PointSet::new(4, vec![vec![1.0, 0.0, 0.0, 0.0], vec![-1.0, 0.0, 0.0, 0.0]]).unwrap();
        let a = assemble(&FitProblem::interpolation(spec(4, 2), anti, vec![0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(a.kx[(0, 1)], 1.0 / 16.0 - PI * PI / 24.0, epsilon = 1e-12);

        let p = octahedron_plus();
        assert!(matches!(
            assemble(&FitProblem::interpolation(
                spec(3, 1),
                p.clone(),
                vec![0.0; 8]
            )),
            Err(Error::SingularKernelDiagonal { d: 3, m: 1 })
        ));
        assert!(matches!(
            assemble(&FitProblem::interpolation(
                spec(5, 2),
                PointSet::new(5, vec![vec![1.0, 0.0, 0.0, 0.0, 0.0]]).unwrap(),
                vec![0.0]
            )),
            Err(Error::SingularKernelDiagonal { .. })
        ));
    }

    #[test]
    fn unisolvency() {
        // four points on the equator cannot determine the z-component of a degree-1 trend
        let eq = PointSet::new(
            3,
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![-1.0, 0.0, 0.0],
                vec![0.0, -1.0, 0.0],
                vec![0.6, 0.8, 0.0],
            ],
        )
        .unwrap();
        let s = KernelSpec::new(3, 2, 1).unwrap();
        assert!(matches!(
            assemble(&FitProblem::interpolation(s, eq, vec![0.0; 5])),
            Err(Error::NotUnisolvent { rank: 3, q: 4 })
        ));
        let s = KernelSpec::new(3, 3, 1).unwrap();
        let p = octahedron_plus();
        let y: Vec<f64> = p.points.iter().map(|x| 1.0 + 2.0 * x[2]).collect();
        let model = solve_fit(&FitProblem::interpolation(s, p, y)).unwrap();
        assert!(model.a.iter().all(|a| a.abs() < 1e-9));
    }

    #[test]
    fn constant_data() {
        let p = octahedron_plus();
        let model = solve_fit(&FitProblem::interpolation(spec(3, 2), p, vec![3.7; 8])).unwrap();
        assert!(model.a.iter().all(|a| a.abs() <= 1e-12));
        assert_abs_diff_eq!(model.b[0], 3.7, epsilon = 1e-12);
    }

    #[test]
    fn interpolates_and_smooths() {
        let p = octahedron_plus();
        let y: Vec<f64> = (0..8).map(|i| (i as f64 * 0.7).sin()).collect();
        let (model, rep) =
            solve_fit_with_report(&FitProblem::interpolation(spec(3, 2), p.clone(), y.clone()))
                .unwrap();
        assert!(rep.residual <= 1e-10 && rep.side_condition <= 1e-12);
        let at = model.evaluate(&p).unwrap();
        for (s, t) in at.iter().zip(&y) {
            assert_abs_diff_eq!(s, t, epsilon = 1e-10);
        }
        let (_, rep) =
            solve_fit_with_report(&FitProblem::smoothing(spec(3, 2), p, y, 0.5, 4)).unwrap();
        assert!(rep.residual <= 1e-10 && rep.interpolation_residual <= 1e-10);
    }

    #[test]
    fn single_smoothed_center() {
        let p = PointSet::new(3, vec![vec![0.0, 1.0, 0.0]]).unwrap();
        let model = solve_fit(&FitProblem::smoothing(spec(3, 2), p, vec![1.25], 1.0, 1)).unwrap();
        assert_abs_diff_eq!(model.a[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(model.b[0], 1.25, epsilon = 1e-14);
    }

    #[test]
    fn evaluate_examples() {
        let c = PointSet::new(4, vec![vec![0.0, 0.0, 0.0, 1.0]]).unwrap();
        let model = SplineModel {
            spec: spec(4, 2),
            centers: c,
            a: vec![1.0],
            b: vec![0.0],
            basis: TrendBasis::new(4, 0).unwrap(),
            series_tol: 1e-12,
        };
        assert_abs_diff_eq!(
            model.evaluate_one(&[0.0, 0.0, 0.0, -1.0]).unwrap(),
            1.0 / 16.0 - PI * PI / 24.0,
            epsilon = 1e-12
        );
        let flat = SplineModel {
            a: vec![0.0],
            b: vec![2.5],
            ..model.clone()
        };
        assert_eq!(flat.evaluate_one(&[0.6, 0.0, 0.8, 0.0]).unwrap(), 2.5);
        assert!(matches!(
            model.evaluate_one(&[1.0, 0.0, 0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(model
            .evaluate(&PointSet::queries(4, vec![]).unwrap())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn problem_validation() {
        let p = octahedron_plus();
        let bad = |prob: FitProblem| matches!(assemble(&prob), Err(Error::InvalidProblem(_)));
        assert!(bad(FitProblem::interpolation(
            spec(3, 2),
            p.clone(),
            vec![0.0; 7]
        )));
        assert!(bad(FitProblem::smoothing(
            spec(3, 2),
            p.clone(),
            vec![0.0; 8],
            0.0,
            3
        )));
        assert!(bad(FitProblem::smoothing(
            spec(3, 2),
            p.clone(),
            vec![0.0; 8],
            1.0,
            9
        )));
        assert!(bad(FitProblem::smoothing(
            spec(3, 2),
            p.clone(),
            vec![0.0; 8],
            1.0,
            2
        )
        .with_weights(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]))));
        assert!(solve_fit(
            &FitProblem::smoothing(spec(3, 2), p, vec![0.0; 8], 1.0, 2)
                .with_weights(DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]))
        )
        .is_ok());
    }
}
