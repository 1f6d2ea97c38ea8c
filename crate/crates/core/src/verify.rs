//! Self-check suites: closed forms against the series, operator identities,
//! and the operator recurrence against the closed forms.

use std::f64::consts::PI;
use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::coeffs::{even_coeffs, odd_coeffs};
use crate::error::{Error, Result};
use crate::kernel::{k_closed, EvalMethod, KernelSpec, SeriesControl};
use crate::operator::{KernelRecurrence, OperatorGrid, TabulatedFunction};
use crate::special::{gegenbauer, GegenbauerIndex};

/// Regular catalog pairs compared on all of `[-1, 1]`.
pub const REGULAR_PAIRS: [(usize, usize); 8] = [
    (2, 1),
    (2, 2),
    (2, 3),
    (2, 4),
    (3, 2),
    (3, 3),
    (4, 2),
    (5, 2),
];
/// Pairs with `k(1) = +inf`, compared on `[-1, 0.9]`.
pub const SINGULAR_PAIRS: [(usize, usize); 8] = [
    (3, 1),
    (4, 1),
    (5, 1),
    (6, 1),
    (7, 1),
    (8, 1),
    (9, 1),
    (11, 1),
];
/// Pairs checked by the recurrence suite.
pub const RECURRENCE_PAIRS: [(usize, usize); 4] = [(4, 1), (4, 2), (3, 2), (6, 1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Catalog,
    Props,
    Recurrence,
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "catalog" => Ok(Self::Catalog),
            "props" => Ok(Self::Props),
            "recurrence" => Ok(Self::Recurrence),
            other => Err(Error::Parse(format!(
                "unknown suite {other:?} (catalog, props, recurrence)"
            ))),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Catalog => "catalog",
            Self::Props => "props",
            Self::Recurrence => "recurrence",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    pub error: Option<String>,
}

impl Check {
    fn from_result(name: impl Into<String>, r: Result<f64>, tol: f64) -> Self {
        match r {
            Ok(residual) => Self {
                name: name.into(),
                residual,
                tol,
                passed: residual <= tol,
                error: None,
            },
            Err(e) => Self {
                name: name.into(),
                residual: f64::INFINITY,
                tol,
                passed: false,
                error: Some(e.to_string()),
            },
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{status} {:<40} max residual {:.3e} (tol {:.0e})",
            self.name, self.residual, self.tol
        )?;
        if let Some(e) = &self.error {
            write!(f, " error: {e}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: Suite,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "suite {}: {} checks, {failed} failed, {:.2} s",
            self.suite,
            self.checks.len(),
            self.elapsed.as_secs_f64()
        )
    }
}

pub fn run(suite: Suite) -> Report {
    let start = Instant::now();
    let checks = match suite {
        Suite::Catalog => catalog_checks(),
        Suite::Props => props_checks(),
        Suite::Recurrence => recurrence_checks(),
    };
    Report {
        suite,
        checks,
        elapsed: start.elapsed(),
    }
}

/// `n` equispaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// `max |k_closed - k_series|` over `xs`, summing the series to `series_tol`.
/// A point where both sides report a singularity counts as agreement.
pub fn closed_vs_series(d: usize, m: usize, xs: &[f64], series_tol: f64) -> Result<f64> {
    let spec = KernelSpec::new(d, m, 0)?.with_method(EvalMethod::Series);
    let base = SeriesControl::from_env(series_tol)?;
    let diffs = xs
        .par_iter()
        .map(|&x| {
            let mut ctl = base.clone();
            match (k_closed(d, m, x), spec.eval_with(x, &mut ctl)) {
                (Ok(a), Ok(b)) => Ok((a - b).abs()),
                // both infinite at the diagonal
                (Err(Error::SingularPoint { .. }), Err(Error::SingularPoint { .. })) => Ok(0.0),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(diffs.into_iter().fold(0.0, f64::max))
}

/// Largest deviation of the tabulated constant terms from their exact values.
pub fn constant_residual() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (kappa, want) in [(2, 43.0 / 75.0), (3, 337.0 / 735.0), (4, 1091.0 / 2835.0)] {
        worst = worst.max((odd_coeffs(kappa)?.dconst - want).abs());
    }
    for (lambda, want) in [(1, 0.25), (2, 5.0 / 16.0), (3, 5.0 / 18.0)] {
        worst = worst.max((even_coeffs(lambda)?.cconst - want).abs());
    }
    Ok(worst)
}

/// Series values `k_{3,2}(1) - 1` and `k_{2,1}(1) - pi^2/3`.
pub fn diagonal_residual(series_tol: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (d, m, want) in [(3, 2, 1.0), (2, 1, PI * PI / 3.0)] {
        let spec = KernelSpec::new(d, m, 0)?.with_method(EvalMethod::Series);
        let got = spec.eval_with(1.0, &mut SeriesControl::from_env(series_tol)?)?;
        worst = worst.max((got - want).abs());
    }
    Ok(worst)
}

fn catalog_checks() -> Vec<Check> {
    let mut out = Vec::new();
    let full = linspace(-1.0, 1.0, 41);
    for (d, m) in REGULAR_PAIRS {
        out.push(Check::from_result(
            format!("closed vs series ({d},{m}) on [-1,1]"),
            closed_vs_series(d, m, &full, 1e-10),
            1e-8,
        ));
    }
    let cut = linspace(-1.0, 0.9, 39);
    for (d, m) in SINGULAR_PAIRS {
        out.push(Check::from_result(
            format!("closed vs series ({d},{m}) on [-1,0.9]"),
            closed_vs_series(d, m, &cut, 1e-9),
            1e-7,
        ));
    }
    out.push(Check::from_result(
        "constant terms C and D",
        constant_residual(),
        1e-14,
    ));
    out.push(Check::from_result(
        "diagonal values k32(1), k21(1)",
        diagonal_residual(1e-13),
        1e-12,
    ));
    out
}

fn c_n(n: usize, lambda: f64) -> impl Fn(f64) -> f64 + Sync {
    let idx = GegenbauerIndex::new(n, lambda).expect("lambda > 0");
    move |x| gegenbauer(idx, x).expect("x in [-1, 1]")
}

/// Largest eigen-relation residual of `T` and `T*` on Gegenbauer polynomials of
/// degree `1..=6` for `lambda` in `{1, 3/2, 2}`, over 11 sample points.
pub fn eigen_residual() -> Result<f64> {
    let mut worst: f64 = 0.0;
    for lambda in [1.0, 1.5, 2.0] {
        let grid = OperatorGrid::new(lambda)?;
        for n in 1..=6 {
            let f = TabulatedFunction::new(c_n(n, lambda));
            let vals = grid.sample(&f);
            let t = grid.apply_t(&vals)?;
            let ts = grid.apply_tstar(&vals)?;
            let nn = n as f64 * (n as f64 + 2.0 * lambda);
            for x in linspace(-1.0, 1.0, 11) {
                let want_t = (f.eval(x) - f.eval(-1.0)) / nn;
                let want_ts = (f.eval(x) - f.eval(1.0)) / nn;
                worst = worst
                    .max((t.eval(x)? - want_t).abs())
                    .max((ts.eval(x)? - want_ts).abs());
            }
        }
    }
    Ok(worst)
}

/// Largest relative adjointness defect `|[Tf,g] - [f,T*g]| / (1 + |[Tf,g]|)` over
/// 20 random low-degree polynomial pairs.
pub fn adjoint_residual(seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let lambda = [0.5, 1.0, 1.5, 2.0][rng.gen_range(0..4)];
        let pf: Vec<f64> = (0..rng.gen_range(1..6))
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let pg: Vec<f64> = (0..rng.gen_range(1..6))
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        let poly = |c: &[f64], x: f64| c.iter().rev().fold(0.0, |acc, a| acc * x + a);
        let grid = OperatorGrid::new(lambda)?;
        let f: Vec<f64> = grid.nodes().iter().map(|&x| poly(&pf, x)).collect();
        let g: Vec<f64> = grid.nodes().iter().map(|&x| poly(&pg, x)).collect();
        let lhs = grid.inner(&grid.apply_t(&f)?.values(), &g);
        let rhs = grid.inner(&f, &grid.apply_tstar(&g)?.values());
        worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
    }
    Ok(worst)
}

fn props_checks() -> Vec<Check> {
    vec![
        Check::from_result("eigen relations T, T*", eigen_residual(), 1e-6),
        Check::from_result("adjointness [Tf,g] = [f,T*g]", adjoint_residual(7), 1e-7),
    ]
}

/// Seven interior sample points.
pub const RECURRENCE_XS: [f64; 7] = [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9];

/// `(max |recurrence - closed|, max |mean|)` for `k_{d,m}`.
pub fn recurrence_residual(d: usize, m: usize) -> Result<(f64, f64)> {
    let rec = KernelRecurrence::new(d, m)?;
    let mut diff: f64 = 0.0;
    for x in RECURRENCE_XS {
        diff = diff.max((rec.eval(m, x)? - k_closed(d, m, x)?).abs());
    }
    let mean = (1..=m)
        .map(|j| rec.mean(j).map(f64::abs))
        .collect::<Result<Vec<_>>>()?;
    Ok((diff, mean.into_iter().fold(0.0, f64::max)))
}

fn recurrence_checks() -> Vec<Check> {
    let mut out = Vec::new();
    for (d, m) in RECURRENCE_PAIRS {
        let r = recurrence_residual(d, m);
        out.push(Check::from_result(
            format!("recurrence vs closed ({d},{m})"),
            r.clone().map(|r| r.0),
            1e-5,
        ));
        out.push(Check::from_result(
            format!("recurrence zero mean ({d},{m})"),
            r.map(|r| r.1),
            1e-8,
        ));
    }
    out
}
