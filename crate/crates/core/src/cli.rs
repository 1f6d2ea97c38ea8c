//! The `sphere-tps` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{Error, Result};
use crate::fit::{solve_fit_with_report, FitProblem, PointSet};
use crate::io::{self, fmt_f64, DataFormat};
use crate::kernel::{EvalMethod, KernelSpec, SeriesControl};
use crate::verify::{self, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "sphere-tps",
    version,
    about = "Thinplate spline kernels and spline fits on spheres"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate k_{d,m,l}(xi).
    Kernel {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        ell: usize,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        /// closed, series or auto
        #[arg(long, default_value = "auto")]
        method: EvalMethod,
        /// Absolute tolerance for the series.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Run a self-check suite: catalog, props or recurrence.
    Verify { suite: Suite },
    /// Fit a spline to scattered data and write the model.
    Fit {
        /// CSV with a header: coordinates then value.
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        ell: usize,
        /// Smoothing parameter.
        #[arg(long, default_value_t = 0.0)]
        mu: f64,
        /// 1-based row of the first interpolated point; earlier rows are smoothed.
        /// Defaults to 1 when mu = 0 and to n + 1 otherwise.
        #[arg(long)]
        interp_from: Option<usize>,
        /// CSV with the smoothing weights: one column (diagonal) or a full matrix.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// cartesian or lonlat
        #[arg(long, default_value = "cartesian")]
        format: DataFormat,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate a fitted model at query points.
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// CSV with a header: coordinates, optionally followed by a value column.
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value = "cartesian")]
        format: DataFormat,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Kernel {
            d,
            m,
            ell,
            xi,
            method,
            tol,
        } => {
            let spec = KernelSpec::new(d, m, ell)?.with_method(method);
            let mut ctl = SeriesControl::from_env(tol)?;
            let value = spec.eval_with(xi, &mut ctl)?;
            writeln!(out, "{}", fmt_f64(value))?;
            if let Some(route) = ctl.method_used {
                writeln!(
                    out,
                    "# series: route={route:?} terms={} tail_estimate={:e}",
                    ctl.used_terms, ctl.tail_estimate
                )?;
            }
            Ok(EXIT_OK)
        }
        Command::Verify { suite } => {
            let report = verify::run(suite);
            writeln!(out, "{report}")?;
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_VERIFY
            })
        }
        Command::Fit {
            data,
            d,
            m,
            ell,
            mu,
            interp_from,
            weights,
            format,
            tol,
            out: path,
        } => {
            let spec = KernelSpec::new(d, m, ell)?;
            let ds = io::read_data_file(&data, format, d, true)?;
            let n = ds.len();
            let p = match interp_from {
                Some(0) => return Err(Error::InvalidProblem("--interp-from is 1-based".into())),
                Some(k) if k > n + 1 => {
                    return Err(Error::InvalidProblem(format!(
                        "--interp-from {k} exceeds n + 1 = {}",
                        n + 1
                    )))
                }
                Some(k) => k - 1,
                None if mu == 0.0 => 0,
                None => n,
            };
            let pts = PointSet::new(d, ds.points)?;
            let mut prob = FitProblem::smoothing(spec, pts, ds.values.unwrap_or_default(), mu, p);
            prob.series_tol = tol;
            if let Some(w) = weights {
                let f = File::open(&w).map_err(|e| Error::Io(format!("{}: {e}", w.display())))?;
                prob = prob.with_weights(io::read_weights(f, p)?);
            }
            let (model, rep) = solve_fit_with_report(&prob)?;
            io::write_model_file(&path, &model)?;
            let amax = model.a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            writeln!(out, "n = {}", rep.n)?;
            writeln!(out, "q = {}", rep.q)?;
            writeln!(out, "smoothed points p = {p}, mu = {}", fmt_f64(mu))?;
            writeln!(out, "system residual = {:e}", rep.residual)?;
            writeln!(out, "side condition |C a| = {:e}", rep.side_condition)?;
            writeln!(
                out,
                "max interpolation residual = {:e}",
                rep.interpolation_residual
            )?;
            writeln!(out, "max |a| = {:e}", amax)?;
            writeln!(out, "energy a'Ka = {}", fmt_f64(rep.energy))?;
            writeln!(out, "model written to {}", path.display())?;
            Ok(EXIT_OK)
        }
        Command::Predict {
            model,
            points,
            format,
            out: path,
        } => {
            let model = io::read_model_file(&model)?;
            let d = model.spec.d;
            let ds = io::read_data_file(&points, format, d, false)?;
            let query = PointSet::queries(d, ds.points)?;
            let preds = model.evaluate(&query)?;
            match path {
                Some(p) => {
                    let f =
                        File::create(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                    io::write_predictions(f, &query.points, &preds, d)?;
                }
                None => io::write_predictions(&mut *out, &query.points, &preds, d)?,
            }
            Ok(EXIT_OK)
        }
    }
}
