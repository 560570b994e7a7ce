//! Command-line front end.
//!
//! Exit status: 0 when every gated check passed, 1 on a gated failure or a
//! run-time error, 2 on a usage or parameter error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::calibration::default_corpus;
use crate::error::{Error, Result};
use crate::experiments::{
    all_gated_passed, run_calibration, run_full_suite, run_space_fractal, run_surface, run_time_fractal,
    run_velocity_fractal, time_ladder, write_csv, write_outputs, ErrorRecord, ExperimentReport, PointSpec, SuiteConfig,
};
use crate::fractal_dim::DeltaLadder;
use crate::quantum_state::{eval_psi, spectrum, StateParams};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "WELLFRACTAL_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "wellfractal",
    version,
    about = "Fractal dimensions of Weierstrass-type square-well states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print Re Ψ, Im Ψ and |Ψ|² at one point.
    Eval(EvalArgs),
    /// Dimension of x ↦ P(x, t).
    DimSpace(SpaceArgs),
    /// Dimension of t ↦ P(x, t) over one period.
    DimTime(TimeArgs),
    /// Dimension of the mean velocity over one period.
    DimVelocity(VelocityArgs),
    /// Section-combined dimension of the density surface.
    DimSurface(SurfaceArgs),
    /// Run the estimator on the Weierstrass calibration corpus.
    Calibrate(CalibrateArgs),
    /// Run every experiment in a configuration file.
    Suite(SuiteArgs),
    /// Print the sorted frequencies of the mean position.
    Spectrum(SpectrumArgs),
}

#[derive(Debug, Args)]
pub struct StateArgs {
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    #[arg(long, default_value_t = 1.5)]
    pub s: f64,
    /// Truncation order.
    #[arg(long = "M", default_value_t = 24)]
    pub m: u32,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write summary.csv and JSON details here instead of CSV to stdout.
    #[arg(long, env = OUTPUT_DIR_ENV)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LadderArgs {
    /// Number of grid intervals.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub n_min: Option<i32>,
    #[arg(long)]
    pub n_max: Option<i32>,
    #[arg(long, default_value_t = 0.1)]
    pub tolerance: f64,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Position, `a/b pi` for an exact multiple of π or a decimal in radians.
    #[arg(long, default_value = "1/2pi")]
    pub x: PointSpec,
    #[arg(long, default_value = "0")]
    pub t: PointSpec,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value = "0")]
    pub t: PointSpec,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TimeArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value = "1/3pi")]
    pub x: PointSpec,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VelocityArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[command(flatten)]
    pub ladder: LadderArgs,
    #[arg(long, default_value_t = 1e-12)]
    pub zero_tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub state: StateArgs,
    #[arg(long, default_value_t = 0.12)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = 1 << 20)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SuiteArgs {
    /// TOML configuration; keys left out take their defaults.
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value_t = 2)]
    pub q: u64,
    #[arg(long = "M", default_value_t = 3)]
    pub m: u32,
}

impl StateArgs {
    fn params(&self) -> Result<StateParams> {
        StateParams::new(self.q, self.s, self.m)
    }
}

/// Ladder bounds: explicit flags, else the default suite's bounds for this `q`,
/// else the widest valid range of at most `rungs` scales.
fn pick_ladder(
    args: &LadderArgs,
    known: Option<(i32, i32)>,
    rungs: i32,
    make: impl Fn(i32, i32) -> Result<DeltaLadder>,
    width: f64,
    samples: usize,
) -> Result<DeltaLadder> {
    let (n_min, n_max) = match (args.n_min, args.n_max, known) {
        (Some(a), Some(b), _) => (a, b),
        (a, b, Some((ka, kb))) => (a.unwrap_or(ka), b.unwrap_or(kb)),
        (a, b, None) => {
            let spacing = width / samples as f64;
            let finest = (1..64)
                .take_while(|&n| make(n, n).map(|l| l.delta_min() >= 8.0 * spacing).unwrap_or(false))
                .last()
                .unwrap_or(1);
            let n_max = b.unwrap_or(finest);
            (a.unwrap_or((n_max - rungs + 1).max(1)), n_max)
        }
    };
    let ladder = make(n_min, n_max)?;
    ladder.validate_span(width, samples)?;
    Ok(ladder)
}

fn emit(reports: &[ExperimentReport], output: &OutputArgs, out: &mut dyn Write) -> Result<i32> {
    match &output.output_dir {
        Some(dir) => write_outputs(reports, dir)?,
        None => write_csv(reports, &mut *out)?,
    }
    Ok(if all_gated_passed(reports) {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let defaults = SuiteConfig::default();
    match cli.command {
        Command::Eval(a) => {
            let p = a.state.params()?;
            let psi = eval_psi(&p, &a.x.angle()?, &a.t.angle()?)?;
            writeln!(out, "re,im,density")?;
            writeln!(out, "{},{},{}", psi.re, psi.im, psi.norm_sqr())?;
            Ok(EXIT_OK)
        }
        Command::DimSpace(a) => {
            let p = a.state.params()?;
            let samples = a.ladder.samples.unwrap_or(defaults.space.samples);
            let known = (p.q() == defaults.space.q).then_some((defaults.space.n_min, defaults.space.n_max));
            let base = p.q() as f64;
            let ladder = pick_ladder(
                &a.ladder,
                known,
                9,
                |lo, hi| DeltaLadder::new(base, lo, hi),
                std::f64::consts::PI,
                samples,
            )?;
            let r = run_space_fractal(&p, &a.t, &ladder, samples, a.ladder.tolerance)?;
            emit(&[r], &a.output, out)
        }
        Command::DimTime(a) => {
            let p = a.state.params()?;
            let samples = a.ladder.samples.unwrap_or(defaults.time.samples);
            let known = defaults
                .time
                .cases
                .iter()
                .find(|c| c.q == p.q())
                .map(|c| (c.n_min, c.n_max));
            let ladder = pick_ladder(
                &a.ladder,
                known,
                5,
                |lo, hi| time_ladder(p.q(), lo, hi),
                period(p.q()),
                samples,
            )?;
            let r = run_time_fractal(&p, &a.x, &ladder, samples, a.ladder.tolerance)?;
            emit(&[r], &a.output, out)
        }
        Command::DimVelocity(a) => {
            let p = a.state.params()?;
            let samples = a.ladder.samples.unwrap_or(defaults.velocity.samples);
            let known = defaults
                .velocity
                .cases
                .iter()
                .find(|c| c.q == p.q())
                .map(|c| (c.n_min, c.n_max));
            let ladder = pick_ladder(
                &a.ladder,
                known,
                5,
                |lo, hi| time_ladder(p.q(), lo, hi),
                period(p.q()),
                samples,
            )?;
            let r = run_velocity_fractal(&p, &ladder, samples, a.ladder.tolerance, a.zero_tolerance)?;
            emit(&[r], &a.output, out)
        }
        Command::DimSurface(a) => {
            let p = a.state.params()?;
            let sf = defaults.surface;
            let r = run_surface(
                &p,
                &sf.x_sections_at,
                &sf.t_sections_at,
                &DeltaLadder::new(p.q() as f64, sf.space_n_min, sf.space_n_max)?,
                &time_ladder(p.q(), sf.time_n_min, sf.time_n_max)?,
                sf.space_samples,
                sf.time_samples,
                a.tolerance,
            )?;
            emit(&[r], &a.output, out)
        }
        Command::Calibrate(a) => {
            let c = defaults.calibration;
            let ladder = DeltaLadder::new(c.base, c.n_min, c.n_max)?;
            let reports = default_corpus()
                .iter()
                .map(|w| run_calibration(w, &ladder, a.samples, a.tolerance))
                .collect::<Result<Vec<_>>>()?;
            emit(&reports, &a.output, out)
        }
        Command::Suite(a) => {
            let mut cfg = SuiteConfig::load(&a.config)?;
            let output = OutputArgs {
                output_dir: a.output.output_dir.or(cfg.output_dir.take()),
            };
            let reports = run_full_suite(&cfg)?;
            emit(&reports, &output, out)
        }
        Command::Spectrum(a) => {
            let p = StateParams::new(a.q, 1.0, a.m)?;
            writeln!(out, "c,d,omega")?;
            for line in spectrum(&p)? {
                writeln!(out, "{},{},{}", line.c, line.d, line.omega)?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn period(q: u64) -> f64 {
    crate::quantum_state::fundamental_period(q)
}

fn is_usage(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter { .. }
            | Error::NonFinite(_)
            | Error::InvalidLadder(_)
            | Error::BelowResolution { .. }
            | Error::TruncationCoupling { .. }
            | Error::Config(_)
    )
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{}", text.ansi())
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let record = ErrorRecord::from(&e);
            let _ = writeln!(
                err,
                "{}",
                serde_json::to_string(&record).unwrap_or_else(|_| e.to_string())
            );
            if is_usage(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAILED
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(
            std::iter::once("wellfractal").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn spectrum_lists_ascending_frequencies() {
        let (code, out, _) = call(&["spectrum", "--q", "2", "--M", "3"]);
        assert_eq!(code, 0);
        let omegas: Vec<u64> = out
            .lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
            .collect();
        assert_eq!(&omegas[..4], &[3, 12, 15, 48]);
    }

    #[test]
    fn eval_at_half_pi_is_the_normalization() {
        let (code, out, _) = call(&[
            "eval", "--q", "2", "--s", "1.5", "--M", "10", "--x", "1/2pi", "--t", "0",
        ]);
        assert_eq!(code, 0);
        let vals: Vec<f64> = out
            .lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(|v| v.parse().unwrap())
            .collect();
        let n = StateParams::new(2, 1.5, 10).unwrap().normalization().value();
        assert!((vals[0] - n).abs() < 1e-15 && vals[1] == 0.0);
        assert!((vals[2] - n * n).abs() < 1e-14);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(call(&["frobnicate"]).0, 2);
        assert_eq!(call(&["eval", "--bogus", "1"]).0, 2);
        assert_eq!(call(&["suite"]).0, 2);
        let (code, _, err) = call(&["eval", "--s", "2.5"]);
        assert_eq!(code, 2);
        assert!(err.contains("invalid_parameter"));
    }

    #[test]
    fn coupling_violation_is_reported() {
        let (code, _, err) = call(&["dim-space", "--M", "10"]);
        assert_eq!(code, 2);
        assert!(err.contains("truncation_coupling"), "{err}");
    }
}
