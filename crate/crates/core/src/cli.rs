//! Command-line front end: `kernel`, `sweep` and `verify`.
//!
//! Exit codes: 0 success, 1 verification failure or oracle
//! non-convergence, 2 configuration error.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::PhysicalParams;
use crate::hilbert::PlanePoint;
use crate::oracles::report::fmt_float;
use crate::oracles::suite::{run_suite, SuiteConfig, LADDER_TAIL_TOLERANCE, ORACLE_TOLERANCE};
use crate::oracles::superop::{default_ladder, oracle_ladder, LadderCase};
use crate::propagator::{closed_form_kernel, sliced_kernel, SliceSchedule};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

const LONG_ABOUT: &str = "\
Free particle on the noncommutative plane [x, y] = i theta.

Natural units (hbar = c = 1). theta is an area (length^2); positions are
lengths; the time T and the mass m combine as T / m, which also has
dimensions of length^2. The kernel is

    K = m / (m theta + i T) exp[-m dx^2 / (2 (i T + m theta))].

CSV floats are written with 17 significant digits.";

#[derive(Debug, Parser)]
#[command(name = "ncpath", version, about = "Noncommutative free-particle propagator", long_about = LONG_ABOUT)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArg,

    /// Noncommutativity theta > 0 (length^2)
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub theta: f64,
    /// Particle mass m > 0
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub mass: f64,
    /// Total time T >= 0
    #[arg(long, global = true, default_value_t = 1.0, allow_hyphen_values = true)]
    pub time: f64,
    /// Initial x coordinate
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub x0: f64,
    /// Initial y coordinate
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub y0: f64,
    /// Final x coordinate
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub xf: f64,
    /// Final y coordinate
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub yf: f64,
    /// Number of intermediate points n of the sliced integral
    #[arg(long, global = true, default_value_t = 8)]
    pub slices: usize,
    /// Fock-space truncation D (at least 4)
    #[arg(long = "fock-dim", global = true, default_value_t = 32)]
    pub fock_dim: usize,
    /// Tolerance for the quadrature and overlap checks
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Write CSV here instead of stdout
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// kernel: also evaluate the sliced integral and the superoperator oracle
    #[arg(long, global = true)]
    pub compare: bool,
    /// verify: replace the star product by the pointwise product
    #[arg(long = "no-star", global = true)]
    pub no_star: bool,
    /// sweep: dx = xf - x0 over START:STOP:COUNT (yf = y0)
    #[arg(long = "sweep-dx", global = true, allow_hyphen_values = true)]
    pub sweep_dx: Option<SweepRange>,
    /// sweep: T over START:STOP:COUNT
    #[arg(long = "sweep-time", global = true, allow_hyphen_values = true)]
    pub sweep_time: Option<SweepRange>,
    /// sweep: theta over START:STOP:COUNT
    #[arg(long = "sweep-theta", global = true, allow_hyphen_values = true)]
    pub sweep_theta: Option<SweepRange>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum CommandArg {
    /// Evaluate the kernel between two points
    Kernel,
    /// Tabulate |K| over a grid of dx, T and/or theta
    Sweep,
    /// Run the verification suite
    Verify,
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepRange {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.start + step * i as f64).collect()
    }
}

impl FromStr for SweepRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(format!("expected START:STOP:COUNT, got '{s}'"));
        };
        let start: f64 = start.parse().map_err(|e| format!("bad start '{start}': {e}"))?;
        let stop: f64 = stop.parse().map_err(|e| format!("bad stop '{stop}': {e}"))?;
        let count: usize = count.parse().map_err(|e| format!("bad count '{count}': {e}"))?;
        if !(start.is_finite() && stop.is_finite()) {
            return Err("sweep bounds must be finite".into());
        }
        if count == 0 {
            return Err("sweep count must be at least 1".into());
        }
        Ok(Self { start, stop, count })
    }
}

/// Validated command-line configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandArg,
    pub params: PhysicalParams,
    pub time: f64,
    pub from: PlanePoint,
    pub to: PlanePoint,
    pub slices: usize,
    pub fock_dim: usize,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub compare: bool,
    pub with_star: bool,
    pub sweep_dx: Option<SweepRange>,
    pub sweep_time: Option<SweepRange>,
    pub sweep_theta: Option<SweepRange>,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let params = PhysicalParams::new(cli.mass, cli.theta)?;
        if !(cli.time.is_finite() && cli.time >= 0.0) {
            return Err(Error::invalid("time", format!("must be non-negative, got {}", cli.time)));
        }
        for (name, v) in [("x0", cli.x0), ("y0", cli.y0), ("xf", cli.xf), ("yf", cli.yf)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        if cli.fock_dim < 4 {
            return Err(Error::DimensionTooSmall {
                dim: cli.fock_dim,
                min: 4,
            });
        }
        if !(cli.tol > 0.0 && cli.tol < 1.0) {
            return Err(Error::invalid("tol", format!("must lie in (0, 1), got {}", cli.tol)));
        }
        if let Some(r) = cli.sweep_time {
            if r.start.min(r.stop) < 0.0 {
                return Err(Error::invalid("sweep-time", "times must be non-negative"));
            }
        }
        if let Some(r) = cli.sweep_theta {
            if r.start.min(r.stop) <= 0.0 {
                return Err(Error::invalid("sweep-theta", "theta must be positive"));
            }
        }
        if cli.command == CommandArg::Sweep
            && cli.sweep_dx.is_none()
            && cli.sweep_time.is_none()
            && cli.sweep_theta.is_none()
        {
            return Err(Error::invalid(
                "sweep",
                "empty sweep: give at least one of --sweep-dx, --sweep-time, --sweep-theta",
            ));
        }
        Ok(Self {
            command: cli.command,
            params,
            time: cli.time,
            from: PlanePoint::new(cli.x0, cli.y0),
            to: PlanePoint::new(cli.xf, cli.yf),
            slices: cli.slices,
            fock_dim: cli.fock_dim,
            tol: cli.tol,
            out: cli.out,
            compare: cli.compare,
            with_star: !cli.no_star,
            sweep_dx: cli.sweep_dx,
            sweep_time: cli.sweep_time,
            sweep_theta: cli.sweep_theta,
        })
    }
}

/// Outcome of a command: exit code, with a diagnostic for nonzero codes.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub message: Option<String>,
}

impl Outcome {
    fn ok() -> Self {
        Self { code: EXIT_OK, message: None }
    }

    fn failure(message: String) -> Self {
        Self {
            code: EXIT_FAILURE,
            message: Some(message),
        }
    }

    fn config(message: String) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: Some(message),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Reports go to `stdout`, diagnostics to `stderr`.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let outcome = match RunConfig::from_cli(cli) {
        Ok(config) => execute(&config, stdout),
        Err(e) => Outcome::config(format!("invalid configuration: {e}")),
    };
    if let Some(msg) = &outcome.message {
        let _ = writeln!(stderr, "ncpath: {msg}");
    }
    outcome.code
}

pub fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Outcome {
    let result = match config.command {
        CommandArg::Kernel => cmd_kernel(config, stdout),
        CommandArg::Sweep => cmd_sweep(config, stdout),
        CommandArg::Verify => cmd_verify(config, stdout),
    };
    result.unwrap_or_else(|e| match e {
        CliError::Io(e) => Outcome::config(format!("cannot write output: {e}")),
        CliError::Compute(e @ Error::NonConvergence { .. }) => Outcome::failure(e.to_string()),
        CliError::Compute(e) => Outcome::config(e.to_string()),
    })
}

#[derive(Debug)]
enum CliError {
    Io(io::Error),
    Compute(Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

/// Writes CSV records to `--out` or to `stdout`.
fn write_csv(config: &RunConfig, stdout: &mut dyn Write, header: &[&str], rows: &[Vec<String>]) -> std::result::Result<(), CliError> {
    let sink: Box<dyn Write + '_> = match &config.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(stdout),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

const KERNEL_HEADER: [&str; 10] = ["theta", "mass", "time", "x0", "y0", "xf", "yf", "re", "im", "abs"];

fn kernel_fields(params: &PhysicalParams, time: f64, from: &PlanePoint, to: &PlanePoint, k: Complex64) -> Vec<String> {
    [params.theta(), params.mass(), time, from.x, from.y, to.x, to.y, k.re, k.im, k.norm()]
        .into_iter()
        .map(fmt_float)
        .collect()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(a.norm()).max(f64::MIN_POSITIVE)
}

/// Closed-form kernel, and with `--compare` the sliced integral and the
/// superoperator oracle with pairwise relative errors.
fn cmd_kernel(config: &RunConfig, stdout: &mut dyn Write) -> std::result::Result<Outcome, CliError> {
    let k = closed_form_kernel(config.params, config.time, &config.from, &config.to)?;
    let mut row = kernel_fields(&config.params, config.time, &config.from, &config.to, k);
    if !config.compare {
        write_csv(config, stdout, &KERNEL_HEADER, &[row])?;
        return Ok(Outcome::ok());
    }
    let schedule = SliceSchedule::from_total(config.slices, config.time)?;
    let sliced = sliced_kernel(config.params, &schedule, &config.from, &config.to)?;
    let case = LadderCase {
        total_time: config.time,
        z0: config.from.z(&config.params),
        zf: config.to.z(&config.params),
    };
    let report = oracle_ladder(
        &config.params,
        case,
        &default_ladder(config.fock_dim),
        ORACLE_TOLERANCE,
        LADDER_TAIL_TOLERANCE,
    )?;
    let oracle = report.rows.last().and_then(|r| r.value).unwrap_or_default();
    let mut header = KERNEL_HEADER.to_vec();
    header.extend([
        "slices",
        "sliced_re",
        "sliced_im",
        "oracle_dim",
        "oracle_re",
        "oracle_im",
        "err_closed_sliced",
        "err_closed_oracle",
        "err_sliced_oracle",
    ]);
    row.push(config.slices.to_string());
    row.extend([sliced.re, sliced.im].map(fmt_float));
    row.push(config.fock_dim.to_string());
    row.extend([oracle.re, oracle.im, rel(sliced, k), rel(oracle, k), rel(oracle, sliced)].map(fmt_float));
    write_csv(config, stdout, &header, &[row])?;
    Ok(Outcome::ok())
}

/// Grid of (theta, T, dx) in that nesting order, dx innermost.
fn sweep_grid(config: &RunConfig) -> Vec<(f64, f64, f64)> {
    let thetas = config.sweep_theta.map_or_else(|| vec![config.params.theta()], |r| r.values());
    let times = config.sweep_time.map_or_else(|| vec![config.time], |r| r.values());
    let dxs = config.sweep_dx.map_or_else(|| vec![config.to.x - config.from.x], |r| r.values());
    let mut grid = Vec::with_capacity(thetas.len() * times.len() * dxs.len());
    for &theta in &thetas {
        for &t in &times {
            for &dx in &dxs {
                grid.push((theta, t, dx));
            }
        }
    }
    grid
}

fn cmd_sweep(config: &RunConfig, stdout: &mut dyn Write) -> std::result::Result<Outcome, CliError> {
    let rows: Vec<Vec<String>> = sweep_grid(config)
        .into_par_iter()
        .map(|(theta, t, dx)| {
            let params = PhysicalParams::new(config.params.mass(), theta)?;
            let to = if config.sweep_dx.is_some() {
                PlanePoint::new(config.from.x + dx, config.from.y)
            } else {
                config.to
            };
            let k = closed_form_kernel(params, t, &config.from, &to)?;
            Ok(kernel_fields(&params, t, &config.from, &to, k))
        })
        .collect::<Result<_>>()?;
    write_csv(config, stdout, &KERNEL_HEADER, &rows)?;
    Ok(Outcome::ok())
}

fn cmd_verify(config: &RunConfig, stdout: &mut dyn Write) -> std::result::Result<Outcome, CliError> {
    let suite = SuiteConfig {
        params: config.params,
        fock_dim: config.fock_dim,
        tolerance: config.tol,
        total_time: config.time,
        slices: config.slices,
        with_star: config.with_star,
    };
    let report = run_suite(&suite);
    stdout.write_all(report.to_text().as_bytes())?;
    if let Some(path) = &config.out {
        report.write_csv(File::create(path)?)?;
    }
    Ok(match report.first_failure() {
        None => {
            writeln!(stdout, "all {} checks passed", report.rows.len())?;
            Outcome::ok()
        }
        Some(row) => Outcome::failure(format!("verification failed: {} ({})", row.name, row.parameters)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_from_args(std::iter::once("ncpath").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn parse_row(text: &str) -> Vec<f64> {
        text.lines().nth(1).unwrap().split(',').map(|f| f.parse().unwrap()).collect()
    }

    #[test]
    fn sweep_range_parsing() {
        let r: SweepRange = "0:2:5".parse().unwrap();
        assert_eq!(r.values(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!("-1:1:1".parse::<SweepRange>().unwrap().values(), vec![-1.0]);
        assert!("0:1".parse::<SweepRange>().is_err());
        assert!("0:1:0".parse::<SweepRange>().is_err());
        assert!("a:1:2".parse::<SweepRange>().is_err());
    }

    #[test]
    fn kernel_origin_example() {
        let (code, out, _) = run(&["kernel", "--theta", "1", "--mass", "1", "--time", "2", "--x0", "0", "--y0", "0", "--xf", "0", "--yf", "0"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("theta,mass,time,x0,y0,xf,yf,re,im,abs\n"));
        let row = parse_row(&out);
        assert!((row[7] - 0.2).abs() < 1e-15 && (row[8] + 0.4).abs() < 1e-15);
    }

    #[test]
    fn kernel_at_zero_time_is_inverse_theta() {
        let (code, out, _) = run(&["kernel", "--theta", "0.5", "--time", "0", "--xf", "0"]);
        assert_eq!(code, 0);
        let row = parse_row(&out);
        assert!((row[7] - 2.0).abs() < 1e-15 && row[8].abs() < 1e-15);
    }

    #[test]
    fn negative_coordinates_parse() {
        let (code, out, _) = run(&["kernel", "--x0", "-0.5", "--yf", "-1e-1"]);
        assert_eq!(code, 0);
        let row = parse_row(&out);
        assert_eq!(row[3], -0.5);
        assert_eq!(row[6], -0.1);
    }

    #[test]
    fn invalid_parameters_exit_2() {
        for args in [
            vec!["kernel", "--theta", "0"],
            vec!["kernel", "--mass", "-1"],
            vec!["kernel", "--time", "-1"],
            vec!["kernel", "--fock-dim", "3"],
            vec!["sweep"],
            vec!["sweep", "--sweep-theta", "0:1:3"],
            vec!["kernel", "--bogus"],
        ] {
            let (code, _, err) = run(&args);
            assert_eq!(code, 2, "{args:?}");
            assert!(!err.is_empty());
        }
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("length^2"));
    }

    #[test]
    fn sweep_grid_order() {
        let cli = Cli::try_parse_from([
            "ncpath",
            "sweep",
            "--sweep-theta",
            "1:2:2",
            "--sweep-time",
            "0:1:2",
            "--sweep-dx",
            "0:1:3",
        ])
        .unwrap();
        let grid = sweep_grid(&RunConfig::from_cli(cli).unwrap());
        assert_eq!(grid.len(), 12);
        assert_eq!(grid[0], (1.0, 0.0, 0.0));
        assert_eq!(grid[1], (1.0, 0.0, 0.5));
        assert_eq!(grid[3], (1.0, 1.0, 0.0));
        assert_eq!(grid[6], (2.0, 0.0, 0.0));
    }

    #[test]
    fn sweep_dx_at_zero_time() {
        let (code, out, _) = run(&["sweep", "--time", "0", "--sweep-dx", "0:3:7"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 8);
        let mut prev = f64::INFINITY;
        for line in &lines[1..] {
            let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
            let dx = f[5] - f[3];
            assert!((f[9] - (-dx * dx / 2.0).exp()).abs() < 1e-15);
            assert!(f[9] < prev || dx == 0.0);
            prev = f[9];
        }
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let (_, out, _) = run(&["kernel", "--time", "0.3", "--xf", "0.7"]);
        let field = out.lines().nth(1).unwrap().split(',').nth(7).unwrap();
        let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17);
    }
}
