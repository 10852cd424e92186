//! pwl-annulus: classify planar piecewise linear systems with a straight
//! separation line, tabulate their half-maps and displacement function, and
//! sample crossing orbits.
//!
//! Exit codes: 0 on success (whatever the verdict), 1 for malformed input,
//! 2 when the system does not meet the subcommand's preconditions.

use clap::Parser;
use pwl_annulus_cli::{run, Command, Format, RunConfig, Tolerances};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Every flag can also be set through the environment variable shown.
#[derive(Parser, Debug)]
#[command(name = "pwl-annulus", version, about)]
struct Args {
    /// TOML file with AL, AR, bL, bR or with TL, DL, aL, TR, DR, aR, b.
    #[arg(long, env = "PWL_ANNULUS_INPUT")]
    input: PathBuf,

    #[arg(long, value_enum, default_value = "classify", env = "PWL_ANNULUS_CMD")]
    cmd: Command,

    #[arg(long, value_enum, default_value = "json", env = "PWL_ANNULUS_FORMAT")]
    format: Format,

    /// Tolerance override `name=value`; names: classify, annulus, refine,
    /// contract. Repeatable or comma separated.
    #[arg(long, value_delimiter = ',', env = "PWL_ANNULUS_TOL")]
    tol: Vec<String>,

    /// Grid points of the halfmap and displacement tables.
    #[arg(long, default_value_t = 64, env = "PWL_ANNULUS_GRID")]
    grid: usize,

    /// Table length past lambda for unbounded domains, in units of max(1, lambda).
    #[arg(long, default_value_t = 10.0, env = "PWL_ANNULUS_SPAN")]
    span: f64,

    #[arg(long, default_value_t = 0, env = "PWL_ANNULUS_SEED")]
    seed: u64,

    /// Perturbed systems evaluated by sweep.
    #[arg(long, default_value_t = 100, env = "PWL_ANNULUS_SAMPLES")]
    samples: usize,

    /// Half-width of the uniform perturbation of each canonical parameter.
    #[arg(long, default_value_t = 0.1, env = "PWL_ANNULUS_SPREAD")]
    spread: f64,

    /// Starting ordinates (comma separated) for portrait, halfmap and
    /// displacement; replaces the grid.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, env = "PWL_ANNULUS_Y0")]
    y0: Vec<f64>,

    /// Samples per zone passage in portrait.
    #[arg(long, default_value_t = 50, env = "PWL_ANNULUS_POINTS")]
    points: usize,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let tolerances = match Tolerances::with_overrides(&args.tol) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("pwl-annulus: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let cfg = RunConfig {
        input: args.input,
        command: args.cmd,
        format: args.format,
        tolerances,
        grid: args.grid,
        span: args.span,
        seed: args.seed,
        samples: args.samples,
        spread: args.spread,
        y0: args.y0,
        points: args.points,
    };

    let stdout = std::io::stdout();
    let mut out = std::io::BufWriter::new(stdout.lock());
    let result = run(&cfg, &mut out).and_then(|()| out.flush().map_err(Into::into));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            drop(out);
            eprintln!("pwl-annulus: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
