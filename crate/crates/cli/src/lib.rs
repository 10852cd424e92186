//! Library side of the `pwl-annulus` command: input parsing, run settings
//! and the report writers behind each subcommand.

pub mod input;
pub mod report;

use clap::ValueEnum;
use std::fmt;
use std::path::PathBuf;

pub use input::{parse_system, SystemInput};

#[derive(Debug)]
pub enum CliError {
    /// Malformed input file or settings; exit code 1.
    Input(String),
    /// Well-formed input that does not meet the subcommand's requirements;
    /// exit code 2.
    Precondition(String),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 1,
            CliError::Precondition(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Precondition(m) => write!(f, "precondition failed: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.into())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Classify,
    Halfmap,
    Displacement,
    Portrait,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Named tolerances, overridable with `--tol name=value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Classifier zero test, before scaling by the coefficient magnitude.
    pub classify: f64,
    /// Uniform smallness of δ that marks a period annulus.
    pub annulus: f64,
    /// Bisection width for isolated zeros of δ.
    pub refine: f64,
    /// "δ = 0" test of the sign helpers.
    pub contract: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { classify: 1e-12, annulus: 1e-9, refine: 1e-10, contract: 1e-8 }
    }
}

impl Tolerances {
    pub fn with_overrides<S: AsRef<str>>(overrides: &[S]) -> Result<Self, CliError> {
        let mut t = Self::default();
        for o in overrides {
            let o = o.as_ref();
            let (name, value) =
                o.split_once('=').ok_or_else(|| CliError::Input(format!("tolerance `{o}` is not name=value")))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("tolerance `{name}` has non-numeric value `{value}`")))?;
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Input(format!("tolerance `{name}` must be positive and finite")));
            }
            let slot = match name.trim() {
                "classify" => &mut t.classify,
                "annulus" => &mut t.annulus,
                "refine" => &mut t.refine,
                "contract" => &mut t.contract,
                other => return Err(CliError::Input(format!("unknown tolerance `{other}`"))),
            };
            *slot = v;
        }
        Ok(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub command: Command,
    pub format: Format,
    pub tolerances: Tolerances,
    /// Grid points for halfmap and displacement tables.
    pub grid: usize,
    /// Table length past `lambda` when the domain is unbounded, in units of
    /// `max(1, lambda)`.
    pub span: f64,
    pub seed: u64,
    /// Perturbed systems evaluated by `sweep`.
    pub samples: usize,
    /// Half-width of the uniform perturbation applied by `sweep`.
    pub spread: f64,
    /// Starting ordinates for `portrait`; empty picks three inside the domain.
    pub y0: Vec<f64>,
    /// Samples per zone passage for `portrait`.
    pub points: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.grid < 2 {
            return Err(CliError::Input("grid must be at least 2".into()));
        }
        if !(self.span.is_finite() && self.span > 0.0) {
            return Err(CliError::Input("span must be positive and finite".into()));
        }
        if !(self.spread.is_finite() && self.spread >= 0.0) {
            return Err(CliError::Input("spread must be non-negative and finite".into()));
        }
        if let Some(y) = self.y0.iter().find(|y| !y.is_finite()) {
            return Err(CliError::Input(format!("non-finite y0 {y}")));
        }
        Ok(())
    }
}

/// Reads the input file and writes the report for `cfg.command` to `out`.
pub fn run(cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<(), CliError> {
    cfg.validate()?;
    let text = std::fs::read_to_string(&cfg.input)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", cfg.input.display())))?;
    let system = parse_system(&text)?;
    match cfg.command {
        Command::Classify => report::classify(&system, cfg, out),
        Command::Halfmap => report::halfmap(&system, cfg, out),
        Command::Displacement => report::displacement(&system, cfg, out),
        Command::Portrait => report::portrait(&system, cfg, out),
        Command::Sweep => report::sweep(&system, cfg, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_overrides() {
        let t = Tolerances::with_overrides(&["annulus=1e-7", " refine = 1e-12"]).unwrap();
        assert_eq!((t.annulus, t.refine, t.classify), (1e-7, 1e-12, 1e-12));
        for bad in ["annulus", "nope=1", "classify=-1", "refine=x"] {
            assert!(matches!(Tolerances::with_overrides(&[bad]), Err(CliError::Input(_))), "{bad}");
        }
    }
}
