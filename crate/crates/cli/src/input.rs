//! Parameter files.
//!
//! A TOML file gives the system either by its raw coefficients
//!
//! ```toml
//! AL = [[0.0, 1.0], [-1.0, 0.0]]   # or flat: [a11, a12, a21, a22]
//! bL = [0.0, 0.0]
//! AR = [[1.0, 2.0], [-1.0, -1.0]]
//! bR = [1.0, 0.0]
//! ```
//!
//! or in canonical form with the keys `TL, DL, aL, TR, DR, aR, b`. The two
//! forms are mutually exclusive and unknown keys are rejected.

use crate::CliError;
use pwl_annulus::{CanonicalSystem, SystemParams};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum MatrixInput {
    Nested([[f64; 2]; 2]),
    Flat([f64; 4]),
}

impl MatrixInput {
    fn matrix(self) -> [[f64; 2]; 2] {
        match self {
            MatrixInput::Nested(m) => m,
            MatrixInput::Flat([a, b, c, d]) => [[a, b], [c, d]],
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileInput {
    #[serde(rename = "AL")]
    a_left: Option<MatrixInput>,
    #[serde(rename = "AR")]
    a_right: Option<MatrixInput>,
    #[serde(rename = "bL")]
    b_left: Option<[f64; 2]>,
    #[serde(rename = "bR")]
    b_right: Option<[f64; 2]>,
    #[serde(rename = "TL")]
    t_left: Option<f64>,
    #[serde(rename = "DL")]
    d_left: Option<f64>,
    #[serde(rename = "aL")]
    alpha_left: Option<f64>,
    #[serde(rename = "TR")]
    t_right: Option<f64>,
    #[serde(rename = "DR")]
    d_right: Option<f64>,
    #[serde(rename = "aR")]
    alpha_right: Option<f64>,
    b: Option<f64>,
}

/// A parsed system in the form it was given.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SystemInput {
    Raw(SystemParams),
    Canonical(CanonicalSystem),
}

impl SystemInput {
    pub fn params(&self) -> Result<SystemParams, CliError> {
        match self {
            SystemInput::Raw(p) => Ok(*p),
            SystemInput::Canonical(c) => c.to_params().map_err(|e| CliError::Input(e.to_string())),
        }
    }
}

pub fn parse_system(text: &str) -> Result<SystemInput, CliError> {
    let f: FileInput = toml::from_str(text).map_err(|e| CliError::Input(e.to_string()))?;
    let raw = [f.a_left.is_some(), f.a_right.is_some(), f.b_left.is_some(), f.b_right.is_some()];
    let canon = [f.t_left, f.d_left, f.alpha_left, f.t_right, f.d_right, f.alpha_right, f.b];
    let any_raw = raw.iter().any(|&x| x);
    let any_canon = canon.iter().any(Option::is_some);

    match (any_raw, any_canon) {
        (true, true) => Err(CliError::Input("raw keys (AL, AR, bL, bR) and canonical keys cannot be mixed".into())),
        (false, false) => Err(CliError::Input("no system parameters given".into())),
        (true, false) => {
            let (Some(al), Some(ar), Some(bl), Some(br)) = (f.a_left, f.a_right, f.b_left, f.b_right) else {
                return Err(CliError::Input("raw form needs all of AL, AR, bL, bR".into()));
            };
            SystemParams::new(al.matrix(), bl, ar.matrix(), br)
                .map(SystemInput::Raw)
                .map_err(|e| CliError::Input(e.to_string()))
        }
        (false, true) => {
            let names = ["TL", "DL", "aL", "TR", "DR", "aR", "b"];
            let missing: Vec<&str> = names.iter().zip(&canon).filter(|(_, v)| v.is_none()).map(|(n, _)| *n).collect();
            if !missing.is_empty() {
                return Err(CliError::Input(format!("canonical form is missing {}", missing.join(", "))));
            }
            let v: Vec<f64> = canon.iter().map(|x| x.unwrap_or_default()).collect();
            if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                return Err(CliError::Input(format!("non-finite parameter {bad}")));
            }
            Ok(SystemInput::Canonical(CanonicalSystem::new((v[2], v[0], v[1]), (v[5], v[3], v[4]), v[6])))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_nested_and_flat() {
        let a = parse_system("AL = [[0, 1], [-1, 0]]\nAR = [1, 2, -1, -1]\nbL = [0, 0]\nbR = [1, 0]\n").unwrap();
        let SystemInput::Raw(p) = a else { panic!() };
        assert_eq!(p.a_right(), &[[1.0, 2.0], [-1.0, -1.0]]);
        assert_eq!(p.derive_invariants().b, Some(0.5));
    }

    #[test]
    fn canonical() {
        let c = parse_system("TL = -2\nDL = 4\naL = -2\nTR = 1\nDR = 1\naR = 1\nb = 0\n").unwrap();
        assert_eq!(c, SystemInput::Canonical(CanonicalSystem::new((-2.0, -2.0, 4.0), (1.0, 1.0, 1.0), 0.0)));
    }

    #[test]
    fn rejections() {
        for text in [
            "TL = 1\nDL = 1\naL = 1\nTR = 1\nDR = 1\naR = 1\nb = 0\nextra = 3\n",
            "TL = 1\nDL = 1\naL = 1\nTR = 1\nDR = 1\naR = 1\n",
            "TL = 1\nDL = 1\naL = 1\nTR = 1\nDR = 1\naR = 1\nb = 0\nbL = [0, 0]\n",
            "AL = [[0, 1], [-1, 0]]\nAR = [1, 2, -1]\nbL = [0, 0]\nbR = [1, 0]\n",
            "TL = nan\nDL = 1\naL = 1\nTR = 1\nDR = 1\naR = 1\nb = 0\n",
            "",
            "not toml at all",
        ] {
            assert!(matches!(parse_system(text), Err(CliError::Input(_))), "{text}");
        }
    }
}
