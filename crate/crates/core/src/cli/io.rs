//! JSON state files.
//!
//! ```json
//! {"dims":[2,2,2], "type":"pure", "amplitudes":[{"re":0.577,"im":0.0}, ...]}
//! {"dims":[2,2,2], "type":"mixed", "matrix":[[{"re":0.5,"im":0.0}, ...], ...]}
//! ```
//!
//! `im` may be omitted.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::CliError;
use crate::entanglement::State;
use crate::linalg::ComplexMatrix;
use crate::states::{DensityMatrix, PureState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonComplex {
    re: f64,
    #[serde(default)]
    im: f64,
}

impl From<JsonComplex> for Complex64 {
    fn from(c: JsonComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for JsonComplex {
    fn from(c: Complex64) -> Self {
        JsonComplex { re: c.re, im: c.im }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum StateFile {
    Pure { dims: Vec<usize>, amplitudes: Vec<JsonComplex> },
    Mixed { dims: Vec<usize>, matrix: Vec<Vec<JsonComplex>> },
}

/// Parses a state document. Schema problems are parse errors; physically
/// invalid content (wrong length, not PSD, bad trace) is a semantic error.
pub fn parse_state(text: &str) -> Result<State, CliError> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let semantic = |e: crate::states::StateError| CliError::Semantic(e.to_string());
    match file {
        StateFile::Pure { dims, amplitudes } => {
            let amps = amplitudes.into_iter().map(Complex64::from).collect();
            Ok(State::Pure(PureState::new(amps, dims).map_err(semantic)?))
        }
        StateFile::Mixed { dims, matrix } => {
            let rows: Vec<Vec<Complex64>> = matrix
                .into_iter()
                .map(|row| row.into_iter().map(Complex64::from).collect())
                .collect();
            let m = ComplexMatrix::from_rows(&rows).map_err(|e| CliError::Semantic(format!("matrix: {e}")))?;
            Ok(State::Mixed(DensityMatrix::new(m, dims).map_err(semantic)?))
        }
    }
}

pub fn read_state(path: &Path) -> Result<State, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_state(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn state_to_json(state: &State) -> String {
    let file = match state {
        State::Pure(psi) => StateFile::Pure {
            dims: psi.dims().to_vec(),
            amplitudes: psi.amplitudes().iter().copied().map(JsonComplex::from).collect(),
        },
        State::Mixed(rho) => StateFile::Mixed {
            dims: rho.dims().to_vec(),
            matrix: rho
                .matrix()
                .rows()
                .into_iter()
                .map(|row| row.into_iter().map(JsonComplex::from).collect())
                .collect(),
        },
    };
    serde_json::to_string_pretty(&file).expect("state serializes") + "\n"
}

pub fn write_state(path: &Path, state: &State) -> Result<(), CliError> {
    fs::write(path, state_to_json(state)).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
