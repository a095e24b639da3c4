//! Input resolution: the built-in code and noise registries, JSON file
//! ingestion, and grid parsing.

use std::fs;
use std::path::Path;

use entroqec::codes::{leung4, repetition3, QecCode};
use entroqec::linalg::ComplexMatrix;
use entroqec::quantum::{KrausChannel, QuantumError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("unknown code '{0}' (built-ins: repetition3, leung4; or a path to a code JSON file)")]
    UnknownCode(String),
    #[error(
        "unknown noise '{0}' (built-ins: bitflip:P, ad:G, depol:P, dephase:P; or a path to a channel JSON file)"
    )]
    UnknownNoise(String),
    #[error("noise parameter in '{0}' is not a number")]
    BadParameter(String),
    #[error("{path}: {message}")]
    Malformed { path: String, message: String },
    #[error("the bitflip noise acts on 3 qubits, but the code has {0}")]
    QubitMismatch(usize),
    #[error("the channel acts on dimension {0}, but the code lives in dimension {1}")]
    DimensionMismatch(usize, usize),
    #[error("bad grid '{0}': expected START:END:STEP with STEP > 0 and START < END")]
    BadGrid(String),
    #[error("this operation needs a named parameterized noise family, not a channel file")]
    NeedNamedNoise,
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

/// Resolves a `--code` argument: a built-in name or a JSON file path.
pub fn load_code(spec: &str) -> Result<QecCode, InputError> {
    match spec {
        "repetition3" => Ok(repetition3()),
        "leung4" => Ok(leung4()),
        other if looks_like_path(other) => {
            let text = read_file(other)?;
            serde_json::from_str(&text).map_err(|e| InputError::Malformed {
                path: other.to_string(),
                message: e.to_string(),
            })
        }
        other => Err(InputError::UnknownCode(other.to_string())),
    }
}

/// A noise source: a named parameterized family, or a fixed channel loaded
/// from a file. Only named families support restriction and order fitting,
/// because those operations probe the family at several parameter values.
pub enum NoiseSource {
    Named { name: String, param: f64 },
    File(KrausChannel),
}

impl NoiseSource {
    /// The (name, parameter) pair, if this source is a named family.
    pub fn named(&self) -> Option<(&str, f64)> {
        match self {
            NoiseSource::Named { name, param } => Some((name, *param)),
            NoiseSource::File(_) => None,
        }
    }

    /// Instantiates the channel for a code on `n_qubits` qubits.
    pub fn channel(&self, n_qubits: usize) -> Result<KrausChannel, InputError> {
        match self {
            NoiseSource::Named { name, param } => named_channel(name, *param, n_qubits),
            NoiseSource::File(ch) => {
                let want = 1usize << n_qubits;
                if ch.dim() != want {
                    return Err(InputError::DimensionMismatch(ch.dim(), want));
                }
                Ok(ch.clone())
            }
        }
    }
}

/// Resolves a `--noise`/`--channel` argument: `name:param` or a JSON path.
pub fn parse_noise(spec: &str) -> Result<NoiseSource, InputError> {
    if let Some((name, param)) = spec.split_once(':') {
        if matches!(name, "bitflip" | "ad" | "depol" | "dephase") {
            let param: f64 = param
                .parse()
                .map_err(|_| InputError::BadParameter(spec.to_string()))?;
            return Ok(NoiseSource::Named {
                name: name.to_string(),
                param,
            });
        }
    }
    if looks_like_path(spec) {
        let text = read_file(spec)?;
        let channel: KrausChannel =
            serde_json::from_str(&text).map_err(|e| InputError::Malformed {
                path: spec.to_string(),
                message: e.to_string(),
            })?;
        return Ok(NoiseSource::File(channel));
    }
    Err(InputError::UnknownNoise(spec.to_string()))
}

/// One evaluation of a named family at strength `g`, sized to `n_qubits`.
/// Callers validate the name and qubit count up front (via `channel`), so
/// the closure form `|g| family_ops(name, n, g)` is total over valid g.
pub fn family_ops(
    name: &str,
    n_qubits: usize,
    g: f64,
) -> Result<Vec<ComplexMatrix>, QuantumError> {
    let channel = match name {
        "bitflip" => KrausChannel::bit_flip_enlarged(g)?,
        "ad" => KrausChannel::amplitude_damping(g)?.tensor_power(n_qubits)?,
        "depol" => KrausChannel::depolarizing(g)?.tensor_power(n_qubits)?,
        "dephase" => KrausChannel::dephasing(g)?.tensor_power(n_qubits)?,
        other => unreachable!("family name '{other}' not vetted by parse_noise"),
    };
    Ok(channel.operators().to_vec())
}

fn named_channel(name: &str, param: f64, n_qubits: usize) -> Result<KrausChannel, InputError> {
    if name == "bitflip" && n_qubits != 3 {
        return Err(InputError::QubitMismatch(n_qubits));
    }
    Ok(KrausChannel::new(family_ops(name, n_qubits, param)?, true)?)
}

/// Parses `START:END:STEP` into an inclusive, strictly increasing grid.
/// The last point is clamped to END so accumulated rounding cannot push it
/// past the stated range.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, InputError> {
    let bad = || InputError::BadGrid(spec.to_string());
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if !step.is_finite() || !start.is_finite() || !end.is_finite() || step <= 0.0 || end <= start {
        return Err(bad());
    }
    let n = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=n)
        .map(|i| (start + i as f64 * step).min(end))
        .collect())
}

fn looks_like_path(spec: &str) -> bool {
    spec.contains('/') || spec.ends_with(".json") || Path::new(spec).exists()
}

fn read_file(path: &str) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError::Malformed {
        path: path.to_string(),
        message: e.to_string(),
    })
}
