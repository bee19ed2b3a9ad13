//! Flat `key = value` config files.
//!
//! ```text
//! # model
//! J = 1.5
//! delta = 0.2
//! eps = -1
//! format = csv
//! ```
//!
//! Blank lines and lines starting with `#` are skipped. Unknown and repeated
//! keys are errors. Flags given on the command line win over the file.

use std::str::FromStr;

use thiserror::Error;
use tlspin_core::tl_algebra::Sign;

use crate::output::Format;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("config line {line}: {message}")]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

pub const KEYS: [&str; 13] = [
    "J", "delta", "phi", "eps", "hbar", "m", "L", "a", "V0", "format", "tol_abs", "tol_eig", "perturb",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    pub j: Option<f64>,
    pub delta: Option<f64>,
    pub phi: Option<f64>,
    pub eps: Option<Sign>,
    pub hbar: Option<f64>,
    pub m: Option<f64>,
    pub l: Option<f64>,
    pub a: Option<f64>,
    pub v0: Option<f64>,
    pub format: Option<Format>,
    pub tol_abs: Option<f64>,
    pub tol_eig: Option<f64>,
    pub perturb: Option<f64>,
}

fn number(raw: &str, line: usize, key: &str) -> Result<f64, ConfigError> {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ConfigError {
            line,
            message: format!("{key} expects a finite number, got {raw:?}"),
        }),
    }
}

fn typed<T: FromStr>(raw: &str, line: usize, key: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e: T::Err| ConfigError {
        line,
        message: format!("{key}: {e}"),
    })
}

pub fn parse_config(text: &str) -> Result<ConfigFile, ConfigError> {
    let mut cfg = ConfigFile::default();
    let mut seen: Vec<&str> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw_line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some((key, value)) = trimmed.split_once('=') else {
            return Err(ConfigError {
                line,
                message: format!("expected key = value, got {trimmed:?}"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError {
                line,
                message: format!("unknown key {key:?}"),
            });
        };
        if seen.contains(&known) {
            return Err(ConfigError {
                line,
                message: format!("duplicate key {key:?}"),
            });
        }
        seen.push(known);
        if value.is_empty() {
            return Err(ConfigError {
                line,
                message: format!("missing value for {key:?}"),
            });
        }
        match known {
            "J" => cfg.j = Some(number(value, line, key)?),
            "delta" => cfg.delta = Some(number(value, line, key)?),
            "phi" => cfg.phi = Some(number(value, line, key)?),
            "eps" => cfg.eps = Some(typed(value, line, key)?),
            "hbar" => cfg.hbar = Some(number(value, line, key)?),
            "m" => cfg.m = Some(number(value, line, key)?),
            "L" => cfg.l = Some(number(value, line, key)?),
            "a" => cfg.a = Some(number(value, line, key)?),
            "V0" => cfg.v0 = Some(number(value, line, key)?),
            "format" => cfg.format = Some(typed(value, line, key)?),
            "tol_abs" => cfg.tol_abs = Some(number(value, line, key)?),
            "tol_eig" => cfg.tol_eig = Some(number(value, line, key)?),
            "perturb" => cfg.perturb = Some(number(value, line, key)?),
            _ => unreachable!("key list and match arms agree"),
        }
    }
    Ok(cfg)
}
