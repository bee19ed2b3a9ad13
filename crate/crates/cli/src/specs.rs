//! Small argument languages: sweep ranges and lists of measurement counts.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct SpecError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, SpecError> {
    Err(SpecError(msg.into()))
}

pub const DEFAULT_SWEEP_POINTS: usize = 10;
pub const MAX_SWEEP_POINTS: usize = 10_000;
pub const MAX_N: u32 = 1_000_000;
pub const MAX_N_ENTRIES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    V0,
    A,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::V0 => "V0",
            SweepParam::A => "a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Lin,
    Log10,
}

/// `param=start:stop:scale[:count]`, e.g. `V0=1:100:log10` or `a=0.1:1:lin:25`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub scale: Scale,
    pub count: usize,
}

impl SweepSpec {
    /// Strictly increasing grid with both endpoints exact.
    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        let mut out: Vec<f64> = (0..self.count)
            .map(|k| {
                let f = k as f64 / last;
                match self.scale {
                    Scale::Lin => self.start + f * (self.stop - self.start),
                    Scale::Log10 => {
                        let (a, b) = (self.start.log10(), self.stop.log10());
                        10f64.powf(a + f * (b - a))
                    }
                }
            })
            .collect();
        out[0] = self.start;
        out[self.count - 1] = self.stop;
        out
    }
}

impl fmt::Display for SweepSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = match self.scale {
            Scale::Lin => "lin",
            Scale::Log10 => "log10",
        };
        write!(f, "{}={:?}:{:?}:{scale}:{}", self.param.name(), self.start, self.stop, self.count)
    }
}

fn finite(raw: &str, what: &str) -> Result<f64, SpecError> {
    match raw.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(format!("sweep {what} must be a finite number, got {raw:?}")),
    }
}

pub fn parse_sweep(src: &str) -> Result<SweepSpec, SpecError> {
    let Some((name, rest)) = src.split_once('=') else {
        return err(format!("sweep must look like V0=1:100:log10, got {src:?}"));
    };
    let param = match name.trim() {
        "V0" => SweepParam::V0,
        "a" => SweepParam::A,
        other => return err(format!("can only sweep V0 or a, got {other:?}")),
    };
    let parts: Vec<&str> = rest.split(':').collect();
    if !(3..=4).contains(&parts.len()) {
        return err(format!("sweep range must be start:stop:scale[:count], got {rest:?}"));
    }
    let start = finite(parts[0], "start")?;
    let stop = finite(parts[1], "stop")?;
    let scale = match parts[2].trim() {
        "lin" => Scale::Lin,
        "log10" => Scale::Log10,
        other => return err(format!("sweep scale must be lin or log10, got {other:?}")),
    };
    let count = match parts.get(3) {
        None => DEFAULT_SWEEP_POINTS,
        Some(raw) => match raw.trim().parse::<usize>() {
            Ok(c) if (2..=MAX_SWEEP_POINTS).contains(&c) => c,
            _ => return err(format!("sweep count must be an integer in 2..={MAX_SWEEP_POINTS}, got {raw:?}")),
        },
    };
    if start <= 0.0 {
        return err(format!("sweep start must be positive, got {start}"));
    }
    if stop <= start {
        return err(format!("sweep must be increasing, got {start} -> {stop}"));
    }
    let spec = SweepSpec {
        param,
        start,
        stop,
        scale,
        count,
    };
    if spec.values().windows(2).any(|w| w[1] <= w[0]) {
        return err(format!("sweep {src:?} is too fine to be strictly increasing in f64"));
    }
    Ok(spec)
}

impl FromStr for SweepSpec {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        parse_sweep(s)
    }
}

/// `10` or `1,2,5,10`; every entry a positive integer.
pub fn parse_n_list(src: &str) -> Result<Vec<u32>, SpecError> {
    let mut out = Vec::new();
    for raw in src.split(',') {
        let t = raw.trim();
        match t.parse::<u32>() {
            Ok(n) if (1..=MAX_N).contains(&n) => out.push(n),
            _ => return err(format!("n must be an integer in 1..={MAX_N}, got {t:?}")),
        }
        if out.len() > MAX_N_ENTRIES {
            return err(format!("at most {MAX_N_ENTRIES} values of n"));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NList(pub Vec<u32>);

impl FromStr for NList {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, SpecError> {
        parse_n_list(s).map(NList)
    }
}
