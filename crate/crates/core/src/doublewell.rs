//! Symmetric double well with infinite outer walls, mapped onto `(J, D)`.
//!
//! ```text
//!          | +inf  |x| >= L
//! V(x) =   | 0     a < |x| < L
//!          | V0    |x| <= a
//!
//! xi = sqrt(2 m V0) / hbar
//! J  = hbar^2 pi^2 / (2 m (L-a)^2)
//! D  = 4 exp(-2 xi a) / (xi (L-a))
//! ```
//!
//! `J` is the ground level of one well of width `L-a`; `D` is the relative
//! splitting through the barrier.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

/// Below this `D` the two wells are reported as independent.
pub const INDEPENDENT_WELLS_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellParams {
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub a: f64,
    #[serde(rename = "V0")]
    pub v0: f64,
    pub hbar: f64,
}

impl WellParams {
    pub fn new(m: f64, l: f64, a: f64, v0: f64, hbar: f64) -> Result<Self> {
        for (name, v) in [("m", m), ("L", l), ("a", a), ("V0", v0), ("hbar", hbar)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidParams(format!("{name} must be finite and positive, got {v}")));
            }
        }
        if a >= l {
            return Err(Error::InvalidParams(format!("need a < L, got a = {a}, L = {l}")));
        }
        Ok(Self { m, l, a, v0, hbar })
    }

    pub fn with_v0(&self, v0: f64) -> Result<Self> {
        Self::new(self.m, self.l, self.a, v0, self.hbar)
    }

    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(self.m, self.l, a, self.v0, self.hbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WellMap {
    pub xi: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub delta: f64,
    /// `2 J D / hbar`
    pub delta_freq: f64,
    /// `pi / delta_freq`; infinite once `D` underflows to zero.
    pub tau: f64,
}

impl WellMap {
    /// All fields finite and positive.
    pub fn is_usable(&self) -> bool {
        [self.xi, self.j, self.delta, self.delta_freq, self.tau]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0)
    }
}

pub fn map_well(w: &WellParams) -> WellMap {
    let width = w.l - w.a;
    let xi = (2.0 * w.m * w.v0).sqrt() / w.hbar;
    let j = w.hbar * w.hbar * PI * PI / (2.0 * w.m * width * width);
    let delta = 4.0 * (-2.0 * xi * w.a).exp() / (xi * width);
    let delta_freq = 2.0 * j * delta / w.hbar;
    WellMap {
        xi,
        j,
        delta,
        delta_freq,
        tau: if delta_freq > 0.0 { PI / delta_freq } else { f64::INFINITY },
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PotentialValue {
    Finite(f64),
    Infinite,
}

impl PotentialValue {
    pub fn is_infinite(self) -> bool {
        matches!(self, PotentialValue::Infinite)
    }
}

/// `|x| = a` counts as barrier, `|x| = L` as wall.
pub fn potential(w: &WellParams, x: f64) -> PotentialValue {
    let r = x.abs();
    if r >= w.l {
        PotentialValue::Infinite
    } else if r <= w.a {
        PotentialValue::Finite(w.v0)
    } else {
        PotentialValue::Finite(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitRow {
    #[serde(rename = "V0")]
    pub v0: f64,
    pub delta: f64,
    pub tau: f64,
    pub independent_wells: bool,
}

/// `(V0, D, tau)` along a strictly increasing list of barrier heights.
pub fn independent_wells_limit(w: &WellParams, v0_list: &[f64]) -> Result<Vec<LimitRow>> {
    if v0_list.windows(2).any(|p| p[1] <= p[0]) {
        return Err(Error::InvalidParams("V0 list must be strictly increasing".into()));
    }
    v0_list
        .iter()
        .map(|&v0| {
            let map = map_well(&w.with_v0(v0)?);
            Ok(LimitRow {
                v0,
                delta: map.delta,
                tau: map.tau,
                independent_wells: map.delta < INDEPENDENT_WELLS_THRESHOLD,
            })
        })
        .collect()
}
