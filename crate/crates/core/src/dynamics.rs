//! Time evolution under H, tunneling between `e1` and `e3`, and the Zeno
//! measurement simulator.
//!
//! Evolution is exact: `exp(-iHt/hbar)` is applied through the eigensystem of
//! H. Starting from `e1`,
//!
//! ```text
//! P(e1) = cos^2(delta t / 2),   P(e3) = sin^2(delta t / 2),   delta = 2 J D / hbar
//! ```
//!
//! so the state has moved to `e3` after `tau = pi / |delta|`.

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hamiltonian::{build_h, ModelParams};
use crate::numerics::{hermitian_eig, EigenSystem, StateVector, C64, TOL_ABS};
use crate::topo_basis::{spectral_basis, TopoBasis};

/// `exp(-iHt/hbar)` for a fixed H.
#[derive(Debug, Clone)]
pub struct Propagator {
    eigen: EigenSystem,
    hbar: f64,
}

impl Propagator {
    pub fn new(mp: &ModelParams) -> Result<Self> {
        Ok(Self {
            eigen: hermitian_eig(&build_h(mp))?,
            hbar: mp.hbar,
        })
    }

    pub fn evolve(&self, initial: &StateVector, t: f64) -> Result<StateVector> {
        if !t.is_finite() {
            return Err(Error::NonFinite("evolution time"));
        }
        if initial.dim() != self.eigen.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.eigen.dim(),
                found: initial.dim(),
            });
        }
        if !initial.is_normalized(TOL_ABS) {
            return Err(Error::NotNormalized(initial.norm()));
        }
        let mut out = StateVector::from_dvector(DVector::zeros(initial.dim()));
        for (lambda, v) in self.eigen.values.iter().zip(&self.eigen.vectors) {
            let c = v.inner(initial)? * C64::from_polar(1.0, -lambda * t / self.hbar);
            out = out.add(&v.scale(c))?;
        }
        Ok(out)
    }
}

/// `exp(-iHt/hbar) initial`.
pub fn evolve(mp: &ModelParams, initial: &StateVector, t: f64) -> Result<StateVector> {
    Propagator::new(mp)?.evolve(initial, t)
}

fn require_splitting(mp: &ModelParams) -> Result<()> {
    if mp.delta == 0.0 {
        return Err(Error::DegenerateSpectrum(
            "delta = 0: E1+ and E1- coincide and nothing tunnels".into(),
        ));
    }
    Ok(())
}

/// `tau = pi hbar / (2 J |D|)`.
pub fn tunneling_time(mp: &ModelParams) -> Result<f64> {
    require_splitting(mp)?;
    Ok(PI * mp.hbar / (2.0 * mp.j * mp.delta.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvolutionTrace {
    pub times: Vec<f64>,
    pub p_e1: Vec<f64>,
    pub p_e3: Vec<f64>,
    /// Probability outside `span{e1, e3}`.
    pub leak: Vec<f64>,
}

impl EvolutionTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `max |p_e1 + p_e3 + leak - 1|`
    pub fn conservation_residual(&self) -> f64 {
        (0..self.len())
            .map(|k| (self.p_e1[k] + self.p_e3[k] + self.leak[k] - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Evolves `e1` and samples on `t_k = k t_max / (steps - 1)`.
pub fn tunneling_trace(mp: &ModelParams, t_max: f64, steps: usize) -> Result<EvolutionTrace> {
    require_splitting(mp)?;
    if steps < 2 {
        return Err(Error::InvalidParams(format!("steps must be at least 2, got {steps}")));
    }
    if !t_max.is_finite() || t_max < 0.0 {
        return Err(Error::InvalidParams(format!("t_max must be finite and >= 0, got {t_max}")));
    }
    let basis = spectral_basis(mp)?;
    let prop = Propagator::new(mp)?;
    let [e1, _, e3, _] = &basis.e;
    let mut trace = EvolutionTrace {
        times: Vec::with_capacity(steps),
        p_e1: Vec::with_capacity(steps),
        p_e3: Vec::with_capacity(steps),
        leak: Vec::with_capacity(steps),
    };
    for k in 0..steps {
        let t = t_max * k as f64 / (steps - 1) as f64;
        let psi = prop.evolve(e1, t)?;
        let a1 = e1.inner(&psi)?;
        let a3 = e3.inner(&psi)?;
        let rest = psi.sub(&e1.scale(a1))?.sub(&e3.scale(a3))?;
        trace.times.push(t);
        trace.p_e1.push(a1.norm_sqr());
        trace.p_e3.push(a3.norm_sqr());
        trace.leak.push(rest.norm().powi(2));
    }
    Ok(trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZenoRun {
    pub n: u32,
    /// `tau / n`
    pub interval: f64,
    pub survival_exact: f64,
    pub survival_analytic: f64,
    pub survival_limit: f64,
}

/// `(cos^2(pi / 2n))^n`
pub fn zeno_analytic(n: u32) -> f64 {
    (PI / (2.0 * n as f64)).cos().powi(2).powi(n as i32)
}

/// `exp(-pi^2 / 4n)`
pub fn zeno_limit(n: u32) -> f64 {
    (-PI * PI / (4.0 * n as f64)).exp()
}

/// `n` rounds of: evolve for `tau/n`, measure `e1`, keep the `e1` branch.
pub fn zeno_run(mp: &ModelParams, n: u32) -> Result<ZenoRun> {
    let basis = spectral_basis(mp)?;
    zeno_run_with(mp, &basis, &Propagator::new(mp)?, n)
}

/// [`zeno_run`] reusing a basis and propagator built for `mp`.
pub fn zeno_run_with(mp: &ModelParams, basis: &TopoBasis, prop: &Propagator, n: u32) -> Result<ZenoRun> {
    if n == 0 {
        return Err(Error::InvalidParams("n must be at least 1".into()));
    }
    let interval = tunneling_time(mp)? / n as f64;
    let e1 = &basis.e[0];
    let mut psi = e1.clone();
    let mut survival = 1.0;
    for _ in 0..n {
        let a = e1.inner(&prop.evolve(&psi, interval)?)?;
        survival *= a.norm_sqr();
        if a.norm() <= TOL_ABS {
            survival = 0.0;
            break;
        }
        // collapse onto e1, keeping the phase
        psi = e1.scale(a / a.norm());
    }
    Ok(ZenoRun {
        n,
        interval,
        survival_exact: survival,
        survival_analytic: zeno_analytic(n),
        survival_limit: zeno_limit(n),
    })
}
