//! Four-spin Hamiltonian built from type-matched cup/cap projectors on the
//! bonds (1,2) and (3,4):
//!
//! ```text
//! H = J/d^2 [ (1+D) (U1(12) U1(34) + 4 V1(12) V1(34))
//!           + (1-D) (U2(12) U2(34) + 4 V2(12) V2(34)) ]
//! ```
//!
//! with `U1 = rank_one(d1)`, `V1 = rank_one(d2)`, `U2 = rank_one(o1)`,
//! `V2 = rank_one(o2)`. H has rank 4; its nonzero eigenvalues are
//! `J(1±D)` and `4J(1±D)` on the four type-matched product states, and the
//! remaining 12 dimensions are its kernel.

use serde::Serialize;

use crate::cupcap::{cup_state, rank_one, CupType};
use crate::error::{Error, Result};
use crate::numerics::{hermitian_eig, kron, projector, EigenSystem, Operator, StateVector, C64, TOL_GROUP};
use crate::tl_algebra::{Sign, TLParams, LOOP_VALUE};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    #[serde(rename = "J")]
    pub j: f64,
    pub delta: f64,
    pub phi: f64,
    pub eps: Sign,
    pub hbar: f64,
}

impl ModelParams {
    pub fn new(j: f64, delta: f64, phi: f64, eps: Sign, hbar: f64) -> Result<Self> {
        for (name, v) in [("J", j), ("delta", delta), ("phi", phi), ("hbar", hbar)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be finite")));
            }
        }
        if j <= 0.0 {
            return Err(Error::InvalidParams(format!("J must be positive, got {j}")));
        }
        if hbar <= 0.0 {
            return Err(Error::InvalidParams(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { j, delta, phi, eps, hbar })
    }

    pub fn tl_params(&self) -> TLParams {
        TLParams {
            phi: self.phi,
            eps: self.eps,
        }
    }

    /// Non-fatal remarks about the parameter choice.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.delta.abs() >= 1.0 {
            out.push(format!(
                "|delta| = {} >= 1: the level J(1-|delta|) is no longer positive",
                self.delta.abs()
            ));
        }
        out
    }

    /// The four labelled energies `[E1+, E1-, E2+, E2-]`.
    pub fn labelled_energies(&self) -> [f64; 4] {
        let (j, d) = (self.j, self.delta);
        [j * (1.0 + d), j * (1.0 - d), 4.0 * j * (1.0 + d), 4.0 * j * (1.0 - d)]
    }
}

/// The cup types whose product states carry `[E1+, E1-, E2+, E2-]`.
pub const LABELLED_TYPES: [CupType; 4] = [CupType::D1, CupType::O1, CupType::D2, CupType::O2];

pub fn build_h(mp: &ModelParams) -> Operator {
    let p = mp.tl_params();
    let pair = |t: CupType| {
        let r = rank_one(t, &p);
        kron(&r, &r)
    };
    let plus = pair(CupType::D1)
        .add(&pair(CupType::D2).scale(C64::new(4.0, 0.0)))
        .expect("4x4 blocks");
    let minus = pair(CupType::O1)
        .add(&pair(CupType::O2).scale(C64::new(4.0, 0.0)))
        .expect("4x4 blocks");
    let prefactor = mp.j / (LOOP_VALUE * LOOP_VALUE);
    plus.scale(C64::new(prefactor * (1.0 + mp.delta), 0.0))
        .add(&minus.scale(C64::new(prefactor * (1.0 - mp.delta), 0.0)))
        .expect("16x16 blocks")
}

/// `psi_t (x) psi_t` on sites (12)(34).
pub fn product_state(t: CupType, p: &TLParams) -> StateVector {
    let v = cup_state(t, p);
    v.kron(&v)
}

/// Projector onto the span of the four type-matched product states: the
/// subspace where H is nonzero.
pub fn topological_projector(p: &TLParams) -> Operator {
    let states: Vec<StateVector> = CupType::ALL.iter().map(|t| product_state(*t, p)).collect();
    projector(&states).expect("non-empty")
}

#[derive(Debug, Clone)]
pub struct Level {
    pub energy: f64,
    pub multiplicity: usize,
    pub projector: Operator,
}

#[derive(Debug, Clone)]
pub struct Spectrum {
    pub levels: Vec<Level>,
    pub eigen: EigenSystem,
}

impl Spectrum {
    pub fn nonzero_levels(&self, tol: f64) -> impl Iterator<Item = &Level> {
        self.levels.iter().filter(move |l| l.energy.abs() > tol)
    }

    /// Count of eigenvalues with `|lambda| > tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigen.values.iter().filter(|v| v.abs() > tol).count()
    }
}

/// Full 16-level spectrum, eigenvalues within `TOL_GROUP` merged into one level.
pub fn spectrum(mp: &ModelParams) -> Result<Spectrum> {
    let eigen = hermitian_eig(&build_h(mp))?;
    let mut levels: Vec<Level> = Vec::new();
    let mut start = 0;
    while start < eigen.values.len() {
        let mut end = start + 1;
        while end < eigen.values.len() && eigen.values[end] - eigen.values[start] <= TOL_GROUP {
            end += 1;
        }
        let group = &eigen.values[start..end];
        levels.push(Level {
            energy: group.iter().sum::<f64>() / group.len() as f64,
            multiplicity: group.len(),
            projector: projector(&eigen.vectors[start..end])?,
        });
        start = end;
    }
    Ok(Spectrum { levels, eigen })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Splitting {
    pub omega_plus: f64,
    pub omega_minus: f64,
    pub delta_freq: f64,
}

pub fn splitting(mp: &ModelParams) -> Splitting {
    let omega_plus = mp.j * (1.0 + mp.delta) / mp.hbar;
    let omega_minus = mp.j * (1.0 - mp.delta) / mp.hbar;
    Splitting {
        omega_plus,
        omega_minus,
        delta_freq: 2.0 * mp.j * mp.delta / mp.hbar,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{TOL_ABS, TOL_EIG};
    use std::f64::consts::PI;

    fn mp(j: f64, delta: f64) -> ModelParams {
        ModelParams::new(j, delta, 0.0, Sign::Plus, 1.0).unwrap()
    }

    fn nonzero_values(s: &Spectrum) -> Vec<f64> {
        s.eigen.values.iter().copied().filter(|v| v.abs() > TOL_GROUP).collect()
    }

    #[test]
    fn trace_at_zero_delta() {
        let h = build_h(&mp(1.0, 0.0));
        assert!((h.trace() - C64::new(10.0, 0.0)).norm() <= TOL_ABS);
    }

    #[test]
    fn zero_delta_levels() {
        let s = spectrum(&mp(1.0, 0.0)).unwrap();
        let summary: Vec<(f64, usize)> = s.levels.iter().map(|l| (l.energy, l.multiplicity)).collect();
        assert_eq!(summary.len(), 3);
        for ((e, m), (want_e, want_m)) in summary.iter().zip([(0.0, 12), (1.0, 2), (4.0, 2)]) {
            assert!((e - want_e).abs() <= TOL_EIG, "{summary:?}");
            assert_eq!(*m, want_m);
        }
    }

    #[test]
    fn split_levels() {
        let s = spectrum(&mp(1.0, 0.1)).unwrap();
        let got = nonzero_values(&s);
        for (g, w) in got.iter().zip([0.9, 1.1, 3.6, 4.4]) {
            assert!((g - w).abs() <= TOL_EIG, "{got:?}");
        }
        let s = spectrum(&mp(2.0, 0.25)).unwrap();
        let levels: Vec<_> = s.nonzero_levels(TOL_GROUP).map(|l| (l.energy, l.multiplicity)).collect();
        for ((e, m), w) in levels.iter().zip([1.5, 2.5, 6.0, 10.0]) {
            assert!((e - w).abs() <= TOL_EIG);
            assert_eq!(*m, 1);
        }
    }

    #[test]
    fn projectors_are_complete_and_orthogonal() {
        let s = spectrum(&mp(0.5, -0.5)).unwrap();
        let total = s.levels.iter().try_fold(Operator::zeros(16), |acc, l| acc.add(&l.projector)).unwrap();
        assert!(total.max_abs_diff(&Operator::identity(16)).unwrap() <= TOL_EIG);
        assert_eq!(s.levels.iter().map(|l| l.multiplicity).sum::<usize>(), 16);
        for (a, la) in s.levels.iter().enumerate() {
            let sq = la.projector.mat_mul(&la.projector).unwrap();
            assert!(sq.max_abs_diff(&la.projector).unwrap() <= TOL_EIG);
            for lb in &s.levels[a + 1..] {
                assert!(la.projector.mat_mul(&lb.projector).unwrap().max_abs() <= TOL_EIG);
            }
        }
    }

    #[test]
    fn spectrum_over_grid() {
        for j in [0.5, 1.0, 2.0] {
            for delta in [0.0, 0.1, -0.1, 0.5, -0.5] {
                for phi in [0.0, PI / 4.0] {
                    for eps in Sign::BOTH {
                        let m = ModelParams::new(j, delta, phi, eps, 1.0).unwrap();
                        let h = build_h(&m);
                        assert!(h.hermiticity_residual() <= TOL_ABS);
                        let s = spectrum(&m).unwrap();
                        assert_eq!(s.rank(TOL_GROUP), 4);
                        let mut want = m.labelled_energies().to_vec();
                        want.sort_by(f64::total_cmp);
                        for (g, w) in nonzero_values(&s).iter().zip(&want) {
                            assert!((g - w).abs() <= TOL_EIG);
                        }
                        let p = topological_projector(&m.tl_params());
                        assert!(h.commutator(&p).unwrap().max_abs() <= TOL_ABS);
                    }
                }
            }
        }
    }

    #[test]
    fn nonzero_subspace_independent_of_delta() {
        let support = |delta: f64| {
            let s = spectrum(&mp(1.0, delta)).unwrap();
            let sum = s
                .nonzero_levels(TOL_GROUP)
                .try_fold(Operator::zeros(16), |acc, l| acc.add(&l.projector));
            sum.unwrap()
        };
        assert!(support(0.1).max_abs_diff(&support(0.5)).unwrap() <= TOL_EIG);
        let p = topological_projector(&mp(1.0, 0.1).tl_params());
        assert!(support(0.1).max_abs_diff(&p).unwrap() <= TOL_EIG);
    }

    #[test]
    fn labelled_product_states_are_eigenvectors() {
        let m = ModelParams::new(1.3, 0.2, 0.9, Sign::Minus, 1.0).unwrap();
        let h = build_h(&m);
        for (t, e) in LABELLED_TYPES.iter().zip(m.labelled_energies()) {
            let v = product_state(*t, &m.tl_params());
            let hv = h.apply(&v).unwrap();
            assert!(hv.max_abs_diff(&v.scale(C64::new(e, 0.0))).unwrap() <= TOL_ABS);
        }
    }

    #[test]
    fn splitting_values() {
        let s = splitting(&mp(1.0, 0.1));
        assert!((s.delta_freq - 0.2).abs() < 1e-15);
        assert!((s.omega_plus - 1.1).abs() < 1e-15 && (s.omega_minus - 0.9).abs() < 1e-15);
        assert_eq!(splitting(&mp(1.0, 0.0)).delta_freq, 0.0);
        let s = splitting(&mp(2.19325, 0.006812));
        assert!((s.delta_freq - 0.029881).abs() < 5e-7);
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelParams::new(0.0, 0.1, 0.0, Sign::Plus, 1.0).is_err());
        assert!(ModelParams::new(1.0, 0.1, 0.0, Sign::Plus, -1.0).is_err());
        assert!(ModelParams::new(1.0, f64::NAN, 0.0, Sign::Plus, 1.0).is_err());
        assert!(mp(1.0, 1.5).warnings().len() == 1);
        assert!(mp(1.0, 0.5).warnings().is_empty());
    }
}
