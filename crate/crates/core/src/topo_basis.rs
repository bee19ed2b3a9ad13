//! Four-spin topological basis, built two ways.
//!
//! The graphical route starts from a side-by-side cup pair `psi_f(12) psi_f(34)`
//! and adds the Gram-Schmidt residue of `U_23` acting on it. Projecting the
//! family's generator onto that pair gives
//!
//! ```text
//! U_A = [ d  0 ]        U_B = [ 1/d          sqrt(1-1/d^2) ]
//!       [ 0  0 ]              [ sqrt(1-1/d^2)  d - 1/d     ]
//! ```
//!
//! The spectral route diagonalizes the Hamiltonian and recombines its four
//! nonzero eigenvectors, `e1 = (E1+ + E1-)/sqrt2`, `e3 = (E1+ - E1-)/sqrt2`
//! and likewise `e2, e4` from `E2±`, so that `(e1 ± e3)/sqrt2` are exact
//! eigenstates.
//!
//! The two quadruples span the same subspace but are different bases: the
//! graphical one does not diagonalize H in the `(e1 ± e3)` pattern and the
//! spectral one does not reproduce `U_A, U_B`. [`consistency_report`] puts
//! numbers on all of this instead of picking one.

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::cupcap::{cup_state, rank_one, CupType};
use crate::error::{Error, Result};
use crate::hamiltonian::{build_h, ModelParams};
use crate::numerics::{
    gram_residual, hermitian_eig, projector, Operator, StateVector, C64, TOL_ABS, TOL_EIG, TOL_GROUP,
};
use crate::tl_algebra::{embed_operator, TLParams, LOOP_VALUE};

/// Which pair of cup types a graphical basis pair is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `(d1, d2)`; its generator is the T-L generator itself.
    D,
    /// `(o1, o2)`; its generator `rank_one(o1) + rank_one(o2) = d - U` is
    /// again a T-L generator (`phi -> phi + pi`, `eps -> -eps`).
    Zero,
}

impl Family {
    pub fn cup_types(self) -> (CupType, CupType) {
        match self {
            Family::D => (CupType::D1, CupType::D2),
            Family::Zero => (CupType::O1, CupType::O2),
        }
    }

    pub fn generator(self, p: &TLParams) -> Operator {
        let (a, b) = self.cup_types();
        rank_one(a, p).add(&rank_one(b, p)).expect("4x4")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisPair {
    pub family: Family,
    pub v1: StateVector,
    pub v2: StateVector,
}

/// `v1 = psi_f(12) (x) psi_f(34)`, `v2 = normalize(U_23 v1 - <v1|U_23|v1> v1)`,
/// where `U` is the family's generator.
pub fn graphical_basis(p: &TLParams, family: Family) -> Result<BasisPair> {
    let (first, _) = family.cup_types();
    let cup = cup_state(first, p);
    let v1 = cup.kron(&cup);
    let u23 = embed_operator(&family.generator(p), 4, 2)?.op;
    let w = u23.apply(&v1)?;
    let overlap = v1.inner(&w)?;
    let residue = w.sub(&v1.scale(overlap))?;
    let n = residue.norm();
    if n < TOL_ABS {
        return Err(Error::DegenerateGramSchmidt(n));
    }
    Ok(BasisPair {
        family,
        v1,
        v2: residue.scale(C64::new(1.0 / n, 0.0)),
    })
}

impl BasisPair {
    pub fn two_d_rep(&self, p: &TLParams) -> Result<TwoDRep> {
        two_d_rep(&self.v1, &self.v2, &self.family.generator(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoDResiduals {
    pub a_squared: f64,
    pub b_squared: f64,
    pub aba: f64,
    pub bab: f64,
}

impl TwoDResiduals {
    pub fn max(&self) -> f64 {
        self.a_squared.max(self.b_squared).max(self.aba).max(self.bab)
    }
}

/// 2x2 matrices of `U_12` and `U_23` on a two-state subspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoDRep {
    pub u_a: [[f64; 2]; 2],
    pub u_b: [[f64; 2]; 2],
    /// Largest imaginary part dropped when taking real entries.
    pub max_imag: f64,
    /// Largest `|M_01 - M_10|` over the two matrices.
    pub asymmetry: f64,
    pub residuals: TwoDResiduals,
}

pub fn expected_u_a() -> [[f64; 2]; 2] {
    [[LOOP_VALUE, 0.0], [0.0, 0.0]]
}

pub fn expected_u_b() -> [[f64; 2]; 2] {
    let d = LOOP_VALUE;
    let off = (1.0 - 1.0 / (d * d)).sqrt();
    [[1.0 / d, off], [off, d - 1.0 / d]]
}

impl TwoDRep {
    /// Largest entry deviation from the expected `U_A, U_B`.
    pub fn deviation(&self) -> f64 {
        let (ea, eb) = (expected_u_a(), expected_u_b());
        let mut worst = self.max_imag;
        for r in 0..2 {
            for c in 0..2 {
                worst = worst.max((self.u_a[r][c] - ea[r][c]).abs());
                worst = worst.max((self.u_b[r][c] - eb[r][c]).abs());
            }
        }
        worst
    }
}

type M2 = [[f64; 2]; 2];

fn mul2(a: &M2, b: &M2) -> M2 {
    let mut out = [[0.0; 2]; 2];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
        }
    }
    out
}

fn diff2(a: &M2, b: &M2, scale: f64) -> f64 {
    let mut worst = 0.0_f64;
    for r in 0..2 {
        for c in 0..2 {
            worst = worst.max((a[r][c] - scale * b[r][c]).abs());
        }
    }
    worst
}

/// Projects the two-site `generator` at bonds (1,2) and (2,3) of a four-site
/// chain onto `{v1, v2}` and checks the 2x2 T-L relations.
pub fn two_d_rep(v1: &StateVector, v2: &StateVector, generator: &Operator) -> Result<TwoDRep> {
    let u12 = embed_operator(generator, 4, 1)?.op;
    let u23 = embed_operator(generator, 4, 2)?.op;
    let basis = [v1, v2];
    let mut max_imag = 0.0_f64;
    let mut project = |u: &Operator| -> Result<M2> {
        let mut m = [[0.0; 2]; 2];
        for (r, a) in basis.iter().enumerate() {
            for (c, b) in basis.iter().enumerate() {
                let z = u.matrix_element(a, b)?;
                max_imag = max_imag.max(z.im.abs());
                m[r][c] = z.re;
            }
        }
        Ok(m)
    };
    let u_a = project(&u12)?;
    let u_b = project(&u23)?;
    let d = LOOP_VALUE;
    let residuals = TwoDResiduals {
        a_squared: diff2(&mul2(&u_a, &u_a), &u_a, d),
        b_squared: diff2(&mul2(&u_b, &u_b), &u_b, d),
        aba: diff2(&mul2(&mul2(&u_a, &u_b), &u_a), &u_a, 1.0),
        bab: diff2(&mul2(&mul2(&u_b, &u_a), &u_b), &u_b, 1.0),
    };
    Ok(TwoDRep {
        u_a,
        u_b,
        max_imag,
        asymmetry: (u_a[0][1] - u_a[1][0]).abs().max((u_b[0][1] - u_b[1][0]).abs()),
        residuals,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    Graphical,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopoBasis {
    /// `e1, e2, e3, e4`
    pub e: [StateVector; 4],
    pub route: Route,
    pub params: TLParams,
    pub model: Option<ModelParams>,
}

impl TopoBasis {
    pub fn gram_residual(&self) -> Result<f64> {
        gram_residual(&self.e)
    }

    pub fn projector(&self) -> Result<Operator> {
        projector(&self.e)
    }

    /// `[E1+, E1-, E2+, E2-]` reassembled as `(e1 ± e3)/sqrt2, (e2 ± e4)/sqrt2`.
    pub fn eigen_combinations(&self) -> Result<[StateVector; 4]> {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let [e1, e2, e3, e4] = &self.e;
        Ok([
            e1.add(e3)?.scale(s),
            e1.sub(e3)?.scale(s),
            e2.add(e4)?.scale(s),
            e2.sub(e4)?.scale(s),
        ])
    }

    /// Max over the four combinations of `max |H v - E v|`, with the energies
    /// `[J(1+D), J(1-D), 4J(1+D), 4J(1-D)]`.
    pub fn eigen_relation_residual(&self, mp: &ModelParams) -> Result<f64> {
        let h = build_h(mp);
        let mut worst = 0.0_f64;
        for (v, e) in self.eigen_combinations()?.iter().zip(mp.labelled_energies()) {
            worst = worst.max(h.apply(v)?.max_abs_diff(&v.scale(C64::new(e, 0.0)))?);
        }
        Ok(worst)
    }

    /// 2D projections of the d-family generator on `{e1, e2}` and `{e3, e4}`.
    pub fn two_d_reps(&self) -> Result<[TwoDRep; 2]> {
        let u = Family::D.generator(&self.params);
        Ok([two_d_rep(&self.e[0], &self.e[1], &u)?, two_d_rep(&self.e[2], &self.e[3], &u)?])
    }
}

/// `e1, e2` from the d-family pair and `e3, e4` from the 0-family pair.
pub fn graphical_quadruple(p: &TLParams) -> Result<TopoBasis> {
    let d = graphical_basis(p, Family::D)?;
    let z = graphical_basis(p, Family::Zero)?;
    Ok(TopoBasis {
        e: [d.v1, d.v2, z.v1, z.v2],
        route: Route::Graphical,
        params: *p,
        model: None,
    })
}

/// Basis recovered from the four nonzero eigenvectors of H.
pub fn spectral_basis(mp: &ModelParams) -> Result<TopoBasis> {
    let targets = mp.labelled_energies();
    let labels = ["J(1+D)", "J(1-D)", "4J(1+D)", "4J(1-D)"];
    for (k, &a) in targets.iter().enumerate() {
        if a.abs() <= TOL_GROUP {
            return Err(Error::DegenerateSpectrum(format!(
                "level {} = {a} coincides with the kernel of H",
                labels[k]
            )));
        }
        for (l, &b) in targets.iter().enumerate().skip(k + 1) {
            if (a - b).abs() <= TOL_GROUP {
                return Err(Error::DegenerateSpectrum(format!(
                    "levels {} and {} coincide at delta = {}",
                    labels[k], labels[l], mp.delta
                )));
            }
        }
    }

    let eig = hermitian_eig(&build_h(mp))?;
    let pick = |target: f64| -> Result<StateVector> {
        let (k, gap) = eig
            .values
            .iter()
            .map(|v| (v - target).abs())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty spectrum");
        if gap > TOL_EIG {
            return Err(Error::DegenerateSpectrum(format!(
                "no eigenvalue within {TOL_EIG:e} of {target}"
            )));
        }
        Ok(eig.vectors[k].clone())
    };
    let [e1p, e1m, e2p, e2m] = targets.map(pick);
    let (e1p, e1m, e2p, e2m) = (e1p?, e1m?, e2p?, e2m?);
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    Ok(TopoBasis {
        e: [
            e1p.add(&e1m)?.scale(s),
            e2p.add(&e2m)?.scale(s),
            e1p.sub(&e1m)?.scale(s),
            e2p.sub(&e2m)?.scale(s),
        ],
        route: Route::Spectral,
        params: mp.tl_params(),
        model: Some(*mp),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RouteSummary {
    pub route: Route,
    /// `max |<e_i|e_j> - delta_ij|`
    pub gram_residual: f64,
    /// 2D projections of the pairs `{e1, e2}` and `{e3, e4}`.
    pub two_d: [TwoDRep; 2],
    /// Largest deviation of those projections from the expected `U_A, U_B`.
    pub two_d_deviation: f64,
    /// Largest residual of the four 2D T-L relations.
    pub two_d_relation_residual: f64,
    /// `max |H v - E v|` over `v = (e1 ± e3)/sqrt2, (e2 ± e4)/sqrt2`.
    pub eigen_relation_residual: f64,
}

fn summarize(basis: &TopoBasis, two_d: [TwoDRep; 2], mp: &ModelParams) -> Result<RouteSummary> {
    Ok(RouteSummary {
        route: basis.route,
        gram_residual: basis.gram_residual()?,
        two_d_deviation: two_d[0].deviation().max(two_d[1].deviation()),
        two_d_relation_residual: two_d[0].residuals.max().max(two_d[1].residuals.max()),
        eigen_relation_residual: basis.eigen_relation_residual(mp)?,
        two_d,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConsistencyFlags {
    /// The graphical pairs reproduce `U_A, U_B` and the 2D relations.
    pub graphical_reproduces_two_d_rep: bool,
    /// The spectral quadruple is orthonormal and its `(e1 ± e3)/sqrt2`
    /// combinations are eigenstates with the labelled energies.
    pub spectral_reproduces_eigenstates: bool,
    /// Both quadruples span the same four-dimensional subspace.
    pub same_subspace: bool,
    /// Some single quadruple satisfies both the 2D representation and the
    /// eigenstate pattern. Informational.
    pub single_basis_compatible: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub params: ModelParams,
    pub tolerance_abs: f64,
    pub tolerance_eig: f64,
    /// `overlap[i][j] = <graphical e_i | spectral e_j>` as `[re, im]`.
    pub overlap: Vec<Vec<[f64; 2]>>,
    /// `max |O^dagger O - I|`
    pub overlap_unitarity_residual: f64,
    /// `max |P_graphical - P_spectral|`
    pub projector_difference: f64,
    pub graphical: RouteSummary,
    pub spectral: RouteSummary,
    pub flags: ConsistencyFlags,
}

impl ConsistencyReport {
    /// The flags that must hold; `single_basis_compatible` is excluded.
    pub fn mandatory_pass(&self) -> bool {
        self.flags.graphical_reproduces_two_d_rep
            && self.flags.spectral_reproduces_eigenstates
            && self.flags.same_subspace
    }
}

pub fn consistency_report(mp: &ModelParams) -> Result<ConsistencyReport> {
    let p = mp.tl_params();
    let d_pair = graphical_basis(&p, Family::D)?;
    let z_pair = graphical_basis(&p, Family::Zero)?;
    let graphical = graphical_quadruple(&p)?;
    let spectral = spectral_basis(mp)?;

    let g_two_d = [d_pair.two_d_rep(&p)?, z_pair.two_d_rep(&p)?];
    let g_summary = summarize(&graphical, g_two_d, mp)?;
    let s_summary = summarize(&spectral, spectral.two_d_reps()?, mp)?;

    let mut overlap = Vec::with_capacity(4);
    let mut o = [[C64::new(0.0, 0.0); 4]; 4];
    for (i, g) in graphical.e.iter().enumerate() {
        let mut row = Vec::with_capacity(4);
        for (j, s) in spectral.e.iter().enumerate() {
            o[i][j] = g.inner(s)?;
            row.push([o[i][j].re, o[i][j].im]);
        }
        overlap.push(row);
    }
    let mut unitarity = 0.0_f64;
    for a in 0..4 {
        for b in 0..4 {
            let z: C64 = (0..4).map(|k| o[k][a].conj() * o[k][b]).sum();
            let target = if a == b { 1.0 } else { 0.0 };
            unitarity = unitarity.max((z - C64::new(target, 0.0)).norm());
        }
    }
    let projector_difference = graphical.projector()?.max_abs_diff(&spectral.projector()?)?;

    let two_d_ok = |s: &RouteSummary| {
        s.two_d_deviation <= TOL_ABS && s.two_d_relation_residual <= TOL_ABS && s.gram_residual <= TOL_ABS
    };
    let eigen_ok = |s: &RouteSummary| s.eigen_relation_residual <= TOL_ABS && s.gram_residual <= TOL_ABS;
    let flags = ConsistencyFlags {
        graphical_reproduces_two_d_rep: two_d_ok(&g_summary),
        spectral_reproduces_eigenstates: eigen_ok(&s_summary),
        same_subspace: projector_difference <= TOL_EIG && unitarity <= TOL_EIG,
        single_basis_compatible: (two_d_ok(&g_summary) && eigen_ok(&g_summary))
            || (two_d_ok(&s_summary) && eigen_ok(&s_summary)),
    };

    Ok(ConsistencyReport {
        params: *mp,
        tolerance_abs: TOL_ABS,
        tolerance_eig: TOL_EIG,
        overlap,
        overlap_unitarity_residual: unitarity,
        projector_difference,
        graphical: g_summary,
        spectral: s_summary,
        flags,
    })
}

/// `sqrt(1 - 1/d^2)` for `d = sqrt2`.
pub const U_B_OFF_DIAGONAL: f64 = FRAC_1_SQRT_2;
