//! The 4x4 Temperley-Lieb generator with loop value `d = sqrt(2)`, its
//! embeddings into spin chains, and a checker for the defining relations
//!
//! ```text
//! U_i U_i         = d U_i
//! U_i U_{i±1} U_i = U_i
//! U_i U_j         = U_j U_i      |i - j| >= 2
//! ```

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{kron, phase, Operator, C64, I, ONE, TOL_ABS, ZERO};

/// Loop value `d`.
pub const LOOP_VALUE: f64 = SQRT_2;

/// Longest chain `embed` accepts (dense 256x256 operators).
pub const MAX_SITES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(Error::InvalidParams(format!(
                "sign must be +1 or -1, got {other:?}"
            ))),
        }
    }
}

/// Phase angle `phi` (with `q = e^{i phi}`) and sign `eps` of the generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TLParams {
    pub phi: f64,
    pub eps: Sign,
}

impl TLParams {
    pub fn new(phi: f64, eps: Sign) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::NonFinite("phi"));
        }
        Ok(Self { phi, eps })
    }

    pub fn d(&self) -> f64 {
        LOOP_VALUE
    }

    pub fn q(&self) -> C64 {
        phase(self.phi)
    }
}

/// The generator in the basis `|uu>, |ud>, |du>, |dd>`:
///
/// ```text
///            [  1     0     0    i/q ]
/// 1/sqrt(2)  [  0     1    i e    0  ]
///            [  0   -i e    1     0  ]
///            [ -i q   0     0     1  ]
/// ```
pub fn make_generator(p: &TLParams) -> Operator {
    let q = p.q();
    let e = C64::new(p.eps.value(), 0.0);
    let s = C64::new(1.0 / SQRT_2, 0.0);
    let entries = vec![
        ONE,
        ZERO,
        ZERO,
        I / q,
        ZERO,
        ONE,
        I * e,
        ZERO,
        ZERO,
        -I * e,
        ONE,
        ZERO,
        -I * q,
        ZERO,
        ZERO,
        ONE,
    ];
    Operator::new(4, entries.into_iter().map(|z| z * s).collect())
        .expect("generator entries are finite")
}

/// A two-site operator placed on bond `(bond, bond + 1)` of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainOperator {
    pub sites: usize,
    pub bond: usize,
    pub op: Operator,
}

fn check_chain(sites: usize, bond: usize) -> Result<()> {
    if !(2..=MAX_SITES).contains(&sites) {
        return Err(Error::SitesOutOfRange(sites));
    }
    if bond < 1 || bond >= sites {
        return Err(Error::BondOutOfRange { sites, bond });
    }
    Ok(())
}

/// `1 (x) ... (x) two_site (x) ... (x) 1` with `two_site` on sites `bond, bond + 1`.
pub fn embed_operator(two_site: &Operator, sites: usize, bond: usize) -> Result<ChainOperator> {
    check_chain(sites, bond)?;
    if two_site.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: two_site.dim(),
        });
    }
    let left = Operator::identity(1 << (bond - 1));
    let right = Operator::identity(1 << (sites - bond - 1));
    Ok(ChainOperator {
        sites,
        bond,
        op: kron(&kron(&left, two_site), &right),
    })
}

pub fn embed(p: &TLParams, sites: usize, bond: usize) -> Result<ChainOperator> {
    embed_operator(&make_generator(p), sites, bond)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `U_i^2 = d U_i`
    Idempotent,
    /// `U_i U_j U_i = U_i` for neighbouring bonds
    Contraction,
    /// `[U_i, U_j] = 0` for `|i - j| >= 2`
    DistantCommutation,
}

impl Relation {
    pub const ALL: [Relation; 3] = [
        Relation::Idempotent,
        Relation::Contraction,
        Relation::DistantCommutation,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: Relation,
    pub bonds: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationReport {
    pub sites: usize,
    pub tolerance: f64,
    pub checks: Vec<RelationCheck>,
    /// Relation classes with no applicable bond combination on this chain.
    pub not_applicable: Vec<Relation>,
}

impl RelationReport {
    pub fn max_residual(&self, relation: Relation) -> Option<f64> {
        self.checks
            .iter()
            .filter(|c| c.relation == relation)
            .map(|c| c.residual)
            .reduce(f64::max)
    }

    pub fn worst(&self) -> f64 {
        self.checks.iter().map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| c.residual.is_nan() || c.residual > self.tolerance)
    }

    pub fn passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

pub fn verify_relations(p: &TLParams, sites: usize) -> Result<RelationReport> {
    verify_generator_relations(&make_generator(p), p.d(), sites, TOL_ABS)
}

/// Relation check for an arbitrary two-site operator, so that perturbed or
/// alternative generators go through the same harness.
pub fn verify_generator_relations(
    generator: &Operator,
    d: f64,
    sites: usize,
    tolerance: f64,
) -> Result<RelationReport> {
    if !(2..=MAX_SITES).contains(&sites) {
        return Err(Error::SitesOutOfRange(sites));
    }
    let bonds: Vec<Operator> = (1..sites)
        .map(|b| embed_operator(generator, sites, b).map(|c| c.op))
        .collect::<Result<_>>()?;
    let d = C64::new(d, 0.0);
    let mut checks = Vec::new();

    for (i, u) in bonds.iter().enumerate() {
        let residual = u.mat_mul(u)?.max_abs_diff(&u.scale(d))?;
        checks.push(RelationCheck {
            relation: Relation::Idempotent,
            bonds: vec![i + 1],
            residual,
        });
    }
    for (i, u) in bonds.iter().enumerate() {
        for j in [i.wrapping_sub(1), i + 1] {
            let Some(v) = bonds.get(j) else { continue };
            let residual = u.mat_mul(v)?.mat_mul(u)?.max_abs_diff(u)?;
            checks.push(RelationCheck {
                relation: Relation::Contraction,
                bonds: vec![i + 1, j + 1],
                residual,
            });
        }
    }
    for i in 0..bonds.len() {
        for j in i + 2..bonds.len() {
            let residual = bonds[i].commutator(&bonds[j])?.max_abs();
            checks.push(RelationCheck {
                relation: Relation::DistantCommutation,
                bonds: vec![i + 1, j + 1],
                residual,
            });
        }
    }

    let not_applicable = Relation::ALL
        .into_iter()
        .filter(|r| !checks.iter().any(|c| c.relation == *r))
        .collect();
    Ok(RelationReport {
        sites,
        tolerance,
        checks,
        not_applicable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{hermitian_eig, TOL_EIG};
    use std::f64::consts::PI;

    fn params(phi: f64, eps: Sign) -> TLParams {
        TLParams::new(phi, eps).unwrap()
    }

    fn phi_grid() -> impl Iterator<Item = f64> {
        (0..12).map(|k| k as f64 * PI / 6.0)
    }

    #[test]
    fn generator_at_phi_zero() {
        let u = make_generator(&params(0.0, Sign::Plus));
        let s = 1.0 / SQRT_2;
        let c = |re: f64, im: f64| C64::new(re * s, im * s);
        #[rustfmt::skip]
        let expected = Operator::new(4, vec![
            c(1.0, 0.0), ZERO, ZERO, c(0.0, 1.0),
            ZERO, c(1.0, 0.0), c(0.0, 1.0), ZERO,
            ZERO, c(0.0, -1.0), c(1.0, 0.0), ZERO,
            c(0.0, -1.0), ZERO, ZERO, c(1.0, 0.0),
        ]).unwrap();
        assert!(u.max_abs_diff(&expected).unwrap() <= 1e-15);
    }

    #[test]
    fn generator_corner_entry() {
        let u = make_generator(&params(PI / 3.0, Sign::Minus));
        let expected = I * phase(-PI / 3.0) / SQRT_2;
        assert!((u.get(0, 3) - expected).norm() < 1e-15);
        assert!((u.get(1, 2) - C64::new(0.0, -1.0 / SQRT_2)).norm() < 1e-15);
    }

    #[test]
    fn generator_is_hermitian_with_spectrum_0_0_d_d() {
        for eps in Sign::BOTH {
            for phi in phi_grid() {
                let u = make_generator(&params(phi, eps));
                assert!(u.hermiticity_residual() <= TOL_ABS);
                let eig = hermitian_eig(&u).unwrap();
                let expected = [0.0, 0.0, SQRT_2, SQRT_2];
                for (got, want) in eig.values.iter().zip(expected) {
                    assert!((got - want).abs() <= TOL_EIG, "phi={phi} {eps}: {:?}", eig.values);
                }
                let sq = u.mat_mul(&u).unwrap();
                assert!(sq.max_abs_diff(&u.scale(C64::new(SQRT_2, 0.0))).unwrap() <= TOL_ABS);
            }
        }
    }

    #[test]
    fn embed_two_sites_is_the_generator() {
        let p = params(0.4, Sign::Minus);
        assert_eq!(embed(&p, 2, 1).unwrap().op, make_generator(&p));
    }

    #[test]
    fn embed_errors() {
        let p = params(0.0, Sign::Plus);
        assert_eq!(embed(&p, 4, 0), Err(Error::BondOutOfRange { sites: 4, bond: 0 }));
        assert_eq!(embed(&p, 4, 4), Err(Error::BondOutOfRange { sites: 4, bond: 4 }));
        assert_eq!(embed(&p, 9, 1), Err(Error::SitesOutOfRange(9)));
        assert_eq!(embed(&p, 1, 1), Err(Error::SitesOutOfRange(1)));
    }

    #[test]
    fn distant_bonds_commute_and_neighbours_contract() {
        let p = params(1.3, Sign::Plus);
        let u1 = embed(&p, 4, 1).unwrap().op;
        let u3 = embed(&p, 4, 3).unwrap().op;
        assert!(u1.commutator(&u3).unwrap().max_abs() <= TOL_ABS);

        let a = embed(&p, 3, 1).unwrap().op;
        let b = embed(&p, 3, 2).unwrap().op;
        let aba = a.mat_mul(&b).unwrap().mat_mul(&a).unwrap();
        assert!(aba.max_abs_diff(&a).unwrap() <= TOL_ABS);
    }

    #[test]
    fn embedding_commutes_with_spectator_sites() {
        let p = params(2.2, Sign::Minus);
        let sigma_x = Operator::new(2, vec![ZERO, ONE, ONE, ZERO]).unwrap();
        let sigma_y = Operator::new(2, vec![ZERO, -I, I, ZERO]).unwrap();
        for bond in 1..5 {
            let u = embed(&p, 5, bond).unwrap().op;
            for site in (1..=5).filter(|s| *s != bond && *s != bond + 1) {
                for single in [&sigma_x, &sigma_y] {
                    let left = Operator::identity(1 << (site - 1));
                    let right = Operator::identity(1 << (5 - site));
                    let s = kron(&kron(&left, single), &right);
                    assert!(u.commutator(&s).unwrap().max_abs() <= TOL_ABS);
                }
            }
        }
    }

    #[test]
    fn report_on_two_sites_only_has_idempotent() {
        let r = verify_relations(&params(0.0, Sign::Plus), 2).unwrap();
        assert_eq!(r.checks.len(), 1);
        assert_eq!(
            r.not_applicable,
            vec![Relation::Contraction, Relation::DistantCommutation]
        );
        assert!(r.passed());
    }

    #[test]
    fn reports_pass_on_examples() {
        for (m, phi, eps) in [(4, 0.7, Sign::Plus), (5, 2.1, Sign::Minus)] {
            let r = verify_relations(&params(phi, eps), m).unwrap();
            assert!(r.not_applicable.is_empty());
            assert!(r.passed(), "{r:?}");
            assert!(r.worst() <= 1e-12);
        }
    }

    #[test]
    fn perturbed_generator_is_caught() {
        let p = params(0.0, Sign::Plus);
        let noise = Operator::from_fn(4, |r, c| C64::new(1e-6 * (r + 2 * c) as f64, 0.0));
        let bad = make_generator(&p).add(&noise).unwrap();
        let r = verify_generator_relations(&bad, SQRT_2, 3, TOL_ABS).unwrap();
        assert!(!r.passed());
        assert!(r.max_residual(Relation::Idempotent).unwrap() > 1e-7);
    }

    #[test]
    fn sign_parsing() {
        assert_eq!("+1".parse::<Sign>().unwrap(), Sign::Plus);
        assert_eq!("-".parse::<Sign>().unwrap(), Sign::Minus);
        assert!("0".parse::<Sign>().is_err());
    }
}
