//! Cup/cap states and a small planar diagram language.
//!
//! A cup on sites `(i, j)` is the ket `sqrt(d) |psi_t>_{ij}`; a cap is the
//! matching bra. Diagrams are written in a text form:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('|' factor)*
//! factor := atom (';' atom)*
//! atom   := 'cup' '(' site ',' site ':' type ')'
//!         | 'cap' '(' site ',' site ':' type ')'
//!         | scalar '*' atom
//!         | '(' expr ')'
//! type   := 'd1' | 'd2' | 'o1' | 'o2'
//! scalar := ['+' | '-'] (real [('+' | '-') imag] | imag)     e.g. 2, -0.5i, 1+2i
//! ```
//!
//! `a ; b` stacks `a` on top of `b` (operator composition, `b` acts first).
//! `a | b` places the two side by side on disjoint sites. Free sites on the
//! top edge are ket (output) sites, those on the bottom edge bra (input)
//! sites, so `cap(1,2:d1) ; cup(1,2:d1)` is a closed loop worth `d`.

mod eval;
mod lexer;
mod parser;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{Operator, StateVector, C64, I, ONE, ZERO};
use crate::tl_algebra::{TLParams, LOOP_VALUE};

pub use eval::{evaluate, EvalResult};
pub use parser::{parse, MAX_NESTING};

/// Largest site label a diagram may use.
pub const MAX_DIAGRAM_SITES: u8 = 8;

/// The four two-spin cup states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CupType {
    D1,
    D2,
    O1,
    O2,
}

impl CupType {
    pub const ALL: [CupType; 4] = [CupType::D1, CupType::D2, CupType::O1, CupType::O2];

    pub fn label(self) -> &'static str {
        match self {
            CupType::D1 => "d1",
            CupType::D2 => "d2",
            CupType::O1 => "o1",
            CupType::O2 => "o2",
        }
    }
}

impl fmt::Display for CupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for CupType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CupType::ALL
            .into_iter()
            .find(|t| t.label() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown cup type {s:?}")))
    }
}

/// Normalized two-spin state of a cup type, in the order `|uu>, |ud>, |du>, |dd>`.
///
/// ```text
/// d1 = (|uu> - i q |dd>) / sqrt2        o1 = (|uu> + i q |dd>) / sqrt2
/// d2 = (|ud> - i e |du>) / sqrt2        o2 = (|ud> + i e |du>) / sqrt2
/// ```
///
/// The `-i q` coefficient is what makes `rank_one(d1) + rank_one(d2)` equal
/// the generator's `i/q` corner entry.
pub fn cup_state(t: CupType, p: &TLParams) -> StateVector {
    let s = C64::new(1.0 / std::f64::consts::SQRT_2, 0.0);
    let corner = -I * p.q();
    let cross = -I * C64::new(p.eps.value(), 0.0);
    let amps = match t {
        CupType::D1 => [ONE, ZERO, ZERO, corner],
        CupType::O1 => [ONE, ZERO, ZERO, -corner],
        CupType::D2 => [ZERO, ONE, cross, ZERO],
        CupType::O2 => [ZERO, ONE, -cross, ZERO],
    };
    StateVector::new(amps.iter().map(|z| z * s).collect()).expect("finite amplitudes")
}

/// The cup-over-cap diagram `d |psi_t><psi_t|`.
pub fn rank_one(t: CupType, p: &TLParams) -> Operator {
    let v = cup_state(t, p);
    v.outer(&v).scale(C64::new(LOOP_VALUE, 0.0))
}

/// Set of site labels `1..=8`, bit `s - 1` for site `s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct SiteSet(u16);

impl SiteSet {
    pub const EMPTY: SiteSet = SiteSet(0);

    pub fn pair(a: u8, b: u8) -> Self {
        SiteSet((1 << (a - 1)) | (1 << (b - 1)))
    }

    pub fn from_sites(sites: &[u8]) -> Self {
        SiteSet(
            sites
                .iter()
                .filter(|s| (1..=MAX_DIAGRAM_SITES).contains(s))
                .fold(0, |acc, s| acc | (1 << (s - 1))),
        )
    }

    pub fn union(self, other: SiteSet) -> Self {
        SiteSet(self.0 | other.0)
    }

    pub fn intersection(self, other: SiteSet) -> Self {
        SiteSet(self.0 & other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, site: u8) -> bool {
        (1..=MAX_DIAGRAM_SITES).contains(&site) && self.0 & (1 << (site - 1)) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Sites in ascending order.
    pub fn sites(self) -> Vec<u8> {
        (1..=MAX_DIAGRAM_SITES).filter(|&s| self.contains(s)).collect()
    }
}

/// Free sites on the top (ket) and bottom (bra) edges of a diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Boundary {
    pub top: SiteSet,
    pub bottom: SiteSet,
}

impl Boundary {
    pub fn sites(&self) -> SiteSet {
        self.top.union(self.bottom)
    }

    pub fn is_closed(&self) -> bool {
        self.top.is_empty() && self.bottom.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Diagram {
    Cup { sites: (u8, u8), kind: CupType },
    Cap { sites: (u8, u8), kind: CupType },
    Tensor(Vec<Diagram>),
    /// `Compose(top, bottom)`; `bottom` acts first.
    Compose(Box<Diagram>, Box<Diagram>),
    Scaled(C64, Box<Diagram>),
    Sum(Vec<Diagram>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Edge {
    Top,
    Bottom,
}

fn check_pair((a, b): (u8, u8)) -> Result<()> {
    let valid = |s: u8| (1..=MAX_DIAGRAM_SITES).contains(&s);
    if !valid(a) || !valid(b) || a == b {
        return Err(Error::InvalidParams(format!(
            "arc ({a}, {b}) needs two distinct sites in 1..={MAX_DIAGRAM_SITES}"
        )));
    }
    Ok(())
}

impl Diagram {
    pub fn cup(a: u8, b: u8, kind: CupType) -> Self {
        Diagram::Cup { sites: (a, b), kind }
    }

    pub fn cap(a: u8, b: u8, kind: CupType) -> Self {
        Diagram::Cap { sites: (a, b), kind }
    }

    pub fn compose(top: Diagram, bottom: Diagram) -> Self {
        Diagram::Compose(Box::new(top), Box::new(bottom))
    }

    pub fn scaled(c: C64, d: Diagram) -> Self {
        Diagram::Scaled(c, Box::new(d))
    }

    /// Validates the diagram and returns its free sites.
    pub fn boundary(&self) -> Result<Boundary> {
        match self {
            Diagram::Cup { sites, .. } => {
                check_pair(*sites)?;
                Ok(Boundary {
                    top: SiteSet::pair(sites.0, sites.1),
                    bottom: SiteSet::EMPTY,
                })
            }
            Diagram::Cap { sites, .. } => {
                check_pair(*sites)?;
                Ok(Boundary {
                    top: SiteSet::EMPTY,
                    bottom: SiteSet::pair(sites.0, sites.1),
                })
            }
            Diagram::Tensor(parts) => {
                if parts.is_empty() {
                    return Err(Error::EmptyDiagram("tensor product"));
                }
                let mut acc = Boundary {
                    top: SiteSet::EMPTY,
                    bottom: SiteSet::EMPTY,
                };
                for part in parts {
                    let b = part.boundary()?;
                    let overlap = acc.sites().intersection(b.sites());
                    if !overlap.is_empty() {
                        return Err(Error::DisjointnessViolation {
                            sites: overlap.sites(),
                        });
                    }
                    acc.top = acc.top.union(b.top);
                    acc.bottom = acc.bottom.union(b.bottom);
                }
                check_planar(parts)?;
                Ok(acc)
            }
            Diagram::Compose(top, bottom) => {
                let t = top.boundary()?;
                let b = bottom.boundary()?;
                if t.bottom != b.top {
                    return Err(Error::BoundaryMismatch(format!(
                        "upper diagram takes sites {:?} but lower diagram provides {:?}",
                        t.bottom.sites(),
                        b.top.sites()
                    )));
                }
                Ok(Boundary {
                    top: t.top,
                    bottom: b.bottom,
                })
            }
            Diagram::Scaled(c, inner) => {
                if !c.re.is_finite() || !c.im.is_finite() {
                    return Err(Error::NonFinite("diagram scalar"));
                }
                inner.boundary()
            }
            Diagram::Sum(terms) => {
                let Some((first, rest)) = terms.split_first() else {
                    return Err(Error::EmptyDiagram("sum"));
                };
                let b = first.boundary()?;
                for term in rest {
                    let other = term.boundary()?;
                    if other != b {
                        return Err(Error::BoundaryMismatch(format!(
                            "sum terms have different free sites: top {:?} bottom {:?} vs top {:?} bottom {:?}",
                            b.top.sites(),
                            b.bottom.sites(),
                            other.top.sites(),
                            other.bottom.sites()
                        )));
                    }
                }
                Ok(b)
            }
        }
    }

    pub fn is_closed(&self) -> Result<bool> {
        Ok(self.boundary()?.is_closed())
    }

    /// Reflection through a horizontal line: cups become caps, the order of
    /// composition reverses and scalars are conjugated. Its value is the
    /// adjoint of the original's.
    pub fn mirror(&self) -> Diagram {
        match self {
            Diagram::Cup { sites, kind } => Diagram::Cap {
                sites: *sites,
                kind: *kind,
            },
            Diagram::Cap { sites, kind } => Diagram::Cup {
                sites: *sites,
                kind: *kind,
            },
            Diagram::Tensor(parts) => Diagram::Tensor(parts.iter().map(Diagram::mirror).collect()),
            Diagram::Compose(top, bottom) => Diagram::compose(bottom.mirror(), top.mirror()),
            Diagram::Scaled(c, inner) => Diagram::scaled(c.conj(), inner.mirror()),
            Diagram::Sum(terms) => Diagram::Sum(terms.iter().map(Diagram::mirror).collect()),
        }
    }

    fn arcs(&self, out: &mut Vec<(Edge, u8, u8)>) {
        match self {
            Diagram::Cup { sites: (a, b), .. } => out.push((Edge::Top, *a.min(b), *a.max(b))),
            Diagram::Cap { sites: (a, b), .. } => out.push((Edge::Bottom, *a.min(b), *a.max(b))),
            Diagram::Tensor(parts) | Diagram::Sum(parts) => parts.iter().for_each(|p| p.arcs(out)),
            Diagram::Compose(top, bottom) => {
                top.arcs(out);
                bottom.arcs(out);
            }
            Diagram::Scaled(_, inner) => inner.arcs(out),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Diagram::Sum(_) => 0,
            Diagram::Tensor(_) => 1,
            Diagram::Compose(..) => 2,
            Diagram::Cup { .. } | Diagram::Cap { .. } | Diagram::Scaled(..) => 3,
        }
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>, min_precedence: u8) -> fmt::Result {
        if self.precedence() < min_precedence {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

/// Arcs on the same edge that come from different tensor factors must not
/// interleave.
fn check_planar(parts: &[Diagram]) -> Result<()> {
    let per_part: Vec<Vec<(Edge, u8, u8)>> = parts
        .iter()
        .map(|p| {
            let mut arcs = Vec::new();
            p.arcs(&mut arcs);
            arcs
        })
        .collect();
    for (i, left) in per_part.iter().enumerate() {
        for right in &per_part[i + 1..] {
            for &(e1, a, b) in left {
                for &(e2, c, d) in right {
                    let crosses = (a < c && c < b && b < d) || (c < a && a < d && d < b);
                    if e1 == e2 && crosses {
                        return Err(Error::NonPlanar(a, b, c, d));
                    }
                }
            }
        }
    }
    Ok(())
}

fn fmt_scalar(c: &C64, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let sign = if c.im.is_sign_negative() { '-' } else { '+' };
    write!(f, "{}{}{}i", c.re, sign, c.im.abs())
}

/// Prints the diagram in the text form accepted by [`parse`]; parsing the
/// output gives back an identical tree.
impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagram::Cup { sites: (a, b), kind } => write!(f, "cup({a},{b}:{kind})"),
            Diagram::Cap { sites: (a, b), kind } => write!(f, "cap({a},{b}:{kind})"),
            Diagram::Tensor(parts) => {
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" | ")?;
                    }
                    p.fmt_child(f, 2)?;
                }
                Ok(())
            }
            Diagram::Compose(top, bottom) => {
                top.fmt_child(f, 2)?;
                f.write_str(" ; ")?;
                bottom.fmt_child(f, 3)
            }
            Diagram::Scaled(c, inner) => {
                fmt_scalar(c, f)?;
                f.write_str("*")?;
                inner.fmt_child(f, 3)
            }
            Diagram::Sum(terms) => {
                for (k, t) in terms.iter().enumerate() {
                    if k > 0 {
                        f.write_str(" + ")?;
                    }
                    t.fmt_child(f, 1)?;
                }
                Ok(())
            }
        }
    }
}
