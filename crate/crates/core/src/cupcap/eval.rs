use nalgebra::DMatrix;

use crate::cupcap::{cup_state, Diagram, SiteSet};
use crate::error::{Error, Result};
use crate::numerics::{Operator, StateVector, C64};
use crate::tl_algebra::{TLParams, LOOP_VALUE};

/// A linear map from the bottom sites to the top sites. Rows index the top
/// sites, columns the bottom sites, lowest site label most significant.
#[derive(Debug, Clone)]
struct Block {
    top: SiteSet,
    bottom: SiteSet,
    m: DMatrix<C64>,
}

/// Index into `part` extracted from every index into `whole` (`part` is a
/// subset of `whole`).
fn sub_indices(whole: SiteSet, part: SiteSet) -> Vec<usize> {
    let sites = whole.sites();
    let n = sites.len();
    (0..1usize << n)
        .map(|idx| {
            sites.iter().enumerate().fold(0, |acc, (k, &s)| {
                if part.contains(s) {
                    (acc << 1) | ((idx >> (n - 1 - k)) & 1)
                } else {
                    acc
                }
            })
        })
        .collect()
}

fn arc_block(sites: (u8, u8), amps: &StateVector, as_cup: bool) -> Block {
    let (a, b) = sites;
    let weight = C64::new(LOOP_VALUE.sqrt(), 0.0);
    // amplitude index is (bit of a, bit of b); the block orders by site label
    let column: Vec<C64> = (0..4)
        .map(|sorted| {
            let (lo, hi) = (sorted >> 1, sorted & 1);
            let (bit_a, bit_b) = if a < b { (lo, hi) } else { (hi, lo) };
            amps.amps()[(bit_a << 1) | bit_b] * weight
        })
        .collect();
    let set = SiteSet::pair(a, b);
    if as_cup {
        Block {
            top: set,
            bottom: SiteSet::EMPTY,
            m: DMatrix::from_column_slice(4, 1, &column),
        }
    } else {
        let row: Vec<C64> = column.iter().map(|z| z.conj()).collect();
        Block {
            top: SiteSet::EMPTY,
            bottom: set,
            m: DMatrix::from_row_slice(1, 4, &row),
        }
    }
}

fn tensor(x: &Block, y: &Block) -> Block {
    let top = x.top.union(y.top);
    let bottom = x.bottom.union(y.bottom);
    let (tx, ty) = (sub_indices(top, x.top), sub_indices(top, y.top));
    let (bx, by) = (sub_indices(bottom, x.bottom), sub_indices(bottom, y.bottom));
    let m = DMatrix::from_fn(tx.len(), bx.len(), |r, c| x.m[(tx[r], bx[c])] * y.m[(ty[r], by[c])]);
    Block { top, bottom, m }
}

fn eval_block(d: &Diagram, p: &TLParams) -> Result<Block> {
    match d {
        Diagram::Cup { sites, kind } => Ok(arc_block(*sites, &cup_state(*kind, p), true)),
        Diagram::Cap { sites, kind } => Ok(arc_block(*sites, &cup_state(*kind, p), false)),
        Diagram::Tensor(parts) => {
            let mut blocks = parts.iter().map(|x| eval_block(x, p));
            let first = blocks.next().ok_or(Error::EmptyDiagram("tensor product"))??;
            blocks.try_fold(first, |acc, b| Ok(tensor(&acc, &b?)))
        }
        Diagram::Compose(top, bottom) => {
            let t = eval_block(top, p)?;
            let b = eval_block(bottom, p)?;
            if t.bottom != b.top {
                return Err(Error::BoundaryMismatch(format!(
                    "upper diagram takes sites {:?} but lower diagram provides {:?}",
                    t.bottom.sites(),
                    b.top.sites()
                )));
            }
            Ok(Block {
                top: t.top,
                bottom: b.bottom,
                m: &t.m * &b.m,
            })
        }
        Diagram::Scaled(c, inner) => {
            let mut b = eval_block(inner, p)?;
            b.m *= *c;
            Ok(b)
        }
        Diagram::Sum(terms) => {
            let mut blocks = terms.iter().map(|x| eval_block(x, p));
            let first = blocks.next().ok_or(Error::EmptyDiagram("sum"))??;
            blocks.try_fold(first, |mut acc, b| {
                let b = b?;
                if b.top != acc.top || b.bottom != acc.bottom {
                    return Err(Error::BoundaryMismatch(
                        "sum terms have different free sites".into(),
                    ));
                }
                acc.m += b.m;
                Ok(acc)
            })
        }
    }
}

/// Value of a diagram.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalResult {
    /// Closed diagram.
    Scalar(C64),
    /// Only top (ket) sites are free.
    State { sites: Vec<u8>, state: StateVector },
    /// Only bottom (bra) sites are free; `coeffs[k]` is the `<k|` coefficient.
    CoState { sites: Vec<u8>, coeffs: StateVector },
    /// Same free sites on both edges.
    Op { sites: Vec<u8>, op: Operator },
    /// Different free sites on the two edges; `data` is row-major.
    Map {
        top: Vec<u8>,
        bottom: Vec<u8>,
        rows: usize,
        cols: usize,
        data: Vec<C64>,
    },
}

impl EvalResult {
    fn from_block(b: Block) -> Self {
        let column = |m: &DMatrix<C64>| StateVector::from_dvector(m.column(0).into_owned());
        match (b.top.is_empty(), b.bottom.is_empty()) {
            (true, true) => EvalResult::Scalar(b.m[(0, 0)]),
            (false, true) => EvalResult::State {
                sites: b.top.sites(),
                state: column(&b.m),
            },
            (true, false) => EvalResult::CoState {
                sites: b.bottom.sites(),
                coeffs: column(&b.m.transpose()),
            },
            (false, false) if b.top == b.bottom => EvalResult::Op {
                sites: b.top.sites(),
                op: Operator::from_dmatrix(b.m),
            },
            (false, false) => EvalResult::Map {
                top: b.top.sites(),
                bottom: b.bottom.sites(),
                rows: b.m.nrows(),
                cols: b.m.ncols(),
                data: b.m.transpose().iter().copied().collect(),
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            EvalResult::Scalar(_) => "scalar",
            EvalResult::State { .. } => "state",
            EvalResult::CoState { .. } => "costate",
            EvalResult::Op { .. } => "op",
            EvalResult::Map { .. } => "map",
        }
    }

    /// `(rows, cols)` of the underlying matrix.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            EvalResult::Scalar(_) => (1, 1),
            EvalResult::State { state, .. } => (state.dim(), 1),
            EvalResult::CoState { coeffs, .. } => (1, coeffs.dim()),
            EvalResult::Op { op, .. } => (op.dim(), op.dim()),
            EvalResult::Map { rows, cols, .. } => (*rows, *cols),
        }
    }

    pub fn top_sites(&self) -> Vec<u8> {
        match self {
            EvalResult::State { sites, .. } | EvalResult::Op { sites, .. } => sites.clone(),
            EvalResult::Map { top, .. } => top.clone(),
            _ => Vec::new(),
        }
    }

    pub fn bottom_sites(&self) -> Vec<u8> {
        match self {
            EvalResult::CoState { sites, .. } | EvalResult::Op { sites, .. } => sites.clone(),
            EvalResult::Map { bottom, .. } => bottom.clone(),
            _ => Vec::new(),
        }
    }

    /// Matrix entries in row-major order.
    pub fn data(&self) -> Vec<C64> {
        match self {
            EvalResult::Scalar(z) => vec![*z],
            EvalResult::State { state, .. } => state.amps().to_vec(),
            EvalResult::CoState { coeffs, .. } => coeffs.amps().to_vec(),
            EvalResult::Op { op, .. } => op.row_major(),
            EvalResult::Map { data, .. } => data.clone(),
        }
    }

    fn to_block(&self) -> Block {
        let (rows, cols) = self.shape();
        Block {
            top: SiteSet::from_sites(&self.top_sites()),
            bottom: SiteSet::from_sites(&self.bottom_sites()),
            m: DMatrix::from_row_slice(rows, cols, &self.data()),
        }
    }

    pub fn dagger(&self) -> EvalResult {
        let b = self.to_block();
        EvalResult::from_block(Block {
            top: b.bottom,
            bottom: b.top,
            m: b.m.adjoint(),
        })
    }

    /// Largest entry difference, or `None` when kinds or free sites differ.
    pub fn max_abs_diff(&self, other: &EvalResult) -> Option<f64> {
        let same_shape = self.kind() == other.kind()
            && self.top_sites() == other.top_sites()
            && self.bottom_sites() == other.bottom_sites();
        same_shape.then(|| {
            self.data()
                .iter()
                .zip(other.data())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        })
    }

    pub fn as_scalar(&self) -> Option<C64> {
        match self {
            EvalResult::Scalar(z) => Some(*z),
            _ => None,
        }
    }
}

/// Evaluates a diagram. Every cup and cap contributes a factor `sqrt(d)`, so a
/// closed loop of matching type is worth `d`.
pub fn evaluate(d: &Diagram, p: &TLParams) -> Result<EvalResult> {
    d.boundary()?;
    Ok(EvalResult::from_block(eval_block(d, p)?))
}
