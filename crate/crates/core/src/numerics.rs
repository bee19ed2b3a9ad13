//! Dense complex linear algebra for small spin spaces.
//!
//! Basis convention for every n-spin space in the crate: site 1 is the most
//! significant bit of the basis index, spin up is bit 0 and spin down is
//! bit 1. For two sites the order is therefore `|uu>, |ud>, |du>, |dd>`.
//!
//! Dimensions here never exceed 256, so everything is stored densely.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
pub use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerance for algebraic identities.
pub const TOL_ABS: f64 = 1e-12;
/// Tolerance for eigendecomposition residuals.
pub const TOL_EIG: f64 = 1e-10;
/// Eigenvalues closer than this are grouped into one level.
pub const TOL_GROUP: f64 = 1e-9;

/// Components within this distance of the largest magnitude count as tied
/// when fixing an eigenvector's phase.
const PHASE_TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub abs: f64,
    pub eig: f64,
    pub group: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            abs: TOL_ABS,
            eig: TOL_EIG,
            group: TOL_GROUP,
        }
    }
}

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// `e^{i theta}`
pub fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(DVector<C64>);

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParams("state vector must be non-empty".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state vector"));
        }
        Ok(Self(DVector::from_vec(amps)))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// The computational basis vector `|k>` in a space of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = DVector::from_element(dim, ZERO);
        v[k] = ONE;
        Self(v)
    }

    pub(crate) fn from_dvector(v: DVector<C64>) -> Self {
        Self(v)
    }

    pub fn as_dvector(&self) -> &DVector<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Number of spins when the dimension is a power of two.
    pub fn spin_count(&self) -> Option<u32> {
        let d = self.dim();
        d.is_power_of_two().then(|| d.trailing_zeros())
    }

    pub fn amps(&self) -> &[C64] {
        self.0.as_slice()
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.0.norm_squared() - 1.0).abs() <= tol
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n <= TOL_ABS {
            return Err(Error::DegenerateGramSchmidt(n));
        }
        Ok(self.scale(C64::new(1.0 / n, 0.0)))
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_dim(other)?;
        Ok(self.0.dotc(&other.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn add(&self, other: &StateVector) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &StateVector) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self(&self.0 - &other.0))
    }

    /// Tensor product, `self` on the more significant sites.
    pub fn kron(&self, other: &StateVector) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `|self><other|`
    pub fn outer(&self, other: &StateVector) -> Operator {
        assert_eq!(self.dim(), other.dim(), "outer product needs equal dimensions");
        Operator(&self.0 * other.0.adjoint())
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(max_abs(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b)))
    }

    /// Multiply by a global phase so that the first component of (within
    /// rounding) largest magnitude is real and positive.
    pub fn fix_phase(&self) -> Self {
        let largest = self.0.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if largest == 0.0 {
            return self.clone();
        }
        let pivot = self
            .0
            .iter()
            .find(|z| z.norm() >= largest - PHASE_TIE)
            .copied()
            .unwrap_or(ONE);
        self.scale(pivot.conj() / pivot.norm())
    }

    fn check_dim(&self, other: &StateVector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }
}

/// Square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator(DMatrix<C64>);

impl Operator {
    /// Build from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParams("operator dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("operator"));
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, &entries)))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub(crate) fn from_dmatrix(m: DMatrix<C64>) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::from_element(dim, dim, ZERO))
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        self.0.transpose().iter().copied().collect()
    }

    pub fn dagger(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn mat_mul(&self, other: &Operator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self(&self.0 * &other.0))
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &Operator) -> Result<Self> {
        self.check_dim(other.dim())?;
        Ok(Self(&self.0 - &other.0))
    }

    pub fn scale(&self, c: C64) -> Self {
        Self(&self.0 * c)
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        self.check_dim(v.dim())?;
        Ok(StateVector(&self.0 * &v.0))
    }

    /// `<a|self|b>`
    pub fn matrix_element(&self, a: &StateVector, b: &StateVector) -> Result<C64> {
        a.inner(&self.apply(b)?)
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn kron(&self, other: &Operator) -> Self {
        kron(self, other)
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.mat_mul(other)?.sub(&other.mat_mul(self)?)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        max_abs(self.0.iter().copied())
    }

    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_dim(other.dim())?;
        Ok(max_abs(self.0.iter().zip(other.0.iter()).map(|(a, b)| a - b)))
    }

    /// `max |M - M^dagger|`
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.0[(r, c)] - self.0[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Checked conversion into a Hermitian operator.
    pub fn into_hermitian(self, tol: f64) -> Result<Hermitian> {
        let residual = self.hermiticity_residual();
        if residual > tol {
            return Err(Error::NotHermitian { residual });
        }
        Ok(Hermitian(self))
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if self.dim() != found {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// An operator that passed the Hermiticity check.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian(Operator);

impl Hermitian {
    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }
}

/// `a (x) b`, with `a` on the more significant sites.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    Operator(a.0.kronecker(&b.0))
}

/// Sum of `|v><v|` over the given vectors.
pub fn projector(vectors: &[StateVector]) -> Result<Operator> {
    let Some(first) = vectors.first() else {
        return Err(Error::InvalidParams("projector needs at least one vector".into()));
    };
    let mut acc = Operator::zeros(first.dim());
    for v in vectors {
        acc = acc.add(&v.outer(v))?;
    }
    Ok(acc)
}

/// Max over `|<v_i|v_j> - delta_ij|`.
pub fn gram_residual(vectors: &[StateVector]) -> Result<f64> {
    let mut worst = 0.0_f64;
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((a.inner(b)? - target).norm());
        }
    }
    Ok(worst)
}

fn max_abs(it: impl Iterator<Item = C64>) -> f64 {
    it.map(|z| z.norm()).fold(0.0, f64::max)
}

/// Eigenvalues in ascending order with orthonormal, phase-fixed eigenvectors.
///
/// Inside a degenerate eigenspace the vectors are just some orthonormal basis;
/// compare eigenspace projectors rather than individual vectors there.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<StateVector>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `sum_k lambda_k |v_k><v_k|`
    pub fn reconstruct(&self) -> Operator {
        let n = self.dim();
        let mut acc = DMatrix::from_element(n, n, ZERO);
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            acc += (&v.0 * v.0.adjoint()) * C64::new(lambda, 0.0);
        }
        Operator(acc)
    }

    /// Max over k of `max |M v_k - lambda_k v_k|`.
    pub fn residual(&self, m: &Operator) -> Result<f64> {
        let mut worst = 0.0_f64;
        for (&lambda, v) in self.values.iter().zip(&self.vectors) {
            let mv = m.apply(v)?;
            worst = worst.max(mv.max_abs_diff(&v.scale(C64::new(lambda, 0.0)))?);
        }
        Ok(worst)
    }
}

/// Eigendecomposition of a Hermitian operator.
pub fn hermitian_eig(m: &Operator) -> Result<EigenSystem> {
    let h = m.clone().into_hermitian(TOL_ABS)?;
    Ok(eig_of(&h))
}

pub fn eig_of(h: &Hermitian) -> EigenSystem {
    let m = &h.operator().0;
    let dim = m.nrows();
    // Exact symmetrization removes the sub-tolerance skew part before the
    // solver sees it.
    let sym = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| StateVector(eig.eigenvectors.column(k).into_owned()).fix_phase())
        .collect();
    EigenSystem { values, vectors }
}
