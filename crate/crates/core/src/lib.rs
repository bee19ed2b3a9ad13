//! Four-spin Temperley-Lieb model: the algebra and its cup/cap calculus,
//! the topological basis, a rank-4 projector Hamiltonian, tunneling and
//! Zeno dynamics, and the double-well analogue.

pub mod cupcap;
pub mod doublewell;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod numerics;
pub mod tl_algebra;
pub mod topo_basis;

pub use error::{Error, Result};
