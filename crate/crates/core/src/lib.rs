//! Exact computations in lattice vertex algebras `V_L`, their `theta`-fixed
//! subalgebras `V_L^+`, the twisted modules `V_L^{T_chi}`, and Zhu algebras.

pub mod fock;
pub mod group_ext;
pub mod lattice;
pub mod linalg;
pub mod scalars;
pub mod verify;
pub mod vertex;
pub mod zhu;

pub use lattice::{HVec, LVector, LatticeData, LatticeError};
pub use scalars::{Rational, Scalar, ScalarError};
