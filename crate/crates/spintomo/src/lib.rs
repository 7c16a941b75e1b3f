//! Simulation and reconstruction of atomic hyperfine-spin states from a
//! continuous polarimetry measurement record.
//!
//! The crate forward-simulates controlled, decohering spin dynamics for a
//! cesium-like atom (a single hyperfine manifold or the full 16-dimensional
//! ground manifold), synthesizes noisy measurement records, and inverts them
//! with a weighted least-squares + positivity-projection pipeline.

pub mod atom;
pub mod dynamics;
pub mod error;
pub(crate) mod linalg;
pub mod spin;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use spin::{HermitianBasis, MatrixOperator, SpinSpace};

/// Dense complex matrix used throughout.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
/// Dense real matrix.
pub type RMat = nalgebra::DMatrix<f64>;
/// Dense real vector.
pub type RVec = nalgebra::DVector<f64>;
/// Dense complex vector.
pub type CVec = nalgebra::DVector<num_complex::Complex64>;
