//! Lie derivatives of tensors, tensor densities and spinor fields on an
//! explicit coordinate chart.
//!
//! The crate is organised bottom-up:
//!
//! * [`liealg`]: signature metrics, η-adjoints and the reductive splitting
//!   `gl(m) = so(p,q) ⊕ V ⊕ ℝI`.
//! * [`expr`]: a small expression language for field components, evaluated
//!   with first-order forward-mode derivatives.
//! * [`geometry`]: metric data, orthonormal frames, Levi-Civita and spin
//!   connections at a point.
//! * [`clifford`]: gamma matrices for any signature and the spin-algebra map.
//! * [`lifts`]: natural-lift coefficients and their Kosmann / von Göden split.
//! * [`liederiv`]: every Lie-derivative flavour plus flow-based oracles.
//! * [`jets`]: the first-order principal prolongation group `W¹·¹ₘG`.
//! * [`fixtures`] and [`verify`]: the builtin geometries and the randomized
//!   property suites run by `kosmann verify`.

// `!(x > 0.0)` deliberately rejects NaN, and the dual product rule mixes `+` into `Mul`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::suspicious_arithmetic_impl)]

pub mod clifford;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod geometry;
pub mod jets;
pub mod liealg;
pub mod liederiv;
pub mod lifts;
pub mod verify;

mod flow;

pub use error::{Error, Result};

/// Real `m×m` (or `n×n`) matrix used throughout the crate.
pub type Mat = nalgebra::DMatrix<f64>;
/// Complex matrix acting on spinors.
pub type CMat = nalgebra::DMatrix<num_complex::Complex64>;
/// Spinor components at a point.
pub type SpinorValue = nalgebra::DVector<num_complex::Complex64>;

pub use num_complex::Complex64;
