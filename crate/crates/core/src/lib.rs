//! Quasi-elliptic functions on the complex torus ℂ/(ℤ + τℤ).
//!
//! The numerical side (theta functions, Eisenstein's zeta Z, ℘, the
//! Eisenstein–Kronecker kernels g⁽ⁿ⁾, contour convolutions) is generic over
//! the [`Real`] scalar; the coefficient side (Stirling and Bernoulli numbers,
//! basis-change matrices, the polynomials pₙ) is exact over `BigRational`.

// `!(a < b)` is used on purpose so NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis_change;
pub mod combinatorics;
pub mod conv_polynomials;
pub mod convolution;
pub mod error;
pub mod quadrature;
pub mod scalar;
pub mod theta;
pub mod torus;
pub mod weierstrass;

pub use basis_change::{BasisChange, CoeffMatrix, MatrixKind};
pub use conv_polynomials::{p_poly, p_zeros, PnPolynomial, ZeroLevels};
pub use convolution::{pole_ledger_conv, Convolver, PeriodicFunction, PoleEntry, PoleLocation, Strip};
pub use error::{Error, Result};
pub use scalar::{FromRational, Real};
pub use theta::ThetaEvaluator;
pub use torus::{nome, reduce_real_period, LatticePoint, TorusParams};
pub use weierstrass::{extract_laurent, LaurentData, LaurentOptions, Weierstrass};

pub use num_complex::Complex;
pub use num_rational::BigRational;

/// Double-precision complex number.
pub type C64 = Complex<f64>;
/// Double-precision torus parameters.
pub type Torus64 = TorusParams<f64>;
/// Single-precision torus parameters.
pub type Torus32 = TorusParams<f32>;
pub type Theta64 = ThetaEvaluator<f64>;
pub type Weierstrass64 = Weierstrass<f64>;
