//! Scalar abstraction shared by every numerical module.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating type the numerical core is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + FromRational + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Conversion from an exact rational into a scalar ring.
///
/// Implemented for the float types, their complex versions, and for
/// `BigRational` itself so that exact polynomials can be evaluated either
/// exactly or numerically through the same code path.
pub trait FromRational: Sized {
    fn from_rational(r: &BigRational) -> Self;
}

impl FromRational for f64 {
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r)
    }
}

impl FromRational for f32 {
    fn from_rational(r: &BigRational) -> Self {
        rational_to_f64(r) as f32
    }
}

impl<T: Real> FromRational for Complex<T> {
    fn from_rational(r: &BigRational) -> Self {
        Complex::new(T::from_rational(r), T::zero())
    }
}

impl FromRational for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
}

/// Nearest-ish `f64` for a big rational, robust when numerator and
/// denominator individually overflow `f64`.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // Scale both parts down to 60 significant bits before dividing.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift_n = (nb - 60).max(0);
    let shift_d = (db - 60).max(0);
    let n: BigInt = r.numer() >> shift_n as usize;
    let d: BigInt = r.denom() >> shift_d as usize;
    let mantissa = n.to_f64().unwrap_or(0.0) / d.to_f64().unwrap_or(1.0);
    mantissa * 2f64.powi((shift_n - shift_d) as i32)
}

/// Convert an exact rational into the generic real type.
pub fn rational_to_real<T: Real>(r: &BigRational) -> T {
    T::lit(rational_to_f64(r))
}

/// `i` as a generic complex constant.
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// The constant ΔZ = −2πi, the shift of Eisenstein's zeta under x ↦ x + τ.
pub fn delta_z<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), -T::TAU())
}

/// `2πi`.
pub fn two_pi_i<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::TAU())
}
