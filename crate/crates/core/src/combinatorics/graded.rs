use std::fmt;
use std::ops::{Mul, Neg};

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{delta_z, rational_to_real, Real};

/// An exact rational multiplied by a power of ΔZ = −2πi.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GradedRational {
    pub coeff: BigRational,
    pub dz_power: u32,
}

impl GradedRational {
    pub fn new(coeff: BigRational, dz_power: u32) -> Self {
        Self { coeff, dz_power }
    }

    pub fn zero(dz_power: u32) -> Self {
        Self::new(BigRational::zero(), dz_power)
    }

    pub fn one() -> Self {
        Self::new(BigRational::one(), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Sum of two graded values. A zero summand adopts the grade of the
    /// other; otherwise the grades must agree.
    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if self.dz_power != other.dz_power {
            return Err(Error::GradeMismatch(self.dz_power, other.dz_power));
        }
        Ok(Self::new(&self.coeff + &other.coeff, self.dz_power))
    }

    /// Numeric value coeff·(−2πi)^dz_power.
    pub fn to_complex<T: Real>(&self) -> Complex<T> {
        let c: T = rational_to_real(&self.coeff);
        delta_z::<T>().powu(self.dz_power) * c
    }
}

impl Mul for &GradedRational {
    type Output = GradedRational;
    fn mul(self, rhs: &GradedRational) -> GradedRational {
        GradedRational::new(&self.coeff * &rhs.coeff, self.dz_power + rhs.dz_power)
    }
}

impl Neg for GradedRational {
    type Output = GradedRational;
    fn neg(self) -> GradedRational {
        GradedRational::new(-self.coeff, self.dz_power)
    }
}

impl fmt::Display for GradedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dz_power {
            0 => write!(f, "{}", self.coeff),
            1 => write!(f, "{}·ΔZ", self.coeff),
            p => write!(f, "{}·ΔZ^{}", self.coeff, p),
        }
    }
}
