use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::c64;

/// Exact complex number with arbitrary-precision rational parts.
pub type ExactComplex = Complex<BigRational>;

/// Coefficient field of a [`PhasePolynomial`](super::PhasePolynomial).
pub trait SymbolCoeff:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn from_ratio(num: i64, den: i64) -> Self;
    /// The imaginary unit.
    fn imag_unit() -> Self;
    fn conj(&self) -> Self;
    /// True when the coefficient is dropped from canonical form.
    fn is_negligible(&self) -> bool;
    fn to_c64(&self) -> c64;
}

impl SymbolCoeff for c64 {
    fn from_ratio(num: i64, den: i64) -> Self {
        c64::new(num as f64 / den as f64, 0.0)
    }

    fn imag_unit() -> Self {
        c64::new(0.0, 1.0)
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }

    fn is_negligible(&self) -> bool {
        self.norm() < 1e-300
    }

    fn to_c64(&self) -> c64 {
        *self
    }
}

impl SymbolCoeff for ExactComplex {
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex::new(
            BigRational::new(BigInt::from(num), BigInt::from(den)),
            BigRational::zero(),
        )
    }

    fn imag_unit() -> Self {
        Complex::new(BigRational::zero(), BigRational::one())
    }

    fn conj(&self) -> Self {
        Complex::new(self.re.clone(), -self.im.clone())
    }

    fn is_negligible(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn to_c64(&self) -> c64 {
        c64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Exact rational complex `re + i im` from integer fractions.
pub fn exact(re: (i64, i64), im: (i64, i64)) -> ExactComplex {
    Complex::new(
        BigRational::new(re.0.into(), re.1.into()),
        BigRational::new(im.0.into(), im.1.into()),
    )
}
