//! Exact rational helpers for conformal weights and twists.

use core::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub fn is_integral(q: &BigRational) -> bool {
    q.is_integer()
}

/// Fractional part in `[0, 1)`.
pub fn frac(q: &BigRational) -> BigRational {
    let (num, den) = (q.numer(), q.denom());
    BigRational::new(num.mod_floor(den), den.clone())
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// `e^{2πi q}`, reducing `q` modulo 1 exactly before touching floating point.
pub fn phase(q: &BigRational) -> Complex64 {
    let angle = 2.0 * PI * to_f64(&frac(q));
    Complex64::from_polar(1.0, angle)
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn zero() -> BigRational {
    BigRational::zero()
}
