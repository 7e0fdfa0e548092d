//! Real scalar abstraction shared by the double-precision and multiprecision code paths.
//!
//! Every numerical routine in the crate is generic over [`Real`], so the same
//! elimination, Newton, eigenvalue and SVD code runs on `f64` or on [`Mp`],
//! a fixed-precision software float backed by `astro-float`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use astro_float::{BigFloat, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, One, Zero};

use crate::error::QesError;

/// Real field used by the numerical kernels.
pub trait Real:
    Clone + fmt::Debug + PartialOrd + Send + Sync + 'static + Num + Neg<Output = Self>
{
    /// Nominal precision tag reported in solutions.
    const BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn from_ratio(r: &BigRational) -> Self;
    fn to_f64(&self) -> f64;
    /// Exact value as a fraction; `None` for non-finite values.
    fn to_ratio(&self) -> Option<BigRational>;
    fn sqrt(&self) -> Self;
    fn cbrt(&self) -> Self;
    /// Unit roundoff of the representation.
    fn epsilon() -> Self;

    fn from_i64(x: i64) -> Self {
        Self::from_f64(x as f64)
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn hypot(&self, other: &Self) -> Self {
        let a = self.abs();
        let b = other.abs();
        let (big, small) = if a > b { (a, b) } else { (b, a) };
        if big.is_zero() {
            return big;
        }
        let r = small / big.clone();
        big * (Self::one() + r.clone() * r).sqrt()
    }

    /// Tolerance `base` quoted for 64-bit arithmetic, rescaled to this precision.
    ///
    /// A 64-bit tolerance of `1e-10` becomes `1e-20` at 128 bits and `1e-40` at 256.
    fn scaled_tol(base: f64) -> Self {
        let factor = Self::BITS as f64 / 64.0;
        let exp10 = base.log10() * factor;
        if exp10 > -300.0 {
            Self::from_f64(10f64.powf(exp10))
        } else {
            let half = 10f64.powf(exp10 / 2.0);
            Self::from_f64(half) * Self::from_f64(half)
        }
    }
}

impl Real for f64 {
    const BITS: u32 = 64;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_ratio(r: &BigRational) -> Self {
        num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_ratio(&self) -> Option<BigRational> {
        BigRational::from_float(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn cbrt(&self) -> Self {
        f64::cbrt(*self)
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn hypot(&self, other: &Self) -> Self {
        f64::hypot(*self, *other)
    }
}

const RM: RoundingMode = RoundingMode::ToEven;
const TWO_POW_64: f64 = 18446744073709551616.0;

/// Binary float with a fixed `P`-bit mantissa.
#[derive(Clone)]
pub struct Mp<const P: usize>(BigFloat);

pub type Mp128 = Mp<128>;
pub type Mp256 = Mp<256>;

impl<const P: usize> Mp<P> {
    pub fn inner(&self) -> &BigFloat {
        &self.0
    }

    fn from_bigint(n: &BigInt) -> BigFloat {
        let (sign, digits) = n.to_u64_digits();
        let p = P + 64;
        let base = BigFloat::from_f64(TWO_POW_64, p);
        let mut acc = BigFloat::from_word(0, p);
        for d in digits.iter().rev() {
            acc = acc.mul(&base, p, RM).add(&BigFloat::from_u64(*d, p), p, RM);
        }
        if sign == BigSign::Minus {
            acc = acc.neg();
        }
        acc
    }
}

impl<const P: usize> fmt::Debug for Mp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}

impl<const P: usize> fmt::Display for Mp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: usize> PartialEq for Mp<P> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl<const P: usize> PartialOrd for Mp<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $call:ident) => {
        impl<const P: usize> $tr for Mp<P> {
            type Output = Mp<P>;
            fn $method(self, rhs: Mp<P>) -> Mp<P> {
                Mp(self.0.$call(&rhs.0, P, RM))
            }
        }
        impl<'a, const P: usize> $tr<&'a Mp<P>> for &'a Mp<P> {
            type Output = Mp<P>;
            fn $method(self, rhs: &'a Mp<P>) -> Mp<P> {
                Mp(self.0.$call(&rhs.0, P, RM))
            }
        }
    };
}

mp_binop!(Add, add, add);
mp_binop!(Sub, sub, sub);
mp_binop!(Mul, mul, mul);
mp_binop!(Div, div, div);

impl<const P: usize> Rem for Mp<P> {
    type Output = Mp<P>;
    fn rem(self, rhs: Mp<P>) -> Mp<P> {
        Mp(self.0.rem(&rhs.0))
    }
}

impl<const P: usize> Neg for Mp<P> {
    type Output = Mp<P>;
    fn neg(self) -> Mp<P> {
        Mp(self.0.neg())
    }
}

impl<const P: usize> Zero for Mp<P> {
    fn zero() -> Self {
        Mp(BigFloat::from_word(0, P))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl<const P: usize> One for Mp<P> {
    fn one() -> Self {
        Mp(BigFloat::from_word(1, P))
    }
}

impl<const P: usize> Num for Mp<P> {
    type FromStrRadixErr = QesError;

    fn from_str_radix(s: &str, radix: u32) -> Result<Self, QesError> {
        if radix != 10 {
            return Err(QesError::Parse(format!("unsupported radix {radix}")));
        }
        let r = crate::model::parse_rational(s)?;
        Ok(Self::from_ratio(&r))
    }
}

impl<const P: usize> Real for Mp<P> {
    const BITS: u32 = P as u32;

    fn from_f64(x: f64) -> Self {
        Mp(BigFloat::from_f64(x, P))
    }

    fn from_i64(x: i64) -> Self {
        Mp(BigFloat::from_i64(x, P))
    }

    fn from_ratio(r: &BigRational) -> Self {
        let num = Self::from_bigint(r.numer());
        let den = Self::from_bigint(r.denom());
        Mp(num.div(&den, P, RM))
    }

    fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        let Some((m, _, s, e, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        let hi = m[m.len() - 1] as f64;
        let lo = if m.len() > 1 { m[m.len() - 2] as f64 } else { 0.0 };
        // value = 0.mantissa * 2^e; split the power to survive extreme exponents
        let e = e as i32 - 64;
        let half = e / 2;
        let v = (hi + lo / TWO_POW_64) * 2f64.powi(half) * 2f64.powi(e - half);
        if s == Sign::Neg {
            -v
        } else {
            v
        }
    }

    fn to_ratio(&self) -> Option<BigRational> {
        if self.0.is_zero() {
            return Some(BigRational::zero());
        }
        let (m, _, s, e, _) = self.0.as_raw_parts()?;
        let mut digits = BigInt::zero();
        for w in m.iter().rev() {
            digits = (digits << 64u32) + BigInt::from(*w);
        }
        let shift = e as i64 - 64 * m.len() as i64;
        let two = BigInt::from(2);
        let mut r = if shift >= 0 {
            BigRational::from_integer(digits * num_traits::pow(two, shift as usize))
        } else {
            BigRational::new(digits, num_traits::pow(two, (-shift) as usize))
        };
        if s == Sign::Neg {
            r = -r;
        }
        Some(r)
    }

    fn sqrt(&self) -> Self {
        Mp(self.0.sqrt(P, RM))
    }

    fn cbrt(&self) -> Self {
        Mp(self.0.cbrt(P, RM))
    }

    fn epsilon() -> Self {
        Mp(BigFloat::from_f64(2f64.powi(1 - P as i32), P))
    }

    fn abs(&self) -> Self {
        Mp(self.0.abs())
    }
}

/// Working precision selected for a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Precision {
    Double,
    Bits128,
    Bits256,
}

impl Precision {
    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 64,
            Precision::Bits128 => 128,
            Precision::Bits256 => 256,
        }
    }

    pub fn from_bits(bits: u32) -> Result<Self, QesError> {
        match bits {
            64 => Ok(Precision::Double),
            128 => Ok(Precision::Bits128),
            256 => Ok(Precision::Bits256),
            other => Err(QesError::Domain(format!(
                "unsupported precision {other} bits (expected 64, 128 or 256)"
            ))),
        }
    }

    /// Next step up the precision ladder, if any.
    pub fn escalate(self) -> Option<Self> {
        match self {
            Precision::Double => Some(Precision::Bits128),
            Precision::Bits128 => Some(Precision::Bits256),
            Precision::Bits256 => None,
        }
    }
}

/// Runs `$body` with the type alias `$t` bound to the scalar for `$prec`.
#[macro_export]
macro_rules! with_precision {
    ($prec:expr, $t:ident => $body:expr) => {
        match $prec {
            $crate::scalar::Precision::Double => {
                type $t = f64;
                $body
            }
            $crate::scalar::Precision::Bits128 => {
                type $t = $crate::scalar::Mp128;
                $body
            }
            $crate::scalar::Precision::Bits256 => {
                type $t = $crate::scalar::Mp256;
                $body
            }
        }
    };
}

pub type C<T> = Complex<T>;

pub fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

pub fn c_real<T: Real>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

pub fn c_from_f64<T: Real>(z: num_complex::Complex64) -> C<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

pub fn c_to_f64<T: Real>(z: &C<T>) -> num_complex::Complex64 {
    num_complex::Complex64::new(z.re.to_f64(), z.im.to_f64())
}

pub fn c_convert<A: Real, B: Real>(z: &C<A>) -> C<B> {
    Complex::new(convert_real(&z.re), convert_real(&z.im))
}

/// Converts between real types, keeping as many bits as the narrower side holds.
pub fn convert_real<A: Real, B: Real>(x: &A) -> B {
    if A::BITS <= 64 || B::BITS <= 64 {
        return B::from_f64(x.to_f64());
    }
    // two-term split: x = hi + (x - hi), hi exact in f64
    let mut out = B::zero();
    let mut rest = x.clone();
    for _ in 0..(B::BITS.min(A::BITS) / 50 + 1) {
        let hi = rest.to_f64();
        if hi == 0.0 || !hi.is_finite() {
            break;
        }
        out = out + B::from_f64(hi);
        rest = rest - A::from_f64(hi);
    }
    out
}

/// Modulus of a complex number.
pub fn cabs<T: Real>(z: &C<T>) -> T {
    z.re.hypot(&z.im)
}

/// Cheap modulus bound `|re| + |im|` used in scale estimates.
pub fn cnorm1<T: Real>(z: &C<T>) -> T {
    z.re.abs() + z.im.abs()
}

pub fn cscale<T: Real>(z: &C<T>, k: &T) -> C<T> {
    Complex::new(z.re.clone() * k.clone(), z.im.clone() * k.clone())
}

pub fn cconj<T: Real>(z: &C<T>) -> C<T> {
    Complex::new(z.re.clone(), -z.im.clone())
}

/// Principal cube root.
pub fn ccbrt<T: Real>(z: &C<T>) -> C<T> {
    if z.im.is_zero() {
        return c_real(z.re.cbrt());
    }
    // Newton on w^3 = z from the f64 principal root
    let z64 = c_to_f64(z);
    let w64 = z64.powf(1.0 / 3.0);
    let mut w: C<T> = c_from_f64(w64);
    let three = c_real(T::from_f64(3.0));
    for _ in 0..8 {
        let w2 = w.clone() * w.clone();
        w = w.clone() - (w2.clone() * w.clone() - z.clone()) / (three.clone() * w2);
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn mp_round_trips_f64() {
        for x in [1.0, -3.5, 0.1, 1e-200, 123456789.123, -7e250] {
            assert_eq!(Mp128::from_f64(x).to_f64(), x);
        }
    }

    #[test]
    fn mp_rational_is_accurate() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = Mp256::from_ratio(&third);
        let err = (x * Mp256::from_f64(3.0) - Mp256::one()).abs();
        assert!(err < Mp256::from_f64(1e-70));
        let big = BigRational::from_integer(BigInt::from(10).pow(40u32));
        assert_eq!(Mp128::from_ratio(&big).to_f64(), 1e40);
    }

    #[test]
    fn scaled_tolerances() {
        assert_eq!(f64::scaled_tol(1e-10), 1e-10);
        let t = Mp128::scaled_tol(1e-10).to_f64();
        assert!((t / 1e-20 - 1.0).abs() < 1e-12);
        let t = Mp256::scaled_tol(1e-10).to_f64();
        assert!((t / 1e-40 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mp_to_mp_conversion_keeps_bits() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = Mp256::from_ratio(&third);
        let y: Mp128 = convert_real(&x);
        let err = (y * Mp128::from_f64(3.0) - Mp128::one()).abs();
        assert!(err < Mp128::from_f64(1e-36), "{err:?}");
    }

    #[test]
    fn complex_cube_root() {
        let z: C<Mp128> = c(Mp128::from_f64(-8.0), Mp128::from_f64(1e-3));
        let w = ccbrt(&z);
        let back = w.clone() * w.clone() * w;
        assert!(cabs(&(back - z)) < Mp128::from_f64(1e-30));
    }
}
