//! Scalar abstraction shared by the expression evaluator and the iteration engine.
//!
//! Real scalars (`f32`, `f64`) and complex scalars (`Complex<f32>`, `Complex<f64>`)
//! all implement [`Scalar`]. The analysis routines that need an ordering
//! (root finding, bisection) additionally require [`Real`].

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};
use std::fmt::{Debug, Display};
use std::ops::Neg;

/// Arithmetic value a map can be iterated over.
pub trait Scalar:
    Num + Neg<Output = Self> + Copy + Debug + Default + PartialEq + Send + Sync + 'static
{
    /// `true` for complex scalar types.
    const COMPLEX: bool;

    fn from_real(v: f64) -> Self;

    /// Builds a scalar from real and imaginary parts. Real types reject a
    /// non-zero imaginary part.
    fn from_parts(re: f64, im: f64) -> Option<Self>;

    fn re(self) -> f64;
    fn im(self) -> f64;

    /// Absolute value (modulus for complex scalars) as `f64`.
    fn modulus(self) -> f64;

    fn is_finite_scalar(self) -> bool;

    fn sine(self) -> Self;
    fn cosine(self) -> Self;
    fn exponential(self) -> Self;
    fn square_root(self) -> Self;
    /// `abs` kept in the scalar type: modulus as a real-valued scalar.
    fn abs_value(self) -> Self;
    fn int_pow(self, n: i32) -> Self;
    fn pow(self, exponent: Self) -> Self;
}

/// Ordered real scalar.
pub trait Real: Scalar + Float + FloatConst + FromPrimitive + ToPrimitive + Display {
    fn to_f64_lossy(self) -> f64 {
        ToPrimitive::to_f64(&self).unwrap_or(f64::NAN)
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Scalar for $t {
            const COMPLEX: bool = false;

            #[inline]
            fn from_real(v: f64) -> Self {
                v as $t
            }
            fn from_parts(re: f64, im: f64) -> Option<Self> {
                (im == 0.0).then_some(re as $t)
            }
            #[inline]
            fn re(self) -> f64 {
                self as f64
            }
            #[inline]
            fn im(self) -> f64 {
                0.0
            }
            #[inline]
            fn modulus(self) -> f64 {
                (self as f64).abs()
            }
            #[inline]
            fn is_finite_scalar(self) -> bool {
                self.is_finite()
            }
            #[inline]
            fn sine(self) -> Self {
                <$t>::sin(self)
            }
            #[inline]
            fn cosine(self) -> Self {
                <$t>::cos(self)
            }
            #[inline]
            fn exponential(self) -> Self {
                <$t>::exp(self)
            }
            #[inline]
            fn square_root(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline]
            fn abs_value(self) -> Self {
                <$t>::abs(self)
            }
            #[inline]
            fn int_pow(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
            #[inline]
            fn pow(self, exponent: Self) -> Self {
                <$t>::powf(self, exponent)
            }
        }

        impl Real for $t {}

        impl Scalar for Complex<$t> {
            const COMPLEX: bool = true;

            #[inline]
            fn from_real(v: f64) -> Self {
                Complex::new(v as $t, 0.0)
            }
            fn from_parts(re: f64, im: f64) -> Option<Self> {
                Some(Complex::new(re as $t, im as $t))
            }
            #[inline]
            fn re(self) -> f64 {
                self.re as f64
            }
            #[inline]
            fn im(self) -> f64 {
                self.im as f64
            }
            #[inline]
            fn modulus(self) -> f64 {
                self.norm() as f64
            }
            #[inline]
            fn is_finite_scalar(self) -> bool {
                self.is_finite()
            }
            #[inline]
            fn sine(self) -> Self {
                Complex::sin(self)
            }
            #[inline]
            fn cosine(self) -> Self {
                Complex::cos(self)
            }
            #[inline]
            fn exponential(self) -> Self {
                Complex::exp(self)
            }
            #[inline]
            fn square_root(self) -> Self {
                Complex::sqrt(self)
            }
            #[inline]
            fn abs_value(self) -> Self {
                Complex::new(self.norm(), 0.0)
            }
            #[inline]
            fn int_pow(self, n: i32) -> Self {
                Complex::powi(&self, n)
            }
            #[inline]
            fn pow(self, exponent: Self) -> Self {
                Complex::powc(self, exponent)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
