//! The two number fields every iteration kernel is generic over: a
//! configurable-precision real scalar and a double-precision complex scalar.
//!
//! [`Scalar`] wraps an MPFR floating-point value whose precision is fixed at
//! construction from a [`PrecisionConfig`] (decimal digits mapped to binary
//! bits plus guard bits). MPFR arithmetic and transcendentals are correctly
//! rounded, which keeps error measurements at the 1e-39 scale trustworthy.
//! [`ComplexScalar`] is plain binary64 complex arithmetic, used by the basin
//! renderer where the 1e-3 attraction tolerance makes double precision ample.
//!
//! [`MethodField`] is the small field abstraction the kernels in
//! [`crate::methods`] need: ring operations, a few constants-at-my-precision
//! constructors, square root, and magnitude guards for underflow detection.

use rug::ops::Pow;
use rug::Float;
use thiserror::Error;

/// Double-precision complex numbers for basin-of-attraction rendering.
pub type ComplexScalar = num_complex::Complex<f64>;

/// Errors from precision configuration and decimal parsing.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumericsError {
    /// Fewer than 16 significant digits cannot support order-of-convergence
    /// estimation (the diagnostics floor 10^-(digits-10) would be coarser
    /// than the quantities it guards).
    #[error("working precision must be at least 16 significant digits, got {0}")]
    PrecisionTooCoarse(u32),
    /// The input string is not a finite signed decimal number.
    #[error("invalid decimal literal {0:?}")]
    InvalidDecimal(String),
}

/// Working precision for a whole run, in significant decimal digits.
///
/// Every [`Scalar`] in a run is built from one config so that all
/// intermediates share a single declared precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionConfig {
    significant_digits: u32,
}

impl Default for PrecisionConfig {
    /// 100 significant decimal digits, the benchmark-table precision.
    fn default() -> Self {
        PrecisionConfig {
            significant_digits: 100,
        }
    }
}

impl PrecisionConfig {
    /// Minimum supported precision in decimal digits.
    pub const MIN_DIGITS: u32 = 16;

    pub fn new(significant_digits: u32) -> Result<Self, NumericsError> {
        if significant_digits < Self::MIN_DIGITS {
            return Err(NumericsError::PrecisionTooCoarse(significant_digits));
        }
        Ok(PrecisionConfig { significant_digits })
    }

    pub fn significant_digits(self) -> u32 {
        self.significant_digits
    }

    /// Binary precision backing this many decimal digits: ceil(d*log2(10))
    /// plus 32 guard bits. The guard absorbs the alignment loss of sums whose
    /// terms differ by up to ten orders of magnitude, so additive
    /// cancellation still returns digits-2 correct significant digits.
    pub fn bits(self) -> u32 {
        (self.significant_digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 32
    }
}

/// Builds a [`PrecisionConfig`] carrying `digits` significant decimal digits.
pub fn with_precision(digits: u32) -> Result<PrecisionConfig, NumericsError> {
    PrecisionConfig::new(digits)
}

/// A real number carried at a fixed configured precision.
#[derive(Debug, Clone)]
pub struct Scalar {
    value: Float,
    digits: u32,
}

/// Parses a signed decimal string into a [`Scalar`] at `cfg` precision.
pub fn scalar_from_decimal(s: &str, cfg: PrecisionConfig) -> Result<Scalar, NumericsError> {
    Scalar::from_decimal(s, cfg)
}

impl Scalar {
    pub fn from_decimal(s: &str, cfg: PrecisionConfig) -> Result<Self, NumericsError> {
        let parsed =
            Float::parse(s).map_err(|_| NumericsError::InvalidDecimal(s.to_owned()))?;
        let value = Float::with_val(cfg.bits(), parsed);
        if !value.is_finite() {
            return Err(NumericsError::InvalidDecimal(s.to_owned()));
        }
        Ok(Scalar {
            value,
            digits: cfg.significant_digits(),
        })
    }

    pub fn from_i64(v: i64, cfg: PrecisionConfig) -> Self {
        Scalar {
            value: Float::with_val(cfg.bits(), v),
            digits: cfg.significant_digits(),
        }
    }

    pub fn zero(cfg: PrecisionConfig) -> Self {
        Scalar::from_i64(0, cfg)
    }

    pub fn one(cfg: PrecisionConfig) -> Self {
        Scalar::from_i64(1, cfg)
    }

    /// 10^p at `cfg` precision (correctly rounded; p may be negative).
    pub fn pow10(p: i64, cfg: PrecisionConfig) -> Self {
        Scalar::from_decimal(&format!("1e{p}"), cfg)
            .expect("a power-of-ten literal always parses")
    }

    pub fn config(&self) -> PrecisionConfig {
        PrecisionConfig {
            significant_digits: self.digits,
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    fn bits(&self) -> u32 {
        self.value.prec()
    }

    fn lift(&self, value: Float) -> Scalar {
        Scalar {
            value,
            digits: self.digits,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.value.is_sign_negative()
    }

    pub fn abs(&self) -> Scalar {
        self.lift(Float::with_val(self.bits(), self.value.abs_ref()))
    }

    /// Natural logarithm; `None` for inputs <= 0.
    pub fn ln(&self) -> Option<Scalar> {
        if self.value <= 0 {
            return None;
        }
        Some(self.lift(Float::with_val(self.bits(), self.value.ln_ref())))
    }

    /// Square root; `None` for negative inputs.
    pub fn sqrt(&self) -> Option<Scalar> {
        if self.value < 0 {
            return None;
        }
        Some(self.lift(Float::with_val(self.bits(), self.value.sqrt_ref())))
    }

    pub fn exp(&self) -> Scalar {
        self.lift(Float::with_val(self.bits(), self.value.exp_ref()))
    }

    pub fn sin(&self) -> Scalar {
        self.lift(Float::with_val(self.bits(), self.value.sin_ref()))
    }

    pub fn cos(&self) -> Scalar {
        self.lift(Float::with_val(self.bits(), self.value.cos_ref()))
    }

    /// Integer power (negative exponents allowed away from zero).
    pub fn powi(&self, n: i32) -> Scalar {
        self.lift(Float::with_val(self.bits(), (&self.value).pow(n)))
    }

    /// Round-tripping decimal rendering: parsing the result back at the same
    /// precision recovers the identical value.
    pub fn to_decimal_string(&self) -> String {
        self.value.to_string_radix(10, None)
    }

    /// Compact scientific rendering `0.dddE` with `sig` mantissa digits,
    /// e.g. 7.394e-4 with 3 digits -> "0.739e-3".
    pub fn to_shorthand(&self, sig: usize) -> String {
        if self.value.is_zero() {
            return "0".to_owned();
        }
        let (neg, mantissa, exp) = self.value.to_sign_string_exp(10, Some(sig));
        let sign = if neg { "-" } else { "" };
        let exp = exp.expect("nonzero finite value has an exponent");
        format!("{sign}0.{mantissa}e{exp}")
    }

    /// Nearest binary64 value (for display-time formatting only).
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_decimal_string())
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                self.lift(Float::with_val(
                    self.bits().max(rhs.bits()),
                    std::ops::$trait::$method(&self.value, &rhs.value),
                ))
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl std::ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.lift(Float::with_val(self.bits(), -&self.value))
    }
}

/// The field contract iteration kernels are generic over.
///
/// Constructors take `&self` so every produced value inherits the receiver's
/// precision; [`Scalar`] and [`ComplexScalar`] both satisfy the contract.
pub trait MethodField: Clone + std::fmt::Debug {
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn div(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Integer constant at the receiver's precision.
    fn from_i64(&self, v: i64) -> Self;
    /// Binary64 constant at the receiver's precision (exact widening).
    fn from_f64(&self, v: f64) -> Self;
    /// Decimal constant at the receiver's precision.
    ///
    /// Panics on a malformed literal: callers only pass known-good strings
    /// (rendered integers and embedded constants).
    fn from_decimal(&self, s: &str) -> Self;
    /// Square root; `None` outside the field's domain (negative reals).
    fn sqrt(&self) -> Option<Self>;
    /// Nonnegative integer power by binary exponentiation.
    fn powu(&self, n: u32) -> Self;
    fn is_zero(&self) -> bool;
    fn is_finite(&self) -> bool;
    /// Magnitude guard: |self| <= |scale| * 10^pow10.
    fn mag_le_scaled(&self, scale: &Self, pow10: i64) -> bool;
    /// Decimal digits of working precision (16 for binary64).
    fn working_digits(&self) -> u32;
}

impl MethodField for Scalar {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn from_i64(&self, v: i64) -> Self {
        Scalar::from_i64(v, self.config())
    }

    fn from_f64(&self, v: f64) -> Self {
        self.lift(Float::with_val(self.bits(), v))
    }

    fn from_decimal(&self, s: &str) -> Self {
        Scalar::from_decimal(s, self.config()).expect("well-formed decimal literal")
    }

    fn sqrt(&self) -> Option<Self> {
        Scalar::sqrt(self)
    }

    fn powu(&self, n: u32) -> Self {
        self.lift(Float::with_val(self.bits(), (&self.value).pow(n)))
    }

    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }

    fn is_finite(&self) -> bool {
        Scalar::is_finite(self)
    }

    fn mag_le_scaled(&self, scale: &Self, pow10: i64) -> bool {
        let bound = &scale.abs() * &Scalar::pow10(pow10, self.config());
        self.abs() <= bound
    }

    fn working_digits(&self) -> u32 {
        self.digits
    }
}

impl MethodField for ComplexScalar {
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }

    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn div(&self, rhs: &Self) -> Self {
        self / rhs
    }

    fn neg(&self) -> Self {
        -self
    }

    fn from_i64(&self, v: i64) -> Self {
        ComplexScalar::new(v as f64, 0.0)
    }

    fn from_f64(&self, v: f64) -> Self {
        ComplexScalar::new(v, 0.0)
    }

    fn from_decimal(&self, s: &str) -> Self {
        let re: f64 = s.parse().expect("well-formed decimal literal");
        ComplexScalar::new(re, 0.0)
    }

    fn sqrt(&self) -> Option<Self> {
        Some(num_complex::Complex::sqrt(*self))
    }

    fn powu(&self, n: u32) -> Self {
        num_complex::Complex::powu(self, n)
    }

    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }

    fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn mag_le_scaled(&self, scale: &Self, pow10: i64) -> bool {
        // norm() is hypot-based: squaring via norm_sqr would underflow for
        // magnitudes below ~1e-154 and falsely flag healthy denominators.
        self.norm() <= scale.norm() * 10f64.powi(pow10 as i32)
    }

    fn working_digits(&self) -> u32 {
        16
    }
}
