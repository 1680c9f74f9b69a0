//! Coefficient scalars.
//!
//! Two modes share one trait so that polynomial, combinatorial and operator
//! code is written once:
//!
//! * [`QComplex`]: complex numbers with exact rational real and imaginary
//!   parts. Arithmetic is closed and exact.
//! * [`BigComplex`]: MPC complex floats at a configurable mantissa width,
//!   correctly rounded on every operation.
//!
//! Conversion goes one way only, exact to float, through
//! [`Scalar::from_exact`] / [`Scalar::to_big`].

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use crate::error::ParseError;

/// Default mantissa width for big-float work.
pub const DEFAULT_BITS: u32 = 256;

/// Working precision of a big-float computation, in mantissa bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Bits(pub u32);

impl Default for Bits {
    fn default() -> Self {
        Bits(DEFAULT_BITS)
    }
}

impl Bits {
    /// `2^(-bits/2)`, the tolerance used for "numerically equal" decisions.
    pub fn half_tolerance(self) -> f64 {
        2f64.powi(-(self.0 as i32) / 2)
    }
}

/// A field element usable as a polynomial coefficient.
pub trait Scalar:
    Sized
    + Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + for<'a> Div<&'a Self, Output = Self>
    + for<'a> AddAssign<&'a Self>
    + for<'a> SubAssign<&'a Self>
    + for<'a> MulAssign<&'a Self>
{
    /// Construction context: `()` for exact scalars, the precision for floats.
    type Ctx: Copy + fmt::Debug + PartialEq + Default + Send + Sync;

    /// `true` when arithmetic is exact.
    const EXACT: bool;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: Self::Ctx) -> Self;
    fn one(ctx: Self::Ctx) -> Self {
        Self::from_i64(1, ctx)
    }
    fn from_i64(v: i64, ctx: Self::Ctx) -> Self;
    fn from_integer(v: &Integer, ctx: Self::Ctx) -> Self;
    fn from_rational(v: &Rational, ctx: Self::Ctx) -> Self;
    fn from_exact(v: &QComplex, ctx: Self::Ctx) -> Self;

    fn is_zero(&self) -> bool;
    /// Exactly one for exact scalars; within one ulp for floats.
    fn is_one(&self) -> bool;
    /// Exact equality, or relative agreement to `2^(-bits/2)` for floats.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Round to a big float of the given width.
    fn to_big(&self, bits: u32) -> BigComplex;
    /// Nearest `f64` real and imaginary parts.
    fn to_f64_parts(&self) -> (f64, f64);
    fn abs_f64(&self) -> f64 {
        let (re, im) = self.to_f64_parts();
        re.hypot(im)
    }

    /// Parse `[re, im]` decimal or `p/q` strings.
    fn parse_parts(re: &str, im: &str, ctx: Self::Ctx) -> Result<Self, ParseError>;
    /// Render as `[re, im]` strings that parse back to the same value.
    fn format_parts(&self) -> (String, String);
}

/// Parse a decimal (`-1.25e3`), integer or `p/q` string into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ParseError> {
    let t = s.trim();
    if t.is_empty() {
        return Err(ParseError::Number(s.to_string()));
    }
    if t.contains('/') {
        return Rational::from_str(t).map_err(|_| ParseError::Number(s.to_string()));
    }
    let (mantissa, exponent) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..]
                .parse()
                .map_err(|_| ParseError::Number(s.to_string()))?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(ParseError::Number(s.to_string()));
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num = Integer::from_str(if all.is_empty() { "0" } else { &all })
        .map_err(|_| ParseError::Number(s.to_string()))?;
    if neg {
        num = -num;
    }
    let scale = exponent - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return Err(ParseError::Number(s.to_string()));
    }
    let pow = Integer::from(10).pow(scale.unsigned_abs() as u32);
    Ok(if scale >= 0 {
        Rational::from(num * pow)
    } else {
        Rational::from((num, pow))
    })
}

// ---------------------------------------------------------------------------
// Exact mode
// ---------------------------------------------------------------------------

/// A complex number with exact rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QComplex {
    pub re: Rational,
    pub im: Rational,
}

impl QComplex {
    pub fn new(re: impl Into<Rational>, im: impl Into<Rational>) -> Self {
        QComplex {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn real(re: impl Into<Rational>) -> Self {
        QComplex::new(re, 0)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0
    }

    pub fn conj(&self) -> Self {
        QComplex::new(self.re.clone(), -self.im.clone())
    }

    /// `|z|^2`, exact.
    pub fn norm_sqr(&self) -> Rational {
        Rational::from(&self.re * &self.re) + Rational::from(&self.im * &self.im)
    }

    /// Raise to a nonnegative integer power by squaring.
    pub fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = QComplex::real(1);
        while e > 0 {
            if e & 1 == 1 {
                acc *= &base;
            }
            base = base.clone() * &base;
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for QComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0 {
            write!(f, "{}", self.re)
        } else if self.re == 0 {
            write!(f, "{}i", self.im)
        } else if self.im < 0 {
            write!(f, "{}-{}i", self.re, Rational::from(-&self.im))
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl From<i64> for QComplex {
    fn from(v: i64) -> Self {
        QComplex::real(v)
    }
}

impl From<Rational> for QComplex {
    fn from(v: Rational) -> Self {
        QComplex::real(v)
    }
}

impl<'a> Add<&'a QComplex> for QComplex {
    type Output = QComplex;
    fn add(mut self, rhs: &'a QComplex) -> QComplex {
        self += rhs;
        self
    }
}

impl Add for QComplex {
    type Output = QComplex;
    fn add(self, rhs: QComplex) -> QComplex {
        self + &rhs
    }
}

impl<'a> AddAssign<&'a QComplex> for QComplex {
    fn add_assign(&mut self, rhs: &'a QComplex) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl<'a> Sub<&'a QComplex> for QComplex {
    type Output = QComplex;
    fn sub(mut self, rhs: &'a QComplex) -> QComplex {
        self -= rhs;
        self
    }
}

impl Sub for QComplex {
    type Output = QComplex;
    fn sub(self, rhs: QComplex) -> QComplex {
        self - &rhs
    }
}

impl<'a> SubAssign<&'a QComplex> for QComplex {
    fn sub_assign(&mut self, rhs: &'a QComplex) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl<'a> Mul<&'a QComplex> for QComplex {
    type Output = QComplex;
    fn mul(self, rhs: &'a QComplex) -> QComplex {
        if self.im == 0 && rhs.im == 0 {
            return QComplex::real(self.re * &rhs.re);
        }
        let re = Rational::from(&self.re * &rhs.re) - Rational::from(&self.im * &rhs.im);
        let im = Rational::from(&self.re * &rhs.im) + Rational::from(&self.im * &rhs.re);
        QComplex { re, im }
    }
}

impl Mul for QComplex {
    type Output = QComplex;
    fn mul(self, rhs: QComplex) -> QComplex {
        self * &rhs
    }
}

impl<'a> MulAssign<&'a QComplex> for QComplex {
    fn mul_assign(&mut self, rhs: &'a QComplex) {
        let lhs = std::mem::take(self);
        *self = lhs * rhs;
    }
}

impl<'a> Div<&'a QComplex> for QComplex {
    type Output = QComplex;
    /// Panics on division by zero, like `Rational`.
    fn div(self, rhs: &'a QComplex) -> QComplex {
        if rhs.im == 0 {
            return QComplex {
                re: self.re / &rhs.re,
                im: self.im / &rhs.re,
            };
        }
        let d = rhs.norm_sqr();
        let num = self * &rhs.conj();
        QComplex {
            re: num.re / &d,
            im: num.im / &d,
        }
    }
}

impl Div for QComplex {
    type Output = QComplex;
    fn div(self, rhs: QComplex) -> QComplex {
        self / &rhs
    }
}

impl Neg for QComplex {
    type Output = QComplex;
    fn neg(self) -> QComplex {
        QComplex {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Scalar for QComplex {
    type Ctx = ();
    const EXACT: bool = true;

    fn ctx(&self) {}

    fn zero(_: ()) -> Self {
        QComplex::default()
    }

    fn from_i64(v: i64, _: ()) -> Self {
        QComplex::real(v)
    }

    fn from_integer(v: &Integer, _: ()) -> Self {
        QComplex::real(Rational::from(v))
    }

    fn from_rational(v: &Rational, _: ()) -> Self {
        QComplex::real(v.clone())
    }

    fn from_exact(v: &QComplex, _: ()) -> Self {
        v.clone()
    }

    fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    fn is_one(&self) -> bool {
        self.re == 1 && self.im == 0
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn to_big(&self, bits: u32) -> BigComplex {
        BigComplex(Complex::with_val(bits, (&self.re, &self.im)))
    }

    fn to_f64_parts(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    fn parse_parts(re: &str, im: &str, _: ()) -> Result<Self, ParseError> {
        Ok(QComplex {
            re: parse_rational(re)?,
            im: parse_rational(im)?,
        })
    }

    fn format_parts(&self) -> (String, String) {
        (self.re.to_string(), self.im.to_string())
    }
}

// ---------------------------------------------------------------------------
// Big-float mode
// ---------------------------------------------------------------------------

/// An MPC complex float. Every operation rounds to nearest at the
/// precision of the left operand.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex(pub Complex);

impl BigComplex {
    pub fn with_val<T>(bits: u32, v: T) -> Self
    where
        Complex: rug::Assign<T>,
    {
        BigComplex(Complex::with_val(bits, v))
    }

    pub fn from_f64(bits: u32, re: f64, im: f64) -> Self {
        BigComplex(Complex::with_val(bits, (re, im)))
    }

    pub fn bits(&self) -> u32 {
        self.0.prec().0
    }

    pub fn re(&self) -> &Float {
        self.0.real()
    }

    pub fn im(&self) -> &Float {
        self.0.imag()
    }

    /// Modulus as a big float.
    pub fn abs(&self) -> Float {
        Float::with_val(self.bits(), self.0.abs_ref())
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> Float {
        Float::with_val(self.bits(), self.0.arg_ref())
    }

    pub fn conj(&self) -> Self {
        BigComplex(self.0.clone().conj())
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        BigComplex(self.0.clone().ln())
    }

    pub fn exp(&self) -> Self {
        BigComplex(self.0.clone().exp())
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        BigComplex(self.0.clone().sqrt())
    }

    pub fn recip(&self) -> Self {
        BigComplex(self.0.clone().recip())
    }

    pub fn powi(&self, e: i32) -> Self {
        BigComplex(self.0.clone().pow(e))
    }

    /// Principal power `exp(e * Log(self))`.
    pub fn pow_big(&self, e: &BigComplex) -> Self {
        BigComplex(self.0.clone().pow(&e.0))
    }

    /// Principal `m`-th root.
    pub fn root_principal(&self, m: u32) -> Self {
        if self.0.is_zero() {
            return self.clone();
        }
        let e = Float::with_val(self.bits(), 1) / m;
        BigComplex(self.0.clone().pow(e))
    }

    /// `exp(2 pi i k / m)`.
    pub fn unit_root(bits: u32, k: i64, m: u32) -> Self {
        if k.rem_euclid(m as i64) == 0 {
            return BigComplex::from_f64(bits, 1.0, 0.0);
        }
        let pi = Float::with_val(bits, Constant::Pi);
        let angle = pi * 2u32 * Float::with_val(bits, k) / m;
        let (s, c) = angle.sin_cos(Float::new(bits));
        BigComplex(Complex::with_val(bits, (c, s)))
    }

    pub fn pi(bits: u32) -> Float {
        Float::with_val(bits, Constant::Pi)
    }

    pub fn is_finite(&self) -> bool {
        self.0.real().is_finite() && self.0.imag().is_finite()
    }

    pub fn mul_real(&self, x: &Float) -> Self {
        BigComplex(self.0.clone() * x)
    }

    /// `|self - other|` as `f64`.
    pub fn dist_f64(&self, other: &BigComplex) -> f64 {
        (self.clone() - other).abs().to_f64()
    }

    /// Convert to a different precision, rounding to nearest.
    pub fn with_bits(&self, bits: u32) -> Self {
        BigComplex(Complex::with_val(bits, &self.0))
    }

    /// Decimal string with `digits` significant digits, for human output.
    pub fn to_string_digits(&self, digits: usize) -> String {
        let re = self.0.real().to_string_radix(10, Some(digits));
        let im = self.0.imag().to_string_radix(10, Some(digits));
        format!("({re}, {im})")
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_digits(20))
    }
}

macro_rules! big_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl<'a> $tr<&'a BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &'a BigComplex) -> BigComplex {
                BigComplex($tr::$m(self.0, &rhs.0))
            }
        }
        impl $tr for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                BigComplex($tr::$m(self.0, &rhs.0))
            }
        }
        impl<'a> $atr<&'a BigComplex> for BigComplex {
            fn $am(&mut self, rhs: &'a BigComplex) {
                $atr::$am(&mut self.0, &rhs.0);
            }
        }
    };
}

big_binop!(Add, add, AddAssign, add_assign);
big_binop!(Sub, sub, SubAssign, sub_assign);
big_binop!(Mul, mul, MulAssign, mul_assign);

impl<'a> Div<&'a BigComplex> for BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &'a BigComplex) -> BigComplex {
        BigComplex(self.0 / &rhs.0)
    }
}

impl Div for BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: BigComplex) -> BigComplex {
        BigComplex(self.0 / rhs.0)
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex(-self.0)
    }
}

impl Scalar for BigComplex {
    type Ctx = Bits;
    const EXACT: bool = false;

    fn ctx(&self) -> Bits {
        Bits(self.bits())
    }

    fn zero(ctx: Bits) -> Self {
        BigComplex(Complex::new(ctx.0))
    }

    fn from_i64(v: i64, ctx: Bits) -> Self {
        BigComplex(Complex::with_val(ctx.0, v))
    }

    fn from_integer(v: &Integer, ctx: Bits) -> Self {
        BigComplex(Complex::with_val(ctx.0, v))
    }

    fn from_rational(v: &Rational, ctx: Bits) -> Self {
        BigComplex(Complex::with_val(ctx.0, v))
    }

    fn from_exact(v: &QComplex, ctx: Bits) -> Self {
        v.to_big(ctx.0)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn is_one(&self) -> bool {
        let bits = self.bits();
        let d = (self.0.clone() - 1u32).abs().real().clone();
        let ulp = Float::with_val(bits, Float::i_exp(1, 1 - bits as i32));
        d <= ulp
    }

    fn approx_eq(&self, other: &Self) -> bool {
        let bits = self.bits().min(other.bits());
        let diff = (self.clone() - other).abs();
        let scale = self.abs().max(&other.abs());
        if scale.is_zero() {
            return diff.is_zero();
        }
        let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) / 2));
        diff <= tol * scale
    }

    fn to_big(&self, bits: u32) -> BigComplex {
        self.with_bits(bits)
    }

    fn to_f64_parts(&self) -> (f64, f64) {
        (self.0.real().to_f64(), self.0.imag().to_f64())
    }

    fn parse_parts(re: &str, im: &str, ctx: Bits) -> Result<Self, ParseError> {
        let parse = |s: &str| -> Result<Float, ParseError> {
            if s.contains('/') {
                return Ok(Float::with_val(ctx.0, &parse_rational(s)?));
            }
            Float::parse(s.trim())
                .map(|p| Float::with_val(ctx.0, p))
                .map_err(|_| ParseError::Number(s.to_string()))
        };
        Ok(BigComplex(Complex::with_val(ctx.0, (parse(re)?, parse(im)?))))
    }

    fn format_parts(&self) -> (String, String) {
        (
            self.0.real().to_string_radix(10, None),
            self.0.imag().to_string_radix(10, None),
        )
    }
}

/// Falling factorial `(r)_k = r (r-1) ... (r-k+1)` of a rational, `(r)_0 = 1`.
pub fn falling_factorial_rational(r: &Rational, k: u32) -> Rational {
    let mut acc = Rational::from(1);
    let mut cur = r.clone();
    for _ in 0..k {
        acc *= &cur;
        cur -= 1;
    }
    acc
}

/// Binomial coefficient `C(n, k)` as an exact integer.
pub fn binomial(n: u32, k: u32) -> Integer {
    if k > n {
        return Integer::new();
    }
    Integer::from(Integer::binomial_u(n, k))
}
