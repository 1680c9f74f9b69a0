//! Dense univariate polynomials over a [`Scalar`], lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::ParseError;
use crate::scalar::{BigComplex, QComplex, Scalar};

/// Degree of a polynomial. The zero polynomial has its own marker rather
/// than `-1`, so degree arithmetic can never silently wrap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S: Scalar> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    /// Build from coefficients (constant term first); trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Poly::new(vec![c])
    }

    /// `c * z^k`.
    pub fn monomial(c: S, k: usize) -> Self {
        let ctx = c.ctx();
        let mut coeffs = vec![S::zero(ctx); k];
        coeffs.push(c);
        Poly::new(coeffs)
    }

    /// The identity polynomial `z`.
    pub fn z(ctx: S::Ctx) -> Self {
        Poly::monomial(S::one(ctx), 1)
    }

    pub fn from_i64s(coeffs: &[i64], ctx: S::Ctx) -> Self {
        Poly::new(coeffs.iter().map(|&c| S::from_i64(c, ctx)).collect())
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[S], ctx: S::Ctx) -> Self {
        roots.iter().fold(Poly::constant(S::one(ctx)), |acc, r| {
            &acc * &Poly::new(vec![-r.clone(), S::one(ctx)])
        })
    }

    /// Falling-factorial polynomial `(z)_k = z (z-1) ... (z-k+1)`.
    pub fn falling_factorial(k: usize, ctx: S::Ctx) -> Self {
        (0..k).fold(Poly::constant(S::one(ctx)), |acc, j| {
            &acc * &Poly::new(vec![S::from_i64(-(j as i64), ctx), S::one(ctx)])
        })
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<S> {
        self.coeffs
    }

    /// Coefficient of `z^i`, `None` beyond the degree.
    pub fn coeff(&self, i: usize) -> Option<&S> {
        self.coeffs.get(i)
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&S> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(|c| c.is_one())
    }

    /// Horner evaluation at the precision of the coefficients.
    pub fn eval(&self, z: &S) -> S {
        let mut it = self.coeffs.iter().rev();
        let Some(lead) = it.next() else {
            return S::zero(z.ctx());
        };
        it.fold(lead.clone(), |acc, c| acc * z + c)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: &S) -> (S, S) {
        let ctx = z.ctx();
        let mut p = S::zero(ctx);
        let mut dp = S::zero(ctx);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + &p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `k`-th derivative.
    pub fn derivative(&self, k: usize) -> Self {
        if k >= self.coeffs.len() {
            return Poly::zero();
        }
        let coeffs = self.coeffs[k..]
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let f = falling_factorial((i + k) as i64, k as u32);
                c.clone() * &S::from_integer(&f, c.ctx())
            })
            .collect();
        Poly::new(coeffs)
    }

    pub fn scale(&self, s: &S) -> Self {
        Poly::new(self.coeffs.iter().map(|c| c.clone() * s).collect())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
    }

    /// Round every coefficient to a big float.
    pub fn to_big(&self, bits: u32) -> Poly<BigComplex> {
        self.map(|c| c.to_big(bits))
    }
}

impl Poly<QComplex> {
    /// Polynomial with integer coefficients, constant term first.
    pub fn from_ints(coeffs: &[i64]) -> Self {
        Poly::from_i64s(coeffs, ())
    }
}

impl<'a, S: Scalar> Add<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &'a Poly<S>) -> Poly<S> {
        let (long, short) = if self.coeffs.len() >= rhs.coeffs.len() {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let mut out = long.coeffs.clone();
        for (o, c) in out.iter_mut().zip(&short.coeffs) {
            *o += c;
        }
        Poly::new(out)
    }
}

impl<'a, S: Scalar> Sub<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &'a Poly<S>) -> Poly<S> {
        self + &(-rhs.clone())
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<'a, S: Scalar> Mul<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &'a Poly<S>) -> Poly<S> {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let ctx = self.coeffs[0].ctx();
        let mut out = vec![S::zero(ctx); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += &(a.clone() * b);
            }
        }
        Poly::new(out)
    }
}

impl<S: Scalar> fmt::Display for Poly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_string();
            let (neg, body) = match text.strip_prefix('-') {
                Some(rest) if !rest.contains(['+', '-']) => (true, rest.to_string()),
                _ => (false, text),
            };
            let compound = body.contains(['+', '-']);
            let sign = match (first, neg) {
                (true, true) => "-",
                (true, false) => "",
                (false, true) => " - ",
                (false, false) => " + ",
            };
            first = false;
            let coef = match (body.as_str(), compound, i) {
                (_, true, _) => format!("({body})"),
                ("1", _, 1..) => String::new(),
                _ => body,
            };
            let star = if coef.is_empty() || i == 0 { "" } else { "*" };
            match i {
                0 => write!(f, "{sign}{coef}")?,
                1 => write!(f, "{sign}{coef}{star}z")?,
                _ => write!(f, "{sign}{coef}{star}z^{i}")?,
            }
        }
        Ok(())
    }
}

/// Falling factorial `(n)_k = n (n-1) ... (n-k+1)` with `(n)_0 = 1`.
pub fn falling_factorial(n: i64, k: u32) -> Integer {
    let mut acc = Integer::from(1);
    for i in 0..k as i64 {
        acc *= n - i;
        if acc == 0 {
            break;
        }
    }
    acc
}

/// Wire format: `{"coeffs": [["re", "im"], ...]}`, constant term first.
///
/// Exact coefficients are written as integers or `p/q`; float coefficients
/// as decimal strings with enough digits to round-trip at their precision.
/// On input every decimal string is read exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyJson {
    pub coeffs: Vec<[String; 2]>,
}

impl PolyJson {
    pub fn from_poly<S: Scalar>(p: &Poly<S>) -> Self {
        PolyJson {
            coeffs: p
                .coeffs()
                .iter()
                .map(|c| {
                    let (re, im) = c.format_parts();
                    [re, im]
                })
                .collect(),
        }
    }

    pub fn to_poly<S: Scalar>(&self, ctx: S::Ctx) -> Result<Poly<S>, ParseError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|[re, im]| S::parse_parts(re, im, ctx))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly::new(coeffs))
    }
}
