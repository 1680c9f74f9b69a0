//! Laurent series at infinity and the coefficient tables that relate the
//! degree `n` to the small parameter `epsilon_n`.
//!
//! With `f(z) = (sum_{k=1}^M rho_{k,k} (z)_k)^{1/M} = z + sum_j gamma_j z^{-j}`
//! one has `1/epsilon_n = f(n)`, hence
//!
//! * `epsilon_n^k = sum_j q_{j,k} n^{-k-j}`, and
//! * `n = sum_k h_k epsilon_n^{k-1}`.

use rug::{Integer, Rational};
use serde::Serialize;

use crate::combinatorics::{bell_triangle, potential_from_row, BellArgs};
use crate::error::SeriesError;
use crate::operator::ExactlySolvableOperator;
use crate::poly::Poly;
use crate::scalar::{BigComplex, Scalar};

/// Default truncation order for the coefficient tables.
pub const DEFAULT_ORDER: usize = 8;

/// A truncated Laurent series at infinity,
/// `sum_{i < order} c_i z^{lead_exponent - i}` with `c_0 != 0`.
///
/// Every operation is exact through the last stored power and discards
/// anything below it.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentTail<S: Scalar> {
    lead_exponent: i64,
    coeffs: Vec<S>,
}

impl<S: Scalar> LaurentTail<S> {
    /// `None` when every stored coefficient is zero.
    pub fn new(lead_exponent: i64, coeffs: Vec<S>) -> Option<Self> {
        let skip = coeffs.iter().take_while(|c| c.is_zero()).count();
        if skip == coeffs.len() {
            return None;
        }
        Some(LaurentTail {
            lead_exponent: lead_exponent - skip as i64,
            coeffs: coeffs[skip..].to_vec(),
        })
    }

    /// The top `order` terms of a nonzero polynomial.
    pub fn from_poly(p: &Poly<S>, order: usize) -> Option<Self> {
        let d = p.degree().finite()?;
        let ctx = p.leading()?.ctx();
        let coeffs = (0..order)
            .map(|i| {
                if i <= d {
                    p.coeffs()[d - i].clone()
                } else {
                    S::zero(ctx)
                }
            })
            .collect();
        LaurentTail::new(d as i64, coeffs)
    }

    pub fn lead_exponent(&self) -> i64 {
        self.lead_exponent
    }

    /// Number of stored terms.
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `c_i`, the coefficient of `z^(lead_exponent - i)`.
    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    /// Coefficient of `z^e`; `None` below the truncation point.
    pub fn coeff_of(&self, e: i64) -> Option<S> {
        let ctx = self.coeffs[0].ctx();
        if e > self.lead_exponent {
            return Some(S::zero(ctx));
        }
        let i = (self.lead_exponent - e) as usize;
        self.coeffs.get(i).cloned()
    }

    /// Lowest exponent that is still known exactly.
    fn floor(&self) -> i64 {
        self.lead_exponent - self.coeffs.len() as i64 + 1
    }

    pub fn add(&self, other: &Self) -> Option<Self> {
        let lead = self.lead_exponent.max(other.lead_exponent);
        let floor = self.floor().max(other.floor());
        if floor > lead {
            return None;
        }
        let coeffs = (floor..=lead)
            .rev()
            .map(|e| self.coeff_of(e).expect("above floor") + &other.coeff_of(e).expect("above floor"))
            .collect();
        LaurentTail::new(lead, coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let ctx = self.coeffs[0].ctx();
        let coeffs = (0..order)
            .map(|i| {
                let mut acc = S::zero(ctx);
                for j in 0..=i {
                    acc += &(self.coeffs[j].clone() * &other.coeffs[i - j]);
                }
                acc
            })
            .collect();
        LaurentTail {
            lead_exponent: self.lead_exponent + other.lead_exponent,
            coeffs,
        }
    }

    /// `self^r` for rational `r`, through potential polynomials.
    ///
    /// For non-integer `r` the leading coefficient must be 1, and
    /// `lead_exponent * r` must be an integer.
    pub fn pow(&self, r: &Rational) -> Result<Self, SeriesError> {
        let ctx = self.coeffs[0].ctx();
        let lead = Rational::from(self.lead_exponent) * r;
        if !lead.is_integer() {
            return Err(SeriesError::NonIntegerExponent {
                exponent: self.lead_exponent,
                power: r.to_string(),
            });
        }
        let c0 = &self.coeffs[0];
        let scale = if r.is_integer() {
            let e = r.numer().to_i32().expect("small exponent");
            let mut acc = S::one(ctx);
            for _ in 0..e.unsigned_abs() {
                acc *= c0;
            }
            if e < 0 {
                S::one(ctx) / &acc
            } else {
                acc
            }
        } else if c0.is_one() {
            S::one(ctx)
        } else {
            return Err(SeriesError::NonUnitLeading);
        };
        let n = self.order() - 1;
        let xs: Vec<S> = (1..=n)
            .map(|m| {
                let f = S::from_integer(&Integer::from(Integer::factorial(m as u32)), ctx);
                self.coeffs[m].clone() / c0 * &f
            })
            .collect();
        let tri = bell_triangle(n, &BellArgs::new(xs, ctx))?;
        let coeffs = (0..=n)
            .map(|m| {
                let f = S::from_integer(&Integer::from(Integer::factorial(m as u32)), ctx);
                potential_from_row(r, &tri[m], ctx) / &f * &scale
            })
            .collect();
        Ok(LaurentTail {
            lead_exponent: lead.numer().to_i64().expect("small exponent"),
            coeffs,
        })
    }

    /// Sum of the stored terms at a big-float point.
    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let bits = z.bits();
        let zi = z.recip();
        let mut acc = BigComplex::zero(crate::scalar::Bits(bits));
        for c in self.coeffs.iter().rev() {
            acc = acc * &zi + &c.to_big(bits);
        }
        acc * &z.powi(self.lead_exponent as i32)
    }
}

/// `sum_{k=1}^M rho_{k,k} (z)_k`, the polynomial whose value at `n` is
/// `lambda_n - rho_{0,0}`.
pub fn lambda_poly<S: Scalar>(op: &ExactlySolvableOperator<S>) -> Poly<S> {
    let ctx = op.ctx();
    let mut out = Poly::zero();
    for k in 1..=op.order() {
        let c = op.rho_coeff(k, k);
        if c.is_zero() {
            continue;
        }
        out = &out + &Poly::falling_factorial(k, ctx).scale(&c);
    }
    out
}

/// `gamma_0, ..., gamma_order` in `lambda_poly^{1/M} = z + sum_j gamma_j z^{-j}`.
pub fn gamma_coeffs<S: Scalar>(op: &ExactlySolvableOperator<S>, order: usize) -> Result<Vec<S>, SeriesError> {
    let lp = lambda_poly(op);
    if !lp.is_monic() {
        return Err(SeriesError::NonUnitLeading);
    }
    let tail = LaurentTail::from_poly(&lp, order + 2).expect("monic");
    let root = tail.pow(&Rational::from((1, op.order() as u32)))?;
    Ok(root.coeffs()[1..].to_vec())
}

/// `q_{j,k}` for `0 <= j <= order`, `1 <= k <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable<S: Scalar> {
    order: usize,
    /// `rows[j][k - 1]`.
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> QTable<S> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, j: usize, k: usize) -> Result<&S, SeriesError> {
        if j > self.order {
            return Err(SeriesError::OutOfRange {
                table: "q",
                index: j,
                order: self.order,
            });
        }
        if k == 0 || k > self.order {
            return Err(SeriesError::OutOfRange {
                table: "q",
                index: k,
                order: self.order,
            });
        }
        Ok(&self.rows[j][k - 1])
    }
}

/// `q_{j,k} = P^{(-k)}_j(x)/j!` with `x_m = m! gamma_{m-1}`.
pub fn q_table<S: Scalar>(gamma: &[S], order: usize) -> Result<QTable<S>, SeriesError> {
    if gamma.len() < order {
        return Err(SeriesError::OutOfRange {
            table: "gamma",
            index: order,
            order: gamma.len(),
        });
    }
    let ctx = gamma.first().map(|g| g.ctx()).unwrap_or_default();
    let xs: Vec<S> = (1..=order)
        .map(|m| gamma[m - 1].clone() * &S::from_integer(&Integer::from(Integer::factorial(m as u32)), ctx))
        .collect();
    let tri = bell_triangle(order, &BellArgs::new(xs, ctx))?;
    let rows = (0..=order)
        .map(|j| {
            let jf = S::from_integer(&Integer::from(Integer::factorial(j as u32)), ctx);
            (1..=order)
                .map(|k| potential_from_row(&Rational::from(-(k as i64)), &tri[j], ctx) / &jf)
                .collect()
        })
        .collect();
    Ok(QTable { order, rows })
}

/// `h_0, ..., h_{order+1}`: `h_0 = 1`, `h_1 = -gamma_0`, and
/// `h_{j+1} = -gamma_j - sum_{k=1}^{j-1} h_{k+1} q_{j-k,k}`.
pub fn h_coeffs<S: Scalar>(gamma: &[S], q: &QTable<S>, order: usize) -> Result<Vec<S>, SeriesError> {
    if gamma.len() < order + 1 {
        return Err(SeriesError::OutOfRange {
            table: "gamma",
            index: order,
            order: gamma.len().saturating_sub(1),
        });
    }
    let ctx = gamma[0].ctx();
    let mut h = vec![S::one(ctx), -gamma[0].clone()];
    for j in 1..=order {
        let mut acc = -gamma[j].clone();
        for k in 1..j {
            acc -= &(h[k + 1].clone() * q.get(j - k, k)?);
        }
        h.push(acc);
    }
    Ok(h)
}

/// `gamma`, `q` and `h` to a common order.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTables<S: Scalar> {
    order: usize,
    gamma: Vec<S>,
    q: QTable<S>,
    h: Vec<S>,
}

impl<S: Scalar> SeriesTables<S> {
    pub fn build(op: &ExactlySolvableOperator<S>, order: usize) -> Result<Self, SeriesError> {
        let gamma = gamma_coeffs(op, order)?;
        let q = q_table(&gamma, order)?;
        let h = h_coeffs(&gamma, &q, order)?;
        Ok(SeriesTables { order, gamma, q, h })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `gamma_j` for `j <= order`.
    pub fn gamma(&self, j: usize) -> Result<&S, SeriesError> {
        self.gamma.get(j).ok_or(SeriesError::OutOfRange {
            table: "gamma",
            index: j,
            order: self.order,
        })
    }

    /// `q_{j,k}` for `j <= order`, `1 <= k <= order`.
    pub fn q(&self, j: usize, k: usize) -> Result<&S, SeriesError> {
        self.q.get(j, k)
    }

    /// `h_k` for `k <= order + 1`.
    pub fn h(&self, k: usize) -> Result<&S, SeriesError> {
        self.h.get(k).ok_or(SeriesError::OutOfRange {
            table: "h",
            index: k,
            order: self.order + 1,
        })
    }

    pub fn gammas(&self) -> &[S] {
        &self.gamma
    }

    pub fn hs(&self) -> &[S] {
        &self.h
    }

    pub fn to_json(&self) -> SeriesJson {
        let fmt = |s: &S| {
            let (re, im) = s.format_parts();
            [re, im]
        };
        SeriesJson {
            order: self.order,
            gamma: self.gamma.iter().map(fmt).collect(),
            q: self.q.rows.iter().map(|row| row.iter().map(fmt).collect()).collect(),
            h: self.h.iter().map(fmt).collect(),
        }
    }
}

/// Tables as `[re, im]` strings; `q[j][k-1]` holds `q_{j,k}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeriesJson {
    pub order: usize,
    pub gamma: Vec<[String; 2]>,
    pub q: Vec<Vec<[String; 2]>>,
    pub h: Vec<[String; 2]>,
}

/// `n - sum_{k=0}^p h_k epsilon_n^{k-1}` at `bits` of precision.
pub fn n_reconstruct_residual<S: Scalar>(
    op: &ExactlySolvableOperator<S>,
    n: usize,
    p: usize,
    tables: &SeriesTables<S>,
    bits: u32,
) -> Result<BigComplex, SeriesError> {
    let eps = op.epsilon(n, bits).map_err(SeriesError::from)?;
    let mut pw = eps.recip();
    let mut acc = BigComplex::from_f64(bits, n as f64, 0.0);
    for k in 0..=p {
        acc -= &(tables.h(k)?.to_big(bits) * &pw);
        pw *= &eps;
    }
    Ok(acc)
}
