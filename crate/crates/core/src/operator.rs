//! Exactly solvable operators `L = sum_k rho_k(z) d^k/dz^k` with
//! `deg rho_k <= k` and `rho_M` monic of degree `M`.

use std::fmt;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, OperatorError, ParseError};
use crate::poly::{falling_factorial, Degree, Poly, PolyJson};
use crate::scalar::{BigComplex, QComplex, Scalar};

/// One failed validity condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Fewer than three coefficients, so `M < 2`.
    OrderTooSmall { m: usize },
    /// `deg rho_k > k`.
    DegreeTooHigh { k: usize, degree: usize },
    /// `deg rho_M != M`.
    LeadingDegree { m: usize, degree: Degree },
    /// `rho_M` has degree `M` but its leading coefficient is not 1.
    LeadingNotMonic { m: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OrderTooSmall { m } => write!(f, "order M = {m} is below 2"),
            Violation::DegreeTooHigh { k, degree } => {
                write!(f, "deg rho_{k} = {degree} exceeds {k}")
            }
            Violation::LeadingDegree { m, degree } => {
                write!(f, "deg rho_{m} = {degree}, expected {m}")
            }
            Violation::LeadingNotMonic { m } => write!(f, "rho_{m} is not monic"),
        }
    }
}

/// Every violated condition for the coefficient list `rho_0, ..., rho_M`.
pub fn validate<S: Scalar>(rho: &[Poly<S>]) -> Vec<Violation> {
    let mut out = Vec::new();
    if rho.len() < 3 {
        out.push(Violation::OrderTooSmall {
            m: rho.len().saturating_sub(1),
        });
        if rho.is_empty() {
            return out;
        }
    }
    let m = rho.len() - 1;
    for (k, p) in rho.iter().enumerate() {
        if let Degree::Finite(d) = p.degree() {
            if d > k {
                out.push(Violation::DegreeTooHigh { k, degree: d });
            }
        }
    }
    let lead = &rho[m];
    if lead.degree() != Degree::Finite(m) {
        if !matches!(lead.degree(), Degree::Finite(d) if d > m) {
            out.push(Violation::LeadingDegree {
                m,
                degree: lead.degree(),
            });
        }
    } else if !lead.is_monic() {
        out.push(Violation::LeadingNotMonic { m });
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactlySolvableOperator<S: Scalar> {
    rho: Vec<Poly<S>>,
}

/// Degree, eigenvalue and monic eigenpolynomial.
///
/// The small parameter `epsilon_n` is irrational in general, so it is
/// computed on demand at a chosen precision by
/// [`ExactlySolvableOperator::epsilon`].
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair<S: Scalar> {
    pub n: usize,
    pub lambda: S,
    pub q: Poly<S>,
}

/// The upper-triangular action of the operator on `1, z, ..., z^N`.
///
/// Only the band `0 <= k - j <= M` can be nonzero, and only it is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionMatrix<S: Scalar> {
    size: usize,
    m: usize,
    /// `band[k][d] = T[k - d][k]`.
    band: Vec<Vec<S>>,
    zero: S,
}

impl<S: Scalar> ActionMatrix<S> {
    /// Largest degree covered.
    pub fn max_degree(&self) -> usize {
        self.size
    }

    /// Coefficient of `z^j` in `L[z^k]`.
    pub fn get(&self, j: usize, k: usize) -> &S {
        if j > k || k > self.size || k - j > self.m {
            return &self.zero;
        }
        self.band[k].get(k - j).unwrap_or(&self.zero)
    }
}

impl<S: Scalar> ExactlySolvableOperator<S> {
    /// Build from `rho_0, ..., rho_M`, rejecting invalid coefficient lists.
    pub fn new(rho: Vec<Poly<S>>) -> Result<Self, OperatorError> {
        let v = validate(&rho);
        if !v.is_empty() {
            return Err(OperatorError::Invalid(v));
        }
        Ok(ExactlySolvableOperator { rho })
    }

    /// The order `M`.
    pub fn order(&self) -> usize {
        self.rho.len() - 1
    }

    pub fn rho(&self, k: usize) -> &Poly<S> {
        &self.rho[k]
    }

    pub fn rhos(&self) -> &[Poly<S>] {
        &self.rho
    }

    pub fn ctx(&self) -> S::Ctx {
        self.rho[self.order()].leading().expect("monic").ctx()
    }

    /// `rho_{k,j}`, the coefficient of `z^j` in `rho_k`.
    pub fn rho_coeff(&self, k: usize, j: usize) -> S {
        self.rho[k]
            .coeff(j)
            .cloned()
            .unwrap_or_else(|| S::zero(self.ctx()))
    }

    /// `kappa = (M-1)/2 - rho_{M-1,M-1}/M`.
    pub fn kappa(&self) -> S {
        let ctx = self.ctx();
        let m = self.order() as i64;
        S::from_i64(m - 1, ctx) / &S::from_i64(2, ctx)
            - self.rho_coeff(self.order() - 1, self.order() - 1) / &S::from_i64(m, ctx)
    }

    /// `sum_k rho_k f^{(k)}`.
    pub fn apply(&self, f: &Poly<S>) -> Poly<S> {
        let mut out = Poly::zero();
        for (k, r) in self.rho.iter().enumerate() {
            let d = f.derivative(k);
            if d.is_zero() || r.is_zero() {
                continue;
            }
            out = &out + &(r * &d);
        }
        out
    }

    /// `T[j][k] = sum_m rho_{m, m-(k-j)} (k)_m` for `0 <= j <= k <= n`.
    pub fn action_matrix(&self, n: usize) -> ActionMatrix<S> {
        let ctx = self.ctx();
        let m = self.order();
        let band = (0..=n)
            .map(|k| {
                (0..=m.min(k))
                    .map(|d| {
                        let mut acc = S::zero(ctx);
                        for mm in d..=m.min(k) {
                            let c = self.rho_coeff(mm, mm - d);
                            if c.is_zero() {
                                continue;
                            }
                            let ff = falling_factorial(k as i64, mm as u32);
                            acc += &(c * &S::from_integer(&ff, ctx));
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        ActionMatrix {
            size: n,
            m,
            band,
            zero: S::zero(ctx),
        }
    }

    /// `lambda_n = sum_{k <= min(M, n)} rho_{k,k} (n)_k`.
    pub fn eigenvalue(&self, n: usize) -> S {
        let ctx = self.ctx();
        let mut acc = S::zero(ctx);
        for k in 0..=self.order().min(n) {
            let c = self.rho_coeff(k, k);
            if !c.is_zero() {
                acc += &(c * &S::from_integer(&falling_factorial(n as i64, k as u32), ctx));
            }
        }
        acc
    }

    /// The monic eigenpolynomial of degree `n`, by back-substitution on the
    /// triangular system.
    ///
    /// Equal eigenvalues are detected exactly for rational coefficients and
    /// to relative `2^(-bits/2)` for floats.
    pub fn eigenpoly(&self, n: usize) -> Result<EigenPair<S>, OperatorError> {
        let t = self.action_matrix(n);
        self.eigenpoly_with(n, &t)
    }

    /// As [`eigenpoly`](Self::eigenpoly), reusing an action matrix that
    /// covers at least degree `n`.
    pub fn eigenpoly_with(&self, n: usize, t: &ActionMatrix<S>) -> Result<EigenPair<S>, OperatorError> {
        assert!(t.max_degree() >= n, "action matrix too small");
        let ctx = self.ctx();
        let m = self.order();
        let lambda = t.get(n, n).clone();
        let mut a: Vec<S> = vec![S::zero(ctx); n + 1];
        a[n] = S::one(ctx);
        for j in (0..n).rev() {
            let lj = t.get(j, j);
            if lj.approx_eq(&lambda) {
                return Err(OperatorError::Resonance { n, j });
            }
            let mut acc = S::zero(ctx);
            for k in j + 1..=n.min(j + m) {
                let tjk = t.get(j, k);
                if tjk.is_zero() || a[k].is_zero() {
                    continue;
                }
                acc += &(tjk.clone() * &a[k]);
            }
            if !acc.is_zero() {
                a[j] = -acc / &(lj.clone() - &lambda);
            }
        }
        Ok(EigenPair {
            n,
            lambda,
            q: Poly::new(a),
        })
    }

    /// `epsilon_n`: the `M`-th root of `1/(lambda_n - rho_{0,0})` whose
    /// argument is closest to zero, ties going to nonnegative imaginary part.
    pub fn epsilon(&self, n: usize, bits: u32) -> Result<BigComplex, OperatorError> {
        let d = self.eigenvalue(n) - &self.rho_coeff(0, 0);
        if d.is_zero() {
            return Err(OperatorError::ZeroShiftedEigenvalue { n });
        }
        Ok(nearest_argument_root(&d.to_big(bits).recip(), self.order() as u32))
    }

    /// Round every coefficient to a big float.
    pub fn to_big(&self, bits: u32) -> ExactlySolvableOperator<BigComplex> {
        ExactlySolvableOperator {
            rho: self.rho.iter().map(|p| p.to_big(bits)).collect(),
        }
    }

    pub fn to_json(&self) -> OperatorJson {
        OperatorJson {
            m: self.order(),
            rho: self.rho.iter().map(PolyJson::from_poly).collect(),
        }
    }

    pub fn from_json(j: &OperatorJson, ctx: S::Ctx) -> Result<Self, Error> {
        if j.rho.len() != j.m + 1 {
            return Err(ParseError::Shape(format!(
                "M = {} needs {} coefficient polynomials, got {}",
                j.m,
                j.m + 1,
                j.rho.len()
            ))
            .into());
        }
        let rho = j
            .rho
            .iter()
            .map(|p| p.to_poly::<S>(ctx))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExactlySolvableOperator::new(rho)?)
    }

    pub fn from_json_str(text: &str, ctx: S::Ctx) -> Result<Self, Error> {
        let j: OperatorJson =
            serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        Self::from_json(&j, ctx)
    }
}

impl ExactlySolvableOperator<QComplex> {
    /// Operator with integer coefficient lists, `rho_0` first.
    pub fn from_int_lists(rho: &[&[i64]]) -> Result<Self, OperatorError> {
        ExactlySolvableOperator::new(rho.iter().map(|c| Poly::from_ints(c)).collect())
    }
}

/// The `m`-th root of `x` with argument closest to zero.
pub fn nearest_argument_root(x: &BigComplex, m: u32) -> BigComplex {
    let bits = x.bits();
    let base = x.root_principal(m);
    let tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) / 2));
    let mut best: Option<(Float, BigComplex)> = None;
    for k in 0..m as i64 {
        let cand = base.clone() * &BigComplex::unit_root(bits, k, m);
        let a = cand.arg().abs();
        let better = match &best {
            None => true,
            Some((ba, bc)) => {
                let diff = Float::with_val(bits, &a - ba);
                if diff < -tol.clone() {
                    true
                } else if diff.abs() <= tol {
                    cand.im().is_sign_positive() && !bc.im().is_sign_positive()
                } else {
                    false
                }
            }
        };
        if better {
            best = Some((a, cand));
        }
    }
    best.expect("m >= 1").1
}

/// Wire format: `{"M": int, "rho": [PolyJson, ...]}`, `rho[k]` is `rho_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    #[serde(rename = "M")]
    pub m: usize,
    pub rho: Vec<PolyJson>,
}
