//! Exponential Bell polynomials and potential polynomials, evaluated at
//! concrete arguments.
//!
//! With `x(t) = sum_{m>=1} x_m t^m / m!`:
//!
//! * `exp(u x(t)) = sum_{n,k} B_{n,k}(x) u^k t^n / n!` (partial Bell),
//! * `exp(x(t)) = sum_n Y_n(x) t^n / n!` (complete Bell),
//! * `(1 + x(t))^r = sum_n P^{(r)}_n(x) t^n / n!` (potential).

use rug::Rational;

use crate::error::BellError;
use crate::scalar::{binomial, falling_factorial_rational, Scalar};

/// Arguments `x_1, x_2, ...` of a Bell or potential polynomial.
///
/// `xs[0]` is `x_1`. The context is kept separately so that polynomials of
/// index zero can still produce a correctly typed `1`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellArgs<S: Scalar> {
    xs: Vec<S>,
    ctx: S::Ctx,
}

impl<S: Scalar> BellArgs<S> {
    pub fn new(xs: Vec<S>, ctx: S::Ctx) -> Self {
        BellArgs { xs, ctx }
    }

    pub fn from_i64s(xs: &[i64], ctx: S::Ctx) -> Self {
        BellArgs::new(xs.iter().map(|&x| S::from_i64(x, ctx)).collect(), ctx)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// `x_m`, one-based.
    pub fn x(&self, m: usize) -> &S {
        &self.xs[m - 1]
    }

    pub fn ctx(&self) -> S::Ctx {
        self.ctx
    }

    fn require(&self, needed: usize) -> Result<(), BellError> {
        if self.xs.len() < needed {
            return Err(BellError::ArgsTooShort {
                needed,
                got: self.xs.len(),
            });
        }
        Ok(())
    }
}

/// `B_{n,k}(x_1, ..., x_{n-k+1})`.
///
/// Uses `B_{i,l} = sum_j C(i-1, j-1) x_j B_{i-j, l-1}`, restricted to the
/// cells with `i - l <= n - k` that the final value depends on.
pub fn bell_partial<S: Scalar>(n: usize, k: usize, args: &BellArgs<S>) -> Result<S, BellError> {
    if k > n {
        return Err(BellError::InvalidIndex { n, k });
    }
    let ctx = args.ctx;
    if k == 0 {
        return Ok(if n == 0 { S::one(ctx) } else { S::zero(ctx) });
    }
    let d = n - k;
    args.require(d + 1)?;
    // row[l][e] = B_{l+e, l}
    let mut prev: Vec<S> = (0..=d)
        .map(|e| if e == 0 { S::one(ctx) } else { S::zero(ctx) })
        .collect();
    for l in 1..=k {
        let mut cur = Vec::with_capacity(d + 1);
        for e in 0..=d {
            let i = l + e;
            let mut acc = S::zero(ctx);
            for j in 1..=e + 1 {
                let below = &prev[e + 1 - j];
                if below.is_zero() || args.x(j).is_zero() {
                    continue;
                }
                let c = S::from_integer(&binomial((i - 1) as u32, (j - 1) as u32), ctx);
                acc += &(c * args.x(j) * below);
            }
            cur.push(acc);
        }
        prev = cur;
    }
    Ok(prev.pop().expect("d + 1 entries"))
}

/// Every `B_{n,k}` for `0 <= k <= n <= max_n`; entry `[n][k]`.
pub fn bell_triangle<S: Scalar>(max_n: usize, args: &BellArgs<S>) -> Result<Vec<Vec<S>>, BellError> {
    args.require(max_n)?;
    let ctx = args.ctx;
    let mut t: Vec<Vec<S>> = vec![vec![S::one(ctx)]];
    for i in 1..=max_n {
        let mut row = vec![S::zero(ctx)];
        for l in 1..=i {
            let mut acc = S::zero(ctx);
            for j in 1..=i - l + 1 {
                let below = &t[i - j][l - 1];
                if below.is_zero() || args.x(j).is_zero() {
                    continue;
                }
                let c = S::from_integer(&binomial((i - 1) as u32, (j - 1) as u32), ctx);
                acc += &(c * args.x(j) * below);
            }
            row.push(acc);
        }
        t.push(row);
    }
    Ok(t)
}

/// `Y_n(x_1, ..., x_n)` via `Y_{m+1} = sum_i C(m, i) Y_{m-i} x_{i+1}`.
pub fn bell_complete<S: Scalar>(n: usize, args: &BellArgs<S>) -> Result<S, BellError> {
    args.require(n)?;
    let ctx = args.ctx;
    let mut y: Vec<S> = vec![S::one(ctx)];
    for m in 0..n {
        let mut acc = S::zero(ctx);
        for i in 0..=m {
            let c = S::from_integer(&binomial(m as u32, i as u32), ctx);
            acc += &(c * &y[m - i] * args.x(i + 1));
        }
        y.push(acc);
    }
    Ok(y.pop().expect("nonempty"))
}

/// `dY_n/dx_k = C(n, k) Y_{n-k}`.
pub fn bell_complete_partial_derivative<S: Scalar>(
    n: usize,
    k: usize,
    args: &BellArgs<S>,
) -> Result<S, BellError> {
    if k == 0 || k > n {
        return Err(BellError::InvalidIndex { n, k });
    }
    let y = bell_complete(n - k, args)?;
    Ok(S::from_integer(&binomial(n as u32, k as u32), args.ctx) * &y)
}

/// `P^{(r)}_n(x) = sum_k (r)_k B_{n,k}(x)`.
pub fn potential<S: Scalar>(r: &Rational, n: usize, args: &BellArgs<S>) -> Result<S, BellError> {
    let t = bell_triangle(n, args)?;
    Ok(potential_from_row(r, &t[n], args.ctx))
}

/// Potential polynomial from a precomputed row `B_{n,0..=n}`.
pub fn potential_from_row<S: Scalar>(r: &Rational, row: &[S], ctx: S::Ctx) -> S {
    let mut acc = S::zero(ctx);
    for (k, b) in row.iter().enumerate() {
        if b.is_zero() {
            continue;
        }
        let f = falling_factorial_rational(r, k as u32);
        acc += &(S::from_rational(&f, ctx) * b);
    }
    acc
}
