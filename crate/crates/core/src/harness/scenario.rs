//! Named operator families and the grids they are evaluated on.

use std::path::PathBuf;

use log::info;
use rug::Rational;

use crate::branch::BranchContext;
use crate::error::{Error, MassonShapiroError, OperatorError};
use crate::operator::{EigenPair, ExactlySolvableOperator};
use crate::poly::Poly;
use crate::scalar::{binomial, BigComplex, QComplex, Scalar};

/// Which operator a scenario runs.
#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioKind {
    /// `(z^2 - 1) f'' + 2z f'`, the monic Legendre operator.
    Legendre2,
    /// The fourth-order family with `rho_4 = (z^2 - 1)^2`.
    Jacobi4 { c: Rational },
    /// `d^M/dz^M (P v)` for a monic `P` of degree `M`.
    MassonShapiro { p: Poly<QComplex> },
    /// Operator read from a JSON file.
    Custom { file: PathBuf },
}

/// `rho_k = C(M, k) P^{(M-k)}`, the Leibniz expansion of `(P v)^{(M)}`.
///
/// ```
/// use eigenwkb::harness::build_masson_shapiro;
/// use eigenwkb::{Poly, QComplex};
///
/// let op = build_masson_shapiro(&Poly::<QComplex>::from_ints(&[0, -1, 0, 1])).unwrap();
/// assert_eq!(op.rho(2), &Poly::from_ints(&[-3, 0, 9]));
/// assert_eq!(op.rho(1), &Poly::from_ints(&[0, 18]));
/// assert_eq!(op.rho(0), &Poly::from_ints(&[6]));
/// ```
pub fn build_masson_shapiro<S: Scalar>(p: &Poly<S>) -> Result<ExactlySolvableOperator<S>, Error> {
    let m = match p.degree().finite() {
        Some(m) if m >= 2 => m,
        _ => return Err(MassonShapiroError::DegreeTooSmall.into()),
    };
    if !p.is_monic() {
        return Err(MassonShapiroError::NotMonic.into());
    }
    let ctx = p.leading().expect("nonzero").ctx();
    let rho = (0..=m)
        .map(|k| {
            let c = S::from_integer(&binomial(m as u32, k as u32), ctx);
            p.derivative(m - k).scale(&c)
        })
        .collect();
    Ok(ExactlySolvableOperator::new(rho)?)
}

/// `(z^2 - 1) f'' + 2z f'`.
pub fn legendre2() -> ExactlySolvableOperator<QComplex> {
    ExactlySolvableOperator::from_int_lists(&[&[], &[0, 2], &[-1, 0, 1]]).expect("valid operator")
}

/// `(z^2-1)^2 f'''' + 4z(z^2-1) f''' + 2(z-1)((1+2c)z + 2c+3) f''`.
///
/// Its eigenvalues are `n(n-1)(n^2 - n + 4c)`.
pub fn jacobi4(c: &Rational) -> ExactlySolvableOperator<QComplex> {
    let a = QComplex::real(Rational::from(1) + Rational::from(2 * c));
    let b = QComplex::real(Rational::from(2 * c) + 3);
    let rho2 = &Poly::from_ints(&[-2, 2]) * &Poly::new(vec![b, a]);
    ExactlySolvableOperator::new(vec![
        Poly::zero(),
        Poly::zero(),
        rho2,
        Poly::from_ints(&[0, -4, 0, 4]),
        Poly::from_ints(&[1, 0, -2, 0, 1]),
    ])
    .expect("valid operator")
}

/// An operator together with its degree and point grids.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub kind: ScenarioKind,
    pub op: ExactlySolvableOperator<QComplex>,
    pub n_grid: Vec<usize>,
    pub z_grid: Vec<BigComplex>,
    pub precision: u32,
    pub order: usize,
}

impl Scenario {
    /// Checks the grids: `z` outside the hull (and on the real axis beyond
    /// every root for Masson–Shapiro), `n` sorted with resonant degrees
    /// dropped.
    pub fn new(
        name: String,
        kind: ScenarioKind,
        op: ExactlySolvableOperator<QComplex>,
        mut n_grid: Vec<usize>,
        z_grid: Vec<BigComplex>,
        precision: u32,
        order: usize,
    ) -> Result<Self, Error> {
        let branch = BranchContext::new(&op, precision)?;
        for (i, z) in z_grid.iter().enumerate() {
            let (re, im) = z.to_f64_parts();
            if branch.check_outside(z).is_err() {
                return Err(Error::Config(format!(
                    "scenario {name}: z_grid[{i}] = {re} + {im}i lies inside the hull of the zeros of rho_M"
                )));
            }
            if matches!(kind, ScenarioKind::MassonShapiro { .. }) {
                let right = branch
                    .rho_m_roots()
                    .iter()
                    .map(|r| r.to_f64_parts().0)
                    .fold(f64::NEG_INFINITY, f64::max);
                if !z.im().is_zero() || re <= right {
                    return Err(Error::Config(format!(
                        "scenario {name}: z_grid[{i}] = {re} + {im}i must be real and to the right of every zero of P"
                    )));
                }
            }
        }
        n_grid.sort_unstable();
        n_grid.dedup();
        n_grid.retain(|&n| {
            let lambda = op.eigenvalue(n);
            match (0..n).find(|&j| op.eigenvalue(j).approx_eq(&lambda)) {
                Some(j) => {
                    info!("scenario {name}: dropping degree {n}, resonant with degree {j}");
                    false
                }
                None => true,
            }
        });
        Ok(Scenario {
            name,
            kind,
            op,
            n_grid,
            z_grid,
            precision,
            order,
        })
    }

    /// Exact eigenpolynomials for the requested degrees, sharing one action
    /// matrix.
    pub fn eigenpolys(&self, degrees: &[usize]) -> Result<Vec<EigenPair<QComplex>>, OperatorError> {
        let top = degrees.iter().copied().max().unwrap_or(0);
        let t = self.op.action_matrix(top);
        degrees.iter().map(|&n| self.op.eigenpoly_with(n, &t)).collect()
    }
}
