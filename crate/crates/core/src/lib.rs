//! Eigenpolynomials of exactly solvable differential operators and the
//! numerical machinery for checking their large-degree asymptotics.

pub mod branch;
pub mod combinatorics;
pub mod error;
pub mod harness;
pub mod operator;
pub mod poly;
pub mod roots;
pub mod scalar;
pub mod series;

pub use branch::{BranchContext, PathPlan, Predictor};
pub use combinatorics::{
    bell_complete, bell_complete_partial_derivative, bell_partial, potential, BellArgs,
};
pub use error::{Error, Result};
pub use operator::{EigenPair, ExactlySolvableOperator, OperatorJson, Violation};
pub use poly::{falling_factorial, Degree, Poly, PolyJson};
pub use roots::roots;
pub use scalar::{BigComplex, Bits, QComplex, Scalar};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/combinatorics.md")]
    mod combinatorics {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/branches.md")]
    mod branches {}
    #[doc = include_str!("../../../book/src/harness.md")]
    mod harness {}
}
