use thiserror::Error;

use crate::operator::Violation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("not a number: {0:?}")]
    Number(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Shape(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("polynomial must have degree at least 1")]
    DegreeTooSmall,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BellError {
    #[error("needs {needed} arguments, got {got}")]
    ArgsTooShort { needed: usize, got: usize },
    #[error("index out of range: n = {n}, k = {k}")]
    InvalidIndex { n: usize, k: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("operator is not non-degenerate exactly solvable: {}", display_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("degree {n} is resonant with degree {j} (equal eigenvalues)")]
    Resonance { n: usize, j: usize },
    #[error("eigenvalue of degree {n} equals rho_0(0); epsilon is undefined")]
    ZeroShiftedEigenvalue { n: usize },
}

fn display_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BranchError {
    #[error("point {re} + {im}i is inside the convex hull of the leading coefficient's zeros")]
    InsideHull { re: f64, im: f64 },
    #[error("branch continuation became ambiguous near {re} + {im}i")]
    BranchAmbiguity { re: f64, im: f64 },
    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },
    #[error("companion matrix needs order >= 3; the 1x1 analogue is {re} + {im}i")]
    OrderTooSmall { re: f64, im: f64 },
    #[error("leading coefficient vanishes at {re} + {im}i")]
    PoleOfCoefficient { re: f64, im: f64 },
    #[error("invalid integration path: {0}")]
    InvalidPlan(String),
    #[error("branch index {j} outside 1..={m}")]
    BranchIndex { j: usize, m: usize },
    #[error(transparent)]
    Roots(#[from] PolyError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("{table} index {index} outside computed order {order}")]
    OutOfRange {
        table: &'static str,
        index: usize,
        order: usize,
    },
    #[error("leading coefficient must be 1 for a non-integer power")]
    NonUnitLeading,
    #[error("z^{exponent} raised to {power} is not a Laurent monomial")]
    NonIntegerExponent { exponent: i64, power: String },
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MassonShapiroError {
    #[error("P must be monic")]
    NotMonic,
    #[error("P must have degree at least 2")]
    DegreeTooSmall,
}

/// Umbrella error for the harness and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Bell(#[from] BellError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Branch(#[from] BranchError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    MassonShapiro(#[from] MassonShapiroError),
    #[error("config error: {0}")]
    Config(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
