//! Adaptive Gauss–Legendre quadrature along straight segments in the
//! complex plane, for integrands that carry state from one end to the other.

use rug::Float;

use crate::error::BranchError;
use crate::scalar::{BigComplex, Bits, Scalar};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

impl GaussLegendre {
    /// `m`-point rule, accurate to `bits`.
    pub fn new(m: usize, bits: u32) -> Self {
        assert!(m >= 1);
        let wp = bits + 32;
        let stop = Float::with_val(wp, Float::i_exp(1, -(bits as i32) - 16));
        let mut nodes = Vec::with_capacity(m);
        let mut weights = Vec::with_capacity(m);
        for i in 0..m {
            let guess = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            let mut x = Float::with_val(wp, guess);
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, &x);
                let dx = Float::with_val(wp, &p / &d);
                x -= &dx;
                if dx.abs() < stop {
                    break;
                }
            }
            let (_, dp) = legendre_with_derivative(m, &x);
            let one_minus = Float::with_val(wp, 1) - Float::with_val(wp, &x * &x);
            let w = Float::with_val(wp, 2) / (one_minus * Float::with_val(wp, &dp * &dp));
            nodes.push(Float::with_val(bits, &x));
            weights.push(Float::with_val(bits, &w));
        }
        nodes.reverse();
        weights.reverse();
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// `P_m(x)` and `P_m'(x)` by the three-term recurrence.
fn legendre_with_derivative(m: usize, x: &Float) -> (Float, Float) {
    let wp = x.prec();
    let mut p0 = Float::with_val(wp, 1);
    let mut p1 = x.clone();
    for k in 1..m {
        let a = Float::with_val(wp, x * &p1) * (2 * k + 1) as u32;
        let b = Float::with_val(wp, &p0 * k as u32);
        let p2 = (a - b) / (k + 1) as u32;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (Float::with_val(wp, 1), Float::new(wp));
    }
    let num = (Float::with_val(wp, x * &p1) - &p0) * m as u32;
    let den = Float::with_val(wp, x * x) - 1u32;
    (p1, num / den)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadSettings {
    /// Absolute error target per integral.
    pub tol: f64,
    /// Points per Gauss–Legendre panel.
    pub nodes: usize,
    /// Maximum bisection depth before giving up.
    pub max_depth: u32,
}

impl QuadSettings {
    /// Tolerance `2^(-bits/2)`, `max(20, bits/8)` nodes, depth 40.
    pub fn for_bits(bits: u32) -> Self {
        QuadSettings {
            tol: Bits(bits).half_tolerance(),
            nodes: (bits as usize / 8).max(20),
            max_depth: 40,
        }
    }
}

/// An integrand whose evaluation may depend on a state carried along the
/// path, such as the current branch of a multivalued function.
pub trait PathIntegrand {
    type State: Clone;

    /// Move the state to `t` and return the integrand there. Calls along one
    /// path come in order of increasing path parameter.
    fn eval(&self, state: &mut Self::State, t: &BigComplex) -> Result<BigComplex, BranchError>;

    /// Move the state to `t` without needing the value.
    fn advance(&self, state: &mut Self::State, t: &BigComplex) -> Result<(), BranchError> {
        self.eval(state, t).map(|_| ())
    }
}

/// Integral and error estimate of one segment.
#[derive(Clone, Debug, PartialEq)]
pub struct Integral {
    pub value: BigComplex,
    pub error: f64,
}

/// `int_a^b f(t) dt` on the straight segment, returning the state at `b`.
pub fn integrate_segment<F: PathIntegrand>(
    f: &F,
    a: &BigComplex,
    b: &BigComplex,
    state: F::State,
    rule: &GaussLegendre,
    settings: &QuadSettings,
) -> Result<(Integral, F::State), BranchError> {
    let (whole, _) = apply_rule(f, a, b, state.clone(), rule)?;
    let mut err = 0.0;
    let (value, st) = bisect(f, a, b, state, whole, settings.tol, 0, rule, settings, &mut err)?;
    Ok((Integral { value, error: err }, st))
}

/// One panel; the returned state sits at the last node.
fn apply_rule<F: PathIntegrand>(
    f: &F,
    a: &BigComplex,
    b: &BigComplex,
    mut state: F::State,
    rule: &GaussLegendre,
) -> Result<(BigComplex, F::State), BranchError> {
    let ctx = a.ctx();
    let two = BigComplex::from_i64(2, ctx);
    let mid = (a.clone() + b) / &two;
    let half = (b.clone() - a) / &two;
    let mut acc = BigComplex::zero(ctx);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        let t = mid.clone() + &half.mul_real(x);
        let v = f.eval(&mut state, &t)?;
        acc += &v.mul_real(w);
    }
    Ok((acc * &half, state))
}

#[allow(clippy::too_many_arguments)]
fn bisect<F: PathIntegrand>(
    f: &F,
    a: &BigComplex,
    b: &BigComplex,
    state: F::State,
    whole: BigComplex,
    tol: f64,
    depth: u32,
    rule: &GaussLegendre,
    settings: &QuadSettings,
    err: &mut f64,
) -> Result<(BigComplex, F::State), BranchError> {
    let ctx = a.ctx();
    let mid = (a.clone() + b) / &BigComplex::from_i64(2, ctx);
    let (left, mut st_mid) = apply_rule(f, a, &mid, state.clone(), rule)?;
    f.advance(&mut st_mid, &mid)?;
    let (right, st_right) = apply_rule(f, &mid, b, st_mid.clone(), rule)?;
    let sum = left.clone() + &right;
    let est = whole.dist_f64(&sum);
    let floor = 2f64.powi(-(ctx.0 as i32) + 16) * sum.abs_f64();
    if est <= tol.max(floor) {
        let mut st_b = st_right;
        f.advance(&mut st_b, b)?;
        *err += est;
        return Ok((sum, st_b));
    }
    if depth >= settings.max_depth {
        return Err(BranchError::QuadratureFailure {
            tolerance: settings.tol,
            estimate: est,
        });
    }
    let (lv, st_m) = bisect(f, a, &mid, state, left, tol / 2.0, depth + 1, rule, settings, err)?;
    let (rv, st_b) = bisect(f, &mid, b, st_m, right, tol / 2.0, depth + 1, rule, settings, err)?;
    Ok((lv + &rv, st_b))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Plain<G: Fn(&BigComplex) -> BigComplex>(G);

    impl<G: Fn(&BigComplex) -> BigComplex> PathIntegrand for Plain<G> {
        type State = ();
        fn eval(&self, _: &mut (), t: &BigComplex) -> Result<BigComplex, BranchError> {
            Ok((self.0)(t))
        }
    }

    #[test]
    fn nodes_integrate_polynomials_exactly() {
        let gl = GaussLegendre::new(6, 128);
        // degree 10 monomial: int_{-1}^{1} x^10 = 2/11
        let s: Float = gl
            .nodes
            .iter()
            .zip(&gl.weights)
            .map(|(x, w)| { use rug::ops::Pow; Float::with_val(128, x.clone().pow(10u32) * w) })
            .fold(Float::new(128), |a, b| a + b);
        let exact = Float::with_val(128, 2) / 11u32;
        assert!((s - exact).abs() < 1e-35);
        assert!(gl.nodes.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn adaptive_log_near_singularity() {
        let bits = 192;
        let s = QuadSettings::for_bits(bits);
        let gl = GaussLegendre::new(s.nodes, bits);
        let f = Plain(|t: &BigComplex| t.recip());
        let a = BigComplex::from_f64(bits, 1e-3, 0.0);
        let b = BigComplex::from_f64(bits, 10.0, 1.0);
        let (v, _) = integrate_segment(&f, &a, &b, (), &gl, &s).unwrap();
        let exact = b.ln() - &a.ln();
        assert!(v.value.dist_f64(&exact) < 1e-25, "{}", v.value.dist_f64(&exact));
    }

    #[test]
    fn depth_limit_is_an_error() {
        let bits = 128;
        let s = QuadSettings {
            tol: 1e-30,
            nodes: 4,
            max_depth: 2,
        };
        let gl = GaussLegendre::new(s.nodes, bits);
        let f = Plain(|t: &BigComplex| t.recip());
        let a = BigComplex::from_f64(bits, 1e-6, 0.0);
        let b = BigComplex::from_f64(bits, 1.0, 0.0);
        assert!(matches!(
            integrate_segment(&f, &a, &b, (), &gl, &s),
            Err(BranchError::QuadratureFailure { .. })
        ));
    }
}
