//! Simultaneous root finding by the Aberth–Ehrlich iteration.

use rug::Float;

use crate::error::PolyError;
use crate::poly::{Degree, Poly};
use crate::scalar::{BigComplex, Bits, Scalar};

/// Bits used for the warm-up stage before refining at full precision.
const WARMUP_BITS: u32 = 128;

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_iterations: usize,
    /// Extra sweeps after every root has met the stopping rule.
    pub polish_sweeps: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions {
            max_iterations: 200,
            polish_sweeps: 2,
        }
    }
}

/// All roots of `p`, with multiplicity, at the precision of its coefficients.
pub fn roots(p: &Poly<BigComplex>) -> Result<Vec<BigComplex>, PolyError> {
    roots_with(p, RootOptions::default())
}

pub fn roots_with(p: &Poly<BigComplex>, opts: RootOptions) -> Result<Vec<BigComplex>, PolyError> {
    let n = match p.degree() {
        Degree::Finite(d) if d >= 1 => d,
        _ => return Err(PolyError::DegreeTooSmall),
    };
    let bits = p.coeffs()[n].bits();

    // Exact zero roots come off first; Aberth converges only linearly on them.
    let zeros = p.coeffs().iter().take_while(|c| c.is_zero()).count();
    let mut out: Vec<BigComplex> = (0..zeros).map(|_| BigComplex::zero(Bits(bits))).collect();
    let reduced = Poly::new(p.coeffs()[zeros..].to_vec());
    let lead = reduced.leading().expect("nonzero").clone();
    let monic = reduced.map(|c| c.clone() / &lead);
    let m = n - zeros;
    if m == 0 {
        return Ok(out);
    }
    if m == 1 {
        out.push(-monic.coeffs()[0].clone());
        return Ok(out);
    }

    let mut guesses = initial_guesses(&monic, m, bits);
    let mut used = 0;
    if bits > WARMUP_BITS {
        let coarse = monic.to_big(WARMUP_BITS);
        let mut zs: Vec<BigComplex> = guesses.iter().map(|z| z.with_bits(WARMUP_BITS)).collect();
        used = aberth(&coarse, &mut zs, opts.max_iterations, 0)?;
        guesses = zs.iter().map(|z| z.with_bits(bits)).collect();
    }
    aberth(&monic, &mut guesses, opts.max_iterations.saturating_sub(used).max(8), opts.polish_sweeps)?;
    out.extend(guesses);
    Ok(out)
}

/// Points on a circle around the root centroid, radius the geometric mean
/// of the root distances from it, with a fixed angular offset.
fn initial_guesses(monic: &Poly<BigComplex>, m: usize, bits: u32) -> Vec<BigComplex> {
    let c = monic.coeffs();
    let center = -(c[m - 1].clone() / &BigComplex::from_i64(m as i64, c[0].ctx()));
    let at_center = monic.eval(&center).abs_f64();
    let mut radius = at_center.powf(1.0 / m as f64);
    if !radius.is_finite() || radius == 0.0 {
        radius = 1.0;
    }
    let (cre, cim) = center.to_f64_parts();
    (0..m)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            BigComplex::from_f64(bits, cre + radius * angle.cos(), cim + radius * angle.sin())
        })
        .collect()
}

/// Gauss–Seidel Aberth sweeps until every root meets the stopping rule, then
/// `polish` more. Returns the number of sweeps used.
fn aberth(
    p: &Poly<BigComplex>,
    zs: &mut [BigComplex],
    max_iterations: usize,
    polish: usize,
) -> Result<usize, PolyError> {
    let bits = p.coeffs()[0].bits();
    let ctx = p.coeffs()[0].ctx();
    let abs_coeffs: Vec<f64> = p.coeffs().iter().map(|c| c.abs_f64()).collect();
    // |p(z)|/|p'(z)| relative to |z|, and the rounding-noise floor of |p(z)|.
    let step_tol = 2f64.powi(-(bits as i32) / 2);
    let noise_tol = 2f64.powi(-(bits as i32) + 12) * abs_coeffs.len() as f64;
    let one = BigComplex::one(ctx);

    let mut done = vec![false; zs.len()];
    let mut extra = 0;
    for iter in 1..=max_iterations {
        let all_done_before = done.iter().all(|&d| d);
        for i in 0..zs.len() {
            if done[i] && !all_done_before {
                continue;
            }
            let (pv, dv) = p.eval_with_derivative(&zs[i]);
            if pv.is_zero() {
                done[i] = true;
                continue;
            }
            let zabs = zs[i].abs_f64();
            let scale: f64 = abs_coeffs
                .iter()
                .rev()
                .fold(0.0, |acc, a| acc * zabs + a);
            let newton = pv.clone() / &dv;
            let mut sum = BigComplex::zero(ctx);
            for (j, zj) in zs.iter().enumerate() {
                if j != i {
                    sum += &(zs[i].clone() - zj).recip();
                }
            }
            let denom = one.clone() - &(newton.clone() * &sum);
            let step = newton.clone() / &denom;
            if !step.is_finite() {
                continue;
            }
            let small_step = step.abs_f64() <= step_tol * zabs.max(1.0);
            let at_noise = pv.abs_f64() <= noise_tol * scale;
            zs[i] -= &step;
            if small_step || at_noise {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            if all_done_before {
                extra += 1;
            }
            if extra >= polish {
                return Ok(iter);
            }
        }
    }
    Err(PolyError::NonConvergence {
        iterations: max_iterations,
    })
}

/// Largest `|p(r)| / sum |a_k| |r|^k` over the given roots (backward error).
pub fn backward_error(p: &Poly<BigComplex>, roots: &[BigComplex]) -> Float {
    let bits = p.coeffs().first().map(|c| c.bits()).unwrap_or(64);
    let mut worst = Float::new(bits);
    for r in roots {
        let v = p.eval(r).abs();
        let ra = r.abs();
        let mut scale = Float::new(bits);
        for c in p.coeffs().iter().rev() {
            scale = scale * &ra + c.abs();
        }
        if !scale.is_zero() {
            let e = v / scale;
            if e > worst {
                worst = e;
            }
        }
    }
    worst
}
