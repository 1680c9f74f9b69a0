//! Branches of `rho_M^{-1/M}` outside the hull of the zeros of `rho_M`,
//! the primitives `Phi0`, `Phi1` normalized at infinity, and the
//! strong-asymptotics predictor `exp(n Phi0 - kappa Phi0 + Phi1)`.
//!
//! The cut is the leftward horizontal ray from the leftmost hull vertex `v`.
//! Values on the cut are limits from above.

pub mod hull;
pub mod path;
pub mod quad;

use rug::Float;

use crate::error::BranchError;
use crate::operator::ExactlySolvableOperator;
use crate::poly::Poly;
use crate::roots::roots;
use crate::scalar::{binomial, BigComplex, Bits, Scalar};

pub use hull::{Hull, Pt};
pub use path::{Geometry, PathPlan, ResolvedPath};
use path::to_pt;
pub use quad::{GaussLegendre, Integral, PathIntegrand, QuadSettings};

/// Ratio required between the second-nearest and nearest candidate root
/// before a continuation step is accepted.
const AMBIGUITY_FACTOR: f64 = 3.0;

/// Evaluation context for one operator at one precision.
#[derive(Clone, Debug)]
pub struct BranchContext {
    bits: u32,
    m: usize,
    rho_m: Poly<BigComplex>,
    rho_m_prime: Poly<BigComplex>,
    rho_m1: Poly<BigComplex>,
    kappa: BigComplex,
    roots: Vec<BigComplex>,
    geometry: Geometry,
    quad: QuadSettings,
    rule: GaussLegendre,
    /// `exp(2 pi i k / M)` for `k = 0..M`.
    unit_roots: Vec<BigComplex>,
}

/// Branch-tracking state: the last point reached and the value of `w_1` there.
#[derive(Clone, Debug)]
pub struct Tracker {
    t: BigComplex,
    w: BigComplex,
}

impl Tracker {
    pub fn point(&self) -> &BigComplex {
        &self.t
    }

    pub fn value(&self) -> &BigComplex {
        &self.w
    }
}

/// `Phi0(z)` and `Phi1(z)` at one point, ready to produce the predictor for
/// any degree.
#[derive(Clone, Debug)]
pub struct Predictor {
    pub phi0: Integral,
    pub phi1: Integral,
    pub kappa: BigComplex,
}

impl Predictor {
    /// `exp((n - kappa) Phi0 + Phi1)`.
    pub fn at(&self, n: usize) -> BigComplex {
        let bits = self.phi0.value.bits();
        let nk = BigComplex::from_i64(n as i64, Bits(bits)) - &self.kappa;
        (nk * &self.phi0.value + &self.phi1.value).exp()
    }
}

/// Cluster of nearly equal roots, replaced by their mean.
fn cluster(roots: &[BigComplex], tol: f64) -> Vec<BigComplex> {
    let mut groups: Vec<Vec<&BigComplex>> = Vec::new();
    for r in roots {
        match groups.iter_mut().find(|g| g[0].dist_f64(r) <= tol) {
            Some(g) => g.push(r),
            None => groups.push(vec![r]),
        }
    }
    groups
        .into_iter()
        .map(|g| {
            let ctx = g[0].ctx();
            let sum = g.iter().fold(BigComplex::zero(ctx), |acc, r| acc + *r);
            sum / &BigComplex::from_i64(g.len() as i64, ctx)
        })
        .collect()
}

/// Round to `f64` and clear parts that are below `tol` in size.
fn snap(z: &BigComplex, tol: f64) -> Pt {
    let (x, y) = z.to_f64_parts();
    Pt::new(if x.abs() <= tol { 0.0 } else { x }, if y.abs() <= tol { 0.0 } else { y })
}

impl BranchContext {
    /// Roots of `rho_M`, their hull, the cut and the quadrature rule, at
    /// `bits` of precision.
    pub fn new<S: Scalar>(op: &ExactlySolvableOperator<S>, bits: u32) -> Result<Self, BranchError> {
        let big = op.to_big(bits);
        let m = big.order();
        let rho_m = big.rho(m).clone();
        let raw = roots(&rho_m)?;
        let scale = 1.0 + raw.iter().map(|r| r.abs_f64()).fold(0.0, f64::max);
        let cluster_tol = 2f64.powi(-(bits as i32) / 8).max(1e-12) * scale;
        let clustered = cluster(&raw, cluster_tol);
        let pts: Vec<Pt> = clustered.iter().map(|r| snap(r, cluster_tol)).collect();
        let hull = Hull::from_points(&pts, 1e-12 * scale);
        let v = hull.leftmost();
        let geometry = Geometry {
            hull,
            hull_tol: 1e-9 * scale,
            vertex: BigComplex::from_f64(bits, v.x, v.y),
            vertex_pt: v,
            anchor_radius: 10.0 * scale,
        };
        let quad = QuadSettings::for_bits(bits);
        let rule = GaussLegendre::new(quad.nodes, bits);
        let kappa = op.kappa().to_big(bits);
        Ok(BranchContext {
            bits,
            m,
            rho_m_prime: rho_m.derivative(1),
            rho_m1: big.rho(m - 1).clone(),
            rho_m,
            kappa,
            roots: raw,
            geometry,
            quad,
            rule,
            unit_roots: (0..m as i64).map(|k| BigComplex::unit_root(bits, k, m as u32)).collect(),
        })
    }

    /// Replace the quadrature settings.
    pub fn with_quadrature(mut self, quad: QuadSettings) -> Self {
        if quad.nodes != self.quad.nodes {
            self.rule = GaussLegendre::new(quad.nodes, self.bits);
        }
        self.quad = quad;
        self
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn kappa(&self) -> &BigComplex {
        &self.kappa
    }

    /// Roots of `rho_M` with multiplicity.
    pub fn rho_m_roots(&self) -> &[BigComplex] {
        &self.roots
    }

    pub fn hull(&self) -> &Hull {
        &self.geometry.hull
    }

    /// The vertex `v` where the cut starts; the cut is `v - [0, inf)`.
    pub fn cut_vertex(&self) -> Pt {
        self.geometry.vertex_pt
    }

    pub fn anchor_radius(&self) -> f64 {
        self.geometry.anchor_radius
    }

    pub fn quadrature(&self) -> &QuadSettings {
        &self.quad
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn point(&self, re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(self.bits, re, im)
    }

    /// Distance from `z` to the hull of the zeros of `rho_M`.
    pub fn hull_distance(&self, z: &BigComplex) -> f64 {
        self.geometry.hull.distance(to_pt(z))
    }

    pub fn check_outside(&self, z: &BigComplex) -> Result<(), BranchError> {
        if self.hull_distance(z) <= self.geometry.hull_tol {
            let (re, im) = z.to_f64_parts();
            return Err(BranchError::InsideHull { re, im });
        }
        Ok(())
    }

    fn z_at_bits(&self, z: &BigComplex) -> BigComplex {
        if z.bits() == self.bits {
            z.clone()
        } else {
            z.with_bits(self.bits)
        }
    }

    /// The `M`-th root of `1/rho_M(t)` nearest `reference`, with the
    /// distances to the nearest and second-nearest candidates.
    fn nearest_root(&self, t: &BigComplex, reference: &BigComplex) -> (BigComplex, f64, f64) {
        let base = self.rho_m.eval(t).recip().root_principal(self.m as u32);
        let m = self.m as i64;
        let ratio = reference.clone() / &base;
        let (x, y) = ratio.to_f64_parts();
        let k = ((y.atan2(x) * m as f64 / std::f64::consts::TAU).round() as i64).rem_euclid(m);
        let best = base.clone() * &self.unit_roots[k as usize];
        let d1 = best.dist_f64(reference);
        let d2 = [k - 1, k + 1]
            .iter()
            .map(|j| (base.clone() * &self.unit_roots[j.rem_euclid(m) as usize]).dist_f64(reference))
            .fold(f64::INFINITY, f64::min);
        (best, d1, d2)
    }

    fn in_far_zone(&self, t: &BigComplex) -> bool {
        (t.clone() - &self.geometry.vertex).abs_f64() >= self.geometry.anchor_radius * (1.0 - 1e-12)
    }

    /// `w_1` in the far zone: the root nearest `1/(t - v)`.
    fn far_branch(&self, t: &BigComplex) -> BigComplex {
        let reference = (t.clone() - &self.geometry.vertex).recip();
        self.nearest_root(t, &reference).0
    }

    /// A tracker at a far-zone point.
    pub fn start_tracker(&self, t: &BigComplex) -> Tracker {
        Tracker {
            t: t.clone(),
            w: self.far_branch(t),
        }
    }

    /// Continue `w_1` from the tracker's point to `target` along a straight
    /// line, subdividing until each step is unambiguous.
    pub fn advance(&self, tr: &mut Tracker, target: &BigComplex) -> Result<(), BranchError> {
        if self.in_far_zone(target) {
            tr.w = self.far_branch(target);
            tr.t = target.clone();
            return Ok(());
        }
        let min_step = self.geometry.anchor_radius * 2f64.powi(-60);
        let spacing = 2.0 * (std::f64::consts::PI / self.m as f64).sin();
        while tr.t != *target {
            let remaining = target.clone() - &tr.t;
            let rem = remaining.abs_f64();
            // Stay within half the distance to the nearest possible singularity.
            let reach = 0.5 * self.hull_distance(&tr.t);
            let mut frac = if rem <= reach { 1.0 } else { reach / rem };
            loop {
                let next = if frac >= 1.0 {
                    target.clone()
                } else {
                    tr.t.clone() + &remaining.mul_real(&Float::with_val(self.bits, frac))
                };
                let (cand, d1, d2) = self.nearest_root(&next, &tr.w);
                if d2 >= AMBIGUITY_FACTOR * d1 && d1 <= 0.25 * spacing * cand.abs_f64() {
                    tr.t = next;
                    tr.w = cand;
                    break;
                }
                frac /= 2.0;
                if frac * rem < min_step {
                    let (re, im) = next.to_f64_parts();
                    return Err(BranchError::BranchAmbiguity { re, im });
                }
            }
        }
        Ok(())
    }

    fn check_branch_index(&self, j: usize) -> Result<(), BranchError> {
        if j == 0 || j > self.m {
            return Err(BranchError::BranchIndex { j, m: self.m });
        }
        Ok(())
    }

    /// `w_j(z) = e^{2 pi i (j-1)/M} w_1(z)` along the default plan.
    pub fn w(&self, j: usize, z: &BigComplex) -> Result<BigComplex, BranchError> {
        self.w_along(j, z, &PathPlan::Radial)
    }

    /// `w_j(z)` continued along `plan`.
    pub fn w_along(&self, j: usize, z: &BigComplex, plan: &PathPlan) -> Result<BigComplex, BranchError> {
        self.check_branch_index(j)?;
        let z = self.z_at_bits(z);
        self.check_outside(&z)?;
        let path = self.geometry.resolve(plan, &z)?;
        let mut tr = self.start_tracker(path.anchor());
        for p in &path.points[1..] {
            self.advance(&mut tr, p)?;
        }
        Ok(tr.w * &self.unit_roots[j - 1])
    }

    /// `b_1(z) = (M-1) rho_M'/(2M rho_M) - rho_{M-1}/(M rho_M)`.
    pub fn b1(&self, z: &BigComplex) -> Result<BigComplex, BranchError> {
        let z = self.z_at_bits(z);
        let rm = self.rho_m.eval(&z);
        let za = z.abs_f64();
        let scale: f64 = self.rho_m.coeffs().iter().rev().fold(0.0, |a, c| a * za + c.abs_f64());
        if rm.is_zero() || rm.abs_f64() <= 2f64.powi(-(self.bits as i32) + 8) * scale {
            let (re, im) = z.to_f64_parts();
            return Err(BranchError::PoleOfCoefficient { re, im });
        }
        Ok(self.b1_unchecked(&z, &rm))
    }

    fn b1_unchecked(&self, z: &BigComplex, rm: &BigComplex) -> BigComplex {
        let ctx = Bits(self.bits);
        let m = self.m as i64;
        let a = self.rho_m_prime.eval(z) * &BigComplex::from_i64(m - 1, ctx)
            / &BigComplex::from_i64(2 * m, ctx);
        let b = self.rho_m1.eval(z) / &BigComplex::from_i64(m, ctx);
        (a - &b) / rm
    }

    /// `Phi0(z)` along the default plan.
    pub fn phi0(&self, z: &BigComplex) -> Result<Integral, BranchError> {
        self.phi0_along(z, &PathPlan::Radial)
    }

    /// `Phi0(z) = Log(a - v) + int_inf^a (w_1 - 1/(t-v)) dt + int_a^z w_1 dt`
    /// with `a` the anchor of `plan`.
    pub fn phi0_along(&self, z: &BigComplex, plan: &PathPlan) -> Result<Integral, BranchError> {
        let z = self.z_at_bits(z);
        self.check_outside(&z)?;
        let path = self.geometry.resolve(plan, &z)?;
        let a = path.anchor().clone();
        let d = a.clone() - &self.geometry.vertex;
        let tail = self.tail_integral(&TailW1 { ctx: self, d: d.clone() })?;
        let mut value = d.ln() + &tail.value;
        let mut error = tail.error;
        let mut tr = self.start_tracker(&a);
        for pair in path.points.windows(2) {
            let (seg, next) =
                quad::integrate_segment(&W1 { ctx: self }, &pair[0], &pair[1], tr, &self.rule, &self.quad)?;
            value += &seg.value;
            error += seg.error;
            tr = next;
        }
        Ok(Integral { value, error })
    }

    /// `Phi1(z)` along the default plan.
    pub fn phi1(&self, z: &BigComplex) -> Result<Integral, BranchError> {
        self.phi1_along(z, &PathPlan::Radial)
    }

    /// `Phi1(z) = kappa Log(a - v) + int_inf^a (b_1 - kappa/(t-v)) dt + int_a^z b_1 dt`.
    pub fn phi1_along(&self, z: &BigComplex, plan: &PathPlan) -> Result<Integral, BranchError> {
        let z = self.z_at_bits(z);
        self.check_outside(&z)?;
        let path = self.geometry.resolve(plan, &z)?;
        let a = path.anchor().clone();
        let d = a.clone() - &self.geometry.vertex;
        let tail = self.tail_integral(&TailB1 { ctx: self, d: d.clone() })?;
        let mut value = d.ln() * &self.kappa + &tail.value;
        let mut error = tail.error;
        for pair in path.points.windows(2) {
            let (seg, _) = quad::integrate_segment(&B1 { ctx: self }, &pair[0], &pair[1], (), &self.rule, &self.quad)?;
            value += &seg.value;
            error += seg.error;
        }
        Ok(Integral { value, error })
    }

    /// `int_inf^a g(t) dt` through `t = v + (a - v)/u`, `u` in `(0, 1]`.
    fn tail_integral<G: PathIntegrand<State = ()>>(&self, g: &G) -> Result<Integral, BranchError> {
        let zero = BigComplex::zero(Bits(self.bits));
        let one = BigComplex::one(Bits(self.bits));
        let (res, _) = quad::integrate_segment(g, &zero, &one, (), &self.rule, &self.quad)?;
        Ok(res)
    }

    /// `Phi0` and `Phi1` at `z` along the default plan.
    pub fn predictor_at(&self, z: &BigComplex) -> Result<Predictor, BranchError> {
        self.predictor_along(z, &PathPlan::Radial)
    }

    pub fn predictor_along(&self, z: &BigComplex, plan: &PathPlan) -> Result<Predictor, BranchError> {
        Ok(Predictor {
            phi0: self.phi0_along(z, plan)?,
            phi1: self.phi1_along(z, plan)?,
            kappa: self.kappa.clone(),
        })
    }

    /// `exp(n Phi0(z) - kappa Phi0(z) + Phi1(z))`.
    pub fn predictor(&self, n: usize, z: &BigComplex) -> Result<BigComplex, BranchError> {
        Ok(self.predictor_at(z)?.at(n))
    }

    fn companion_w(&self, j: usize, z: &BigComplex) -> Result<BigComplex, BranchError> {
        let w = self.w(j, z)?;
        if self.m < 3 {
            let (re, im) = (w.clone() * &BigComplex::from_i64(-2, Bits(self.bits))).to_f64_parts();
            return Err(BranchError::OrderTooSmall { re, im });
        }
        Ok(w)
    }

    /// The `(M-1) x (M-1)` companion matrix with ones on the superdiagonal
    /// and last row `(-C(M,1) w_j^{M-1}, ..., -C(M,M-1) w_j)`.
    ///
    /// For `M = 2` the error carries the `1 x 1` analogue `-2 w_j`.
    pub fn companion_a0(&self, j: usize, z: &BigComplex) -> Result<Vec<Vec<BigComplex>>, BranchError> {
        let w = self.companion_w(j, z)?;
        let ctx = Bits(self.bits);
        let n = self.m - 1;
        let mut a = vec![vec![BigComplex::zero(ctx); n]; n];
        for (i, row) in a.iter_mut().enumerate().take(n - 1) {
            row[i + 1] = BigComplex::one(ctx);
        }
        for (c, entry) in a[n - 1].iter_mut().enumerate() {
            let k = c + 1;
            let coef = BigComplex::from_integer(&binomial(self.m as u32, k as u32), ctx);
            *entry = -(coef * &w.powi((self.m - k) as i32));
        }
        Ok(a)
    }

    /// `(omega_k - 1) w_j(z)` for `k = 1..M-1`, `omega_k = e^{2 pi i k/M}`.
    pub fn companion_spectrum(&self, j: usize, z: &BigComplex) -> Result<Vec<BigComplex>, BranchError> {
        let w = self.w(j, z)?;
        let one = BigComplex::one(Bits(self.bits));
        Ok((1..self.m)
            .map(|k| (self.unit_roots[k].clone() - &one) * &w)
            .collect())
    }
}

/// `w_1` along a segment, carrying the branch.
struct W1<'a> {
    ctx: &'a BranchContext,
}

impl PathIntegrand for W1<'_> {
    type State = Tracker;
    fn eval(&self, state: &mut Tracker, t: &BigComplex) -> Result<BigComplex, BranchError> {
        self.ctx.advance(state, t)?;
        Ok(state.w.clone())
    }
}

/// `b_1` along a segment.
struct B1<'a> {
    ctx: &'a BranchContext,
}

impl PathIntegrand for B1<'_> {
    type State = ();
    fn eval(&self, _: &mut (), t: &BigComplex) -> Result<BigComplex, BranchError> {
        let rm = self.ctx.rho_m.eval(t);
        Ok(self.ctx.b1_unchecked(t, &rm))
    }
}

/// Tail integrands in `u`, with `t = v + d/u` and `d = a - v`:
/// `(g(t) - c/(t - v)) dt/du`, where `dt/du = -d/u^2`.
struct TailW1<'a> {
    ctx: &'a BranchContext,
    d: BigComplex,
}

struct TailB1<'a> {
    ctx: &'a BranchContext,
    d: BigComplex,
}

fn tail_jacobian(d: &BigComplex, u: &BigComplex) -> (BigComplex, BigComplex) {
    let inv = u.clone() / d;
    let jac = -(d.clone() / &(u.clone() * u));
    (inv, jac)
}

impl PathIntegrand for TailW1<'_> {
    type State = ();
    fn eval(&self, _: &mut (), u: &BigComplex) -> Result<BigComplex, BranchError> {
        let t = self.ctx.geometry.vertex.clone() + &(self.d.clone() / u);
        let (inv, jac) = tail_jacobian(&self.d, u);
        Ok((self.ctx.far_branch(&t) - &inv) * &jac)
    }
}

impl PathIntegrand for TailB1<'_> {
    type State = ();
    fn eval(&self, _: &mut (), u: &BigComplex) -> Result<BigComplex, BranchError> {
        let t = self.ctx.geometry.vertex.clone() + &(self.d.clone() / u);
        let (inv, jac) = tail_jacobian(&self.d, u);
        let rm = self.ctx.rho_m.eval(&t);
        Ok((self.ctx.b1_unchecked(&t, &rm) - &(inv * &self.ctx.kappa)) * &jac)
    }
}
