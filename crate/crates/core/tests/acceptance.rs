//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles here are computed independently of the library paths
//! they check wherever that is possible.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

use eigenwkb::harness::{build_masson_shapiro, jacobi4, legendre2, run_zero_map, Scenario, ScenarioKind};
use eigenwkb::series::{gamma_coeffs, n_reconstruct_residual, SeriesTables};
use eigenwkb::{
    bell_complete, bell_partial, potential, BellArgs, BigComplex, Bits, BranchContext, ExactlySolvableOperator,
    Poly, QComplex, Scalar,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, t: Instant) -> Result<(), String> {
    let e = t.elapsed();
    ensure(e < limit, || format!("took {e:.2?}, limit {limit:?}"))
}

fn q(n: i64, d: i64) -> QComplex {
    QComplex::real(Rational::from((n, d)))
}

fn big(bits: u32, re: f64, im: f64) -> BigComplex {
    BigComplex::from_f64(bits, re, im)
}

fn rel(a: &BigComplex, b: &BigComplex) -> f64 {
    a.dist_f64(b) / b.abs_f64()
}

/// `phi = z + sqrt(z^2 - 1)` on the branch `|phi| > 1`.
fn joukowski_phi(z: &BigComplex) -> BigComplex {
    let one = BigComplex::one(Bits(z.bits()));
    let s = (z.clone() * z - &one).sqrt();
    let phi = z.clone() + &s;
    if phi.abs_f64() >= 1.0 {
        phi
    } else {
        z.clone() - &s
    }
}

/// `sqrt(2) (phi/2)^n (z^2-1)^{1/4} phi^{-1/2}`, written as
/// `(phi/2)^n sqrt(1 - phi^{-2})` so that the principal root is the
/// analytic branch off `[-1, 1]`.
fn jacobi4_closed_form(n: usize, z: &BigComplex) -> BigComplex {
    let ctx = Bits(z.bits());
    let phi = joukowski_phi(z);
    let inv2 = (phi.clone() * &phi).recip();
    (phi / &BigComplex::from_i64(2, ctx)).powi(n as i32) * &(BigComplex::one(ctx) - &inv2).sqrt()
}

fn random_roots(rng: &mut ChaCha8Rng, m: usize, radius: i64) -> Vec<QComplex> {
    (0..m)
        .map(|_| {
            QComplex::new(
                Rational::from((rng.gen_range(-4 * radius..=4 * radius), 4)),
                Rational::from((rng.gen_range(-4 * radius..=4 * radius), 4)),
            )
        })
        .collect()
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize) -> Poly<QComplex> {
    Poly::new(
        (0..=deg)
            .map(|_| QComplex::new(Rational::from((rng.gen_range(-9..=9), rng.gen_range(1..=4))), Rational::from(rng.gen_range(-3..=3))))
            .collect(),
    )
}

/// Random non-degenerate operator of order `m` with `rho_M` having the given roots.
fn random_operator(rng: &mut ChaCha8Rng, m: usize, roots: &[QComplex]) -> ExactlySolvableOperator<QComplex> {
    let mut rho: Vec<Poly<QComplex>> = (0..m).map(|k| random_poly(rng, k)).collect();
    rho.push(Poly::from_roots(roots, ()));
    ExactlySolvableOperator::new(rho).expect("valid random operator")
}

fn random_far_point(rng: &mut ChaCha8Rng, bits: u32, r_min: f64, r_max: f64) -> BigComplex {
    let r = rng.gen_range(r_min..r_max);
    let t = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
    big(bits, r * t.cos(), r * t.sin())
}

fn c1_eigen_structure() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for c in [Rational::from(1), Rational::from((1, 2)), Rational::from(3)] {
        let op = jacobi4(&c);
        let tm = op.action_matrix(30);
        for n in 0..=30usize {
            let nn = Rational::from(n as i64);
            let expect = nn.clone() * (nn.clone() - 1u32) * (nn.clone() * &nn - &nn + Rational::from(4 * &c));
            ensure(op.eigenvalue(n) == QComplex::real(expect), || format!("c = {c}, n = {n}: eigenvalue"))?;
            match op.eigenpoly_with(n, &tm) {
                Ok(pair) => {
                    let lhs = op.apply(&pair.q);
                    let rhs = pair.q.scale(&pair.lambda);
                    ensure(lhs == rhs, || format!("c = {c}, n = {n}: L Q != lambda Q"))?;
                    ensure(pair.q.is_monic(), || format!("c = {c}, n = {n}: not monic"))?;
                    checked += 1;
                }
                // lambda_1 = lambda_0 = 0 for every c
                Err(eigenwkb::error::OperatorError::Resonance { n: 1, j: 0 }) => {}
                Err(e) => return Err(format!("c = {c}, n = {n}: {e}")),
            }
        }
    }
    within(Duration::from_secs(10), t)?;
    Ok(format!("{checked} eigenpairs exact, n = 1 resonant with n = 0, {:.2?}", t.elapsed()))
}

fn c2_legendre_oracle() -> Outcome {
    let t = Instant::now();
    let op = legendre2();
    let tm = op.action_matrix(25);
    let z = Poly::<QComplex>::from_ints(&[0, 1]);
    let mut prev = Poly::<QComplex>::from_ints(&[1]);
    let mut cur = z.clone();
    for n in 0..=25usize {
        let expect = match n {
            0 => prev.clone(),
            1 => cur.clone(),
            _ => {
                let k = (n - 1) as i64;
                let next = &(&z * &cur) - &prev.scale(&q(k * k, 4 * k * k - 1));
                prev = cur;
                cur = next;
                cur.clone()
            }
        };
        let got = op.eigenpoly_with(n, &tm).map_err(|e| e.to_string())?.q;
        ensure(got == expect, || format!("n = {n} differs from the recurrence"))?;
    }
    within(Duration::from_secs(5), t)?;
    Ok(format!("Q_0..Q_25 equal the monic Legendre recurrence, {:.2?}", t.elapsed()))
}

fn c3_ratio() -> Outcome {
    let t = Instant::now();
    let bits = 512;
    let op = jacobi4(&Rational::from(1));
    let tm = op.action_matrix(101);
    let z = big(bits, 2.0, 0.0);
    let three = BigComplex::from_i64(3, Bits(bits));
    let limit = (BigComplex::from_i64(2, Bits(bits)) + &three.sqrt()) / &BigComplex::from_i64(2, Bits(bits));
    let mut errs = Vec::new();
    for n in [25usize, 50, 100] {
        let qn = op.eigenpoly_with(n, &tm).map_err(|e| e.to_string())?.q.to_big(bits).eval(&z);
        let qn1 = op.eigenpoly_with(n + 1, &tm).map_err(|e| e.to_string())?.q.to_big(bits).eval(&z);
        errs.push((qn1 / &qn).dist_f64(&limit));
    }
    ensure(errs[1] <= 2.0 * errs[0] && errs[2] <= 2.0 * errs[1], || format!("not decreasing: {errs:?}"))?;
    ensure(errs[2] <= 1e-3, || format!("error at n = 100 is {:e}", errs[2]))?;
    within(Duration::from_secs(120), t)?;
    Ok(format!("errors {:.3e} {:.3e} {:.3e}, {:.2?}", errs[0], errs[1], errs[2], t.elapsed()))
}

fn c4_strong() -> Outcome {
    let bits = 512;
    let op = jacobi4(&Rational::from(1));
    let tm = op.action_matrix(100);
    let q50 = op.eigenpoly_with(50, &tm).map_err(|e| e.to_string())?.q.to_big(bits);
    let q100 = op.eigenpoly_with(100, &tm).map_err(|e| e.to_string())?.q.to_big(bits);
    let mut out = Vec::new();
    for (re, im) in [(2.0, 0.0), (1.0, 1.0), (-3.0, 0.5)] {
        let z = big(bits, re, im);
        let r50 = rel(&q50.eval(&z), &jacobi4_closed_form(50, &z));
        let r100 = rel(&q100.eval(&z), &jacobi4_closed_form(100, &z));
        ensure(r100 <= 0.1, || format!("z = {re}+{im}i: rel(100) = {r100:e}"))?;
        ensure(r100 / r50 <= 0.7, || format!("z = {re}+{im}i: rel(100)/rel(50) = {}", r100 / r50))?;
        out.push(format!("{re}+{im}i: {r100:.2e} (x{:.2})", r100 / r50));
    }
    Ok(out.join(", "))
}

fn c5_masson_shapiro() -> Outcome {
    let bits = 512;
    let p = Poly::<QComplex>::from_ints(&[0, -1, 0, 1]);
    let op = build_masson_shapiro(&p).map_err(|e| e.to_string())?;
    let ctx = BranchContext::new(&op, bits).map_err(|e| e.to_string())?;
    let qn = op.eigenpoly(60).map_err(|e| e.to_string())?.q.to_big(bits);
    let mut out = Vec::new();
    for x in [2.0, 3.0] {
        let z = big(bits, x, 0.0);
        let phi0 = ctx.phi0(&z).map_err(|e| e.to_string())?.value;
        let n = BigComplex::from_i64(60, Bits(bits));
        let lhs = qn.eval(&z) / &(phi0.clone() * &n).exp();
        let cube_root = p.to_big(bits).eval(&z).root_principal(3);
        let rhs = (phi0.exp() / &cube_root).powi(2);
        let e = rel(&lhs, &rhs);
        ensure(e <= 0.05, || format!("z = {x}: relative error {e:e}"))?;
        out.push(format!("z = {x}: {e:.3e}"));
    }
    Ok(out.join(", "))
}

fn c6_predictor() -> Outcome {
    let bits = 512;
    let ctx = BranchContext::new(&jacobi4(&Rational::from(1)), bits).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (re, im) in [(2.0, 0.0), (1.0, 1.0), (-3.0, 0.5)] {
        let z = big(bits, re, im);
        let pred = ctx.predictor_at(&z).map_err(|e| e.to_string())?;
        for n in [1usize, 10, 50] {
            let e = rel(&pred.at(n), &jacobi4_closed_form(n, &z));
            ensure(e <= 1e-10, || format!("z = {re}+{im}i, n = {n}: {e:e}"))?;
            worst = worst.max(e);
        }
    }
    Ok(format!("worst relative error {worst:.3e}"))
}

fn c7_companion() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let bits = 128;
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for m in 3..=6usize {
        let roots = random_roots(&mut rng, m, 2);
        let op = random_operator(&mut rng, m, &roots);
        let ctx = BranchContext::new(&op, bits).map_err(|e| e.to_string())?;
        for _ in 0..20 {
            let z = random_far_point(&mut rng, bits, 4.0, 8.0);
            let a = ctx.companion_a0(1, &z).map_err(|e| e.to_string())?;
            let size = a.len();
            let mat = DMatrix::from_fn(size, size, |i, j| {
                let (re, im) = a[i][j].to_f64_parts();
                Complex::new(re, im)
            });
            let eig = mat.schur().eigenvalues().ok_or("no eigenvalues")?;
            let (wr, wi) = ctx.w(1, &z).map_err(|e| e.to_string())?.to_f64_parts();
            let w = Complex::new(wr, wi);
            let mut used = vec![false; size];
            for k in 1..m {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                let expect = (Complex::new(ang.cos(), ang.sin()) - 1.0) * w;
                let (idx, d) = eig
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !used[*i])
                    .map(|(i, e)| (i, (e - expect).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .ok_or("too few eigenvalues")?;
                used[idx] = true;
                ensure(d <= 1e-10, || format!("M = {m}: eigenvalue off by {d:e}"))?;
                worst = worst.max(d);
            }
            count += 1;
        }
    }
    Ok(format!("{count} matrices, worst mismatch {worst:.2e}"))
}

fn c8_b1_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let bits = 256;
    let ctx_b = Bits(bits);
    let tol = 2f64.powi(-128);
    let mut worst: f64 = 0.0;
    let ops: Vec<_> = (2..=5usize)
        .map(|m| {
            let roots = random_roots(&mut rng, m, 2);
            random_operator(&mut rng, m, &roots)
        })
        .collect();
    for i in 0..20 {
        let op = &ops[i % ops.len()];
        let m = op.order();
        let ctx = BranchContext::new(op, bits).map_err(|e| e.to_string())?;
        let z = random_far_point(&mut rng, bits, 4.0, 8.0);
        let w = ctx.w(1, &z).map_err(|e| e.to_string())?;
        let b1 = ctx.b1(&z).map_err(|e| e.to_string())?;
        let rm = op.rho(m).to_big(bits);
        let (rmz, rmp) = rm.eval_with_derivative(&z);
        let rm1 = op.rho(m - 1).to_big(bits).eval(&z);
        let mm = BigComplex::from_i64(m as i64, ctx_b);
        let wp = -(w.clone() * &rmp) / &(mm.clone() * &rmz);
        let args = BellArgs::new(vec![w.clone(), wp], ctx_b);
        let t1 = rm1 / &rmz * &bell_partial(m - 1, m - 1, &args).map_err(|e| e.to_string())?;
        let t2 = bell_partial(m, m - 1, &args).map_err(|e| e.to_string())?;
        let t3 = mm * &w.powi(m as i32 - 1) * &b1;
        let r = (t1 + &t2 + &t3).abs_f64();
        ensure(r <= tol, || format!("point {i}, M = {m}: residual {r:e}"))?;
        worst = worst.max(r);
    }
    Ok(format!("20 points, M = 2..5, worst residual {worst:.2e}"))
}

fn c9_series_order() -> Outcome {
    let bits = 256;
    let degrees = [64usize, 128, 256, 512, 1024];
    let mut lines = Vec::new();
    for (name, op) in [("legendre2", legendre2()), ("jacobi4", jacobi4(&Rational::from(1)))] {
        let tables = SeriesTables::build(&op, 6).map_err(|e| e.to_string())?;
        let mut worst_margin = f64::INFINITY;
        for p in 0..=5usize {
            for &n in &degrees {
                let r = n_reconstruct_residual(&op, n, p, &tables, bits).map_err(|e| e.to_string())?;
                let order = r.abs_f64().ln() / (1.0 / n as f64).ln();
                let margin = order - (p as f64 - 0.2);
                ensure(margin >= 0.0, || format!("{name}, p = {p}, n = {n}: order {order:.3}"))?;
                worst_margin = worst_margin.min(margin);
            }
        }
        lines.push(format!("{name} min margin {worst_margin:.3}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..10 {
        let m = rng.gen_range(2..=6usize);
        let roots = random_roots(&mut rng, m, 3);
        let op = random_operator(&mut rng, m, &roots);
        let g = gamma_coeffs(&op, 0).map_err(|e| e.to_string())?;
        ensure(g[0] == -op.kappa(), || format!("random operator {i}: gamma_0 != -kappa"))?;
    }
    lines.push("gamma_0 = -kappa for 10 random operators".into());
    Ok(lines.join(", "))
}

fn c10_cauchy() -> Outcome {
    let bits = 512;
    let ctx_b = Bits(bits);
    let op = jacobi4(&Rational::from(1));
    let ctx = BranchContext::new(&op, bits).map_err(|e| e.to_string())?;
    let qn = op.eigenpoly(100).map_err(|e| e.to_string())?.q;
    let (q0, q1, q2) = (qn.to_big(bits), qn.derivative(1).to_big(bits), qn.derivative(2).to_big(bits));
    let eps = op.epsilon(100, bits).map_err(|e| e.to_string())?;
    let (mut sup1, mut sup2): (f64, f64) = (0.0, 0.0);
    for (re, im) in [(2.0, 0.0), (1.0, 1.0), (-2.0, 1.0)] {
        let z = big(bits, re, im);
        let w = ctx.w(1, &z).map_err(|e| e.to_string())?;
        let v0 = q0.eval(&z);
        let m1 = q1.eval(&z) / &v0 / &BigComplex::from_i64(100, ctx_b);
        let m2 = eps.powi(2) * &q2.eval(&z) / &v0;
        sup1 = sup1.max(m1.dist_f64(&w));
        sup2 = sup2.max(m2.dist_f64(&w.powi(2)));
    }
    ensure(sup1 <= 0.05, || format!("sup |Q'/(nQ) - w_1| = {sup1:e}"))?;
    ensure(sup2 <= 0.1, || format!("sup |eps^2 Q''/Q - w_1^2| = {sup2:e}"))?;
    Ok(format!("j = 1: {sup1:.3e}, j = 2: {sup2:.3e}"))
}

fn c11_zeros() -> Outcome {
    let t = Instant::now();
    let bits = 512;
    let sc = Scenario::new(
        "jacobi4(c=1)".into(),
        ScenarioKind::Jacobi4 { c: Rational::from(1) },
        jacobi4(&Rational::from(1)),
        vec![100],
        vec![],
        bits,
        8,
    )
    .map_err(|e| e.to_string())?;
    let zm = run_zero_map(&sc).map_err(|e| e.to_string())?;
    ensure(zm.zeros.len() == 100, || format!("{} zeros", zm.zeros.len()))?;
    // independent Hausdorff distance to [-1, 1]: exact one way, a fine
    // sampling of the segment the other way
    let pts: Vec<(f64, f64)> = zm.zeros.iter().map(|z| z.to_f64_parts()).collect();
    let out = pts
        .iter()
        .map(|&(x, y)| (x - x.clamp(-1.0, 1.0)).hypot(y))
        .fold(0.0, f64::max);
    let steps = 200_000;
    let h = 2.0 / steps as f64;
    let cover = (0..=steps)
        .map(|i| {
            let s = -1.0 + h * i as f64;
            pts.iter().map(|&(x, y)| (x - s).hypot(y)).fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
        + h / 2.0;
    let hd = out.max(cover);
    ensure(hd <= 0.05, || format!("Hausdorff distance {hd:e}"))?;
    let lib = zm.hausdorff.ok_or("no Hausdorff distance for a segment hull")?;
    ensure((lib - hd).abs() <= h, || format!("library Hausdorff {lib:e} vs oracle {hd:e}"))?;
    within(Duration::from_secs(180), t)?;
    Ok(format!("Hausdorff distance {hd:.4}, {:.2?}", t.elapsed()))
}

/// All set partitions of `0..n` as block-size lists, by restricted growth strings.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut a = vec![0usize; n];
    fn rec(i: usize, max: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == a.len() {
            let blocks = a.iter().copied().max().map_or(0, |m| m + 1);
            let mut sizes = vec![0usize; blocks];
            for &b in a.iter() {
                sizes[b] += 1;
            }
            out.push(sizes);
            return;
        }
        for b in 0..=max + 1 {
            if i == 0 && b > 0 {
                break;
            }
            a[i] = b;
            rec(i + 1, max.max(b), a, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(0, 0, &mut a, &mut out);
    out
}

fn factorial(n: usize) -> Integer {
    Integer::from(Integer::factorial(n as u32))
}

fn c12_combinatorics() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..3 {
        let xs: Vec<QComplex> = (0..8)
            .map(|_| QComplex::new(Rational::from((rng.gen_range(-7..=7), rng.gen_range(1..=3))), Rational::from(rng.gen_range(-2..=2))))
            .collect();
        let args = BellArgs::new(xs.clone(), ());
        for n in 0..=8usize {
            let parts = partitions(n);
            let mut total = QComplex::real(0);
            for k in 0..=n {
                let mut expect = QComplex::real(0);
                for p in parts.iter().filter(|p| p.len() == k) {
                    let mut term = QComplex::real(1);
                    for &s in p {
                        term *= &xs[s - 1];
                    }
                    expect += &term;
                }
                let got = bell_partial(n, k, &args).map_err(|e| e.to_string())?;
                ensure(got == expect, || format!("trial {trial}: B_{{{n},{k}}} mismatch"))?;
                total += &expect;
            }
            let y = bell_complete(n, &args).map_err(|e| e.to_string())?;
            ensure(y == total, || format!("trial {trial}: Y_{n} mismatch"))?;
        }
    }
    let rs = [
        Rational::from(-3),
        Rational::from(-2),
        Rational::from(-1),
        Rational::from(0),
        Rational::from(1),
        Rational::from(2),
        Rational::from(3),
        Rational::from((1, 2)),
        Rational::from((1, 3)),
        Rational::from((-1, 4)),
    ];
    let xs: Vec<QComplex> = (0..6)
        .map(|_| QComplex::new(Rational::from((rng.gen_range(-5..=5), rng.gen_range(1..=3))), Rational::from(rng.gen_range(-2..=2))))
        .collect();
    let args = BellArgs::new(xs.clone(), ());
    // a_k = x_k / k!, b = (1 + sum a_k t^k)^r by b_m = (1/m) sum ((r+1)k - m) a_k b_{m-k}
    let a: Vec<QComplex> = std::iter::once(QComplex::real(1))
        .chain((1..=6).map(|k| xs[k - 1].clone() / &QComplex::real(Rational::from(factorial(k)))))
        .collect();
    for r in &rs {
        let mut b = vec![QComplex::real(1)];
        for m in 1..=6usize {
            let mut acc = QComplex::real(0);
            for k in 1..=m {
                let coef = (r.clone() + 1u32) * Rational::from(k as i64) - Rational::from(m as i64);
                acc += &(QComplex::real(coef) * &a[k] * &b[m - k]);
            }
            b.push(acc / &QComplex::real(Rational::from(m as i64)));
        }
        for (n, bn) in b.iter().enumerate() {
            let expect = bn.clone() * &QComplex::real(Rational::from(factorial(n)));
            let got = potential(r, n, &args).map_err(|e| e.to_string())?;
            ensure(got == expect, || format!("P^({r})_{n} mismatch"))?;
        }
    }
    Ok("Bell polynomials match set partitions for n <= 8; potentials match series powers for n <= 6".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("eigen structure (exact)", c1_eigen_structure),
        ("Legendre oracle (exact)", c2_legendre_oracle),
        ("ratio asymptotics", c3_ratio),
        ("strong asymptotics", c4_strong),
        ("Masson-Shapiro form", c5_masson_shapiro),
        ("predictor vs closed form", c6_predictor),
        ("companion spectrum", c7_companion),
        ("b1 Bell identity", c8_b1_identity),
        ("series inversion order", c9_series_order),
        ("Cauchy transform", c10_cauchy),
        ("zero containment", c11_zeros),
        ("combinatorics oracle", c12_combinatorics),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{:.2?}]", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{:.2?}]", i + 1, t.elapsed());
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
