//! The individual experiments. Each evaluates exact eigenpolynomials by
//! Horner at the scenario precision and compares with a prediction.

use std::collections::BTreeMap;

use crate::branch::{BranchContext, Hull, Pt};
use crate::error::{Error, Result};
use crate::operator::EigenPair;
use crate::poly::Poly;
use crate::roots::roots;
use crate::scalar::{BigComplex, Bits, QComplex, Scalar};

use super::{ResultRow, Scenario};

fn eval_at(q: &Poly<QComplex>, z: &BigComplex) -> BigComplex {
    q.to_big(z.bits()).eval(z)
}

fn by_degree(pairs: Vec<EigenPair<QComplex>>) -> BTreeMap<usize, Poly<QComplex>> {
    pairs.into_iter().map(|p| (p.n, p.q)).collect()
}

fn grid_points(sc: &Scenario) -> Vec<BigComplex> {
    sc.z_grid.iter().map(|z| z.with_bits(sc.precision)).collect()
}

/// `Q_{n+1}(z)/Q_n(z)` against `e^{Phi0(z)}`.
pub fn run_ratio_test(sc: &Scenario) -> Result<Vec<ResultRow>> {
    let mut degrees: Vec<usize> = sc.n_grid.iter().flat_map(|&n| [n, n + 1]).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let qs = by_degree(sc.eigenpolys(&degrees)?);
    let ctx = BranchContext::new(&sc.op, sc.precision)?;
    let mut rows = Vec::new();
    for z in grid_points(sc) {
        let predicted = ctx.phi0(&z)?.value.exp();
        for &n in &sc.n_grid {
            let measured = eval_at(&qs[&(n + 1)], &z) / &eval_at(&qs[&n], &z);
            rows.push(ResultRow::new(&sc.name, n, &z, measured, predicted.clone()));
        }
    }
    Ok(rows)
}

/// `Q_n(z)` against `exp((n - kappa) Phi0 + Phi1)`.
pub fn run_strong_asym(sc: &Scenario) -> Result<Vec<ResultRow>> {
    let qs = by_degree(sc.eigenpolys(&sc.n_grid)?);
    let ctx = BranchContext::new(&sc.op, sc.precision)?;
    let mut rows = Vec::new();
    for z in grid_points(sc) {
        let pred = ctx.predictor_at(&z)?;
        for &n in &sc.n_grid {
            rows.push(ResultRow::new(&sc.name, n, &z, eval_at(&qs[&n], &z), pred.at(n)));
        }
    }
    Ok(rows)
}

/// Estimates `C_1(z) ~ n (Q_n/predictor - 1)`.
///
/// Each row's prediction is the estimate at the largest degree of the grid;
/// `aux["cauchy_diff"]` holds `|est(2n) - est(n)|` when `2n` is on the grid.
pub fn run_c1_extraction(sc: &Scenario) -> Result<Vec<ResultRow>> {
    let ladder = sc.n_grid.iter().any(|n| *n > 0 && sc.n_grid.contains(&(2 * n)));
    if !ladder {
        return Err(Error::Config(format!(
            "scenario {}: the C1 extraction needs n and 2n on the degree grid",
            sc.name
        )));
    }
    let qs = by_degree(sc.eigenpolys(&sc.n_grid)?);
    let ctx = BranchContext::new(&sc.op, sc.precision)?;
    let one = BigComplex::one(Bits(sc.precision));
    let mut rows = Vec::new();
    for z in grid_points(sc) {
        let pred = ctx.predictor_at(&z)?;
        let est: BTreeMap<usize, BigComplex> = sc
            .n_grid
            .iter()
            .map(|&n| {
                let ratio = eval_at(&qs[&n], &z) / &pred.at(n);
                let scale = BigComplex::from_i64(n as i64, Bits(sc.precision));
                (n, (ratio - &one) * &scale)
            })
            .collect();
        let last = est.values().next_back().expect("nonempty grid").clone();
        for (&n, e) in &est {
            let mut row = ResultRow::new(&sc.name, n, &z, e.clone(), last.clone());
            if let Some(e2) = est.get(&(2 * n)) {
                row.aux.insert("cauchy_diff".into(), format!("{:e}", e2.dist_f64(e)));
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// `Q_n'(z)/(n Q_n(z))` against `w_1(z)`, plus the rows
/// `epsilon_n^j Q_n^{(j)}/Q_n` against `w_1^j` for `j = 0..=3`, labelled
/// `<scenario>/j=<j>`.
pub fn run_cauchy_transform(sc: &Scenario) -> Result<Vec<ResultRow>> {
    let qs = by_degree(sc.eigenpolys(&sc.n_grid)?);
    let ctx = BranchContext::new(&sc.op, sc.precision)?;
    let bits = sc.precision;
    let mut rows = Vec::new();
    for z in grid_points(sc) {
        let w = ctx.w(1, &z)?;
        for &n in &sc.n_grid {
            let q = &qs[&n];
            let values: Vec<BigComplex> = (0..=3).map(|j| eval_at(&q.derivative(j), &z)).collect();
            if n > 0 {
                let measured = values[1].clone() / &values[0] / &BigComplex::from_i64(n as i64, Bits(bits));
                rows.push(ResultRow::new(&sc.name, n, &z, measured, w.clone()));
            }
            for (j, v) in values.iter().enumerate() {
                let label = format!("{}/j={j}", sc.name);
                match sc.op.epsilon(n, bits) {
                    Ok(eps) => {
                        let measured = eps.powi(j as i32) * v / &values[0];
                        rows.push(ResultRow::new(&label, n, &z, measured, w.powi(j as i32)));
                    }
                    Err(e) => rows.push(ResultRow::failed(&label, n, &z, e.to_string())),
                }
            }
        }
    }
    Ok(rows)
}

/// Zeros of the top-degree eigenpolynomial and how they sit relative to the
/// hull of the zeros of `rho_M`.
#[derive(Clone, Debug)]
pub struct ZeroMap {
    pub scenario: String,
    pub n: usize,
    pub zeros: Vec<BigComplex>,
    /// Largest distance from a zero to the hull.
    pub max_hull_distance: f64,
    /// Two-sided Hausdorff distance between the zeros and the hull, for
    /// point and segment hulls.
    pub hausdorff: Option<f64>,
    /// `(1/n) sum z_i^k` for `k = 1..=4`.
    pub moments: Vec<BigComplex>,
    /// One row per zero: measured is the zero, predicted the nearest hull point.
    pub rows: Vec<ResultRow>,
}

/// Largest distance from a point of `[a, b]` to the nearest of `pts`.
///
/// The distance to the nearest point is maximized at an end of the segment or
/// where it crosses a perpendicular bisector of two of the points.
pub fn segment_cover_radius(a: Pt, b: Pt, pts: &[Pt]) -> f64 {
    let nearest = |s: Pt| pts.iter().map(|p| (*p - s).norm()).fold(f64::INFINITY, f64::min);
    let d = b - a;
    let mut best = nearest(a).max(nearest(b));
    for (i, p) in pts.iter().enumerate() {
        for q in &pts[i + 1..] {
            // |a + t d - p|^2 = |a + t d - q|^2 is linear in t.
            let den = 2.0 * d.dot(*q - *p);
            if den == 0.0 {
                continue;
            }
            let t = ((*q - a).dot(*q - a) - (*p - a).dot(*p - a)) / den;
            if (0.0..=1.0).contains(&t) {
                best = best.max(nearest(a + d * t));
            }
        }
    }
    best
}

pub fn run_zero_map(sc: &Scenario) -> Result<ZeroMap> {
    let n = *sc.n_grid.iter().max().ok_or_else(|| {
        Error::Config(format!("scenario {}: the zero map needs a nonempty degree grid", sc.name))
    })?;
    let q = sc.op.eigenpoly(n)?.q;
    let zeros = if n == 0 { Vec::new() } else { roots(&q.to_big(sc.precision))? };
    let ctx = BranchContext::new(&sc.op, 64)?;
    let hull = ctx.hull().clone();
    let pts: Vec<Pt> = zeros
        .iter()
        .map(|z| {
            let (x, y) = z.to_f64_parts();
            Pt::new(x, y)
        })
        .collect();
    let max_hull_distance = pts.iter().map(|p| hull.distance(*p)).fold(0.0, f64::max);
    let hausdorff = match &hull {
        Hull::Point(_) => Some(max_hull_distance),
        Hull::Segment(a, b) if !pts.is_empty() => Some(max_hull_distance.max(segment_cover_radius(*a, *b, &pts))),
        _ => None,
    };
    let bits = sc.precision;
    let count = BigComplex::from_i64(zeros.len().max(1) as i64, Bits(bits));
    let moments = (1..=4)
        .map(|k| {
            let mut acc = BigComplex::zero(Bits(bits));
            for z in &zeros {
                acc += &z.powi(k);
            }
            acc / &count
        })
        .collect();
    let rows = zeros
        .iter()
        .zip(&pts)
        .map(|(z, p)| {
            let h = hull.nearest(*p);
            ResultRow::new(&sc.name, n, z, z.clone(), BigComplex::from_f64(bits, h.x, h.y))
        })
        .collect();
    Ok(ZeroMap {
        scenario: sc.name.clone(),
        n,
        zeros,
        max_hull_distance,
        hausdorff,
        moments,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{jacobi4, legendre2, ScenarioKind};
    use crate::operator::ExactlySolvableOperator;
    use rug::Rational;

    fn scenario(op: ExactlySolvableOperator<QComplex>, n: Vec<usize>, z: &[(f64, f64)], bits: u32) -> Scenario {
        let zs = z.iter().map(|&(a, b)| BigComplex::from_f64(bits, a, b)).collect();
        Scenario::new("t".into(), ScenarioKind::Legendre2, op, n, zs, bits, 4).unwrap()
    }

    #[test]
    fn legendre_ratio_approaches_phi_over_two() {
        let sc = scenario(legendre2(), vec![0, 10, 40], &[(2.0, 0.0)], 192);
        let rows = run_ratio_test(&sc).unwrap();
        let expect = (2.0 + 3f64.sqrt()) / 2.0;
        let last = rows.iter().find(|r| r.n == 40).unwrap();
        let v = last.value.as_ref().unwrap();
        assert!((v.predicted.to_f64_parts().0 - expect).abs() < 1e-14);
        assert!(v.rel_error < 1e-3);
        // Q_1/Q_0 = z
        let first = rows.iter().find(|r| r.n == 0).unwrap();
        assert_eq!(first.measured().unwrap().to_f64_parts(), (2.0, 0.0));
    }

    #[test]
    fn pure_monomial_operator_is_exact() {
        let op = ExactlySolvableOperator::from_int_lists(&[&[], &[], &[0, 0, 1]]).unwrap();
        let sc = scenario(op, vec![3, 6, 12], &[(2.0, 1.0), (-1.0, -3.0)], 128);
        for r in run_strong_asym(&sc).unwrap() {
            assert!(r.rel_error().unwrap() < 1e-15, "{r:?}");
        }
        for r in run_c1_extraction(&sc).unwrap() {
            assert!(r.measured().unwrap().abs_f64() < 1e-13);
        }
        let zm = run_zero_map(&sc).unwrap();
        assert_eq!(zm.zeros.len(), 12);
        assert!(zm.max_hull_distance < 1e-30);
    }

    #[test]
    fn cauchy_transform_rows() {
        let sc = scenario(jacobi4(&Rational::from(1)), vec![1, 40], &[(2.0, 0.0)], 192);
        let rows = run_cauchy_transform(&sc).unwrap();
        // j = 0 variant is identically one
        let j0 = rows.iter().find(|r| r.scenario == "t/j=0" && r.n == 40).unwrap();
        assert!(j0.rel_error().unwrap() < 1e-40);
        // lambda_1 = lambda_0 = 0, so degree 1 is dropped as resonant
        assert_eq!(sc.n_grid, vec![40]);
        assert_eq!(rows.len(), 5);
        let main = rows.iter().find(|r| r.scenario == "t" && r.n == 40).unwrap();
        let m = main.measured().unwrap().to_f64_parts().0;
        assert!((m - 1.0 / 3f64.sqrt()).abs() < 0.05);
    }

    #[test]
    fn c1_needs_a_doubling_ladder() {
        let sc = scenario(legendre2(), vec![3, 5], &[(2.0, 0.0)], 128);
        assert!(run_c1_extraction(&sc).is_err());
    }

    #[test]
    fn cover_radius_of_evenly_spaced_points() {
        let pts: Vec<Pt> = (0..=4).map(|i| Pt::new(-1.0 + 0.5 * i as f64, 0.1)).collect();
        let r = segment_cover_radius(Pt::new(-1.0, 0.0), Pt::new(1.0, 0.0), &pts);
        assert!((r - (0.25f64.powi(2) + 0.01).sqrt()).abs() < 1e-15);
    }
}
