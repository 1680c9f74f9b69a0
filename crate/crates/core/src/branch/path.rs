//! Integration paths from the far field to an evaluation point.

use crate::error::BranchError;
use crate::scalar::{BigComplex, Scalar};

use super::hull::{Hull, Pt};

/// Angle used to come down onto the cut from above.
const CUT_APPROACH: f64 = std::f64::consts::PI - 0.25;

/// How to reach the evaluation point `z` from the far field.
///
/// Every plan starts at an anchor with `|anchor - v| >= R` (where `v` is the
/// cut vertex and `R` the anchor radius) and ends at `z`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum PathPlan {
    /// Straight in along the ray from `v` through `z`. Points on the cut are
    /// approached from above.
    #[default]
    Radial,
    /// Start `offset` radians around the anchor circle, follow it in
    /// `chords` straight pieces, then go in radially.
    Arc { offset: f64, chords: usize },
    /// Explicit polyline; `z` is appended if it is not the last point.
    Waypoints(Vec<BigComplex>),
}

/// What a plan needs to know about the exclusion region.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub hull: Hull,
    pub hull_tol: f64,
    pub vertex: BigComplex,
    pub vertex_pt: Pt,
    pub anchor_radius: f64,
}

/// A validated polyline `points[0] = anchor, ..., points[last] = z`.
#[derive(Clone, Debug, PartialEq)]
pub struct ResolvedPath {
    pub points: Vec<BigComplex>,
}

impl ResolvedPath {
    pub fn anchor(&self) -> &BigComplex {
        &self.points[0]
    }
}

pub fn to_pt(z: &BigComplex) -> Pt {
    let (x, y) = z.to_f64_parts();
    Pt::new(x, y)
}

impl Geometry {
    /// `v + r e^{i angle}`.
    fn on_circle(&self, r: f64, angle: f64) -> BigComplex {
        let bits = self.vertex.bits();
        let e = BigComplex::from_f64(bits, angle.cos(), angle.sin());
        self.vertex.clone() + &e.mul_real(&rug::Float::with_val(bits, r))
    }

    /// True when `z` lies on the cut itself.
    fn on_cut(&self, z: &BigComplex) -> bool {
        let d = z.clone() - &self.vertex;
        d.im().is_zero() && d.re().is_sign_negative()
    }

    pub fn resolve(&self, plan: &PathPlan, z: &BigComplex) -> Result<ResolvedPath, BranchError> {
        let bits = z.bits();
        let d = z.clone() - &self.vertex;
        let r = d.abs_f64();
        let big_r = self.anchor_radius;
        let points = match plan {
            PathPlan::Radial => {
                if self.on_cut(z) {
                    vec![self.on_circle(r.max(big_r), CUT_APPROACH), z.clone()]
                } else if r >= big_r {
                    vec![z.clone()]
                } else {
                    let unit = d.clone() / &BigComplex::with_val(bits, d.abs());
                    let anchor = self.vertex.clone() + &unit.mul_real(&rug::Float::with_val(bits, big_r));
                    vec![anchor, z.clone()]
                }
            }
            PathPlan::Arc { offset, chords } => {
                let chords = (*chords).max(1);
                let ra = r.max(big_r);
                let end = if self.on_cut(z) {
                    CUT_APPROACH
                } else {
                    let (x, y) = d.to_f64_parts();
                    y.atan2(x)
                };
                let start = if end + offset < std::f64::consts::PI - 1e-6 {
                    end + offset
                } else {
                    end - offset
                };
                let mut pts: Vec<BigComplex> = (0..chords)
                    .map(|k| self.on_circle(ra, start + (end - start) * k as f64 / chords as f64))
                    .collect();
                if self.on_cut(z) || r < big_r {
                    pts.push(self.on_circle(ra, end));
                }
                pts.push(z.clone());
                pts
            }
            PathPlan::Waypoints(w) => {
                let mut pts: Vec<BigComplex> = w.iter().map(|p| p.with_bits(bits)).collect();
                if pts.last() != Some(z) {
                    pts.push(z.clone());
                }
                let a = (pts[0].clone() - &self.vertex).abs_f64();
                if a < big_r * (1.0 - 1e-12) {
                    return Err(BranchError::InvalidPlan(format!(
                        "first waypoint is at distance {a} from the cut vertex, inside the anchor radius {big_r}"
                    )));
                }
                pts
            }
        };
        let path = ResolvedPath { points };
        self.validate(&path)?;
        Ok(path)
    }

    /// Every segment keeps away from the hull and from the cut; only the
    /// final point may lie on the cut, reached from above.
    pub fn validate(&self, path: &ResolvedPath) -> Result<(), BranchError> {
        let v = self.vertex_pt;
        let pts: Vec<Pt> = path.points.iter().map(to_pt).collect();
        let last = pts.len() - 1;
        for (i, p) in pts.iter().enumerate() {
            if self.hull.distance(*p) <= self.hull_tol {
                return Err(BranchError::InvalidPlan(format!(
                    "point {} + {}i is inside the exclusion hull",
                    p.x, p.y
                )));
            }
            let on_cut = p.y == v.y && p.x <= v.x;
            if on_cut && i != last {
                return Err(BranchError::InvalidPlan(format!(
                    "intermediate point {} + {}i lies on the cut",
                    p.x, p.y
                )));
            }
        }
        for (i, pair) in pts.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            if self.hull.segment_distance(a, b) <= self.hull_tol {
                return Err(BranchError::InvalidPlan(format!(
                    "segment {i} passes through the exclusion hull"
                )));
            }
            let (ya, yb) = (a.y - v.y, b.y - v.y);
            if ya * yb < 0.0 {
                let x = a.x + (b.x - a.x) * ya / (ya - yb);
                if x <= v.x {
                    return Err(BranchError::InvalidPlan(format!("segment {i} crosses the cut")));
                }
            }
            if yb == 0.0 && b.x <= v.x && ya < 0.0 {
                return Err(BranchError::InvalidPlan(
                    "the cut may only be approached from above".to_string(),
                ));
            }
        }
        Ok(())
    }
}
