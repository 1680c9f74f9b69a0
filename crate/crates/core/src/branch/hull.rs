//! Convex hull of a planar point set in double precision.

use std::ops::{Add, Mul, Sub};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pt {
    pub x: f64,
    pub y: f64,
}

impl Pt {
    pub const fn new(x: f64, y: f64) -> Self {
        Pt { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dot(self, o: Pt) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Pt) -> f64 {
        self.x * o.y - self.y * o.x
    }
}

impl Add for Pt {
    type Output = Pt;
    fn add(self, o: Pt) -> Pt {
        Pt::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Pt {
    type Output = Pt;
    fn sub(self, o: Pt) -> Pt {
        Pt::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Pt {
    type Output = Pt;
    fn mul(self, s: f64) -> Pt {
        Pt::new(self.x * s, self.y * s)
    }
}

/// A convex hull, possibly degenerate.
#[derive(Clone, Debug, PartialEq)]
pub enum Hull {
    Point(Pt),
    Segment(Pt, Pt),
    /// Counter-clockwise vertices, no three collinear.
    Polygon(Vec<Pt>),
}

/// Closest point of the segment `[a, b]` to `p`.
pub fn project_to_segment(p: Pt, a: Pt, b: Pt) -> Pt {
    let d = b - a;
    let len2 = d.dot(d);
    if len2 == 0.0 {
        return a;
    }
    let s = ((p - a).dot(d) / len2).clamp(0.0, 1.0);
    a + d * s
}

/// Distance from `p` to the segment `[a, b]`.
pub fn point_segment_distance(p: Pt, a: Pt, b: Pt) -> f64 {
    (p - project_to_segment(p, a, b)).norm()
}

fn segments_intersect(a: Pt, b: Pt, c: Pt, d: Pt) -> bool {
    let o1 = (b - a).cross(c - a);
    let o2 = (b - a).cross(d - a);
    let o3 = (d - c).cross(a - c);
    let o4 = (d - c).cross(b - c);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// Distance between the segments `[a, b]` and `[c, d]`.
pub fn segment_segment_distance(a: Pt, b: Pt, c: Pt, d: Pt) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

impl Hull {
    /// Hull of `points`; points within `tol` of each other or of a line are
    /// merged so that near-degenerate sets give a point or a segment.
    pub fn from_points(points: &[Pt], tol: f64) -> Hull {
        assert!(!points.is_empty(), "hull of an empty set");
        let mut pts: Vec<Pt> = points.to_vec();
        pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        let mut uniq: Vec<Pt> = Vec::new();
        for p in pts {
            if !uniq.iter().any(|q| (*q - p).norm() <= tol) {
                uniq.push(p);
            }
        }
        if uniq.len() == 1 {
            return Hull::Point(uniq[0]);
        }
        // Andrew's monotone chain, dropping turns smaller than tol.
        let turn = |o: Pt, a: Pt, b: Pt| {
            let base = (b - o).norm().max(tol);
            (a - o).cross(b - o) / base
        };
        let mut lower: Vec<Pt> = Vec::new();
        for &p in &uniq {
            while lower.len() >= 2 && turn(lower[lower.len() - 2], lower[lower.len() - 1], p) <= tol {
                lower.pop();
            }
            lower.push(p);
        }
        let mut upper: Vec<Pt> = Vec::new();
        for &p in uniq.iter().rev() {
            while upper.len() >= 2 && turn(upper[upper.len() - 2], upper[upper.len() - 1], p) <= tol {
                upper.pop();
            }
            upper.push(p);
        }
        lower.pop();
        upper.pop();
        let mut poly = lower;
        poly.extend(upper);
        match poly.len() {
            0 | 1 => Hull::Point(uniq[0]),
            2 => Hull::Segment(poly[0], poly[1]),
            _ => Hull::Polygon(poly),
        }
    }

    pub fn vertices(&self) -> Vec<Pt> {
        match self {
            Hull::Point(p) => vec![*p],
            Hull::Segment(a, b) => vec![*a, *b],
            Hull::Polygon(v) => v.clone(),
        }
    }

    /// Smallest vertex by real part, then imaginary part.
    pub fn leftmost(&self) -> Pt {
        self.vertices()
            .into_iter()
            .min_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)))
            .expect("nonempty")
    }

    /// Euclidean distance from `p` to the hull; zero inside.
    pub fn distance(&self, p: Pt) -> f64 {
        match self {
            Hull::Point(a) => (p - *a).norm(),
            Hull::Segment(a, b) => point_segment_distance(p, *a, *b),
            Hull::Polygon(v) => {
                let n = v.len();
                let inside = (0..n).all(|i| (v[(i + 1) % n] - v[i]).cross(p - v[i]) >= 0.0);
                if inside {
                    return 0.0;
                }
                (0..n)
                    .map(|i| point_segment_distance(p, v[i], v[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    /// Closest hull point to `p`; `p` itself when inside.
    pub fn nearest(&self, p: Pt) -> Pt {
        match self {
            Hull::Point(a) => *a,
            Hull::Segment(a, b) => project_to_segment(p, *a, *b),
            Hull::Polygon(v) => {
                if self.distance(p) == 0.0 {
                    return p;
                }
                let n = v.len();
                (0..n)
                    .map(|i| project_to_segment(p, v[i], v[(i + 1) % n]))
                    .min_by(|a, b| (*a - p).norm().total_cmp(&(*b - p).norm()))
                    .expect("nonempty")
            }
        }
    }

    /// Distance from the segment `[a, b]` to the hull.
    pub fn segment_distance(&self, a: Pt, b: Pt) -> f64 {
        let ends = self.distance(a).min(self.distance(b));
        let edges = match self {
            Hull::Point(p) => point_segment_distance(*p, a, b),
            Hull::Segment(c, d) => segment_segment_distance(a, b, *c, *d),
            Hull::Polygon(v) => {
                let n = v.len();
                (0..n)
                    .map(|i| segment_segment_distance(a, b, v[i], v[(i + 1) % n]))
                    .fold(f64::INFINITY, f64::min)
            }
        };
        ends.min(edges)
    }

    /// Largest distance from `p` to a hull point.
    pub fn max_distance_from(&self, p: Pt) -> f64 {
        self.vertices()
            .into_iter()
            .map(|v| (v - p).norm())
            .fold(0.0, f64::max)
    }
}
