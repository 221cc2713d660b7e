//! Planar primitives: points, simple polygons, convex clipping and exact
//! integration of squared affine functions over polygons.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn scale(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        Point::new(self.x + t * (o.x - self.x), self.y + t * (o.y - self.y))
    }

    /// Rotation about the origin by `angle` radians.
    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = (p.sub(a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a.lerp(b, t))
}

/// Total length of an open polyline.
pub fn polyline_length(points: &[Point]) -> f64 {
    points.windows(2).map(|w| w[0].dist(w[1])).sum()
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// A simple polygon with counterclockwise vertices. The closing edge from the
/// last vertex back to the first is implicit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point>", into = "Vec<Point>")]
pub struct Polygon {
    vertices: Vec<Point>,
}

impl TryFrom<Vec<Point>> for Polygon {
    type Error = Error;

    fn try_from(v: Vec<Point>) -> Result<Self> {
        Polygon::new(v)
    }
}

impl From<Polygon> for Vec<Point> {
    fn from(p: Polygon) -> Self {
        p.vertices
    }
}

impl Polygon {
    /// Validates closure, orientation and simplicity. A repeated first vertex
    /// at the end is dropped.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() >= 2 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(Error::InvalidPolygon(format!(
                "{} vertices, need at least 3",
                vertices.len()
            )));
        }
        if vertices
            .iter()
            .any(|p| !p.x.is_finite() || !p.y.is_finite())
        {
            return Err(Error::InvalidPolygon("non-finite vertex".into()));
        }
        let poly = Polygon { vertices };
        let area = poly.signed_area();
        if area <= 0.0 {
            return Err(Error::InvalidPolygon(format!(
                "signed area {area} is not positive (vertices must be counterclockwise)"
            )));
        }
        poly.check_simple()?;
        Ok(poly)
    }

    /// Skips the simplicity test; orientation and vertex count are still
    /// checked. Used by builders whose output is simple by construction.
    pub(crate) fn from_trusted(vertices: Vec<Point>) -> Result<Self> {
        let poly = Polygon { vertices };
        if poly.vertices.len() < 3 || poly.signed_area() <= 0.0 {
            return Err(Error::InvalidPolygon(
                "degenerate or clockwise polygon".into(),
            ));
        }
        Ok(poly)
    }

    pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        Polygon::new(vec![
            Point::new(x0, y0),
            Point::new(x1, y0),
            Point::new(x1, y1),
            Point::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn signed_area(&self) -> f64 {
        let o = self.vertices[0];
        0.5 * self
            .edges()
            .map(|(a, b)| a.sub(o).cross(b.sub(o)))
            .sum::<f64>()
    }

    pub fn area(&self) -> f64 {
        self.signed_area().abs()
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn bbox(&self) -> (Point, Point) {
        let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Even-odd point containment. Points exactly on the boundary may go
    /// either way.
    pub fn contains(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_convex(&self) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            orient(
                self.vertices[i],
                self.vertices[(i + 1) % n],
                self.vertices[(i + 2) % n],
            ) >= 0.0
        })
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<Polygon> {
        Polygon::from_trusted(self.vertices.iter().map(|&p| f(p)).collect())
    }

    /// Exact integral of `(value - <xi, p>)^2` over the polygon, by a signed
    /// triangle fan (the integrand is the square of an affine function).
    pub fn integrate_affine_square(&self, value: f64, xi: Point) -> f64 {
        let o = self.vertices[0];
        let q = |p: Point| value - xi.dot(p);
        let q0 = q(o);
        let mut total = 0.0;
        for (a, b) in self.edges() {
            let s = 0.5 * a.sub(o).cross(b.sub(o));
            if s == 0.0 {
                continue;
            }
            let (qa, qb) = (q(a), q(b));
            total += s / 6.0 * (q0 * q0 + qa * qa + qb * qb + q0 * qa + qa * qb + qb * q0);
        }
        total
    }

    fn check_simple(&self) -> Result<()> {
        let n = self.vertices.len();
        let mut order: Vec<usize> = (0..n).collect();
        let xmin = |i: usize| self.vertices[i].x.min(self.vertices[(i + 1) % n].x);
        let xmax = |i: usize| self.vertices[i].x.max(self.vertices[(i + 1) % n].x);
        order.sort_by(|&i, &j| xmin(i).total_cmp(&xmin(j)));
        for (k, &i) in order.iter().enumerate() {
            let (a, b) = (self.vertices[i], self.vertices[(i + 1) % n]);
            if a == b {
                return Err(Error::InvalidPolygon(format!(
                    "repeated vertex at index {i}"
                )));
            }
            for &j in &order[k + 1..] {
                if xmin(j) > xmax(i) {
                    break;
                }
                let adjacent = j == (i + 1) % n || i == (j + 1) % n;
                let (c, d) = (self.vertices[j], self.vertices[(j + 1) % n]);
                if adjacent {
                    // Adjacent edges share exactly one vertex; they may not fold back.
                    let shared = if j == (i + 1) % n { b } else { a };
                    let (u, w) = if j == (i + 1) % n { (a, d) } else { (b, c) };
                    if orient(u, shared, w) == 0.0 && u.sub(shared).dot(w.sub(shared)) > 0.0 {
                        return Err(Error::InvalidPolygon(format!("edges {i} and {j} overlap")));
                    }
                } else if segments_intersect(a, b, c, d) {
                    return Err(Error::InvalidPolygon(format!(
                        "edges {i} and {j} intersect"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Keeps the part of a convex polygon where `<normal, p> <= offset`
    /// (Sutherland–Hodgman against one half-plane). Returns `None` when the
    /// remainder has no area.
    pub fn clip_half_plane(&self, normal: Point, offset: f64) -> Option<Polygon> {
        let inside = |p: Point| normal.dot(p) <= offset;
        let mut out = Vec::with_capacity(self.vertices.len() + 2);
        for (a, b) in self.edges() {
            let (ia, ib) = (inside(a), inside(b));
            if ia {
                out.push(a);
            }
            if ia != ib {
                let da = normal.dot(a) - offset;
                let db = normal.dot(b) - offset;
                let t = da / (da - db);
                out.push(a.lerp(b, t));
            }
        }
        out.dedup();
        if out.len() >= 2 && out.first() == out.last() {
            out.pop();
        }
        if out.len() < 3 {
            return None;
        }
        let poly = Polygon { vertices: out };
        (poly.signed_area() > 1e-15).then_some(poly)
    }

    /// Clips the segment `[a, b]` to a convex polygon (Cyrus–Beck); returns the
    /// parameter range `[t0, t1]` of the part inside.
    pub fn clip_segment(&self, a: Point, b: Point) -> Option<(f64, f64)> {
        let d = b.sub(a);
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for (p, q) in self.edges() {
            // Inward normal of a CCW edge.
            let e = q.sub(p);
            let n = Point::new(-e.y, e.x);
            let num = n.dot(a.sub(p));
            let den = n.dot(d);
            if den == 0.0 {
                if num < 0.0 {
                    return None;
                }
            } else {
                let t = -num / den;
                if den > 0.0 {
                    t0 = t0.max(t);
                } else {
                    t1 = t1.min(t);
                }
            }
        }
        (t1 > t0).then_some((t0, t1))
    }
}

/// Clips an open polyline to a convex window, returning the inside pieces.
pub fn clip_polyline(window: &Polygon, points: &[Point]) -> Vec<Vec<Point>> {
    let mut pieces: Vec<Vec<Point>> = Vec::new();
    let mut current: Vec<Point> = Vec::new();
    for w in points.windows(2) {
        match window.clip_segment(w[0], w[1]) {
            Some((t0, t1)) => {
                let p0 = w[0].lerp(w[1], t0);
                let p1 = w[0].lerp(w[1], t1);
                if current.last() != Some(&p0) {
                    if current.len() >= 2 {
                        pieces.push(std::mem::take(&mut current));
                    }
                    current.clear();
                    current.push(p0);
                }
                current.push(p1);
                if t1 < 1.0 {
                    pieces.push(std::mem::take(&mut current));
                }
            }
            None => {
                if current.len() >= 2 {
                    pieces.push(std::mem::take(&mut current));
                }
                current.clear();
            }
        }
    }
    if current.len() >= 2 {
        pieces.push(current);
    }
    pieces
}
