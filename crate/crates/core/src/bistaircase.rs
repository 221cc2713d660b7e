//! The bi-staircase: even stripes above the interface curve, odd stripes
//! below it, separated by the curve and by vertical half-lines.

use serde::{Deserialize, Serialize};

use crate::cells::{Interface, PiecewiseCell2D, Region};
use crate::error::{Error, Result};
use crate::geometry::{clip_polyline, Point, Polygon};
use crate::interface_curve::InterfaceCurve;
use crate::staircase::s_base;

/// Value above the curve in canonical coordinates.
#[inline]
pub fn upper_value(x: f64) -> f64 {
    s_base(x)
}

/// Value below the curve in canonical coordinates.
#[inline]
pub fn lower_value(x: f64) -> f64 {
    s_base(x - 1.0) + 1.0
}

/// `(x, y) ↦ Ŝ(x - τ₀, y + t) + τ₀`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiStaircase {
    pub curve: InterfaceCurve,
    pub tau0: f64,
    pub y_shift: f64,
}

impl BiStaircase {
    pub fn canonical(curve: InterfaceCurve) -> Self {
        BiStaircase {
            curve,
            tau0: 0.0,
            y_shift: 0.0,
        }
    }

    pub fn translated(curve: InterfaceCurve, tau0: f64, y_shift: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&tau0) {
            return Err(Error::param("tau0", format!("{tau0} not in [-1, 1]")));
        }
        if !y_shift.is_finite() {
            return Err(Error::param("y_shift", "must be finite"));
        }
        Ok(BiStaircase {
            curve,
            tau0,
            y_shift,
        })
    }

    pub fn theta(&self) -> f64 {
        self.curve.theta()
    }

    fn to_canonical(&self, p: Point) -> Point {
        Point::new(p.x - self.tau0, p.y + self.y_shift)
    }

    fn from_canonical(&self, p: Point) -> Point {
        Point::new(p.x + self.tau0, p.y - self.y_shift)
    }

    /// Distance-like test against the jump set in canonical coordinates.
    fn near_jump_set(&self, q: Point, tol: f64) -> bool {
        if (q.y - self.curve.eval(q.x)).abs() <= tol {
            return true;
        }
        let k = q.x.round();
        if (q.x - k).abs() <= tol {
            let even = (k as i64).rem_euclid(2) == 0;
            if even && q.y <= tol {
                return true;
            }
            if !even && q.y >= self.curve.f1() - tol {
                return true;
            }
        }
        false
    }

    /// Value at a point off the jump set.
    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        self.eval_with_tol(x, y, 1e-12)
    }

    pub fn eval_with_tol(&self, x: f64, y: f64, tol: f64) -> Result<f64> {
        let q = self.to_canonical(Point::new(x, y));
        if self.near_jump_set(q, tol) {
            return Err(Error::OnJumpSet { x, y });
        }
        let base = if q.y > self.curve.eval(q.x) {
            upper_value(q.x)
        } else {
            lower_value(q.x)
        };
        Ok(base + self.tau0)
    }

    /// The jump set clipped to a convex window, as oriented polylines. Curve
    /// pieces run in the `+x` direction with the upper value on the left;
    /// vertical pieces run upward with the smaller value on the left.
    pub fn jump_set(&self, window: &Polygon, tol: f64) -> Result<Vec<Interface>> {
        if !window.is_convex() {
            return Err(Error::InvalidPolygon(
                "jump set clipping needs a convex window".into(),
            ));
        }
        let local = window.map(|p| self.to_canonical(p))?;
        let (lo, hi) = local.bbox();
        let mut out = Vec::new();
        let poly = self.curve.polyline(lo.x, hi.x, tol);
        for piece in clip_polyline(&local, &poly) {
            for part in split_at_integers(&piece) {
                let mid = 0.5 * (part[0].x + part[part.len() - 1].x);
                out.push(Interface {
                    points: part,
                    left_value: upper_value(mid) + self.tau0,
                    right_value: lower_value(mid) + self.tau0,
                });
            }
        }
        let reach = (hi.y - lo.y).abs() + (hi.x - lo.x).abs() + 1.0;
        for k in (lo.x.ceil() as i64)..=(hi.x.floor() as i64) {
            let x = k as f64;
            let (a, b) = if k.rem_euclid(2) == 0 {
                (Point::new(x, lo.y - reach), Point::new(x, 0.0))
            } else {
                (Point::new(x, self.curve.f1()), Point::new(x, hi.y + reach))
            };
            if let Some((t0, t1)) = local.clip_segment(a, b) {
                out.push(Interface {
                    points: vec![a.lerp(b, t0), a.lerp(b, t1)],
                    left_value: x - 1.0 + self.tau0,
                    right_value: x + 1.0 + self.tau0,
                });
            }
        }
        for itf in &mut out {
            for p in &mut itf.points {
                *p = self.from_canonical(*p);
            }
        }
        Ok(out)
    }

    /// Partition of an axis-aligned window in canonical coordinates. The
    /// window must extend below 0 and above `f(1)`.
    pub fn layout(&self, window: &Polygon, tol: f64) -> Result<Layout> {
        let rect = Rect::from_polygon(window)?;
        if self.tau0 != 0.0 || self.y_shift != 0.0 {
            return Err(Error::param(
                "bistaircase",
                "layouts are built for the canonical bi-staircase",
            ));
        }
        if !(rect.y0 < 0.0 && rect.y1 > self.curve.f1()) {
            return Err(Error::param(
                "window",
                "must contain the band between 0 and f(1)",
            ));
        }
        let curve = self.curve.polyline(rect.x0, rect.x1, tol);
        Layout::new(rect, curve, 2)
    }
}

/// Splits an x-monotone polyline at interior integer abscissae that are
/// already nodes.
fn split_at_integers(points: &[Point]) -> Vec<Vec<Point>> {
    let mut parts = Vec::new();
    let mut current = vec![points[0]];
    for (i, &p) in points.iter().enumerate().skip(1) {
        current.push(p);
        if i + 1 < points.len() && p.x == p.x.round() {
            parts.push(std::mem::replace(&mut current, vec![p]));
        }
    }
    parts.push(current);
    parts
}

/// Axis-aligned rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self> {
        if !(x0 < x1 && y0 < y1) || ![x0, x1, y0, y1].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidPolygon(format!(
                "bad rectangle [{x0}, {x1}] x [{y0}, {y1}]"
            )));
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    /// Recognizes an axis-aligned rectangle given as a polygon.
    pub fn from_polygon(p: &Polygon) -> Result<Self> {
        let (lo, hi) = p.bbox();
        let aligned = p.len() == 4
            && p.vertices()
                .iter()
                .all(|v| (v.x == lo.x || v.x == hi.x) && (v.y == lo.y || v.y == hi.y));
        if !aligned {
            return Err(Error::InvalidPolygon(
                "window must be an axis-aligned rectangle".into(),
            ));
        }
        Rect::new(lo.x, hi.x, lo.y, hi.y)
    }

    pub fn polygon(&self) -> Polygon {
        Polygon::rectangle(self.x0, self.x1, self.y0, self.y1).expect("validated rectangle")
    }
}

/// Editable geometry of a bi-staircase-like partition of a rectangle: an
/// x-monotone curve from the left to the right side, lower walls from the
/// bottom side up to the curve at even integers, and upper walls from the
/// curve up to the top side at odd integers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub rect: Rect,
    pub curve: Vec<Point>,
    pub walls: Vec<Wall>,
    pub holes: Vec<Hole>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Wall {
    pub k: i64,
    /// Bottom to top.
    pub points: Vec<Point>,
}

impl Wall {
    pub fn is_lower(&self) -> bool {
        self.k.rem_euclid(2) == 0
    }
}

/// A square island carrying its own value inside one region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hole {
    pub square: Polygon,
    pub value: f64,
}

impl Layout {
    /// Straight walls with `wall_nodes` points each.
    pub fn new(rect: Rect, curve: Vec<Point>, wall_nodes: usize) -> Result<Self> {
        let mut layout = Layout {
            rect,
            curve,
            walls: Vec::new(),
            holes: Vec::new(),
        };
        layout.check_curve()?;
        let n = wall_nodes.max(2);
        for k in (rect.x0.floor() as i64 + 1)..=(rect.x1.ceil() as i64 - 1) {
            let x = k as f64;
            if x <= rect.x0 || x >= rect.x1 {
                continue;
            }
            let junction = layout.junction(k)?;
            let (ya, yb) = if k.rem_euclid(2) == 0 {
                (rect.y0, junction.y)
            } else {
                (junction.y, rect.y1)
            };
            let points = (0..n)
                .map(|i| Point::new(x, ya + (yb - ya) * i as f64 / (n - 1) as f64))
                .collect();
            layout.walls.push(Wall { k, points });
        }
        Ok(layout)
    }

    fn check_curve(&self) -> Result<()> {
        let c = &self.curve;
        if c.len() < 2 || c[0].x != self.rect.x0 || c[c.len() - 1].x != self.rect.x1 {
            return Err(Error::param(
                "curve",
                "must span the window from side to side",
            ));
        }
        if c.windows(2).any(|w| w[1].x <= w[0].x) {
            return Err(Error::param("curve", "abscissae must increase"));
        }
        if c.iter().any(|p| p.y <= self.rect.y0 || p.y >= self.rect.y1) {
            return Err(Error::param(
                "curve",
                "must stay strictly inside the window",
            ));
        }
        Ok(())
    }

    fn junction_index(&self, k: i64) -> Result<usize> {
        let x = k as f64;
        self.curve
            .iter()
            .position(|p| p.x == x)
            .ok_or_else(|| Error::param("curve", format!("no node at x = {k}")))
    }

    fn junction(&self, k: i64) -> Result<Point> {
        Ok(self.curve[self.junction_index(k)?])
    }

    /// Moves the curve vertically by `bump(x)` and reattaches the walls.
    pub fn bump_curve(&mut self, bump: impl Fn(f64) -> f64) -> Result<()> {
        for p in &mut self.curve {
            p.y += bump(p.x);
        }
        self.check_curve()?;
        self.reattach()
    }

    /// Replaces the curve ordinates by `new_y(x)`.
    pub fn set_curve(&mut self, new_y: impl Fn(f64) -> f64) -> Result<()> {
        for p in &mut self.curve {
            p.y = new_y(p.x);
        }
        self.check_curve()?;
        self.reattach()
    }

    fn reattach(&mut self) -> Result<()> {
        for i in 0..self.walls.len() {
            let j = self.junction(self.walls[i].k)?;
            let w = &mut self.walls[i];
            if w.is_lower() {
                *w.points.last_mut().expect("wall has points") = j;
            } else {
                w.points[0] = j;
            }
        }
        Ok(())
    }

    /// Resamples wall `index` with `n` nodes and shifts it horizontally by
    /// `shift(y)`; the shift should vanish at both ends.
    pub fn bend_wall(&mut self, index: usize, n: usize, shift: impl Fn(f64) -> f64) {
        let w = &mut self.walls[index];
        let a = w.points[0];
        let b = w.points[w.points.len() - 1];
        let n = n.max(2);
        w.points = (0..n)
            .map(|i| {
                let p = a.lerp(b, i as f64 / (n - 1) as f64);
                if i == 0 || i == n - 1 {
                    p
                } else {
                    Point::new(p.x + shift(p.y), p.y)
                }
            })
            .collect();
    }

    fn wall(&self, k: i64) -> Option<&Wall> {
        self.walls.iter().find(|w| w.k == k)
    }

    /// Regions and interfaces. Fails if the edited geometry is no longer
    /// a valid partition.
    pub fn to_cells(&self) -> Result<PiecewiseCell2D> {
        let r = self.rect;
        let mut regions = Vec::new();
        let mut interfaces = Vec::new();

        let mut upper_cuts = vec![r.x0];
        upper_cuts.extend(
            self.walls
                .iter()
                .filter(|w| !w.is_lower())
                .map(|w| w.k as f64),
        );
        upper_cuts.push(r.x1);
        for pair in upper_cuts.windows(2) {
            let (xa, xb) = (pair[0], pair[1]);
            let (ia, ib) = (self.curve_index(xa)?, self.curve_index(xb)?);
            let mut v: Vec<Point> = self.curve[ia..=ib].to_vec();
            match self.wall(xb as i64).filter(|_| xb < r.x1) {
                Some(w) => v.extend_from_slice(&w.points[1..]),
                None => v.push(Point::new(r.x1, r.y1)),
            }
            match self.wall(xa as i64).filter(|_| xa > r.x0) {
                Some(w) => v.extend(w.points[1..].iter().rev()),
                None => v.push(Point::new(r.x0, r.y1)),
            }
            regions.push(Region::new(Polygon::new(v)?, upper_value(0.5 * (xa + xb))));
        }

        let mut lower_cuts = vec![r.x0];
        lower_cuts.extend(
            self.walls
                .iter()
                .filter(|w| w.is_lower())
                .map(|w| w.k as f64),
        );
        lower_cuts.push(r.x1);
        for pair in lower_cuts.windows(2) {
            let (xa, xb) = (pair[0], pair[1]);
            let (ia, ib) = (self.curve_index(xa)?, self.curve_index(xb)?);
            let left_wall = self.wall(xa as i64).filter(|_| xa > r.x0);
            let right_wall = self.wall(xb as i64).filter(|_| xb < r.x1);
            let mut v = Vec::new();
            v.push(left_wall.map_or(Point::new(r.x0, r.y0), |w| w.points[0]));
            match right_wall {
                Some(w) => v.extend_from_slice(&w.points[..w.points.len() - 1]),
                None => v.push(Point::new(r.x1, r.y0)),
            }
            v.extend(self.curve[ia..=ib].iter().rev());
            if let Some(w) = left_wall {
                v.extend(w.points[1..w.points.len() - 1].iter().rev());
            }
            regions.push(Region::new(Polygon::new(v)?, lower_value(0.5 * (xa + xb))));
        }

        let mut cuts = vec![r.x0];
        cuts.extend(self.walls.iter().map(|w| w.k as f64));
        cuts.sort_by(f64::total_cmp);
        cuts.push(r.x1);
        for pair in cuts.windows(2) {
            let (ia, ib) = (self.curve_index(pair[0])?, self.curve_index(pair[1])?);
            let mid = 0.5 * (pair[0] + pair[1]);
            interfaces.push(Interface {
                points: self.curve[ia..=ib].to_vec(),
                left_value: upper_value(mid),
                right_value: lower_value(mid),
            });
        }
        for w in &self.walls {
            let x = w.k as f64;
            interfaces.push(Interface {
                points: w.points.clone(),
                left_value: x - 1.0,
                right_value: x + 1.0,
            });
        }

        let mut cells = PiecewiseCell2D {
            regions,
            interfaces,
        };
        for h in &self.holes {
            add_hole(&mut cells, h)?;
        }
        Ok(cells)
    }

    fn curve_index(&self, x: f64) -> Result<usize> {
        if x == self.rect.x0 {
            return Ok(0);
        }
        if x == self.rect.x1 {
            return Ok(self.curve.len() - 1);
        }
        self.junction_index(x as i64)
    }
}

/// Cuts a square island out of the region containing it.
pub fn add_hole(cells: &mut PiecewiseCell2D, hole: &Hole) -> Result<()> {
    let centre = {
        let (lo, hi) = hole.square.bbox();
        lo.lerp(hi, 0.5)
    };
    let host = cells
        .regions
        .iter()
        .position(|r| r.contains(centre))
        .ok_or_else(|| Error::NonTiling("island centre outside every region".into()))?;
    let region = &cells.regions[host];
    let inside = hole.square.vertices().iter().all(|&p| region.contains(p));
    let (lo, hi) = hole.square.bbox();
    let half_diag = 0.5 * lo.dist(hi);
    let clear = region.outer.distance_to_boundary(centre) > half_diag
        && region
            .holes
            .iter()
            .all(|h| h.distance_to_boundary(centre) > half_diag && !h.contains(centre));
    if !inside || !clear {
        return Err(Error::NonTiling(
            "island must lie strictly inside one region".into(),
        ));
    }
    let host_value = region.value;
    if host_value == hole.value {
        return Err(Error::param(
            "island",
            "value must differ from the host region",
        ));
    }
    cells.regions[host].holes.push(hole.square.clone());
    cells
        .regions
        .push(Region::new(hole.square.clone(), hole.value));
    let mut ring = hole.square.vertices().to_vec();
    ring.push(ring[0]);
    cells.interfaces.push(Interface {
        points: ring,
        left_value: hole.value,
        right_value: host_value,
    });
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::jf_2d;
    use crate::energy::Params2D;
    use crate::geometry::{polyline_length, segments_intersect};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn canonical() -> BiStaircase {
        BiStaircase::canonical(InterfaceCurve::build(0.0, 1e-12).unwrap())
    }

    #[test]
    fn eval_examples() {
        let b = canonical();
        assert_eq!(b.eval(0.0, 10.0).unwrap(), 0.0);
        assert_eq!(b.eval(1.0, -10.0).unwrap(), 1.0);
        assert_eq!(b.eval(2.5, 10.0).unwrap(), 2.0);
        assert_eq!(b.eval(-0.5, -1.0).unwrap(), -1.0);
        assert!(b.eval(0.0, -1.0).is_err());
        assert!(b.eval(1.0, 5.0).is_err());
        assert!(b.eval(0.5, b.curve.eval(0.5)).is_err());
        assert!(b.eval(1.0, 0.2).is_ok());
    }

    #[test]
    fn translations_move_the_evaluation_point() {
        let b = canonical();
        let t = BiStaircase::translated(b.curve.clone(), 0.5, 0.25).unwrap();
        for &(x, y) in &[(0.3, 3.0), (1.7, -2.0), (-0.9, 0.1)] {
            assert_eq!(
                t.eval(x, y).unwrap(),
                b.eval(x - 0.5, y + 0.25).unwrap() + 0.5
            );
        }
        assert!(BiStaircase::translated(b.curve, 1.5, 0.0).is_err());
    }

    #[test]
    fn small_window_jump_set() {
        let b = canonical();
        let w = Polygon::rectangle(-0.5, 0.5, -1.0, 0.5).unwrap();
        let js = b.jump_set(&w, 1e-9).unwrap();
        let verticals: Vec<_> = js
            .iter()
            .filter(|i| i.points.len() == 2 && i.points[0].x == i.points[1].x)
            .collect();
        assert_eq!(verticals.len(), 1);
        assert_eq!(
            verticals[0].points,
            vec![Point::new(0.0, -1.0), Point::new(0.0, 0.0)]
        );
        assert_eq!(
            (verticals[0].left_value, verticals[0].right_value),
            (-1.0, 1.0)
        );
        let mut arcs: Vec<_> = js
            .iter()
            .filter(|i| i.points.len() > 2)
            .map(|i| (i.left_value, i.right_value))
            .collect();
        arcs.sort_by(|a, b| a.1.total_cmp(&b.1));
        assert_eq!(arcs, vec![(0.0, -1.0), (0.0, 1.0)]);
    }

    #[test]
    fn jump_set_above_the_curve() {
        let b = canonical();
        let w = Polygon::rectangle(0.5, 1.5, 1.0, 2.0).unwrap();
        let js = b.jump_set(&w, 1e-9).unwrap();
        assert_eq!(js.len(), 1);
        assert_eq!((js[0].left_value, js[0].right_value), (0.0, 2.0));
        assert_eq!(js[0].points.len(), 2);
        assert!(js[0].points[0].dist(Point::new(1.0, 1.0)) < 1e-15);
        assert!(js[0].points[1].dist(Point::new(1.0, 2.0)) < 1e-15);
    }

    #[test]
    fn total_jump_length() {
        let b = canonical();
        let r = 5.0;
        let w = Polygon::rectangle(-0.5, 1.5, -r, r).unwrap();
        let js = b.jump_set(&w, 1e-10).unwrap();
        let total: f64 = js.iter().map(|i| polyline_length(&i.points)).sum();
        let arc = b.curve.arclength(0.0, 1.0, 1e-14).unwrap();
        let expected = r + (r - b.curve.f1()) + 2.0 * arc;
        assert!((total - expected).abs() < 2e-9, "{total} vs {expected}");
    }

    #[test]
    fn grid_classification_matches_jump_set() {
        let b = canonical();
        let w = Polygon::rectangle(-1.3, 2.7, -1.1, 1.9).unwrap();
        let js = b.jump_set(&w, 1e-9).unwrap();
        let n = 80;
        let at = |i: usize, j: usize| {
            Point::new(
                -1.3 + 4.0 * (i as f64 + 0.5) / n as f64,
                -1.1 + 3.0 * (j as f64 + 0.37) / n as f64,
            )
        };
        // Each side's value must border some interface crossed by the segment.
        let crosses = |p: Point, q: Point, a: f64, b: f64| {
            let hit = |v: f64| {
                js.iter().any(|itf| {
                    (itf.left_value == v || itf.right_value == v)
                        && itf
                            .points
                            .windows(2)
                            .any(|s| segments_intersect(p, q, s[0], s[1]))
                })
            };
            hit(a) && hit(b)
        };
        for i in 0..n {
            for j in 0..n {
                let p = at(i, j);
                let vp = b.eval(p.x, p.y).unwrap();
                for q in [at(i + 1, j), at(i, j + 1)] {
                    if q.x > 2.7 || q.y > 1.9 {
                        continue;
                    }
                    let vq = b.eval(q.x, q.y).unwrap();
                    if vp != vq {
                        assert!(
                            crosses(p, q, vp, vq),
                            "no interface between {p:?} and {q:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn layout_cells_agree_with_eval() {
        let b = canonical();
        let w = Polygon::rectangle(-1.5, 2.5, -2.0, 2.0).unwrap();
        let cells = b.layout(&w, 1e-8).unwrap().to_cells().unwrap();
        cells.validate(&w).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let p = Point::new(rng.gen_range(-1.5..2.5), rng.gen_range(-2.0..2.0));
            if let Ok(v) = b.eval_with_tol(p.x, p.y, 1e-6) {
                assert_eq!(cells.value_at(p), Some(v));
            }
        }
    }

    #[test]
    fn layout_energy_matches_jump_set() {
        let b = canonical();
        let w = Polygon::rectangle(-0.5, 1.5, -2.0, 2.0).unwrap();
        let cells = b.layout(&w, 1e-9).unwrap().to_cells().unwrap();
        let e = jf_2d(&w, &cells, &Params2D::normalized(0.0).unwrap()).unwrap();
        let js_len: f64 = b
            .jump_set(&w, 1e-9)
            .unwrap()
            .iter()
            .map(|i| polyline_length(&i.points))
            .sum();
        assert!((e.jump_term - 4.0 * js_len).abs() < 1e-9);
    }

    #[test]
    fn edited_layouts() {
        let b = canonical();
        let w = Polygon::rectangle(-0.5, 1.5, -2.0, 2.0).unwrap();
        let mut layout = b.layout(&w, 1e-7).unwrap();
        layout
            .bump_curve(|x| 0.2 * (std::f64::consts::PI * (x + 0.5) / 2.0).sin().powi(2))
            .unwrap();
        layout.bend_wall(0, 40, |y| 0.1 * ((y + 2.0) * (0.2 - y)).max(0.0));
        layout.holes.push(Hole {
            square: Polygon::rectangle(-0.3, -0.1, 1.2, 1.4).unwrap(),
            value: 5.0,
        });
        let cells = layout.to_cells().unwrap();
        cells.validate(&w).unwrap();
        assert_eq!(cells.regions.len(), 5);
        assert!(cells.regions.iter().any(|r| r.holes.len() == 1));
        let mut bad = layout.clone();
        bad.holes.push(Hole {
            square: Polygon::rectangle(-0.1, 0.1, -0.1, 0.1).unwrap(),
            value: 5.0,
        });
        assert!(bad.to_cells().is_err());
    }
}
