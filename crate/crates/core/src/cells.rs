//! Piecewise constant functions on polygonal partitions of a window, and the
//! two-dimensional jump functional.

use serde::{Deserialize, Serialize};

use crate::energy::{jump_cost, EnergyBreakdown, Params2D};
use crate::error::{Error, Result};
use crate::geometry::{polyline_length, Point, Polygon};

/// A polygonal level-set piece. Holes are counterclockwise polygons removed
/// from the outer boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub outer: Polygon,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<Polygon>,
    pub value: f64,
}

impl Region {
    pub fn new(outer: Polygon, value: f64) -> Self {
        Region {
            outer,
            holes: Vec::new(),
            value,
        }
    }

    pub fn area(&self) -> f64 {
        self.outer.area() - self.holes.iter().map(Polygon::area).sum::<f64>()
    }

    pub fn contains(&self, p: Point) -> bool {
        self.outer.contains(p) && !self.holes.iter().any(|h| h.contains(p))
    }

    /// `∫∫ (value - <xi, x>)^2` over the region.
    pub fn fidelity(&self, xi: Point) -> f64 {
        self.outer.integrate_affine_square(self.value, xi)
            - self
                .holes
                .iter()
                .map(|h| h.integrate_affine_square(self.value, xi))
                .sum::<f64>()
    }
}

/// Oriented polyline of the jump set; `left_value` is the value on the left
/// of the direction of travel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interface {
    pub points: Vec<Point>,
    pub left_value: f64,
    pub right_value: f64,
}

impl Interface {
    pub fn length(&self) -> f64 {
        polyline_length(&self.points)
    }

    pub fn reversed(&self) -> Interface {
        let mut points = self.points.clone();
        points.reverse();
        Interface {
            points,
            left_value: self.right_value,
            right_value: self.left_value,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseCell2D {
    pub regions: Vec<Region>,
    pub interfaces: Vec<Interface>,
}

impl PiecewiseCell2D {
    pub fn value_at(&self, p: Point) -> Option<f64> {
        self.regions.iter().find(|r| r.contains(p)).map(|r| r.value)
    }

    pub fn jump_length(&self) -> f64 {
        self.interfaces.iter().map(Interface::length).sum()
    }

    /// Structural checks: the regions cover the window without overlap (by
    /// area and containment), and each interface separates regions carrying
    /// its declared values.
    pub fn validate(&self, window: &Polygon) -> Result<()> {
        if self.regions.is_empty() {
            return Err(Error::NonTiling("no regions".into()));
        }
        let (lo, hi) = window.bbox();
        let scale = (hi.x - lo.x).max(hi.y - lo.y).max(1.0);
        let tol = 1e-9 * scale;
        let total: f64 = self.regions.iter().map(Region::area).sum();
        let wa = window.area();
        if (total - wa).abs() > 1e-9 * wa.max(1.0) {
            return Err(Error::NonTiling(format!(
                "region areas sum to {total}, window area is {wa}"
            )));
        }
        for (i, r) in self.regions.iter().enumerate() {
            if !r.value.is_finite() {
                return Err(Error::NonTiling(format!(
                    "region {i} has a non-finite value"
                )));
            }
            let (rlo, rhi) = r.outer.bbox();
            if rlo.x < lo.x - tol || rlo.y < lo.y - tol || rhi.x > hi.x + tol || rhi.y > hi.y + tol
            {
                return Err(Error::NonTiling(format!("region {i} leaves the window")));
            }
            let outside = r
                .outer
                .vertices()
                .iter()
                .find(|&&p| !window.contains(p) && window.distance_to_boundary(p) > tol);
            if let Some(p) = outside {
                return Err(Error::NonTiling(format!(
                    "region {i} has vertex ({}, {}) outside the window",
                    p.x, p.y
                )));
            }
        }
        for (index, itf) in self.interfaces.iter().enumerate() {
            let mismatch = |reason: String| Error::InterfaceMismatch { index, reason };
            if itf.points.len() < 2 {
                return Err(mismatch("fewer than two points".into()));
            }
            if itf.left_value == itf.right_value {
                return Err(mismatch(format!(
                    "equal values {} on both sides",
                    itf.left_value
                )));
            }
            // Probe across the longest segment near the middle of the polyline.
            let mid = itf.points.len() / 2;
            let k = if mid == itf.points.len() - 1 {
                mid - 1
            } else {
                mid
            };
            let (a, b) = (itf.points[k], itf.points[k + 1]);
            let d = b.sub(a);
            let len = d.norm();
            if len == 0.0 {
                return Err(mismatch("zero-length segment".into()));
            }
            let normal = Point::new(-d.y, d.x).scale(1.0 / len);
            let c = a.lerp(b, 0.5);
            let delta = (1e-3 * len).min(1e-6 * scale);
            let left = self.value_at(c.add(normal.scale(delta)));
            let right = self.value_at(c.sub(normal.scale(delta)));
            let close = |found: Option<f64>, want: f64| {
                found.is_some_and(|v| (v - want).abs() <= 1e-12 * want.abs().max(1.0))
            };
            if !close(left, itf.left_value) || !close(right, itf.right_value) {
                return Err(mismatch(format!(
                    "declared ({}, {}), found ({left:?}, {right:?})",
                    itf.left_value, itf.right_value
                )));
            }
        }
        Ok(())
    }

    /// Applies a rigid motion (or any orientation-preserving map) to all
    /// geometry.
    pub fn map_points(&self, f: impl Fn(Point) -> Point + Copy) -> Result<PiecewiseCell2D> {
        let regions = self
            .regions
            .iter()
            .map(|r| {
                Ok(Region {
                    outer: r.outer.map(f)?,
                    holes: r.holes.iter().map(|h| h.map(f)).collect::<Result<_>>()?,
                    value: r.value,
                })
            })
            .collect::<Result<_>>()?;
        let interfaces = self
            .interfaces
            .iter()
            .map(|i| Interface {
                points: i.points.iter().map(|&p| f(p)).collect(),
                ..i.clone()
            })
            .collect();
        Ok(PiecewiseCell2D {
            regions,
            interfaces,
        })
    }
}

/// The two-dimensional jump functional on a polygonal window. Fidelity
/// integrals are exact (triangle fans of a squared affine function).
pub fn jf_2d(window: &Polygon, v: &PiecewiseCell2D, p: &Params2D) -> Result<EnergyBreakdown> {
    v.validate(window)?;
    Ok(jf_2d_unchecked(v, p))
}

/// `jf_2d` without the structural validation.
pub fn jf_2d_unchecked(v: &PiecewiseCell2D, p: &Params2D) -> EnergyBreakdown {
    let xi = Point::new(p.xi()[0], p.xi()[1]);
    let jumps: f64 = v
        .interfaces
        .iter()
        .map(|i| i.length() * jump_cost(i.right_value - i.left_value, p.theta()))
        .sum();
    let fidelity: f64 = v.regions.iter().map(|r| r.fidelity(xi)).sum();
    EnergyBreakdown::new(p.alpha() * jumps, p.beta() * fidelity)
}
