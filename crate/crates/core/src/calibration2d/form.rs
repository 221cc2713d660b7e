//! Line integrals of the level forms `A(x, z) dx + F(x, z) dy` and the
//! boundary flux functional.

use serde::{Deserialize, Serialize};

use super::field::CalibrationField2D;
use crate::cells::PiecewiseCell2D;
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, Point, Polygon};
use crate::interface_curve::InterfaceCurve;
use crate::quadrature::gauss_legendre_split;

/// Parameters in `(0, 1)` where `x(t)` crosses an integer or `z ± 1`, the
/// only places where the integrand can fail to be smooth.
fn kink_params(p: Point, q: Point, levels: &[f64]) -> Vec<f64> {
    let dx = q.x - p.x;
    if dx == 0.0 {
        return Vec::new();
    }
    let (lo, hi) = (p.x.min(q.x), p.x.max(q.x));
    let mut xs: Vec<f64> = ((lo.floor() as i64)..=(hi.ceil() as i64))
        .map(|k| k as f64)
        .collect();
    for z in levels {
        xs.push(z - 1.0);
        xs.push(z + 1.0);
    }
    xs.into_iter()
        .filter(|&x| x > lo && x < hi)
        .map(|x| (x - p.x) / dx)
        .collect()
}

fn segment(
    field: &CalibrationField2D,
    p: Point,
    q: Point,
    levels: &[f64],
    weights: &[f64],
    tol: f64,
) -> Result<f64> {
    let d = q.sub(p);
    if d.x == 0.0 {
        return Ok(levels
            .iter()
            .zip(weights)
            .map(|(z, w)| w * field.f(p.x, *z))
            .sum::<f64>()
            * d.y);
    }
    let integrand = |t: f64| {
        let x = p.x + t * d.x;
        levels
            .iter()
            .zip(weights)
            .map(|(z, w)| w * (field.a(x, *z) * d.x + field.f(x, *z) * d.y))
            .sum::<f64>()
    };
    gauss_legendre_split(integrand, 0.0, 1.0, &kink_params(p, q, levels), tol)
}

/// `∫_γ ω_z` along a polyline, with per-segment tolerance `tol`.
pub fn line_integral_form(
    field: &CalibrationField2D,
    points: &[Point],
    z: f64,
    tol: f64,
) -> Result<f64> {
    points
        .windows(2)
        .map(|w| segment(field, w[0], w[1], &[z], &[1.0], tol))
        .sum()
}

/// `∫_γ (ω_right - ω_left)` along a polyline, as a single integrand.
pub fn jump_integral(
    field: &CalibrationField2D,
    points: &[Point],
    left: f64,
    right: f64,
    tol: f64,
) -> Result<f64> {
    points
        .windows(2)
        .map(|w| segment(field, w[0], w[1], &[right, left], &[1.0, -1.0], tol))
        .sum()
}

/// `∫ (ω_right - ω_left)` along the exact graph of the interface curve over
/// `[a, b]`, travelled in the direction of increasing `x`.
pub fn curve_jump_integral(
    field: &CalibrationField2D,
    curve: &InterfaceCurve,
    a: f64,
    b: f64,
    left: f64,
    right: f64,
    tol: f64,
) -> Result<f64> {
    let mut breaks: Vec<f64> = ((a.floor() as i64)..=(b.ceil() as i64))
        .map(|k| k as f64)
        .collect();
    breaks.extend([left - 1.0, left + 1.0, right - 1.0, right + 1.0]);
    let integrand = |x: f64| {
        let da = field.a(x, right) - field.a(x, left);
        let df = field.f(x, right) - field.f(x, left);
        da + df * curve.derivative(x)
    };
    gauss_legendre_split(integrand, a, b, &breaks, tol)
}

/// Both evaluations of the flux functional.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GValue {
    /// Sum over the window boundary of the form at the inside value.
    pub definition: f64,
    /// Level-set boundaries plus jumps across interfaces.
    pub representation: f64,
}

impl GValue {
    pub fn gap(&self) -> f64 {
        (self.definition - self.representation).abs()
    }
}

const ON_BOUNDARY: f64 = 1e-9;

fn on_window_edge(window: &Polygon, p: Point, q: Point) -> bool {
    window.edges().any(|(a, b)| {
        point_segment_distance(p, a, b) <= ON_BOUNDARY
            && point_segment_distance(q, a, b) <= ON_BOUNDARY
    })
}

/// Boundary-only evaluation. Every region edge lying on the window boundary
/// contributes `∫ω_value` in the region's counterclockwise direction.
pub fn g_definition(
    window: &Polygon,
    v: &PiecewiseCell2D,
    field: &CalibrationField2D,
    tol: f64,
) -> Result<f64> {
    let mut total = 0.0;
    let mut covered = 0.0;
    for r in &v.regions {
        for (p, q) in r.outer.edges() {
            if on_window_edge(window, p, q) {
                covered += p.dist(q);
                total += segment(field, p, q, &[r.value], &[1.0], tol)?;
            }
        }
    }
    let perimeter = window.perimeter();
    if (covered - perimeter).abs() > 1e-9 * perimeter.max(1.0) {
        return Err(Error::BoundaryLabeling(format!(
            "region edges cover {covered} of perimeter {perimeter}"
        )));
    }
    Ok(total)
}

/// Closed level-set boundaries plus interface jumps.
pub fn g_representation(v: &PiecewiseCell2D, field: &CalibrationField2D, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    for r in &v.regions {
        total += closed_integral(field, r.outer.vertices(), r.value, tol)?;
        for h in &r.holes {
            total -= closed_integral(field, h.vertices(), r.value, tol)?;
        }
    }
    for i in &v.interfaces {
        total += jump_integral(field, &i.points, i.left_value, i.right_value, tol)?;
    }
    Ok(total)
}

fn closed_integral(
    field: &CalibrationField2D,
    vertices: &[Point],
    z: f64,
    tol: f64,
) -> Result<f64> {
    let n = vertices.len();
    (0..n)
        .map(|i| segment(field, vertices[i], vertices[(i + 1) % n], &[z], &[1.0], tol))
        .sum()
}

pub fn g_functional(
    window: &Polygon,
    v: &PiecewiseCell2D,
    field: &CalibrationField2D,
    tol: f64,
) -> Result<GValue> {
    Ok(GValue {
        definition: g_definition(window, v, field, tol)?,
        representation: g_representation(v, field, tol)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::{Interface, Region};
    use crate::quadrature::adaptive_simpson;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fidelity_density(x: f64, z: f64) -> f64 {
        (3.0 * (z - x).powi(2)).min(3.0)
    }

    #[test]
    fn vertical_segment_is_f() {
        let f = CalibrationField2D::new();
        for z in [-1.5, 0.0, 0.7] {
            let v = line_integral_form(&f, &[Point::new(0.0, 0.0), Point::new(0.0, 1.0)], z, 1e-12)
                .unwrap();
            assert!((v - f.f(0.0, z)).abs() < 1e-15);
        }
    }

    #[test]
    fn green_identity_on_rectangles() {
        let f = CalibrationField2D::new();
        for &(x0, x1, z) in &[
            (0.0, 1.0, 0.0),
            (-0.7, 2.3, 0.4),
            (-3.0, 3.0, 1.0),
            (0.2, 0.9, -2.5),
        ] {
            let r = Polygon::rectangle(x0, x1, -0.3, 1.2).unwrap();
            let loop_value = closed_integral(&f, r.vertices(), z, 1e-13).unwrap();
            let area = 1.5 * adaptive_simpson(|x| fidelity_density(x, z), x0, x1, 1e-12).unwrap();
            let area_split = 1.5
                * [x0, z - 1.0, z + 1.0, x1]
                    .iter()
                    .copied()
                    .filter(|t| (x0..=x1).contains(t))
                    .collect::<Vec<_>>()
                    .windows(2)
                    .map(|w| {
                        adaptive_simpson(|x| fidelity_density(x, z), w[0], w[1], 1e-13).unwrap()
                    })
                    .sum::<f64>();
            assert!((area - area_split).abs() < 1e-8);
            assert!(
                (loop_value - area_split).abs() < 1e-10,
                "{loop_value} vs {area_split}"
            );
        }
    }

    #[test]
    fn green_identity_on_random_convex_polygons() {
        let f = CalibrationField2D::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let cx: f64 = rng.gen_range(-2.0..2.0);
            let cy: f64 = rng.gen_range(-2.0..2.0);
            let mut angles: Vec<f64> = (0..7)
                .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
                .collect();
            angles.sort_by(f64::total_cmp);
            let pts: Vec<Point> = angles
                .iter()
                .map(|a| Point::new(cx + a.cos(), cy + a.sin()))
                .collect();
            let poly = match Polygon::new(pts) {
                Ok(p) => p,
                Err(_) => continue,
            };
            let z: f64 = rng.gen_range(-2.0..2.0);
            let loop_value = closed_integral(&f, poly.vertices(), z, 1e-13).unwrap();
            // Height of the polygon above each x, integrated piecewise.
            let height = |x: f64| {
                let mut ys: Vec<f64> = poly
                    .edges()
                    .filter(|(a, b)| (a.x - x) * (b.x - x) <= 0.0 && a.x != b.x)
                    .map(|(a, b)| a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x))
                    .collect();
                ys.sort_by(f64::total_cmp);
                ys.last().zip(ys.first()).map_or(0.0, |(h, l)| h - l)
            };
            let mut knots: Vec<f64> = poly.vertices().iter().map(|p| p.x).collect();
            knots.extend([z - 1.0, z + 1.0]);
            let (lo, hi) = poly.bbox();
            knots.retain(|t| *t >= lo.x && *t <= hi.x);
            knots.sort_by(f64::total_cmp);
            let area: f64 = knots
                .windows(2)
                .map(|w| {
                    adaptive_simpson(|x| height(x) * fidelity_density(x, z), w[0], w[1], 1e-13)
                        .unwrap()
                })
                .sum();
            assert!((loop_value - area).abs() < 1e-8, "{loop_value} vs {area}");
        }
    }

    #[test]
    fn curve_saturates_at_alpha_times_length() {
        let f = CalibrationField2D::new();
        let curve = InterfaceCurve::build(0.0, 1e-12).unwrap();
        let flux = curve_jump_integral(&f, &curve, 0.0, 1.0, 0.0, 1.0, 1e-13).unwrap();
        let length = curve.arclength(0.0, 1.0, 1e-14).unwrap();
        assert!(
            (flux - 4.0 * length).abs() < 1e-10,
            "{flux} vs {}",
            4.0 * length
        );
        let poly = curve.polyline(0.0, 1.0, 1e-10);
        let chordal = jump_integral(&f, &poly, 0.0, 1.0, 1e-13).unwrap();
        assert!((chordal - flux).abs() < 1e-8);
    }

    #[test]
    fn constant_square_is_fidelity() {
        let f = CalibrationField2D::new();
        let w = Polygon::rectangle(0.0, 1.0, 0.0, 1.0).unwrap();
        let v = PiecewiseCell2D {
            regions: vec![Region::new(w.clone(), 0.0)],
            interfaces: vec![],
        };
        let g = g_functional(&w, &v, &f, 1e-13).unwrap();
        assert!((g.definition - 1.0).abs() < 1e-13);
        assert!((g.representation - 1.0).abs() < 1e-13);
    }

    #[test]
    fn two_regions_telescope() {
        let f = CalibrationField2D::new();
        let w = Polygon::rectangle(-1.0, 1.0, 0.0, 1.0).unwrap();
        let left = Polygon::rectangle(-1.0, 0.3, 0.0, 1.0).unwrap();
        let right = Polygon::rectangle(0.3, 1.0, 0.0, 1.0).unwrap();
        let v = PiecewiseCell2D {
            regions: vec![Region::new(left, -0.5), Region::new(right, 1.5)],
            interfaces: vec![Interface {
                points: vec![Point::new(0.3, 0.0), Point::new(0.3, 1.0)],
                left_value: -0.5,
                right_value: 1.5,
            }],
        };
        let g = g_functional(&w, &v, &f, 1e-13).unwrap();
        assert!(g.gap() < 1e-12, "{g:?}");
        let bad = PiecewiseCell2D {
            regions: vec![v.regions[0].clone()],
            interfaces: vec![],
        };
        assert!(matches!(
            g_definition(&w, &bad, &f, 1e-12),
            Err(Error::BoundaryLabeling(_))
        ));
    }
}
