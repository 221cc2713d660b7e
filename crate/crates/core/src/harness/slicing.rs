//! Horizontal slicing of two-dimensional competitors.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bistaircase::Rect;
use crate::cells::{jf_2d, Interface, PiecewiseCell2D, Region};
use crate::energy::{
    jf_1d, jump_cost, linear_square_integral, Interval, Params1D, Params2D, PureJump1D,
};
use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::quadrature::gauss_legendre_panel;
use crate::report::{CheckReport, MaxTracker, TrialReport};

/// `(x, y) ↦ u(x)` on the rectangle, as stripes with upward interfaces.
pub fn extend_to_cells(u: &PureJump1D, rect: Rect) -> Result<PiecewiseCell2D> {
    let lines: Vec<(f64, f64)> = interior_jumps(u, rect)?
        .into_iter()
        .map(|x| (x, x))
        .collect();
    stripes(u, rect, &lines)
}

fn interior_jumps(u: &PureJump1D, rect: Rect) -> Result<Vec<f64>> {
    let window = Interval::new(rect.x0, rect.x1)?;
    Ok(u.pieces(window)?
        .iter()
        .skip(1)
        .map(|piece| piece.0)
        .collect())
}

/// Stripes of `u` with the `i`-th interface running from `(lines[i].0, y0)`
/// to `(lines[i].1, y1)`.
fn stripes(u: &PureJump1D, rect: Rect, lines: &[(f64, f64)]) -> Result<PiecewiseCell2D> {
    let mut bounds = vec![(rect.x0, rect.x0)];
    bounds.extend_from_slice(lines);
    bounds.push((rect.x1, rect.x1));
    let mut regions = Vec::new();
    let mut interfaces = Vec::new();
    let values: Vec<f64> = u
        .pieces(Interval::new(rect.x0, rect.x1)?)?
        .iter()
        .map(|piece| piece.2)
        .collect();
    for (i, w) in bounds.windows(2).enumerate() {
        let (l, r) = (w[0], w[1]);
        let poly = Polygon::new(vec![
            Point::new(l.0, rect.y0),
            Point::new(r.0, rect.y0),
            Point::new(r.1, rect.y1),
            Point::new(l.1, rect.y1),
        ])?;
        regions.push(Region::new(poly, values[i]));
        if i < lines.len() {
            interfaces.push(Interface {
                points: vec![Point::new(r.0, rect.y0), Point::new(r.1, rect.y1)],
                left_value: values[i],
                right_value: values[i + 1],
            });
        }
    }
    Ok(PiecewiseCell2D {
        regions,
        interfaces,
    })
}

/// The extension with jump `index` tilted: its bottom end moved by `-shift`
/// and its top end by `+shift`.
pub fn tilted_competitor(
    u: &PureJump1D,
    rect: Rect,
    index: usize,
    shift: f64,
) -> Result<PiecewiseCell2D> {
    let xs = interior_jumps(u, rect)?;
    if index >= xs.len() {
        return Err(Error::param(
            "index",
            format!("only {} interior jumps", xs.len()),
        ));
    }
    let lines: Vec<(f64, f64)> = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if i == index {
                (x - shift, x + shift)
            } else {
                (x, x)
            }
        })
        .collect();
    stripes(u, rect, &lines)
}

/// `n` random single-jump tilts that keep the stripes disjoint.
pub fn random_tilts(
    u: &PureJump1D,
    rect: Rect,
    n: usize,
    seed: u64,
) -> Result<Vec<PiecewiseCell2D>> {
    let xs = interior_jumps(u, rect)?;
    if xs.is_empty() {
        return Err(Error::param("u", "no interior jumps to tilt"));
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let k = rng.gen_range(0..xs.len());
        let left = if k == 0 { rect.x0 } else { xs[k - 1] };
        let right = if k + 1 == xs.len() {
            rect.x1
        } else {
            xs[k + 1]
        };
        let room = 0.45 * (xs[k] - left).min(right - xs[k]);
        let shift = rng.gen_range(-room..room);
        out.push(tilted_competitor(u, rect, k, shift)?);
    }
    Ok(out)
}

fn line_crossings(poly: &Polygon, y: f64) -> Vec<f64> {
    let mut xs: Vec<f64> = poly
        .edges()
        .filter(|(a, b)| (a.y <= y && y < b.y) || (b.y <= y && y < a.y))
        .map(|(a, b)| a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y))
        .collect();
    xs.sort_by(f64::total_cmp);
    xs
}

fn polygon_slice_fidelity(poly: &Polygon, value: f64, y: f64, xi: [f64; 2]) -> f64 {
    line_crossings(poly, y)
        .chunks_exact(2)
        .map(|c| linear_square_integral(value - xi[1] * y, xi[0], c[0], c[1]))
        .sum()
}

/// Energy of the horizontal slice of `v` at height `y`: jumps counted from
/// interface crossings, fidelity from the region chords.
pub fn slice_energy(v: &PiecewiseCell2D, y: f64, p: &Params2D) -> f64 {
    let xi = p.xi();
    let fidelity: f64 = v
        .regions
        .iter()
        .map(|r| {
            polygon_slice_fidelity(&r.outer, r.value, y, xi)
                - r.holes
                    .iter()
                    .map(|h| polygon_slice_fidelity(h, r.value, y, xi))
                    .sum::<f64>()
        })
        .sum();
    let jumps: f64 = v
        .interfaces
        .iter()
        .map(|i| {
            let crossings = i
                .points
                .windows(2)
                .filter(|w| (w[0].y <= y && y < w[1].y) || (w[1].y <= y && y < w[0].y))
                .count();
            crossings as f64 * jump_cost(i.right_value - i.left_value, p.theta())
        })
        .sum();
    p.alpha() * jumps + p.beta() * fidelity
}

/// `∫ slice_energy dy`, with one Gauss panel between consecutive vertex
/// ordinates, where the integrand is a cubic polynomial.
pub fn slice_integral(v: &PiecewiseCell2D, rect: Rect, p: &Params2D) -> f64 {
    let mut ys: Vec<f64> = v
        .regions
        .iter()
        .flat_map(|r| {
            r.outer
                .vertices()
                .iter()
                .chain(r.holes.iter().flat_map(|h| h.vertices().iter()))
        })
        .map(|q| q.y)
        .chain(
            v.interfaces
                .iter()
                .flat_map(|i| i.points.iter().map(|q| q.y)),
        )
        .filter(|&y| y > rect.y0 && y < rect.y1)
        .collect();
    ys.push(rect.y0);
    ys.push(rect.y1);
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    ys.windows(2)
        .map(|w| gauss_legendre_panel(|y| slice_energy(v, y, p), w[0], w[1]))
        .sum()
}

/// The same integral by projection: every interface segment contributes
/// its vertical extent, and the fidelity term is the area integral.
pub fn slice_integral_projected(v: &PiecewiseCell2D, p: &Params2D) -> f64 {
    let jumps: f64 = v
        .interfaces
        .iter()
        .map(|i| {
            let extent: f64 = i.points.windows(2).map(|w| (w[1].y - w[0].y).abs()).sum();
            extent * jump_cost(i.right_value - i.left_value, p.theta())
        })
        .sum();
    let xi = Point::new(p.xi()[0], p.xi()[1]);
    let fidelity: f64 = v.regions.iter().map(|r| r.fidelity(xi)).sum();
    p.alpha() * jumps + p.beta() * fidelity
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicingReport {
    pub product: CheckReport,
    pub federer: TrialReport,
}

/// Product identity for the extension of `u`, and the slicing inequality
/// `∫ JF(v_y) dy ≤ JF(v) + tol` for each competitor. The quadrature and
/// projection evaluations of the slice integral are compared as a residual.
pub fn slicing_check(
    u: &PureJump1D,
    window: &Polygon,
    p: &Params1D,
    competitors: &[PiecewiseCell2D],
    tol: f64,
) -> Result<SlicingReport> {
    let rect = Rect::from_polygon(window)?;
    let p2 = Params2D::new(p.theta(), p.alpha(), p.beta(), [p.m(), 0.0])?;
    let ext = extend_to_cells(u, rect)?;
    let e2 = jf_2d(window, &ext, &p2)?.total;
    let e1 = jf_1d(Interval::new(rect.x0, rect.x1)?, u, p)?.total;
    let mut t = MaxTracker::default();
    t.observe(
        (e2 - (rect.y1 - rect.y0) * e1).abs() / e2.abs().max(1.0),
        &[e2, e1],
    );
    let product = CheckReport::from_tracker(
        "slicing_product",
        format!("extension over [{}, {}]", rect.y0, rect.y1),
        t,
        1e-12,
    );

    let mut federer = TrialReport::empty("slicing_inequality", tol);
    federer.trials = competitors.len() as u64;
    let mut quad_gap: f64 = 0.0;
    for (i, v) in competitors.iter().enumerate() {
        let energy = jf_2d(window, v, &p2)?.total;
        let sliced = slice_integral(v, rect, &p2);
        quad_gap = quad_gap.max((sliced - slice_integral_projected(v, &p2)).abs());
        let excess = energy - sliced;
        if excess < federer.min_excess {
            federer.min_excess = excess;
            federer.argmin = format!("competitor {i}");
        }
    }
    federer
        .residuals
        .insert("quadrature_vs_projection".into(), quad_gap);
    Ok(SlicingReport {
        product,
        federer: federer.finish(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::staircase::Staircase1D;

    fn staircase() -> (PureJump1D, Rect) {
        let w = Interval::new(-3.0, 3.0).unwrap();
        (
            Staircase1D::canonical().to_pure_jump(w),
            Rect::new(-3.0, 3.0, 0.0, 1.0).unwrap(),
        )
    }

    #[test]
    fn extension_energy_is_fourteen() {
        let (u, rect) = staircase();
        let cells = extend_to_cells(&u, rect).unwrap();
        let e = jf_2d(&rect.polygon(), &cells, &Params2D::normalized(0.0).unwrap()).unwrap();
        assert!((e.total - 14.0).abs() < 1e-12);
        let p = Params1D::normalized(0.0).unwrap();
        let r = slicing_check(&u, &rect.polygon(), &p, &[cells], 1e-9).unwrap();
        assert!(r.product.pass && r.federer.pass, "{r:?}");
        assert!(r.federer.min_excess.abs() < 1e-12);
    }

    #[test]
    fn tilt_has_slack() {
        let (u, rect) = staircase();
        let p2 = Params2D::normalized(0.0).unwrap();
        let v = tilted_competitor(&u, rect, 0, 0.3).unwrap();
        let e = jf_2d(&rect.polygon(), &v, &p2).unwrap().total;
        let s = slice_integral(&v, rect, &p2);
        let len = (1.0f64 + 0.36).sqrt();
        assert!((e - s - 4.0 * (len - 1.0)).abs() < 1e-12, "{e} {s}");
    }

    #[test]
    fn slice_of_extension_is_one_dimensional_energy() {
        let (u, rect) = staircase();
        let cells = extend_to_cells(&u, rect).unwrap();
        let p2 = Params2D::normalized(0.0).unwrap();
        assert!((slice_energy(&cells, 0.37, &p2) - 14.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_rectangles() {
        let (u, _) = staircase();
        let tri = Polygon::new(vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(0.0, 1.0),
        ])
        .unwrap();
        assert!(slicing_check(&u, &tri, &Params1D::normalized(0.0).unwrap(), &[], 1e-9).is_err());
    }

    #[test]
    fn random_tilts_satisfy_inequality() {
        let (u, rect) = staircase();
        let comps = random_tilts(&u, rect, 50, 8).unwrap();
        for theta in [0.0, 0.5] {
            let p = Params1D::normalized(theta).unwrap();
            let r = slicing_check(&u, &rect.polygon(), &p, &comps, 1e-9).unwrap();
            assert!(r.federer.pass, "{r:?}");
        }
    }
}
