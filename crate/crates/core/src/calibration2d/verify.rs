//! Numerical verification of the calibration hypotheses, the minimality
//! chain and the saturation along the jump set.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::CalibrationField2D;
use super::form::{g_functional, GValue};
use super::psi::{case_two_margin, endpoint_cases, PsiFunction};
use crate::bistaircase::{lower_value, upper_value};
use crate::cells::{jf_2d, PiecewiseCell2D};
use crate::energy::Params2D;
use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};
use crate::interface_curve::{g_theta, InterfaceCurve};
use crate::report::{CheckReport, MaxTracker, TrialReport};

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

fn par_max<T: Sync>(items: &[T], f: impl Fn(&T, &mut MaxTracker) + Sync + Send) -> MaxTracker {
    items
        .par_iter()
        .map(|it| {
            let mut t = MaxTracker::default();
            f(it, &mut t);
            t
        })
        .reduce(MaxTracker::default, MaxTracker::merge)
}

/// Equality, sign and pairwise bound of the profile for `n_x` base points
/// in `[0, 1]`, with the pairwise bound on an `n_s²` grid, plus the
/// endpoint table.
pub fn lemma_psi_verify(
    field: &CalibrationField2D,
    n_x: usize,
    n_s: usize,
    slack: f64,
) -> Result<Vec<CheckReport>> {
    let xs = grid(0.0, 1.0, n_x);
    let psis: Vec<(f64, PsiFunction)> = xs
        .iter()
        .map(|&x| Ok((x, field.psi_at(x)?)))
        .collect::<Result<_>>()?;
    let r2 = field.alpha * field.alpha;
    let spec_x = format!("{n_x} base points in [0, 1]");

    let equality = par_max(&psis, |(x, p), t| t.observe(p.equality_residual(), &[*x]));
    let sign = par_max(&psis, |(x, p), t| {
        t.observe(p.eval(p.c) - p.eval(p.d), &[*x])
    });
    let end = field.end;
    let ss = grid(-end, end, n_s);
    let pairs = par_max(&psis, |(x, p), t| {
        let vals: Vec<f64> = ss.iter().map(|&s| p.eval(s)).collect();
        for (i, &s1) in ss.iter().enumerate() {
            for (j, &s2) in ss.iter().enumerate() {
                let lhs = (vals[j] - vals[i]).powi(2) + (s2 - s1).powi(2);
                t.observe(lhs - r2, &[*x, s1, s2]);
            }
        }
    });
    let case_eq = par_max(&psis, |(x, p), t| {
        let rows = endpoint_cases(p);
        for r in &rows[2..5] {
            t.observe((r.lhs - r2).abs(), &[*x, r.case as f64]);
        }
    });
    let case_bound = par_max(&psis, |(x, p), t| {
        for r in endpoint_cases(p) {
            t.observe(r.lhs - r2, &[*x, r.case as f64]);
        }
    });
    let reduced = par_max(&psis, |(x, p), t| {
        t.observe(-case_two_margin(p.c, p.d), &[*x])
    });
    let boundary = par_max(&psis, |(x, p), t| {
        t.observe(case_two_margin(-2.0, p.d).abs(), &[*x])
    });

    Ok(vec![
        CheckReport::from_tracker(
            "psi_equality",
            spec_x.clone(),
            equality,
            crate::tolerances::EXACT,
        ),
        CheckReport::from_tracker("psi_sign", spec_x.clone(), sign, 0.0),
        CheckReport::from_tracker(
            "psi_inequality",
            format!("{n_x} base points, {n_s}^2 level pairs over [-{end}, {end}]^2"),
            pairs,
            slack,
        ),
        CheckReport::from_tracker(
            "psi_table_equalities",
            spec_x.clone(),
            case_eq,
            crate::tolerances::EXACT,
        ),
        CheckReport::from_tracker(
            "psi_table_bounds",
            spec_x.clone(),
            case_bound,
            crate::tolerances::EXACT,
        ),
        CheckReport::from_tracker(
            "psi_case_two_reduced",
            spec_x.clone(),
            reduced,
            crate::tolerances::EXACT,
        ),
        CheckReport::from_tracker(
            "psi_case_two_at_left_end",
            spec_x,
            boundary,
            crate::tolerances::EXACT,
        ),
    ])
}

/// `[A(x,z₂) - A(x,z₁)]² + [F(x,z₂) - F(x,z₁)]² - α²(z₂ - z₁)^{2θ}` over
/// `x` in `[0, 1]` and `z₁ ≤ z₂` in `[-half, half]`.
fn pair_bound(field: &CalibrationField2D, n_x: usize, n_z: usize, half: f64) -> MaxTracker {
    let xs = grid(0.0, 1.0, n_x);
    let zs = grid(-half, half, n_z);
    let two_theta = 2.0 * field.theta;
    let r2 = field.alpha * field.alpha;
    par_max(&xs, |&x, t| {
        let a: Vec<f64> = zs.iter().map(|&z| field.a(x, z)).collect();
        let f: Vec<f64> = zs.iter().map(|&z| field.f(x, z)).collect();
        for i in 0..zs.len() {
            for j in i..zs.len() {
                let rhs = if j == i {
                    0.0
                } else {
                    r2 * (zs[j] - zs[i]).powf(two_theta)
                };
                let lhs = (a[j] - a[i]).powi(2) + (f[j] - f[i]).powi(2);
                t.observe(lhs - rhs, &[x, zs[i], zs[j]]);
            }
        }
    })
}

/// Heatmap of the pairwise bound: for each `(x, z₁)` on the grid, the
/// largest `lhs - rhs` over `z₂ ≠ z₁`. Rows are `[x, z₁, violation]`.
pub fn pair_violation_map(
    field: &CalibrationField2D,
    n_x: usize,
    n_z: usize,
    half: f64,
) -> Vec<[f64; 3]> {
    let xs = grid(0.0, 1.0, n_x);
    let zs = grid(-half, half, n_z);
    let two_theta = 2.0 * field.theta;
    let r2 = field.alpha * field.alpha;
    xs.par_iter()
        .flat_map_iter(|&x| {
            let a: Vec<f64> = zs.iter().map(|&z| field.a(x, z)).collect();
            let f: Vec<f64> = zs.iter().map(|&z| field.f(x, z)).collect();
            let zs = &zs;
            (0..zs.len())
                .map(|i| {
                    let worst = (0..zs.len())
                        .filter(|&j| j != i)
                        .map(|j| {
                            let lhs = (a[j] - a[i]).powi(2) + (f[j] - f[i]).powi(2);
                            lhs - r2 * (zs[j] - zs[i]).abs().powf(two_theta)
                        })
                        .fold(f64::NEG_INFINITY, f64::max);
                    [x, zs[i], worst]
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// All hypotheses of the two-dimensional calibration, for the proven case.
pub fn verify_prop_hypotheses(
    field: &CalibrationField2D,
    n_x: usize,
    n_z: usize,
    half: f64,
    slack: f64,
) -> Result<Vec<CheckReport>> {
    let xs = grid(0.0, 1.0, n_x);
    let zs = grid(-half, half, n_z);
    let r2 = field.alpha * field.alpha;
    let spec_x = format!("{n_x} points in [0, 1]");
    let spec_z = format!("{n_z} levels in [-{half}, {half}]");

    let mut eq = MaxTracker::default();
    let mut sign = MaxTracker::default();
    let mut gap = MaxTracker::default();
    for &x in &xs {
        let da = field.a(x, 1.0) - field.a(x, 0.0);
        let df = field.f(x, 1.0) - field.f(x, 0.0);
        eq.observe((da * da + df * df - r2).abs(), &[x]);
        sign.observe(-da, &[x]);
        gap.observe((df - g_theta(x, field.theta)?).abs(), &[x]);
    }
    let mut even = MaxTracker::default();
    let mut seam = MaxTracker::default();
    let eps = 1e-13;
    for &z in &zs {
        even.observe((field.a(0.0, z) - field.a(0.0, -z)).abs(), &[0.0, z]);
        even.observe((field.a(1.0, z + 2.0) - field.a(1.0, -z)).abs(), &[1.0, z]);
        for k in -1..=2 {
            let k = k as f64;
            seam.observe((field.a(k + eps, z) - field.a(k - eps, z)).abs(), &[k, z]);
        }
    }
    let pairs = pair_bound(field, n_x, n_z, half);
    Ok(vec![
        CheckReport::from_tracker(
            "unit_jump_equality",
            spec_x.clone(),
            eq,
            crate::tolerances::EQUALITY,
        ),
        CheckReport::from_tracker("unit_jump_sign", spec_x.clone(), sign, 0.0),
        CheckReport::from_tracker(
            "level_gap_identity",
            spec_x.clone(),
            gap,
            crate::tolerances::EXACT,
        ),
        CheckReport::from_tracker(
            "even_extension",
            spec_z.clone(),
            even,
            crate::tolerances::EXACT,
        ),
        CheckReport::from_tracker("seam_continuity", spec_z, seam, crate::tolerances::EQUALITY),
        CheckReport::from_tracker(
            "pair_inequality",
            format!("{n_x} x {n_z} x {n_z} over [0, 1] x [-{half}, {half}]^2"),
            pairs,
            slack,
        ),
    ])
}

/// The pairwise bound for each `θ`, built with radius `α_θ`. Never fails a
/// suite: every report is marked exploratory.
pub fn explore_theta_scan(
    thetas: &[f64],
    n_x: usize,
    n_z: usize,
    half: f64,
    slack: f64,
) -> Result<Vec<CheckReport>> {
    thetas
        .iter()
        .map(|&theta| {
            let field = CalibrationField2D::exploratory(theta)?;
            let t = pair_bound(&field, n_x, n_z, half);
            Ok(CheckReport::from_tracker(
                format!("theta_scan[{theta}]"),
                format!("theta={theta}; {n_x} x {n_z} x {n_z} over [0, 1] x [-{half}, {half}]^2"),
                t,
                slack,
            )
            .exploratory())
        })
        .collect()
}

/// Where a saturation sample sits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SampleKind {
    Curve,
    Wall,
}

/// Ratio of the calibrated flux density to the jump cost density at `point`
/// on the jump set, travelling along `tangent`.
fn saturation_ratio(
    field: &CalibrationField2D,
    x: f64,
    tangent: Point,
    left: f64,
    right: f64,
) -> f64 {
    let e = Point::new(
        field.a(x, right) - field.a(x, left),
        field.f(x, right) - field.f(x, left),
    );
    e.dot(tangent) / (field.alpha * (right - left).abs().powf(field.theta) * tangent.norm())
}

/// Pointwise saturation on `n` samples of the jump set of the canonical
/// bi-staircase in `[-0.5, 1.5] × [-2, 2]`: three fifths on the curve, the
/// rest on the two walls, skipping `exclusion`-balls around junctions.
pub fn saturation_check(
    field: &CalibrationField2D,
    curve: &InterfaceCurve,
    n: usize,
    exclusion: f64,
) -> CheckReport {
    let n_curve = 3 * n / 5;
    let n_wall = n - n_curve;
    let mut t = MaxTracker::default();
    let mut samples = Vec::with_capacity(n);
    for i in 0..n_curve {
        let x = -0.5 + 2.0 * (i as f64 + 0.5) / n_curve as f64;
        samples.push((SampleKind::Curve, x, curve.eval(x)));
    }
    let f1 = curve.f1();
    for i in 0..n_wall {
        let s = (i as f64 + 0.5) / (n_wall / 2).max(1) as f64;
        if i < n_wall / 2 {
            samples.push((SampleKind::Wall, 0.0, -2.0 * s));
        } else {
            samples.push((SampleKind::Wall, 1.0, f1 + (2.0 - f1) * (s - 1.0)));
        }
    }
    let junctions = [Point::new(0.0, 0.0), Point::new(1.0, f1)];
    for (kind, x, y) in samples {
        let p = Point::new(x, y);
        if junctions.iter().any(|j| j.dist(p) < exclusion) {
            continue;
        }
        let ratio = match kind {
            SampleKind::Curve => {
                if (x - x.round()).abs() < exclusion {
                    continue;
                }
                saturation_ratio(
                    field,
                    x,
                    Point::new(1.0, curve.derivative(x)),
                    upper_value(x),
                    lower_value(x),
                )
            }
            SampleKind::Wall => saturation_ratio(field, x, Point::new(0.0, 1.0), x - 1.0, x + 1.0),
        };
        t.observe((ratio - 1.0).abs(), &[x, y]);
    }
    CheckReport::from_tracker(
        "saturation",
        format!(
            "{n} samples on the jump set in [-0.5, 1.5] x [-2, 2], junction exclusion {exclusion}"
        ),
        t,
        1e-8,
    )
}

/// Points of the band of width `collar` inside the window, used to compare
/// boundary values.
fn collar_probes(window: &Polygon, collar: f64, per_edge: usize) -> Vec<Point> {
    let mut out = Vec::new();
    for (a, b) in window.edges() {
        let d = b.sub(a);
        let inward = Point::new(-d.y, d.x).scale(1.0 / d.norm());
        for i in 0..per_edge {
            let s = (i as f64 + 0.5) / per_edge as f64;
            for depth in [0.25, 0.75] {
                out.push(a.lerp(b, s).add(inward.scale(depth * collar)));
            }
        }
    }
    out.into_iter().filter(|p| window.contains(*p)).collect()
}

/// Fails with `CollarMismatch` if the two functions differ on the collar
/// probes. Probes that fall on neither function's regions are skipped.
pub fn check_collar(
    window: &Polygon,
    reference: &PiecewiseCell2D,
    v: &PiecewiseCell2D,
    collar: f64,
) -> Result<()> {
    for p in collar_probes(window, collar, 64) {
        match (reference.value_at(p), v.value_at(p)) {
            (Some(a), Some(b)) if (a - b).abs() > 1e-12 => {
                return Err(Error::CollarMismatch(format!(
                    "value {b} at ({}, {}), reference has {a}",
                    p.x, p.y
                )));
            }
            _ => {}
        }
    }
    Ok(())
}

/// One evaluated link of the chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub energy: f64,
    pub g: GValue,
}

pub fn chain_link(
    window: &Polygon,
    v: &PiecewiseCell2D,
    field: &CalibrationField2D,
    tol: f64,
) -> Result<ChainLink> {
    let p = Params2D::normalized(field.theta)?;
    Ok(ChainLink {
        energy: jf_2d(window, v, &p)?.total,
        g: g_functional(window, v, field, tol)?,
    })
}

/// Aggregates evaluated competitors against the candidate. `min_excess` is
/// the smallest `JF(v) - JF(u)`; the chain `JF(v) ≥ G(v) = G(u) = JF(u)` is
/// recorded as residuals.
pub fn chain_report(
    name: &str,
    candidate: &ChainLink,
    links: &[ChainLink],
    tol: f64,
) -> TrialReport {
    let mut report = TrialReport::empty(name, tol);
    report.trials = links.len() as u64;
    let mut chain_violation: f64 = 0.0;
    let mut g_spread: f64 = 0.0;
    let mut rep_gap: f64 = candidate.g.gap();
    for (i, l) in links.iter().enumerate() {
        let excess = l.energy - candidate.energy;
        if excess < report.min_excess {
            report.min_excess = excess;
            report.argmin = format!("competitor {i}");
        }
        chain_violation = chain_violation.max(l.g.definition - l.energy);
        g_spread = g_spread.max((l.g.definition - candidate.g.definition).abs());
        rep_gap = rep_gap.max(l.g.gap());
    }
    report.residuals.insert(
        "candidate_energy_vs_g".into(),
        (candidate.energy - candidate.g.definition).abs(),
    );
    report
        .residuals
        .insert("chain_violation".into(), chain_violation);
    report.residuals.insert("g_spread".into(), g_spread);
    report
        .residuals
        .insert("definition_vs_representation".into(), rep_gap);
    report.finish()
}

/// Checks the collars and evaluates the chain for explicit competitors.
pub fn verify_minimality_chain(
    window: &Polygon,
    candidate: &PiecewiseCell2D,
    competitors: &[PiecewiseCell2D],
    field: &CalibrationField2D,
    collar: f64,
    tol: f64,
) -> Result<TrialReport> {
    let quad_tol = crate::tolerances::LINE_INTEGRAL;
    let base = chain_link(window, candidate, field, quad_tol)?;
    let links: Vec<ChainLink> = competitors
        .par_iter()
        .map(|v| {
            check_collar(window, candidate, v, collar)?;
            chain_link(window, v, field, quad_tol)
        })
        .collect::<Result<_>>()?;
    Ok(chain_report("minimality_chain", &base, &links, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bistaircase::{BiStaircase, Rect};

    #[test]
    fn coarse_profile_and_hypotheses() {
        let f = CalibrationField2D::new();
        for r in lemma_psi_verify(&f, 11, 81, 1e-9).unwrap() {
            assert!(r.pass, "{r:?}");
        }
        for r in verify_prop_hypotheses(&f, 11, 41, 3.0, 1e-9).unwrap() {
            assert!(r.pass, "{r:?}");
        }
    }

    #[test]
    fn violation_map_is_nonpositive_at_zero() {
        let map = pair_violation_map(&CalibrationField2D::new(), 5, 21, 3.0);
        assert_eq!(map.len(), 105);
        assert!(
            map.iter().all(|r| r[2] <= 1e-9),
            "{:?}",
            map.iter().map(|r| r[2]).fold(f64::MIN, f64::max)
        );
        let hot = pair_violation_map(&CalibrationField2D::exploratory(0.5).unwrap(), 5, 21, 3.0);
        assert!(hot.iter().any(|r| r[2] > 0.0));
    }

    #[test]
    fn scan_at_zero_matches_hypotheses() {
        let f = CalibrationField2D::new();
        let scan = explore_theta_scan(&[0.0], 11, 41, 3.0, 1e-9).unwrap();
        let direct = verify_prop_hypotheses(&f, 11, 41, 3.0, 1e-9).unwrap();
        let pairs = direct
            .iter()
            .find(|r| r.check_name == "pair_inequality")
            .unwrap();
        assert_eq!(scan[0].max_violation, pairs.max_violation);
        assert!(scan[0].exploratory);
    }

    #[test]
    fn saturation_on_jump_set() {
        let f = CalibrationField2D::new();
        let curve = InterfaceCurve::build(0.0, 1e-12).unwrap();
        let r = saturation_check(&f, &curve, 200, 1e-8);
        assert!(r.pass, "{r:?}");
        assert!(r.samples >= 190);
    }

    #[test]
    fn candidate_chain_closes() {
        let f = CalibrationField2D::new();
        let curve = InterfaceCurve::build(0.0, 1e-12).unwrap();
        let window = Rect::new(-0.5, 1.5, -2.0, 2.0).unwrap().polygon();
        let s = BiStaircase::canonical(curve);
        let cells = s.layout(&window, 1e-9).unwrap().to_cells().unwrap();
        let link = chain_link(&window, &cells, &f, 1e-12).unwrap();
        assert!(link.g.gap() < 1e-9, "{link:?}");
        assert!((link.energy - link.g.definition).abs() < 1e-7, "{link:?}");
        let r = verify_minimality_chain(
            &window,
            &cells,
            std::slice::from_ref(&cells),
            &f,
            0.05,
            1e-7,
        )
        .unwrap();
        assert!(r.pass, "{r:?}");
    }
}
