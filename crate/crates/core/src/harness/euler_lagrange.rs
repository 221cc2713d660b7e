//! Necessary conditions for minimizers: jump placement between two values,
//! equal spacing of consecutive jumps, and merging of nearby jumps.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{canonical_h_v, jump_cost, linear_square_integral, Interval, Params1D};
use crate::error::{Error, Result};
use crate::report::TrialReport;

fn opt_err(e: argmin::core::Error) -> Error {
    Error::Optimizer(e.to_string())
}

/// Energy of the two-level function `a` then `b` with the jump at `t`.
struct TwoLevel {
    p: Params1D,
    a: f64,
    b: f64,
    window: Interval,
}

impl TwoLevel {
    fn energy(&self, t: f64) -> f64 {
        let (lo, hi, m) = (self.window.a(), self.window.b(), self.p.m());
        self.p.alpha() * jump_cost(self.b - self.a, self.p.theta())
            + self.p.beta()
                * (linear_square_integral(self.a, m, lo, t)
                    + linear_square_integral(self.b, m, t, hi))
    }
}

impl CostFunction for TwoLevel {
    type Param = f64;
    type Output = f64;

    fn cost(&self, t: &f64) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.energy(*t))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSymmetry {
    pub t_star: f64,
    /// `(a + b) / (2M)`.
    pub predicted: f64,
    /// `|M t* - (a + b)/2|`.
    pub residual: f64,
}

/// Optimal jump position between levels `a ≠ b` on `window`, by golden
/// section.
pub fn jump_symmetry_test(p: &Params1D, a: f64, b: f64, window: Interval) -> Result<JumpSymmetry> {
    if a == b {
        return Err(Error::param("levels", "the two levels must differ"));
    }
    let problem = TwoLevel {
        p: *p,
        a,
        b,
        window,
    };
    let (lo, hi) = (window.a(), window.b());
    let solver = GoldenSectionSearch::new(lo, hi)
        .map_err(opt_err)?
        .with_tolerance(1e-12)
        .map_err(opt_err)?;
    let res = Executor::new(problem, solver)
        .configure(|s| s.param(0.5 * (lo + hi)).max_iters(400))
        .run()
        .map_err(opt_err)?;
    let t_star = *res
        .state()
        .get_best_param()
        .ok_or_else(|| Error::Optimizer("no parameter".into()))?;
    let mean = 0.5 * (a + b);
    Ok(JumpSymmetry {
        t_star,
        predicted: mean / p.m(),
        residual: (p.m() * t_star - mean).abs(),
    })
}

/// Step function with fixed boundary levels, free interior levels and
/// `n` jumps; the parameter vector is `[t_1..t_n, v_1..v_{n-1}]`.
#[derive(Clone, Copy)]
struct Ladder {
    p: Params1D,
    n: usize,
    window: Interval,
    boundary: (f64, f64),
}

impl Ladder {
    fn levels(&self, x: &[f64]) -> Vec<f64> {
        let mut v = vec![self.boundary.0];
        v.extend_from_slice(&x[self.n..]);
        v.push(self.boundary.1);
        v
    }

    fn energy(&self, x: &[f64]) -> f64 {
        let (lo, hi) = (self.window.a(), self.window.b());
        let t = &x[..self.n];
        let mut penalty = 0.0;
        let mut prev = lo;
        for &ti in t {
            if ti <= prev {
                penalty += 1.0 + (prev - ti);
            }
            prev = ti.max(prev);
        }
        if prev >= hi {
            penalty += 1.0 + (prev - hi);
        }
        if penalty > 0.0 {
            return 1e6 * penalty;
        }
        let levels = self.levels(x);
        let mut cuts = vec![lo];
        cuts.extend_from_slice(t);
        cuts.push(hi);
        let (alpha, beta, m, theta) = (self.p.alpha(), self.p.beta(), self.p.m(), self.p.theta());
        let fid: f64 = (0..=self.n)
            .map(|i| linear_square_integral(levels[i], m, cuts[i], cuts[i + 1]))
            .sum();
        let jumps: f64 = levels
            .windows(2)
            .map(|w| jump_cost(w[1] - w[0], theta))
            .sum();
        alpha * jumps + beta * fid
    }
}

impl CostFunction for Ladder {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, x: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(self.energy(x))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Equidistance {
    pub positions: Vec<f64>,
    pub levels: Vec<f64>,
    pub gaps: Vec<f64>,
    pub energy: f64,
    /// `max |gap - 2H|` over consecutive jumps.
    pub gap_error: f64,
    pub starts: usize,
}

fn nelder_mead(problem: Ladder, simplex: Vec<Vec<f64>>) -> Result<(Vec<f64>, f64)> {
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-15)
        .map_err(opt_err)?;
    let res = Executor::new(problem, solver)
        .configure(|s| s.max_iters(20_000))
        .run()
        .map_err(opt_err)?;
    let x = res
        .state()
        .get_best_param()
        .cloned()
        .ok_or_else(|| Error::Optimizer("no parameter".into()))?;
    Ok((x, res.state().get_best_cost()))
}

fn simplex_around(x: &[f64], size: f64) -> Vec<Vec<f64>> {
    let mut out = vec![x.to_vec()];
    for i in 0..x.len() {
        let mut y = x.to_vec();
        y[i] += size;
        out.push(y);
    }
    out
}

/// Joint optimization of `n_jumps` positions and the interior levels by
/// multi-start Nelder–Mead, followed by restarts from the best point.
pub fn equidistance_test(
    p: &Params1D,
    n_jumps: usize,
    window: Interval,
    boundary: (f64, f64),
    starts: usize,
    seed: u64,
) -> Result<Equidistance> {
    if !(2..=3).contains(&n_jumps) {
        return Err(Error::param("n_jumps", "must be 2 or 3"));
    }
    let problem = Ladder {
        p: *p,
        n: n_jumps,
        window,
        boundary,
    };
    let (lo, hi) = (window.a(), window.b());
    let runs: Vec<(Vec<f64>, f64)> = (0..starts.max(1) as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut t: Vec<f64> = (0..n_jumps).map(|_| rng.gen_range(lo..hi)).collect();
            t.sort_by(f64::total_cmp);
            let (b0, b1) = (boundary.0.min(boundary.1), boundary.0.max(boundary.1));
            let mut v: Vec<f64> = (1..n_jumps).map(|_| rng.gen_range(b0..=b1)).collect();
            v.sort_by(f64::total_cmp);
            t.extend(v);
            nelder_mead(problem, simplex_around(&t, 0.3))
        })
        .collect::<Result<_>>()?;
    let mut best = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one start");
    for size in [1e-2, 1e-4, 1e-6] {
        let polished = nelder_mead(problem, simplex_around(&best.0, size))?;
        if polished.1 <= best.1 {
            best = polished;
        }
    }
    let positions = best.0[..n_jumps].to_vec();
    let levels = problem.levels(&best.0);
    let gaps: Vec<f64> = positions.windows(2).map(|w| w[1] - w[0]).collect();
    let (h, _) = canonical_h_v(p);
    let gap_error = gaps.iter().map(|g| (g - 2.0 * h).abs()).fold(0.0, f64::max);
    Ok(Equidistance {
        positions,
        levels,
        gaps,
        energy: best.1,
        gap_error,
        starts,
    })
}

/// Two jumps of the same sign a distance `gap` apart against the single jump
/// of their combined height. For small `gap` the merged function is
/// cheaper by subadditivity of the jump cost; `min_excess` is the smallest
/// `E(split) - E(merged)`.
pub fn merge_jumps_check(
    p: &Params1D,
    trials: u64,
    seed: u64,
    gap: f64,
    tol: f64,
) -> Result<TrialReport> {
    let window = Interval::new(-1.0, 1.0)?;
    let (alpha, beta, m, theta) = (p.alpha(), p.beta(), p.m(), p.theta());
    let energy = |levels: &[f64], cuts: &[f64]| {
        let mut c = vec![window.a()];
        c.extend_from_slice(cuts);
        c.push(window.b());
        let fid: f64 = levels
            .iter()
            .enumerate()
            .map(|(i, &l)| linear_square_integral(l, m, c[i], c[i + 1]))
            .sum();
        let jumps: f64 = levels
            .windows(2)
            .map(|w| jump_cost(w[1] - w[0], theta))
            .sum();
        alpha * jumps + beta * fid
    };
    let mut report = TrialReport::empty(format!("merge_nearby_jumps theta={theta}"), tol);
    report.trials = trials;
    for i in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i);
        let base: f64 = rng.gen_range(-1.0..1.0);
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let h1 = sign * rng.gen_range(0.1..2.0);
        let h2 = sign * rng.gen_range(0.1..2.0);
        let t: f64 = rng.gen_range(-0.8..0.8);
        let split = energy(&[base, base + h1, base + h1 + h2], &[t, t + gap]);
        let merged = energy(&[base, base + h1 + h2], &[t]);
        let excess = split - merged;
        if excess < report.min_excess {
            report.min_excess = excess;
            report.argmin = format!("seed={seed} trial={i}");
        }
    }
    Ok(report.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_jump_examples() {
        let p = Params1D::normalized(0.0).unwrap();
        let w = Interval::new(-3.0, 3.0).unwrap();
        let r = jump_symmetry_test(&p, 0.0, 2.0, w).unwrap();
        assert!((r.t_star - 1.0).abs() < 1e-6, "{r:?}");
        let r = jump_symmetry_test(&p, -2.0, 0.0, w).unwrap();
        assert!((r.t_star + 1.0).abs() < 1e-6, "{r:?}");
        assert!(jump_symmetry_test(&p, 0.0, 0.0, w).is_err());
        let q = Params1D::new(0.3, 2.0, 1.5, 2.5).unwrap();
        let r = jump_symmetry_test(&q, 1.0, 4.0, w).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");
    }

    #[test]
    fn two_jumps_are_two_apart() {
        let p = Params1D::normalized(0.0).unwrap();
        let r =
            equidistance_test(&p, 2, Interval::new(-3.0, 3.0).unwrap(), (-2.0, 2.0), 8, 4).unwrap();
        assert!(r.gap_error < 1e-4, "{r:?}");
        assert!((r.positions[0] + 1.0).abs() < 1e-4);
        assert!(r.levels[1].abs() < 1e-4);
        assert!((r.energy - 14.0).abs() < 1e-8);
    }

    #[test]
    fn other_seeds_agree() {
        let p = Params1D::normalized(0.0).unwrap();
        let w = Interval::new(-3.0, 3.0).unwrap();
        let a = equidistance_test(&p, 2, w, (-2.0, 2.0), 5, 1).unwrap();
        let b = equidistance_test(&p, 2, w, (-2.0, 2.0), 5, 99).unwrap();
        assert!((a.positions[0] - b.positions[0]).abs() < 1e-4);
    }

    #[test]
    fn invalid_jump_count() {
        let p = Params1D::normalized(0.0).unwrap();
        assert!(
            equidistance_test(&p, 4, Interval::new(-3.0, 3.0).unwrap(), (-2.0, 2.0), 1, 0).is_err()
        );
    }

    #[test]
    fn merging_is_cheaper() {
        for theta in [0.0, 0.5, 0.9] {
            let p = Params1D::normalized(theta).unwrap();
            let r = merge_jumps_check(&p, 500, 2, 1e-6, 1e-9).unwrap();
            assert!(r.pass && r.min_excess > 0.0, "{r:?}");
        }
    }
}
