//! Exhaustive search over step functions on discrete position and level
//! grids.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{jump_cost, linear_square_integral, Interval, Params1D, PureJump1D};
use crate::error::{Error, Result};

/// Discrete competitor class: step functions equal to `boundary.0` on
/// `(a, a + collar)` and to `boundary.1` on `(b - collar, b)`, with at most
/// `jump_budget` jumps at multiples of `position_step` and values at
/// multiples of `level_step` in `level_range`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompetitorSpec1D {
    pub window: Interval,
    pub collar: f64,
    pub jump_budget: usize,
    pub position_step: f64,
    pub level_step: f64,
    pub level_range: (f64, f64),
    pub boundary: (f64, f64),
    pub seed: u64,
}

impl CompetitorSpec1D {
    /// Steps 0.05 and 0.1, levels in `[-2, 2]`, collar 0.1, four jumps.
    pub fn staircase_window() -> Self {
        CompetitorSpec1D {
            window: Interval::new(-3.0, 3.0).expect("valid window"),
            collar: 0.1,
            jump_budget: 4,
            position_step: 0.05,
            level_step: 0.1,
            level_range: (-2.0, 2.0),
            boundary: (-2.0, 2.0),
            seed: 0,
        }
    }

    fn multiples(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let i0 = (lo / step - 1e-9).ceil() as i64;
        let i1 = (hi / step + 1e-9).floor() as i64;
        (i0..=i1).map(|i| i as f64 * step).collect()
    }

    pub fn positions(&self) -> Vec<f64> {
        let (a, b) = (self.window.a(), self.window.b());
        Self::multiples(a + self.collar, b - self.collar, self.position_step)
            .into_iter()
            .filter(|&p| p > a && p < b)
            .collect()
    }

    pub fn levels(&self) -> Vec<f64> {
        Self::multiples(self.level_range.0, self.level_range.1, self.level_step)
    }

    fn level_index(&self, levels: &[f64], v: f64) -> Result<usize> {
        levels
            .iter()
            .position(|&l| (l - v).abs() <= 1e-9 * self.level_step)
            .ok_or_else(|| Error::param("boundary", format!("{v} is not on the level grid")))
    }

    /// A uniformly drawn member of the class, keyed by `(seed, index)`.
    pub fn sample(&self, index: u64) -> Result<PureJump1D> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        let positions = self.positions();
        let levels = self.levels();
        let min_jumps = usize::from(self.boundary.0 != self.boundary.1);
        let n = rng.gen_range(min_jumps..=self.jump_budget.min(positions.len()).max(min_jumps));
        let mut chosen = rand::seq::index::sample(&mut rng, positions.len(), n).into_vec();
        chosen.sort_unstable();
        let mut steps = Vec::with_capacity(n);
        for (k, &i) in chosen.iter().enumerate() {
            let value = if k + 1 == n {
                self.boundary.1
            } else {
                levels[rng.gen_range(0..levels.len())]
            };
            steps.push((positions[i], value));
        }
        let v = PureJump1D::from_levels(self.boundary.0, &steps)?;
        Ok(v)
    }

    /// Whether `v` matches the boundary values on the collars.
    pub fn admits(&self, v: &PureJump1D) -> bool {
        let (a, b) = (self.window.a(), self.window.b());
        v.jumps()
            .iter()
            .all(|j| j.position >= a + self.collar - 1e-12 && j.position <= b - self.collar + 1e-12)
            && (v.eval(a + 0.5 * self.collar) - self.boundary.0).abs() < 1e-9
            && (v.eval(b - 0.5 * self.collar) - self.boundary.1).abs() < 1e-9
    }
}

/// Optimum of the discrete search.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub best_energy: f64,
    pub best: PureJump1D,
    /// Optimal energy with exactly `j` jumps, `j = 0..=budget` (infinite if
    /// infeasible).
    pub by_jump_count: Vec<f64>,
    pub transitions: u64,
}

/// Default guard on the number of transitions.
pub const DEFAULT_BUDGET: u64 = 2_000_000_000;

/// Dynamic programming over (last jump node, current level, jumps used).
/// Each layer adds one jump; layers are filled in parallel over the target
/// node.
pub fn brute_force_1d(
    p: &Params1D,
    spec: &CompetitorSpec1D,
    budget: u64,
) -> Result<BruteForceResult> {
    let positions = spec.positions();
    let levels = spec.levels();
    let start = spec.level_index(&levels, spec.boundary.0)?;
    let end = spec.level_index(&levels, spec.boundary.1)?;
    let (a, b) = (spec.window.a(), spec.window.b());
    let mut nodes = vec![a];
    nodes.extend(positions.iter().copied());
    let n = nodes.len();
    let nl = levels.len();
    let layers = spec.jump_budget;
    let transitions = layers as u64 * (n as u64 * n as u64 / 2) * (nl as u64 * nl as u64);
    if transitions > budget {
        return Err(Error::BudgetExceeded(format!(
            "{transitions} transitions, budget {budget}"
        )));
    }
    let (alpha, beta, m, theta) = (p.alpha(), p.beta(), p.m(), p.theta());
    let fid = |l: usize, i: usize, j: usize| {
        beta * linear_square_integral(levels[l], m, nodes[i], nodes[j])
    };
    let jc = |l: usize, k: usize| alpha * jump_cost(levels[k] - levels[l], theta);

    // value[node][level] for the current layer, with back pointers.
    let idx = |i: usize, l: usize| i * nl + l;
    let mut value = vec![f64::INFINITY; n * nl];
    value[idx(0, start)] = 0.0;
    let mut back: Vec<Vec<(usize, usize)>> = Vec::with_capacity(layers + 1);
    back.push(vec![(usize::MAX, usize::MAX); n * nl]);
    let mut layer_values = vec![value.clone()];
    for _ in 0..layers {
        let prev = layer_values.last().expect("at least one layer");
        let next: Vec<(f64, (usize, usize))> = (0..n * nl)
            .into_par_iter()
            .map(|s| {
                let (j, k) = (s / nl, s % nl);
                let mut best = (f64::INFINITY, (usize::MAX, usize::MAX));
                if j == 0 {
                    return best;
                }
                for i in 0..j {
                    for l in 0..nl {
                        let base = prev[idx(i, l)];
                        if l == k || !base.is_finite() {
                            continue;
                        }
                        let e = base + fid(l, i, j) + jc(l, k);
                        if e < best.0 {
                            best = (e, (i, l));
                        }
                    }
                }
                best
            })
            .collect();
        back.push(next.iter().map(|x| x.1).collect());
        layer_values.push(next.into_iter().map(|x| x.0).collect());
    }

    let mut by_jump_count = Vec::with_capacity(layers + 1);
    let mut best = (f64::INFINITY, 0usize, 0usize);
    for (layer, vals) in layer_values.iter().enumerate() {
        let mut layer_best = f64::INFINITY;
        for i in 0..n {
            let v = vals[idx(i, end)];
            if !v.is_finite() {
                continue;
            }
            let total = v + beta * linear_square_integral(levels[end], m, nodes[i], b);
            if total < layer_best {
                layer_best = total;
            }
            if total < best.0 {
                best = (total, layer, i);
            }
        }
        by_jump_count.push(layer_best);
    }
    if !best.0.is_finite() {
        return Err(Error::param("spec", "no admissible configuration"));
    }

    let (mut layer, mut i, mut l) = (best.1, best.2, end);
    let mut steps = Vec::new();
    while layer > 0 {
        steps.push((nodes[i], levels[l]));
        let (pi, pl) = back[layer][idx(i, l)];
        i = pi;
        l = pl;
        layer -= 1;
    }
    steps.reverse();
    Ok(BruteForceResult {
        best_energy: best.0,
        best: PureJump1D::from_levels(levels[start], &steps)?,
        by_jump_count,
        transitions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::jf_1d;

    fn small_spec() -> CompetitorSpec1D {
        CompetitorSpec1D {
            window: Interval::new(-3.0, 3.0).unwrap(),
            collar: 0.25,
            jump_budget: 3,
            position_step: 0.5,
            level_step: 1.0,
            level_range: (-2.0, 2.0),
            boundary: (-2.0, 2.0),
            seed: 1,
        }
    }

    /// Every configuration, scored directly.
    fn naive(p: &Params1D, spec: &CompetitorSpec1D) -> f64 {
        let pos = spec.positions();
        let lev = spec.levels();
        let mut best = f64::INFINITY;
        fn rec(
            p: &Params1D,
            spec: &CompetitorSpec1D,
            pos: &[f64],
            lev: &[f64],
            from: usize,
            steps: &mut Vec<(f64, f64)>,
            best: &mut f64,
        ) {
            let current = steps.last().map_or(spec.boundary.0, |s| s.1);
            if current == spec.boundary.1 {
                let v = PureJump1D::from_levels(spec.boundary.0, steps).unwrap();
                *best = best.min(jf_1d(spec.window, &v, p).unwrap().total);
            }
            if steps.len() == spec.jump_budget {
                return;
            }
            for i in from..pos.len() {
                for &l in lev {
                    if l == current {
                        continue;
                    }
                    steps.push((pos[i], l));
                    rec(p, spec, pos, lev, i + 1, steps, best);
                    steps.pop();
                }
            }
        }
        rec(p, spec, &pos, &lev, 0, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn matches_naive_enumeration() {
        for theta in [0.0, 0.5] {
            let p = Params1D::normalized(theta).unwrap();
            let spec = small_spec();
            let r = brute_force_1d(&p, &spec, DEFAULT_BUDGET).unwrap();
            let oracle = naive(&p, &spec);
            assert!(
                (r.best_energy - oracle).abs() < 1e-12,
                "theta {theta}: {} vs {oracle}",
                r.best_energy
            );
            let direct = jf_1d(spec.window, &r.best, &p).unwrap().total;
            assert!((direct - r.best_energy).abs() < 1e-12);
            assert!(spec.admits(&r.best));
        }
    }

    #[test]
    fn centred_window_has_no_jumps() {
        let p = Params1D::normalized(0.0).unwrap();
        let spec = CompetitorSpec1D {
            window: Interval::new(-1.0, 1.0).unwrap(),
            boundary: (0.0, 0.0),
            jump_budget: 2,
            position_step: 0.1,
            ..CompetitorSpec1D::staircase_window()
        };
        let r = brute_force_1d(&p, &spec, DEFAULT_BUDGET).unwrap();
        assert!(r.best.jumps().is_empty());
        assert!((r.best_energy - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_budget_is_the_constant() {
        let p = Params1D::normalized(0.0).unwrap();
        let spec = CompetitorSpec1D {
            jump_budget: 0,
            boundary: (1.0, 1.0),
            ..small_spec()
        };
        let r = brute_force_1d(&p, &spec, DEFAULT_BUDGET).unwrap();
        let constant = jf_1d(spec.window, &PureJump1D::constant(1.0), &p)
            .unwrap()
            .total;
        assert_eq!(r.best_energy, constant);
        let bad = CompetitorSpec1D {
            jump_budget: 0,
            ..small_spec()
        };
        assert!(brute_force_1d(&p, &bad, DEFAULT_BUDGET).is_err());
    }

    #[test]
    fn budget_guard() {
        let p = Params1D::normalized(0.0).unwrap();
        let spec = CompetitorSpec1D::staircase_window();
        assert!(matches!(
            brute_force_1d(&p, &spec, 1000),
            Err(Error::BudgetExceeded(_))
        ));
        assert!(spec.positions().len() <= 121 && spec.levels().len() == 41);
    }

    #[test]
    fn samples_never_beat_the_optimum() {
        let p = Params1D::normalized(0.0).unwrap();
        let spec = small_spec();
        let best = brute_force_1d(&p, &spec, DEFAULT_BUDGET)
            .unwrap()
            .best_energy;
        for i in 0..500 {
            let v = spec.sample(i).unwrap();
            assert!(spec.admits(&v));
            assert!(jf_1d(spec.window, &v, &p).unwrap().total >= best - 1e-12);
        }
        assert_eq!(spec.sample(7).unwrap(), spec.sample(7).unwrap());
    }
}
