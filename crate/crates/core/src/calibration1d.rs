//! The one-dimensional calibration field and the numerical checks of its
//! hypotheses.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{alpha_theta, jf_1d, Interval, Params1D, PureJump1D};
use crate::error::{Error, Result};
use crate::report::{CheckReport, MaxTracker, TrialReport};
use crate::staircase::Staircase1D;

/// `σ ↦ (3-θ)σ - (1-θ)σ³`, frozen outside its stationary points `±σ_θ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncatedCubic {
    pub theta: f64,
    pub sigma: f64,
}

impl TruncatedCubic {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&theta) {
            return Err(Error::param("theta", format!("{theta} not in [0, 1)")));
        }
        Ok(TruncatedCubic {
            theta,
            sigma: ((3.0 - theta) / (3.0 * (1.0 - theta))).sqrt(),
        })
    }

    /// The untruncated cubic.
    #[inline]
    pub fn phi(&self, s: f64) -> f64 {
        (3.0 - self.theta) * s - (1.0 - self.theta) * s * s * s
    }

    #[inline]
    pub fn phi_hat(&self, s: f64) -> f64 {
        self.phi(s.clamp(-self.sigma, self.sigma))
    }

    #[inline]
    pub fn phi_hat_derivative(&self, s: f64) -> f64 {
        if s.abs() >= self.sigma {
            0.0
        } else {
            (3.0 - self.theta) - 3.0 * (1.0 - self.theta) * s * s
        }
    }

    /// `φ̂(±∞) = ±(2/3)(3-θ)σ_θ`.
    pub fn plateau(&self) -> f64 {
        self.phi(self.sigma)
    }
}

/// `F(x, z) = ((3-θ)x + φ̂(z-x)) / (1-θ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationField1D {
    pub theta: f64,
    pub cubic: TruncatedCubic,
}

impl CalibrationField1D {
    pub fn new(theta: f64) -> Result<Self> {
        Ok(CalibrationField1D {
            theta,
            cubic: TruncatedCubic::new(theta)?,
        })
    }

    #[inline]
    pub fn f(&self, x: f64, z: f64) -> f64 {
        ((3.0 - self.theta) * x + self.cubic.phi_hat(z - x)) / (1.0 - self.theta)
    }

    /// `min{3(z-x)², (3-θ)/(1-θ)}`.
    #[inline]
    pub fn df_dx(&self, x: f64, z: f64) -> f64 {
        let s = z - x;
        (3.0 * s * s).min((3.0 - self.theta) / (1.0 - self.theta))
    }

    pub fn sigma(&self) -> f64 {
        self.cubic.sigma
    }
}

pub fn phi_hat(c: &TruncatedCubic, s: f64) -> f64 {
    c.phi_hat(s)
}

pub fn f_field(f: &CalibrationField1D, x: f64, z: f64) -> f64 {
    f.f(x, z)
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> + Clone + Send + Sync {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |i| {
        if i + 1 == n && n > 1 {
            hi
        } else {
            lo + i as f64 * step
        }
    })
}

/// Both calibration equalities over `j` in `[j_lo, j_hi]`, at integers and
/// at `extra_per_unit` extra points per unit step. Returns one report per
/// equality.
pub fn verify_equalities(
    f: &CalibrationField1D,
    j_lo: i64,
    j_hi: i64,
    extra_per_unit: usize,
    tol: f64,
) -> Vec<CheckReport> {
    let mut js: Vec<f64> = (j_lo..=j_hi).map(|j| j as f64).collect();
    for j in j_lo..j_hi {
        for k in 1..=extra_per_unit {
            js.push(j as f64 + k as f64 / (extra_per_unit + 1) as f64);
        }
    }
    let jump_value = 4.0 / (1.0 - f.theta);
    let mut flat = MaxTracker::default();
    let mut step = MaxTracker::default();
    for &j in &js {
        let a = f.f(2.0 * j + 1.0, 2.0 * j) - f.f(2.0 * j - 1.0, 2.0 * j);
        flat.observe((a - 2.0).abs(), &[j]);
        let b = f.f(2.0 * j - 1.0, 2.0 * j) - f.f(2.0 * j - 1.0, 2.0 * j - 2.0);
        step.observe((b - jump_value).abs(), &[j]);
    }
    let grid = format!(
        "theta={} j in [{j_lo}, {j_hi}], {} points",
        f.theta,
        js.len()
    );
    vec![
        CheckReport::from_tracker("fidelity_equality", grid.clone(), flat, tol),
        CheckReport::from_tracker("jump_equality", grid, step, tol),
    ]
}

/// `F(x₂,z) - F(x₁,z) ≤ (x₂-z)³ - (x₁-z)³` on an `n³` grid over
/// `[-half, half]³` with `x₁ ≤ x₂`, plus equality where both points lie in
/// the band `|z - x| ≤ σ`.
pub fn verify_inequality_horizontal(
    f: &CalibrationField1D,
    n: usize,
    half: f64,
    slack: f64,
    eq_tol: f64,
) -> (CheckReport, CheckReport) {
    let grid: Vec<f64> = linspace(-half, half, n).collect();
    let sigma = f.sigma();
    let (ineq, eq) = grid
        .par_iter()
        .map(|&z| {
            let mut ineq = MaxTracker::default();
            let mut eq = MaxTracker::default();
            for (i, &x1) in grid.iter().enumerate() {
                let f1 = f.f(x1, z);
                let c1 = (x1 - z).powi(3);
                for &x2 in &grid[i..] {
                    let lhs = f.f(x2, z) - f1;
                    let rhs = (x2 - z).powi(3) - c1;
                    ineq.observe(lhs - rhs, &[x1, x2, z]);
                    if z - sigma <= x1 && x2 <= z + sigma {
                        eq.observe((lhs - rhs).abs(), &[x1, x2, z]);
                    }
                }
            }
            (ineq, eq)
        })
        .reduce(
            || (MaxTracker::default(), MaxTracker::default()),
            |a, b| (a.0.merge(b.0), a.1.merge(b.1)),
        );
    let spec = format!(
        "theta={} (x1<=x2, z) on {n}^3 grid over [-{half}, {half}]",
        f.theta
    );
    (
        CheckReport::from_tracker("horizontal_inequality", spec.clone(), ineq, slack),
        CheckReport::from_tracker("horizontal_equality_band", spec, eq, eq_tol),
    )
}

/// `φ̂(b) - φ̂(a) ≤ 2^{2-θ}|b-a|^θ` on an `n²` grid over `[-half, half]²`.
pub fn verify_inequality_vertical(
    c: &TruncatedCubic,
    n: usize,
    half: f64,
    slack: f64,
) -> CheckReport {
    let grid: Vec<f64> = linspace(-half, half, n).collect();
    let k = 2f64.powf(2.0 - c.theta);
    let t = grid
        .par_iter()
        .map(|&a| {
            let mut t = MaxTracker::default();
            let pa = c.phi_hat(a);
            for &b in &grid {
                let rhs = if a == b {
                    0.0
                } else {
                    k * (b - a).abs().powf(c.theta)
                };
                t.observe(c.phi_hat(b) - pa - rhs, &[a, b]);
            }
            t
        })
        .reduce(MaxTracker::default, MaxTracker::merge);
    CheckReport::from_tracker(
        "vertical_inequality",
        format!(
            "theta={} (a, b) on {n}^2 grid over [-{half}, {half}]",
            c.theta
        ),
        t,
        slack,
    )
}

/// Equality of the vertical bound at the jump of the staircase:
/// `φ̂(1) - φ̂(-1) = 2^{2-θ}·2^θ = 4`.
pub fn vertical_equality_residual(c: &TruncatedCubic) -> f64 {
    (c.phi_hat(1.0) - c.phi_hat(-1.0) - 2f64.powf(2.0 - c.theta) * 2f64.powf(c.theta)).abs()
}

/// Both sides of the telescopic bound on `(-(2k+1), 2k+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TelescopicBound {
    pub lhs: f64,
    pub rhs: f64,
}

pub const DEFAULT_COLLAR: f64 = 0.1;

/// `JF(v)` against `F(b_k, 2k) - F(a_k, -2k)`. `v` must agree with the
/// canonical staircase on collars of width `collar` at both ends.
pub fn telescopic_bound(
    k: u32,
    v: &PureJump1D,
    f: &CalibrationField1D,
    collar: f64,
) -> Result<TelescopicBound> {
    if k == 0 {
        return Err(Error::param("k", "must be at least 1"));
    }
    let b = 2.0 * k as f64 + 1.0;
    let window = Interval::new(-b, b)?;
    check_collar(window, v, collar)?;
    let p = Params1D::new(f.theta, alpha_theta(f.theta), 3.0, 1.0)?;
    let lhs = jf_1d(window, v, &p)?.total;
    let z = 2.0 * k as f64;
    let rhs = f.f(b, z) - f.f(-b, -z);
    Ok(TelescopicBound { lhs, rhs })
}

fn check_collar(window: Interval, v: &PureJump1D, collar: f64) -> Result<()> {
    let (a, b) = (window.a(), window.b());
    if let Some(j) = v
        .jumps()
        .iter()
        .find(|j| j.position <= a + collar || j.position >= b - collar)
    {
        return Err(Error::CollarMismatch(format!(
            "jump at {} inside a collar",
            j.position
        )));
    }
    let s = Staircase1D::canonical();
    for x in [a + 0.5 * collar, b - 0.5 * collar] {
        if (v.eval(x) - s.eval(x)).abs() > 1e-9 {
            return Err(Error::CollarMismatch(format!(
                "value {} at {x}, staircase has {}",
                v.eval(x),
                s.eval(x)
            )));
        }
    }
    Ok(())
}

/// Random collar-respecting competitor on `(-(2k+1), 2k+1)`. Mixes fully
/// random step functions, perturbed staircases and oblique translations
/// forced back to the staircase values at the collars.
pub fn random_competitor(k: u32, collar: f64, rng: &mut impl Rng) -> PureJump1D {
    let b = 2.0 * k as f64 + 1.0;
    let lo_value = -2.0 * k as f64;
    let hi_value = 2.0 * k as f64;
    let (inner_a, inner_b) = (-b + collar, b - collar);
    let family = rng.gen_range(0..4);
    let mut steps: Vec<(f64, f64)> = Vec::new();
    match family {
        0 => {
            let n = rng.gen_range(1..=(2 * k as usize + 4));
            let mut pos: Vec<f64> = (0..n).map(|_| rng.gen_range(inner_a..inner_b)).collect();
            pos.sort_by(f64::total_cmp);
            let spread = b + 1.0;
            for (i, p) in pos.iter().enumerate() {
                let level = if i + 1 == n {
                    hi_value
                } else {
                    rng.gen_range(-spread..spread)
                };
                steps.push((*p, level));
            }
        }
        1 => {
            let jitter = rng.gen_range(0.0..0.6);
            let level_noise = rng.gen_range(0.0..0.5);
            let n = 2 * k as usize;
            for i in 0..n {
                let centre = -b + 2.0 + 2.0 * i as f64;
                let p = (centre + jitter * rng.gen_range(-1.0..1.0))
                    .clamp(inner_a + 1e-9, inner_b - 1e-9);
                let base = -2.0 * k as f64 + 2.0 * (i + 1) as f64;
                let level = if i + 1 == n {
                    hi_value
                } else {
                    base + level_noise * rng.gen_range(-1.0..1.0)
                };
                steps.push((p, level));
            }
            if rng.gen_bool(0.3) {
                let p = rng.gen_range(inner_a..inner_b);
                let level = v_at(lo_value, &steps, p) + rng.gen_range(-1.0..1.0);
                steps.push((p, level));
                steps.sort_by(|x, y| x.0.total_cmp(&y.0));
                // keep the right collar value
                if let Some(last) = steps.last_mut() {
                    last.1 = hi_value;
                }
            }
        }
        2 => {
            let tau = rng.gen_range(-1.0..1.0);
            let s = Staircase1D::new(1.0, 1.0, tau).expect("valid oblique translation");
            let inner = Interval::new(inner_a, inner_b).expect("nonempty interior");
            for p in s.jump_positions(inner) {
                steps.push((p, s.eval(p + 1e-12)));
            }
            let last = rng
                .gen_range(inner_a..inner_b)
                .max(steps.last().map_or(inner_a, |s| s.0));
            let first = rng
                .gen_range(inner_a..inner_b)
                .min(steps.first().map_or(inner_b, |s| s.0));
            steps.retain(|s| s.0 > first && s.0 < last);
            steps.insert(0, (first, s.eval(first + 1e-12)));
            steps.push((last, hi_value));
            steps.dedup_by(|x, y| x.0 == y.0);
        }
        _ => {
            let s = Staircase1D::canonical();
            let inner = Interval::new(-b, b).expect("nonempty window");
            for p in s.jump_positions(inner) {
                steps.push((p, s.eval(p + 0.5)));
            }
        }
    }
    build_levels(lo_value, &steps)
}

fn v_at(first: f64, steps: &[(f64, f64)], x: f64) -> f64 {
    steps
        .iter()
        .take_while(|s| s.0 <= x)
        .last()
        .map_or(first, |s| s.1)
}

fn build_levels(first: f64, steps: &[(f64, f64)]) -> PureJump1D {
    PureJump1D::from_levels(first, steps).expect("sorted distinct positions")
}

/// Randomized telescopic-bound trials. `pass` requires
/// `JF(v) ≥ rhs - tol` for all competitors and equality for the staircase.
pub fn telescopic_trials(
    k: u32,
    theta: f64,
    trials: u64,
    seed: u64,
    collar: f64,
    tol: f64,
) -> Result<TrialReport> {
    let f = CalibrationField1D::new(theta)?;
    let staircase = Staircase1D::canonical().to_pure_jump(Interval::new(
        -(2.0 * k as f64 + 1.0),
        2.0 * k as f64 + 1.0,
    )?);
    let reference = telescopic_bound(k, &staircase, &f, collar)?;
    let results: Vec<(u64, f64, bool)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let v = random_competitor(k, collar, &mut rng);
            let tb = telescopic_bound(k, &v, &f, collar)?;
            Ok((i, tb.lhs - tb.rhs, v == staircase))
        })
        .collect::<Result<_>>()?;
    let mut report = TrialReport::empty(format!("telescopic k={k} theta={theta}"), tol);
    report.trials = trials;
    let mut near_equal_other = 0.0;
    for (i, excess, is_candidate) in results {
        if excess < report.min_excess {
            report.min_excess = excess;
            report.argmin = format!("seed={seed} trial={i}");
        }
        if !is_candidate && excess.abs() <= tol {
            near_equal_other += 1.0;
        }
    }
    report.residuals.insert(
        "candidate_gap".into(),
        (reference.lhs - reference.rhs).abs(),
    );
    report
        .residuals
        .insert("non_candidate_equalities".into(), near_equal_other * tol);
    Ok(report.finish())
}
