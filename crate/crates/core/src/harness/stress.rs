//! Random competitors for the bi-staircase that agree with it near the
//! boundary of a rectangular window.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bistaircase::{BiStaircase, Hole, Layout, Rect};
use crate::calibration2d::verify::{chain_link, chain_report, check_collar, ChainLink};
use crate::calibration2d::CalibrationField2D;
use crate::cells::PiecewiseCell2D;
use crate::error::{Error, Result};
use crate::geometry::Polygon;
use crate::interface_curve::InterfaceCurve;
use crate::report::TrialReport;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompetitorSpec2D {
    pub window: Rect,
    pub collar: f64,
    /// Largest vertical displacement of the interface curve.
    pub bump_amplitude: f64,
    pub max_bumps: usize,
    /// Largest horizontal displacement of a wall.
    pub wall_bend: f64,
    pub wall_nodes: usize,
    /// Number of square islands per competitor is drawn from `0..=max_islands`.
    pub max_islands: usize,
    pub island_side: (f64, f64),
    /// Chord tolerance of the candidate's curve polyline.
    pub curve_tol: f64,
    pub seed: u64,
    pub max_attempts: usize,
}

impl Default for CompetitorSpec2D {
    fn default() -> Self {
        CompetitorSpec2D {
            window: Rect::new(-0.5, 1.5, -2.0, 2.0).expect("valid rectangle"),
            collar: 0.05,
            bump_amplitude: 0.3,
            max_bumps: 3,
            wall_bend: 0.3,
            wall_nodes: 17,
            max_islands: 2,
            island_side: (0.05, 0.4),
            curve_tol: 1e-9,
            seed: 0,
            max_attempts: 20,
        }
    }
}

/// How a competitor was made.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Candidate,
    Bumps,
    Walls,
    Islands,
    Mixed,
    Chord,
}

const FAMILIES: [Family; 6] = [
    Family::Candidate,
    Family::Bumps,
    Family::Walls,
    Family::Islands,
    Family::Mixed,
    Family::Chord,
];

/// `(1 - s²)²` bump of half-width `w` centred at `c`.
fn bump(x: f64, c: f64, w: f64, a: f64) -> f64 {
    let s = (x - c) / w;
    if s.abs() >= 1.0 {
        0.0
    } else {
        a * (1.0 - s * s).powi(2)
    }
}

pub struct Generator {
    spec: CompetitorSpec2D,
    curve: InterfaceCurve,
    base: Layout,
}

impl Generator {
    pub fn new(spec: CompetitorSpec2D, curve: InterfaceCurve) -> Result<Self> {
        if spec.collar <= 0.0 {
            return Err(Error::param("collar", "must be positive"));
        }
        let base =
            BiStaircase::canonical(curve.clone()).layout(&spec.window.polygon(), spec.curve_tol)?;
        Ok(Generator { spec, curve, base })
    }

    pub fn candidate(&self) -> Result<PiecewiseCell2D> {
        self.base.to_cells()
    }

    pub fn window(&self) -> Polygon {
        self.spec.window.polygon()
    }

    fn add_bumps(&self, layout: &mut Layout, rng: &mut ChaCha8Rng) -> Result<()> {
        let r = self.spec.window;
        let (lo, hi) = (r.x0 + 2.0 * self.spec.collar, r.x1 - 2.0 * self.spec.collar);
        let n = rng.gen_range(1..=self.spec.max_bumps.max(1));
        let bumps: Vec<(f64, f64, f64)> = (0..n)
            .map(|_| {
                let c = rng.gen_range(lo..hi);
                let w = rng
                    .gen_range(0.05..=(c - lo).min(hi - c).max(0.05))
                    .min((c - lo).min(hi - c));
                let a = rng.gen_range(-self.spec.bump_amplitude..=self.spec.bump_amplitude);
                (c, w, a)
            })
            .filter(|b| b.1 > 0.0)
            .collect();
        let total = |x: f64| bumps.iter().map(|&(c, w, a)| bump(x, c, w, a)).sum::<f64>();
        let amp = self.spec.bump_amplitude;
        layout.bump_curve(|x| total(x).clamp(-amp, amp))
    }

    fn bend_walls(&self, layout: &mut Layout, rng: &mut ChaCha8Rng) {
        let n = self.spec.wall_nodes.max(3);
        let collar = self.spec.collar;
        for i in 0..layout.walls.len() {
            if !rng.gen_bool(0.7) {
                continue;
            }
            let w = &layout.walls[i];
            let (ya, yb) = (w.points[0].y, w.points[w.points.len() - 1].y);
            let step = (yb - ya) / (n - 1) as f64;
            // The end on the window boundary stays fixed for one extra node
            // beyond the collar.
            let (sa, sb) = if w.is_lower() {
                (ya + collar + step, yb)
            } else {
                (ya, yb - collar - step)
            };
            let amp = rng.gen_range(-self.spec.wall_bend..=self.spec.wall_bend);
            let waves = rng.gen_range(1..=2) as f64;
            layout.bend_wall(i, n, move |y| {
                let s = ((y - sa) / (sb - sa)).clamp(0.0, 1.0);
                amp * (PI * waves * s).sin().powi(2) * if waves > 1.0 { 0.5 } else { 1.0 }
            });
        }
    }

    fn add_islands(&self, layout: &mut Layout, rng: &mut ChaCha8Rng) -> Result<()> {
        let r = self.spec.window;
        let n = rng.gen_range(1..=self.spec.max_islands.max(1));
        for _ in 0..n {
            let side = rng.gen_range(self.spec.island_side.0..=self.spec.island_side.1);
            let margin = self.spec.collar + side;
            let cx = rng.gen_range(r.x0 + margin..r.x1 - margin);
            let cy = rng.gen_range(r.y0 + margin..r.y1 - margin);
            let value = if rng.gen_bool(0.5) {
                rng.gen_range(-2i32..=3) as f64
            } else {
                rng.gen_range(-2.0..3.0)
            };
            let h = 0.5 * side;
            layout.holes.push(Hole {
                square: Polygon::rectangle(cx - h, cx + h, cy - h, cy + h)?,
                value,
            });
        }
        Ok(())
    }

    fn chord(&self, layout: &mut Layout) -> Result<()> {
        let f1 = self.curve.f1();
        let curve = &self.curve;
        layout.set_curve(|x| {
            if (0.0..=1.0).contains(&x) {
                f1 * x
            } else {
                curve.eval(x)
            }
        })
    }

    fn attempt(&self, family: Family, rng: &mut ChaCha8Rng) -> Result<PiecewiseCell2D> {
        let mut layout = self.base.clone();
        match family {
            Family::Candidate => {}
            Family::Bumps => self.add_bumps(&mut layout, rng)?,
            Family::Walls => self.bend_walls(&mut layout, rng),
            Family::Islands => self.add_islands(&mut layout, rng)?,
            Family::Mixed => {
                self.add_bumps(&mut layout, rng)?;
                self.bend_walls(&mut layout, rng);
                if rng.gen_bool(0.5) {
                    self.add_islands(&mut layout, rng)?;
                }
            }
            Family::Chord => self.chord(&mut layout)?,
        }
        let cells = layout.to_cells()?;
        cells.validate(&self.window())?;
        Ok(cells)
    }

    /// Competitor number `index`, retried with fresh randomness until it is
    /// a valid partition.
    pub fn competitor(&self, index: u64) -> Result<(Family, PiecewiseCell2D)> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream(index);
        let family = FAMILIES[rng.gen_range(0..FAMILIES.len())];
        for _ in 0..self.spec.max_attempts {
            if let Ok(cells) = self.attempt(family, &mut rng) {
                return Ok((family, cells));
            }
        }
        Err(Error::GenerationFailure {
            attempts: self.spec.max_attempts,
        })
    }
}

/// Generates `trials` competitors, checks their collars, and evaluates the
/// calibration chain for each.
pub fn stress_2d(
    spec: &CompetitorSpec2D,
    field: &CalibrationField2D,
    curve: InterfaceCurve,
    trials: u64,
    tol: f64,
) -> Result<TrialReport> {
    let generator = Generator::new(spec.clone(), curve)?;
    let window = generator.window();
    let candidate = generator.candidate()?;
    let quad_tol = crate::tolerances::LINE_INTEGRAL;
    if trials == 0 {
        return Ok(TrialReport::empty("stress_2d", tol).finish());
    }
    let base = chain_link(&window, &candidate, field, quad_tol)?;
    let links: Vec<ChainLink> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let (_, v) = generator.competitor(i)?;
            check_collar(&window, &candidate, &v, spec.collar)?;
            chain_link(&window, &v, field, quad_tol)
        })
        .collect::<Result<_>>()?;
    let mut report = chain_report("stress_2d", &base, &links, tol);
    report.argmin = format!("seed={} {}", spec.seed, report.argmin);
    Ok(report)
}
