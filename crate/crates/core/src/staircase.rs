//! Canonical staircases, their oblique translations, and directional
//! staircases in the plane.

use serde::{Deserialize, Serialize};

use crate::cells::{Interface, PiecewiseCell2D, Region};
use crate::energy::{Interval, Jump, PureJump1D};
use crate::error::{Error, Result};
use crate::geometry::{Point, Polygon};

/// `S(x) = 2⌊(x+1)/2⌋`.
#[inline]
pub fn s_base(x: f64) -> f64 {
    2.0 * ((x + 1.0) / 2.0).floor()
}

/// `x ↦ V·S((x - Hτ₀)/H) + Vτ₀`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Staircase1D {
    pub h: f64,
    pub v: f64,
    pub tau0: f64,
}

impl Staircase1D {
    pub fn new(h: f64, v: f64, tau0: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::param("h", format!("{h} must be positive")));
        }
        if !v.is_finite() {
            return Err(Error::param("v", "must be finite"));
        }
        if !(-1.0..=1.0).contains(&tau0) {
            return Err(Error::param("tau0", format!("{tau0} not in [-1, 1]")));
        }
        Ok(Staircase1D { h, v, tau0 })
    }

    /// The basic staircase `S`.
    pub fn canonical() -> Self {
        Staircase1D {
            h: 1.0,
            v: 1.0,
            tau0: 0.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.v * s_base((x - self.h * self.tau0) / self.h) + self.v * self.tau0
    }

    /// Jump positions `H(2k + 1 + τ₀)` in the open interval.
    pub fn jump_positions(&self, window: Interval) -> Vec<f64> {
        let k0 = ((window.a() / self.h - 1.0 - self.tau0) / 2.0).floor() as i64;
        let k1 = ((window.b() / self.h - 1.0 - self.tau0) / 2.0).ceil() as i64;
        (k0..=k1)
            .map(|k| self.h * (2.0 * k as f64 + 1.0 + self.tau0))
            .filter(|&x| window.contains_open(x))
            .collect()
    }

    /// The restriction to a window as a pure jump function: the base is the
    /// right limit at the left endpoint, jumps on the endpoints are dropped.
    pub fn to_pure_jump(&self, window: Interval) -> PureJump1D {
        let base = self.eval(window.a());
        let jumps = self
            .jump_positions(window)
            .into_iter()
            .map(|position| Jump {
                position,
                height: 2.0 * self.v,
            })
            .collect();
        PureJump1D::new(base, jumps).expect("staircase jumps are sorted and nonzero")
    }
}

/// `x ↦ V·S((<x, ξ> - Hτ₀)/H) + Vτ₀` with unit `ξ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaircaseDir2D {
    pub profile: Staircase1D,
    pub xi_unit: [f64; 2],
}

impl StaircaseDir2D {
    pub fn new(profile: Staircase1D, xi: [f64; 2]) -> Result<Self> {
        let n = xi[0].hypot(xi[1]);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::param("xi", "direction must be nonzero"));
        }
        Ok(StaircaseDir2D {
            profile,
            xi_unit: [xi[0] / n, xi[1] / n],
        })
    }

    fn dir(&self) -> Point {
        Point::new(self.xi_unit[0], self.xi_unit[1])
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.profile.eval(self.dir().dot(Point::new(x, y)))
    }

    /// Stripe partition of a convex window. Interfaces are oriented so that
    /// the lower step is on the left.
    pub fn to_cells(&self, window: &Polygon) -> Result<PiecewiseCell2D> {
        if !window.is_convex() {
            return Err(Error::InvalidPolygon(
                "stripe partition needs a convex window".into(),
            ));
        }
        let dir = self.dir();
        let (lo, hi) = window
            .vertices()
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                (lo.min(dir.dot(*p)), hi.max(dir.dot(*p)))
            });
        let span = Interval::new(lo, hi)?;
        let cuts = self.profile.jump_positions(span);
        let mut bounds = vec![lo];
        bounds.extend(cuts.iter().copied());
        bounds.push(hi);
        let mut regions = Vec::new();
        for w in bounds.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let piece = window
                .clip_half_plane(dir, w[1])
                .and_then(|p| p.clip_half_plane(dir.scale(-1.0), -w[0]));
            if let Some(poly) = piece {
                regions.push(Region::new(poly, self.profile.eval(mid)));
            }
        }
        let normal = Point::new(-dir.y, dir.x);
        let far = 4.0 * (hi - lo).abs().max(1.0) + window.perimeter();
        let mut interfaces = Vec::new();
        for &c in &cuts {
            let base = dir.scale(c);
            let a = base.sub(normal.scale(far));
            let b = base.add(normal.scale(far));
            if let Some((t0, t1)) = window.clip_segment(a, b) {
                let below = self.profile.eval(c - self.profile.h);
                interfaces.push(Interface {
                    points: vec![a.lerp(b, t0), a.lerp(b, t1)],
                    left_value: below,
                    right_value: below + 2.0 * self.profile.v,
                });
            }
        }
        Ok(PiecewiseCell2D {
            regions,
            interfaces,
        })
    }
}
