//! The interface curve between the even and odd phases of the bi-staircase.

use serde::{Deserialize, Serialize};

use crate::energy::alpha_theta;
use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::quadrature::{adaptive_simpson, gauss_legendre, gauss_legendre_panel};

fn check_theta(theta: f64) -> Result<()> {
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::param("theta", format!("{theta} not in [0, 1)")));
    }
    Ok(())
}

fn g_raw(x: f64, theta: f64) -> f64 {
    2.0 / (1.0 - theta) + 3.0 * x - 3.0 * x * x
}

/// `2/(1-θ) + 3x - 3x²` on `[0, 1]`.
pub fn g_theta(x: f64, theta: f64) -> Result<f64> {
    check_theta(theta)?;
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    Ok(g_raw(x, theta))
}

/// Slope of the curve on `[0, 1]`.
fn slope_raw(x: f64, theta: f64, alpha: f64) -> f64 {
    let g = g_raw(x, theta);
    g / ((alpha - g) * (alpha + g)).sqrt()
}

/// Value at 1 by adaptive Simpson, independent of the table.
pub fn f1_simpson(theta: f64, tol: f64) -> Result<f64> {
    check_theta(theta)?;
    let alpha = alpha_theta(theta);
    adaptive_simpson(|x| slope_raw(x, theta, alpha), 0.0, 1.0, tol)
}

/// Value at 1 by adaptive Gauss–Legendre, independent of the table.
pub fn f1_gauss(theta: f64, tol: f64) -> Result<f64> {
    check_theta(theta)?;
    let alpha = alpha_theta(theta);
    gauss_legendre(|x| slope_raw(x, theta, alpha), 0.0, 1.0, tol)
}

/// Dense table of the curve on `[0, 1]`, evaluated by cubic Hermite
/// interpolation with exact slopes and extended evenly and 2-periodically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterfaceCurve {
    theta: f64,
    alpha: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    f1: f64,
}

impl InterfaceCurve {
    /// Refines the table until midpoint interpolation error is below `tol`.
    pub fn build(theta: f64, tol: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(tol > 0.0) {
            return Err(Error::param("tol", "must be positive"));
        }
        let mut n = 32;
        loop {
            let curve = Self::with_cells(theta, n)?;
            if curve.midpoint_error()? < tol {
                return Ok(curve);
            }
            if n >= 1 << 16 {
                return Err(Error::QuadratureFailure { a: 0.0, b: 1.0 });
            }
            n *= 2;
        }
    }

    fn with_cells(theta: f64, n: usize) -> Result<Self> {
        let alpha = alpha_theta(theta);
        let h = 1.0 / n as f64;
        let mut values = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        values.push(0.0);
        for i in 0..n {
            acc += gauss_legendre_panel(
                |x| slope_raw(x, theta, alpha),
                i as f64 * h,
                (i + 1) as f64 * h,
            );
            values.push(acc);
        }
        let slopes = (0..=n)
            .map(|i| slope_raw(i as f64 * h, theta, alpha))
            .collect();
        Ok(InterfaceCurve {
            theta,
            alpha,
            f1: acc,
            values,
            slopes,
        })
    }

    fn midpoint_error(&self) -> Result<f64> {
        let n = self.cells();
        let h = 1.0 / n as f64;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let a = i as f64 * h;
            let m = a + 0.5 * h;
            let exact = self.values[i]
                + gauss_legendre(|x| slope_raw(x, self.theta, self.alpha), a, m, 1e-15)?;
            worst = worst.max((exact - self.eval_unit(m)).abs());
        }
        Ok(worst)
    }

    fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `f(1)`, the height of the upper junctions.
    pub fn f1(&self) -> f64 {
        self.f1
    }

    pub fn table_len(&self) -> usize {
        self.values.len()
    }

    fn eval_unit(&self, x: f64) -> f64 {
        let n = self.cells();
        let h = 1.0 / n as f64;
        let i = ((x / h).floor() as usize).min(n - 1);
        let t = (x - i as f64 * h) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1
    }

    /// Reduces `x` into `[-1, 1]` by 2-periodicity.
    fn reduce(x: f64) -> f64 {
        x - 2.0 * ((x + 1.0) / 2.0).floor()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_unit(Self::reduce(x).abs().min(1.0))
    }

    /// Exact derivative; at even integers the right derivative.
    pub fn derivative(&self, x: f64) -> f64 {
        let r = Self::reduce(x);
        let s = slope_raw(r.abs().min(1.0), self.theta, self.alpha);
        if r < 0.0 {
            -s
        } else {
            s
        }
    }

    /// Arclength of the graph over `[a, b]`.
    pub fn arclength(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let breaks: Vec<f64> = ((a.floor() as i64)..=(b.ceil() as i64))
            .map(|k| k as f64)
            .collect();
        crate::quadrature::gauss_legendre_split(
            |x| self.derivative(x).hypot(1.0),
            a,
            b,
            &breaks,
            tol,
        )
    }

    /// `n` equispaced samples `(x, f(x))` on `[a, b]`.
    pub fn samples(&self, a: f64, b: f64, n: usize) -> Result<Vec<(f64, f64)>> {
        if n == 0 {
            return Err(Error::param("samples", "need at least one sample"));
        }
        if n == 1 {
            return Ok(vec![(a, self.eval(a))]);
        }
        let step = (b - a) / (n - 1) as f64;
        Ok((0..n)
            .map(|i| a + i as f64 * step)
            .map(|x| (x, self.eval(x)))
            .collect())
    }

    /// Polyline through the graph on `[a, b]` with a node at every integer.
    /// Each chord is bisected until halving it changes the polyline length by
    /// less than its share of `tol`.
    pub fn polyline(&self, a: f64, b: f64, tol: f64) -> Vec<Point> {
        graph_polyline(|x| self.eval(x), a, b, tol)
    }
}

/// Adaptive polyline of the graph of `f` on `[a, b]`, with nodes at the
/// integers in between.
pub fn graph_polyline(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Vec<Point> {
    let mut knots = vec![a];
    let mut k = a.floor() + 1.0;
    while k < b {
        if k > a {
            knots.push(k);
        }
        k += 1.0;
    }
    knots.push(b);
    let span = b - a;
    let mut out = vec![Point::new(a, f(a))];
    for w in knots.windows(2) {
        refine(
            &f,
            Point::new(w[0], f(w[0])),
            Point::new(w[1], f(w[1])),
            tol / span,
            0,
            &mut out,
        );
    }
    out
}

fn refine(
    f: &impl Fn(f64) -> f64,
    p: Point,
    q: Point,
    tol_per_unit: f64,
    depth: u32,
    out: &mut Vec<Point>,
) {
    let mx = 0.5 * (p.x + q.x);
    let m = Point::new(mx, f(mx));
    let gain = p.dist(m) + m.dist(q) - p.dist(q);
    // Always split a few times so that features narrower than a chord are seen.
    if depth >= 4 && (gain <= tol_per_unit * (q.x - p.x) || depth >= 40) {
        out.push(q);
        return;
    }
    refine(f, p, m, tol_per_unit, depth + 1, out);
    refine(f, m, q, tol_per_unit, depth + 1, out);
}
