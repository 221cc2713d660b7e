//! The piecewise affine profile in the level variable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Piecewise affine with nodes `(-end, 0)`, `(c, -C)`, `(d, D)`, `(end, 0)`,
/// zero outside `[-end, end]`, and `(ψ(d) - ψ(c))² + (d - c)² = radius²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsiFunction {
    pub c: f64,
    pub d: f64,
    pub cap_c: f64,
    pub cap_d: f64,
    pub end: f64,
    pub radius: f64,
}

fn clamped_sqrt(v: f64) -> f64 {
    v.max(0.0).sqrt()
}

impl PsiFunction {
    /// The proven case: `end = 2`, `radius = 4`.
    pub fn new(c: f64, d: f64) -> Result<Self> {
        Self::general(c, d, 2.0, 4.0)
    }

    /// Same construction with a different support and radius. Negative
    /// radicands are clamped to zero.
    pub fn general(c: f64, d: f64, end: f64, radius: f64) -> Result<Self> {
        if !(-end <= c && c <= 0.0 && 0.0 <= d && d <= end && c < d) {
            return Err(Error::param(
                "psi",
                format!("need -{end} <= c <= 0 <= d <= {end}, c < d; got c={c}, d={d}"),
            ));
        }
        let r2 = radius * radius;
        let cap_c = clamped_sqrt(r2 - (end - c) * (end - c));
        let cap_d = clamped_sqrt(r2 - (d - c) * (d - c)) - cap_c;
        Ok(PsiFunction {
            c,
            d,
            cap_c,
            cap_d,
            end,
            radius,
        })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let (c, d, e) = (self.c, self.d, self.end);
        if s <= -e || s >= e {
            0.0
        } else if s <= c {
            -self.cap_c * (s + e) / (c + e)
        } else if s <= d {
            -self.cap_c + (self.cap_c + self.cap_d) * (s - c) / (d - c)
        } else {
            self.cap_d * (e - s) / (e - d)
        }
    }

    /// `|(ψ(d) - ψ(c))² + (d - c)² - radius²|`.
    pub fn equality_residual(&self) -> f64 {
        let jump = self.eval(self.d) - self.eval(self.c);
        (jump * jump + (self.d - self.c).powi(2) - self.radius * self.radius).abs()
    }

    /// Left-hand side of the pairwise bound.
    pub fn pair_lhs(&self, s1: f64, s2: f64) -> f64 {
        (self.eval(s2) - self.eval(s1)).powi(2) + (s2 - s1).powi(2)
    }
}

pub fn psi_build(c: f64, d: f64) -> Result<PsiFunction> {
    PsiFunction::new(c, d)
}

/// One row of the endpoint table.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub case: u8,
    pub s1: f64,
    pub s2: f64,
    pub lhs: f64,
}

/// The six endpoint pairs that suffice by convexity.
pub fn endpoint_cases(p: &PsiFunction) -> [CaseRow; 6] {
    let e = p.end;
    let pairs = [
        (-e, p.c),
        (-e, p.d),
        (-e, e),
        (p.c, p.d),
        (p.c, e),
        (p.d, e),
    ];
    let mut out = [CaseRow {
        case: 0,
        s1: 0.0,
        s2: 0.0,
        lhs: 0.0,
    }; 6];
    for (i, (s1, s2)) in pairs.into_iter().enumerate() {
        // The node values rather than eval, so that degenerate end intervals
        // still see -C and D.
        let v = |s: f64| {
            if s == p.c {
                -p.cap_c
            } else if s == p.d {
                p.cap_d
            } else {
                p.eval(s)
            }
        };
        out[i] = CaseRow {
            case: i as u8 + 1,
            s1,
            s2,
            lhs: (v(s2) - v(s1)).powi(2) + (s2 - s1).powi(2),
        };
    }
    out
}

/// `rhs - lhs` of the reduced form of case 2, for given `c` and `d`.
pub fn case_two_margin(c: f64, d: f64) -> f64 {
    let lhs = 16.0 + (d + 2.0).powi(2);
    let rhs = (d - c).powi(2)
        + (2.0 - c).powi(2)
        + 2.0 * clamped_sqrt(16.0 - (d - c).powi(2)) * clamped_sqrt(16.0 - (2.0 - c).powi(2));
    rhs - lhs
}
