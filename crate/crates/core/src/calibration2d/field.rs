//! The level-dependent horizontal component and its periodic extension.

use serde::{Deserialize, Serialize};

use super::psi::PsiFunction;
use crate::calibration1d::CalibrationField1D;
use crate::energy::alpha_theta;
use crate::error::{Error, Result};

/// `A(x, z) = ψ(x, φ̂(z - x)/(1-θ))` on `[0, 1] × ℝ`, extended evenly and
/// `(2, 2)`-periodically, together with the one-dimensional field `F`.
///
/// Only `θ = 0` is a proven calibration; other values build the analogous
/// profile with radius `α_θ` for exploration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationField2D {
    pub theta: f64,
    pub alpha: f64,
    pub base: CalibrationField1D,
    /// Range of the rescaled level variable, `φ̂(σ)/(1-θ)`.
    pub end: f64,
}

impl CalibrationField2D {
    pub fn new() -> Self {
        Self::exploratory(0.0).expect("theta = 0 is valid")
    }

    pub fn exploratory(theta: f64) -> Result<Self> {
        let base = CalibrationField1D::new(theta)?;
        let end = base.cubic.plateau() / (1.0 - theta);
        Ok(CalibrationField2D {
            theta,
            alpha: alpha_theta(theta),
            base,
            end,
        })
    }

    fn level(&self, s: f64) -> f64 {
        self.base.cubic.phi_hat(s) / (1.0 - self.theta)
    }

    /// Profile for a base point in `[0, 1]`.
    pub fn psi_at(&self, x: f64) -> Result<PsiFunction> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfRange {
                x,
                lo: 0.0,
                hi: 1.0,
            });
        }
        PsiFunction::general(self.level(-x), self.level(1.0 - x), self.end, self.alpha)
    }

    /// Maps `(x, z)` to the fundamental domain `[0, 1] × ℝ`: a `(2m, 2m)`
    /// shift into `x ∈ [-1, 1]`, then `(x, z) ↦ (-x, -z)` if `x < 0`.
    pub fn fold(x: f64, z: f64) -> (f64, f64) {
        let m = ((x + 1.0) / 2.0).floor();
        let (mut xf, mut zf) = (x - 2.0 * m, z - 2.0 * m);
        if xf > 1.0 {
            // rounding at the upper end
            xf -= 2.0;
            zf -= 2.0;
        }
        if xf < 0.0 {
            (-xf, -zf)
        } else {
            (xf, zf)
        }
    }

    pub fn a(&self, x: f64, z: f64) -> f64 {
        let (xf, zf) = Self::fold(x, z);
        let psi = self
            .psi_at(xf.min(1.0))
            .expect("folded point lies in [0, 1]");
        psi.eval(self.level(zf - xf))
    }

    #[inline]
    pub fn f(&self, x: f64, z: f64) -> f64 {
        self.base.f(x, z)
    }
}

impl Default for CalibrationField2D {
    fn default() -> Self {
        Self::new()
    }
}

pub fn a_field(f2: &CalibrationField2D, x: f64, z: f64) -> f64 {
    f2.a(x, z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_level_difference_at_zero() {
        let f = CalibrationField2D::new();
        assert!((f.a(0.0, 1.0) - f.a(0.0, 0.0) - 12f64.sqrt()).abs() < 1e-14);
        assert!((f.f(0.0, 1.0) - f.f(0.0, 0.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn psi_at_matches_cubic_endpoints() {
        let f = CalibrationField2D::new();
        let p = f.psi_at(0.5).unwrap();
        assert!((p.c + 1.375).abs() < 1e-15 && (p.d - 1.375).abs() < 1e-15);
        assert_eq!(p.end, 2.0);
        assert_eq!(p.radius, 4.0);
        assert!(f.psi_at(1.5).is_err());
    }

    #[test]
    fn fold_examples() {
        assert_eq!(CalibrationField2D::fold(0.25, 3.0), (0.25, 3.0));
        assert_eq!(CalibrationField2D::fold(-0.25, 3.0), (0.25, -3.0));
        assert_eq!(CalibrationField2D::fold(2.25, 3.0), (0.25, 1.0));
        assert_eq!(CalibrationField2D::fold(1.75, 1.0), (0.25, 1.0));
    }

    #[test]
    fn symmetric_on_seams() {
        let f = CalibrationField2D::new();
        for i in -300..=300 {
            let z = i as f64 / 100.0;
            assert!((f.a(0.0, z) - f.a(0.0, -z)).abs() < 1e-14);
            assert!((f.a(1.0, z + 2.0) - f.a(1.0, -z)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn periodic_and_even(x in -5.0f64..5.0, z in -5.0f64..5.0) {
            let f = CalibrationField2D::new();
            prop_assert!((f.a(x + 2.0, z + 2.0) - f.a(x, z)).abs() < 1e-12);
            prop_assert!((f.a(-x, -z) - f.a(x, z)).abs() < 1e-12);
        }

        #[test]
        fn continuous_in_x(x in -5.0f64..5.0, z in -5.0f64..5.0) {
            let f = CalibrationField2D::new();
            prop_assert!((f.a(x + 1e-10, z) - f.a(x, z)).abs() < 1e-6);
        }
    }
}
