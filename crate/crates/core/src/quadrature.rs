//! One-dimensional quadrature: adaptive Gauss–Legendre (the production rule)
//! and adaptive Simpson (an independent rule used for cross-checks).

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 48;

fn rule() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let degree = NonZeroUsize::new(8).expect("nonzero degree");
        GaussLegendre::new(degree).into_iter().collect()
    })
}

#[inline]
fn gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    let s: f64 = rule().iter().map(|&(x, w)| w * f(mid + half * x)).sum();
    half * s
}

/// One 8-point Gauss–Legendre panel, no error control. Exact for
/// polynomials of degree 15.
pub fn gauss_legendre_panel<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    gauss(&f, a, b)
}

/// Adaptive 8-point Gauss–Legendre with bisection until the whole-interval
/// and two-halves estimates agree within `tol`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let whole = gauss(&f, a, b);
    gl_recurse(&f, a, b, whole, tol, 0)
}

fn gl_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let left = gauss(f, a, m);
    let right = gauss(f, m, b);
    let refined = left + right;
    if (refined - whole).abs() <= tol || (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
        return Ok(refined);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailure { a, b });
    }
    Ok(gl_recurse(f, a, m, left, 0.5 * tol, depth + 1)?
        + gl_recurse(f, m, b, right, 0.5 * tol, depth + 1)?)
}

/// Gauss–Legendre integration split at the given breakpoints. Breakpoints
/// outside `(a, b)` are ignored; `a > b` integrates with the opposite sign.
pub fn gauss_legendre_split<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&t| t > lo && t < hi)
        .collect();
    cuts.sort_by(|p, q| p.total_cmp(q));
    cuts.dedup();
    let pieces = cuts.len() + 1;
    let mut total = 0.0;
    let mut start = lo;
    for end in cuts.into_iter().chain(std::iter::once(hi)) {
        total += gauss_legendre(&f, start, end, tol / pieces as f64)?;
        start = end;
    }
    Ok(sign * total)
}

/// Adaptive Simpson with Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(&f, a, b, fa, fm, fb, whole, tol, 0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::QuadratureFailure { a, b });
    }
    Ok(
        simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?
            + simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let v = gauss_legendre(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1e-14).unwrap();
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((v - exact).abs() < 1e-12);
    }

    #[test]
    fn kinked_integrand_with_breaks() {
        let f = |x: f64| (x - 0.3).abs();
        let v = gauss_legendre_split(f, 0.0, 1.0, &[0.3], 1e-14).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-14);
        let back = gauss_legendre_split(f, 1.0, 0.0, &[0.3], 1e-14).unwrap();
        assert!((v + back).abs() < 1e-15);
    }

    #[test]
    fn simpson_matches_gauss() {
        let f = |x: f64| (3.0 * x).sin() * (-x).exp();
        let a = adaptive_simpson(f, 0.0, 2.0, 1e-13).unwrap();
        let b = gauss_legendre(f, 0.0, 2.0, 1e-14).unwrap();
        assert!((a - b).abs() < 1e-11);
    }
}
