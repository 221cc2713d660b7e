//! Default tolerances shared by the verification suites.
//!
//! Closed-form identities are checked at near machine precision; inequalities
//! are allowed a small rounding slack. Checks that go through polyline
//! quadrature use the looser competitor tolerance.

/// Closed-form equalities (calibration identities, normalisation).
pub const EXACT: f64 = 1e-12;

/// Default absolute tolerance for equalities that pass through a few
/// transcendental evaluations.
pub const EQUALITY: f64 = 1e-9;

/// Maximum violation allowed for grid-checked inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Minimality assertions that involve polyline approximation of curves.
pub const COMPETITOR: f64 = 1e-7;

/// Per-segment target of the adaptive line integrals.
pub const LINE_INTEGRAL: f64 = 1e-12;

/// Exclusion radius around triple junctions for pointwise checks.
pub const JUNCTION_EXCLUSION: f64 = 1e-8;
