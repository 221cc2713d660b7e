//! Two-dimensional calibration of the bi-staircase.

pub mod field;
pub mod form;
pub mod psi;
pub mod verify;

pub use field::{a_field, CalibrationField2D};
pub use form::{curve_jump_integral, g_functional, jump_integral, line_integral_form, GValue};
pub use psi::{psi_build, PsiFunction};
pub use verify::{
    explore_theta_scan, lemma_psi_verify, pair_violation_map, saturation_check,
    verify_minimality_chain, verify_prop_hypotheses,
};
