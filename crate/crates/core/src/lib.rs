//! Numerical laboratory for the jump functional with linear fidelity term:
//! exact energies of pure jump functions in one and two dimensions, the
//! staircase and bi-staircase candidates, their calibration fields, and the
//! randomized and exhaustive competitor checks built on top of them.

pub mod bistaircase;
pub mod calibration1d;
pub mod calibration2d;
pub mod cells;
pub mod energy;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod interface_curve;
pub mod io;
pub mod quadrature;
pub mod report;
pub mod staircase;
pub mod tolerances;

pub use cells::{jf_2d, Interface, PiecewiseCell2D, Region};
pub use energy::{
    alpha_theta, canonical_h_v, jf_1d, normalize_params, unit_energy_density, EnergyBreakdown,
    Interval, Jump, Params1D, Params2D, PureJump1D,
};
pub use error::{Error, Result};
pub use geometry::{Point, Polygon};
