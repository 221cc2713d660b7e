//! Competitor generation and necessary-condition checks.

pub mod brute_force;
pub mod euler_lagrange;
pub mod slicing;
pub mod stress;

pub use brute_force::{brute_force_1d, BruteForceResult, CompetitorSpec1D, DEFAULT_BUDGET};
pub use euler_lagrange::{
    equidistance_test, jump_symmetry_test, merge_jumps_check, Equidistance, JumpSymmetry,
};
pub use slicing::{extend_to_cells, random_tilts, slicing_check, tilted_competitor, SlicingReport};
pub use stress::{stress_2d, CompetitorSpec2D, Family, Generator};
