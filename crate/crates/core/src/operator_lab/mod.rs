//! Finite-dimensional and interval realizations of skew-symmetric operators:
//! skewness diagnostics, the Cayley transform, the zero-boundary derivative
//! on `[0, 1]` with its deficiency spaces and shift groups, and a verifier
//! for the weak formulation of `u' = A* u`.

mod interval;
mod matrix;
mod mollifier;
mod trajectory;
mod weak;

pub use interval::{
    growth_solution, interval_deficiency, remark3_mixture, shift_group, simpson_unit, spliced_solution,
    DeficiencyReport, ShiftKind, ZeroBoundaryProbe,
};
pub use matrix::{
    cayley, inverse_cayley, orthogonal_group, skew_symmetry_defect, OperatorMatrix, SkewDefect, MAX_DIM,
};
pub use mollifier::{mollifier_beta, mollifier_theta, MollifierFamily};
pub use trajectory::{energy_profile, EnergyProfile, Trajectory};
pub use weak::{interval_test_family, weak_identity, weak_residual, SeparableTest, TimeFn, WeakTerms};
