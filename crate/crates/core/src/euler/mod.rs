//! Linearized Euler system on the periodic torus.
//!
//! The Leray projector `P`, the pressure-gradient operator `T`, the
//! advection operator `B`, the generator `P B` on solenoidal fields, RK4
//! time stepping with post-step projection, and the resolvent
//! `(E - h(B + T))^{-1}`, whose output stays solenoidal.

mod bundle;
mod evolve;
mod fields;
mod projector;
mod solver;

pub use bundle::{
    advect_b, extended_generator, generator_apply, max_divergence, pressure_gradient_t, EulerOperatorBundle,
};
pub use evolve::{evolve, Evolution, StepDiagnostics, MAX_STORED_STATES, STABILITY_LIMIT};
pub use fields::{random_solenoidal, stream_vortex};
pub use projector::{gradient_part, leray_project, SpectralProjector};
pub use solver::{gmres, resolvent_solve, GmresOutcome, ResolventSolution, GMRES_MAX_ITER, GMRES_RESTART};
