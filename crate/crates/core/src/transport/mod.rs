//! Characteristic transport `u_t + a . grad u = 0`.
//!
//! Flow maps of `x' = a(x)` by adaptive RK4, the solution group
//! `u0(y(t, x))` sampled on torus grids, measure-preservation diagnostics,
//! and the resolvent `phi + h a . grad phi = psi` evaluated as a weighted
//! integral along one backward characteristic.

mod flow;
mod resolvent;
mod semigroup;

pub use flow::{
    backward_label, flow_lipschitz_check, flow_map, flow_with_derivative, jacobian_det, random_pairs, FlowOptions,
    LipschitzReport, FD_STEP, MAX_SPAN,
};
pub use resolvent::{
    decay_check, entry_time_is_conservative, resolvent_apply, resolvent_gradient, CompactBump, DecayFit,
    ResolventParams, Source, DECAY_MARGIN,
};
pub use semigroup::{advection_generator, semigroup_apply, InitialData};
