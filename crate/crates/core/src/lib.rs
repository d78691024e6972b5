//! Numerical laboratory for evolution equations `u' = A* u` driven by
//! skew-symmetric operators.
//!
//! * [`hilbert_grid`]: discrete `L^2` spaces on the interval and the torus.
//! * [`operator_lab`]: skew-symmetry diagnostics, the Cayley transform, the
//!   interval derivative operator with its shift groups, and a weak-form
//!   residual verifier for generalized solutions.
//! * [`transport`]: characteristics of `x' = a(x)`, the orthogonal transport
//!   group and the resolvent integral along backward trajectories.
//! * [`euler`]: Leray projection, the pressure-gradient operator and the
//!   linearized Euler generator on a spectral torus.

pub mod error;
pub mod euler;
pub mod hilbert_grid;
pub mod operator_lab;
pub mod rng;
pub mod transport;

pub use error::{Error, Result};
