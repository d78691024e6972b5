//! Discrete Hilbert spaces: cell-centered samples on `[0, 1]`, uniform grids
//! on the periodic torus, quadrature inner products and spectral calculus.

mod calculus;
pub mod fourier;
mod grid1d;
mod torus;
mod velocity;

pub use calculus::{
    inner_product, spectral_divergence, spectral_gradient, spectral_inner_product, spectral_laplacian,
    spectral_partial, HilbertVector,
};
pub(crate) use calculus::partial_spectrum;
pub use grid1d::{GridFunction1D, MIN_CELLS};
pub use torus::{grid_point, TorusField};
pub use velocity::{FieldAudit, FieldFn, JacobianFn, VelocityField};
pub(crate) use velocity::norm;
