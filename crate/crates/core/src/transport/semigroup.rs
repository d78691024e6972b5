use rayon::prelude::*;

use super::flow::{backward_label, FlowOptions};
use crate::error::{Error, Result};
use crate::hilbert_grid::{fourier, partial_spectrum, TorusField, VelocityField};

/// Initial datum for the transport group: a closure on `R^dim` or sampled
/// torus data evaluated through its trigonometric interpolant.
#[derive(Clone, Copy)]
pub enum InitialData<'a> {
    Closure(&'a (dyn Fn(&[f64]) -> f64 + Sync)),
    Sampled(&'a TorusField),
}

impl InitialData<'_> {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            InitialData::Closure(f) => f(x),
            InitialData::Sampled(u) => u.interpolate(0, x),
        }
    }
}

impl<'a> From<&'a TorusField> for InitialData<'a> {
    fn from(u: &'a TorusField) -> Self {
        InitialData::Sampled(u)
    }
}

/// Samples of `u0(y(t, x))` on the `n^dim` torus grid: the solution of
/// `u_t + a . grad u = 0` at time `t`.
pub fn semigroup_apply(
    a: &VelocityField,
    t: f64,
    u0: InitialData<'_>,
    n: usize,
    opts: &FlowOptions,
) -> Result<TorusField> {
    if !(t >= 0.0) {
        return Err(Error::InvalidInput(format!("semigroup time must be non-negative, got {t}")));
    }
    if let InitialData::Sampled(u) = u0 {
        if !u.is_scalar() || u.dim() != a.dim() || u.n_modes() != n {
            return Err(Error::ShapeMismatch(format!(
                "sampled datum ({}-d, N = {}, {} components) does not match the {}-d grid with N = {n}",
                u.dim(),
                u.n_modes(),
                u.components(),
                a.dim()
            )));
        }
    }
    opts.validate()?;
    let dim = a.dim();
    let probe = TorusField::zeros(dim, n, 1)?;
    let samples = (0..probe.points())
        .into_par_iter()
        .map(|flat| {
            let x = probe.point(flat);
            let y = if t == 0.0 { x[..dim].to_vec() } else { backward_label(a, t, &x[..dim], opts)? };
            Ok(u0.eval(&y))
        })
        .collect::<Result<Vec<f64>>>()?;
    TorusField::new(dim, n, 1, samples)
}

/// Skew-symmetric spectral form of the transport generator on the torus,
/// `-(a . grad u + div(a u)) / 2` for a scalar `u`.
///
/// Coincides with `-a . grad u` when `div a = 0` and the products are
/// resolved; the split form is exactly skew on the grid.
pub fn advection_generator(a: &TorusField, u: &TorusField) -> Result<TorusField> {
    if !a.is_vector() {
        return Err(Error::InvalidInput("velocity samples must form a vector field".into()));
    }
    if !u.is_scalar() || u.dim() != a.dim() || u.n_modes() != a.n_modes() {
        return Err(Error::ShapeMismatch("transported quantity must be a scalar on the velocity grid".into()));
    }
    let (dim, n, p) = (a.dim(), a.n_modes(), a.points());
    let mut out = vec![0.0; p];
    let mut flux = vec![num_complex::Complex64::new(0.0, 0.0); p];
    for axis in 0..dim {
        let du = fourier::inverse_real(&partial_spectrum(u, 0, axis), n, dim);
        let ax = a.component(axis);
        let product: Vec<f64> = ax.iter().zip(u.samples()).map(|(v, w)| v * w).collect();
        let spec = fourier::forward(&product, n, dim);
        for (k, s) in spec.iter().enumerate() {
            flux[k] += s * num_complex::Complex64::new(0.0, fourier::wavevector(k, n, dim)[axis]);
        }
        for i in 0..p {
            out[i] -= 0.5 * ax[i] * du[i];
        }
    }
    let div = fourier::inverse_real(&flux, n, dim);
    for i in 0..p {
        out[i] -= 0.5 * div[i];
    }
    TorusField::new(dim, n, 1, out)
}
