use num_complex::Complex64;

use super::fourier::{self, wavevector};
use super::{GridFunction1D, TorusField};
use crate::error::{Error, Result};

/// A vector of one of the discrete Hilbert spaces.
pub trait HilbertVector: Clone {
    /// Quadrature approximation of `(self, other)`.
    fn inner(&self, other: &Self) -> Result<f64>;

    fn norm(&self) -> f64 {
        self.inner(self).map(f64::sqrt).unwrap_or(f64::NAN)
    }

    /// Raw sample values, used for CSV export.
    fn flat_values(&self) -> &[f64];

    /// `self + factor * other`.
    fn axpy(&self, factor: f64, other: &Self) -> Result<Self>;

    fn same_discretization(&self, other: &Self) -> bool;
}

impl HilbertVector for GridFunction1D {
    fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        let sum: f64 = self.values().iter().zip(other.values()).map(|(a, b)| a * b).sum();
        Ok(self.dx() * sum)
    }

    fn flat_values(&self) -> &[f64] {
        self.values()
    }

    fn axpy(&self, factor: f64, other: &Self) -> Result<Self> {
        GridFunction1D::axpy(self, factor, other)
    }

    fn same_discretization(&self, other: &Self) -> bool {
        self.n_cells() == other.n_cells()
    }
}

impl HilbertVector for TorusField {
    fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        let sum: f64 = self.samples().iter().zip(other.samples()).map(|(a, b)| a * b).sum();
        Ok(self.cell_volume() * sum)
    }

    fn flat_values(&self) -> &[f64] {
        self.samples()
    }

    fn axpy(&self, factor: f64, other: &Self) -> Result<Self> {
        TorusField::axpy(self, factor, other)
    }

    fn same_discretization(&self, other: &Self) -> bool {
        self.same_shape(other)
    }
}

/// `(f, g)`: cell volume times the sum of pointwise products over all components.
pub fn inner_product<V: HilbertVector>(f: &V, g: &V) -> Result<f64> {
    f.inner(g)
}

/// Inner product evaluated from Fourier coefficients (Parseval).
pub fn spectral_inner_product(f: &TorusField, g: &TorusField) -> Result<f64> {
    f.check_same_shape(g)?;
    let sum: f64 = f
        .spectrum()
        .iter()
        .zip(g.spectrum())
        .map(|(a, b)| (a * b.conj()).re)
        .sum();
    let p = f.points() as f64;
    Ok(f.cell_volume() * sum / p)
}

/// Spectral partial derivative of component `c` along `axis`, as coefficients.
pub(crate) fn partial_spectrum(f: &TorusField, c: usize, axis: usize) -> Vec<Complex64> {
    let (n, dim) = (f.n_modes(), f.dim());
    f.component_spectrum(c)
        .iter()
        .enumerate()
        .map(|(k, v)| v * Complex64::new(0.0, wavevector(k, n, dim)[axis]))
        .collect()
}

pub fn spectral_partial(f: &TorusField, c: usize, axis: usize) -> Vec<f64> {
    fourier::inverse_real(&partial_spectrum(f, c, axis), f.n_modes(), f.dim())
}

/// Gradient of a scalar field: component `l` is the inverse transform of `i xi_l f^`.
pub fn spectral_gradient(f: &TorusField) -> Result<TorusField> {
    if !f.is_scalar() {
        return Err(Error::InvalidInput(format!(
            "gradient needs a scalar field, got {} components",
            f.components()
        )));
    }
    let mut samples = Vec::with_capacity(f.dim() * f.points());
    for axis in 0..f.dim() {
        samples.extend(spectral_partial(f, 0, axis));
    }
    TorusField::new(f.dim(), f.n_modes(), f.dim(), samples)
}

/// Divergence of a vector field, computed spectrally.
pub fn spectral_divergence(u: &TorusField) -> Result<TorusField> {
    if !u.is_vector() {
        return Err(Error::InvalidInput(format!(
            "divergence needs a vector field with {} components, got {}",
            u.dim(),
            u.components()
        )));
    }
    let (n, dim) = (u.n_modes(), u.dim());
    let points = u.points();
    let mut acc = vec![Complex64::new(0.0, 0.0); points];
    for l in 0..dim {
        for (k, v) in u.component_spectrum(l).iter().enumerate() {
            acc[k] += v * Complex64::new(0.0, wavevector(k, n, dim)[l]);
        }
    }
    TorusField::from_spectrum(dim, n, 1, &acc)
}

/// Laplacian of a scalar field via the multiplier `-|xi|^2`.
pub fn spectral_laplacian(f: &TorusField) -> Result<TorusField> {
    if !f.is_scalar() {
        return Err(Error::InvalidInput("laplacian needs a scalar field".into()));
    }
    let (n, dim) = (f.n_modes(), f.dim());
    let spec: Vec<Complex64> = f
        .spectrum()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let xi = wavevector(k, n, dim);
            v * -(xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2])
        })
        .collect();
    TorusField::from_spectrum(dim, n, 1, &spec)
}
