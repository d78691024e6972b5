use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert_grid::fourier::wavevector;
use crate::hilbert_grid::TorusField;

/// Leray projector onto divergence-free fields of the `N^dim` torus.
///
/// Mode `xi` is multiplied by `E - xi xi^T / |xi|^2`; modes with `xi = 0`
/// (the mean, and Nyquist-only indices) pass through unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpectralProjector {
    dim: usize,
    n: usize,
}

impl SpectralProjector {
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        TorusField::zeros(dim, n, dim)?;
        Ok(Self { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    /// Multiplier at flat spectral index `k`, row-major `dim x dim`.
    pub fn multiplier(&self, k: usize) -> [[f64; 3]; 3] {
        let xi = wavevector(k, self.n, self.dim);
        let xi2: f64 = xi.iter().map(|v| v * v).sum();
        let mut m = [[0.0; 3]; 3];
        for i in 0..self.dim {
            m[i][i] = 1.0;
            if xi2 > 0.0 {
                for j in 0..self.dim {
                    m[i][j] -= xi[i] * xi[j] / xi2;
                }
            }
        }
        m
    }

    /// Largest deviation over all modes from symmetry, idempotence and `M xi = 0`.
    pub fn multiplier_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for k in 0..self.n.pow(d as u32) {
            let m = self.multiplier(k);
            let xi = wavevector(k, self.n, d);
            for i in 0..d {
                let mxi: f64 = (0..d).map(|j| m[i][j] * xi[j]).sum();
                worst = worst.max(mxi.abs());
                for j in 0..d {
                    worst = worst.max((m[i][j] - m[j][i]).abs());
                    let m2: f64 = (0..d).map(|l| m[i][l] * m[l][j]).sum();
                    worst = worst.max((m2 - m[i][j]).abs());
                }
            }
        }
        worst
    }

    pub(crate) fn check(&self, u: &TorusField) -> Result<()> {
        if !u.is_vector() {
            return Err(Error::InvalidInput(format!(
                "projection needs a vector field with {} components, got {}",
                u.dim(),
                u.components()
            )));
        }
        if u.dim() != self.dim || u.n_modes() != self.n {
            return Err(Error::ShapeMismatch(format!(
                "field on {}-d grid with N = {}, projector on {}-d grid with N = {}",
                u.dim(),
                u.n_modes(),
                self.dim,
                self.n
            )));
        }
        Ok(())
    }

    fn apply(&self, u: &TorusField) -> Result<TorusField> {
        self.check(u)?;
        let (d, p) = (self.dim, u.points());
        let spec = u.spectrum();
        let mut out = vec![Complex64::new(0.0, 0.0); d * p];
        for k in 0..p {
            let m = self.multiplier(k);
            for i in 0..d {
                out[i * p + k] = (0..d).map(|j| spec[j * p + k] * m[i][j]).sum();
            }
        }
        TorusField::from_spectrum(d, self.n, d, &out)
    }
}

/// `P u`: removes the gradient part of a vector field.
pub fn leray_project(projector: &SpectralProjector, u: &TorusField) -> Result<TorusField> {
    projector.apply(u)
}

/// `(E - P) u`: the gradient part.
pub fn gradient_part(projector: &SpectralProjector, u: &TorusField) -> Result<TorusField> {
    let pu = leray_project(projector, u)?;
    u.sub(&pu)
}
