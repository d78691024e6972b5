use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_complex::Complex64;

use super::fourier;
use crate::error::{Error, Result};

/// Scalar or vector field sampled on the uniform grid of `[0, 2pi)^dim`.
///
/// Samples are stored component-major; within a component the grid is
/// row-major with the last axis varying fastest. The discrete Fourier
/// coefficients are computed on first request and cached.
#[derive(Debug, Clone)]
pub struct TorusField {
    dim: usize,
    n: usize,
    components: usize,
    samples: Vec<f64>,
    spectrum: OnceLock<Vec<Complex64>>,
}

impl PartialEq for TorusField {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.n == other.n
            && self.components == other.components
            && self.samples == other.samples
    }
}

fn validate_shape(dim: usize, n: usize, components: usize) -> Result<()> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidInput(format!("torus dimension must be 1, 2 or 3, got {dim}")));
    }
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidInput(format!("n_modes must be even and positive, got {n}")));
    }
    if components == 0 {
        return Err(Error::InvalidInput("field needs at least one component".into()));
    }
    Ok(())
}

impl TorusField {
    pub fn new(dim: usize, n: usize, components: usize, samples: Vec<f64>) -> Result<Self> {
        validate_shape(dim, n, components)?;
        let expected = components * n.pow(dim as u32);
        if samples.len() != expected {
            return Err(Error::ShapeMismatch(format!(
                "expected {expected} samples, got {}",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite sample".into()));
        }
        Ok(Self { dim, n, components, samples, spectrum: OnceLock::new() })
    }

    pub fn zeros(dim: usize, n: usize, components: usize) -> Result<Self> {
        validate_shape(dim, n, components)?;
        Self::new(dim, n, components, vec![0.0; components * n.pow(dim as u32)])
    }

    pub fn scalar_from_fn(dim: usize, n: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        validate_shape(dim, n, 1)?;
        let points = n.pow(dim as u32);
        let samples = (0..points).map(|p| f(&grid_point(p, n, dim)[..dim])).collect();
        Self::new(dim, n, 1, samples)
    }

    /// Vector field with `dim` components; `f(x, out)` writes `u(x)` into `out`.
    pub fn vector_from_fn(dim: usize, n: usize, f: impl Fn(&[f64], &mut [f64])) -> Result<Self> {
        validate_shape(dim, n, dim)?;
        let points = n.pow(dim as u32);
        let mut samples = vec![0.0; dim * points];
        let mut out = [0.0; 3];
        for p in 0..points {
            f(&grid_point(p, n, dim)[..dim], &mut out[..dim]);
            for c in 0..dim {
                samples[c * points + p] = out[c];
            }
        }
        Self::new(dim, n, dim, samples)
    }

    /// Builds a field from spectral coefficients, keeping the real part.
    pub fn from_spectrum(dim: usize, n: usize, components: usize, spectrum: &[Complex64]) -> Result<Self> {
        validate_shape(dim, n, components)?;
        let points = n.pow(dim as u32);
        if spectrum.len() != components * points {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                components * points,
                spectrum.len()
            )));
        }
        let mut samples = Vec::with_capacity(components * points);
        for c in 0..components {
            samples.extend(fourier::inverse_real(&spectrum[c * points..(c + 1) * points], n, dim));
        }
        Self::new(dim, n, components, samples)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_modes(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_scalar(&self) -> bool {
        self.components == 1
    }

    pub fn is_vector(&self) -> bool {
        self.components == self.dim
    }

    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let p = self.points();
        &self.samples[c * p..(c + 1) * p]
    }

    pub fn point(&self, flat: usize) -> [f64; 3] {
        grid_point(flat, self.n, self.dim)
    }

    /// Fourier coefficients, component-major, unnormalized forward convention.
    pub fn spectrum(&self) -> &[Complex64] {
        self.spectrum.get_or_init(|| {
            let p = self.points();
            let mut out = Vec::with_capacity(self.samples.len());
            for c in 0..self.components {
                out.extend(fourier::forward(&self.samples[c * p..(c + 1) * p], self.n, self.dim));
            }
            out
        })
    }

    pub fn component_spectrum(&self, c: usize) -> &[Complex64] {
        let p = self.points();
        &self.spectrum()[c * p..(c + 1) * p]
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.components == other.components
    }

    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if !self.same_shape(other) {
            return Err(Error::ShapeMismatch(format!(
                "fields (dim {}, N {}, comps {}) and (dim {}, N {}, comps {})",
                self.dim, self.n, self.components, other.dim, other.n, other.components
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }

    pub fn map_samples(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            n: self.n,
            components: self.components,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
            spectrum: OnceLock::new(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map_samples(|v| v * factor)
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            dim: self.dim,
            n: self.n,
            components: self.components,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + factor * b).collect(),
            spectrum: OnceLock::new(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    /// Band-limited trigonometric interpolant of component `c` at an arbitrary point.
    ///
    /// Reproduces the samples exactly at grid nodes. The Nyquist mode of each
    /// axis contributes through `cos(N x / 2)` so the interpolant stays real.
    pub fn interpolate(&self, c: usize, x: &[f64]) -> f64 {
        let n = self.n;
        let spec = self.component_spectrum(c);
        let mut factors: [Vec<Complex64>; 3] = Default::default();
        for axis in 0..self.dim {
            factors[axis] = (0..n)
                .map(|k| {
                    if 2 * k == n {
                        Complex64::new((0.5 * n as f64 * x[axis]).cos(), 0.0)
                    } else {
                        let xi = fourier::wavenumber(k, n);
                        Complex64::from_polar(1.0, xi * x[axis])
                    }
                })
                .collect();
        }
        let total = match self.dim {
            1 => spec.iter().zip(&factors[0]).map(|(c, e)| c * e).sum::<Complex64>(),
            2 => {
                let mut acc = Complex64::new(0.0, 0.0);
                for k1 in 0..n {
                    let row = &spec[k1 * n..(k1 + 1) * n];
                    let inner: Complex64 = row.iter().zip(&factors[1]).map(|(c, e)| c * e).sum();
                    acc += inner * factors[0][k1];
                }
                acc
            }
            _ => {
                let mut acc = Complex64::new(0.0, 0.0);
                for k1 in 0..n {
                    let mut mid = Complex64::new(0.0, 0.0);
                    for k2 in 0..n {
                        let base = (k1 * n + k2) * n;
                        let row = &spec[base..base + n];
                        let inner: Complex64 = row.iter().zip(&factors[2]).map(|(c, e)| c * e).sum();
                        mid += inner * factors[1][k2];
                    }
                    acc += mid * factors[0][k1];
                }
                acc
            }
        };
        total.re / self.points() as f64
    }

    /// CSV export: header `# dim,n_modes,components` (values) then one row
    /// `x1,...,xdim,v1,...,vcomponents` per grid point in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# {},{},{}", self.dim, self.n, self.components);
        let p = self.points();
        for flat in 0..p {
            let x = self.point(flat);
            let mut row: Vec<String> = x[..self.dim].iter().map(|v| format!("{v:e}")).collect();
            for c in 0..self.components {
                row.push(format!("{:e}", self.samples[c * p + flat]));
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::InvalidInput("empty field CSV".into()))?;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| Error::InvalidInput("field CSV must start with '# dim,n_modes,components'".into()))?;
        let parts: Vec<usize> = header
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::InvalidInput(format!("bad field CSV header: {e}")))?;
        let [dim, n, components] = parts[..] else {
            return Err(Error::InvalidInput("field CSV header needs three integers".into()));
        };
        validate_shape(dim, n, components)?;
        let p = n.pow(dim as u32);
        let mut samples = vec![0.0; components * p];
        let mut count = 0;
        for (flat, line) in lines.enumerate() {
            if flat >= p {
                return Err(Error::ShapeMismatch(format!("more than {p} rows in field CSV")));
            }
            let values: Vec<f64> = line
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidInput(format!("bad field CSV row {flat}: {e}")))?;
            if values.len() != dim + components {
                return Err(Error::ShapeMismatch(format!(
                    "row {flat} has {} columns, expected {}",
                    values.len(),
                    dim + components
                )));
            }
            for c in 0..components {
                samples[c * p + flat] = values[dim + c];
            }
            count += 1;
        }
        if count != p {
            return Err(Error::ShapeMismatch(format!("expected {p} rows, got {count}")));
        }
        Self::new(dim, n, components, samples)
    }
}

/// Coordinates of grid node `flat` on the `n^dim` torus grid.
pub fn grid_point(flat: usize, n: usize, dim: usize) -> [f64; 3] {
    let idx = fourier::unflatten(flat, n, dim);
    let h = TAU / n as f64;
    let mut x = [0.0; 3];
    for axis in 0..dim {
        x[axis] = idx[axis] as f64 * h;
    }
    x
}
