//! Multi-dimensional discrete Fourier transforms on row-major `N^dim` grids.
//!
//! Forward transforms are unnormalized; inverses carry the `1/N^dim` factor,
//! so `inverse(forward(u)) == u`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

fn plans(n: usize) -> PlanPair {
    static CACHE: OnceLock<Mutex<HashMap<usize, PlanPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Signed wavenumber of index `k` on an `n`-point axis.
///
/// The Nyquist index `n/2` maps to 0 so that every derivative multiplier is
/// odd and every projector multiplier is consistent with the derivative.
pub fn wavenumber(k: usize, n: usize) -> f64 {
    if 2 * k < n {
        k as f64
    } else if 2 * k == n {
        0.0
    } else {
        k as f64 - n as f64
    }
}

/// Multi-index of a flat row-major offset (last axis fastest).
pub fn unflatten(mut flat: usize, n: usize, dim: usize) -> [usize; 3] {
    let mut idx = [0usize; 3];
    for axis in (0..dim).rev() {
        idx[axis] = flat % n;
        flat /= n;
    }
    idx
}

pub fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

/// Wavevector of a flat spectral offset.
pub fn wavevector(flat: usize, n: usize, dim: usize) -> [f64; 3] {
    let idx = unflatten(flat, n, dim);
    let mut xi = [0.0; 3];
    for axis in 0..dim {
        xi[axis] = wavenumber(idx[axis], n);
    }
    xi
}

fn transform_axes(data: &mut [Complex64], n: usize, dim: usize, inverse: bool) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let (fwd, inv) = plans(n);
    let plan = if inverse { inv } else { fwd };
    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                plan.process(&mut line);
                for (k, value) in line.iter().enumerate() {
                    data[start + k * stride] = *value;
                }
            }
        }
    }
}

pub fn forward(real: &[f64], n: usize, dim: usize) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = real.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform_axes(&mut data, n, dim, false);
    data
}

pub fn forward_complex(data: &mut [Complex64], n: usize, dim: usize) {
    transform_axes(data, n, dim, false);
}

/// Inverse transform, returning the real part.
pub fn inverse_real(spectrum: &[Complex64], n: usize, dim: usize) -> Vec<f64> {
    let mut data = spectrum.to_vec();
    inverse_complex(&mut data, n, dim);
    data.iter().map(|c| c.re).collect()
}

pub fn inverse_complex(data: &mut [Complex64], n: usize, dim: usize) {
    transform_axes(data, n, dim, true);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}
