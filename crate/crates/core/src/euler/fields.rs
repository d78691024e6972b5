use std::f64::consts::TAU;

use super::projector::{leray_project, SpectralProjector};
use crate::error::Result;
use crate::hilbert_grid::TorusField;
use crate::rng::{normal, seeded, uniform};

/// Random divergence-free vector field with wavenumbers `|k_i| <= bandwidth`.
///
/// Each component is a sum of `cos(k . x + phase)` with standard normal
/// amplitudes; the Leray projection removes the gradient part.
pub fn random_solenoidal(dim: usize, n: usize, bandwidth: usize, seed: u64) -> Result<TorusField> {
    let mut rng = seeded(seed);
    let b = bandwidth as i64;
    let mut modes = Vec::new();
    let range: Vec<i64> = (-b..=b).collect();
    let mut push = |k: [i64; 3], rng: &mut crate::rng::LabRng| {
        let amps: Vec<(f64, f64)> = (0..dim).map(|_| (normal(rng), uniform(rng, 0.0, TAU))).collect();
        modes.push((k, amps));
    };
    for &k1 in &range {
        for &k2 in if dim > 1 { &range[..] } else { &[0][..] } {
            for &k3 in if dim > 2 { &range[..] } else { &[0][..] } {
                push([k1, k2, k3], &mut rng);
            }
        }
    }
    let u = TorusField::vector_from_fn(dim, n, |x, out| {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (k, amps) in &modes {
            let phase: f64 = (0..dim).map(|i| k[i] as f64 * x[i]).sum();
            for (c, (a, p)) in amps.iter().enumerate() {
                out[c] += a * (phase + p).cos();
            }
        }
    })?;
    leray_project(&SpectralProjector::new(dim, n)?, &u)
}

/// Divergence-free field `(d psi / d x2, -d psi / d x1)` of the stream
/// function `psi = sin x1 cos 2x2 + cos(x1 + x2) / 2` on the 2-torus.
pub fn stream_vortex(n: usize) -> Result<TorusField> {
    TorusField::vector_from_fn(2, n, |x, out| {
        out[0] = -2.0 * x[0].sin() * (2.0 * x[1]).sin() - 0.5 * (x[0] + x[1]).sin();
        out[1] = -x[0].cos() * (2.0 * x[1]).cos() + 0.5 * (x[0] + x[1]).sin();
    })
}
