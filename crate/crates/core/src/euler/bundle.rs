use num_complex::Complex64;

use super::projector::{gradient_part, leray_project, SpectralProjector};
use crate::error::{Error, Result};
use crate::hilbert_grid::fourier::{self, wavevector};
use crate::hilbert_grid::{spectral_divergence, spectral_partial, TorusField, VelocityField};

/// Coefficient field of the linearized Euler system sampled on the torus
/// grid, together with its Jacobian samples `(a_j)_{x_k}`.
#[derive(Debug, Clone)]
pub struct EulerOperatorBundle {
    field: VelocityField,
    projector: SpectralProjector,
    velocity: TorusField,
    /// `(a_j)_{x_k}` at grid point `i` stored at `(j * dim + k) * points + i`.
    jacobian: Vec<f64>,
    max_speed: f64,
}

/// Largest `|div u|` over the grid, computed spectrally.
pub fn max_divergence(u: &TorusField) -> Result<f64> {
    Ok(spectral_divergence(u)?.max_abs())
}

impl EulerOperatorBundle {
    /// Samples `a` on the `n^dim` grid.
    ///
    /// Requires a periodic field with a Jacobian, spectral divergence below
    /// `1e-10` and Jacobian samples matching spectral differentiation of the
    /// velocity samples within `1e-8` (the field must be resolved by `n`).
    pub fn new(field: VelocityField, n: usize) -> Result<Self> {
        if !field.periodic() {
            return Err(Error::InvalidInput(format!("field '{}' is not periodic on the torus", field.name())));
        }
        if !field.has_jacobian() {
            return Err(Error::Unsupported(format!("field '{}' has no Jacobian", field.name())));
        }
        let dim = field.dim();
        let projector = SpectralProjector::new(dim, n)?;
        let velocity = field.sample(n)?;
        let p = velocity.points();
        let mut jacobian = vec![0.0; dim * dim * p];
        let mut jac = [0.0; 9];
        for i in 0..p {
            let x = velocity.point(i);
            field.jacobian_into(&x[..dim], &mut jac[..dim * dim]);
            for jk in 0..dim * dim {
                jacobian[jk * p + i] = jac[jk];
            }
        }
        let div = max_divergence(&velocity)?;
        if div > 1e-10 {
            return Err(Error::Precondition(format!("field '{}' has spectral divergence {div:.3e}", field.name())));
        }
        let mut jac_gap: f64 = 0.0;
        for j in 0..dim {
            for k in 0..dim {
                let spectral = spectral_partial(&velocity, j, k);
                let sampled = &jacobian[(j * dim + k) * p..(j * dim + k + 1) * p];
                jac_gap = spectral.iter().zip(sampled).fold(jac_gap, |m, (a, b)| m.max((a - b).abs()));
            }
        }
        if jac_gap > 1e-8 {
            return Err(Error::Precondition(format!(
                "Jacobian of '{}' differs from spectral differentiation by {jac_gap:.3e}; N = {n} does not resolve the field",
                field.name()
            )));
        }
        let max_speed = (0..p)
            .map(|i| (0..dim).map(|c| velocity.component(c)[i].powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        Ok(Self { field, projector, velocity, jacobian, max_speed })
    }

    pub fn field(&self) -> &VelocityField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.projector.dim()
    }

    pub fn n_modes(&self) -> usize {
        self.projector.n_modes()
    }

    pub fn projector(&self) -> &SpectralProjector {
        &self.projector
    }

    pub fn velocity(&self) -> &TorusField {
        &self.velocity
    }

    /// `max |a|` over the grid.
    pub fn max_speed(&self) -> f64 {
        self.max_speed
    }

    fn jacobian_component(&self, j: usize, k: usize) -> &[f64] {
        let (d, p) = (self.dim(), self.velocity.points());
        &self.jacobian[(j * d + k) * p..(j * d + k + 1) * p]
    }

    pub(crate) fn check(&self, u: &TorusField) -> Result<()> {
        self.projector.check(u)
    }
}

/// `T u`: the pressure gradient `grad p` recovered from `u`.
///
/// With `w_j = sum_k (a_j)_{x_k} u^k`, component `l` has coefficients
/// `-sum_j w_j^(xi) xi_l xi_j / |xi|^2`; the zero mode maps to 0.
pub fn pressure_gradient_t(bundle: &EulerOperatorBundle, u: &TorusField) -> Result<TorusField> {
    bundle.check(u)?;
    let (d, n, p) = (bundle.dim(), bundle.n_modes(), u.points());
    let mut w_hat = Vec::with_capacity(d);
    for j in 0..d {
        let mut w = vec![0.0; p];
        for k in 0..d {
            let dk = bundle.jacobian_component(j, k);
            for (i, wi) in w.iter_mut().enumerate() {
                *wi += dk[i] * u.component(k)[i];
            }
        }
        w_hat.push(fourier::forward(&w, n, d));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); d * p];
    for k in 0..p {
        let xi = wavevector(k, n, d);
        let xi2: f64 = xi[..d].iter().map(|v| v * v).sum();
        if xi2 == 0.0 {
            continue;
        }
        let dot: Complex64 = (0..d).map(|j| w_hat[j][k] * xi[j]).sum();
        for l in 0..d {
            out[l * p + k] = -dot * (xi[l] / xi2);
        }
    }
    TorusField::from_spectrum(d, n, d, &out)
}

/// `B u`: componentwise advection `(B u)^l = sum_j a_j u^l_{x_j}`.
pub fn advect_b(bundle: &EulerOperatorBundle, u: &TorusField) -> Result<TorusField> {
    bundle.check(u)?;
    let (d, p) = (bundle.dim(), u.points());
    let mut out = vec![0.0; d * p];
    for l in 0..d {
        let slot = &mut out[l * p..(l + 1) * p];
        for j in 0..d {
            let du = spectral_partial(u, l, j);
            let aj = bundle.velocity.component(j);
            for i in 0..p {
                slot[i] += aj[i] * du[i];
            }
        }
    }
    TorusField::new(d, bundle.n_modes(), d, out)
}

/// `(B + T) u`, defined on all vector fields.
pub fn extended_generator(bundle: &EulerOperatorBundle, u: &TorusField) -> Result<TorusField> {
    advect_b(bundle, u)?.add(&pressure_gradient_t(bundle, u)?)
}

/// Tolerance of the solenoidality preconditions, `tol * max(1, max|u|)`.
pub(crate) fn div_tolerance(u: &TorusField, tol: f64) -> f64 {
    tol * u.max_abs().max(1.0)
}

/// `A u = P(B u)` for solenoidal `u`.
///
/// Verifies `P(T u) = 0` and `(E - P)(B u) = -T u` within `1e-8` relative
/// to `max(1, max|B u|)`; a violation means the products are not resolved
/// on the grid and is reported as a precondition failure.
pub fn generator_apply(bundle: &EulerOperatorBundle, u: &TorusField) -> Result<TorusField> {
    bundle.check(u)?;
    let div = max_divergence(u)?;
    if div > div_tolerance(u, 1e-8) {
        return Err(Error::Precondition(format!("generator input has divergence {div:.3e}")));
    }
    let bu = advect_b(bundle, u)?;
    let tu = pressure_gradient_t(bundle, u)?;
    let pbu = leray_project(&bundle.projector, &bu)?;
    let scale = 1e-8 * bu.max_abs().max(1.0);
    let ptu = leray_project(&bundle.projector, &tu)?.max_abs();
    let split = gradient_part(&bundle.projector, &bu)?.add(&tu)?.max_abs();
    if ptu > scale || split > scale {
        return Err(Error::Precondition(format!(
            "pressure consistency failed (|P T u| = {ptu:.3e}, |(E - P) B u + T u| = {split:.3e}); refine the grid"
        )));
    }
    Ok(pbu)
}

/// `P(B u)` without the consistency checks, for time stepping.
pub(crate) fn generator_unchecked(bundle: &EulerOperatorBundle, u: &TorusField) -> Result<TorusField> {
    leray_project(&bundle.projector, &advect_b(bundle, u)?)
}
