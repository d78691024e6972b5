use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

use super::calculus::spectral_divergence;
use super::TorusField;
use crate::error::{Error, Result};
use crate::rng::{normal, seeded, uniform};

/// `a(x)` written into the output slice.
pub type FieldFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
/// `Da(x)` written row-major: `out[i * dim + j] = d a_i / d x_j`.
pub type JacobianFn = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Coefficient vector `a(x)` of the transport and linearized Euler equations.
///
/// `lipschitz_m` bounds `|a(x) - a(y)| / |x - y|`; `growth_c` bounds
/// `|a(x)| / (1 + |x|)`. Both are declared by the caller and can be audited
/// with [`VelocityField::validate`].
#[derive(Clone)]
pub struct VelocityField {
    name: String,
    dim: usize,
    eval: FieldFn,
    jac_eval: Option<JacobianFn>,
    lipschitz_m: f64,
    growth_c: f64,
    periodic: bool,
}

impl fmt::Debug for VelocityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VelocityField")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("has_jacobian", &self.jac_eval.is_some())
            .field("lipschitz_m", &self.lipschitz_m)
            .field("growth_c", &self.growth_c)
            .field("periodic", &self.periodic)
            .finish()
    }
}

/// Outcome of auditing a field against its declared constants.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldAudit {
    pub max_divergence: f64,
    pub divergence_bound: f64,
    pub max_lipschitz_ratio: f64,
    pub max_growth_ratio: f64,
    pub max_jacobian_norm: Option<f64>,
}

impl FieldAudit {
    pub fn solenoidal(&self) -> bool {
        self.max_divergence <= self.divergence_bound
    }

    pub fn constants_hold(&self, field: &VelocityField) -> bool {
        self.max_lipschitz_ratio <= field.lipschitz_m * (1.0 + 1e-9)
            && self.max_growth_ratio <= field.growth_c * (1.0 + 1e-9)
            && self.max_jacobian_norm.is_none_or(|m| m <= field.lipschitz_m * (1.0 + 1e-9))
    }
}

impl VelocityField {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        eval: FieldFn,
        jac_eval: Option<JacobianFn>,
        lipschitz_m: f64,
        growth_c: f64,
        periodic: bool,
    ) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidInput(format!("field dimension must be 1..=3, got {dim}")));
        }
        if !(lipschitz_m > 0.0 && lipschitz_m.is_finite()) || !(growth_c > 0.0 && growth_c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "declared constants must be positive and finite (m = {lipschitz_m}, c = {growth_c})"
            )));
        }
        Ok(Self { name: name.into(), dim, eval, jac_eval, lipschitz_m, growth_c, periodic })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn lipschitz_m(&self) -> f64 {
        self.lipschitz_m
    }

    pub fn growth_c(&self) -> f64 {
        self.growth_c
    }

    /// Decay exponent base `1 / c`.
    pub fn alpha(&self) -> f64 {
        1.0 / self.growth_c
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn has_jacobian(&self) -> bool {
        self.jac_eval.is_some()
    }

    pub fn eval_into(&self, x: &[f64], out: &mut [f64]) {
        (self.eval)(x, out)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        (self.eval)(x, &mut out);
        out
    }

    /// Writes `Da(x)` row-major into `out`; returns false without a Jacobian.
    pub fn jacobian_into(&self, x: &[f64], out: &mut [f64]) -> bool {
        match &self.jac_eval {
            Some(j) => {
                j(x, out);
                true
            }
            None => false,
        }
    }

    pub fn jacobian(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut out = vec![0.0; self.dim * self.dim];
        self.jacobian_into(x, &mut out).then_some(out)
    }

    /// The same field with reversed direction, `-a(x)`.
    pub fn reversed(&self) -> Self {
        let eval = self.eval.clone();
        let jac = self.jac_eval.clone();
        Self {
            name: format!("-{}", self.name),
            dim: self.dim,
            eval: Arc::new(move |x, out| {
                eval(x, out);
                out.iter_mut().for_each(|v| *v = -*v);
            }),
            jac_eval: jac.map(|j| -> JacobianFn {
                Arc::new(move |x, out| {
                    j(x, out);
                    out.iter_mut().for_each(|v| *v = -*v);
                })
            }),
            lipschitz_m: self.lipschitz_m,
            growth_c: self.growth_c,
            periodic: self.periodic,
        }
    }

    /// Samples the field on the torus grid as a vector [`TorusField`].
    pub fn sample(&self, n: usize) -> Result<TorusField> {
        let eval = self.eval.clone();
        TorusField::vector_from_fn(self.dim, n, move |x, out| eval(x, out))
    }

    /// Audits solenoidality, the Lipschitz and growth constants and `|Da|`.
    ///
    /// Divergence is measured spectrally on a `32^dim` torus grid for
    /// periodic fields and by central differences over `[-2, 2]^dim`
    /// otherwise. Constants are probed on 1000 random pairs.
    pub fn validate(&self, seed: u64) -> Result<FieldAudit> {
        let d = self.dim;
        let probe_n = 32;
        let (max_div, max_grad) = if self.periodic {
            let sampled = self.sample(probe_n)?;
            let div = spectral_divergence(&sampled)?;
            let mut grad_max: f64 = 0.0;
            for c in 0..d {
                for axis in 0..d {
                    let g = super::calculus::spectral_partial(&sampled, c, axis);
                    grad_max = grad_max.max(g.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
                }
            }
            (div.max_abs(), grad_max)
        } else {
            let step = 1e-5;
            let points = probe_n.pow(d as u32);
            let mut div_max: f64 = 0.0;
            let mut grad_max: f64 = 0.0;
            let mut x = [0.0; 3];
            let (mut plus, mut minus) = ([0.0; 3], [0.0; 3]);
            for flat in 0..points {
                let idx = super::fourier::unflatten(flat, probe_n, d);
                for axis in 0..d {
                    x[axis] = -2.0 + 4.0 * idx[axis] as f64 / (probe_n - 1) as f64;
                }
                let mut div = 0.0;
                for axis in 0..d {
                    let mut xp = x;
                    let mut xm = x;
                    xp[axis] += step;
                    xm[axis] -= step;
                    self.eval_into(&xp[..d], &mut plus[..d]);
                    self.eval_into(&xm[..d], &mut minus[..d]);
                    for c in 0..d {
                        let g = (plus[c] - minus[c]) / (2.0 * step);
                        grad_max = grad_max.max(g.abs());
                        if c == axis {
                            div += g;
                        }
                    }
                }
                div_max = div_max.max(div.abs());
            }
            (div_max, grad_max)
        };

        let mut rng = seeded(seed);
        let span = if self.periodic { TAU } else { 4.0 };
        let (mut lip, mut growth): (f64, f64) = (0.0, 0.0);
        let mut jac_norm: Option<f64> = self.jac_eval.as_ref().map(|_| 0.0);
        let (mut ax, mut ay) = ([0.0; 3], [0.0; 3]);
        let mut jac = [0.0; 9];
        for _ in 0..1000 {
            let mut x = [0.0; 3];
            let mut y = [0.0; 3];
            for axis in 0..d {
                x[axis] = uniform(&mut rng, -span, span);
                y[axis] = x[axis] + 0.5 * normal(&mut rng);
            }
            self.eval_into(&x[..d], &mut ax[..d]);
            self.eval_into(&y[..d], &mut ay[..d]);
            let dist = norm(&sub(&x[..d], &y[..d]));
            if dist > 0.0 {
                lip = lip.max(norm(&sub(&ax[..d], &ay[..d])) / dist);
            }
            growth = growth.max(norm(&ax[..d]) / (1.0 + norm(&x[..d])));
            if self.jacobian_into(&x[..d], &mut jac[..d * d]) {
                let m = operator_norm(&jac[..d * d], d);
                jac_norm = jac_norm.map(|v| v.max(m));
            }
        }
        Ok(FieldAudit {
            max_divergence: max_div,
            divergence_bound: 1e-6 * (1.0 + max_grad),
            max_lipschitz_ratio: lip,
            max_growth_ratio: growth,
            max_jacobian_norm: jac_norm,
        })
    }
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Spectral norm of a small row-major square matrix.
pub(crate) fn operator_norm(m: &[f64], d: usize) -> f64 {
    let mat = nalgebra::DMatrix::from_row_slice(d, d, m);
    mat.singular_values().max()
}

// Bundled fields.

impl VelocityField {
    /// Rigid rotation `(-(x2 - c2), x1 - c1)` about `center`; not periodic.
    pub fn rotation(center: [f64; 2]) -> Self {
        let [c1, c2] = center;
        let reach = (c1 * c1 + c2 * c2).sqrt();
        Self::new(
            "rotation",
            2,
            Arc::new(move |x, out| {
                out[0] = -(x[1] - c2);
                out[1] = x[0] - c1;
            }),
            Some(Arc::new(|_, out| {
                out.copy_from_slice(&[0.0, -1.0, 1.0, 0.0]);
            })),
            1.0,
            1.0 + reach,
            false,
        )
        .expect("rotation constants are valid")
    }

    /// Rotation with angular speed `omega` about the origin; `m = c = |omega|`.
    pub fn scaled_rotation(omega: f64) -> Self {
        Self::new(
            "scaled_rotation",
            2,
            Arc::new(move |x, out| {
                out[0] = -omega * x[1];
                out[1] = omega * x[0];
            }),
            Some(Arc::new(move |_, out| out.copy_from_slice(&[0.0, -omega, omega, 0.0]))),
            omega.abs(),
            omega.abs(),
            false,
        )
        .expect("valid constants")
    }

    /// Hyperbolic strain `rate * (x1, -x2)`: solenoidal, linear growth with `c = m = rate`.
    pub fn strain(rate: f64) -> Self {
        Self::new(
            "strain",
            2,
            Arc::new(move |x, out| {
                out[0] = rate * x[0];
                out[1] = -rate * x[1];
            }),
            Some(Arc::new(move |_, out| out.copy_from_slice(&[rate, 0.0, 0.0, -rate]))),
            rate.abs(),
            rate.abs(),
            false,
        )
        .expect("valid constants")
    }

    /// Constant drift `v`. Declared `m = 1` (any positive value is a valid bound).
    pub fn constant(v: &[f64]) -> Result<Self> {
        let v = v.to_vec();
        let dim = v.len();
        let speed = norm(&v).max(1e-300);
        let vv = v.clone();
        Self::new(
            "constant",
            dim,
            Arc::new(move |_, out| out.copy_from_slice(&vv)),
            Some(Arc::new(|_, out| out.iter_mut().for_each(|o| *o = 0.0))),
            1.0,
            speed.max(1.0),
            true,
        )
    }

    /// Shear `(sin x2, 0)` on the 2-torus; 1-Lipschitz.
    pub fn shear_sin() -> Self {
        Self::new(
            "shear_sin",
            2,
            Arc::new(|x, out| {
                out[0] = x[1].sin();
                out[1] = 0.0;
            }),
            Some(Arc::new(|x, out| out.copy_from_slice(&[0.0, x[1].cos(), 0.0, 0.0]))),
            1.0,
            1.0,
            true,
        )
        .expect("valid constants")
    }

    /// Periodic analogue of the rotation, `(-sin x2, sin x1)`.
    pub fn sine_rotation() -> Self {
        Self::new(
            "sine_rotation",
            2,
            Arc::new(|x, out| {
                out[0] = -x[1].sin();
                out[1] = x[0].sin();
            }),
            Some(Arc::new(|x, out| out.copy_from_slice(&[0.0, -x[1].cos(), x[0].cos(), 0.0]))),
            1.0,
            std::f64::consts::SQRT_2,
            true,
        )
        .expect("valid constants")
    }

    /// Expanding field `a(x) = x`; not solenoidal, a detector probe only.
    pub fn expansion(dim: usize) -> Result<Self> {
        Self::new(
            "expansion",
            dim,
            Arc::new(|x, out| out.copy_from_slice(x)),
            Some(Arc::new(move |_, out| {
                out.iter_mut().for_each(|o| *o = 0.0);
                for i in 0..dim {
                    out[i * dim + i] = 1.0;
                }
            })),
            1.0,
            1.0,
            false,
        )
    }

    /// Divergence-free field `(d psi / d x2, -d psi / d x1)` from a random
    /// band-limited stream function `psi` with modes `|k_i| <= 3`.
    pub fn stream_random(seed: u64) -> Self {
        let mut rng = seeded(seed);
        let mut modes: Vec<(f64, f64, f64, f64)> = Vec::new();
        for k1 in -3i32..=3 {
            for k2 in 0i32..=3 {
                if (k2 == 0 && k1 <= 0) || k1 * k1 + k2 * k2 > 10 {
                    continue;
                }
                let k2sq = (k1 * k1 + k2 * k2) as f64;
                let amp = normal(&mut rng) / k2sq.powf(1.5);
                let phase = uniform(&mut rng, 0.0, TAU);
                modes.push((k1 as f64, k2 as f64, amp, phase));
            }
        }
        let speed: f64 = modes.iter().map(|(k1, k2, a, _)| a.abs() * (k1 * k1 + k2 * k2).sqrt()).sum();
        let lip: f64 = modes.iter().map(|(k1, k2, a, _)| a.abs() * (k1 * k1 + k2 * k2)).sum();
        let m_eval = modes.clone();
        let m_jac = modes;
        Self::new(
            format!("stream_random({seed})"),
            2,
            Arc::new(move |x, out| {
                out[0] = 0.0;
                out[1] = 0.0;
                // psi = sum a sin(k.x + p): a = (psi_x2, -psi_x1)
                for (k1, k2, a, p) in &m_eval {
                    let c = a * (k1 * x[0] + k2 * x[1] + p).cos();
                    out[0] += c * k2;
                    out[1] -= c * k1;
                }
            }),
            Some(Arc::new(move |x, out| {
                out.iter_mut().for_each(|o| *o = 0.0);
                for (k1, k2, a, p) in &m_jac {
                    let s = -a * (k1 * x[0] + k2 * x[1] + p).sin();
                    out[0] += s * k2 * k1;
                    out[1] += s * k2 * k2;
                    out[2] -= s * k1 * k1;
                    out[3] -= s * k1 * k2;
                }
            })),
            lip.max(1e-12),
            speed.max(1e-12),
            true,
        )
        .expect("valid constants")
    }

    /// Looks up a registry name: `rotation`, `constant`, `shear_sin` or `stream_random(<seed>)`.
    pub fn from_registry(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "rotation" => Ok(Self::rotation([0.0, 0.0])),
            "constant" => Self::constant(&[1.0, 0.0]),
            "shear_sin" => Ok(Self::shear_sin()),
            _ => {
                if let Some(rest) = name.strip_prefix("stream_random") {
                    let seed = rest
                        .trim()
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .map(str::trim)
                        .ok_or_else(|| Error::InvalidInput(format!("malformed field name '{name}'")))?;
                    let seed = if seed.is_empty() {
                        0
                    } else {
                        seed.parse::<u64>().map_err(|e| Error::InvalidInput(format!("bad seed in '{name}': {e}")))?
                    };
                    Ok(Self::stream_random(seed))
                } else {
                    Err(Error::InvalidInput(format!("unknown velocity field '{name}'")))
                }
            }
        }
    }
}
