use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::Serialize;

use super::flow::{flow_map, variational_rhs, variational_start, FlowOptions, Stepper, FD_STEP};
use crate::error::{Error, Result};
use crate::hilbert_grid::{norm, VelocityField};

/// Source term of the stationary equation `phi + h a . grad phi = psi`.
pub type Source<'a> = &'a (dyn Fn(&[f64]) -> f64 + Sync);

/// Parameters of the characteristic resolvent integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventParams {
    pub h: f64,
    /// `supp psi` lies in `|x| <= support_radius_r`.
    pub support_radius_r: f64,
    /// Simpson node spacing in `s`.
    pub quad_step: f64,
    /// Neglected weight `e^{s/h}` relative to the start of the window.
    pub tail_tol: f64,
}

impl ResolventParams {
    pub fn new(h: f64, support_radius_r: f64, quad_step: f64, tail_tol: f64) -> Result<Self> {
        let p = Self { h, support_radius_r, quad_step, tail_tol };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if !(positive(self.h) && positive(self.support_radius_r) && positive(self.quad_step)) {
            return Err(Error::InvalidInput(format!(
                "h, support radius and quadrature step must be positive (h = {}, r = {}, step = {})",
                self.h, self.support_radius_r, self.quad_step
            )));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::InvalidInput(format!("tail_tol must lie in (0, 1), got {}", self.tail_tol)));
        }
        Ok(())
    }

    /// Rejects `h m >= 1`.
    pub fn check_field(&self, a: &VelocityField) -> Result<()> {
        self.validate()?;
        if self.h * a.lipschitz_m() >= 1.0 {
            return Err(Error::Precondition(format!(
                "resolvent needs h m < 1, got h = {} and m = {}",
                self.h,
                a.lipschitz_m()
            )));
        }
        Ok(())
    }

    /// Entry time `s(y)` into the ball `|x| <= r` along the backward characteristic,
    /// `-(1/c) ln((1 + |y|) / (1 + r))` for `|y| > r`, else 0. Before it
    /// the integrand vanishes.
    pub fn entry_time(&self, a: &VelocityField, y: &[f64]) -> f64 {
        let ry = norm(y);
        if ry > self.support_radius_r {
            -a.alpha() * ((1.0 + ry) / (1.0 + self.support_radius_r)).ln()
        } else {
            0.0
        }
    }

    /// Integration window `[s_lo, s_hi]` with `s_hi` the entry time and
    /// `s_lo = s_hi + h ln(tail_tol)`.
    pub fn window(&self, a: &VelocityField, y: &[f64]) -> (f64, f64) {
        let s_hi = self.entry_time(a, y);
        (s_hi + self.h * self.tail_tol.ln(), s_hi)
    }
}

/// Composite Simpson rule over `[s_lo, s_hi]` walking one backward
/// trajectory node by node; `acc` receives the weighted sum of `integrand`.
fn characteristic_simpson(
    rhs: &(dyn Fn(&[f64], &mut [f64]) + '_),
    mut state: Vec<f64>,
    (s_lo, s_hi): (f64, f64),
    quad_step: f64,
    opts: &FlowOptions,
    acc: &mut [f64],
    mut integrand: impl FnMut(f64, &[f64], &mut [f64]),
) -> Result<()> {
    let mut stepper = Stepper::new(rhs, state.len(), *opts);
    if s_hi != 0.0 {
        stepper.advance(&mut state, s_hi)?;
    }
    let intervals = {
        let m = ((s_hi - s_lo) / quad_step).ceil() as usize;
        (m.max(2) + 1) & !1
    };
    let ds = (s_hi - s_lo) / intervals as f64;
    let mut local = vec![0.0; acc.len()];
    for i in 0..=intervals {
        if i > 0 {
            stepper.advance(&mut state, -ds)?;
        }
        let s = s_hi - i as f64 * ds;
        integrand(s, &state, &mut local);
        let w = if i == 0 || i == intervals {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        for (a, l) in acc.iter_mut().zip(&local) {
            *a += w * ds / 3.0 * l;
        }
    }
    Ok(())
}

fn check_point(a: &VelocityField, y: &[f64]) -> Result<()> {
    if y.len() != a.dim() {
        return Err(Error::ShapeMismatch(format!("point has {} coordinates, field dimension is {}", y.len(), a.dim())));
    }
    Ok(())
}

/// `phi(y) = (1/h) int e^{s/h} psi(x(s; 0, y)) ds` over `s <= 0`, the
/// bounded solution of `phi + h a . grad phi = psi`.
pub fn resolvent_apply(
    a: &VelocityField,
    psi: Source<'_>,
    params: &ResolventParams,
    y: &[f64],
    opts: &FlowOptions,
) -> Result<f64> {
    params.check_field(a)?;
    opts.validate()?;
    check_point(a, y)?;
    let h = params.h;
    let rhs = |x: &[f64], out: &mut [f64]| a.eval_into(x, out);
    let mut acc = [0.0];
    characteristic_simpson(&rhs, y.to_vec(), params.window(a, y), params.quad_step, opts, &mut acc, |s, x, out| {
        out[0] = (s / h).exp() * psi(x)
    })?;
    Ok(acc[0] / h)
}

/// Central-difference gradient of `psi` with step [`FD_STEP`].
fn source_gradient(psi: Source<'_>, x: &[f64], out: &mut [f64]) {
    let mut probe = x.to_vec();
    for j in 0..x.len() {
        probe[j] = x[j] + FD_STEP;
        let plus = psi(&probe);
        probe[j] = x[j] - FD_STEP;
        let minus = psi(&probe);
        probe[j] = x[j];
        out[j] = (plus - minus) / (2.0 * FD_STEP);
    }
}

/// `grad phi(y) = (1/h) int e^{s/h} X(s)^T grad psi(x(s; 0, y)) ds` with
/// `X = D_y x` from the variational equation. Without a field Jacobian,
/// falls back to central differences of [`resolvent_apply`].
pub fn resolvent_gradient(
    a: &VelocityField,
    psi: Source<'_>,
    params: &ResolventParams,
    y: &[f64],
    opts: &FlowOptions,
) -> Result<Vec<f64>> {
    params.check_field(a)?;
    opts.validate()?;
    check_point(a, y)?;
    let d = a.dim();
    if !a.has_jacobian() {
        if !opts.fd_fallback {
            return Err(Error::Unsupported(format!(
                "field '{}' has no Jacobian and the finite-difference fallback is disabled",
                a.name()
            )));
        }
        let mut probe = y.to_vec();
        let mut grad = vec![0.0; d];
        for j in 0..d {
            probe[j] = y[j] + FD_STEP;
            let plus = resolvent_apply(a, psi, params, &probe, opts)?;
            probe[j] = y[j] - FD_STEP;
            let minus = resolvent_apply(a, psi, params, &probe, opts)?;
            probe[j] = y[j];
            grad[j] = (plus - minus) / (2.0 * FD_STEP);
        }
        return Ok(grad);
    }
    let h = params.h;
    let rhs = variational_rhs(a);
    let mut acc = vec![0.0; d];
    let mut g = [0.0; 3];
    characteristic_simpson(&rhs, variational_start(y), params.window(a, y), params.quad_step, opts, &mut acc, |s, st, out| {
        source_gradient(psi, &st[..d], &mut g[..d]);
        let w = (s / h).exp();
        let xm = &st[d..];
        for j in 0..d {
            out[j] = w * (0..d).map(|i| xm[i * d + j] * g[i]).sum::<f64>();
        }
    })?;
    Ok(acc.into_iter().map(|v| v / h).collect())
}

/// Relative margin allowed above each exponent bound by [`decay_check`].
pub const DECAY_MARGIN: f64 = 0.15;

/// Fitted power-law decay of `phi` and `grad phi` against `1 + |y|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub radii: Vec<f64>,
    pub max_value: Vec<f64>,
    pub max_gradient: Vec<f64>,
    pub value_slope: f64,
    /// `-alpha / h`.
    pub value_bound: f64,
    pub gradient_slope: f64,
    /// `-alpha (1/h - m)`.
    pub gradient_bound: f64,
    pub margin: f64,
    pub value_ok: bool,
    pub gradient_ok: bool,
}

impl DecayFit {
    pub fn passed(&self) -> bool {
        self.value_ok && self.gradient_ok
    }
}

/// Maximum of `f` over the sphere `|y| = radius`.
///
/// In two dimensions a coarse sweep of 64 angles is followed by six
/// zoom levels around the best angle, each tenfold narrower.
fn sphere_max(dim: usize, radius: f64, f: &(dyn Fn(&[f64]) -> Result<f64> + Sync)) -> Result<f64> {
    let best = |pts: Vec<Vec<f64>>| -> Result<(usize, f64)> {
        let vals = pts.par_iter().map(|p| f(p)).collect::<Result<Vec<f64>>>()?;
        Ok(vals.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc }))
    };
    match dim {
        1 => Ok(f(&[radius])?.max(f(&[-radius])?)),
        2 => {
            let at = |th: f64| vec![radius * th.cos(), radius * th.sin()];
            let coarse = 64;
            let mut delta = TAU / coarse as f64;
            let (i, mut top) = best((0..coarse).map(|k| at(k as f64 * delta)).collect())?;
            let mut theta = i as f64 * delta;
            for _ in 0..6 {
                let angles: Vec<f64> = (-10..=10).map(|j| theta + j as f64 * delta / 10.0).collect();
                let (j, v) = best(angles.iter().map(|&th| at(th)).collect())?;
                if v > top {
                    top = v;
                    theta = angles[j];
                }
                delta /= 10.0;
            }
            Ok(top)
        }
        _ => {
            // Fibonacci sphere
            let count = 512;
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            let pts = (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let rho = (1.0 - z * z).sqrt();
                    let phi = golden * i as f64;
                    vec![radius * rho * phi.cos(), radius * rho * phi.sin(), radius * z]
                })
                .collect();
            Ok(best(pts)?.1)
        }
    }
}

fn fit_slope(radii: &[f64], values: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = radii
        .iter()
        .zip(values)
        .filter(|(_, &v)| v > floor)
        .map(|(&r, &v)| ((1.0 + r).ln(), v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Samples `max |phi|` and `max |grad phi|` on spheres of the given radii and
/// fits log-log slopes against `1 + R`. Each slope passes when it is at most
/// its bound plus [`DECAY_MARGIN`] times the bound's magnitude.
pub fn decay_check(
    a: &VelocityField,
    psi: Source<'_>,
    params: &ResolventParams,
    radii: &[f64],
    opts: &FlowOptions,
) -> Result<DecayFit> {
    params.check_field(a)?;
    if radii.len() < 2 {
        return Err(Error::InvalidInput("decay fit needs at least two radii".into()));
    }
    if let Some(r) = radii.iter().find(|&&r| !(r > params.support_radius_r) || !r.is_finite()) {
        return Err(Error::InvalidInput(format!(
            "radius {r} does not lie beyond the support radius {}",
            params.support_radius_r
        )));
    }
    let dim = a.dim();
    let mut max_value = Vec::with_capacity(radii.len());
    let mut max_gradient = Vec::with_capacity(radii.len());
    for &r in radii {
        max_value.push(sphere_max(dim, r, &|y| Ok(resolvent_apply(a, psi, params, y, opts)?.abs()))?);
        max_gradient.push(sphere_max(dim, r, &|y| Ok(norm(&resolvent_gradient(a, psi, params, y, opts)?)))?);
    }
    let floor = params.tail_tol;
    let value_slope = fit_slope(radii, &max_value, floor).ok_or_else(|| {
        Error::Inconclusive(format!("fewer than two radii with max |phi| above {floor}; radii too large"))
    })?;
    let gradient_slope = fit_slope(radii, &max_gradient, floor).ok_or_else(|| {
        Error::Inconclusive(format!("fewer than two radii with max |grad phi| above {floor}; radii too large"))
    })?;
    let value_bound = -a.alpha() / params.h;
    let gradient_bound = -a.alpha() * (1.0 / params.h - a.lipschitz_m());
    Ok(DecayFit {
        radii: radii.to_vec(),
        max_value,
        max_gradient,
        value_slope,
        value_bound,
        gradient_slope,
        gradient_bound,
        margin: DECAY_MARGIN,
        value_ok: value_slope <= value_bound + DECAY_MARGIN * value_bound.abs(),
        gradient_ok: gradient_slope <= gradient_bound + DECAY_MARGIN * gradient_bound.abs(),
    })
}

/// Smooth compactly supported bump `exp(1 - 1 / (1 - rho^2))`, `rho = |x - center| / width`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactBump {
    pub center: Vec<f64>,
    pub width: f64,
}

impl CompactBump {
    pub fn new(center: &[f64], width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidInput(format!("bump width must be positive, got {width}")));
        }
        Ok(Self { center: center.to_vec(), width })
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let rho2: f64 = x.iter().zip(&self.center).map(|(p, c)| (p - c).powi(2)).sum::<f64>() / (self.width * self.width);
        if rho2 >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - rho2)).exp()
        }
    }

    /// Smallest `r` with the support inside `|x| <= r`.
    pub fn support_radius(&self) -> f64 {
        norm(&self.center) + self.width
    }
}

/// Confirms `x(s; 0, y)` stays out of the support over the exact-zero part of the window.
pub fn entry_time_is_conservative(
    a: &VelocityField,
    params: &ResolventParams,
    y: &[f64],
    opts: &FlowOptions,
) -> Result<bool> {
    let s = params.entry_time(a, y);
    if s == 0.0 {
        return Ok(true);
    }
    let x = flow_map(a, 0.0, y, s, opts)?;
    Ok(norm(&x) >= params.support_radius_r * (1.0 - 1e-9))
}
