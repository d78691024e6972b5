use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert_grid::VelocityField;
use crate::rng::{seeded, uniform};

/// Largest `|t - t0|` accepted by the flow integrators.
pub const MAX_SPAN: f64 = 100.0;
/// Central finite-difference step for the fallbacks.
pub const FD_STEP: f64 = 1e-5;

/// Controls for the adaptive characteristic integrator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowOptions {
    /// Step-size cap.
    pub dt_max: f64,
    /// Local error per unit step.
    pub tol: f64,
    /// Step attempts allowed per call, rejected ones included.
    pub max_steps: usize,
    /// Permit finite differences of the flow when the field has no Jacobian.
    pub fd_fallback: bool,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self { dt_max: 0.05, tol: 1e-12, max_steps: 1_000_000, fd_fallback: true }
    }
}

impl FlowOptions {
    pub fn new(dt_max: f64, tol: f64, max_steps: usize) -> Result<Self> {
        let opts = Self { dt_max, tol, max_steps, fd_fallback: true };
        opts.validate()?;
        Ok(opts)
    }

    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt_max > 0.0 && self.dt_max <= 0.1) {
            return Err(Error::InvalidInput(format!("dt_max must lie in (0, 0.1], got {}", self.dt_max)));
        }
        if !(1e-14..=1e-4).contains(&self.tol) {
            return Err(Error::InvalidInput(format!("tol must lie in [1e-14, 1e-4], got {}", self.tol)));
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidInput("max_steps must be positive".into()));
        }
        Ok(())
    }
}

type Rhs<'a> = dyn Fn(&[f64], &mut [f64]) + 'a;

/// Classical RK4 with step doubling on an autonomous system.
///
/// Each attempt compares one step of size `h` against two of size `h / 2`;
/// the attempt is accepted when the difference, divided by 15 and by `|h|`,
/// stays below `tol`. Accepted states carry the Richardson correction.
pub(crate) struct Stepper<'a> {
    rhs: &'a Rhs<'a>,
    opts: FlowOptions,
    hint: f64,
    attempts: usize,
    elapsed: f64,
    k: [Vec<f64>; 4],
    stage: Vec<f64>,
    full: Vec<f64>,
    half: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub(crate) fn new(rhs: &'a Rhs<'a>, len: usize, opts: FlowOptions) -> Self {
        Self {
            rhs,
            opts,
            hint: opts.dt_max,
            attempts: 0,
            elapsed: 0.0,
            k: std::array::from_fn(|_| vec![0.0; len]),
            stage: vec![0.0; len],
            full: vec![0.0; len],
            half: vec![0.0; len],
        }
    }

    fn rk4(&mut self, y: &[f64], h: f64, out: &mut [f64]) {
        let n = y.len();
        (self.rhs)(y, &mut self.k[0]);
        for i in 0..n {
            self.stage[i] = y[i] + 0.5 * h * self.k[0][i];
        }
        (self.rhs)(&self.stage, &mut self.k[1]);
        for i in 0..n {
            self.stage[i] = y[i] + 0.5 * h * self.k[1][i];
        }
        (self.rhs)(&self.stage, &mut self.k[2]);
        for i in 0..n {
            self.stage[i] = y[i] + h * self.k[2][i];
        }
        (self.rhs)(&self.stage, &mut self.k[3]);
        for i in 0..n {
            out[i] = y[i] + h / 6.0 * (self.k[0][i] + 2.0 * self.k[1][i] + 2.0 * self.k[2][i] + self.k[3][i]);
        }
    }

    /// Advances `y` by the signed duration `span`.
    pub(crate) fn advance(&mut self, y: &mut [f64], span: f64) -> Result<()> {
        let dir = span.signum();
        let mut left = span.abs();
        let mut full = std::mem::take(&mut self.full);
        let mut half = std::mem::take(&mut self.half);
        let mut mid = vec![0.0; y.len()];
        while left > 0.0 {
            if self.attempts >= self.opts.max_steps {
                self.full = full;
                self.half = half;
                return Err(Error::Divergence { max_steps: self.opts.max_steps, reached: self.elapsed });
            }
            self.attempts += 1;
            // finish in one step when the remainder is within a hair of the hint
            let mut h = self.hint.min(self.opts.dt_max);
            let truncated = h >= left * (1.0 - 1e-12);
            if truncated {
                h = left;
            }
            self.rk4(y, dir * h, &mut full);
            self.rk4(y, 0.5 * dir * h, &mut mid);
            self.rk4(&mid, 0.5 * dir * h, &mut half);
            let mut err: f64 = 0.0;
            for i in 0..y.len() {
                let scale = half[i].abs().max(1.0);
                err = err.max((half[i] - full[i]).abs() / (15.0 * scale));
            }
            // differences at roundoff level carry no information about the step
            let accept = err <= self.opts.tol * h || err <= 8.0 * f64::EPSILON;
            let factor = if err == 0.0 { 4.0 } else { (0.9 * (self.opts.tol * h / err).powf(0.25)).clamp(0.2, 4.0) };
            if accept {
                for i in 0..y.len() {
                    y[i] = half[i] + (half[i] - full[i]) / 15.0;
                }
                left -= h;
                self.elapsed += dir * h;
                if !truncated {
                    self.hint = (h * factor).min(self.opts.dt_max);
                }
            } else {
                self.hint = h * factor;
            }
        }
        self.full = full;
        self.half = half;
        Ok(())
    }
}

fn check_span(a: &VelocityField, x: &[f64], span: f64, opts: &FlowOptions) -> Result<()> {
    opts.validate()?;
    if x.len() != a.dim() {
        return Err(Error::ShapeMismatch(format!("point has {} coordinates, field dimension is {}", x.len(), a.dim())));
    }
    if !span.is_finite() || span.abs() > MAX_SPAN {
        return Err(Error::InvalidInput(format!("flow time span {span} outside [-{MAX_SPAN}, {MAX_SPAN}]")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInput("non-finite starting point".into()));
    }
    Ok(())
}

/// Point `x(t; t0, x0)` on the characteristic of `x' = a(x)` through `x0` at time `t0`.
pub fn flow_map(a: &VelocityField, t0: f64, x0: &[f64], t: f64, opts: &FlowOptions) -> Result<Vec<f64>> {
    let span = t - t0;
    check_span(a, x0, span, opts)?;
    let mut y = x0.to_vec();
    if span == 0.0 {
        return Ok(y);
    }
    let rhs = |x: &[f64], out: &mut [f64]| a.eval_into(x, out);
    Stepper::new(&rhs, y.len(), *opts).advance(&mut y, span)?;
    Ok(y)
}

/// Label `y(t, x) = x(0; t, x)`: the starting point of the characteristic reaching `x` at time `t`.
pub fn backward_label(a: &VelocityField, t: f64, x: &[f64], opts: &FlowOptions) -> Result<Vec<f64>> {
    flow_map(a, t, x, 0.0, opts)
}

/// Right-hand side of the flow augmented with the variational equation
/// `X' = Da(x) X`; state layout `[x, X row-major]`.
pub(crate) fn variational_rhs(a: &VelocityField) -> impl Fn(&[f64], &mut [f64]) + '_ {
    let d = a.dim();
    move |s: &[f64], out: &mut [f64]| {
        let mut jac = [0.0; 9];
        a.eval_into(&s[..d], &mut out[..d]);
        a.jacobian_into(&s[..d], &mut jac[..d * d]);
        let xm = &s[d..];
        for i in 0..d {
            for j in 0..d {
                out[d + i * d + j] = (0..d).map(|k| jac[i * d + k] * xm[k * d + j]).sum();
            }
        }
    }
}

/// Identity-initialized variational state for the point `x`.
pub(crate) fn variational_start(x: &[f64]) -> Vec<f64> {
    let d = x.len();
    let mut s = vec![0.0; d + d * d];
    s[..d].copy_from_slice(x);
    for i in 0..d {
        s[d + i * d + i] = 1.0;
    }
    s
}

/// Flow point and derivative matrix `D_y x(t; 0, y)` (row-major).
pub fn flow_with_derivative(a: &VelocityField, y: &[f64], t: f64, opts: &FlowOptions) -> Result<(Vec<f64>, Vec<f64>)> {
    check_span(a, y, t, opts)?;
    let d = a.dim();
    if a.has_jacobian() {
        let mut s = variational_start(y);
        if t != 0.0 {
            let rhs = variational_rhs(a);
            Stepper::new(&rhs, s.len(), *opts).advance(&mut s, t)?;
        }
        return Ok((s[..d].to_vec(), s[d..].to_vec()));
    }
    if !opts.fd_fallback {
        return Err(Error::Unsupported(format!(
            "field '{}' has no Jacobian and the finite-difference fallback is disabled",
            a.name()
        )));
    }
    let x = flow_map(a, 0.0, y, t, opts)?;
    let mut m = vec![0.0; d * d];
    let mut probe = y.to_vec();
    for j in 0..d {
        probe[j] = y[j] + FD_STEP;
        let plus = flow_map(a, 0.0, &probe, t, opts)?;
        probe[j] = y[j] - FD_STEP;
        let minus = flow_map(a, 0.0, &probe, t, opts)?;
        probe[j] = y[j];
        for i in 0..d {
            m[i * d + j] = (plus[i] - minus[i]) / (2.0 * FD_STEP);
        }
    }
    Ok((x, m))
}

/// Determinant of `D_y x(t; 0, y)`; equals 1 for measure-preserving flows.
pub fn jacobian_det(a: &VelocityField, t: f64, y: &[f64], opts: &FlowOptions) -> Result<f64> {
    let d = a.dim();
    let (_, m) = flow_with_derivative(a, y, t, opts)?;
    Ok(DMatrix::from_row_slice(d, d, &m).determinant())
}

/// Worst-case ratio `|x(s;0,y2) - x(s;0,y1)| / (|y2 - y1| e^{m|s|})` over sampled pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzReport {
    pub s: f64,
    pub pairs: usize,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// `max_ratio <= 1 + 1e-6`.
    pub holds: bool,
}

/// `count` random pairs in the box `[-half_width, half_width]^dim`.
pub fn random_pairs(dim: usize, count: usize, half_width: f64, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = seeded(seed);
    let draw = |rng: &mut crate::rng::LabRng| -> Vec<f64> {
        (0..dim).map(|_| uniform(rng, -half_width, half_width)).collect()
    };
    (0..count).map(|_| (draw(&mut rng), draw(&mut rng))).collect()
}

/// Checks the Gronwall separation bound for the flow at time `s` on the given pairs.
pub fn flow_lipschitz_check(
    a: &VelocityField,
    s: f64,
    pairs: &[(Vec<f64>, Vec<f64>)],
    opts: &FlowOptions,
) -> Result<LipschitzReport> {
    let growth = (a.lipschitz_m() * s.abs()).exp();
    let mut max_ratio: f64 = 0.0;
    let mut min_ratio = f64::INFINITY;
    let mut used = 0;
    for (y1, y2) in pairs {
        let gap = crate::hilbert_grid::norm(&y1.iter().zip(y2).map(|(p, q)| q - p).collect::<Vec<_>>());
        if gap == 0.0 {
            continue;
        }
        let x1 = flow_map(a, 0.0, y1, s, opts)?;
        let x2 = flow_map(a, 0.0, y2, s, opts)?;
        let sep = crate::hilbert_grid::norm(&x1.iter().zip(&x2).map(|(p, q)| q - p).collect::<Vec<_>>());
        let ratio = sep / (gap * growth);
        max_ratio = max_ratio.max(ratio);
        min_ratio = min_ratio.min(ratio);
        used += 1;
    }
    Ok(LipschitzReport { s, pairs: used, max_ratio, min_ratio, holds: max_ratio <= 1.0 + 1e-6 })
}
