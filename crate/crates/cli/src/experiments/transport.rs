use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use skewlab::hilbert_grid::{HilbertVector, TorusField, VelocityField};
use skewlab::rng::{seeded, uniform};
use skewlab::transport::{
    backward_label, decay_check, flow_map, jacobian_det, resolvent_apply, semigroup_apply, CompactBump,
    FlowOptions, InitialData, ResolventParams,
};
use skewlab::Result;

use crate::params::{ParamSpec, Params};
use crate::report::{Comparison, Recorder};

pub(super) fn rotation_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("n", 128, 16, 256),
        ParamSpec::float("t", 1.0, 0.05, 10.0),
        ParamSpec::float("tol", 1e-12, 1e-14, 1e-6),
        ParamSpec::int("points", 20, 1, 10_000),
        ParamSpec::seed(),
    ]
}

/// Gaussian of width 0.25 placed 0.8 from the center of the torus box, so
/// that the rotation about the center never carries it near the box edge.
fn torus_bump(x: &[f64]) -> f64 {
    let (dx, dy) = (x[0] - PI - 0.8, x[1] - PI);
    (-(dx * dx + dy * dy) / (2.0 * 0.25 * 0.25)).exp()
}

fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Rigid rotation: closed-form characteristics, orthogonal transport group.
pub(super) fn rotation(p: &Params, rec: &mut Recorder) -> Result<()> {
    let (n, t) = (p.usize("n"), p.f64("t"));
    let opts = FlowOptions::default().with_tol(p.f64("tol"));
    opts.validate()?;
    let a = VelocityField::rotation([0.0, 0.0]);
    let mut rng = seeded(p.u64("seed"));
    let points: Vec<[f64; 2]> =
        (0..p.usize("points")).map(|_| [uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0)]).collect();
    let (mut flow_err, mut det_err, mut label_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for y in &points {
        let x = flow_map(&a, 0.0, y, t, &opts)?;
        let exact = [t.cos() * y[0] - t.sin() * y[1], t.sin() * y[0] + t.cos() * y[1]];
        flow_err = flow_err.max(dist(&x, &exact));
        det_err = det_err.max((jacobian_det(&a, t, y, &opts)? - 1.0).abs());
        label_err = label_err.max(dist(&backward_label(&a, t, &x, &opts)?, y));
    }
    rec.at_most("flow_map_error", flow_err, 1e-10);
    rec.at_most("jacobian_det", det_err, 1e-6);
    rec.metric("label_roundtrip", label_err);

    let centered = VelocityField::rotation([PI, PI]);
    let u0 = TorusField::scalar_from_fn(2, n, torus_bump)?;
    let direct = semigroup_apply(&centered, t, InitialData::Closure(&torus_bump), n, &opts)?;
    rec.at_most("energy_drift", direct.norm() / u0.norm() - 1.0, 1e-5);
    let first = semigroup_apply(&centered, 0.4 * t, InitialData::Closure(&torus_bump), n, &opts)?;
    let composed = semigroup_apply(&centered, 0.6 * t, InitialData::Sampled(&first), n, &opts)?;
    rec.at_most("semigroup_law", direct.max_abs_diff(&composed)?, 1e-6);
    let back = semigroup_apply(&centered.reversed(), t, InitialData::Sampled(&direct), n, &opts)?;
    rec.at_most("forward_backward", back.max_abs_diff(&u0)?, 1e-6);
    rec.artifact("field.csv", direct.to_csv());
    Ok(())
}

pub(super) fn resolvent_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("h", 0.05, 1e-3, 0.5),
        ParamSpec::int("patch", 128, 4, 512),
        ParamSpec::float("quad_step", 2e-3, 1e-4, 0.05),
        ParamSpec::float("tail_tol", 1e-12, 1e-15, 1e-4),
        ParamSpec::float("cd_step", 1e-4, 1e-6, 1e-2),
        ParamSpec::seed(),
    ]
}

/// `phi' = (psi - phi) / h` by RK4 from the left edge of the support; samples `(y, phi)`.
fn ode_reference(psi: &dyn Fn(f64) -> f64, h: f64, from: f64, to: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((to - from) / step).round() as usize;
    let f = |y: f64, v: f64| (psi(y) - v) / h;
    let mut out = Vec::with_capacity(n + 1);
    let mut v = 0.0;
    for i in 0..=n {
        let y = from + i as f64 * step;
        out.push((y, v));
        let k1 = f(y, v);
        let k2 = f(y + 0.5 * step, v + 0.5 * step * k1);
        let k3 = f(y + 0.5 * step, v + 0.5 * step * k2);
        let k4 = f(y + step, v + step * k3);
        v += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    out
}

/// Resolvent integral along backward characteristics: a 1-D drift against an
/// ODE reference, and the stationary equation `phi + h a . grad phi = psi`
/// for the rotation on a square patch.
pub(super) fn resolvent(p: &Params, rec: &mut Recorder) -> Result<()> {
    let h = p.f64("h");
    let opts = FlowOptions::default().with_tol(1e-12);

    let drift = VelocityField::constant(&[1.0])?;
    let bump = CompactBump::new(&[0.0], 0.5)?;
    let psi = |x: &[f64]| bump.value(x);
    let params = ResolventParams::new(h, bump.support_radius(), 1e-3, p.f64("tail_tol"))?;
    let reference = ode_reference(&|y| bump.value(&[y]), h, -0.5, 2.0, 1e-5);
    let peak = reference.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for &(y, v) in reference.iter().step_by(2500) {
        worst = worst.max((resolvent_apply(&drift, &psi, &params, &[y], &opts)? - v).abs() / peak);
    }
    rec.at_most("one_d_relative_error", worst, 1e-6);

    let a = VelocityField::rotation([0.0, 0.0]);
    let bump = CompactBump::new(&[0.5, 0.0], 0.4)?;
    let psi = |x: &[f64]| bump.value(x);
    let psi_max = bump.value(&[0.5, 0.0]);
    let params = ResolventParams::new(h, bump.support_radius(), p.f64("quad_step"), p.f64("tail_tol"))?;
    let (m, d) = (p.usize("patch"), p.f64("cd_step"));
    let phi = |y: [f64; 2]| resolvent_apply(&a, &psi, &params, &y, &opts);
    let rows: Vec<(f64, f64, f64, f64)> = (0..m * m)
        .into_par_iter()
        .map(|k| {
            let y = [-1.0 + 2.0 * ((k / m) as f64 + 0.5) / m as f64, -1.0 + 2.0 * ((k % m) as f64 + 0.5) / m as f64];
            let center = phi(y)?;
            let gx = (phi([y[0] + d, y[1]])? - phi([y[0] - d, y[1]])?) / (2.0 * d);
            let gy = (phi([y[0], y[1] + d])? - phi([y[0], y[1] - d])?) / (2.0 * d);
            let v = a.eval(&y);
            Ok((y[0], y[1], center, center + h * (v[0] * gx + v[1] * gy) - psi(&y)))
        })
        .collect::<Result<_>>()?;
    let residual = rows.iter().map(|r| r.3.abs()).fold(0.0, f64::max);
    rec.at_most("stationary_residual", residual / psi_max, 1e-3);
    rec.metric("phi_max", rows.iter().map(|r| r.2.abs()).fold(0.0, f64::max));
    let mut csv = String::from("x,y,phi,residual\n");
    for (x, y, v, r) in &rows {
        let _ = writeln!(csv, "{x:e},{y:e},{v:e},{r:e}");
    }
    rec.artifact("patch.csv", csv);
    Ok(())
}

pub(super) fn decay_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::float("rate", 2.0, 0.1, 10.0),
        ParamSpec::float("h", 0.25, 1e-3, 10.0),
        ParamSpec::float("width", 0.5, 0.05, 5.0),
        ParamSpec::float("quad_step", 5e-3, 1e-4, 0.05),
        ParamSpec::float("tail_tol", 1e-12, 1e-15, 1e-4),
        ParamSpec::seed(),
    ]
}

/// Power-law decay of the resolvent of the strain `(r x1, -r x2)`, whose
/// linear growth constant is declared exactly.
pub(super) fn decay(p: &Params, rec: &mut Recorder) -> Result<()> {
    let a = VelocityField::strain(p.f64("rate"));
    let bump = CompactBump::new(&[0.0, 0.0], p.f64("width"))?;
    let psi = |x: &[f64]| bump.value(x);
    let params = ResolventParams::new(p.f64("h"), bump.support_radius(), p.f64("quad_step"), p.f64("tail_tol"))?;
    let radii = [10.0, 20.0, 40.0, 80.0];
    let fit = decay_check(&a, &psi, &params, &radii, &FlowOptions::default().with_tol(1e-10))?;
    let allowed = |bound: f64| bound + fit.margin * bound.abs();
    rec.check("value_exponent", fit.value_slope, allowed(fit.value_bound), Comparison::AtMost);
    rec.check("gradient_exponent", fit.gradient_slope, allowed(fit.gradient_bound), Comparison::AtMost);
    rec.metric("value_bound", fit.value_bound);
    rec.metric("gradient_bound", fit.gradient_bound);
    let mut csv = String::from("radius,max_value,max_gradient\n");
    for ((r, v), g) in fit.radii.iter().zip(&fit.max_value).zip(&fit.max_gradient) {
        let _ = writeln!(csv, "{r:e},{v:e},{g:e}");
    }
    rec.artifact("decay.csv", csv);
    Ok(())
}
