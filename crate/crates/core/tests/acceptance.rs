//! Acceptance suite: one line per criterion, non-zero exit status on any failure.
//!
//! Runs without the libtest harness so the summary is printed on success too.

use std::f64::consts::{E, PI};
use std::time::Instant;

use nalgebra::DMatrix;
use skewlab::euler::{
    advect_b, evolve, generator_apply, leray_project, max_divergence, pressure_gradient_t, random_solenoidal,
    resolvent_solve, stream_vortex, EulerOperatorBundle, SpectralProjector,
};
use skewlab::hilbert_grid::{
    spectral_divergence, spectral_gradient, GridFunction1D, HilbertVector, TorusField, VelocityField,
};
use skewlab::operator_lab::{
    cayley, energy_profile, growth_solution, interval_deficiency, interval_test_family, inverse_cayley,
    orthogonal_group, remark3_mixture, shift_group, skew_symmetry_defect, weak_residual, OperatorMatrix,
    ShiftKind, Trajectory,
};
use skewlab::rng::{normal, seeded, uniform};
use skewlab::transport::{
    advection_generator, backward_label, decay_check, flow_map, jacobian_det, resolvent_apply, semigroup_apply,
    CompactBump, FlowOptions, InitialData, ResolventParams,
};
use skewlab::Result;

#[derive(Clone, Copy)]
enum Cmp {
    Below,
    Above,
}

struct Measure {
    label: &'static str,
    value: f64,
    bound: f64,
    cmp: Cmp,
}

impl Measure {
    fn passed(&self) -> bool {
        match self.cmp {
            Cmp::Below => self.value < self.bound,
            Cmp::Above => self.value > self.bound,
        }
    }
}

fn below(label: &'static str, value: f64, bound: f64) -> Measure {
    Measure { label, value, bound, cmp: Cmp::Below }
}

fn above(label: &'static str, value: f64, bound: f64) -> Measure {
    Measure { label, value, bound, cmp: Cmp::Above }
}

fn flag(label: &'static str, holds: bool) -> Measure {
    above(label, if holds { 1.0 } else { 0.0 }, 0.5)
}

fn dist(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

fn rotate(y: &[f64], t: f64) -> [f64; 2] {
    [t.cos() * y[0] - t.sin() * y[1], t.sin() * y[0] + t.cos() * y[1]]
}

// 1

fn shift_mixture() -> Result<Vec<Measure>> {
    let n = 256;
    let f = |x: f64| (PI * x).sin() + 0.3 * (3.0 * PI * x).sin();
    let u0 = GridFunction1D::from_fn(n, f)?;
    let dx = u0.dx();
    let times: Vec<f64> = (0..=2 * n).map(|i| i as f64 * dx).collect();
    let traj = Trajectory::from_fn(&times, |t| Ok(remark3_mixture(t, &u0)))?;
    // f is its own antiperiodic extension, so the mixture is (f((x - t) mod 1) + f(x - t)) / 2
    let mut closed: f64 = 0.0;
    for (k, state) in traj.states().iter().enumerate().step_by(7) {
        let t = times[k];
        for i in 0..n {
            let x = u0.center(i);
            let expected = 0.5 * (f((x - t).rem_euclid(1.0)) + f(x - t));
            closed = closed.max((state.values()[i] - expected).abs());
        }
    }
    Ok(vec![
        below("max|u(1)|", remark3_mixture(1.0, &u0).max_abs(), 1e-12),
        below("max|u(2)-u0|", remark3_mixture(2.0, &u0).max_abs_diff(&u0)?, 1e-12),
        flag("energy inequality", energy_profile(&traj).inequality_holds),
        below("closed form", closed, 1e-12),
    ])
}

// 2

fn interval_deficiency_indices() -> Result<Vec<Measure>> {
    let report = interval_deficiency(1000, 50, 2024)?;
    let ratio_spread = |basis: &GridFunction1D, g: fn(f64) -> f64| {
        let r: Vec<f64> = (0..basis.n_cells()).map(|i| basis.values()[i] / g(basis.center(i))).collect();
        let (lo, hi) = r.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        (hi - lo) / hi.abs()
    };
    Ok(vec![
        below("|d+ - 1|", (report.d_plus as f64 - 1.0).abs(), 0.5),
        below("|d- - 1|", (report.d_minus as f64 - 1.0).abs(), 0.5),
        above("probes", report.residuals.len() as f64, 49.5),
        below("max pairing", report.max_residual(), 1e-6),
        below("ker(E-A*) ~ e^-x", ratio_spread(&report.minus_basis[0], |x| (-x).exp()), 1e-12),
        below("ker(E+A*) ~ e^x", ratio_spread(&report.plus_basis[0], f64::exp), 1e-12),
    ])
}

// 3

fn nonuniqueness() -> Result<Vec<Measure>> {
    let n = 1000;
    let dt = 1e-3;
    let times: Vec<f64> = (0..=2000).map(|i| i as f64 * dt).collect();
    let u0 = GridFunction1D::from_fn(n, |x| (-x).exp())?;
    let tests = interval_test_family(n)?;
    let shift = Trajectory::from_fn(&times, |t| Ok(shift_group(ShiftKind::Periodic, t, &u0)))?;
    let growth = Trajectory::from_fn(&times, |t| growth_solution(t, n))?;
    let backward = Trajectory::from_fn(&times, |t| Ok(shift_group(ShiftKind::Periodic, -t, &u0)))?;
    let gap = shift.states()[1000].axpy(-1.0, &growth.states()[1000])?.norm();
    // T_1 e^{-x} = e^{-x} and e^{1-x} - e^{-x} = (e - 1) e^{-x}
    let closed = (E - 1.0) * u0.norm();
    Ok(vec![
        below("shift residual", weak_residual(&shift, &u0, &tests)?, 1e-4),
        below("growth residual", weak_residual(&growth, &u0, &tests)?, 1e-4),
        above("|u1-u2|(1)/|u0|", gap / u0.norm(), 0.5),
        below("distance vs (e-1)|u0|", (gap - closed).abs() / closed, 1e-12),
        above("wrong-direction residual", weak_residual(&backward, &u0, &tests)?, 1e-2),
    ])
}

// 4

fn cayley_transform() -> Result<Vec<Measure>> {
    let (mut orth, mut round, mut group): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 1..=20usize {
        let d = 5 * i;
        let a = OperatorMatrix::random_skew(d, 100 + i as u64)?;
        let e = DMatrix::<f64>::identity(d, d);
        let q = cayley(&a)?;
        orth = orth.max((q.entries().transpose() * q.entries() - &e).norm());
        round = round.max((inverse_cayley(&q)?.entries() - a.entries()).norm());
        let g = orthogonal_group(&a, 0.7)?;
        group = group.max((g.entries().transpose() * g.entries() - &e).norm());
    }
    // closed forms for the 2 x 2 generator [[0, th], [-th, 0]]
    let th = 0.8_f64;
    let a = OperatorMatrix::from_row_slice(2, &[0.0, th, -th, 0.0])?;
    let s = 1.0 + th * th;
    let q_exact = DMatrix::from_row_slice(2, 2, &[(1.0 - th * th) / s, 2.0 * th / s, -2.0 * th / s, (1.0 - th * th) / s]);
    let t = 1.3;
    let g_exact = DMatrix::from_row_slice(2, 2, &[(th * t).cos(), (th * t).sin(), -(th * t).sin(), (th * t).cos()]);
    let closed = (cayley(&a)?.entries() - q_exact).norm().max((orthogonal_group(&a, t)?.entries() - g_exact).norm());
    Ok(vec![
        below("|Q'Q-E|", orth, 1e-10),
        below("round trip", round, 1e-10),
        below("|exp(tA)'exp(tA)-E|", group, 1e-10),
        below("2x2 closed form", closed, 1e-14),
    ])
}

// 5

fn torus_bump(x: &[f64]) -> f64 {
    let (dx, dy) = (x[0] - PI - 0.8, x[1] - PI);
    (-(dx * dx + dy * dy) / (2.0 * 0.25 * 0.25)).exp()
}

fn transport_rotation() -> Result<Vec<Measure>> {
    let opts = FlowOptions::default().with_tol(1e-12);
    let a = VelocityField::rotation([0.0, 0.0]);
    let mut rng = seeded(5);
    let (mut flow_err, mut det_err): (f64, f64) = (0.0, 0.0);
    for _ in 0..50 {
        let y = [uniform(&mut rng, -2.0, 2.0), uniform(&mut rng, -2.0, 2.0)];
        flow_err = flow_err.max(dist(&flow_map(&a, 0.0, &y, 1.0, &opts)?, &rotate(&y, 1.0)));
        det_err = det_err.max((jacobian_det(&a, 1.0, &y, &opts)? - 1.0).abs());
        let x = rotate(&y, 1.0);
        flow_err = flow_err.max(dist(&backward_label(&a, 1.0, &x, &opts)?, &y));
    }

    let n = 128;
    let c = [PI, PI];
    let centered = VelocityField::rotation(c);
    let u0 = TorusField::scalar_from_fn(2, n, torus_bump)?;
    let direct = semigroup_apply(&centered, 1.0, InitialData::Closure(&torus_bump), n, &opts)?;
    // u(1, x) = u0(R_{-1}(x - c) + c)
    let exact = TorusField::scalar_from_fn(2, n, |x| {
        let y = rotate(&[x[0] - c[0], x[1] - c[1]], -1.0);
        torus_bump(&[y[0] + c[0], y[1] + c[1]])
    })?;
    let first = semigroup_apply(&centered, 0.4, InitialData::Closure(&torus_bump), n, &opts)?;
    let composed = semigroup_apply(&centered, 0.6, InitialData::Sampled(&first), n, &opts)?;
    let back = semigroup_apply(&centered.reversed(), 1.0, InitialData::Sampled(&direct), n, &opts)?;
    Ok(vec![
        below("flow map", flow_err, 1e-10),
        below("energy drift", (direct.norm() / u0.norm() - 1.0).abs(), 1e-5),
        below("vs closed form", direct.max_abs_diff(&exact)?, 1e-6),
        below("T(0.6)T(0.4)-T(1)", composed.max_abs_diff(&direct)?, 1e-6),
        below("T(-1)T(1)-E", back.max_abs_diff(&u0)?, 1e-6),
        below("|det-1|", det_err, 1e-6),
    ])
}

// 6

/// `phi' = (psi - phi) / h` by RK4 on `[from, to]` with `phi(from) = 0`.
fn ode_reference(psi: &dyn Fn(f64) -> f64, h: f64, from: f64, to: f64, step: f64) -> Vec<(f64, f64)> {
    let n = ((to - from) / step).round() as usize;
    let f = |y: f64, v: f64| (psi(y) - v) / h;
    let mut v = 0.0;
    let mut out = Vec::with_capacity(n + 1);
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

fn resolvent() -> Result<Vec<Measure>> {
    let opts = FlowOptions::default().with_tol(1e-12);

    let drift = VelocityField::constant(&[1.0])?;
    let bump = CompactBump::new(&[0.0], 0.5)?;
    let psi = |x: &[f64]| bump.value(x);
    let params = ResolventParams::new(0.1, 0.5, 1e-3, 1e-13)?;
    let reference = ode_reference(&|y| bump.value(&[y]), 0.1, -0.5, 2.0, 1e-5);
    let peak = reference.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    let mut one_d: f64 = 0.0;
    for &(y, v) in reference.iter().step_by(1250) {
        one_d = one_d.max((resolvent_apply(&drift, &psi, &params, &[y], &opts)? - v).abs() / peak);
    }

    let a = VelocityField::rotation([0.0, 0.0]);
    let h = 0.05;
    let bump = CompactBump::new(&[0.5, 0.0], 0.4)?;
    let psi = |x: &[f64]| bump.value(x);
    let psi_max = 1.0;
    let params = ResolventParams::new(h, 0.9, 2e-3, 1e-12)?;
    let (m, d) = (128usize, 1e-4);
    let phi = |y: [f64; 2]| resolvent_apply(&a, &psi, &params, &y, &opts);
    let mut residual: f64 = 0.0;
    for k in 0..m * m {
        let y = [-1.0 + 2.0 * ((k / m) as f64 + 0.5) / m as f64, -1.0 + 2.0 * ((k % m) as f64 + 0.5) / m as f64];
        let gx = (phi([y[0] + d, y[1]])? - phi([y[0] - d, y[1]])?) / (2.0 * d);
        let gy = (phi([y[0], y[1] + d])? - phi([y[0], y[1] - d])?) / (2.0 * d);
        // a = (-y2, y1)
        residual = residual.max((phi(y)? + h * (-y[1] * gx + y[0] * gy) - psi(&y)).abs());
    }

    // strain r (x1, -x2): c = r, so alpha / h = 1 / (r h)
    let (rate, h) = (2.0, 0.25);
    let strain = VelocityField::strain(rate);
    let bump = CompactBump::new(&[0.0, 0.0], 0.5)?;
    let psi = |x: &[f64]| bump.value(x);
    let params = ResolventParams::new(h, 0.5, 5e-3, 1e-12)?;
    let fit = decay_check(&strain, &psi, &params, &[10.0, 20.0, 40.0, 80.0], &FlowOptions::default().with_tol(1e-10))?;
    let bound = -1.0 / (rate * h);
    Ok(vec![
        below("1-D relative error", one_d, 1e-6),
        below("128^2 residual/|psi|", residual / psi_max, 1e-3),
        below("exponent - 0.85 bound", fit.value_slope - (bound + 0.15 * bound.abs()), 0.0),
    ])
}

// 7

fn random_vector(n: usize, components: usize, seed: u64) -> Result<TorusField> {
    let mut rng = seeded(seed);
    TorusField::new(2, n, components, (0..components * n * n).map(|_| normal(&mut rng)).collect())
}

fn euler_projector() -> Result<Vec<Measure>> {
    let n = 64;
    let proj = SpectralProjector::new(2, n)?;
    let u = random_vector(n, 2, 1)?;
    let v = random_vector(n, 2, 2)?;
    let pu = leray_project(&proj, &u)?;
    let pv = leray_project(&proj, &v)?;
    let grad = spectral_gradient(&random_vector(n, 1, 3)?)?;
    let bundle = EulerOperatorBundle::new(VelocityField::stream_random(4), n)?;
    let tu = pressure_gradient_t(&bundle, &u)?;

    // single mode A cos(xi . x): P keeps A - xi (xi . A) / |xi|^2
    let (xi, amp) = ([3.0, -2.0], [0.7, 1.1]);
    let single = TorusField::vector_from_fn(2, n, |x, out| {
        let c = (xi[0] * x[0] + xi[1] * x[1]).cos();
        out.copy_from_slice(&[amp[0] * c, amp[1] * c]);
    })?;
    let dot = (xi[0] * amp[0] + xi[1] * amp[1]) / 13.0;
    let single_exact = TorusField::vector_from_fn(2, n, |x, out| {
        let c = (xi[0] * x[0] + xi[1] * x[1]).cos();
        out.copy_from_slice(&[(amp[0] - xi[0] * dot) * c, (amp[1] - xi[1] * dot) * c]);
    })?;

    // shear (sin x2, 0) with u = (0, cos x1): Tu = (-cos x1 cos x2, sin x1 sin x2) / 2
    let shear = EulerOperatorBundle::new(VelocityField::shear_sin(), n)?;
    let probe = TorusField::vector_from_fn(2, n, |x, out| out.copy_from_slice(&[0.0, x[0].cos()]))?;
    let t_exact = TorusField::vector_from_fn(2, n, |x, out| {
        out.copy_from_slice(&[-0.5 * x[0].cos() * x[1].cos(), 0.5 * x[0].sin() * x[1].sin()])
    })?;
    Ok(vec![
        below("P^2-P", leray_project(&proj, &pu)?.max_abs_diff(&pu)? / u.max_abs(), 1e-10),
        below("symmetry", (pu.inner(&v)? - u.inner(&pv)?).abs() / (u.norm() * v.norm()), 1e-10),
        below("div P", spectral_divergence(&pu)?.max_abs() / u.max_abs(), 1e-10),
        below("P grad", leray_project(&proj, &grad)?.max_abs() / grad.max_abs(), 1e-10),
        below("P T", leray_project(&proj, &tu)?.max_abs() / tu.max_abs(), 1e-10),
        below("single mode", leray_project(&proj, &single)?.max_abs_diff(&single_exact)?, 1e-12),
        below("T four-mode", pressure_gradient_t(&shear, &probe)?.max_abs_diff(&t_exact)?, 1e-12),
    ])
}

// 8

fn euler_evolution() -> Result<Vec<Measure>> {
    let n = 64;
    let u0 = stream_vortex(n)?;
    let translate = EulerOperatorBundle::new(VelocityField::constant(&[1.0, 0.0])?, n)?;
    let moved = evolve(&translate, &u0, 1.0, 1e-3)?;
    let exact = TorusField::vector_from_fn(2, n, |x, out| {
        let y = [x[0] - 1.0, x[1]];
        out[0] = -2.0 * y[0].sin() * (2.0 * y[1]).sin() - 0.5 * (y[0] + y[1]).sin();
        out[1] = -y[0].cos() * (2.0 * y[1]).cos() + 0.5 * (y[0] + y[1]).sin();
    })?;

    let shear = EulerOperatorBundle::new(VelocityField::shear_sin(), n)?;
    let run = evolve(&shear, &u0, 1.0, 1e-3)?;
    let mut drift: f64 = 0.0;
    let mut div: f64 = 0.0;
    for state in run.trajectory.states() {
        drift = drift.max((state.norm() / u0.norm() - 1.0).abs());
        div = div.max(spectral_divergence(state)?.max_abs());
    }
    drift = drift.max(run.energy_drift());
    div = div.max(run.max_divergence());

    let coarse_bundle = EulerOperatorBundle::new(VelocityField::shear_sin(), 32)?;
    let start = random_solenoidal(2, 32, 6, 7)?;
    let coarse = evolve(&coarse_bundle, &start, 1.0, 0.01)?.energy_drift();
    let fine = evolve(&coarse_bundle, &start, 1.0, 0.005)?.energy_drift();
    Ok(vec![
        below("translation", moved.final_state().max_abs_diff(&exact)?, 1e-8),
        below("energy drift", drift, 1e-8),
        below("div drift", div, 1e-8),
        above("drift ratio", coarse / fine, 12.0),
    ])
}

// 9

fn euler_resolvent() -> Result<Vec<Measure>> {
    let (n, h) = (32, 0.05);
    let bundle = EulerOperatorBundle::new(VelocityField::shear_sin(), n)?;
    let v = random_solenoidal(2, n, 4, 3)?;
    let sol = resolvent_solve(&bundle, h, &v, 1e-9)?;
    let u = &sol.field;
    let bu_tu = advect_b(&bundle, u)?.add(&pressure_gradient_t(&bundle, u)?)?;
    let residual = u.axpy(-h, &bu_tu)?.sub(&v)?.norm();
    Ok(vec![
        below("|u-h(B+T)u-v|/|v|", residual / v.norm(), 1e-8),
        below("max|div u|", max_divergence(u)?, 1e-7),
        below("|u|/|v| - 1 - 1e-7", u.norm() / v.norm() - (1.0 + 1e-7), 0.0),
    ])
}

// 10

fn skew_suites() -> Result<Vec<Measure>> {
    let mut interval: f64 = 0.0;
    let n = 64;
    let dx = 1.0 / n as f64;
    for kind in [ShiftKind::Periodic, ShiftKind::Antiperiodic] {
        let m = OperatorMatrix::assemble(n, |u| {
            let g = GridFunction1D::new(u.to_vec())?;
            let fwd = shift_group(kind, dx, &g);
            let bwd = shift_group(kind, -dx, &g);
            Ok(fwd.axpy(-1.0, &bwd)?.scaled(0.5 / dx).into_values())
        })?;
        let defect = skew_symmetry_defect(&m);
        interval = interval.max(defect.relative).max(defect.max_quadratic / n as f64);
    }

    let mut spectral: f64 = 0.0;
    let grid = 16;
    for a in [VelocityField::shear_sin(), VelocityField::sine_rotation(), VelocityField::stream_random(1)] {
        let samples = a.sample(grid)?;
        let m = OperatorMatrix::assemble(grid * grid, |u| {
            let f = TorusField::new(2, grid, 1, u.to_vec())?;
            Ok(advection_generator(&samples, &f)?.samples().to_vec())
        })?;
        spectral = spectral.max(skew_symmetry_defect(&m).relative);
    }

    let mut euler: f64 = 0.0;
    for (i, field) in [VelocityField::shear_sin(), VelocityField::stream_random(2)].into_iter().enumerate() {
        let bundle = EulerOperatorBundle::new(field, 32)?;
        for seed in 0..3u64 {
            let u1 = random_solenoidal(2, 32, 4, 10 * i as u64 + seed)?;
            let u2 = random_solenoidal(2, 32, 4, 50 + 10 * i as u64 + seed)?;
            let (a1, a2) = (generator_apply(&bundle, &u1)?, generator_apply(&bundle, &u2)?);
            let scale = a1.norm() * u2.norm() + u1.norm() * a2.norm();
            euler = euler.max((a1.inner(&u2)? + u1.inner(&a2)?).abs() / scale);
        }
    }
    Ok(vec![
        below("interval shift generators", interval, 1e-8),
        below("spectral a.grad", spectral, 1e-8),
        below("Euler generator", euler, 1e-8),
    ])
}

type Suite = fn() -> Result<Vec<Measure>>;

fn main() {
    let criteria: [(&str, Suite); 10] = [
        ("mixture of shift groups", shift_mixture),
        ("interval deficiency indices", interval_deficiency_indices),
        ("non-uniqueness from e^-x", nonuniqueness),
        ("Cayley transform", cayley_transform),
        ("transport by rotation", transport_rotation),
        ("transport resolvent", resolvent),
        ("Euler projector", euler_projector),
        ("Euler evolution", euler_evolution),
        ("Euler resolvent", euler_resolvent),
        ("skew-symmetry suites", skew_suites),
    ];
    let mut failures = 0;
    for (i, (title, suite)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let line = match suite() {
            Ok(measures) => {
                let ok = measures.iter().all(Measure::passed);
                if !ok {
                    failures += 1;
                }
                let detail: Vec<String> = measures
                    .iter()
                    .map(|m| {
                        let op = match m.cmp {
                            Cmp::Below => "<",
                            Cmp::Above => ">",
                        };
                        let mark = if m.passed() { "" } else { " !" };
                        format!("{} = {:.3e} {op} {:.0e}{mark}", m.label, m.value, m.bound)
                    })
                    .collect();
                format!("{} criterion {:>2} {title}: {}", if ok { "PASS" } else { "FAIL" }, i + 1, detail.join("; "))
            }
            Err(e) => {
                failures += 1;
                format!("FAIL criterion {:>2} {title}: error: {e}", i + 1)
            }
        };
        println!("{line} [{:.1} s]", start.elapsed().as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
