use std::f64::consts::PI;
use std::fmt::Write as _;

use skewlab::hilbert_grid::{GridFunction1D, HilbertVector};
use skewlab::operator_lab::{
    cayley, energy_profile, growth_solution, interval_deficiency, interval_test_family, inverse_cayley,
    orthogonal_group, remark3_mixture, shift_group, weak_residual, OperatorMatrix, ShiftKind, Trajectory,
};
use skewlab::rng::{seeded, uniform};
use skewlab::Result;

use crate::params::{ParamSpec, Params};
use crate::report::Recorder;

pub(super) fn remark3_params() -> Vec<ParamSpec> {
    vec![ParamSpec::int("n_cells", 256, 8, 8192), ParamSpec::seed()]
}

/// The mixture of the periodic and antiperiodic shift groups on `t in [0, 2]`.
pub(super) fn remark3(p: &Params, rec: &mut Recorder) -> Result<()> {
    let n = p.usize("n_cells");
    let u0 = GridFunction1D::from_fn(n, |x| (PI * x).sin() + 0.3 * (3.0 * PI * x).sin())?;
    let dx = u0.dx();
    let times: Vec<f64> = (0..=2 * n).map(|i| i as f64 * dx).collect();
    let traj = Trajectory::from_fn(&times, |t| Ok(remark3_mixture(t, &u0)))?;

    rec.at_most("u_at_1_is_zero", remark3_mixture(1.0, &u0).max_abs(), 1e-12);
    rec.at_most("u_at_2_is_u0", remark3_mixture(2.0, &u0).max_abs_diff(&u0)?, 1e-12);
    let profile = energy_profile(&traj);
    rec.flag("energy_inequality", profile.inequality_holds);
    let e0 = profile.samples[0].1;
    rec.metric("u0_norm", u0.norm());
    rec.metric("energy_max_ratio", profile.samples.iter().map(|s| s.1 / e0).fold(0.0, f64::max));
    rec.metric("energy_min_ratio", profile.samples.iter().map(|s| s.1 / e0).fold(f64::INFINITY, f64::min));

    let mut energy = String::from("t,energy\n");
    for (t, e) in &profile.samples {
        let _ = writeln!(energy, "{t:e},{e:e}");
    }
    rec.artifact("energy.csv", energy);
    let stride = (n / 16).max(1);
    let coarse: Vec<f64> = times.iter().step_by(stride).copied().collect();
    let sampled = Trajectory::from_fn(&coarse, |t| Ok(remark3_mixture(t, &u0)))?;
    rec.artifact("trajectory.csv", sampled.to_csv());
    Ok(())
}

pub(super) fn deficiency_params() -> Vec<ParamSpec> {
    vec![ParamSpec::int("n_cells", 1000, 8, 100_000), ParamSpec::int("probes", 50, 1, 10_000), ParamSpec::seed()]
}

pub(super) fn deficiency(p: &Params, rec: &mut Recorder) -> Result<()> {
    let report = interval_deficiency(p.usize("n_cells"), p.usize("probes"), p.u64("seed"))?;
    rec.at_most("d_plus_is_one", report.d_plus as f64 - 1.0, 0.0);
    rec.at_most("d_minus_is_one", report.d_minus as f64 - 1.0, 0.0);
    rec.at_most("pairing_residual", report.max_residual(), 1e-6);
    rec.at_most("basis_orthonormality", report.orthonormality_defect(), 1e-12);
    rec.artifact("deficiency.json", report.to_json());
    Ok(())
}

pub(super) fn nonuniqueness_params() -> Vec<ParamSpec> {
    vec![ParamSpec::int("n_cells", 1000, 16, 20_000), ParamSpec::float("dt", 1e-3, 1e-4, 1e-2), ParamSpec::seed()]
}

/// Two different generalized solutions from `u0 = e^{-x}`: the periodic
/// shift and the growing `e^{t - x}`.
pub(super) fn nonuniqueness(p: &Params, rec: &mut Recorder) -> Result<()> {
    let n = p.usize("n_cells");
    let steps = (2.0 / p.f64("dt")).round() as usize;
    let dt = 2.0 / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
    let u0 = GridFunction1D::from_fn(n, |x| (-x).exp())?;
    let shift = Trajectory::from_fn(&times, |t| Ok(shift_group(ShiftKind::Periodic, t, &u0)))?;
    let growth = Trajectory::from_fn(&times, |t| growth_solution(t, n))?;
    let tests = interval_test_family(n)?;

    rec.at_most("shift_weak_residual", weak_residual(&shift, &u0, &tests)?, 1e-4);
    rec.at_most("growth_weak_residual", weak_residual(&growth, &u0, &tests)?, 1e-4);
    let gap = shift_group(ShiftKind::Periodic, 1.0, &u0).axpy(-1.0, &growth_solution(1.0, n)?)?.norm();
    rec.at_least("relative_distance_at_1", gap / u0.norm(), 0.5);
    rec.metric("growth_energy_inequality", f64::from(u8::from(energy_profile(&growth).inequality_holds)));
    rec.metric("shift_energy_inequality", f64::from(u8::from(energy_profile(&shift).inequality_holds)));

    let mut csv = String::from("t,shift_norm,growth_norm\n");
    for i in (0..times.len()).step_by((steps / 200).max(1)) {
        let _ = writeln!(csv, "{:e},{:e},{:e}", times[i], shift.norms()[i], growth.norms()[i]);
    }
    rec.artifact("norms.csv", csv);
    Ok(())
}

pub(super) fn cayley_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("count", 20, 1, 500),
        ParamSpec::int("max_dim", 100, 2, 400),
        ParamSpec::float("t", 1.0, -100.0, 100.0),
        ParamSpec::seed(),
    ]
}

/// Random skew matrices, the first of size `max_dim`, the rest of uniform random size.
pub(super) fn cayley_roundtrip(p: &Params, rec: &mut Recorder) -> Result<()> {
    let (count, max_dim, seed) = (p.usize("count"), p.usize("max_dim"), p.u64("seed"));
    let mut rng = seeded(seed);
    let (mut orth, mut round, mut group): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut csv = String::from("index,dim,orthogonality,roundtrip,group\n");
    for i in 0..count {
        let dim = if i == 0 { max_dim } else { 2 + (uniform(&mut rng, 0.0, (max_dim - 1) as f64) as usize).min(max_dim - 2) };
        let a = OperatorMatrix::random_skew(dim, seed * 1000 + i as u64)?;
        let q = cayley(&a)?;
        let o = q.orthogonality_defect();
        let r = inverse_cayley(&q)?.frobenius_distance(&a);
        let g = orthogonal_group(&a, p.f64("t"))?.orthogonality_defect();
        orth = orth.max(o);
        round = round.max(r);
        group = group.max(g);
        let _ = writeln!(csv, "{i},{dim},{o:e},{r:e},{g:e}");
    }
    rec.at_most("orthogonality", orth, 1e-10);
    rec.at_most("roundtrip", round, 1e-10);
    rec.at_most("group_orthogonality", group, 1e-10);
    rec.artifact("matrices.csv", csv);
    Ok(())
}
