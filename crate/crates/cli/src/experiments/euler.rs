use num_complex::Complex64;
use skewlab::euler::{
    evolve, gradient_part, leray_project, max_divergence, pressure_gradient_t, random_solenoidal, resolvent_solve,
    stream_vortex, EulerOperatorBundle, SpectralProjector,
};
use skewlab::hilbert_grid::{spectral_gradient, HilbertVector, TorusField, VelocityField};
use skewlab::rng::{normal, seeded};
use skewlab::Result;

use crate::params::{ParamSpec, Params};
use crate::report::Recorder;

const FIELDS: &[&str] = &["shear_sin", "sine_rotation", "stream_random"];

fn coefficient_field(p: &Params) -> Result<VelocityField> {
    match p.text("field") {
        "stream_random" => Ok(VelocityField::stream_random(p.u64("seed"))),
        name => VelocityField::from_registry(name),
    }
}

fn random_field(dim: usize, n: usize, components: usize, seed: u64) -> Result<TorusField> {
    let mut rng = seeded(seed);
    let len = components * n.pow(dim as u32);
    TorusField::new(dim, n, components, (0..len).map(|_| normal(&mut rng)).collect())
}

pub(super) fn projector_params() -> Vec<ParamSpec> {
    vec![ParamSpec::int("n", 64, 16, 256), ParamSpec::choice("field", "stream_random", FIELDS), ParamSpec::seed()]
}

/// Algebra of the Leray projector and the range of `T` on white-noise fields.
pub(super) fn projector(p: &Params, rec: &mut Recorder) -> Result<()> {
    let (n, seed) = (p.usize("n"), p.u64("seed"));
    let proj = SpectralProjector::new(2, n)?;
    let u = random_field(2, n, 2, 2 * seed)?;
    let v = random_field(2, n, 2, 2 * seed + 1)?;
    let pu = leray_project(&proj, &u)?;
    let pv = leray_project(&proj, &v)?;

    rec.at_most("multiplier_defect", proj.multiplier_defect(), 1e-10);
    rec.at_most("idempotence", leray_project(&proj, &pu)?.max_abs_diff(&pu)? / u.max_abs(), 1e-10);
    rec.at_most("symmetry", (pu.inner(&v)? - u.inner(&pv)?) / (u.norm() * v.norm()), 1e-10);
    rec.at_most("div_of_projection", max_divergence(&pu)? / u.max_abs(), 1e-10);
    let grad = spectral_gradient(&random_field(2, n, 1, 2 * seed + 2)?)?;
    rec.at_most("projection_of_gradient", leray_project(&proj, &grad)?.max_abs() / grad.max_abs(), 1e-10);
    rec.at_most("gradient_part_orthogonality", gradient_part(&proj, &u)?.inner(&pu)? / u.norm().powi(2), 1e-10);

    let bundle = EulerOperatorBundle::new(coefficient_field(p)?, n)?;
    let tu = pressure_gradient_t(&bundle, &u)?;
    rec.at_most("projection_of_tu", leray_project(&proj, &tu)?.max_abs() / tu.max_abs(), 1e-10);

    // shear a = (sin x2, 0), u = (0, cos x1): w_1 = cos x1 cos x2 on the four modes (+-1, +-1)
    let shear = EulerOperatorBundle::new(VelocityField::shear_sin(), n)?;
    let probe = TorusField::vector_from_fn(2, n, |x, out| {
        out[0] = 0.0;
        out[1] = x[0].cos();
    })?;
    let t_probe = pressure_gradient_t(&shear, &probe)?;
    let mut gap: f64 = 0.0;
    for flat in 0..t_probe.points() {
        let x = t_probe.point(flat);
        let mut acc = [Complex64::new(0.0, 0.0); 2];
        for xi in [[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]] {
            let e = Complex64::from_polar(1.0, xi[0] * x[0] + xi[1] * x[1]);
            for (l, slot) in acc.iter_mut().enumerate() {
                *slot -= 0.25 * xi[l] * xi[0] / 2.0 * e;
            }
        }
        for (l, slot) in acc.iter().enumerate() {
            gap = gap.max((t_probe.component(l)[flat] - slot.re).abs());
        }
    }
    rec.at_most("tu_four_mode_oracle", gap, 1e-12);
    Ok(())
}

pub(super) fn evolve_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("n", 64, 8, 128),
        ParamSpec::float("t_end", 1.0, 1e-3, 10.0),
        ParamSpec::float("dt", 1e-3, 1e-5, 0.1),
        ParamSpec::choice("field", "shear_sin", FIELDS),
        ParamSpec::int("order_n", 32, 8, 64),
        ParamSpec::float("order_dt", 0.01, 1e-4, 0.1),
        ParamSpec::seed(),
    ]
}

/// RK4 evolution of `u' = -P(B u)`: exact translation, conservation and the order of the energy drift.
pub(super) fn evolution(p: &Params, rec: &mut Recorder) -> Result<()> {
    let (n, t_end, dt) = (p.usize("n"), p.f64("t_end"), p.f64("dt"));

    let translate = EulerOperatorBundle::new(VelocityField::constant(&[1.0, 0.0])?, n)?;
    let u0 = stream_vortex(n)?;
    let run = evolve(&translate, &u0, t_end, dt)?;
    let exact = TorusField::vector_from_fn(2, n, |x, out| {
        let y = [x[0] - t_end, x[1]];
        out[0] = -2.0 * y[0].sin() * (2.0 * y[1]).sin() - 0.5 * (y[0] + y[1]).sin();
        out[1] = -y[0].cos() * (2.0 * y[1]).cos() + 0.5 * (y[0] + y[1]).sin();
    })?;
    rec.at_most("translation_error", run.final_state().max_abs_diff(&exact)?, 1e-8);

    let bundle = EulerOperatorBundle::new(coefficient_field(p)?, n)?;
    let run = evolve(&bundle, &u0, t_end, dt)?;
    rec.at_most("energy_drift", run.energy_drift(), 1e-8);
    rec.at_most("div_drift", run.max_divergence(), 1e-8);
    rec.metric("steps", (run.diagnostics.len() - 1) as f64);
    rec.artifact("diagnostics.csv", run.diagnostics_csv());
    rec.artifact("final_state.csv", run.final_state().to_csv());

    let (order_n, order_dt) = (p.usize("order_n"), p.f64("order_dt"));
    let coarse_bundle = EulerOperatorBundle::new(coefficient_field(p)?, order_n)?;
    let start = random_solenoidal(2, order_n, 6, 7 + p.u64("seed"))?;
    let coarse = evolve(&coarse_bundle, &start, t_end, order_dt)?.energy_drift();
    let fine = evolve(&coarse_bundle, &start, t_end, 0.5 * order_dt)?.energy_drift();
    rec.metric("coarse_drift", coarse);
    rec.metric("fine_drift", fine);
    rec.at_least("order_ratio", coarse / fine, 12.0);
    Ok(())
}

pub(super) fn lemma2_params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::int("n", 32, 8, 128),
        ParamSpec::float("h", 0.05, 0.0, 1.0),
        ParamSpec::float("tol", 1e-9, 1e-13, 1e-8),
        ParamSpec::choice("field", "shear_sin", FIELDS),
        ParamSpec::int("bandwidth", 4, 1, 32),
        ParamSpec::seed(),
    ]
}

/// `u - h (B + T) u = v` solved on all vector fields: the solution stays
/// solenoidal and the resolvent is contractive.
pub(super) fn lemma2(p: &Params, rec: &mut Recorder) -> Result<()> {
    let n = p.usize("n");
    let bundle = EulerOperatorBundle::new(coefficient_field(p)?, n)?;
    let v = random_solenoidal(2, n, p.usize("bandwidth"), 3 + p.u64("seed"))?;
    let sol = resolvent_solve(&bundle, p.f64("h"), &v, p.f64("tol"))?;
    rec.at_most("residual", sol.relative_residual, 1e-8);
    rec.at_most("divergence", sol.max_divergence, 1e-7);
    rec.check("contractivity", sol.field.norm() / v.norm() - 1.0, 1e-7, crate::report::Comparison::AtMost);
    rec.metric("iterations", sol.iterations as f64);
    rec.artifact("solution.csv", sol.field.to_csv());
    Ok(())
}
