use std::fmt::Write as _;

use serde::Serialize;

use super::bundle::{div_tolerance, generator_unchecked, max_divergence, EulerOperatorBundle};
use super::projector::leray_project;
use crate::error::{Error, Result};
use crate::hilbert_grid::{HilbertVector, TorusField};
use crate::operator_lab::Trajectory;

/// Largest admissible `dt * max|a| * N`.
pub const STABILITY_LIMIT: f64 = 0.5;
/// Upper bound on stored trajectory states; diagnostics cover every step.
pub const MAX_STORED_STATES: usize = 101;

/// Per-step record of an Euler run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub t: f64,
    /// `||u(t)||^2 / 2`.
    pub energy: f64,
    pub div_max: f64,
    /// `max |u - P u|` removed by the post-step projection.
    pub residual: f64,
}

/// Result of [`evolve`].
#[derive(Debug, Clone)]
pub struct Evolution {
    pub trajectory: Trajectory<TorusField>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub dt: f64,
}

impl Evolution {
    pub fn final_state(&self) -> &TorusField {
        self.trajectory.states().last().expect("trajectory is never empty")
    }

    /// `max_t | ||u(t)|| - ||u0|| | / ||u0||`.
    pub fn energy_drift(&self) -> f64 {
        let norms = self.trajectory.norms();
        let n0 = norms[0];
        if n0 == 0.0 {
            return 0.0;
        }
        self.diagnostics.iter().map(|d| ((2.0 * d.energy).sqrt() - n0).abs() / n0).fold(0.0, f64::max)
    }

    pub fn max_divergence(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.div_max).fold(0.0, f64::max)
    }

    /// Diagnostics CSV with header `t,energy,div_max,residual`.
    pub fn diagnostics_csv(&self) -> String {
        let mut out = String::from("t,energy,div_max,residual\n");
        for d in &self.diagnostics {
            let _ = writeln!(out, "{:e},{:e},{:e},{:e}", d.t, d.energy, d.div_max, d.residual);
        }
        out
    }
}

fn rk4_step(bundle: &EulerOperatorBundle, u: &TorusField, dt: f64) -> Result<TorusField> {
    // u' = -P(B u)
    let f = |v: &TorusField| generator_unchecked(bundle, v).map(|g| g.scaled(-1.0));
    let k1 = f(u)?;
    let k2 = f(&u.axpy(0.5 * dt, &k1)?)?;
    let k3 = f(&u.axpy(0.5 * dt, &k2)?)?;
    let k4 = f(&u.axpy(dt, &k3)?)?;
    let incr = k1.add(&k4)?.axpy(2.0, &k2.add(&k3)?)?;
    u.axpy(dt / 6.0, &incr)
}

/// Integrates `u' = -P(B u)` from a solenoidal `u0` by classical RK4 with
/// a Leray projection after every step.
///
/// The step is reduced to `t_end / ceil(t_end / dt)` so the run ends on
/// `t_end`. At most [`MAX_STORED_STATES`] evenly spaced states are kept in
/// the trajectory (always including both ends).
pub fn evolve(bundle: &EulerOperatorBundle, u0: &TorusField, t_end: f64, dt: f64) -> Result<Evolution> {
    bundle.check(u0)?;
    if !(t_end > 0.0 && t_end.is_finite()) || !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("need t_end > 0 and dt > 0, got t_end = {t_end}, dt = {dt}")));
    }
    let courant = dt * bundle.max_speed() * bundle.n_modes() as f64;
    if courant > STABILITY_LIMIT {
        return Err(Error::InvalidInput(format!(
            "dt * max|a| * N = {courant:.3} exceeds the stability limit {STABILITY_LIMIT}"
        )));
    }
    let div0 = max_divergence(u0)?;
    if div0 > div_tolerance(u0, 1e-10) {
        return Err(Error::Precondition(format!("initial field has divergence {div0:.3e}")));
    }
    let steps = (t_end / dt * (1.0 - 1e-12)).ceil() as usize;
    let dt = t_end / steps as f64;
    let stride = steps.div_ceil(MAX_STORED_STATES - 1).max(1);
    let mut trajectory = Trajectory::new(u0.clone());
    let mut diagnostics = vec![StepDiagnostics { t: 0.0, energy: 0.5 * u0.norm().powi(2), div_max: div0, residual: 0.0 }];
    let mut u = u0.clone();
    for step in 1..=steps {
        let raw = rk4_step(bundle, &u, dt)?;
        u = leray_project(bundle.projector(), &raw)?;
        let t = step as f64 * dt;
        diagnostics.push(StepDiagnostics {
            t,
            energy: 0.5 * u.norm().powi(2),
            div_max: max_divergence(&u)?,
            residual: raw.max_abs_diff(&u)?,
        });
        if step % stride == 0 || step == steps {
            trajectory.push(t, u.clone())?;
        }
    }
    Ok(Evolution { trajectory, diagnostics, dt })
}
