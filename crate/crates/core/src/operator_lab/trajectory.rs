use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert_grid::HilbertVector;

/// Time-stamped states of a candidate generalized solution, with cached norms.
#[derive(Debug, Clone)]
pub struct Trajectory<V> {
    times: Vec<f64>,
    states: Vec<V>,
    norms: Vec<f64>,
}

impl<V: HilbertVector> Trajectory<V> {
    /// Starts a trajectory at `t = 0`.
    pub fn new(initial: V) -> Self {
        let norm = initial.norm();
        Self { times: vec![0.0], states: vec![initial], norms: vec![norm] }
    }

    /// Samples `state(t)` on `times`, which must start at 0 and increase strictly.
    pub fn from_fn(times: &[f64], mut state: impl FnMut(f64) -> Result<V>) -> Result<Self> {
        let (&first, rest) = times
            .split_first()
            .ok_or_else(|| Error::InvalidInput("trajectory needs at least one time".into()))?;
        if first != 0.0 {
            return Err(Error::InvalidInput(format!("trajectory must start at t = 0, got {first}")));
        }
        let mut traj = Self::new(state(0.0)?);
        for &t in rest {
            traj.push(t, state(t)?)?;
        }
        Ok(traj)
    }

    pub fn push(&mut self, t: f64, state: V) -> Result<()> {
        let last = *self.times.last().expect("trajectory is never empty");
        if !(t > last) {
            return Err(Error::InvalidInput(format!("times must increase strictly: {t} after {last}")));
        }
        if !state.same_discretization(&self.states[0]) {
            return Err(Error::ShapeMismatch("trajectory states must share one discretization".into()));
        }
        self.norms.push(state.norm());
        self.times.push(t);
        self.states.push(state);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[V] {
        &self.states
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory is never empty")
    }

    /// CSV rows `t, norm, v_0, ..., v_{n-1}`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for ((t, norm), state) in self.times.iter().zip(&self.norms).zip(&self.states) {
            let _ = write!(out, "{t:e},{norm:e}");
            for v in state.flat_values() {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
        out
    }
}

/// Energy `E(t) = ||u(t)||^2 / 2` along a trajectory.
#[derive(Debug, Clone, Serialize)]
pub struct EnergyProfile {
    pub samples: Vec<(f64, f64)>,
    /// `E(t_i) <= E(0) (1 + 1e-9)` for every sample.
    pub inequality_holds: bool,
}

impl EnergyProfile {
    pub fn max_relative_drift(&self) -> f64 {
        let e0 = self.samples[0].1;
        self.samples
            .iter()
            .map(|(_, e)| (e - e0).abs() / e0.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

pub fn energy_profile<V: HilbertVector>(u: &Trajectory<V>) -> EnergyProfile {
    let samples: Vec<(f64, f64)> = u.times().iter().zip(u.norms()).map(|(&t, &n)| (t, 0.5 * n * n)).collect();
    let e0 = samples[0].1;
    let inequality_holds = samples.iter().all(|&(_, e)| e <= e0 * (1.0 + 1e-9));
    EnergyProfile { samples, inequality_holds }
}
