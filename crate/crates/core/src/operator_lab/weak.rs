use std::f64::consts::PI;
use std::sync::Arc;

use super::mollifier::MollifierFamily;
use super::trajectory::Trajectory;
use crate::error::{Error, Result};
use crate::hilbert_grid::{GridFunction1D, HilbertVector};

pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Separable test function `f(t, x) = phi(t) v(x)`, carrying `v` and `A_0 v`
/// already discretized.
#[derive(Clone)]
pub struct SeparableTest<V> {
    pub v: V,
    pub a0_v: V,
    pub phi: TimeFn,
    pub dphi: TimeFn,
    /// `phi` vanishes identically on `[support_end, inf)`.
    pub support_end: f64,
}

/// Boundary values above this are rejected as leaving the operator domain.
const BOUNDARY_TOL: f64 = 1e-12;

impl SeparableTest<GridFunction1D> {
    /// Interval test function with `A_0 v = v'`; `v` must vanish at 0 and 1.
    pub fn interval(
        n_cells: usize,
        v: impl Fn(f64) -> f64,
        dv: impl Fn(f64) -> f64,
        phi: TimeFn,
        dphi: TimeFn,
        support_end: f64,
    ) -> Result<Self> {
        let (left, right) = (v(0.0), v(1.0));
        if left.abs() > BOUNDARY_TOL || right.abs() > BOUNDARY_TOL {
            return Err(Error::Precondition(format!(
                "test function must vanish at the endpoints, got v(0) = {left:e}, v(1) = {right:e}"
            )));
        }
        Ok(Self {
            v: GridFunction1D::from_fn(n_cells, &v)?,
            a0_v: GridFunction1D::from_fn(n_cells, &dv)?,
            phi,
            dphi,
            support_end,
        })
    }
}

fn validate<V: HilbertVector>(traj: &Trajectory<V>, u0: &V, test: &SeparableTest<V>) -> Result<()> {
    if !test.v.same_discretization(u0) || !test.a0_v.same_discretization(u0) {
        return Err(Error::ShapeMismatch("test function and initial datum use different grids".into()));
    }
    if !(test.support_end <= traj.final_time()) {
        return Err(Error::Precondition(format!(
            "test function support ends at {} beyond the trajectory span {}",
            test.support_end,
            traj.final_time()
        )));
    }
    for t in [test.support_end, traj.final_time()] {
        if (test.phi)(t).abs() > BOUNDARY_TOL || (test.dphi)(t).abs() > BOUNDARY_TOL {
            return Err(Error::Precondition(format!("time factor does not vanish at t = {t}")));
        }
    }
    Ok(())
}

/// Unnormalized value of the weak identity for one test function and the
/// size factor used to normalize it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakTerms {
    pub raw: f64,
    pub scale: f64,
}

impl WeakTerms {
    pub fn normalized(&self) -> f64 {
        self.raw.abs() / self.scale
    }
}

/// `int (u(t), phi'(t) v + phi(t) A_0 v) dt + (u_0, v) phi(0)` by the
/// trapezoid rule on the trajectory's time grid, with the size factor
/// `||v|| max|phi| + |phi'|_1 ||v||`.
pub fn weak_identity<V: HilbertVector>(u: &Trajectory<V>, u0: &V, test: &SeparableTest<V>) -> Result<WeakTerms> {
    validate(u, u0, test)?;
    let times = u.times();
    let integrand: Vec<f64> = times
        .iter()
        .zip(u.states())
        .map(|(&t, state)| -> Result<f64> {
            Ok((test.dphi)(t) * state.inner(&test.v)? + (test.phi)(t) * state.inner(&test.a0_v)?)
        })
        .collect::<Result<_>>()?;
    let mut integral = 0.0;
    let mut dphi_l1 = 0.0;
    let mut phi_max = (test.phi)(times[0]).abs();
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        integral += 0.5 * dt * (integrand[i] + integrand[i - 1]);
        dphi_l1 += 0.5 * dt * ((test.dphi)(times[i]).abs() + (test.dphi)(times[i - 1]).abs());
        phi_max = phi_max.max((test.phi)(times[i]).abs());
    }
    let raw = integral + u0.inner(&test.v)? * (test.phi)(0.0);
    let v_norm = test.v.norm();
    Ok(WeakTerms { raw, scale: v_norm * phi_max + dphi_l1 * v_norm })
}

/// Normalized residual of the weak formulation, maximized over the test family.
pub fn weak_residual<V: HilbertVector>(u: &Trajectory<V>, u0: &V, tests: &[SeparableTest<V>]) -> Result<f64> {
    if tests.is_empty() {
        return Err(Error::InvalidInput("empty test family".into()));
    }
    let mut worst: f64 = 0.0;
    for test in tests {
        let terms = weak_identity(u, u0, test)?;
        if terms.scale == 0.0 {
            return Err(Error::InvalidInput("degenerate test function (zero size)".into()));
        }
        worst = worst.max(terms.normalized());
    }
    Ok(worst)
}

/// Five interval tests `sin(k pi x)(1 + x) theta_nu(t - t_c)` mixing
/// frequencies, cutoff sharpness and support ends; all supports end by `t = 1.8`.
pub fn interval_test_family(n_cells: usize) -> Result<Vec<SeparableTest<GridFunction1D>>> {
    const SPECS: [(u32, u32, f64); 5] = [(1, 2, 1.5), (2, 3, 1.2), (3, 4, 1.8), (1, 8, 0.6), (4, 2, 1.0)];
    SPECS
        .iter()
        .map(|&(k, nu, t_c)| {
            let kk = f64::from(k) * PI;
            let fam = MollifierFamily::new(nu)?;
            let phi: TimeFn = Arc::new(move |t| fam.theta(t - t_c));
            let dphi: TimeFn = Arc::new(move |t| fam.theta_derivative(t - t_c));
            SeparableTest::interval(
                n_cells,
                move |x| (kk * x).sin() * (1.0 + x),
                move |x| kk * (kk * x).cos() * (1.0 + x) + (kk * x).sin(),
                phi,
                dphi,
                t_c,
            )
        })
        .collect()
}
