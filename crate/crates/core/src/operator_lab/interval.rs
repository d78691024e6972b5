//! The derivative operator `A u = u'` on `L^2([0, 1])` with zero boundary
//! values, its deficiency spaces, and the shift groups generated by its two
//! skew-adjoint extensions (periodic and antiperiodic boundary conditions).

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::Result;
use crate::hilbert_grid::{GridFunction1D, HilbertVector};
use crate::rng::{normal, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftKind {
    /// `u(1) = u(0)`: the group `u_p(x - t)`.
    Periodic,
    /// `u(1) = -u(0)`: the group `u_ap(x - t)`.
    Antiperiodic,
}

/// Deficiency indices of the zero-boundary derivative operator with
/// orthonormal bases of `ker(E + A*)` and `ker(E - A*)`.
#[derive(Debug, Clone)]
pub struct DeficiencyReport {
    pub d_plus: usize,
    pub d_minus: usize,
    pub plus_basis: Vec<GridFunction1D>,
    pub minus_basis: Vec<GridFunction1D>,
    /// `|((E - A) u, e^{-x})| / ||u||_{W^1}` per random probe.
    pub residuals: Vec<f64>,
    /// `|((E + A) u, e^{x})| / ||u||_{W^1}` per random probe.
    pub plus_residuals: Vec<f64>,
}

#[derive(Serialize)]
struct DeficiencyJson<'a> {
    d_plus: usize,
    d_minus: usize,
    residuals: &'a [f64],
    plus_residuals: &'a [f64],
}

impl DeficiencyReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().chain(&self.plus_residuals).fold(0.0_f64, |m, v| m.max(*v))
    }

    /// Largest deviation of the Gram matrices of both bases from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for basis in [&self.plus_basis, &self.minus_basis] {
            for (i, a) in basis.iter().enumerate() {
                for (j, b) in basis.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    let ip = a.inner(b).unwrap_or(f64::NAN);
                    worst = worst.max((ip - target).abs());
                }
            }
        }
        worst
    }

    /// JSON `{d_plus, d_minus, residuals, plus_residuals}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DeficiencyJson {
            d_plus: self.d_plus,
            d_minus: self.d_minus,
            residuals: &self.residuals,
            plus_residuals: &self.plus_residuals,
        })
        .expect("deficiency report serializes")
    }
}

/// Smooth function on `[0, 1]` vanishing at both endpoints:
/// `sum_k c_k sin(k pi x) + b x (1 - x)(1 + e x)`.
#[derive(Debug, Clone)]
pub struct ZeroBoundaryProbe {
    pub sine: Vec<f64>,
    pub poly: f64,
    pub tilt: f64,
}

impl ZeroBoundaryProbe {
    pub fn random(rng: &mut crate::rng::LabRng) -> Self {
        let sine = (1..=5).map(|k| normal(rng) / k as f64).collect();
        Self { sine, poly: normal(rng), tilt: normal(rng) }
    }

    pub fn value(&self, x: f64) -> f64 {
        let s: f64 = self.sine.iter().enumerate().map(|(i, c)| c * ((i + 1) as f64 * PI * x).sin()).sum();
        s + self.poly * x * (1.0 - x) * (1.0 + self.tilt * x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let s: f64 = self
            .sine
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = (i + 1) as f64 * PI;
                c * k * (k * x).cos()
            })
            .sum();
        // d/dx [x (1 - x)(1 + e x)] = 1 + 2 (e - 1) x - 3 e x^2
        s + self.poly * (1.0 + 2.0 * (self.tilt - 1.0) * x - 3.0 * self.tilt * x * x)
    }
}

/// Composite Simpson rule on `[0, 1]` with `intervals` (even) subintervals.
pub fn simpson_unit(f: impl Fn(f64) -> f64, intervals: usize) -> f64 {
    let m = intervals + intervals % 2;
    let h = 1.0 / m as f64;
    let mut sum = f(0.0) + f(1.0);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0
}

/// Deficiency indices `d_+ = d_- = 1` of the zero-boundary derivative.
///
/// With `A* v = -v'`, the kernels are `ker(E - A*) = span{e^{-x}}` and
/// `ker(E + A*) = span{e^{x}}`. Both are returned normalized on the grid and
/// certified by checking that they annihilate `(E -/+ A) u` for `probes`
/// random zero-boundary functions (Simpson quadrature on `2 n_cells` panels).
pub fn interval_deficiency(n_cells: usize, probes: usize, seed: u64) -> Result<DeficiencyReport> {
    let normalized = |f: fn(f64) -> f64| -> Result<GridFunction1D> {
        let g = GridFunction1D::from_fn(n_cells, f)?;
        let norm = g.norm();
        Ok(g.scaled(1.0 / norm))
    };
    let minus = normalized(|x| (-x).exp())?;
    let plus = normalized(|x| x.exp())?;

    let mut rng = seeded(seed);
    let panels = 2 * n_cells;
    let mut residuals = Vec::with_capacity(probes);
    let mut plus_residuals = Vec::with_capacity(probes);
    for _ in 0..probes {
        let p = ZeroBoundaryProbe::random(&mut rng);
        let w1 = simpson_unit(|x| p.value(x).powi(2) + p.derivative(x).powi(2), panels).sqrt();
        let minus_pair = simpson_unit(|x| (p.value(x) - p.derivative(x)) * (-x).exp(), panels);
        let plus_pair = simpson_unit(|x| (p.value(x) + p.derivative(x)) * x.exp(), panels);
        residuals.push(minus_pair.abs() / w1);
        plus_residuals.push(plus_pair.abs() / w1);
    }
    Ok(DeficiencyReport {
        d_plus: 1,
        d_minus: 1,
        plus_basis: vec![plus],
        minus_basis: vec![minus],
        residuals,
        plus_residuals,
    })
}

/// Tolerance, in cells, for treating a shift as grid aligned.
const ALIGN_TOL: f64 = 1e-9;

fn aligned_cells(t: f64, n: usize) -> Option<i64> {
    let m = t * n as f64;
    let r = m.round();
    ((m - r).abs() <= ALIGN_TOL * m.abs().max(1.0)).then_some(r as i64)
}

/// `u_p(x - t)` or `u_ap(x - t)` on the grid of `u0`.
///
/// Shifts by whole cells are exact index rotations (with a sign flip per
/// unit traversed in the antiperiodic case); other shifts use band-limited
/// interpolation of the periodic or antiperiodic extension.
pub fn shift_group(kind: ShiftKind, t: f64, u0: &GridFunction1D) -> GridFunction1D {
    let n = u0.n_cells();
    let values = u0.values();
    let shifted: Vec<f64> = match aligned_cells(t, n) {
        Some(m) => (0..n as i64)
            .map(|i| {
                let j = i - m;
                let wraps = j.div_euclid(n as i64);
                let v = values[j.rem_euclid(n as i64) as usize];
                match kind {
                    ShiftKind::Antiperiodic if wraps % 2 != 0 => -v,
                    _ => v,
                }
            })
            .collect(),
        None => spectral_shift(kind, t, u0),
    };
    GridFunction1D::new(shifted).expect("shift preserves grid size and finiteness")
}

fn spectral_shift(kind: ShiftKind, t: f64, u0: &GridFunction1D) -> Vec<f64> {
    let n = u0.n_cells();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let centers: Vec<f64> = (0..n).map(|i| u0.center(i)).collect();
    // antiperiodic data times e^{-i pi x} is 1-periodic
    let twist = |x: f64, sign: f64| match kind {
        ShiftKind::Periodic => Complex64::new(1.0, 0.0),
        ShiftKind::Antiperiodic => Complex64::from_polar(1.0, sign * PI * x),
    };
    let mut data: Vec<Complex64> =
        u0.values().iter().zip(&centers).map(|(&v, &x)| v * twist(x, -1.0)).collect();
    fwd.process(&mut data);
    for (k, c) in data.iter_mut().enumerate() {
        let signed = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        *c *= match kind {
            ShiftKind::Periodic if 2 * k == n => Complex64::new((PI * n as f64 * t).cos(), 0.0),
            ShiftKind::Periodic => Complex64::from_polar(1.0, -2.0 * PI * signed * t),
            ShiftKind::Antiperiodic => Complex64::from_polar(1.0, -PI * (2.0 * signed + 1.0) * t),
        };
    }
    inv.process(&mut data);
    data.iter()
        .zip(&centers)
        .map(|(c, &x)| (c * twist(x, 1.0)).re / n as f64)
        .collect()
}

/// `(u_p(x - t) + u_ap(x - t)) / 2`: a 2-periodic generalized solution that
/// vanishes at odd times, hence not a semigroup orbit.
pub fn remark3_mixture(t: f64, u0: &GridFunction1D) -> GridFunction1D {
    let p = shift_group(ShiftKind::Periodic, t, u0);
    let ap = shift_group(ShiftKind::Antiperiodic, t, u0);
    p.axpy(1.0, &ap).expect("same grid").scaled(0.5)
}

/// `e^{t - x}`: the exponentially growing solution built on `e^{-x} in ker(E - A*)`.
pub fn growth_solution(t: f64, n_cells: usize) -> Result<GridFunction1D> {
    GridFunction1D::from_fn(n_cells, |x| (t - x).exp())
}

/// Follows `e^{t - x}` up to `t0`, then continues with the periodic shift
/// group: `e^{t0} T_{t - t0} e^{-x}` for `t > t0`.
pub fn spliced_solution(t0: f64, t: f64, n_cells: usize) -> Result<GridFunction1D> {
    if t <= t0 {
        return growth_solution(t, n_cells);
    }
    let base = GridFunction1D::from_fn(n_cells, |x| (-x).exp())?;
    Ok(shift_group(ShiftKind::Periodic, t - t0, &base).scaled(t0.exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_u0(n: usize) -> GridFunction1D {
        GridFunction1D::from_fn(n, |x| (PI * x).sin() + 0.3 * (3.0 * PI * x).sin() + x).unwrap()
    }

    #[test]
    fn deficiency_indices_are_one_one() {
        let r = interval_deficiency(256, 50, 1).unwrap();
        assert_eq!((r.d_plus, r.d_minus), (1, 1));
        assert_eq!(r.plus_basis.len(), 1);
        assert_eq!(r.minus_basis.len(), 1);
        assert!(r.orthonormality_defect() < 1e-8);
        assert!(r.max_residual() < 1e-6, "{}", r.max_residual());
        let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(json["d_plus"], 1);
        assert_eq!(json["residuals"].as_array().unwrap().len(), 50);
    }

    #[test]
    fn polynomial_probe_pairs_to_zero() {
        // u = x(1-x): int_0^1 (x - x^2 - 1 + 2x) e^{-x} dx = 0 exactly
        let v = simpson_unit(|x| (x - x * x - (1.0 - 2.0 * x)) * (-x).exp(), 512);
        assert!(v.abs() < 1e-6);
        // u = sin(pi x): int (sin - pi cos) e^{-x} dx = 0 exactly
        let v = simpson_unit(|x| ((PI * x).sin() - PI * (PI * x).cos()) * (-x).exp(), 512);
        assert!(v.abs() < 1e-6);
    }

    #[test]
    fn a_non_kernel_direction_does_not_pair_to_zero() {
        // e^{x} is not in ker(E - A*): the pairing detects it
        let v = simpson_unit(|x| ((PI * x).sin() - PI * (PI * x).cos()) * x.exp(), 512);
        assert!(v.abs() > 1e-2);
    }

    #[test]
    fn probes_vanish_at_endpoints() {
        let mut rng = seeded(4);
        for _ in 0..10 {
            let p = ZeroBoundaryProbe::random(&mut rng);
            assert!(p.value(0.0).abs() < 1e-14 && p.value(1.0).abs() < 1e-14);
            let h = 1e-6;
            let x = 0.37;
            let fd = (p.value(x + h) - p.value(x - h)) / (2.0 * h);
            assert!((fd - p.derivative(x)).abs() < 1e-6);
        }
    }

    #[test]
    fn shift_identity_and_full_periods() {
        let u0 = sample_u0(64);
        assert_eq!(shift_group(ShiftKind::Periodic, 0.0, &u0), u0);
        assert_eq!(shift_group(ShiftKind::Periodic, 1.0, &u0), u0);
        assert_eq!(shift_group(ShiftKind::Antiperiodic, 1.0, &u0), u0.scaled(-1.0));
        assert_eq!(shift_group(ShiftKind::Antiperiodic, 2.0, &u0), u0);
        assert_eq!(shift_group(ShiftKind::Antiperiodic, -1.0, &u0), u0.scaled(-1.0));
    }

    #[test]
    fn aligned_group_law_is_exact() {
        let u0 = sample_u0(32);
        let dx = u0.dx();
        for kind in [ShiftKind::Periodic, ShiftKind::Antiperiodic] {
            for (a, b) in [(3, 5), (17, 40), (-9, 30), (31, 33)] {
                let (t, s) = (a as f64 * dx, b as f64 * dx);
                let lhs = shift_group(kind, t + s, &u0);
                let rhs = shift_group(kind, t, &shift_group(kind, s, &u0));
                assert_eq!(lhs, rhs);
                assert_eq!(lhs.norm(), u0.norm());
            }
        }
    }

    #[test]
    fn unaligned_shift_matches_band_limited_extension() {
        // periodic: a trigonometric polynomial of period 1 is shifted exactly
        let n = 64;
        let f = |x: f64| (2.0 * PI * x).sin() + 0.5 * (6.0 * PI * x + 0.3).cos();
        let u0 = GridFunction1D::from_fn(n, f).unwrap();
        let t = 0.123_456;
        let got = shift_group(ShiftKind::Periodic, t, &u0);
        let want = GridFunction1D::from_fn(n, |x| f(x - t)).unwrap();
        assert!(got.max_abs_diff(&want).unwrap() < 1e-12);
        // antiperiodic: sin(pi x) and cos(3 pi x) flip sign over one unit
        let g = |x: f64| (PI * x).sin() + 0.2 * (3.0 * PI * x).cos();
        let u0 = GridFunction1D::from_fn(n, g).unwrap();
        let got = shift_group(ShiftKind::Antiperiodic, t, &u0);
        let want = GridFunction1D::from_fn(n, |x| g(x - t)).unwrap();
        assert!(got.max_abs_diff(&want).unwrap() < 1e-12);
    }

    #[test]
    fn mixture_vanishes_at_odd_times_and_returns_at_even_times() {
        let u0 = sample_u0(256);
        assert!(remark3_mixture(1.0, &u0).max_abs() < 1e-12);
        assert!(remark3_mixture(3.0, &u0).max_abs() < 1e-12);
        assert!(remark3_mixture(2.0, &u0).max_abs_diff(&u0).unwrap() < 1e-12);
        for k in 0..20 {
            let t = k as f64 * 0.1;
            assert!(remark3_mixture(t, &u0).norm() <= u0.norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn mixture_of_left_bump_at_half_period() {
        let n = 128;
        let bump = |x: f64| if x > 0.0 && x < 0.5 { (PI * x / 0.5).sin().powi(4) } else { 0.0 };
        let u0 = GridFunction1D::from_fn(n, bump).unwrap();
        let got = remark3_mixture(0.5, &u0);
        let want = GridFunction1D::from_fn(n, |x| if x > 0.5 { bump(x - 0.5) } else { 0.0 }).unwrap();
        assert!(got.max_abs_diff(&want).unwrap() < 1e-10);
    }

    #[test]
    fn growth_and_splice() {
        let n = 64;
        let base = GridFunction1D::from_fn(n, |x| (-x).exp()).unwrap();
        assert!(growth_solution(0.0, n).unwrap().max_abs_diff(&base).unwrap() < 1e-15);
        let g1 = growth_solution(1.0, n).unwrap();
        assert!((g1.norm() / base.norm() - 1f64.exp()).abs() < 1e-12);
        assert_eq!(spliced_solution(0.0, 0.0, n).unwrap(), base);
        assert_eq!(spliced_solution(0.7, 0.4, n).unwrap(), growth_solution(0.4, n).unwrap());
        let s = spliced_solution(0.5, 1.5, n).unwrap();
        assert!(s.max_abs_diff(&base.scaled(0.5f64.exp())).unwrap() < 1e-14);
        // continuity at the splice point
        let before = spliced_solution(0.5, 0.5, n).unwrap();
        let after = spliced_solution(0.5, 0.5 + 1e-12, n).unwrap();
        assert!(before.max_abs_diff(&after).unwrap() < 1e-8);
    }
}
