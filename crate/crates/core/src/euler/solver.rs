use super::bundle::{div_tolerance, extended_generator, max_divergence, EulerOperatorBundle};
use crate::error::{Error, Result};
use crate::hilbert_grid::{HilbertVector, TorusField};

/// Outcome of [`gmres`].
#[derive(Debug, Clone, PartialEq)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// `|b - A x| / |b|` from the last recomputed residual.
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn residual(apply: &impl Fn(&[f64]) -> Result<Vec<f64>>, b: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    let ax = apply(x)?;
    Ok(b.iter().zip(&ax).map(|(p, q)| p - q).collect())
}

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
///
/// Stops when `|b - A x| <= tol |b|`. A restart cycle that fails to reduce
/// the residual by at least 0.1% reports non-convergence, as does exceeding
/// `max_iter` inner iterations.
pub fn gmres(
    apply: impl Fn(&[f64]) -> Result<Vec<f64>>,
    b: &[f64],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> Result<GmresOutcome> {
    let n = b.len();
    let b_norm = dot(b, b).sqrt();
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok(GmresOutcome { x, iterations: 0, relative_residual: 0.0 });
    }
    let restart = restart.clamp(1, n.max(1));
    let mut iterations = 0;
    let mut r = b.to_vec();
    let mut beta = b_norm;
    loop {
        if beta <= tol * b_norm {
            return Ok(GmresOutcome { x, iterations, relative_residual: beta / b_norm });
        }
        if iterations >= max_iter {
            return Err(Error::NonConvergence { iterations, residual: beta / b_norm });
        }
        let cycle_start = beta;
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess: Vec<Vec<f64>> = Vec::new();
        let mut rot: Vec<(f64, f64)> = Vec::new();
        let mut g = vec![beta];
        for j in 0..restart {
            iterations += 1;
            let mut w = apply(&basis[j])?;
            let mut col = vec![0.0; j + 2];
            for (i, v) in basis.iter().enumerate() {
                col[i] = dot(&w, v);
                w.iter_mut().zip(v).for_each(|(wk, vk)| *wk -= col[i] * vk);
            }
            let w_norm = dot(&w, &w).sqrt();
            col[j + 1] = w_norm;
            for (i, &(c, s)) in rot.iter().enumerate() {
                let (a, bb) = (col[i], col[i + 1]);
                col[i] = c * a + s * bb;
                col[i + 1] = -s * a + c * bb;
            }
            let denom = col[j].hypot(col[j + 1]);
            let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (col[j] / denom, col[j + 1] / denom) };
            col[j] = denom;
            col[j + 1] = 0.0;
            rot.push((c, s));
            g.push(-s * g[j]);
            g[j] *= c;
            hess.push(col);
            let estimate = g[j + 1].abs();
            if estimate <= 0.5 * tol * b_norm || w_norm <= 1e-14 * b_norm || iterations >= max_iter {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }
        // back substitution on the triangular factor
        let m = hess.len();
        let mut y = vec![0.0; m];
        for i in (0..m).rev() {
            let s: f64 = ((i + 1)..m).map(|k| hess[k][i] * y[k]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            x.iter_mut().zip(&basis[k]).for_each(|(xi, vi)| *xi += yk * vi);
        }
        r = residual(&apply, b, &x)?;
        beta = dot(&r, &r).sqrt();
        if beta > 0.999 * cycle_start && beta > tol * b_norm {
            return Err(Error::NonConvergence { iterations, residual: beta / b_norm });
        }
    }
}

/// Solution of `(E - h (B + T)) u = v` on the grid.
#[derive(Debug, Clone)]
pub struct ResolventSolution {
    pub field: TorusField,
    pub iterations: usize,
    /// `||u - h (B + T) u - v|| / ||v||`.
    pub relative_residual: f64,
    /// `max |div u|`.
    pub max_divergence: f64,
    /// `max |div u| <= 10 tol`: the solution stays in the solenoidal subspace.
    pub solenoidal: bool,
}

pub const GMRES_RESTART: usize = 60;
pub const GMRES_MAX_ITER: usize = 3000;

/// Solves `u - h (B + T) u = v` for solenoidal `v` by matrix-free GMRES on
/// the full vector-field space. Non-convergence reports the final residual.
pub fn resolvent_solve(bundle: &EulerOperatorBundle, h: f64, v: &TorusField, tol: f64) -> Result<ResolventSolution> {
    bundle.check(v)?;
    if !h.is_finite() {
        return Err(Error::InvalidInput(format!("h must be finite, got {h}")));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidInput(format!("tol must lie in (0, 1), got {tol}")));
    }
    let div_v = max_divergence(v)?;
    if div_v > div_tolerance(v, 1e-8) {
        return Err(Error::Precondition(format!("right-hand side has divergence {div_v:.3e}")));
    }
    let (d, n) = (bundle.dim(), bundle.n_modes());
    let (field, iterations) = if h == 0.0 {
        (v.clone(), 0)
    } else {
        let apply = |x: &[f64]| -> Result<Vec<f64>> {
            let u = TorusField::new(d, n, d, x.to_vec())?;
            Ok(u.axpy(-h, &extended_generator(bundle, &u)?)?.samples().to_vec())
        };
        let out = gmres(apply, v.samples(), tol, GMRES_RESTART, GMRES_MAX_ITER)?;
        (TorusField::new(d, n, d, out.x)?, out.iterations)
    };
    let v_norm = v.norm();
    let lhs = field.axpy(-h, &extended_generator(bundle, &field)?)?;
    let relative_residual = if v_norm == 0.0 { lhs.norm() } else { lhs.sub(v)?.norm() / v_norm };
    let max_divergence = max_divergence(&field)?;
    Ok(ResolventSolution {
        field,
        iterations,
        relative_residual,
        max_divergence,
        solenoidal: max_divergence <= 10.0 * tol,
    })
}
