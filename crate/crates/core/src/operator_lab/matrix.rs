use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::rng::{normal, seeded};

pub const MAX_DIM: usize = 4096;

/// Dense real square matrix standing in for a finite-dimensional operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<f64>,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "operator matrix must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.nrows() == 0 || entries.nrows() > MAX_DIM {
            return Err(Error::InvalidInput(format!("operator dimension {} outside 1..={MAX_DIM}", entries.nrows())));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("operator matrix has non-finite entries".into()));
        }
        Ok(Self { entries })
    }

    pub fn from_row_slice(dim: usize, data: &[f64]) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::ShapeMismatch(format!("{} entries for a {dim}x{dim} matrix", data.len())));
        }
        Self::new(DMatrix::from_row_slice(dim, dim, data))
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim))
    }

    /// Random skew-symmetric matrix with standard normal upper triangle.
    pub fn random_skew(dim: usize, seed: u64) -> Result<Self> {
        let mut rng = seeded(seed);
        let mut m = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in (i + 1)..dim {
                let v = normal(&mut rng);
                m[(i, j)] = v;
                m[(j, i)] = -v;
            }
        }
        Self::new(m)
    }

    /// Builds the matrix of a linear map column by column from its action on basis vectors.
    pub fn assemble(dim: usize, apply: impl Fn(&[f64]) -> Result<Vec<f64>>) -> Result<Self> {
        let mut m = DMatrix::zeros(dim, dim);
        let mut e = vec![0.0; dim];
        for j in 0..dim {
            e[j] = 1.0;
            let col = apply(&e)?;
            if col.len() != dim {
                return Err(Error::ShapeMismatch(format!("operator returned {} entries, expected {dim}", col.len())));
            }
            m.set_column(j, &nalgebra::DVector::from_vec(col));
            e[j] = 0.0;
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (&self.entries * nalgebra::DVector::from_column_slice(u)).data.into()
    }

    /// `||Q^T Q - E||_F`.
    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.dim();
        (self.entries.transpose() * &self.entries - DMatrix::<f64>::identity(n, n)).norm()
    }

    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        (&self.entries - &other.entries).norm()
    }
}

/// Skewness diagnostics of a square matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SkewDefect {
    /// `||A + A^T||_F / max(1, ||A||_F)`.
    pub relative: f64,
    /// `max |(A u, u)| / ||u||^2` over 100 random probes.
    pub max_quadratic: f64,
}

pub fn skew_symmetry_defect(a: &OperatorMatrix) -> SkewDefect {
    let m = a.entries();
    let relative = (m + m.transpose()).norm() / m.norm().max(1.0);
    let mut rng = seeded(0x5eed);
    let n = a.dim();
    let mut max_quadratic: f64 = 0.0;
    for _ in 0..100 {
        let u = nalgebra::DVector::from_fn(n, |_, _| normal(&mut rng));
        let q = (m * &u).dot(&u) / u.norm_squared();
        max_quadratic = max_quadratic.max(q.abs());
    }
    SkewDefect { relative, max_quadratic }
}

fn condition_estimate(m: &DMatrix<f64>) -> f64 {
    let sv = m.singular_values();
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Reciprocal condition below which a system is treated as singular.
const SINGULAR_RCOND: f64 = 1e-13;

/// Solves `lhs * X = rhs`, failing when `lhs` is numerically singular.
fn solve(lhs: DMatrix<f64>, rhs: DMatrix<f64>) -> std::result::Result<DMatrix<f64>, f64> {
    let cond = condition_estimate(&lhs);
    if !cond.is_finite() || 1.0 / cond < SINGULAR_RCOND {
        return Err(cond);
    }
    lhs.lu().solve(&rhs).ok_or(f64::INFINITY)
}

/// Cayley transform `Q = (E + A)(E - A)^{-1}`.
///
/// The two factors commute, so `Q` is computed as `(E - A)^{-1}(E + A)` by
/// one LU solve.
pub fn cayley(a: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = a.dim();
    let e = DMatrix::<f64>::identity(n, n);
    let m = a.entries();
    let q = solve(&e - m, &e + m).map_err(|condition| Error::NonSkew { condition })?;
    OperatorMatrix::new(q)
}

/// Inverse Cayley transform `A = (Q - E)(Q + E)^{-1}`.
pub fn inverse_cayley(q: &OperatorMatrix) -> Result<OperatorMatrix> {
    let n = q.dim();
    let e = DMatrix::<f64>::identity(n, n);
    let m = q.entries();
    let a = solve(m + &e, m - &e).map_err(|condition| Error::OutOfRange { condition })?;
    OperatorMatrix::new(a)
}

/// The group `exp(t A)` by scaling and squaring.
pub fn orthogonal_group(a: &OperatorMatrix, t: f64) -> Result<OperatorMatrix> {
    OperatorMatrix::new((a.entries() * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(data: [f64; 4]) -> OperatorMatrix {
        OperatorMatrix::from_row_slice(2, &data).unwrap()
    }

    #[test]
    fn canonical_skew_has_zero_defect() {
        let d = skew_symmetry_defect(&m2([0.0, 1.0, -1.0, 0.0]));
        assert_eq!(d.relative, 0.0);
        assert!(d.max_quadratic < 1e-15);
    }

    #[test]
    fn identity_defect_is_two() {
        let d = skew_symmetry_defect(&OperatorMatrix::identity(3).unwrap());
        assert!((d.relative - 2.0).abs() < 1e-15);
        assert!((d.max_quadratic - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_square() {
        assert!(OperatorMatrix::new(DMatrix::zeros(2, 3)).is_err());
        assert!(OperatorMatrix::from_row_slice(2, &[1.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn cayley_of_zero_is_identity() {
        let q = cayley(&OperatorMatrix::new(DMatrix::zeros(4, 4)).unwrap()).unwrap();
        assert!(q.frobenius_distance(&OperatorMatrix::identity(4).unwrap()) < 1e-15);
    }

    #[test]
    fn cayley_of_canonical_2x2() {
        // (E + A) = [[1,1],[-1,1]], (E - A)^{-1} = [[1,1],[-1,1]] / 2,
        // product = [[0,2],[-2,0]] / 2
        let q = cayley(&m2([0.0, 1.0, -1.0, 0.0])).unwrap();
        assert!(q.frobenius_distance(&m2([0.0, 1.0, -1.0, 0.0])) < 1e-15);
    }

    #[test]
    fn inverse_cayley_of_quarter_turn() {
        // rotation by pi/2 in the (column-vector) convention Q = [[0,1],[-1,0]]:
        // Q - E = [[-1,1],[-1,-1]], (Q + E)^{-1} = [[1,-1],[1,1]] / 2
        // product = [[0,2],[-2,0]] / 2
        let a = inverse_cayley(&m2([0.0, 1.0, -1.0, 0.0])).unwrap();
        assert!(a.frobenius_distance(&m2([0.0, 1.0, -1.0, 0.0])) < 1e-15);
        let a = inverse_cayley(&OperatorMatrix::identity(3).unwrap()).unwrap();
        assert!(a.entries().norm() < 1e-15);
    }

    #[test]
    fn minus_identity_is_out_of_range() {
        let q = OperatorMatrix::new(-DMatrix::<f64>::identity(3, 3)).unwrap();
        assert!(matches!(inverse_cayley(&q), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn identity_is_not_cayley_admissible() {
        assert!(matches!(cayley(&OperatorMatrix::identity(3).unwrap()), Err(Error::NonSkew { .. })));
    }

    #[test]
    fn random_skew_roundtrip() {
        let a = OperatorMatrix::random_skew(20, 3).unwrap();
        let q = cayley(&a).unwrap();
        assert!(q.orthogonality_defect() < 1e-10);
        let back = inverse_cayley(&q).unwrap();
        assert!(back.frobenius_distance(&a) < 1e-10);
        assert!(skew_symmetry_defect(&back).relative < 1e-10);
    }

    #[test]
    fn exponential_of_skew_is_orthogonal() {
        let a = OperatorMatrix::random_skew(30, 8).unwrap();
        let g = orthogonal_group(&a, 0.7).unwrap();
        assert!(g.orthogonality_defect() < 1e-10);
    }

    #[test]
    fn assemble_recovers_matrix() {
        let a = OperatorMatrix::random_skew(6, 1).unwrap();
        let b = OperatorMatrix::assemble(6, |u| Ok(a.apply(u))).unwrap();
        assert_eq!(a, b);
    }
}
