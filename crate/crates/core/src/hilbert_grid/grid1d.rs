use crate::error::{Error, Result};

/// Cell-centered samples of a function on `[0, 1]`.
///
/// Sample `i` sits at `x_i = (i + 1/2) / n_cells`; inner products use the
/// rectangle rule with weight `dx = 1 / n_cells`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction1D {
    values: Vec<f64>,
}

pub const MIN_CELLS: usize = 8;

impl GridFunction1D {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < MIN_CELLS {
            return Err(Error::InvalidInput(format!(
                "interval grid needs at least {MIN_CELLS} cells, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite sample at cell {i}")));
        }
        Ok(Self { values })
    }

    pub fn zeros(n_cells: usize) -> Result<Self> {
        Self::new(vec![0.0; n_cells])
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(n_cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let dx = 1.0 / n_cells as f64;
        Self::new((0..n_cells).map(|i| f((i as f64 + 0.5) * dx)).collect())
    }

    pub fn n_cells(&self) -> usize {
        self.values.len()
    }

    pub fn dx(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * factor).collect() }
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.n_cells() != other.n_cells() {
            return Err(Error::ShapeMismatch(format!(
                "interval grids with {} and {} cells",
                self.n_cells(),
                other.n_cells()
            )));
        }
        Ok(())
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + factor * b).collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
    }
}
