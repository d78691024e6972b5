use crate::error::{Error, Result};

/// Normalizing constant of the bump `(s (s + 1))^4` on `[-1, 0]`: its integral is `B(5, 5) = 1/630`.
const BUMP_MASS_INV: f64 = 630.0;

/// Scaled mollifiers `beta_nu(s) = nu * beta(nu s)` and their tails
/// `theta_nu(t) = int_t^inf beta_nu(s) ds`.
///
/// The kernel is `beta(s) = 630 (s (s + 1))^4` on `[-1, 0]`: nonnegative,
/// unit mass and `C^3`, with a polynomial closed form for `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MollifierFamily {
    nu: f64,
}

impl MollifierFamily {
    pub fn new(nu: u32) -> Result<Self> {
        if nu == 0 {
            return Err(Error::InvalidInput("mollifier index nu must be positive".into()));
        }
        Ok(Self { nu: nu as f64 })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// The unscaled kernel `beta`.
    pub fn kernel(s: f64) -> f64 {
        if (-1.0..=0.0).contains(&s) {
            BUMP_MASS_INV * (s * (s + 1.0)).powi(4)
        } else {
            0.0
        }
    }

    pub fn beta(&self, s: f64) -> f64 {
        self.nu * Self::kernel(self.nu * s)
    }

    pub fn theta(&self, t: f64) -> f64 {
        let x = self.nu * t;
        if x <= -1.0 {
            1.0
        } else if x >= 0.0 {
            0.0
        } else {
            // int_x^0 630 (s^8 + 4 s^7 + 6 s^6 + 4 s^5 + s^4) ds
            let antiderivative =
                x.powi(9) / 9.0 + x.powi(8) / 2.0 + 6.0 * x.powi(7) / 7.0 + 2.0 * x.powi(6) / 3.0 + x.powi(5) / 5.0;
            (-BUMP_MASS_INV * antiderivative).clamp(0.0, 1.0)
        }
    }

    /// `theta_nu'(t) = -beta_nu(t)`.
    pub fn theta_derivative(&self, t: f64) -> f64 {
        -self.beta(t)
    }
}

/// Free-function form of [`MollifierFamily::theta`].
pub fn mollifier_theta(fam: &MollifierFamily, t: f64) -> f64 {
    fam.theta(t)
}

/// Free-function form of [`MollifierFamily::beta`].
pub fn mollifier_beta(fam: &MollifierFamily, s: f64) -> f64 {
    fam.beta(s)
}
