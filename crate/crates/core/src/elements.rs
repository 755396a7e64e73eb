//! Analytic element-gain models.
//!
//! Amplitude gain g(u) >= 0 of one radiator with unit boresight b, evaluated
//! toward unit direction u:
//!
//! ```text
//! isotropic           g = 1
//! cosine_boresight    g = max(0, u.b)^q_radial
//! dual_lobe           g = max(0, u.b)^q_radial + beta * max(0, u.z)^q_zenith
//! ```
//!
//! The dual-lobe model is a stand-in for a printed patch on a cylindrical
//! mount: a radial main lobe plus a weaker upward lobe. `beta` trades
//! main-lobe directivity against zenith leakage; the default 0.25 is tuned
//! so the stock mode presets land in their documented directivity bands.
//! All gains are amplitude (field) factors, not power.

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Tolerance on |v| - 1 when validating unit vectors (loose enough for f32).
const UNIT_NORM_TOL: f64 = 1.0e-5;

/// Element amplitude-gain model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementPattern<T> {
    /// Unit gain in every direction.
    Isotropic,
    /// Single lobe about the boresight: max(0, u.b)^q_radial.
    CosineBoresight { q_radial: T },
    /// Radial lobe plus a beta-weighted zenith lobe.
    DualLobe { q_radial: T, q_zenith: T, beta: T },
}

impl<T: Scalar> Default for ElementPattern<T> {
    /// Dual-lobe model with q_radial = 1, q_zenith = 1, beta = 0.25.
    fn default() -> Self {
        Self::DualLobe {
            q_radial: T::one(),
            q_zenith: T::one(),
            beta: real(0.25),
        }
    }
}

fn check_exponent<T: Scalar>(name: &str, value: T) -> Result<()> {
    if !value.is_finite() || value < T::zero() {
        return Err(Error::InvalidArgument(format!(
            "{name} must be finite and non-negative, got {value}"
        )));
    }
    Ok(())
}

impl<T: Scalar> ElementPattern<T> {
    pub fn isotropic() -> Self {
        Self::Isotropic
    }

    /// Cosine-power lobe about the boresight; `q_radial >= 0`.
    pub fn cosine_boresight(q_radial: T) -> Result<Self> {
        check_exponent("q_radial", q_radial)?;
        Ok(Self::CosineBoresight { q_radial })
    }

    /// Dual-lobe model; all parameters must be finite and non-negative.
    pub fn dual_lobe(q_radial: T, q_zenith: T, beta: T) -> Result<Self> {
        check_exponent("q_radial", q_radial)?;
        check_exponent("q_zenith", q_zenith)?;
        check_exponent("beta", beta)?;
        Ok(Self::DualLobe {
            q_radial,
            q_zenith,
            beta,
        })
    }

    /// Amplitude gain toward `direction` for an element pointing along
    /// `boresight`. Both arguments must be unit vectors.
    pub fn gain(&self, boresight: [T; 3], direction: [T; 3]) -> Result<T> {
        for (name, v) in [("boresight", &boresight), ("direction", &direction)] {
            let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if (norm - T::one()).abs() > real(UNIT_NORM_TOL) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be a unit vector, got norm {norm}"
                )));
            }
        }
        Ok(self.gain_unchecked(boresight, direction))
    }

    /// Gain without the unit-norm checks; hot path for grid evaluation
    /// where both vectors are constructed normalized.
    pub(crate) fn gain_unchecked(&self, boresight: [T; 3], direction: [T; 3]) -> T {
        match *self {
            Self::Isotropic => T::one(),
            Self::CosineBoresight { q_radial } => {
                let along = boresight[0] * direction[0]
                    + boresight[1] * direction[1]
                    + boresight[2] * direction[2];
                cos_power(along, q_radial)
            }
            Self::DualLobe {
                q_radial,
                q_zenith,
                beta,
            } => {
                let along = boresight[0] * direction[0]
                    + boresight[1] * direction[1]
                    + boresight[2] * direction[2];
                cos_power(along, q_radial) + beta * cos_power(direction[2], q_zenith)
            }
        }
    }
}

/// max(0, c)^q with the exact fast path for the default exponent q = 1.
fn cos_power<T: Scalar>(cos: T, q: T) -> T {
    let clamped = cos.max(T::zero());
    if q == T::one() {
        clamped
    } else {
        clamped.powf(q)
    }
}
