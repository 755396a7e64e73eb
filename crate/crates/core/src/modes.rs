//! Mode-domain excitations: phase modes, OAM charges, mixing, decomposition,
//! and azimuth steering.
//!
//! Feeding element n of an N-element circle with the m-th phase mode means
//!
//! ```text
//! w_n = exp(i*m*phi_n) / N,        phi_n = 2*pi*n/N
//! ```
//!
//! under the global exp(+i*omega*t) time convention (outgoing waves carry
//! exp(-i*k*R)). A spectrum {c_m} mixes linearly, and the inverse discrete
//! transform over the circle recovers it:
//!
//! ```text
//! w_n = sum_m c_m exp(i*m*phi_n) / N,
//! c_m = sum_n w_n exp(-i*m*phi_n).
//! ```
//!
//! Distinct modes live in the aliasing-free window (-N/2, N/2]; index m + N
//! produces bit-identical weights to m because the phases are reduced mod N
//! before evaluation. Steering multiplies c_m by exp(-i*m*phi0), which
//! rotates every mode lobe by +phi0 in azimuth.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::ArrayGeometry;
use crate::scalar::{real, Scalar};

/// exp(i * 2*pi * numerator / n) with the phase reduced mod n first, so
/// aliased mode indices produce bit-identical values.
fn unit_root<T: Scalar>(numerator: i64, n: usize) -> Complex<T> {
    let reduced = numerator.rem_euclid(n as i64) as f64;
    let angle = T::TAU() * real::<T>(reduced) / real::<T>(n as f64);
    Complex::from_polar(T::one(), angle)
}

/// Per-element complex feed weights.
#[derive(Debug, Clone, PartialEq)]
pub struct ExcitationVector<T> {
    weights: Vec<Complex<T>>,
}

impl<T: Scalar> ExcitationVector<T> {
    /// Wraps raw weights; the vector must be non-empty and all-finite.
    pub fn from_weights(weights: Vec<Complex<T>>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument(
                "excitation must have at least one weight".into(),
            ));
        }
        if let Some(i) = weights
            .iter()
            .position(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(Error::InvalidArgument(format!(
                "excitation weight {i} is not finite"
            )));
        }
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[Complex<T>] {
        &self.weights
    }

    /// Total feed power sum |w_n|^2.
    pub fn power(&self) -> T {
        self.weights
            .iter()
            .fold(T::zero(), |acc, w| acc + w.norm_sqr())
    }
}

/// Sparse complex mode coefficients keyed by integer mode index.
///
/// Ordered by index, so iteration and serialization are deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum<T> {
    coefficients: BTreeMap<i32, Complex<T>>,
}

impl<T> Default for ModeSpectrum<T> {
    fn default() -> Self {
        Self {
            coefficients: BTreeMap::new(),
        }
    }
}

impl<T: Scalar> ModeSpectrum<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a spectrum from (mode, coefficient) pairs. Duplicate indices
    /// and non-finite coefficients are rejected.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i32, Complex<T>)>) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        for (m, c) in pairs {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "coefficient of mode {m} is not finite"
                )));
            }
            if coefficients.insert(m, c).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate mode index {m}"
                )));
            }
        }
        Ok(Self { coefficients })
    }

    /// Sets one coefficient, replacing any previous value for the index.
    pub fn set(&mut self, index: i32, coefficient: Complex<T>) {
        debug_assert!(
            coefficient.re.is_finite() && coefficient.im.is_finite(),
            "mode coefficients must be finite"
        );
        self.coefficients.insert(index, coefficient);
    }

    /// Coefficient at `index`, zero when absent.
    pub fn coefficient(&self, index: i32) -> Complex<T> {
        self.coefficients
            .get(&index)
            .copied()
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// (index, coefficient) pairs in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex<T>)> + '_ {
        self.coefficients.iter().map(|(&m, &c)| (m, c))
    }

    /// Stored indices in ascending order.
    pub fn indices(&self) -> impl Iterator<Item = i32> + '_ {
        self.coefficients.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> T {
        self.coefficients
            .values()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr())
            .sqrt()
    }
}

/// Single phase-mode excitation w_n = exp(i*m*phi_n) / N.
///
/// Any integer index is accepted; m and m + N yield bit-identical weights.
pub fn phase_mode_excitation<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    mode: i32,
) -> ExcitationVector<T> {
    let n = geometry.n_elements();
    let scale = T::one() / real::<T>(n as f64);
    let weights = (0..n)
        .map(|idx| unit_root::<T>(mode as i64 * idx as i64, n) * scale)
        .collect();
    ExcitationVector { weights }
}

/// OAM excitation of topological charge l — the same feed law as
/// [`phase_mode_excitation`], kept as a separate entry point because azimuth
/// beam encoding (m) and vortex encoding (l) are distinct uses of it.
pub fn oam_excitation<T: Scalar>(geometry: &ArrayGeometry<T>, charge: i32) -> ExcitationVector<T> {
    phase_mode_excitation(geometry, charge)
}

/// Mixes a mode spectrum into per-element weights:
/// w_n = sum_m c_m exp(i*m*phi_n) / N.
///
/// Every index must lie in the aliasing-free window of the array.
pub fn mix_modes<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    spectrum: &ModeSpectrum<T>,
) -> Result<ExcitationVector<T>> {
    for m in spectrum.indices() {
        geometry.check_mode(m)?;
    }
    let n = geometry.n_elements();
    let scale = T::one() / real::<T>(n as f64);
    let weights = (0..n)
        .map(|idx| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (m, c) in spectrum.iter() {
                acc = acc + c * unit_root::<T>(m as i64 * idx as i64, n);
            }
            acc * scale
        })
        .collect();
    Ok(ExcitationVector { weights })
}

/// Projects an excitation onto the mode basis:
/// c_m = sum_n w_n exp(-i*m*phi_n) for every m in the window.
///
/// The result carries all N window modes, including numerically tiny ones,
/// so `mix_modes` of the result reproduces the input exactly up to rounding.
pub fn mode_decompose<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    excitation: &ExcitationVector<T>,
) -> Result<ModeSpectrum<T>> {
    let n = geometry.n_elements();
    if excitation.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: excitation.len(),
        });
    }
    let (lo_exclusive, hi_inclusive) = geometry.mode_bounds();
    let mut spectrum = ModeSpectrum::new();
    for m in (lo_exclusive + 1)..=hi_inclusive {
        let mut acc = Complex::new(T::zero(), T::zero());
        for (idx, w) in excitation.weights().iter().enumerate() {
            acc = acc + w * unit_root::<T>(-(m as i64) * idx as i64, n);
        }
        spectrum.set(m, acc);
    }
    Ok(spectrum)
}

/// Steers a spectrum so every mode lobe rotates by +phi0 in azimuth:
/// c_m <- c_m * exp(-i*m*phi0).
pub fn steer<T: Scalar>(spectrum: &ModeSpectrum<T>, phi0: T) -> ModeSpectrum<T> {
    let mut steered = ModeSpectrum::new();
    for (m, c) in spectrum.iter() {
        let phase = -real::<T>(m as f64) * phi0;
        steered.set(m, c * Complex::from_polar(T::one(), phase));
    }
    steered
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ArrayGeometry;
    use approx::assert_relative_eq;

    const EPS: f64 = 1.0e-14;

    fn reference() -> ArrayGeometry<f64> {
        ArrayGeometry::reference_28ghz().unwrap()
    }

    fn cdist(a: Complex<f64>, b: Complex<f64>) -> f64 {
        (a - b).norm()
    }

    #[test]
    fn mode_zero_is_uniform() {
        let w = phase_mode_excitation(&reference(), 0);
        for weight in w.weights() {
            assert_eq!(*weight, Complex::new(1.0 / 12.0, 0.0));
        }
    }

    #[test]
    fn mode_one_matches_thirty_degree_steps() {
        let w = phase_mode_excitation(&reference(), 1);
        for (n, weight) in w.weights().iter().enumerate() {
            let expect = Complex::from_polar(1.0 / 12.0, std::f64::consts::PI * n as f64 / 6.0);
            assert!(cdist(*weight, expect) < EPS, "element {n}");
        }
    }

    #[test]
    fn oam_two_matches_sixty_degree_steps() {
        let w = oam_excitation(&reference(), 2);
        for (n, weight) in w.weights().iter().enumerate() {
            let expect = Complex::from_polar(1.0 / 12.0, std::f64::consts::PI * n as f64 / 3.0);
            assert!(cdist(*weight, expect) < EPS, "element {n}");
        }
    }

    #[test]
    fn nonzero_modes_sum_to_zero() {
        let geom = reference();
        for l in 1..12 {
            let total: Complex<f64> = phase_mode_excitation(&geom, l)
                .weights()
                .iter()
                .sum();
            assert!(total.norm() < EPS, "charge {l}, sum {total}");
        }
    }

    #[test]
    fn aliasing_is_bit_exact() {
        let geom = reference();
        for m in -6..=6 {
            let base = phase_mode_excitation(&geom, m);
            let aliased = phase_mode_excitation(&geom, m + 12);
            assert_eq!(base.weights(), aliased.weights(), "mode {m}");
        }
        // Nyquist mode is its own alias
        let six = phase_mode_excitation(&geom, 6);
        let minus_six = phase_mode_excitation(&geom, -6);
        assert_eq!(six.weights(), minus_six.weights());
        for (n, w) in six.weights().iter().enumerate() {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(cdist(*w, Complex::new(sign / 12.0, 0.0)) < EPS);
        }
    }

    #[test]
    fn orthogonality_over_the_window() {
        for m in -5..=6_i64 {
            for mp in -5..=6_i64 {
                let sum: Complex<f64> = (0..12)
                    .map(|n| unit_root::<f64>((m - mp) * n as i64, 12))
                    .sum();
                let expect = if m == mp { 12.0 } else { 0.0 };
                assert!(
                    cdist(sum, Complex::new(expect, 0.0)) < 1.0e-10,
                    "m {m}, m' {mp}, sum {sum}"
                );
            }
        }
    }

    #[test]
    fn decompose_inverts_single_modes() {
        let geom = reference();
        for m in -5..=6 {
            let spectrum = mode_decompose(&geom, &phase_mode_excitation(&geom, m)).unwrap();
            for mp in -5..=6 {
                let expect = if m == mp { 1.0 } else { 0.0 };
                assert!(
                    cdist(spectrum.coefficient(mp), Complex::new(expect, 0.0)) < 1.0e-12,
                    "excited {m}, read {mp}"
                );
            }
        }
    }

    #[test]
    fn decompose_folds_aliased_excitations() {
        let geom = reference();
        // weights built for m = 7 by hand decompose to the alias m = -5
        let weights = (0..12)
            .map(|n| Complex::from_polar(1.0 / 12.0, 7.0 * std::f64::consts::TAU * n as f64 / 12.0))
            .collect();
        let spectrum =
            mode_decompose(&geom, &ExcitationVector::from_weights(weights).unwrap()).unwrap();
        assert!(cdist(spectrum.coefficient(-5), Complex::new(1.0, 0.0)) < 1.0e-12);
        assert!(spectrum.coefficient(5).norm() < 1.0e-12);
    }

    #[test]
    fn mix_then_decompose_round_trips() {
        let geom = reference();
        let spectrum = ModeSpectrum::from_pairs([
            (-4, Complex::new(0.3, -1.1)),
            (0, Complex::new(1.0, 0.0)),
            (3, Complex::new(-0.2, 0.7)),
            (6, Complex::new(0.05, 0.4)),
        ])
        .unwrap();
        let back = mode_decompose(&geom, &mix_modes(&geom, &spectrum).unwrap()).unwrap();
        for m in -5..=6 {
            assert!(
                cdist(back.coefficient(m), spectrum.coefficient(m)) < 1.0e-13,
                "mode {m}"
            );
        }
    }

    #[test]
    fn cosine_pair_mixes_to_real_weights() {
        let geom = reference();
        let spectrum = ModeSpectrum::from_pairs([
            (1, Complex::new(0.5, 0.0)),
            (-1, Complex::new(0.5, 0.0)),
        ])
        .unwrap();
        let w = mix_modes(&geom, &spectrum).unwrap();
        for (n, weight) in w.weights().iter().enumerate() {
            let expect = (std::f64::consts::TAU * n as f64 / 12.0).cos() / 12.0;
            assert!(cdist(*weight, Complex::new(expect, 0.0)) < EPS, "element {n}");
        }
    }

    #[test]
    fn mix_rejects_out_of_window_indices() {
        let geom = reference();
        let spectrum = ModeSpectrum::from_pairs([(7, Complex::new(1.0, 0.0))]).unwrap();
        let err = mix_modes(&geom, &spectrum).unwrap_err();
        assert!(err.to_string().contains("mode 7 out of range"), "{err}");
        let spectrum = ModeSpectrum::from_pairs([(-6, Complex::new(1.0, 0.0))]).unwrap();
        assert!(mix_modes(&geom, &spectrum).is_err());
    }

    #[test]
    fn decompose_rejects_length_mismatch() {
        let geom = reference();
        let short =
            ExcitationVector::from_weights(vec![Complex::new(1.0, 0.0); 5]).unwrap();
        assert_eq!(
            mode_decompose(&geom, &short).unwrap_err(),
            Error::LengthMismatch {
                expected: 12,
                actual: 5
            }
        );
    }

    #[test]
    fn steer_phases_and_group_law() {
        let single = ModeSpectrum::from_pairs([(1, Complex::new(1.0, 0.0))]).unwrap();
        let quarter = steer(&single, std::f64::consts::FRAC_PI_2);
        assert!(cdist(quarter.coefficient(1), Complex::new(0.0, -1.0)) < EPS);

        let spectrum = ModeSpectrum::from_pairs([
            (-2, Complex::new(0.4, 0.1)),
            (5, Complex::new(-0.3, 0.9)),
        ])
        .unwrap();
        let identity = steer(&spectrum, 0.0);
        for m in [-2, 5] {
            assert_eq!(identity.coefficient(m), spectrum.coefficient(m));
        }
        let twice = steer(&steer(&spectrum, 0.7), 0.5);
        let once = steer(&spectrum, 1.2);
        for m in [-2, 5] {
            assert!(cdist(twice.coefficient(m), once.coefficient(m)) < 1.0e-12);
        }
    }

    #[test]
    fn spectrum_validation() {
        assert!(ModeSpectrum::from_pairs([
            (1, Complex::new(1.0_f64, 0.0)),
            (1, Complex::new(2.0, 0.0))
        ])
        .is_err());
        assert!(ModeSpectrum::from_pairs([(0, Complex::new(f64::NAN, 0.0))]).is_err());
        assert!(ExcitationVector::<f64>::from_weights(vec![]).is_err());
        assert!(
            ExcitationVector::from_weights(vec![Complex::new(f64::INFINITY, 0.0)]).is_err()
        );
    }

    #[test]
    fn power_and_norm() {
        let w = ExcitationVector::from_weights(vec![
            Complex::new(3.0_f64, 4.0),
            Complex::new(0.0, 1.0),
        ])
        .unwrap();
        assert_relative_eq!(w.power(), 26.0, epsilon = EPS);
        let s = ModeSpectrum::from_pairs([
            (0, Complex::new(3.0_f64, 0.0)),
            (2, Complex::new(0.0, 4.0)),
        ])
        .unwrap();
        assert_relative_eq!(s.norm(), 5.0, epsilon = EPS);
    }

    #[test]
    fn works_in_f32_too() {
        let geom = ArrayGeometry::<f32>::uniform_circular(
            12,
            19.38,
            crate::geometry::Frequency::from_gigahertz(28.0).unwrap(),
        )
        .unwrap();
        let w = phase_mode_excitation(&geom, 3);
        let spectrum = mode_decompose(&geom, &w).unwrap();
        assert!((spectrum.coefficient(3) - Complex::new(1.0_f32, 0.0)).norm() < 1.0e-6);
    }
}
