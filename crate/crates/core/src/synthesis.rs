//! Least-squares synthesis of mode-mixing coefficients from beam targets.
//!
//! Each allowed mode m contributes a basis pattern B_m(phi) — the far field
//! of the unit phase-mode excitation, sampled on the horizon theta = pi/2 —
//! and the synthesizer solves the ridge-regularized least-squares problem
//!
//! ```text
//! min_c  sum_k | sum_m c_m * B_m(phi_k) - t_k |^2  +  ridge * ||c||^2
//! ```
//!
//! through the normal equations (A^H A + ridge*I) c = A^H t with a direct
//! dense solve: the systems are tiny (at most one column per element), and
//! a direct solve keeps results deterministic. Element patterns enter
//! through B_m, so a synthesized spectrum already accounts for the element
//! model it was built against.
//!
//! Targets prescribe complex field level (linear, not power), which keeps
//! the problem linear in the coefficients. Beam placement is verified a
//! posteriori by pattern inspection (see `farfield::find_beam_peaks`)
//! rather than folded into the optimization.

use num_complex::Complex;

use crate::elements::ElementPattern;
use crate::error::{Error, Result};
use crate::farfield::total_field;
use crate::geometry::{wrap_angle, ArrayGeometry, Direction};
use crate::linalg::solve_complex;
use crate::modes::{phase_mode_excitation, ModeSpectrum};
use crate::scalar::{real, Scalar};

/// Default Tikhonov weight: heavy enough to keep near-rank-deficient
/// problems solvable, light enough to leave well-posed fits untouched.
pub const DEFAULT_RIDGE: f64 = 1.0e-6;

/// Preset spectra accepted by [`preset`].
pub const PRESET_NAMES: [&str; 4] = ["broadcast", "unicast-a", "unicast-b", "multicast-120"];

/// One azimuth the synthesized pattern should serve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamTarget<T> {
    /// Azimuth in radians; wrapped into [0, 2*pi) by the problem builder.
    pub azimuth: T,
    /// Desired relative field level (linear).
    pub level: T,
}

impl<T: Scalar> BeamTarget<T> {
    pub fn new(azimuth: T, level: T) -> Self {
        Self { azimuth, level }
    }

    /// Target with unit level.
    pub fn unit(azimuth: T) -> Self {
        Self {
            azimuth,
            level: T::one(),
        }
    }
}

/// A validated synthesis problem bound to a geometry and element model.
#[derive(Debug, Clone)]
pub struct SynthesisProblem<'a, T: Scalar> {
    geometry: &'a ArrayGeometry<T>,
    model: &'a ElementPattern<T>,
    targets: Vec<BeamTarget<T>>,
    modes: Vec<i32>,
    ridge: T,
}

impl<'a, T: Scalar> SynthesisProblem<'a, T> {
    /// Validates targets (non-empty, finite, pairwise-distinct azimuths
    /// after wrapping), the mode set (non-empty, in the array's window,
    /// duplicate-free; stored sorted), and the ridge weight (finite,
    /// non-negative).
    pub fn new(
        geometry: &'a ArrayGeometry<T>,
        model: &'a ElementPattern<T>,
        targets: Vec<BeamTarget<T>>,
        modes: Vec<i32>,
        ridge: T,
    ) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidArgument(
                "synthesis needs at least one beam target".into(),
            ));
        }
        let targets: Vec<BeamTarget<T>> = targets
            .into_iter()
            .map(|t| {
                if !(t.azimuth.is_finite() && t.level.is_finite()) {
                    return Err(Error::InvalidArgument(format!(
                        "beam target must be finite, got azimuth {} level {}",
                        t.azimuth, t.level
                    )));
                }
                Ok(BeamTarget::new(wrap_angle(t.azimuth), t.level))
            })
            .collect::<Result<_>>()?;
        for (i, a) in targets.iter().enumerate() {
            for b in &targets[i + 1..] {
                // circular separation; wrapping is not bit-exact, so angles
                // closer than 1e-12 rad count as the same target
                let gap = (a.azimuth - b.azimuth).abs();
                if gap.min(T::TAU() - gap) < real(1.0e-12) {
                    return Err(Error::InvalidArgument(format!(
                        "duplicate target azimuth {} rad",
                        a.azimuth
                    )));
                }
            }
        }
        if modes.is_empty() {
            return Err(Error::InvalidArgument(
                "synthesis needs a non-empty mode set".into(),
            ));
        }
        let mut modes = modes;
        modes.sort_unstable();
        if modes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("duplicate mode in mode set".into()));
        }
        for &m in &modes {
            geometry.check_mode(m)?;
        }
        if !(ridge.is_finite() && ridge >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "ridge must be finite and non-negative, got {ridge}"
            )));
        }
        Ok(Self {
            geometry,
            model,
            targets,
            modes,
            ridge,
        })
    }

    /// Problem over the symmetric mode palette -s..=s (the widest set that
    /// excludes the self-aliasing Nyquist mode) with the default ridge.
    pub fn with_default_modes(
        geometry: &'a ArrayGeometry<T>,
        model: &'a ElementPattern<T>,
        targets: Vec<BeamTarget<T>>,
    ) -> Result<Self> {
        let modes = symmetric_mode_set(geometry);
        Self::new(geometry, model, targets, modes, real(DEFAULT_RIDGE))
    }

    pub fn targets(&self) -> &[BeamTarget<T>] {
        &self.targets
    }

    /// Mode set in ascending order.
    pub fn modes(&self) -> &[i32] {
        &self.modes
    }

    pub fn ridge(&self) -> T {
        self.ridge
    }

    pub fn set_ridge(&mut self, ridge: T) -> Result<()> {
        if !(ridge.is_finite() && ridge >= T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "ridge must be finite and non-negative, got {ridge}"
            )));
        }
        self.ridge = ridge;
        Ok(())
    }
}

/// Widest mode set symmetric about zero for this array. For even element
/// counts this drops the Nyquist mode +N/2, whose pattern cannot be told
/// apart from -N/2 on the array.
pub fn symmetric_mode_set<T: Scalar>(geometry: &ArrayGeometry<T>) -> Vec<i32> {
    let (lo_exclusive, hi_inclusive) = geometry.mode_bounds();
    let s = (-lo_exclusive - 1).min(hi_inclusive);
    (-s..=s).collect()
}

/// Result of a synthesis run: the spectrum plus fit metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisOutcome<T> {
    /// Minimizing mode spectrum over the problem's mode set.
    pub spectrum: ModeSpectrum<T>,
    /// Euclidean norm of the data residual |A c - t| (ridge term excluded).
    pub misfit: T,
    /// True when there are more targets than modes: the palette cannot in
    /// general hit every requested level, only balance the errors.
    pub underdetermined: bool,
}

/// Solves the regularized least-squares problem. Deterministic: one dense
/// direct solve of the normal equations.
///
/// With `ridge = 0` a rank-deficient system (e.g. fewer targets than
/// modes) is reported as a singular-system error suggesting a positive
/// ridge rather than silently picking one of the infinitely many minima.
pub fn synthesize<T: Scalar>(problem: &SynthesisProblem<'_, T>) -> Result<SynthesisOutcome<T>> {
    let geometry = problem.geometry;
    let basis: Vec<_> = problem
        .modes
        .iter()
        .map(|&m| phase_mode_excitation(geometry, m))
        .collect();
    let horizon = T::FRAC_PI_2();
    let n_targets = problem.targets.len();
    let n_modes = problem.modes.len();
    // a[k][j] = B_{modes[j]}(phi_k)
    let mut a = vec![vec![Complex::new(T::zero(), T::zero()); n_modes]; n_targets];
    for (k, target) in problem.targets.iter().enumerate() {
        let direction = Direction::new(horizon, target.azimuth)?;
        for (j, excitation) in basis.iter().enumerate() {
            a[k][j] = total_field(geometry, problem.model, excitation, direction)?;
        }
    }
    // normal equations: (A^H A + ridge I) c = A^H t
    let mut gram = vec![vec![Complex::new(T::zero(), T::zero()); n_modes]; n_modes];
    let mut rhs = vec![Complex::new(T::zero(), T::zero()); n_modes];
    for p in 0..n_modes {
        for q in 0..n_modes {
            let mut sum = Complex::new(T::zero(), T::zero());
            for row in &a {
                sum = sum + row[p].conj() * row[q];
            }
            if p == q {
                sum = sum + Complex::new(problem.ridge, T::zero());
            }
            gram[p][q] = sum;
        }
        for (row, target) in a.iter().zip(&problem.targets) {
            rhs[p] = rhs[p] + row[p].conj() * target.level;
        }
    }
    let coefficients = solve_complex(gram, rhs)?;
    let mut misfit_sq = T::zero();
    for (row, target) in a.iter().zip(&problem.targets) {
        let mut achieved = Complex::new(T::zero(), T::zero());
        for (value, c) in row.iter().zip(&coefficients) {
            achieved = achieved + value * c;
        }
        misfit_sq = misfit_sq + (achieved - Complex::new(target.level, T::zero())).norm_sqr();
    }
    let spectrum = ModeSpectrum::from_pairs(
        problem
            .modes
            .iter()
            .copied()
            .zip(coefficients.iter().copied()),
    )?;
    Ok(SynthesisOutcome {
        spectrum,
        misfit: misfit_sq.sqrt(),
        underdetermined: n_targets > n_modes,
    })
}

/// Named stock spectra.
///
/// * `"broadcast"` — the single uniform mode {0: 1}.
/// * `"unicast-a"` — unit coefficients across the symmetric mode palette;
///   all modes agree in phase at azimuth zero, forming one beam there.
/// * `"unicast-b"` — raised-cosine taper cos^2(pi*m/12) over the same
///   palette: a gentler beam with lower shoulders than unicast-a.
/// * `"multicast-120"` — three equal beams at 0, 120, and 240 degrees,
///   synthesized live against the supplied geometry and element model.
pub fn preset<T: Scalar>(
    name: &str,
    geometry: &ArrayGeometry<T>,
    model: &ElementPattern<T>,
) -> Result<ModeSpectrum<T>> {
    let unit = |m: i32| (m, Complex::new(T::one(), T::zero()));
    match name {
        "broadcast" => ModeSpectrum::from_pairs([unit(0)]),
        "unicast-a" => ModeSpectrum::from_pairs(symmetric_mode_set(geometry).into_iter().map(unit)),
        "unicast-b" => ModeSpectrum::from_pairs(symmetric_mode_set(geometry).into_iter().map(|m| {
            let angle = T::PI() * real::<T>(m as f64) / real::<T>(12.0);
            let taper = angle.cos().powi(2);
            (m, Complex::new(taper, T::zero()))
        })),
        "multicast-120" => {
            let third = T::TAU() / real::<T>(3.0);
            let targets = (0..3)
                .map(|k| BeamTarget::unit(real::<T>(k as f64) * third))
                .collect();
            let problem = SynthesisProblem::with_default_modes(geometry, model, targets)?;
            Ok(synthesize(&problem)?.spectrum)
        }
        _ => Err(Error::UnknownPreset {
            name: name.to_string(),
            valid: PRESET_NAMES.join(", "),
        }),
    }
}
