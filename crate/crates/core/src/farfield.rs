//! Far-field patterns, directivity, and beam-peak extraction.
//!
//! The array factor with per-element gains is
//!
//! ```text
//! F(u) = sum_n w_n * g_n(u) * exp(+i * k * (p_n . u))
//! ```
//!
//! under the global exp(+i*omega*t) convention, so the element phase advance
//! toward the observation direction is positive. Directivity integrates
//! |F|^2 over the sphere,
//!
//! ```text
//! D(u) = 4*pi * |F(u)|^2 / integral |F|^2 dOmega
//! ```
//!
//! with Gauss-Legendre quadrature in cos(theta) and a uniform midpoint grid
//! in phi — exact in azimuth for trigonometric polynomials far beyond the
//! array's mode content. Peak reports refine the best grid sample with a
//! quadratic fit in dB space, and [`find_beam_peaks`] hunts prominent lobes
//! along the theta = pi/2 cut.
//!
//! For a single phase mode on a circle, the continuous-ring limit
//!
//! ```text
//! F_m(pi/2, phi) -> i^m * J_m(ka) * exp(i*m*phi)
//! ```
//!
//! is exposed as [`bessel_mode_reference`]; the discrete N-element sum
//! differs from it only through aliasing orders m +- N.

use num_complex::Complex;
use rayon::prelude::*;

use crate::bessel::{bessel_j, MAX_VALIDATED_ARGUMENT, MAX_VALIDATED_ORDER};
use crate::elements::ElementPattern;
use crate::error::{Error, Result};
use crate::geometry::{wrap_angle, ArrayGeometry, Direction};
use crate::linalg::solve_real;
use crate::modes::ExcitationVector;
use crate::quad::gauss_legendre;
use crate::scalar::{real, Scalar};

/// Default number of polar samples (Gauss-Legendre nodes in cos(theta)).
pub const DEFAULT_N_THETA: usize = 181;
/// Default number of azimuth samples (uniform midpoint grid).
pub const DEFAULT_N_PHI: usize = 360;

/// Minimum grid density accepted by [`directivity`].
const MIN_N_THETA: usize = 91;
const MIN_N_PHI: usize = 180;

/// Relative floor applied before taking logarithms of |F|^2.
const DB_FLOOR_RATIO: f64 = 1.0e-30;

/// Complex far-field samples on a (theta, phi) product grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiationPattern<T> {
    theta: Vec<T>,
    phi: Vec<T>,
    /// values[i][j] = F(theta[i], phi[j])
    values: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> RadiationPattern<T> {
    /// Wraps precomputed samples. Grids must be non-empty, strictly
    /// increasing, with theta in [0, pi] and phi in [0, 2*pi); the value
    /// matrix must be theta-major with matching dimensions.
    pub fn from_samples(
        theta: Vec<T>,
        phi: Vec<T>,
        values: Vec<Vec<Complex<T>>>,
    ) -> Result<Self> {
        check_grid("theta", &theta, T::PI(), false)?;
        check_grid("phi", &phi, T::TAU(), true)?;
        if values.len() != theta.len() || values.iter().any(|row| row.len() != phi.len()) {
            return Err(Error::InvalidArgument(format!(
                "pattern values must form a {} x {} matrix",
                theta.len(),
                phi.len()
            )));
        }
        Ok(Self { theta, phi, values })
    }

    pub fn theta_samples(&self) -> &[T] {
        &self.theta
    }

    pub fn phi_samples(&self) -> &[T] {
        &self.phi
    }

    /// Theta-major sample matrix.
    pub fn values(&self) -> &[Vec<Complex<T>>] {
        &self.values
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phi.len()
    }

    /// Index of the polar row closest to `theta` (first on ties).
    pub fn theta_row_nearest(&self, theta: T) -> usize {
        let mut best = 0;
        let mut best_dist = (self.theta[0] - theta).abs();
        for (i, &t) in self.theta.iter().enumerate().skip(1) {
            let dist = (t - theta).abs();
            if dist < best_dist {
                best = i;
                best_dist = dist;
            }
        }
        best
    }
}

fn check_grid<T: Scalar>(name: &str, grid: &[T], upper: T, upper_open: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must not be empty"
        )));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid contains a non-finite sample"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must be strictly increasing"
        )));
    }
    let first = grid[0];
    let last = grid[grid.len() - 1];
    let in_range = first >= T::zero() && if upper_open { last < upper } else { last <= upper };
    if !in_range {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must stay within its domain, got [{first}, {last}]"
        )));
    }
    Ok(())
}

/// Directivity summary at one direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectivityReport<T> {
    /// Directivity in dBi at the reported direction.
    pub peak_dbi: T,
    /// Reported direction (refined peak or nearest grid sample).
    pub direction: Direction<T>,
    /// Quadrature of |F|^2 over the full sphere, steradian-weighted.
    pub total_radiated: T,
}

/// One beam found along the azimuth cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamPeak<T> {
    /// Refined beam direction.
    pub direction: Direction<T>,
    /// Absolute level in dBi at the refined azimuth.
    pub level_dbi: T,
}

/// Where [`directivity`] should evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DirectivityTarget<T> {
    /// Global sample maximum with sub-grid quadratic refinement.
    Peak,
    /// Fixed direction, evaluated at the nearest grid sample.
    At(Direction<T>),
}

/// Complex array factor toward one direction.
pub fn total_field<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    model: &ElementPattern<T>,
    excitation: &ExcitationVector<T>,
    direction: Direction<T>,
) -> Result<Complex<T>> {
    check_length(geometry, excitation)?;
    Ok(field_toward(
        geometry,
        model,
        excitation,
        direction.unit_vector(),
    ))
}

fn check_length<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    excitation: &ExcitationVector<T>,
) -> Result<()> {
    if excitation.len() != geometry.n_elements() {
        return Err(Error::LengthMismatch {
            expected: geometry.n_elements(),
            actual: excitation.len(),
        });
    }
    Ok(())
}

/// Hot path: superpose all element contributions toward unit vector `u`.
fn field_toward<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    model: &ElementPattern<T>,
    excitation: &ExcitationVector<T>,
    u: [T; 3],
) -> Complex<T> {
    let k = geometry.wavenumber();
    let mut acc = Complex::new(T::zero(), T::zero());
    for ((w, pos), bore) in excitation
        .weights()
        .iter()
        .zip(geometry.element_positions())
        .zip(geometry.element_boresights())
    {
        let gain = model.gain_unchecked(*bore, u);
        let phase = k * (pos[0] * u[0] + pos[1] * u[1] + pos[2] * u[2]);
        acc = acc + w * Complex::from_polar(gain, phase);
    }
    acc
}

/// Builds the default integration-ready grids: `n_theta` Gauss-Legendre
/// nodes mapped through theta = acos(x) onto (0, pi) in ascending order,
/// and `n_phi` uniform midpoint azimuths phi_j = (j + 1/2) * 2*pi / n_phi.
///
/// For odd `n_theta` the middle sample is exactly pi/2.
pub fn default_grids<T: Scalar>(n_theta: usize, n_phi: usize) -> (Vec<T>, Vec<T>) {
    assert!(n_theta >= 1 && n_phi >= 1, "grids need at least one sample");
    let (nodes, _) = gauss_legendre::<T>(n_theta);
    let theta = nodes
        .iter()
        .rev()
        .map(|&x| if x == T::zero() { T::FRAC_PI_2() } else { x.acos() })
        .collect();
    let step = T::TAU() / real::<T>(n_phi as f64);
    let phi = (0..n_phi)
        .map(|j| (real::<T>(j as f64) + real(0.5)) * step)
        .collect();
    (theta, phi)
}

/// Samples the pattern over a product grid; polar rows run in parallel and
/// the result is deterministic regardless of thread count.
pub fn sample_pattern<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    model: &ElementPattern<T>,
    excitation: &ExcitationVector<T>,
    theta_grid: &[T],
    phi_grid: &[T],
) -> Result<RadiationPattern<T>> {
    check_length(geometry, excitation)?;
    check_grid("theta", theta_grid, T::PI(), false)?;
    check_grid("phi", phi_grid, T::TAU(), true)?;
    let phi_trig: Vec<(T, T)> = phi_grid.iter().map(|p| (p.cos(), p.sin())).collect();
    let values: Vec<Vec<Complex<T>>> = theta_grid
        .par_iter()
        .map(|&theta| {
            let (st, ct) = (theta.sin(), theta.cos());
            phi_trig
                .iter()
                .map(|&(cp, sp)| field_toward(geometry, model, excitation, [st * cp, st * sp, ct]))
                .collect()
        })
        .collect();
    Ok(RadiationPattern {
        theta: theta_grid.to_vec(),
        phi: phi_grid.to_vec(),
        values,
    })
}

/// Per-row quadrature weights for the polar grid, with the sin(theta)
/// Jacobian folded in. Recognizes the Gauss-Legendre-in-cos(theta) layout
/// produced by [`default_grids`]; any other grid falls back to a
/// trapezoidal rule.
fn theta_weights<T: Scalar>(theta: &[T]) -> Vec<T> {
    let n = theta.len();
    let tol = real::<T>(1.0e-12).max(T::epsilon() * real(64.0));
    let (nodes, weights) = gauss_legendre::<T>(n);
    let is_gl = theta.iter().enumerate().all(|(i, &t)| {
        let node = nodes[n - 1 - i];
        let mapped = if node == T::zero() {
            T::FRAC_PI_2()
        } else {
            node.acos()
        };
        (t - mapped).abs() <= tol
    });
    if is_gl {
        // GL weights integrate d(cos theta) directly — Jacobian included.
        return (0..n).map(|i| weights[n - 1 - i]).collect();
    }
    (0..n)
        .map(|i| {
            let lo = if i == 0 { theta[0] } else { theta[i - 1] };
            let hi = if i == n - 1 { theta[n - 1] } else { theta[i + 1] };
            (hi - lo) * real::<T>(0.5) * theta[i].sin()
        })
        .collect()
}

/// Azimuth quadrature weights: uniform full-circle grids get the exact
/// periodic rectangle rule; anything else a trapezoidal rule.
fn phi_weights<T: Scalar>(phi: &[T]) -> Vec<T> {
    let m = phi.len();
    if m == 1 {
        return vec![T::TAU()];
    }
    let mean_step = (phi[m - 1] - phi[0]) / real::<T>((m - 1) as f64);
    let uniform = phi
        .windows(2)
        .all(|w| ((w[1] - w[0]) - mean_step).abs() <= real(1.0e-12));
    let full_circle = ((phi[m - 1] - phi[0] + mean_step) - T::TAU()).abs() <= real(1.0e-9);
    if uniform && full_circle {
        return vec![T::TAU() / real::<T>(m as f64); m];
    }
    (0..m)
        .map(|j| {
            let lo = if j == 0 { phi[0] } else { phi[j - 1] };
            let hi = if j == m - 1 { phi[m - 1] } else { phi[j + 1] };
            (hi - lo) * real::<T>(0.5)
        })
        .collect()
}

/// Integral of |F|^2 over the sphere for this pattern's grids.
fn radiated_power<T: Scalar>(pattern: &RadiationPattern<T>) -> T {
    let wt = theta_weights(&pattern.theta);
    let wp = phi_weights(&pattern.phi);
    let mut total = T::zero();
    for (row, &row_weight) in pattern.values.iter().zip(&wt) {
        let mut row_sum = T::zero();
        for (value, &col_weight) in row.iter().zip(&wp) {
            row_sum = row_sum + value.norm_sqr() * col_weight;
        }
        total = total + row_sum * row_weight;
    }
    total
}

fn to_dbi<T: Scalar>(norm_sq: T, total_radiated: T) -> T {
    let four_pi = real::<T>(2.0) * T::TAU();
    real::<T>(10.0) * (four_pi * norm_sq / total_radiated).log10()
}

/// Directivity report at the pattern peak or a fixed direction.
///
/// Requires a grid of at least 91 x 180 samples so the sphere quadrature is
/// trustworthy. "Peak" refines the strongest sample with a 3x3 quadratic
/// fit in dB space; a fixed direction reports the nearest grid sample.
pub fn directivity<T: Scalar>(
    pattern: &RadiationPattern<T>,
    target: DirectivityTarget<T>,
) -> Result<DirectivityReport<T>> {
    if pattern.n_theta() < MIN_N_THETA || pattern.n_phi() < MIN_N_PHI {
        return Err(Error::InvalidArgument(format!(
            "pattern grid too coarse for directivity: need at least {MIN_N_THETA} x {MIN_N_PHI} \
             samples, got {} x {}",
            pattern.n_theta(),
            pattern.n_phi()
        )));
    }
    let total = radiated_power(pattern);
    let mut max_sq = T::zero();
    let (mut i0, mut j0) = (0usize, 0usize);
    for (i, row) in pattern.values.iter().enumerate() {
        for (j, value) in row.iter().enumerate() {
            let sq = value.norm_sqr();
            if sq > max_sq {
                max_sq = sq;
                i0 = i;
                j0 = j;
            }
        }
    }
    if !(total > T::zero()) || !(max_sq > T::zero()) || !total.is_finite() {
        return Err(Error::DegeneratePattern(
            "pattern radiates no power (all samples are zero)".into(),
        ));
    }
    match target {
        DirectivityTarget::Peak => {
            let (theta, phi, gain_db) = refine_peak(pattern, i0, j0, max_sq);
            Ok(DirectivityReport {
                peak_dbi: to_dbi(max_sq, total) + gain_db,
                direction: Direction::new(theta, phi)?,
                total_radiated: total,
            })
        }
        DirectivityTarget::At(direction) => {
            let i = pattern.theta_row_nearest(direction.theta());
            let j = nearest_azimuth(&pattern.phi, direction.phi());
            let sq = pattern.values[i][j].norm_sqr();
            let floored = sq.max(max_sq * real(DB_FLOOR_RATIO));
            Ok(DirectivityReport {
                peak_dbi: to_dbi(floored, total),
                direction: Direction::new(pattern.theta[i], pattern.phi[j])?,
                total_radiated: total,
            })
        }
    }
}

/// Nearest azimuth sample in circular distance (first on ties).
fn nearest_azimuth<T: Scalar>(phi: &[T], target: T) -> usize {
    let mut best = 0;
    let mut best_dist = T::infinity();
    for (j, &p) in phi.iter().enumerate() {
        let raw = (p - target).abs();
        let dist = raw.min(T::TAU() - raw);
        if dist < best_dist {
            best = j;
            best_dist = dist;
        }
    }
    best
}

/// Quadratic refinement of the peak sample. Returns the refined (theta,
/// phi) and the fitted dB gain over the raw maximum (zero when the fit is
/// unusable, e.g. on degenerate stencils or non-concave fits).
fn refine_peak<T: Scalar>(
    pattern: &RadiationPattern<T>,
    i0: usize,
    j0: usize,
    max_sq: T,
) -> (T, T, T) {
    let n = pattern.n_theta();
    let m = pattern.n_phi();
    let center = (pattern.theta[i0], pattern.phi[j0]);
    if n < 3 || m < 3 {
        return (center.0, center.1, T::zero());
    }
    // 3x3 stencil: clamp the polar index into the interior, wrap azimuth.
    let ic = i0.clamp(1, n - 2);
    let floor = max_sq * real::<T>(DB_FLOOR_RATIO);
    let ten = real::<T>(10.0);
    let mut rows = Vec::with_capacity(9);
    let mut rhs = Vec::with_capacity(9);
    let mut x_range = (T::zero(), T::zero());
    let mut y_range = (T::zero(), T::zero());
    for di in -1i32..=1 {
        let i = (ic as i32 + di) as usize;
        let x = pattern.theta[i] - center.0;
        x_range = (x_range.0.min(x), x_range.1.max(x));
        for dj in -1i32..=1 {
            let j = (j0 as i32 + dj).rem_euclid(m as i32) as usize;
            let mut y = pattern.phi[j] - center.1;
            // unwrap azimuth offsets across the 0/2*pi seam
            if y > T::PI() {
                y = y - T::TAU();
            } else if y < -T::PI() {
                y = y + T::TAU();
            }
            y_range = (y_range.0.min(y), y_range.1.max(y));
            let ratio = (pattern.values[i][j].norm_sqr().max(floor)) / max_sq;
            let v = ten * ratio.log10();
            rows.push([x * x, y * y, x * y, x, y, T::one()]);
            rhs.push(v);
        }
    }
    // normal equations for v ~ a x^2 + b y^2 + c xy + d x + e y + f
    let mut ata = vec![vec![T::zero(); 6]; 6];
    let mut atb = vec![T::zero(); 6];
    for (row, &v) in rows.iter().zip(&rhs) {
        for p in 0..6 {
            for q in 0..6 {
                ata[p][q] = ata[p][q] + row[p] * row[q];
            }
            atb[p] = atb[p] + row[p] * v;
        }
    }
    let coef = match solve_real(ata, atb) {
        Ok(c) => c,
        Err(_) => return (center.0, center.1, T::zero()),
    };
    let (a, b, c, d, e, f) = (coef[0], coef[1], coef[2], coef[3], coef[4], coef[5]);
    let det = real::<T>(4.0) * a * b - c * c;
    let concave = a < T::zero() && det > T::zero();
    if !concave {
        return (center.0, center.1, T::zero());
    }
    let x_star = ((c * e - real::<T>(2.0) * b * d) / det).clamp(x_range.0, x_range.1);
    let y_star = ((c * d - real::<T>(2.0) * a * e) / det).clamp(y_range.0, y_range.1);
    let v_star = a * x_star * x_star
        + b * y_star * y_star
        + c * x_star * y_star
        + d * x_star
        + e * y_star
        + f;
    // the fit approximates dB relative to the raw max; never report a loss
    let gain_db = v_star.max(T::zero());
    let theta = (center.0 + x_star).clamp(T::zero(), T::PI());
    (theta, wrap_angle(center.1 + y_star), gain_db)
}

/// Finds prominent local maxima along the theta = pi/2 azimuth cut.
///
/// A sample qualifies when it is a circular local maximum whose topographic
/// prominence reaches `min_prominence_db` AND whose level lies within
/// `min_prominence_db` of the strongest sample in the cut — so shallow
/// ripple and deep sidelobes are both rejected. Each peak's azimuth is
/// refined with a three-point parabola; results are sorted by level,
/// strongest first.
pub fn find_beam_peaks<T: Scalar>(
    pattern: &RadiationPattern<T>,
    min_prominence_db: T,
) -> Result<Vec<BeamPeak<T>>> {
    if !min_prominence_db.is_finite() || min_prominence_db <= T::zero() {
        return Err(Error::InvalidArgument(format!(
            "min_prominence_db must be finite and positive, got {min_prominence_db}"
        )));
    }
    let m = pattern.n_phi();
    if m < 4 {
        return Err(Error::InvalidArgument(format!(
            "azimuth cut needs at least 4 samples for peak analysis, got {m}"
        )));
    }
    let total = radiated_power(pattern);
    let mut max_sq = T::zero();
    for row in &pattern.values {
        for value in row {
            max_sq = max_sq.max(value.norm_sqr());
        }
    }
    if !(total > T::zero()) || !(max_sq > T::zero()) || !total.is_finite() {
        return Err(Error::DegeneratePattern(
            "pattern radiates no power (all samples are zero)".into(),
        ));
    }
    let row = pattern.theta_row_nearest(T::FRAC_PI_2());
    let floor = max_sq * real::<T>(DB_FLOOR_RATIO);
    let levels: Vec<T> = pattern.values[row]
        .iter()
        .map(|v| to_dbi(v.norm_sqr().max(floor), total))
        .collect();
    let cut_max = levels
        .iter()
        .fold(T::neg_infinity(), |acc, &v| acc.max(v));

    let mut peaks = Vec::new();
    for j in 0..m {
        let left = levels[(j + m - 1) % m];
        let right = levels[(j + 1) % m];
        let here = levels[j];
        if !(here > left && here >= right) {
            continue;
        }
        if here < cut_max - min_prominence_db {
            continue;
        }
        if prominence(&levels, j) < min_prominence_db {
            continue;
        }
        peaks.push(refine_cut_peak(pattern, row, &levels, j));
    }
    peaks.sort_by(|p, q| {
        q.level_dbi
            .partial_cmp(&p.level_dbi)
            .expect("levels are finite")
            .then_with(|| {
                p.direction
                    .phi()
                    .partial_cmp(&q.direction.phi())
                    .expect("azimuths are finite")
            })
    });
    Ok(peaks)
}

/// Topographic prominence of sample `j` on a circular profile: height above
/// the best saddle reachable before strictly higher ground, or above the
/// global minimum when no higher ground exists.
fn prominence<T: Scalar>(levels: &[T], j: usize) -> T {
    let m = levels.len();
    let here = levels[j];
    let saddle = |step: usize| -> Option<T> {
        let mut lowest = here;
        let mut idx = (j + step) % m;
        while idx != j {
            if levels[idx] > here {
                return Some(lowest);
            }
            lowest = lowest.min(levels[idx]);
            idx = (idx + step) % m;
        }
        None
    };
    let left = saddle(m - 1);
    let right = saddle(1);
    match (left, right) {
        (Some(l), Some(r)) => here - l.max(r),
        // global maximum of the cut: prominence over the circle minimum
        _ => {
            let min = levels.iter().fold(here, |acc, &v| acc.min(v));
            here - min
        }
    }
}

/// Parabolic azimuth refinement through the peak sample and its two
/// circular neighbors.
fn refine_cut_peak<T: Scalar>(
    pattern: &RadiationPattern<T>,
    row: usize,
    levels: &[T],
    j: usize,
) -> BeamPeak<T> {
    let m = levels.len();
    let phi_c = pattern.phi[j];
    let mut x_l = pattern.phi[(j + m - 1) % m] - phi_c;
    let mut x_r = pattern.phi[(j + 1) % m] - phi_c;
    if x_l > T::zero() {
        x_l = x_l - T::TAU();
    }
    if x_r < T::zero() {
        x_r = x_r + T::TAU();
    }
    let y_c = levels[j];
    let y_l = levels[(j + m - 1) % m] - y_c;
    let y_r = levels[(j + 1) % m] - y_c;
    // quadratic y = A x^2 + B x through (x_l, y_l), (0, 0), (x_r, y_r)
    let denom = x_l * x_r * (x_l - x_r);
    let a = (x_r * y_l - x_l * y_r) / denom;
    let b = (x_l * x_l * y_r - x_r * x_r * y_l) / denom;
    let (offset, level) = if a < T::zero() {
        let x = (-b / (real::<T>(2.0) * a)).clamp(x_l, x_r);
        (x, y_c + a * x * x + b * x)
    } else {
        (T::zero(), y_c)
    };
    BeamPeak {
        direction: Direction::new(pattern.theta[row], wrap_angle(phi_c + offset))
            .expect("refined peak direction is valid"),
        level_dbi: level,
    }
}

/// Continuous-ring phase-mode reference i^m * J_m(ka) * exp(i*m*phi).
///
/// Validated for |m| <= 16 and 0 < ka <= 20; anything outside returns a
/// range error rather than silently degraded accuracy.
pub fn bessel_mode_reference<T: Scalar>(m: i32, ka: T, phi: T) -> Result<Complex<T>> {
    let ka_f64 = ka.to_f64().unwrap_or(f64::NAN);
    if m.abs() > MAX_VALIDATED_ORDER
        || !ka.is_finite()
        || ka <= T::zero()
        || ka_f64 > MAX_VALIDATED_ARGUMENT
    {
        return Err(Error::BesselRange {
            order: m,
            max_order: MAX_VALIDATED_ORDER,
            argument: ka_f64,
            max_argument: MAX_VALIDATED_ARGUMENT,
        });
    }
    let radial = bessel_j(m, ka);
    let i_power = match m.rem_euclid(4) {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    };
    Ok(i_power * Complex::from_polar(radial, real::<T>(m as f64) * phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Frequency;
    use crate::modes::{mix_modes, mode_decompose, phase_mode_excitation, steer, ModeSpectrum};
    use approx::assert_relative_eq;

    fn reference() -> ArrayGeometry<f64> {
        ArrayGeometry::reference_28ghz().unwrap()
    }

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn single_isotropic_element_is_zero_dbi() {
        let geom = ArrayGeometry::uniform_circular(
            1,
            1.0_f64,
            Frequency::from_gigahertz(28.0).unwrap(),
        )
        .unwrap();
        let w = ExcitationVector::from_weights(vec![c(1.0, 0.0)]).unwrap();
        let iso = ElementPattern::isotropic();
        for (theta_deg, phi_deg) in [(90.0, 0.0), (35.0, 123.0), (180.0, 0.0)] {
            let f = total_field(
                &geom,
                &iso,
                &w,
                Direction::from_degrees(theta_deg, phi_deg).unwrap(),
            )
            .unwrap();
            assert_relative_eq!(f.norm(), 1.0, epsilon = 1.0e-12);
        }
        let (theta, phi) = default_grids(91, 180);
        let pattern = sample_pattern(&geom, &iso, &w, &theta, &phi).unwrap();
        let report = directivity(&pattern, DirectivityTarget::Peak).unwrap();
        assert!(report.peak_dbi.abs() < 0.01, "got {} dBi", report.peak_dbi);
    }

    #[test]
    fn uniform_mode_ripple_stays_inside_the_aliasing_envelope() {
        // the 12-element ring is not a continuous ring: |F| carries a
        // cos(12 phi) ripple of two J_12 worth of amplitude, and exact
        // azimuth symmetry only under 30-degree steps
        let geom = reference();
        let iso = ElementPattern::isotropic();
        let w = phase_mode_excitation(&geom, 0);
        let ka = geom.ka();
        let flat = bessel_j(0, ka);
        let envelope = 2.0 * (bessel_j(12, ka).abs() + bessel_j(24, ka).abs()) + 1.0e-10;
        let sample = |phi_deg: f64| {
            total_field(&geom, &iso, &w, Direction::from_degrees(90.0, phi_deg).unwrap())
                .unwrap()
        };
        for j in 0..48 {
            let phi = 360.0 * j as f64 / 48.0;
            let f = sample(phi);
            assert!(
                (f.norm() - flat).abs() <= envelope,
                "phi {phi}: |F| = {} vs J_0 = {flat} (envelope {envelope:e})",
                f.norm()
            );
            // one-element rotation is an exact symmetry
            assert_relative_eq!(
                f.norm(),
                sample(phi + 30.0).norm(),
                epsilon = 1.0e-13
            );
        }
    }

    #[test]
    fn frozen_field_samples() {
        let geom = reference();
        let dir = Direction::from_degrees(90.0, 25.0).unwrap();
        let m2 = phase_mode_excitation(&geom, 2);

        let iso = total_field(&geom, &ElementPattern::isotropic(), &m2, dir).unwrap();
        assert!(
            (iso - c(0.11082724862724257, 0.12610027637477014)).norm() < 1.0e-14,
            "isotropic m=2 sample moved: {iso}"
        );

        let dual = total_field(&geom, &ElementPattern::default(), &m2, dir).unwrap();
        assert!(
            (dual - c(0.16579885869263089, 0.0043678676252482534)).norm() < 1.0e-14,
            "dual-lobe m=2 sample moved: {dual}"
        );

        let cophasal = ModeSpectrum::from_pairs(
            (-5..=5).map(|m| (m, c(1.0, 0.0))),
        )
        .unwrap();
        let w = mix_modes(&geom, &cophasal).unwrap();
        let f = total_field(
            &geom,
            &ElementPattern::default(),
            &w,
            Direction::from_degrees(60.0, 10.0).unwrap(),
        )
        .unwrap();
        assert!(
            (f - c(0.14662920055610004, -1.0123912875414176)).norm() < 1.0e-13,
            "cophasal sample moved: {f}"
        );
    }

    #[test]
    fn single_mode_cut_matches_ring_reference() {
        let geom = reference();
        let iso = ElementPattern::isotropic();
        let ka = geom.ka();
        for m in [-3, 1, 4] {
            let w = phase_mode_excitation(&geom, m);
            // first- and second-order aliases; at angles where all the
            // alias terms add coherently the second order is not optional
            let bound = bessel_j(m - 12, ka).abs()
                + bessel_j(m + 12, ka).abs()
                + bessel_j(m - 24, ka).abs()
                + bessel_j(m + 24, ka).abs()
                + 1.0e-10;
            for j in 0..36 {
                let phi = std::f64::consts::TAU * j as f64 / 36.0;
                let f = total_field(&geom, &iso, &w, Direction::new(
                    std::f64::consts::FRAC_PI_2,
                    phi,
                )
                .unwrap())
                .unwrap();
                let reference_value = bessel_mode_reference(m, ka, phi).unwrap();
                let residual = (f - reference_value).norm();
                assert!(
                    residual <= bound,
                    "mode {m}, phi {phi}: residual {residual:e} above bound {bound:e}"
                );
            }
        }
    }

    #[test]
    fn bessel_reference_examples_and_ranges() {
        let near_zero = bessel_mode_reference(0, 1.0e-12_f64, 0.0).unwrap();
        assert!((near_zero - c(1.0, 0.0)).norm() < 1.0e-9);

        let ka = 5.686446713559302_f64;
        let one = bessel_mode_reference(1, ka, 0.0).unwrap();
        assert!((one - c(0.0, -0.3257035032761276)).norm() < 1.0e-12); // i * J_1

        for m in [-4, 4] {
            let v = bessel_mode_reference(m, ka, 1.234).unwrap();
            assert_relative_eq!(v.norm(), bessel_j(4, ka).abs(), max_relative = 1.0e-12);
        }

        assert!(matches!(
            bessel_mode_reference(17, 5.0_f64, 0.0),
            Err(Error::BesselRange { .. })
        ));
        assert!(bessel_mode_reference(0, 25.0_f64, 0.0).is_err());
        assert!(bessel_mode_reference(0, 0.0_f64, 0.0).is_err());
        assert!(bessel_mode_reference(0, -1.0_f64, 0.0).is_err());
    }

    #[test]
    fn steered_pattern_is_the_rotated_pattern() {
        let geom = reference();
        let model = ElementPattern::<f64>::default();
        let spectrum = ModeSpectrum::from_pairs([
            (-2, c(0.4, -0.3)),
            (1, c(1.0, 0.2)),
            (3, c(-0.5, 0.8)),
        ])
        .unwrap();
        // 120 azimuth columns -> 3 deg step; 30 deg = 10 columns
        let (theta, phi) = default_grids(95, 120);
        let shift = 10usize;
        let phi0 = std::f64::consts::TAU * shift as f64 / 120.0;
        let base = sample_pattern(
            &geom,
            &model,
            &mix_modes(&geom, &spectrum).unwrap(),
            &theta,
            &phi,
        )
        .unwrap();
        let steered = sample_pattern(
            &geom,
            &model,
            &mix_modes(&geom, &steer(&spectrum, phi0)).unwrap(),
            &theta,
            &phi,
        )
        .unwrap();
        let mut worst = 0.0_f64;
        for i in 0..base.n_theta() {
            for j in 0..base.n_phi() {
                let rotated = base.values()[i][(j + 120 - shift) % 120];
                worst = worst.max((steered.values()[i][j] - rotated).norm());
            }
        }
        assert!(worst < 1.0e-9, "max rotation error {worst:e}");
    }

    #[test]
    fn dipole_pattern_hits_the_closed_form() {
        // F = sin(theta): D = 1.5 at the equator, P = 8*pi/3
        let (theta, phi) = default_grids::<f64>(DEFAULT_N_THETA, DEFAULT_N_PHI);
        let values = theta
            .iter()
            .map(|t| vec![c(t.sin(), 0.0); phi.len()])
            .collect();
        let pattern = RadiationPattern::from_samples(theta, phi, values).unwrap();
        let report = directivity(&pattern, DirectivityTarget::Peak).unwrap();
        assert_relative_eq!(
            report.total_radiated,
            8.0 * std::f64::consts::PI / 3.0,
            max_relative = 1.0e-13
        );
        assert_relative_eq!(report.peak_dbi, 1.7609125905568124, epsilon = 1.0e-9);
        assert_relative_eq!(
            report.direction.theta(),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1.0e-9
        );

        // fixed-direction lookup at theta = 60 deg reports the nearest row
        let at = directivity(
            &pattern,
            DirectivityTarget::At(Direction::from_degrees(60.0, 100.0).unwrap()),
        )
        .unwrap();
        let expect = 10.0 * (1.5 * at.direction.theta().sin().powi(2)).log10();
        assert_relative_eq!(at.peak_dbi, expect, epsilon = 1.0e-10);
        assert!((at.direction.theta().to_degrees() - 60.0).abs() < 1.0);
    }

    #[test]
    fn directivity_is_scale_invariant() {
        let geom = reference();
        let model = ElementPattern::<f64>::default();
        let w = phase_mode_excitation(&geom, 0);
        let scaled = ExcitationVector::from_weights(
            w.weights().iter().map(|v| v * c(3.0, -4.0)).collect(),
        )
        .unwrap();
        let (theta, phi) = default_grids(91, 180);
        let a = directivity(
            &sample_pattern(&geom, &model, &w, &theta, &phi).unwrap(),
            DirectivityTarget::Peak,
        )
        .unwrap();
        let b = directivity(
            &sample_pattern(&geom, &model, &scaled, &theta, &phi).unwrap(),
            DirectivityTarget::Peak,
        )
        .unwrap();
        assert!((a.peak_dbi - b.peak_dbi).abs() < 1.0e-10);
    }

    #[test]
    fn mirror_symmetric_spectra_give_mirror_symmetric_magnitudes() {
        let geom = reference();
        let model = ElementPattern::<f64>::default();
        let spectrum = ModeSpectrum::from_pairs([
            (0, c(1.0, 0.0)),
            (2, c(0.7, 0.0)),
            (-2, c(0.7, 0.0)),
            (5, c(0.3, 0.0)),
            (-5, c(0.3, 0.0)),
        ])
        .unwrap();
        let w = mix_modes(&geom, &spectrum).unwrap();
        let (theta, phi) = default_grids(61, 96);
        let pattern = sample_pattern(&geom, &model, &w, &theta, &phi).unwrap();
        // midpoint azimuth grid pairs j with m-1-j under phi -> -phi
        for i in 0..pattern.n_theta() {
            for j in 0..48 {
                let a = pattern.values()[i][j].norm();
                let b = pattern.values()[i][95 - j].norm();
                assert!((a - b).abs() < 1.0e-10, "row {i}, col {j}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn phase_mode_cut_power_concentrates_in_its_mode() {
        let geom = reference();
        let iso = ElementPattern::isotropic();
        let ka = geom.ka();
        for m in [0, 1, 3] {
            // aliasing must be weak for the purity claim to apply
            let alias = bessel_j(m - 12, ka).powi(2) + bessel_j(m + 12, ka).powi(2);
            assert!(alias / bessel_j(m, ka).powi(2) < 0.01);
            let w = phase_mode_excitation(&geom, m);
            let (theta, phi) = default_grids(3, 240);
            let row = sample_pattern(&geom, &iso, &w, &theta, &phi)
                .unwrap();
            let cut = &row.values()[1];
            let mut total = 0.0;
            let mut in_mode = 0.0;
            for q in -17..=17_i32 {
                let mut coef = c(0.0, 0.0);
                for (j, v) in cut.iter().enumerate() {
                    let angle = -(q as f64) * row.phi_samples()[j];
                    coef += v * Complex::from_polar(1.0, angle);
                }
                let p = coef.norm_sqr();
                total += p;
                if q == m {
                    in_mode = p;
                }
            }
            assert!(
                in_mode / total >= 0.99,
                "mode {m}: purity {}",
                in_mode / total
            );
        }
    }

    #[test]
    fn finds_crafted_cut_peaks() {
        // synthetic pattern: sin(theta) envelope times an azimuth profile
        // with a main lobe at 100.3 deg, a -2 dB lobe at 220 deg, and a
        // -6 dB lobe at 340 deg (every saddle deeper than -25 dB, so only
        // the level window decides who qualifies)
        let (theta, phi) = default_grids::<f64>(91, 360);
        let profile = |p: f64| -> f64 {
            let bump = |center_deg: f64, level_db: f64| -> f64 {
                let mut d = p.to_degrees() - center_deg;
                d = (d + 540.0).rem_euclid(360.0) - 180.0;
                level_db - (d / 12.0).powi(2)
            };
            let v = bump(100.3, 0.0)
                .max(bump(220.0, -2.0))
                .max(bump(340.0, -6.0))
                .max(-45.0);
            10.0_f64.powf(v / 20.0)
        };
        let values = theta
            .iter()
            .map(|t| phi.iter().map(|&p| c(t.sin() * profile(p), 0.0)).collect())
            .collect();
        let pattern = RadiationPattern::from_samples(theta, phi, values).unwrap();
        let peaks = find_beam_peaks(&pattern, 3.0).unwrap();
        assert_eq!(peaks.len(), 2, "peaks: {peaks:?}");
        assert!((peaks[0].direction.phi().to_degrees() - 100.3).abs() < 0.2);
        assert!((peaks[1].direction.phi().to_degrees() - 220.0).abs() < 0.2);
        assert!(peaks[0].level_dbi > peaks[1].level_dbi);
        assert_relative_eq!(
            peaks[0].level_dbi - peaks[1].level_dbi,
            2.0,
            epsilon = 0.05
        );

        // widening the level window to 8 dB admits the third lobe
        let wide = find_beam_peaks(&pattern, 8.0).unwrap();
        assert_eq!(wide.len(), 3, "peaks: {wide:?}");
        assert!((wide[2].direction.phi().to_degrees() - 340.0).abs() < 0.2);

        assert!(find_beam_peaks(&pattern, 0.0).is_err());
        assert!(find_beam_peaks(&pattern, -1.0).is_err());
    }

    #[test]
    fn flat_cut_has_no_peaks() {
        let geom = reference();
        let model = ElementPattern::<f64>::default();
        let w = phase_mode_excitation(&geom, 0);
        let (theta, phi) = default_grids(91, 180);
        let pattern = sample_pattern(&geom, &model, &w, &theta, &phi).unwrap();
        let peaks = find_beam_peaks(&pattern, 3.0).unwrap();
        assert!(peaks.is_empty(), "broadcast ripple misread as beams: {peaks:?}");
    }

    #[test]
    fn zero_excitation_is_degenerate() {
        let geom = reference();
        let model = ElementPattern::<f64>::default();
        let w = ExcitationVector::from_weights(vec![c(0.0, 0.0); 12]).unwrap();
        let (theta, phi) = default_grids(91, 180);
        let pattern = sample_pattern(&geom, &model, &w, &theta, &phi).unwrap();
        let err = directivity(&pattern, DirectivityTarget::Peak).unwrap_err();
        assert!(matches!(err, Error::DegeneratePattern(_)));
        assert!(matches!(
            find_beam_peaks(&pattern, 3.0).unwrap_err(),
            Error::DegeneratePattern(_)
        ));
    }

    #[test]
    fn grid_and_argument_validation() {
        let geom = reference();
        let model = ElementPattern::<f64>::default();
        let w = phase_mode_excitation(&geom, 1);
        let short = ExcitationVector::from_weights(vec![c(1.0, 0.0); 3]).unwrap();
        assert!(matches!(
            total_field(&geom, &model, &short, Direction::new(0.0, 0.0).unwrap()),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(sample_pattern(&geom, &model, &w, &[], &[0.0]).is_err());
        assert!(sample_pattern(&geom, &model, &w, &[0.3, 0.2], &[0.0]).is_err());
        assert!(sample_pattern(&geom, &model, &w, &[0.3], &[6.4]).is_err());

        // coarse grids are fine for sampling but rejected for directivity
        let (theta, phi) = default_grids(31, 72);
        let coarse = sample_pattern(&geom, &model, &w, &theta, &phi).unwrap();
        let err = directivity(&coarse, DirectivityTarget::Peak).unwrap_err();
        assert!(err.to_string().contains("too coarse"), "{err}");
    }

    #[test]
    fn default_grid_layout() {
        let (theta, phi) = default_grids::<f64>(181, 360);
        assert_eq!(theta.len(), 181);
        assert_eq!(phi.len(), 360);
        assert_eq!(theta[90], std::f64::consts::FRAC_PI_2);
        assert!(theta[0] > 0.0 && theta[180] < std::f64::consts::PI);
        assert!(theta.windows(2).all(|w| w[0] < w[1]));
        assert_relative_eq!(phi[0].to_degrees(), 0.5, epsilon = 1.0e-12);
        assert_relative_eq!(phi[359].to_degrees(), 359.5, epsilon = 1.0e-9);

        let pattern = RadiationPattern::from_samples(
            theta,
            phi,
            vec![vec![c(1.0, 0.0); 360]; 181],
        )
        .unwrap();
        assert_eq!(pattern.theta_row_nearest(std::f64::consts::FRAC_PI_2), 90);
        assert_eq!(
            pattern.theta_samples()[pattern.theta_row_nearest(0.0)],
            pattern.theta_samples()[0]
        );
    }

    #[test]
    fn constant_pattern_reports_zero_dbi() {
        let (theta, phi) = default_grids::<f64>(91, 180);
        let values = vec![vec![c(0.0, 0.7); 180]; 91];
        let pattern = RadiationPattern::from_samples(theta, phi, values).unwrap();
        let report = directivity(&pattern, DirectivityTarget::Peak).unwrap();
        assert!(report.peak_dbi.abs() < 1.0e-10, "got {}", report.peak_dbi);
        assert_relative_eq!(
            report.total_radiated,
            0.49 * 4.0 * std::f64::consts::PI,
            max_relative = 1.0e-12
        );
    }

    #[test]
    fn decompose_of_sampled_excitation_survives_the_pipeline() {
        // pipeline smoke test: mode 4 in, pattern out, spectrum back
        let geom = reference();
        let w = phase_mode_excitation(&geom, 4);
        let spectrum = mode_decompose(&geom, &w).unwrap();
        assert!((spectrum.coefficient(4) - c(1.0, 0.0)).norm() < 1.0e-13);
    }
}
