//! Near-field maps on a plane above the array, vortex winding numbers, and
//! time snapshots.
//!
//! Each element radiates a scalar spherical wave weighted by its pattern:
//!
//! ```text
//! E(p) = sum_n w_n * g_n(u_np) * exp(-i * k * R_n) / (k * R_n)
//! ```
//!
//! with R_n = |p - r_n| and u_np the unit vector from element n toward p.
//! The exp(+i*omega*t) convention makes outgoing phase decrease with
//! distance, which fixes the sign of every winding number below:
//! counterclockwise phase circulation viewed from +z is positive, and an
//! excitation w_n = exp(i*l*phi_n)/N produces winding exactly +l.
//!
//! No reactive near-field terms are modeled; at observation heights of a
//! couple of wavelengths the radiating 1/(kR) term carries all the phase
//! structure the vortex analysis needs. Field values are dimensionless and
//! meant to be normalized per grid at export time.

use num_complex::Complex;
use rayon::prelude::*;

use crate::elements::ElementPattern;
use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Frequency};
use crate::modes::ExcitationVector;
use crate::scalar::{real, Scalar};

/// Points interpolated along the winding-number circle. Comfortably above
/// the Nyquist demand of the highest mode the 12-element array can carry.
const WINDING_SAMPLES: usize = 1024;

/// Fraction of the grid maximum below which a circle sample counts as
/// sitting on a phase singularity.
const WINDING_MAGNITUDE_FLOOR: f64 = 1.0e-8;

/// Closest approach (in wavelengths) an observation point may make to an
/// element before the 1/(kR) model stops being meaningful.
const SINGULARITY_RADIUS_LAMBDA: f64 = 0.01;

/// Complex field samples on an axis-aligned plane z = z_height.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid<T> {
    z_height: T,
    x_samples: Vec<T>,
    y_samples: Vec<T>,
    /// values[ix][iy] = E(x_samples[ix], y_samples[iy], z_height)
    values: Vec<Vec<Complex<T>>>,
    frequency: Frequency<T>,
}

impl<T: Scalar> FieldGrid<T> {
    /// Wraps precomputed samples. Axes must be strictly increasing and
    /// finite, the plane height positive, and the value matrix x-major
    /// with matching dimensions.
    pub fn from_samples(
        z_height: T,
        x_samples: Vec<T>,
        y_samples: Vec<T>,
        values: Vec<Vec<Complex<T>>>,
        frequency: Frequency<T>,
    ) -> Result<Self> {
        if !(z_height.is_finite() && z_height > T::zero()) {
            return Err(Error::InvalidArgument(format!(
                "plane height must be positive, got {z_height}"
            )));
        }
        for (name, axis) in [("x", &x_samples), ("y", &y_samples)] {
            if axis.len() < 2 {
                return Err(Error::InvalidArgument(format!(
                    "{name} axis needs at least 2 samples"
                )));
            }
            if axis.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "{name} axis contains a non-finite sample"
                )));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "{name} axis must be strictly increasing"
                )));
            }
        }
        if values.len() != x_samples.len()
            || values.iter().any(|col| col.len() != y_samples.len())
        {
            return Err(Error::InvalidArgument(format!(
                "field values must form a {} x {} matrix",
                x_samples.len(),
                y_samples.len()
            )));
        }
        Ok(Self {
            z_height,
            x_samples,
            y_samples,
            values,
            frequency,
        })
    }

    pub fn z_height(&self) -> T {
        self.z_height
    }

    pub fn x_samples(&self) -> &[T] {
        &self.x_samples
    }

    pub fn y_samples(&self) -> &[T] {
        &self.y_samples
    }

    /// X-major sample matrix.
    pub fn values(&self) -> &[Vec<Complex<T>>] {
        &self.values
    }

    pub fn frequency(&self) -> Frequency<T> {
        self.frequency
    }

    /// Largest |E| over the grid.
    pub fn max_magnitude(&self) -> T {
        self.values
            .iter()
            .flatten()
            .fold(T::zero(), |acc, v| acc.max(v.norm()))
    }

    /// Bilinear interpolation of the complex field at an in-plane point.
    /// Returns `None` outside the sampled rectangle.
    pub fn interpolate(&self, x: T, y: T) -> Option<Complex<T>> {
        let ix = cell_index(&self.x_samples, x)?;
        let iy = cell_index(&self.y_samples, y)?;
        let fx = (x - self.x_samples[ix]) / (self.x_samples[ix + 1] - self.x_samples[ix]);
        let fy = (y - self.y_samples[iy]) / (self.y_samples[iy + 1] - self.y_samples[iy]);
        let lerp = |a: Complex<T>, b: Complex<T>, t: T| a + (b - a).scale(t);
        let bottom = lerp(self.values[ix][iy], self.values[ix + 1][iy], fx);
        let top = lerp(self.values[ix][iy + 1], self.values[ix + 1][iy + 1], fx);
        Some(lerp(bottom, top, fy))
    }
}

/// Index of the cell [axis[i], axis[i+1]] containing `v`, or `None` when
/// `v` lies outside the axis range.
fn cell_index<T: Scalar>(axis: &[T], v: T) -> Option<usize> {
    if v < axis[0] || v > axis[axis.len() - 1] {
        return None;
    }
    let upper = axis.partition_point(|&a| a <= v);
    Some(upper.clamp(1, axis.len() - 1) - 1)
}

/// Complex field of the excited array at one observation point.
pub fn efield_at<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    model: &ElementPattern<T>,
    excitation: &ExcitationVector<T>,
    point: [T; 3],
) -> Result<Complex<T>> {
    if excitation.len() != geometry.n_elements() {
        return Err(Error::LengthMismatch {
            expected: geometry.n_elements(),
            actual: excitation.len(),
        });
    }
    if point.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument(
            "observation point must be finite".into(),
        ));
    }
    let k = geometry.wavenumber();
    let min_distance = geometry.wavelength() * real(SINGULARITY_RADIUS_LAMBDA);
    let mut acc = Complex::new(T::zero(), T::zero());
    for (n, ((w, pos), bore)) in excitation
        .weights()
        .iter()
        .zip(geometry.element_positions())
        .zip(geometry.element_boresights())
        .enumerate()
    {
        let dx = point[0] - pos[0];
        let dy = point[1] - pos[1];
        let dz = point[2] - pos[2];
        let distance = (dx * dx + dy * dy + dz * dz).sqrt();
        if distance < min_distance {
            return Err(Error::InvalidArgument(format!(
                "observation point sits on element {n} (distance below lambda/100): \
                 the spherical-wave model is singular there"
            )));
        }
        let u = [dx / distance, dy / distance, dz / distance];
        let gain = model.gain_unchecked(*bore, u);
        let kr = k * distance;
        acc = acc + w * Complex::from_polar(gain / kr, -kr);
    }
    Ok(acc)
}

/// Samples the field on a square plane z = `z_height`, spanning
/// [-half_extent, half_extent] on both axes with `samples_per_axis` points
/// per axis (odd counts place a sample exactly on the z-axis). Rows run in
/// parallel; the result is deterministic regardless of thread count.
pub fn efield_on_plane<T: Scalar>(
    geometry: &ArrayGeometry<T>,
    model: &ElementPattern<T>,
    excitation: &ExcitationVector<T>,
    z_height: T,
    half_extent: T,
    samples_per_axis: usize,
) -> Result<FieldGrid<T>> {
    if !(z_height.is_finite() && z_height > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "plane height must be positive, got {z_height}"
        )));
    }
    if !(half_extent.is_finite() && half_extent > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "half extent must be positive, got {half_extent}"
        )));
    }
    if samples_per_axis < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples per axis, got {samples_per_axis}"
        )));
    }
    let span = real::<T>((samples_per_axis - 1) as f64);
    let coord = |i: usize| -> T {
        // hits 0 exactly at the midpoint of an odd-length axis
        half_extent * (real::<T>(2.0 * i as f64) / span - T::one())
    };
    let axis: Vec<T> = (0..samples_per_axis).map(coord).collect();
    let values: Vec<Vec<Complex<T>>> = axis
        .par_iter()
        .map(|&x| {
            axis.iter()
                .map(|&y| {
                    efield_at(geometry, model, excitation, [x, y, z_height])
                        .expect("plane points validated before sampling")
                })
                .collect()
        })
        .collect();
    FieldGrid::from_samples(z_height, axis.clone(), axis, values, geometry.frequency())
}

/// Signed count of 2*pi phase cycles along a circle of `circle_radius`
/// centered on the z-axis, positive for counterclockwise circulation
/// viewed from +z.
///
/// The field is bilinearly interpolated at 1024 points around the circle
/// and the phase unwrapped cumulatively. Every sample must carry at least
/// 1e-8 of the grid's maximum magnitude — a singularity on the path makes
/// the phase meaningless and is reported as an error, as is a circle that
/// leaves the sampled rectangle.
pub fn winding_number<T: Scalar>(grid: &FieldGrid<T>, circle_radius: T) -> Result<i32> {
    if !(circle_radius.is_finite() && circle_radius > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "circle radius must be positive, got {circle_radius}"
        )));
    }
    let x = grid.x_samples();
    let y = grid.y_samples();
    let reach = (-x[0])
        .min(x[x.len() - 1])
        .min(-y[0])
        .min(y[y.len() - 1]);
    if circle_radius > reach {
        return Err(Error::InvalidArgument(format!(
            "circle of radius {circle_radius} extends outside the grid \
             (usable radius {reach})"
        )));
    }
    let floor = grid.max_magnitude() * real(WINDING_MAGNITUDE_FLOOR);
    let mut total = T::zero();
    let mut previous = T::zero();
    let step = T::TAU() / real::<T>(WINDING_SAMPLES as f64);
    for s in 0..=WINDING_SAMPLES {
        let alpha = real::<T>(s as f64) * step;
        let value = grid
            .interpolate(circle_radius * alpha.cos(), circle_radius * alpha.sin())
            .expect("circle verified to lie inside the grid");
        if !(value.norm() > floor) {
            return Err(Error::DegeneratePattern(format!(
                "field magnitude on the radius-{circle_radius} circle drops below \
                 1e-8 of the grid maximum: phase singularity on the path"
            )));
        }
        let phase = value.im.atan2(value.re);
        if s > 0 {
            let raw = phase - previous;
            // wrap the increment into (-pi, pi]
            total = total + raw.sin().atan2(raw.cos());
        }
        previous = phase;
    }
    let cycles = (total / T::TAU()).round();
    Ok(cycles.to_f64().expect("winding count is small") as i32)
}

/// Real field frames Re{ E * exp(+i * 2*pi * t / n_frames) } for
/// t = 0..n_frames-1, in the grid's x-major layout. Frame 0 is the plain
/// real part.
///
/// # Panics
/// Panics when `n_frames` is zero.
pub fn time_snapshots<T: Scalar>(grid: &FieldGrid<T>, n_frames: usize) -> Vec<Vec<Vec<T>>> {
    assert!(n_frames >= 1, "need at least one frame");
    (0..n_frames)
        .map(|t| {
            let angle = T::TAU() * real::<T>(t as f64) / real::<T>(n_frames as f64);
            let rotor = Complex::from_polar(T::one(), angle);
            grid.values()
                .iter()
                .map(|col| col.iter().map(|v| (v * rotor).re).collect())
                .collect()
        })
        .collect()
}
