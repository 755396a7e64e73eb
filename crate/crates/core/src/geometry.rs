//! Array geometry, operating frequency, and angular conventions.
//!
//! The array is a uniform circle of N elements in the z = 0 plane; element n
//! sits at azimuth phi_n = 2*pi*n/N with its boresight pointing radially
//! outward:
//!
//! ```text
//! p_n = a * (cos phi_n, sin phi_n, 0),    b_n = (cos phi_n, sin phi_n, 0)
//! ```
//!
//! Directions follow the physics convention — theta from the +z axis, phi
//! from +x counterclockwise in the xy-plane — so the azimuth cut of interest
//! is theta = pi/2. Everything internal is radians and metres; the CLI
//! converts degrees and millimetres at the boundary.

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Speed of light in vacuum (m/s), exact by SI definition.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Wraps an angle into [0, 2*pi).
pub fn wrap_angle<T: Scalar>(angle: T) -> T {
    let tau = T::TAU();
    let mut wrapped = angle % tau;
    if wrapped < T::zero() {
        wrapped = wrapped + tau;
    }
    // `angle % tau` of a tiny negative can round back up to exactly tau.
    if wrapped >= tau {
        T::zero()
    } else {
        wrapped
    }
}

/// Operating frequency with derived wave quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency<T> {
    hertz: T,
}

impl<T: Scalar> Frequency<T> {
    /// Creates a frequency from hertz; must be finite and positive.
    pub fn from_hertz(hertz: T) -> Result<Self> {
        if !hertz.is_finite() || hertz <= T::zero() {
            return Err(Error::InvalidArgument(format!(
                "frequency must be finite and positive, got {hertz} Hz"
            )));
        }
        Ok(Self { hertz })
    }

    /// Creates a frequency from gigahertz.
    pub fn from_gigahertz(gigahertz: T) -> Result<Self> {
        Self::from_hertz(gigahertz * real(1.0e9))
    }

    pub fn hertz(&self) -> T {
        self.hertz
    }

    /// Free-space wavelength lambda = c / f, in metres.
    pub fn wavelength(&self) -> T {
        real::<T>(SPEED_OF_LIGHT) / self.hertz
    }

    /// Free-space wavenumber k = 2*pi / lambda, in rad/m.
    pub fn wavenumber(&self) -> T {
        T::TAU() / self.wavelength()
    }
}

/// Far-field direction: theta from +z in [0, pi], phi from +x in [0, 2*pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction<T> {
    theta: T,
    phi: T,
}

impl<T: Scalar> Direction<T> {
    /// Builds a direction from radians. `theta` must lie in [0, pi];
    /// `phi` is wrapped into [0, 2*pi).
    pub fn new(theta: T, phi: T) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "direction angles must be finite, got theta = {theta}, phi = {phi}"
            )));
        }
        if theta < T::zero() || theta > T::PI() {
            return Err(Error::InvalidArgument(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        Ok(Self {
            theta,
            phi: wrap_angle(phi),
        })
    }

    /// Builds a direction from degrees.
    pub fn from_degrees(theta_deg: T, phi_deg: T) -> Result<Self> {
        Self::new(theta_deg.to_radians(), phi_deg.to_radians())
    }

    /// Polar angle from the +z axis, radians.
    pub fn theta(&self) -> T {
        self.theta
    }

    /// Azimuth from the +x axis, radians in [0, 2*pi).
    pub fn phi(&self) -> T {
        self.phi
    }

    /// Cartesian unit vector (sin t cos p, sin t sin p, cos t).
    pub fn unit_vector(&self) -> [T; 3] {
        let (st, ct) = (self.theta.sin(), self.theta.cos());
        let (sp, cp) = (self.phi.sin(), self.phi.cos());
        [st * cp, st * sp, ct]
    }
}

/// Uniform circular array in the z = 0 plane.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrayGeometry<T> {
    n_elements: usize,
    radius: T,
    frequency: Frequency<T>,
    element_angles: Vec<T>,
    element_positions: Vec<[T; 3]>,
    element_boresights: Vec<[T; 3]>,
}

impl<T: Scalar> ArrayGeometry<T> {
    /// Builds a uniform circular array from its diameter in millimetres.
    pub fn uniform_circular(
        n_elements: usize,
        diameter_mm: T,
        frequency: Frequency<T>,
    ) -> Result<Self> {
        if n_elements == 0 {
            return Err(Error::InvalidArgument(
                "array needs at least one element".into(),
            ));
        }
        if !diameter_mm.is_finite() || diameter_mm <= T::zero() {
            return Err(Error::InvalidArgument(format!(
                "diameter must be finite and positive, got {diameter_mm} mm"
            )));
        }
        let radius = diameter_mm * real(0.5e-3);
        let n_real = real::<T>(n_elements as f64);
        let mut element_angles = Vec::with_capacity(n_elements);
        let mut element_positions = Vec::with_capacity(n_elements);
        let mut element_boresights = Vec::with_capacity(n_elements);
        for n in 0..n_elements {
            let angle = T::TAU() * real::<T>(n as f64) / n_real;
            let (sin, cos) = angle.sin_cos();
            element_angles.push(angle);
            element_positions.push([radius * cos, radius * sin, T::zero()]);
            element_boresights.push([cos, sin, T::zero()]);
        }
        Ok(Self {
            n_elements,
            radius,
            frequency,
            element_angles,
            element_positions,
            element_boresights,
        })
    }

    /// Stock configuration used by the CLI defaults and the test suite:
    /// twelve elements on a 19.38 mm circle operating at 28 GHz.
    pub fn reference_28ghz() -> Result<Self> {
        Self::uniform_circular(12, real(19.38), Frequency::from_gigahertz(real(28.0))?)
    }

    pub fn n_elements(&self) -> usize {
        self.n_elements
    }

    /// Circle radius in metres.
    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn frequency(&self) -> Frequency<T> {
        self.frequency
    }

    /// Element azimuths phi_n = 2*pi*n/N, radians.
    pub fn element_angles(&self) -> &[T] {
        &self.element_angles
    }

    /// Element positions on the circle, metres.
    pub fn element_positions(&self) -> &[[T; 3]] {
        &self.element_positions
    }

    /// Radially outward unit boresights.
    pub fn element_boresights(&self) -> &[[T; 3]] {
        &self.element_boresights
    }

    /// Free-space wavelength, metres.
    pub fn wavelength(&self) -> T {
        self.frequency.wavelength()
    }

    /// Free-space wavenumber, rad/m.
    pub fn wavenumber(&self) -> T {
        self.frequency.wavenumber()
    }

    /// Electrical radius k*a (dimensionless).
    pub fn ka(&self) -> T {
        self.wavenumber() * self.radius
    }

    /// Aliasing-free mode window as (lo_exclusive, hi_inclusive):
    /// indices m with lo < m <= hi are distinct on this array.
    pub fn mode_bounds(&self) -> (i32, i32) {
        let hi = (self.n_elements / 2) as i32;
        (hi - self.n_elements as i32, hi)
    }

    /// Checks a mode index against the aliasing-free window.
    pub fn check_mode(&self, index: i32) -> Result<()> {
        let (lo_exclusive, hi_inclusive) = self.mode_bounds();
        if index > lo_exclusive && index <= hi_inclusive {
            Ok(())
        } else {
            Err(Error::ModeOutOfRange {
                index,
                n_elements: self.n_elements,
                lo_exclusive,
                hi_inclusive,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const EPS: f64 = 1.0e-12;

    fn reference() -> ArrayGeometry<f64> {
        ArrayGeometry::reference_28ghz().unwrap()
    }

    #[test]
    fn wavelength_at_28ghz() {
        let f = Frequency::from_gigahertz(28.0_f64).unwrap();
        // c / 28e9, quoted to 4 significant figures: 10.71 mm
        assert_relative_eq!(f.wavelength(), 0.010706873500000, epsilon = 1.0e-15);
        assert_relative_eq!(f.wavelength() * 1.0e3, 10.7069, epsilon = 5.0e-5);
    }

    #[test]
    fn electrical_radius_of_reference_array() {
        let geom = reference();
        assert_relative_eq!(geom.ka(), 5.6864467135593024, max_relative = 1.0e-14);
        assert_relative_eq!(geom.radius(), 9.69e-3, max_relative = 1.0e-15);
        assert_eq!(geom.n_elements(), 12);
    }

    #[test]
    fn element_layout_is_a_uniform_circle() {
        let geom = reference();
        for (n, (angle, (pos, bore))) in geom
            .element_angles()
            .iter()
            .zip(geom.element_positions().iter().zip(geom.element_boresights()))
            .enumerate()
        {
            assert_relative_eq!(
                *angle,
                std::f64::consts::TAU * n as f64 / 12.0,
                epsilon = EPS
            );
            let r = (pos[0] * pos[0] + pos[1] * pos[1]).sqrt();
            assert_relative_eq!(r, geom.radius(), max_relative = EPS);
            assert_eq!(pos[2], 0.0);
            let b_norm = (bore[0] * bore[0] + bore[1] * bore[1] + bore[2] * bore[2]).sqrt();
            assert_relative_eq!(b_norm, 1.0, epsilon = EPS);
            // boresight is the position direction
            assert_relative_eq!(pos[0], geom.radius() * bore[0], epsilon = EPS);
            assert_relative_eq!(pos[1], geom.radius() * bore[1], epsilon = EPS);
        }
        // element 3 sits on the +y axis
        assert_relative_eq!(geom.element_angles()[3], std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn mode_window_even_and_odd() {
        let geom = reference();
        assert_eq!(geom.mode_bounds(), (-6, 6));
        assert!(geom.check_mode(6).is_ok());
        assert!(geom.check_mode(-5).is_ok());
        assert!(geom.check_mode(0).is_ok());
        let err = geom.check_mode(7).unwrap_err();
        assert!(err.to_string().contains("mode must lie in (-6, 6]"));
        assert!(geom.check_mode(-6).is_err());

        let five = ArrayGeometry::uniform_circular(
            5,
            10.0_f64,
            Frequency::from_gigahertz(28.0).unwrap(),
        )
        .unwrap();
        assert_eq!(five.mode_bounds(), (-3, 2));
        assert!(five.check_mode(-2).is_ok());
        assert!(five.check_mode(2).is_ok());
        assert!(five.check_mode(3).is_err());
    }

    #[test]
    fn direction_validates_and_wraps() {
        let d = Direction::new(1.0_f64, -0.5).unwrap();
        assert_relative_eq!(d.phi(), std::f64::consts::TAU - 0.5, epsilon = EPS);
        assert!(Direction::new(-0.1_f64, 0.0).is_err());
        assert!(Direction::new(3.2_f64, 0.0).is_err());
        assert!(Direction::new(f64::NAN, 0.0).is_err());

        let d = Direction::from_degrees(90.0_f64, 450.0).unwrap();
        assert_relative_eq!(d.phi(), std::f64::consts::FRAC_PI_2, epsilon = EPS);

        let u = Direction::from_degrees(60.0_f64, 30.0).unwrap().unit_vector();
        let norm = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
        assert_relative_eq!(norm, 1.0, epsilon = EPS);
        assert_relative_eq!(u[2], 0.5, epsilon = EPS);
    }

    #[test]
    fn wrap_angle_edges() {
        assert_eq!(wrap_angle(0.0_f64), 0.0);
        assert_relative_eq!(wrap_angle(7.0_f64), 7.0 - std::f64::consts::TAU, epsilon = EPS);
        assert!(wrap_angle(-1.0e-18_f64) < std::f64::consts::TAU);
        assert!(wrap_angle(-1.0e-18_f64) >= 0.0);
        assert_eq!(wrap_angle(std::f64::consts::TAU), 0.0);
    }

    #[test]
    fn invalid_constructions_are_rejected() {
        assert!(Frequency::from_hertz(0.0_f64).is_err());
        assert!(Frequency::from_hertz(-1.0_f64).is_err());
        assert!(Frequency::from_hertz(f64::INFINITY).is_err());
        let f = Frequency::from_gigahertz(28.0_f64).unwrap();
        assert!(ArrayGeometry::uniform_circular(0, 19.38, f).is_err());
        assert!(ArrayGeometry::uniform_circular(12, -1.0, f).is_err());
    }
}
