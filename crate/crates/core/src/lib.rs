//! Multimode circular antenna array modeling: phase-mode and OAM
//! excitations, far-field patterns and directivity, near-field vortex
//! maps, and least-squares beam synthesis.
//!
//! The model is a uniform circular array of N elements at azimuths
//! phi_n = 2*pi*n/N. Exciting it with w_n = exp(i*m*phi_n)/N launches
//! phase mode m, whose far field on the horizon approaches the
//! continuous-ring form i^m * J_m(ka) * exp(i*m*phi); the same weights
//! read as an orbital-angular-momentum (OAM) excitation of charge l = m,
//! producing a vortex field with an on-axis null and a 2*pi*l phase
//! spiral. Mixing modes with complex coefficients, steering them in
//! azimuth, and fitting coefficients to beam targets are all linear
//! operations on the same spectrum type.
//!
//! Everything is generic over the scalar precision through [`Scalar`]
//! (f64 for production use, f32 mostly to keep the numerics honest);
//! the `*64` / `*32` aliases at the crate root pick a precision without
//! spelling out type parameters.
//!
//! Conventions, fixed globally and relied on by every module:
//!
//! * time dependence exp(+i*omega*t), outgoing waves exp(-i*k*R);
//! * counterclockwise phase circulation viewed from +z is a positive
//!   winding number, and OAM charge l equals phase mode m;
//! * angles in radians internally, theta from +z (0 to pi), phi
//!   counterclockwise from +x in [0, 2*pi).

pub mod bessel;
pub mod elements;
mod error;
pub mod farfield;
pub mod geometry;
mod linalg;
pub mod modes;
pub mod nearfield;
pub mod quad;
mod scalar;
pub mod synthesis;

pub use error::{Error, Result};
pub use num_complex::{Complex, Complex32, Complex64};
pub use scalar::Scalar;

/// Double-precision geometry.
pub type ArrayGeometry64 = geometry::ArrayGeometry<f64>;
/// Single-precision geometry.
pub type ArrayGeometry32 = geometry::ArrayGeometry<f32>;
/// Double-precision element model.
pub type ElementPattern64 = elements::ElementPattern<f64>;
/// Single-precision element model.
pub type ElementPattern32 = elements::ElementPattern<f32>;
/// Double-precision per-element weights.
pub type ExcitationVector64 = modes::ExcitationVector<f64>;
/// Single-precision per-element weights.
pub type ExcitationVector32 = modes::ExcitationVector<f32>;
/// Double-precision mode spectrum.
pub type ModeSpectrum64 = modes::ModeSpectrum<f64>;
/// Single-precision mode spectrum.
pub type ModeSpectrum32 = modes::ModeSpectrum<f32>;
/// Double-precision far-field sample grid.
pub type RadiationPattern64 = farfield::RadiationPattern<f64>;
/// Single-precision far-field sample grid.
pub type RadiationPattern32 = farfield::RadiationPattern<f32>;
/// Double-precision directivity summary.
pub type DirectivityReport64 = farfield::DirectivityReport<f64>;
/// Single-precision directivity summary.
pub type DirectivityReport32 = farfield::DirectivityReport<f32>;
/// Double-precision near-field plane.
pub type FieldGrid64 = nearfield::FieldGrid<f64>;
/// Single-precision near-field plane.
pub type FieldGrid32 = nearfield::FieldGrid<f32>;
