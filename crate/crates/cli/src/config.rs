//! Strict JSON run configuration.
//!
//! Every block has complete built-in defaults (the 12-element, 19.38 mm,
//! 28 GHz reference array with the dual-lobe element), so `carray` runs
//! without any config file at all. Parsing is strict: an unknown key
//! anywhere fails the whole run before any computation starts.

use std::path::{Path, PathBuf};

use carray_core::elements::ElementPattern;
use carray_core::geometry::{ArrayGeometry, Frequency};
use carray_core::{Error, Result};
use serde::Deserialize;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub element_model: ElementModelConfig,
    pub grid: GridConfig,
    /// Output directory; the `--out` flag takes precedence over this.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub n_elements: usize,
    pub diameter_mm: f64,
    pub frequency_ghz: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            n_elements: 12,
            diameter_mm: 19.38,
            frequency_ghz: 28.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Isotropic,
    Cosine,
    DualLobe,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ElementModelConfig {
    #[serde(rename = "type")]
    pub kind: ElementKind,
    pub q_radial: f64,
    pub q_zenith: f64,
    pub beta: f64,
}

impl Default for ElementModelConfig {
    fn default() -> Self {
        Self {
            kind: ElementKind::DualLobe,
            q_radial: 1.0,
            q_zenith: 1.0,
            beta: 0.25,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Polar samples of the far-field sphere grid.
    pub n_theta: usize,
    /// Azimuth samples of the far-field sphere grid.
    pub n_phi: usize,
    /// Near-field plane half extent, in wavelengths.
    pub half_extent_lambda: f64,
    /// Near-field samples along each plane axis.
    pub samples_per_axis: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            n_theta: 181,
            n_phi: 360,
            half_extent_lambda: 2.0,
            samples_per_axis: 201,
        }
    }
}

impl RunConfig {
    /// Built-in defaults for `None`, otherwise the parsed file.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let cfg = match path {
            None => Self::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| {
                    Error::InvalidArgument(format!("cannot read config {}: {e}", p.display()))
                })?;
                serde_json::from_str(&text).map_err(|e| {
                    Error::InvalidArgument(format!("config {}: {e}", p.display()))
                })?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        // Geometry and near-field bounds are enforced by the library at
        // construction time; the sphere grid is consumed as raw sample
        // counts, so size floors live here.
        if self.grid.n_theta < 2 || self.grid.n_phi < 4 {
            return Err(Error::InvalidArgument(format!(
                "sphere grid needs at least 2 x 4 samples, got {} x {}",
                self.grid.n_theta, self.grid.n_phi
            )));
        }
        Ok(())
    }

    pub fn build_geometry(&self) -> Result<ArrayGeometry<f64>> {
        ArrayGeometry::uniform_circular(
            self.geometry.n_elements,
            self.geometry.diameter_mm,
            Frequency::from_gigahertz(self.geometry.frequency_ghz)?,
        )
    }

    pub fn build_element(&self) -> Result<ElementPattern<f64>> {
        let m = &self.element_model;
        match m.kind {
            ElementKind::Isotropic => Ok(ElementPattern::isotropic()),
            ElementKind::Cosine => ElementPattern::cosine_boresight(m.q_radial),
            ElementKind::DualLobe => ElementPattern::dual_lobe(m.q_radial, m.q_zenith, m.beta),
        }
    }
}
