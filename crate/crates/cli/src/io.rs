//! File formats and number formatting.
//!
//! JSON files (excitations, spectra, reports) print floats with 17
//! significant digits so every f64 round-trips exactly; bulk CSV grids use
//! 9. Both go through one %g-style formatter: trailing zeros stripped,
//! scientific notation outside the comfortable exponent range. Files are
//! UTF-8 with LF endings and are built in memory and written in one shot,
//! so rerunning a command reproduces them byte for byte.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use carray_core::farfield::{BeamPeak, DirectivityReport, RadiationPattern};
use carray_core::modes::{ExcitationVector, ModeSpectrum};
use carray_core::nearfield::FieldGrid;
use carray_core::{Complex64, Error, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

/// Pattern CSV cells below this level print as the floor itself; exact
/// nulls would otherwise render as `-inf`.
const PATTERN_DB_FLOOR: f64 = -300.0;

/// %g-style rendering of `x` with `sig` significant digits.
pub fn format_g(x: f64, sig: usize) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    if !x.is_finite() {
        // Writers only ever see finite values; keep a readable token anyway.
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exponent) = sci.split_once('e').expect("{:e} always carries an exponent");
    let exponent: i32 = exponent.parse().expect("{:e} exponent is an integer");
    if exponent < -4 || exponent >= sig as i32 {
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    } else {
        let decimals = (sig as i32 - 1 - exponent).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    }
}

fn g9(x: f64) -> String {
    format_g(x, 9)
}

/// Pretty JSON with %g floats at a fixed significant-digit count.
struct GPretty<'a> {
    inner: PrettyFormatter<'a>,
    sig: usize,
}

impl Formatter for GPretty<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g(value, self.sig).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(
        &mut self,
        writer: &mut W,
        first: bool,
    ) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut buf = Vec::new();
    let formatter = GPretty {
        inner: PrettyFormatter::with_indent(b"  "),
        sig: 17,
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, formatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidArgument(format!("cannot encode {}: {e}", path.display())))?;
    buf.push(b'\n');
    write_bytes(path, &buf)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    // serde_json diagnostics carry line and column.
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}

fn write_text(path: &Path, text: String) -> Result<()> {
    write_bytes(path, text.as_bytes())
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReIm {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExcitationFile {
    pub n_elements: usize,
    pub weights: Vec<ReIm>,
}

impl ExcitationFile {
    pub fn from_vector(v: &ExcitationVector<f64>) -> Self {
        Self {
            n_elements: v.len(),
            weights: v.weights().iter().map(|w| ReIm { re: w.re, im: w.im }).collect(),
        }
    }

    pub fn into_vector(self) -> Result<ExcitationVector<f64>> {
        if self.n_elements != self.weights.len() {
            return Err(Error::InvalidArgument(format!(
                "excitation file declares {} elements but carries {} weights",
                self.n_elements,
                self.weights.len()
            )));
        }
        ExcitationVector::from_weights(
            self.weights
                .iter()
                .map(|w| Complex64::new(w.re, w.im))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeEntry {
    pub m: i32,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumFile {
    pub modes: Vec<ModeEntry>,
}

impl SpectrumFile {
    /// Entries come out in ascending mode order.
    pub fn from_spectrum(s: &ModeSpectrum<f64>) -> Self {
        Self {
            modes: s
                .iter()
                .map(|(m, c)| ModeEntry { m, re: c.re, im: c.im })
                .collect(),
        }
    }

    pub fn into_spectrum(self) -> Result<ModeSpectrum<f64>> {
        ModeSpectrum::from_pairs(
            self.modes
                .iter()
                .map(|e| (e.m, Complex64::new(e.re, e.im))),
        )
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectivityFile {
    pub peak_dbi: f64,
    pub theta_deg: f64,
    pub phi_deg: f64,
}

impl DirectivityFile {
    pub fn from_report(r: &DirectivityReport<f64>) -> Self {
        Self {
            peak_dbi: r.peak_dbi,
            theta_deg: r.direction.theta().to_degrees(),
            phi_deg: r.direction.phi().to_degrees(),
        }
    }
}

/// Beam-synthesis problem statement. `modes` and `ridge` fall back to the
/// symmetric window set and the library default when omitted.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub targets_deg: Vec<f64>,
    pub levels: Vec<f64>,
    #[serde(default)]
    pub modes: Option<Vec<i32>>,
    #[serde(default)]
    pub ridge: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PeakEntry {
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub level_dbi: f64,
}

impl PeakEntry {
    pub fn from_peak(p: &BeamPeak<f64>) -> Self {
        Self {
            theta_deg: p.direction.theta().to_degrees(),
            phi_deg: p.direction.phi().to_degrees(),
            level_dbi: p.level_dbi,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeaksFile {
    pub peaks: Vec<PeakEntry>,
}

/// One synthesis target matched against the circularly nearest found peak;
/// match fields are null when the cut produced no peaks at all.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TargetMatch {
    pub target_phi_deg: f64,
    pub matched_phi_deg: Option<f64>,
    pub offset_deg: Option<f64>,
    pub level_dbi: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SynthReportFile {
    pub peaks: Vec<PeakEntry>,
    pub targets: Vec<TargetMatch>,
    pub misfit: f64,
    pub underdetermined: bool,
}

/// `theta_deg,phi_deg,re,im,mag_db,phase_deg`, theta-outer; `re`/`im` are
/// the raw field samples, `mag_db` is normalized so the pattern maximum
/// sits at 0 dB and floored at −300 dB.
pub fn write_pattern_csv(path: &Path, pattern: &RadiationPattern<f64>) -> Result<()> {
    let max = pattern
        .values()
        .iter()
        .flatten()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    if max <= 0.0 {
        return Err(Error::DegeneratePattern(
            "pattern is identically zero; nothing to export".into(),
        ));
    }
    let mut out = String::with_capacity(64 * pattern.n_theta() * pattern.n_phi());
    out.push_str("theta_deg,phi_deg,re,im,mag_db,phase_deg\n");
    for (i, &theta) in pattern.theta_samples().iter().enumerate() {
        for (j, &phi) in pattern.phi_samples().iter().enumerate() {
            let v = pattern.values()[i][j];
            let mag_db = (20.0 * (v.norm() / max).log10()).max(PATTERN_DB_FLOOR);
            let phase_deg = v.im.atan2(v.re).to_degrees();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                g9(theta.to_degrees()),
                g9(phi.to_degrees()),
                g9(v.re),
                g9(v.im),
                g9(mag_db),
                g9(phase_deg)
            )
            .expect("string writes are infallible");
        }
    }
    write_text(path, out)
}

/// `x_mm,y_mm,re,im,mag_norm,phase_deg`, x-outer; the whole complex grid is
/// normalized by its maximum magnitude, so `mag_norm = hypot(re, im)` and
/// the peak cell reads exactly 1.
pub fn write_fieldgrid_csv(path: &Path, grid: &FieldGrid<f64>) -> Result<()> {
    let max = grid.max_magnitude();
    if max <= 0.0 {
        return Err(Error::DegeneratePattern(
            "near field is identically zero; nothing to export".into(),
        ));
    }
    let mut out = String::with_capacity(64 * grid.x_samples().len() * grid.y_samples().len());
    out.push_str("x_mm,y_mm,re,im,mag_norm,phase_deg\n");
    for (ix, &x) in grid.x_samples().iter().enumerate() {
        for (iy, &y) in grid.y_samples().iter().enumerate() {
            let v = grid.values()[ix][iy] / max;
            let phase_deg = v.im.atan2(v.re).to_degrees();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                g9(x * 1e3),
                g9(y * 1e3),
                g9(v.re),
                g9(v.im),
                g9(v.norm()),
                g9(phase_deg)
            )
            .expect("string writes are infallible");
        }
    }
    write_text(path, out)
}

/// `x_mm,y_mm,value`, x-outer, one file per frame. `scale` is the parent
/// grid's maximum magnitude so all frames share one normalization.
pub fn write_snapshot_csv(
    path: &Path,
    grid: &FieldGrid<f64>,
    frame: &[Vec<f64>],
    scale: f64,
) -> Result<()> {
    let mut out = String::with_capacity(32 * grid.x_samples().len() * grid.y_samples().len());
    out.push_str("x_mm,y_mm,value\n");
    for (ix, &x) in grid.x_samples().iter().enumerate() {
        for (iy, &y) in grid.y_samples().iter().enumerate() {
            writeln!(out, "{},{},{}", g9(x * 1e3), g9(y * 1e3), g9(frame[ix][iy] / scale))
                .expect("string writes are infallible");
        }
    }
    write_text(path, out)
}
