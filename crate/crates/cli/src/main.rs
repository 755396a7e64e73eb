//! `carray` — file-based front end for the circular-array toolkit.
//!
//! Subcommands mirror the library pipeline: generate excitations, evaluate
//! far-field patterns and directivity, map near fields above the array,
//! synthesize beams from azimuth targets, decompose excitations into mode
//! spectra, and hunt prominent beam peaks. Angles are degrees and lengths
//! millimetres at this boundary; everything inside is radians and metres.
//!
//! Exit codes: 0 success; 2 usage or validation failure (bad flags, bad
//! config, unparseable files, out-of-range arguments); 3 numerically
//! degenerate result (all-zero pattern or field, singular synthesis system).

mod config;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use carray_core::farfield::{
    default_grids, directivity, find_beam_peaks, sample_pattern, DirectivityTarget,
    RadiationPattern,
};
use carray_core::geometry::ArrayGeometry;
use carray_core::modes::{
    mix_modes, mode_decompose, oam_excitation, phase_mode_excitation, ExcitationVector,
};
use carray_core::nearfield::{efield_on_plane, time_snapshots};
use carray_core::synthesis::{preset, synthesize, BeamTarget, SynthesisProblem, DEFAULT_RIDGE};
use carray_core::Error;
use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "carray",
    version,
    about = "Multimode circular antenna array: excitations, patterns, near fields, synthesis"
)]
struct Cli {
    /// JSON run configuration; built-in 12-element 28 GHz defaults when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (precedence: this flag, config `output_dir`, ".").
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an excitation vector to excitation.json.
    Excite(ExciteArgs),
    /// Evaluate the far field: pattern.csv plus directivity.json.
    Pattern {
        /// Excitation JSON file.
        excitation: PathBuf,
    },
    /// Directivity report only: directivity.json.
    Directivity {
        /// Excitation JSON file.
        excitation: PathBuf,
    },
    /// Map the near field on a plane: nearfield.csv (+ frame CSVs).
    Nearfield {
        /// Excitation JSON file.
        excitation: PathBuf,
        /// Plane height above the array, in wavelengths.
        #[arg(long, default_value_t = 2.0)]
        z_lambda: f64,
        /// Also write this many time-snapshot frames (nearfield_tNNN.csv).
        #[arg(long, value_name = "T")]
        frames: Option<usize>,
    },
    /// Solve a beam-synthesis problem: spectrum.json plus synth_report.json.
    Synth {
        /// Problem JSON file: {"targets_deg", "levels", "modes"?, "ridge"?}.
        problem: PathBuf,
    },
    /// Project an excitation onto the mode window: spectrum.json.
    Decompose {
        /// Excitation JSON file.
        excitation: PathBuf,
    },
    /// List prominent beam peaks on the horizon cut: peaks.json.
    Peaks {
        /// Excitation JSON file.
        excitation: PathBuf,
        /// Minimum peak prominence in dB.
        #[arg(long, default_value_t = 3.0)]
        prominence_db: f64,
    },
}

#[derive(Args)]
struct ExciteArgs {
    /// Single phase-mode feed; pair with -m.
    #[arg(long, requires = "mode", conflicts_with_all = ["oam", "spectrum", "preset"])]
    phase: bool,

    /// OAM vortex feed; pair with -l.
    #[arg(long, requires = "charge", conflicts_with_all = ["spectrum", "preset"])]
    oam: bool,

    /// Mode index m for --phase.
    #[arg(short = 'm', value_name = "M", allow_hyphen_values = true, requires = "phase")]
    mode: Option<i32>,

    /// Topological charge l for --oam.
    #[arg(short = 'l', value_name = "L", allow_hyphen_values = true, requires = "oam")]
    charge: Option<i32>,

    /// Mix a mode-spectrum JSON file into element weights.
    #[arg(long, value_name = "PATH", conflicts_with = "preset")]
    spectrum: Option<PathBuf>,

    /// Stock spectrum: broadcast, unicast-a, unicast-b, multicast-120.
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,
}

/// Failures split by exit code: 2 for anything wrong with the request,
/// 3 for well-posed requests whose numbers came out meaningless.
enum CliError {
    Usage(String),
    Degenerate(String),
}

impl CliError {
    fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        if e.is_degenerate() {
            Self::Degenerate(msg)
        } else {
            Self::Usage(msg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(msg) = configure_threads() {
        eprintln!("carray: {msg}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("carray: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Degenerate(msg)) => {
            eprintln!("carray: {msg}");
            ExitCode::from(3)
        }
    }
}

/// CARRAY_THREADS caps the rayon pool; unset keeps the library default.
fn configure_threads() -> Result<(), String> {
    let raw = match std::env::var("CARRAY_THREADS") {
        Err(std::env::VarError::NotPresent) => return Ok(()),
        Err(e) => return Err(format!("CARRAY_THREADS: {e}")),
        Ok(raw) => raw,
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("CARRAY_THREADS must be a positive integer, got \"{raw}\""))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| format!("cannot size the thread pool: {e}"))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out).map_err(|e| {
        CliError::usage(format!(
            "cannot create output directory {}: {e}",
            out.display()
        ))
    })?;
    match &cli.command {
        Command::Excite(args) => cmd_excite(&cfg, &out, args),
        Command::Pattern { excitation } => cmd_pattern(&cfg, &out, excitation, true),
        Command::Directivity { excitation } => cmd_pattern(&cfg, &out, excitation, false),
        Command::Nearfield {
            excitation,
            z_lambda,
            frames,
        } => cmd_nearfield(&cfg, &out, excitation, *z_lambda, *frames),
        Command::Synth { problem } => cmd_synth(&cfg, &out, problem),
        Command::Decompose { excitation } => cmd_decompose(&cfg, &out, excitation),
        Command::Peaks {
            excitation,
            prominence_db,
        } => cmd_peaks(&cfg, &out, excitation, *prominence_db),
    }
}

fn load_excitation(path: &Path) -> Result<ExcitationVector<f64>, CliError> {
    let file: io::ExcitationFile = io::read_json(path)?;
    Ok(file.into_vector()?)
}

fn sphere_pattern(
    cfg: &RunConfig,
    geom: &ArrayGeometry<f64>,
    excitation: &ExcitationVector<f64>,
) -> Result<RadiationPattern<f64>, CliError> {
    let model = cfg.build_element()?;
    let (thetas, phis) = default_grids(cfg.grid.n_theta, cfg.grid.n_phi);
    Ok(sample_pattern(geom, &model, excitation, &thetas, &phis)?)
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

fn cmd_excite(cfg: &RunConfig, out: &Path, args: &ExciteArgs) -> Result<(), CliError> {
    let geom = cfg.build_geometry()?;
    let excitation = if args.phase {
        let m = args.mode.expect("clap enforces --phase together with -m");
        geom.check_mode(m)?;
        phase_mode_excitation(&geom, m)
    } else if args.oam {
        let l = args.charge.expect("clap enforces --oam together with -l");
        geom.check_mode(l)?;
        oam_excitation(&geom, l)
    } else if let Some(path) = &args.spectrum {
        let file: io::SpectrumFile = io::read_json(path)?;
        mix_modes(&geom, &file.into_spectrum()?)?
    } else if let Some(name) = &args.preset {
        let model = cfg.build_element()?;
        mix_modes(&geom, &preset(name, &geom, &model)?)?
    } else {
        return Err(CliError::usage(
            "one of --phase, --oam, --spectrum, --preset is required",
        ));
    };
    let path = out.join("excitation.json");
    io::write_json(&path, &io::ExcitationFile::from_vector(&excitation))?;
    announce(&path);
    Ok(())
}

fn cmd_pattern(
    cfg: &RunConfig,
    out: &Path,
    excitation: &Path,
    with_csv: bool,
) -> Result<(), CliError> {
    let geom = cfg.build_geometry()?;
    let exc = load_excitation(excitation)?;
    let pattern = sphere_pattern(cfg, &geom, &exc)?;
    // Directivity first: a degenerate pattern must fail before any file
    // lands on disk.
    let report = directivity(&pattern, DirectivityTarget::Peak)?;
    if with_csv {
        let csv_path = out.join("pattern.csv");
        io::write_pattern_csv(&csv_path, &pattern)?;
        announce(&csv_path);
    }
    let json_path = out.join("directivity.json");
    io::write_json(&json_path, &io::DirectivityFile::from_report(&report))?;
    announce(&json_path);
    Ok(())
}

fn cmd_nearfield(
    cfg: &RunConfig,
    out: &Path,
    excitation: &Path,
    z_lambda: f64,
    frames: Option<usize>,
) -> Result<(), CliError> {
    if let Some(n) = frames {
        if n == 0 {
            return Err(CliError::usage("--frames needs at least one frame"));
        }
        if n > 1000 {
            return Err(CliError::usage(format!(
                "--frames supports at most 1000 frames (three-digit suffix), got {n}"
            )));
        }
    }
    let geom = cfg.build_geometry()?;
    let model = cfg.build_element()?;
    let exc = load_excitation(excitation)?;
    let lambda = geom.wavelength();
    let grid = efield_on_plane(
        &geom,
        &model,
        &exc,
        z_lambda * lambda,
        cfg.grid.half_extent_lambda * lambda,
        cfg.grid.samples_per_axis,
    )?;
    let scale = grid.max_magnitude();
    if scale <= 0.0 {
        return Err(CliError::Degenerate(
            "near field is identically zero; nothing to export".into(),
        ));
    }
    let path = out.join("nearfield.csv");
    io::write_fieldgrid_csv(&path, &grid)?;
    announce(&path);
    if let Some(n) = frames {
        for (t, frame) in time_snapshots(&grid, n).iter().enumerate() {
            let path = out.join(format!("nearfield_t{t:03}.csv"));
            io::write_snapshot_csv(&path, &grid, frame, scale)?;
            announce(&path);
        }
    }
    Ok(())
}

fn cmd_synth(cfg: &RunConfig, out: &Path, problem: &Path) -> Result<(), CliError> {
    let file: io::ProblemFile = io::read_json(problem)?;
    if file.targets_deg.len() != file.levels.len() {
        return Err(CliError::usage(format!(
            "problem lists {} targets but {} levels",
            file.targets_deg.len(),
            file.levels.len()
        )));
    }
    let geom = cfg.build_geometry()?;
    let model = cfg.build_element()?;
    let targets: Vec<BeamTarget<f64>> = file
        .targets_deg
        .iter()
        .zip(&file.levels)
        .map(|(&deg, &level)| BeamTarget::new(deg.to_radians(), level))
        .collect();
    let ridge = file.ridge.unwrap_or(DEFAULT_RIDGE);
    let problem = match file.modes {
        Some(modes) => SynthesisProblem::new(&geom, &model, targets, modes, ridge)?,
        None => {
            let mut p = SynthesisProblem::with_default_modes(&geom, &model, targets)?;
            p.set_ridge(ridge)?;
            p
        }
    };
    let outcome = synthesize(&problem)?;

    // Verification pass: mix the spectrum, evaluate the pattern, and match
    // every target against the circularly nearest found peak.
    let exc = mix_modes(&geom, &outcome.spectrum)?;
    let pattern = sphere_pattern(cfg, &geom, &exc)?;
    let peaks = find_beam_peaks(&pattern, 3.0)?;
    let target_matches: Vec<io::TargetMatch> = problem
        .targets()
        .iter()
        .map(|t| {
            let target_phi_deg = t.azimuth.to_degrees();
            let best = peaks.iter().min_by(|a, b| {
                let da = circular_offset_deg(a.direction.phi().to_degrees(), target_phi_deg).abs();
                let db = circular_offset_deg(b.direction.phi().to_degrees(), target_phi_deg).abs();
                da.total_cmp(&db)
            });
            match best {
                Some(p) => {
                    let matched = p.direction.phi().to_degrees();
                    io::TargetMatch {
                        target_phi_deg,
                        matched_phi_deg: Some(matched),
                        offset_deg: Some(circular_offset_deg(matched, target_phi_deg)),
                        level_dbi: Some(p.level_dbi),
                    }
                }
                None => io::TargetMatch {
                    target_phi_deg,
                    matched_phi_deg: None,
                    offset_deg: None,
                    level_dbi: None,
                },
            }
        })
        .collect();

    let spectrum_path = out.join("spectrum.json");
    io::write_json(
        &spectrum_path,
        &io::SpectrumFile::from_spectrum(&outcome.spectrum),
    )?;
    announce(&spectrum_path);
    let report_path = out.join("synth_report.json");
    io::write_json(
        &report_path,
        &io::SynthReportFile {
            peaks: peaks.iter().map(io::PeakEntry::from_peak).collect(),
            targets: target_matches,
            misfit: outcome.misfit,
            underdetermined: outcome.underdetermined,
        },
    )?;
    announce(&report_path);
    Ok(())
}

fn cmd_decompose(cfg: &RunConfig, out: &Path, excitation: &Path) -> Result<(), CliError> {
    let geom = cfg.build_geometry()?;
    let exc = load_excitation(excitation)?;
    let spectrum = mode_decompose(&geom, &exc)?;
    let path = out.join("spectrum.json");
    io::write_json(&path, &io::SpectrumFile::from_spectrum(&spectrum))?;
    announce(&path);
    Ok(())
}

fn cmd_peaks(
    cfg: &RunConfig,
    out: &Path,
    excitation: &Path,
    prominence_db: f64,
) -> Result<(), CliError> {
    let geom = cfg.build_geometry()?;
    let exc = load_excitation(excitation)?;
    let pattern = sphere_pattern(cfg, &geom, &exc)?;
    let peaks = find_beam_peaks(&pattern, prominence_db)?;
    let path = out.join("peaks.json");
    io::write_json(
        &path,
        &io::PeaksFile {
            peaks: peaks.iter().map(io::PeakEntry::from_peak).collect(),
        },
    )?;
    announce(&path);
    Ok(())
}

/// Signed circular difference a − b folded into (−180, 180].
fn circular_offset_deg(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % 360.0;
    if d <= -180.0 {
        d += 360.0;
    } else if d > 180.0 {
        d -= 360.0;
    }
    d
}
