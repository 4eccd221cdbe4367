//! Subcommand execution: everything is computed in memory first, then written.

use std::fs;
use std::path::{Path, PathBuf};

use maglat_core::atom::{
    barrier_profile, characterize_traps, wkb_transmission, zeeman_energy, PhysicsError,
    TrapCharacterization,
};
use maglat_core::constants::HBAR;
use maglat_core::field::FieldError;
use maglat_core::sweep::{analyze_point, SweepError, SweepRecord};
use maglat_core::trap::{
    analyze, barrier_between, GridDims, SearchRegion, TrapAnalysis, TrapError,
};
use rayon::prelude::*;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{emit_config, Config, ConfigError};
use crate::report::{self, Format, Header};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    FieldMap,
    Sites,
    Bands,
    Barriers,
    Levels,
    Sweep,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Numerical(_) => 2,
            Self::Io(_) => 3,
        }
    }
}

impl From<TrapError> for RunError {
    fn from(e: TrapError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<FieldError> for RunError {
    fn from(e: FieldError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<PhysicsError> for RunError {
    fn from(e: PhysicsError) -> Self {
        Self::Numerical(e.to_string())
    }
}

impl From<SweepError> for RunError {
    fn from(e: SweepError) -> Self {
        Self::Numerical(e.to_string())
    }
}

/// A file ready to be written.
pub struct Output {
    pub name: String,
    pub contents: String,
}

/// Files produced by one command plus its one-line summary.
pub struct RunResult {
    pub outputs: Vec<Output>,
    pub summary: String,
}

pub fn config_hash(config: &Config) -> String {
    Sha256::digest(emit_config(config).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn check_clamped(clamped: usize, total: usize, limit: f64) -> Result<(), RunError> {
    if clamped as f64 > limit * total as f64 {
        return Err(RunError::Numerical(format!(
            "{clamped} of {total} grid points ({:.2}%) have a negative radicand, above the \
             allowed {:.2}% (tolerances.max_clamped_fraction)",
            100.0 * clamped as f64 / total as f64,
            100.0 * limit
        )));
    }
    Ok(())
}

fn site_summary(a: &TrapAnalysis) -> String {
    let min = a
        .min_b_min()
        .map_or_else(|| "n/a".to_string(), |b| format!("{b:.6e} T"));
    format!(
        "{} sites, {} bands, min b_min {min}",
        a.sites().len(),
        a.bands.len()
    )
}

fn run_analysis(config: &Config) -> Result<TrapAnalysis, RunError> {
    let field = config.lattice_model().build(config.bias_field())?;
    let grid = config.grid_dims();
    let a = analyze(
        field.as_ref(),
        &config.search_region(),
        &grid,
        &config.tolerances.trap(),
    )?;
    check_clamped(
        a.report.clamped_points,
        grid.len(),
        config.tolerances.max_clamped_fraction,
    )?;
    Ok(a)
}

/// Harmonic data plus the WKB transmission of the lowest harmonic level
/// through the saddle towards the limiting neighbour.
pub struct LevelRow {
    pub trap: TrapCharacterization,
    pub ground_transmission: Option<f64>,
}

fn levels(config: &Config, a: &TrapAnalysis) -> Result<Vec<LevelRow>, RunError> {
    let field = config.lattice_model().build(config.bias_field())?;
    let tol = config.tolerances.trap();
    let species = &config.species;
    let traps = characterize_traps(field.as_ref(), a, species, &tol)?;
    let sites = a.sites();
    traps
        .into_par_iter()
        .map(|trap| {
            let ground_transmission = match trap.limiting_neighbour {
                None => None,
                Some(j) => {
                    let (s, t) = (&sites[trap.site], &sites[j]);
                    let saddle = barrier_between(field.as_ref(), s, t, &tol)?;
                    let (profile, length) = barrier_profile(
                        field.as_ref(),
                        species,
                        &s.position,
                        &saddle.saddle_position,
                        &t.position,
                        config.tolerances.profile_samples,
                    )?;
                    let e = zeeman_energy(species, s.b_min) + 0.5 * HBAR * trap.omegas.min();
                    Some(wkb_transmission(species, &profile, length, e)?)
                }
            };
            Ok(LevelRow {
                trap,
                ground_transmission,
            })
        })
        .collect()
}

fn field_map(config: &Config) -> Result<(Vec<f64>, Vec<bool>), RunError> {
    let field = config.lattice_model().build(config.bias_field())?;
    let region: SearchRegion = config.field_map.region.into();
    let grid: GridDims = config.field_map.grid.into();
    let samples = (0..grid.len())
        .into_par_iter()
        .map(|idx| field.magnitude(&grid.point(&region, idx)))
        .collect::<Result<Vec<_>, _>>()?;
    let clamped: Vec<bool> = samples.iter().map(|s| s.radicand_clamped).collect();
    check_clamped(
        clamped.iter().filter(|&&c| c).count(),
        grid.len(),
        config.tolerances.max_clamped_fraction,
    )?;
    Ok((samples.into_iter().map(|s| s.magnitude).collect(), clamped))
}

fn sweep(config: &Config) -> Result<Vec<SweepRecord>, RunError> {
    let plan = config.sweep_plan().ok_or_else(|| ConfigError {
        field: Some("sweep".into()),
        message: "the sweep command needs a `sweep` block".into(),
    })?;
    let base = config.lattice_model();
    plan.validate(&base)?;
    let limit = config.tolerances.max_clamped_fraction;
    let total = plan.grid.len();
    plan.values
        .par_iter()
        .map(|&v| {
            let (record, analysis) = analyze_point(&base, config.bias_field(), &plan, v)?;
            check_clamped(analysis.report.clamped_points, total, limit)?;
            Ok(record)
        })
        .collect()
}

/// Runs one command and renders its outputs.
pub fn execute(command: Command, config: &Config, format: Format) -> Result<RunResult, RunError> {
    let header = Header {
        version: env!("CARGO_PKG_VERSION"),
        config_hash: config_hash(config),
        config_json: emit_config(config),
    };
    let file = |stem: &str, contents: String| Output {
        name: format!("{stem}.{}", format.extension()),
        contents,
    };
    Ok(match command {
        Command::FieldMap => {
            let (values, clamped) = field_map(config)?;
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            RunResult {
                summary: format!(
                    "field map: {} points, {} clamped, min |B| {min:.6e} T",
                    values.len(),
                    clamped.iter().filter(|&&c| c).count()
                ),
                outputs: vec![file(
                    "field_map",
                    report::field_map(&header, format, &config.field_map, &values, &clamped),
                )],
            }
        }
        Command::Sites => {
            let a = run_analysis(config)?;
            RunResult {
                summary: site_summary(&a),
                outputs: vec![file("sites", report::sites(&header, format, a.sites()))],
            }
        }
        Command::Bands => {
            let a = run_analysis(config)?;
            RunResult {
                summary: site_summary(&a),
                outputs: vec![
                    file("bands", report::bands(&header, format, &a.bands)),
                    file(
                        "band_gaps",
                        report::band_gaps(&header, format, &a.band_gaps),
                    ),
                ],
            }
        }
        Command::Barriers => {
            let a = run_analysis(config)?;
            RunResult {
                summary: site_summary(&a),
                outputs: vec![file(
                    "barriers",
                    report::barriers(&header, format, &a.barriers),
                )],
            }
        }
        Command::Levels => {
            let a = run_analysis(config)?;
            let rows = levels(config, &a)?;
            RunResult {
                summary: site_summary(&a),
                outputs: vec![file(
                    "levels",
                    report::levels(&header, format, &config.species.name, &rows),
                )],
            }
        }
        Command::Sweep => {
            let records = sweep(config)?;
            let sites: Vec<usize> = records.iter().map(|r| r.site_count).collect();
            let min = records
                .iter()
                .filter_map(|r| r.min_b_min)
                .reduce(f64::min)
                .map_or_else(|| "n/a".to_string(), |b| format!("{b:.6e} T"));
            RunResult {
                summary: format!(
                    "sweep: {} values, {} to {} sites, up to {} bands, min b_min {min}",
                    records.len(),
                    sites.iter().min().unwrap_or(&0),
                    sites.iter().max().unwrap_or(&0),
                    records.iter().map(|r| r.band_count).max().unwrap_or(0),
                ),
                outputs: vec![file("sweep", report::sweep(&header, format, &records))],
            }
        }
    })
}

/// Writes every output into `dir`; on failure removes whatever this call wrote.
pub fn write_outputs(dir: &Path, outputs: &[Output]) -> Result<Vec<PathBuf>, RunError> {
    let io = |what: &str, p: &Path, e: std::io::Error| {
        RunError::Io(format!("{what} {}: {e}", p.display()))
    };
    fs::create_dir_all(dir).map_err(|e| io("cannot create", dir, e))?;
    let mut written = Vec::new();
    for out in outputs {
        let path = dir.join(&out.name);
        if let Err(e) = fs::write(&path, &out.contents) {
            let _ = fs::remove_file(&path);
            for p in &written {
                let _ = fs::remove_file(p);
            }
            return Err(io("cannot write", &path, e));
        }
        written.push(path);
    }
    Ok(written)
}
