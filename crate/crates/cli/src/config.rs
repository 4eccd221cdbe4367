//! JSON run configuration.
//!
//! Parsing goes through a permissive-in-shape, strict-in-keys raw layer; the
//! result has every default filled in and serializes back to a document that
//! loads to the same value.

use std::fmt;
use std::path::Path;

use maglat_core::atom::AtomSpecies;
use maglat_core::field::{CrossTerm, LatticeParams};
use maglat_core::magnetostatics::FiniteLatticeSpec;
use maglat_core::sweep::{BiasAxis, SweepPlan};
use maglat_core::trap::{GridDims, SearchRegion, TrapTolerances};
use maglat_core::{BiasField, LatticeModel, Point};
use serde::{Deserialize, Serialize};

pub const MAX_GRID_POINTS_PER_AXIS: usize = 2048;
const MAX_HOLES_PER_SIDE: usize = 256;
const LENGTH_RANGE: (f64, f64) = (1e-9, 1e-2);
const MAX_MAGNETIZATION: f64 = 1e7;
const MAX_BIAS: f64 = 10.0;
const DEFAULT_CLAMPED_FRACTION: f64 = 0.01;
const DEFAULT_PROFILE_SAMPLES: usize = 512;

/// A config problem, tied to the offending field where there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: Some(field.into()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.field {
            Some(field) => write!(f, "{field}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Infinite,
    InfiniteAsPrinted,
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bias {
    #[serde(default)]
    pub bx: f64,
    #[serde(default)]
    pub by: f64,
    #[serde(default)]
    pub bz: f64,
}

impl From<Bias> for BiasField {
    fn from(b: Bias) -> Self {
        BiasField::new(b.bx, b.by, b.bz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

impl From<Region> for SearchRegion {
    fn from(r: Region) -> Self {
        SearchRegion::new(Point::from(r.min), Point::from(r.max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl From<Grid> for GridDims {
    fn from(g: Grid) -> Self {
        GridDims::new(g.nx, g.ny, g.nz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfiniteGeometry {
    pub alpha_h: f64,
    pub alpha_s: f64,
    pub tau: f64,
    pub m_z: f64,
    pub symmetry_plane_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteGeometry {
    pub m_blocks: usize,
    pub n_holes: usize,
    pub alpha_h: f64,
    pub alpha_s: f64,
    pub tau: f64,
    pub m_z: f64,
    pub wall_margin: f64,
    pub block_gap: f64,
    pub film_top_z: f64,
    pub finite_chip: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// T/m
    pub grad_tol: f64,
    /// m
    pub merge_radius: f64,
    /// m
    pub band_z_tolerance: f64,
    pub max_iters: usize,
    /// T
    pub zero_field_tol: f64,
    /// Largest share of grid points allowed a clamped radicand before the run fails.
    pub max_clamped_fraction: f64,
    /// Samples along each barrier path for the tunnelling estimate.
    pub profile_samples: usize,
}

impl Tolerances {
    pub fn trap(&self) -> TrapTolerances {
        TrapTolerances {
            grad_tol: self.grad_tol,
            merge_radius: self.merge_radius,
            band_z_tolerance: self.band_z_tolerance,
            max_iters: self.max_iters,
            zero_field_tol: self.zero_field_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: BiasAxis,
    /// Tesla, strictly monotone.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMap {
    pub region: Region,
    pub grid: Grid,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Config {
    pub model: ModelKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub infinite: Option<InfiniteGeometry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub finite: Option<FiniteGeometry>,
    pub bias: Bias,
    pub species: AtomSpecies,
    pub region: Region,
    pub grid: Grid,
    pub tolerances: Tolerances,
    pub chi: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    pub field_map: FieldMap,
}

// ---- raw layer ----

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: ModelKind,
    infinite: Option<RawInfinite>,
    finite: Option<RawFinite>,
    bias: Option<Bias>,
    species: Option<RawSpecies>,
    region: Option<Region>,
    grid: Option<Grid>,
    tolerances: Option<RawTolerances>,
    chi: Option<f64>,
    sweep: Option<RawSweep>,
    field_map: Option<RawFieldMap>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInfinite {
    alpha_h: f64,
    alpha_s: Option<f64>,
    tau: f64,
    m_z: f64,
    symmetry_plane_z: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFinite {
    m_blocks: usize,
    n_holes: usize,
    alpha_h: f64,
    alpha_s: Option<f64>,
    tau: f64,
    m_z: f64,
    wall_margin: Option<f64>,
    block_gap: Option<f64>,
    film_top_z: Option<f64>,
    finite_chip: Option<bool>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSpecies {
    Name(String),
    Inline(InlineSpecies),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InlineSpecies {
    name: String,
    mass: f64,
    g_f: f64,
    m_f: f64,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    grad_tol: Option<f64>,
    merge_radius: Option<f64>,
    band_z_tolerance: Option<f64>,
    max_iters: Option<usize>,
    zero_field_tol: Option<f64>,
    max_clamped_fraction: Option<f64>,
    profile_samples: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    axis: BiasAxis,
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    steps: Option<usize>,
    /// `start`/`stop` are multiples of the film's surface induction.
    #[serde(default)]
    relative_to_b_o: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFieldMap {
    region: Option<Region>,
    grid: Option<Grid>,
}

// ---- loading ----

pub fn load_config(path: &Path) -> Result<Config, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        field: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config(&text).map_err(|mut e| {
        if e.field.is_none() {
            e.message = format!("{}: {}", path.display(), e.message);
        }
        e
    })
}

pub fn parse_config(text: &str) -> Result<Config, ConfigError> {
    let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError {
        field: None,
        message: e.to_string(),
    })?;
    resolve(raw)
}

/// Canonical single-line JSON of the resolved config.
pub fn emit_config(config: &Config) -> String {
    serde_json::to_string(config).expect("config serializes")
}

fn check_length(field: &str, v: f64) -> Result<(), ConfigError> {
    let (lo, hi) = LENGTH_RANGE;
    if v.is_finite() && v > lo && v <= hi {
        Ok(())
    } else {
        Err(ConfigError::at(
            field,
            format!("{v:e} is outside ({lo:e}, {hi:e}] m; lengths are in metres"),
        ))
    }
}

fn check_magnetization(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 && v <= MAX_MAGNETIZATION {
        Ok(())
    } else {
        Err(ConfigError::at(
            field,
            format!("{v:e} is outside (0, {MAX_MAGNETIZATION:e}] A/m"),
        ))
    }
}

fn check_positive(field: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::at(
            field,
            format!("must be positive and finite, got {v:e}"),
        ))
    }
}

fn check_grid(field: &str, g: &Grid, min: usize) -> Result<(), ConfigError> {
    for (axis, n) in [("nx", g.nx), ("ny", g.ny), ("nz", g.nz)] {
        if n < min || n > MAX_GRID_POINTS_PER_AXIS {
            return Err(ConfigError::at(
                format!("{field}.{axis}"),
                format!("{n} is outside [{min}, {MAX_GRID_POINTS_PER_AXIS}]"),
            ));
        }
    }
    Ok(())
}

fn check_region(field: &str, r: &Region, film_top: f64) -> Result<(), ConfigError> {
    for k in 0..3 {
        if !(r.min[k].is_finite() && r.max[k].is_finite()) {
            return Err(ConfigError::at(field, "bounds must be finite"));
        }
        if r.max[k] < r.min[k] {
            return Err(ConfigError::at(
                field,
                format!(
                    "max[{k}] = {:e} is below min[{k}] = {:e}",
                    r.max[k], r.min[k]
                ),
            ));
        }
    }
    if r.min[2] < film_top {
        return Err(ConfigError::at(
            format!("{field}.min"),
            format!(
                "z = {:e} m is below the film top at {film_top:e} m",
                r.min[2]
            ),
        ));
    }
    Ok(())
}

fn resolve_geometry(
    raw: &RawConfig,
) -> Result<(Option<InfiniteGeometry>, Option<FiniteGeometry>), ConfigError> {
    match (raw.model, &raw.infinite, &raw.finite) {
        (_, Some(_), Some(_)) => Err(ConfigError::at(
            "model",
            "exactly one geometry block is allowed, found both `infinite` and `finite`",
        )),
        (ModelKind::Infinite | ModelKind::InfiniteAsPrinted, Some(g), None) => {
            let alpha_s = g.alpha_s.unwrap_or(g.alpha_h);
            check_length("infinite.alpha_h", g.alpha_h)?;
            check_length("infinite.alpha_s", alpha_s)?;
            check_length("infinite.tau", g.tau)?;
            check_magnetization("infinite.m_z", g.m_z)?;
            let symmetry_plane_z = g.symmetry_plane_z.unwrap_or(0.0);
            if !symmetry_plane_z.is_finite() {
                return Err(ConfigError::at(
                    "infinite.symmetry_plane_z",
                    "must be finite",
                ));
            }
            if alpha_s != g.alpha_h {
                return Err(ConfigError::at(
                    "infinite.alpha_s",
                    format!(
                        "the infinite model requires alpha_h == alpha_s (got {:e} and {alpha_s:e}); \
                         use the finite model for unequal hole size and spacing",
                        g.alpha_h
                    ),
                ));
            }
            Ok((
                Some(InfiniteGeometry {
                    alpha_h: g.alpha_h,
                    alpha_s,
                    tau: g.tau,
                    m_z: g.m_z,
                    symmetry_plane_z,
                }),
                None,
            ))
        }
        (ModelKind::Finite, None, Some(g)) => {
            let alpha_s = g.alpha_s.unwrap_or(g.alpha_h);
            check_length("finite.alpha_h", g.alpha_h)?;
            check_length("finite.alpha_s", alpha_s)?;
            check_length("finite.tau", g.tau)?;
            check_magnetization("finite.m_z", g.m_z)?;
            for (name, n) in [
                ("finite.m_blocks", g.m_blocks),
                ("finite.n_holes", g.n_holes),
            ] {
                if n == 0 {
                    return Err(ConfigError::at(name, "must be at least 1"));
                }
            }
            if g.m_blocks * g.n_holes > MAX_HOLES_PER_SIDE {
                return Err(ConfigError::at(
                    "finite.n_holes",
                    format!("m_blocks × n_holes must not exceed {MAX_HOLES_PER_SIDE}"),
                ));
            }
            let base =
                FiniteLatticeSpec::new(g.m_blocks, g.n_holes, g.alpha_h, alpha_s, g.tau, g.m_z);
            let wall_margin = g.wall_margin.unwrap_or(base.wall_margin);
            let block_gap = g.block_gap.unwrap_or(base.block_gap);
            check_length("finite.wall_margin", wall_margin)?;
            check_length("finite.block_gap", block_gap)?;
            let film_top_z = g.film_top_z.unwrap_or(base.film_top_z);
            if !film_top_z.is_finite() {
                return Err(ConfigError::at("finite.film_top_z", "must be finite"));
            }
            Ok((
                None,
                Some(FiniteGeometry {
                    m_blocks: g.m_blocks,
                    n_holes: g.n_holes,
                    alpha_h: g.alpha_h,
                    alpha_s,
                    tau: g.tau,
                    m_z: g.m_z,
                    wall_margin,
                    block_gap,
                    film_top_z,
                    finite_chip: g.finite_chip.unwrap_or(false),
                }),
            ))
        }
        (ModelKind::Finite, _, None) => Err(ConfigError::at(
            "finite",
            "model `finite` needs a `finite` geometry block",
        )),
        (_, None, _) => Err(ConfigError::at(
            "infinite",
            "this model needs an `infinite` geometry block",
        )),
    }
}

/// Grid at spacing `α/8` over `region`, at least 3 and at most the axis cap.
fn default_grid(region: &Region, alpha: f64) -> Grid {
    let n = |k: usize| {
        let span = region.max[k] - region.min[k];
        ((span / (0.125 * alpha) - 1e-9).ceil() as usize + 1).clamp(3, MAX_GRID_POINTS_PER_AXIS)
    };
    Grid {
        nx: n(0),
        ny: n(1),
        nz: n(2),
    }
}

fn resolve(raw: RawConfig) -> Result<Config, ConfigError> {
    let (infinite, finite) = resolve_geometry(&raw)?;
    let mut config = Config {
        model: raw.model,
        infinite,
        finite,
        bias: raw.bias.unwrap_or(Bias {
            bx: 0.0,
            by: 0.0,
            bz: 0.0,
        }),
        species: AtomSpecies::potassium_40(),
        region: Region {
            min: [0.0; 3],
            max: [0.0; 3],
        },
        grid: Grid {
            nx: 0,
            ny: 0,
            nz: 0,
        },
        tolerances: Tolerances {
            grad_tol: 0.0,
            merge_radius: 0.0,
            band_z_tolerance: 0.0,
            max_iters: 0,
            zero_field_tol: 0.0,
            max_clamped_fraction: 0.0,
            profile_samples: 0,
        },
        chi: raw.chi.unwrap_or(0.0),
        sweep: None,
        field_map: FieldMap {
            region: Region {
                min: [0.0; 3],
                max: [0.0; 3],
            },
            grid: Grid {
                nx: 0,
                ny: 0,
                nz: 0,
            },
        },
    };
    let model = config.lattice_model();
    let alpha = model.alpha();
    let film_top = model.film_top();
    let b_o = model.surface_induction();

    for (name, v) in [
        ("bias.bx", config.bias.bx),
        ("bias.by", config.bias.by),
        ("bias.bz", config.bias.bz),
    ] {
        if !(v.is_finite() && v.abs() <= MAX_BIAS) {
            return Err(ConfigError::at(
                name,
                format!("{v:e} T is outside [−{MAX_BIAS}, {MAX_BIAS}] T"),
            ));
        }
    }

    config.species = match raw.species {
        None => AtomSpecies::potassium_40(),
        Some(RawSpecies::Name(name)) => AtomSpecies::by_name(&name).ok_or_else(|| {
            ConfigError::at(
                "species",
                format!("unknown species `{name}` (known: K40, Li6)"),
            )
        })?,
        Some(RawSpecies::Inline(s)) => AtomSpecies {
            name: s.name,
            mass: s.mass,
            g_f: s.g_f,
            m_f: s.m_f,
        },
    };
    config
        .species
        .validate()
        .map_err(|e| ConfigError::at("species", e.to_string()))?;

    config.region = raw.region.unwrap_or_else(|| {
        let half = match &config.finite {
            Some(g) => FiniteLatticeSpec::from(*g).array_half_width() + alpha,
            None => alpha,
        };
        Region {
            min: [-half, -half, film_top + 0.1 * alpha],
            max: [half, half, film_top + 4.0 * alpha],
        }
    });
    check_region("region", &config.region, film_top)?;
    config.grid = raw
        .grid
        .unwrap_or_else(|| default_grid(&config.region, alpha));
    check_grid("grid", &config.grid, 3)?;

    let defaults = TrapTolerances::for_scales(alpha, b_o);
    let t = raw.tolerances.unwrap_or_default();
    config.tolerances = Tolerances {
        grad_tol: t.grad_tol.unwrap_or(defaults.grad_tol),
        merge_radius: t.merge_radius.unwrap_or(defaults.merge_radius),
        band_z_tolerance: t.band_z_tolerance.unwrap_or(defaults.band_z_tolerance),
        max_iters: t.max_iters.unwrap_or(defaults.max_iters),
        zero_field_tol: t.zero_field_tol.unwrap_or(defaults.zero_field_tol),
        max_clamped_fraction: t.max_clamped_fraction.unwrap_or(DEFAULT_CLAMPED_FRACTION),
        profile_samples: t.profile_samples.unwrap_or(DEFAULT_PROFILE_SAMPLES),
    };
    let tol = &config.tolerances;
    check_positive("tolerances.grad_tol", tol.grad_tol)?;
    check_positive("tolerances.merge_radius", tol.merge_radius)?;
    check_positive("tolerances.band_z_tolerance", tol.band_z_tolerance)?;
    check_positive("tolerances.zero_field_tol", tol.zero_field_tol)?;
    if tol.max_iters == 0 || tol.max_iters > 100_000 {
        return Err(ConfigError::at(
            "tolerances.max_iters",
            "must be in [1, 100000]",
        ));
    }
    if !(0.0..=1.0).contains(&tol.max_clamped_fraction) {
        return Err(ConfigError::at(
            "tolerances.max_clamped_fraction",
            "must be in [0, 1]",
        ));
    }
    if tol.profile_samples < maglat_core::atom::MIN_PROFILE_SAMPLES || tol.profile_samples > 1 << 20
    {
        return Err(ConfigError::at(
            "tolerances.profile_samples",
            format!(
                "must be in [{}, {}]",
                maglat_core::atom::MIN_PROFILE_SAMPLES,
                1 << 20
            ),
        ));
    }

    if !(config.chi.is_finite() && config.chi >= 0.0 && config.chi <= 100.0) {
        return Err(ConfigError::at(
            "chi",
            format!("{:e} is outside [0, 100]", config.chi),
        ));
    }

    if let Some(s) = raw.sweep {
        config.sweep = Some(resolve_sweep(s, b_o)?);
    }

    let map = raw.field_map.unwrap_or(RawFieldMap {
        region: None,
        grid: None,
    });
    let map_region = map.region.unwrap_or(config.region);
    check_region("field_map.region", &map_region, film_top)?;
    let map_grid = map.grid.unwrap_or(config.grid);
    check_grid("field_map.grid", &map_grid, 1)?;
    config.field_map = FieldMap {
        region: map_region,
        grid: map_grid,
    };
    Ok(config)
}

fn resolve_sweep(s: RawSweep, b_o: f64) -> Result<Sweep, ConfigError> {
    let values = match (s.values, s.start, s.stop, s.steps) {
        (Some(v), None, None, None) => {
            if s.relative_to_b_o {
                return Err(ConfigError::at(
                    "sweep.relative_to_b_o",
                    "only applies to start/stop ranges",
                ));
            }
            v
        }
        (None, Some(start), Some(stop), Some(steps)) => {
            if steps < 2 {
                return Err(ConfigError::at(
                    "sweep.steps",
                    "a range needs at least 2 steps",
                ));
            }
            let scale = if s.relative_to_b_o { b_o } else { 1.0 };
            (0..steps)
                .map(|i| scale * (start + (stop - start) * i as f64 / (steps - 1) as f64))
                .collect()
        }
        _ => {
            return Err(ConfigError::at(
                "sweep",
                "give either `values` or all of `start`, `stop` and `steps`",
            ))
        }
    };
    if values.is_empty() {
        return Err(ConfigError::at("sweep.values", "must not be empty"));
    }
    if let Some(v) = values
        .iter()
        .find(|v| !(v.is_finite() && v.abs() <= MAX_BIAS))
    {
        return Err(ConfigError::at(
            "sweep.values",
            format!("{v:e} T is outside [−{MAX_BIAS}, {MAX_BIAS}] T"),
        ));
    }
    let up = values.windows(2).all(|w| w[1] > w[0]);
    let down = values.windows(2).all(|w| w[1] < w[0]);
    if !(up || down) {
        return Err(ConfigError::at("sweep.values", "must be strictly monotone"));
    }
    Ok(Sweep {
        axis: s.axis,
        values,
    })
}

impl From<FiniteGeometry> for FiniteLatticeSpec {
    fn from(g: FiniteGeometry) -> Self {
        let mut spec =
            FiniteLatticeSpec::new(g.m_blocks, g.n_holes, g.alpha_h, g.alpha_s, g.tau, g.m_z);
        spec.wall_margin = g.wall_margin;
        spec.block_gap = g.block_gap;
        spec.film_top_z = g.film_top_z;
        spec.finite_chip = g.finite_chip;
        spec
    }
}

impl Config {
    pub fn lattice_model(&self) -> LatticeModel {
        match (self.model, self.infinite, self.finite) {
            (ModelKind::Finite, _, Some(g)) => LatticeModel::Finite(g.into()),
            (kind, Some(g), _) => LatticeModel::Infinite {
                params: LatticeParams {
                    alpha_h: g.alpha_h,
                    alpha_s: g.alpha_s,
                    tau: g.tau,
                    m_z: g.m_z,
                    symmetry_plane_z: g.symmetry_plane_z,
                },
                cross_term: if kind == ModelKind::InfiniteAsPrinted {
                    CrossTerm::AsPrinted
                } else {
                    CrossTerm::Dimensional
                },
            },
            _ => unreachable!("geometry block checked at load"),
        }
    }

    pub fn bias_field(&self) -> BiasField {
        self.bias.into()
    }

    pub fn search_region(&self) -> SearchRegion {
        self.region.into()
    }

    pub fn grid_dims(&self) -> GridDims {
        self.grid.into()
    }

    pub fn sweep_plan(&self) -> Option<SweepPlan> {
        self.sweep.as_ref().map(|s| SweepPlan {
            axis: s.axis,
            values: s.values.clone(),
            chi: self.chi,
            region: self.search_region(),
            grid: self.grid_dims(),
            tolerances: self.tolerances.trap(),
        })
    }
}
