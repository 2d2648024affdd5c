//! Versioned JSON run configurations, one record type per subcommand.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Deserialize;
use vortex_panel::boundary_method::EvalSet;
use vortex_panel::dynamics::{FreeVortexState, SimulationConfig};
use vortex_panel::hilbert_solver::GridKind;
use vortex_panel::{Point2, VorticityConfig};

use crate::report::CliError;

pub const SCHEMA_VERSION: u32 = 1;

/// Seed used by randomized suites when neither the config nor `--seed` sets one.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergeConfig {
    pub version: u32,
    pub vorticity: VorticityConfig,
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub eval_set: EvalSet,
    #[serde(default = "default_band")]
    pub slope_band: [f64; 2],
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_band() -> [f64; 2] {
    [-2.5, -1.7]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesConfig {
    pub version: u32,
    #[serde(default = "default_sizes")]
    pub sizes: Vec<usize>,
    #[serde(default = "default_random_vectors")]
    pub random_vectors: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "one")]
    pub tolerance_scale: f64,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_sizes() -> Vec<usize> {
    vec![2, 16, 256]
}

fn default_random_vectors() -> usize {
    20
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateConfig {
    pub version: u32,
    pub initial: InitialVortices,
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialVortices {
    pub positions: Vec<Point2>,
    pub strengths: Vec<f64>,
}

impl InitialVortices {
    pub fn to_state(&self) -> vortex_panel::Result<FreeVortexState> {
        FreeVortexState::new(self.positions.clone(), self.strengths.clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldName {
    UP,
    UR,
    UApp,
    UTotal,
    UAppMinusUR,
}

impl FieldName {
    pub fn column(self) -> &'static str {
        match self {
            FieldName::UP => "u_p",
            FieldName::UR => "u_r",
            FieldName::UApp => "u_app",
            FieldName::UTotal => "u_total",
            FieldName::UAppMinusUR => "u_app_minus_u_r",
        }
    }

    pub fn needs_boundary(self) -> bool {
        matches!(self, FieldName::UApp | FieldName::UAppMinusUR)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SampleSet {
    /// Tensor grid with `nx × ny` points spanning the closed ranges.
    Grid { x1: [f64; 2], x2: [f64; 2], nx: usize, ny: usize },
    Circle { radius: f64, points: usize },
    Points { points: Vec<Point2> },
}

impl SampleSet {
    pub fn points(&self) -> Result<Vec<Point2>, CliError> {
        let pts = match self {
            SampleSet::Grid { x1, x2, nx, ny } => {
                if *nx == 0 || *ny == 0 {
                    return Err(CliError::invalid("sample grid needs nx, ny ≥ 1"));
                }
                let lerp = |r: &[f64; 2], k: usize, n: usize| {
                    if n == 1 {
                        r[0]
                    } else {
                        r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64
                    }
                };
                let mut out = Vec::with_capacity(nx * ny);
                for j in 0..*ny {
                    for i in 0..*nx {
                        out.push(Point2::new(lerp(x1, i, *nx), lerp(x2, j, *ny)));
                    }
                }
                out
            }
            SampleSet::Circle { radius, points } => (0..*points)
                .map(|k| Point2::polar(*radius, std::f64::consts::TAU * k as f64 / *points as f64))
                .collect(),
            SampleSet::Points { points } => points.clone(),
        };
        if pts.iter().any(|p| !p.is_finite()) {
            return Err(CliError::invalid("sample points must be finite"));
        }
        Ok(pts)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    pub version: u32,
    pub vorticity: VorticityConfig,
    #[serde(default)]
    pub n_boundary: Option<usize>,
    pub sample: SampleSet,
    pub fields: Vec<FieldName>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertMethod {
    Spectral,
    Staggered,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridName {
    Node,
    Midpoint,
}

impl From<GridName> for GridKind {
    fn from(g: GridName) -> Self {
        match g {
            GridName::Node => GridKind::Node,
            GridName::Midpoint => GridKind::Midpoint,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HilbertConfig {
    pub version: u32,
    /// Text file with one sample per line; `#` starts a comment.
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub samples: Option<Vec<f64>>,
    #[serde(default = "default_grid")]
    pub grid: GridName,
    #[serde(default = "default_method")]
    pub method: HilbertMethod,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

fn default_grid() -> GridName {
    GridName::Node
}

fn default_method() -> HilbertMethod {
    HilbertMethod::Spectral
}

/// Reads and validates a config of type `T`; relative paths inside it resolve against its directory.
pub fn load<T: DeserializeOwned + Versioned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::invalid(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg: T = serde_json::from_str(&text).map_err(CliError::from_schema)?;
    if cfg.version() != SCHEMA_VERSION {
        return Err(CliError::invalid(format!(
            "unsupported config version {}, expected {SCHEMA_VERSION}",
            cfg.version()
        ))
        .with_key("version"));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    cfg.resolve_paths(base);
    Ok(cfg)
}

pub trait Versioned {
    fn version(&self) -> u32;
    fn resolve_paths(&mut self, _base: &Path) {}
}

fn resolve(p: &mut Option<PathBuf>, base: &Path) {
    if let Some(path) = p {
        if path.is_relative() {
            *path = base.join(&*path);
        }
    }
}

macro_rules! versioned {
    ($($t:ty => [$($field:ident),*]),* $(,)?) => {
        $(impl Versioned for $t {
            fn version(&self) -> u32 {
                self.version
            }
            fn resolve_paths(&mut self, _base: &Path) {
                $(resolve(&mut self.$field, _base);)*
            }
        })*
    };
}

versioned! {
    ConvergeConfig => [output],
    IdentitiesConfig => [output],
    SimulateConfig => [output],
    FieldConfig => [output],
    HilbertConfig => [input, output],
}
