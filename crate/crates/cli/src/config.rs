//! Run configuration: JSON file, command-line overrides and validation.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use spinwrite::{CubicRatioUnits, MaterialModel, PseudoPureState, Spin, SweepDirection, BOLTZMANN};

/// Environment variable that redirects relative output paths.
pub const OUTPUT_DIR_ENV: &str = "SPINWRITE_OUTPUT_DIR";

/// Exchange constant used when no coupling is configured, in kelvin.
pub const DEFAULT_J_EX_KELVIN: f64 = 83.0 / 15.0;
/// `lambda'/lambda` for commands that need the first-order model.
pub const DEFAULT_FIRST_ORDER_RATIO: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("config file {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },

    #[error("`{first}` and `{second}` are mutually exclusive")]
    Conflict { first: &'static str, second: &'static str },

    #[error("`{field}` and `{other}` give the same quantity in different units; keep one")]
    ContradictoryUnits { field: &'static str, other: &'static str },

    #[error("invalid `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field,
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum GridUnits {
    /// Multiples of the critical temperature.
    #[default]
    Reduced,
    Kelvin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RatioUnits {
    #[default]
    Molar,
    Reduced,
}

impl From<RatioUnits> for CubicRatioUnits {
    fn from(u: RatioUnits) -> Self {
        match u {
            RatioUnits::Molar => CubicRatioUnits::Molar,
            RatioUnits::Reduced => CubicRatioUnits::Reduced,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

impl From<Direction> for SweepDirection {
    fn from(d: Direction) -> Self {
        match d {
            Direction::Up => SweepDirection::Up,
            Direction::Down => SweepDirection::Down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    pub units: GridUnits,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            min: 0.0,
            max: 2.0,
            steps: 300,
            units: GridUnits::Reduced,
        }
    }
}

/// Field values tried by `critical-field`, tesla.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FieldGridSpec {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Default for FieldGridSpec {
    fn default() -> Self {
        FieldGridSpec {
            min: 0.0,
            max: 80.0,
            steps: 81,
        }
    }
}

/// Everything a pipeline run needs. Unset couplings fall back to the
/// default exchange constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub spin: f64,
    pub g: f64,
    pub z: u32,
    /// Exchange constant, joules.
    pub j_ex: Option<f64>,
    /// Exchange constant, kelvin.
    pub j_ex_kelvin: Option<f64>,
    /// Molecular-field constant, T per (J/T).
    pub lambda: Option<f64>,
    pub lambda_prime_ratio: Option<f64>,
    pub ratio_units: RatioUnits,
    pub b0: Vec<f64>,
    pub grid: GridSpec,
    pub field_grid: FieldGridSpec,
    pub directions: Vec<Direction>,
    pub epsilon: f64,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            spin: 1.5,
            g: 2.0,
            z: 6,
            j_ex: None,
            j_ex_kelvin: None,
            lambda: None,
            lambda_prime_ratio: None,
            ratio_units: RatioUnits::Molar,
            b0: vec![0.0],
            grid: GridSpec::default(),
            field_grid: FieldGridSpec::default(),
            directions: vec![Direction::Up],
            epsilon: PseudoPureState::DEFAULT_EPSILON,
            out: None,
            format: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Read {
            path: path.to_owned(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Builds the material model, applying `default_ratio` when no
    /// `lambda_prime_ratio` is set.
    pub fn model(&self, default_ratio: Option<f64>) -> Result<MaterialModel, ConfigError> {
        let spin = Spin::new(self.spin).map_err(|e| invalid("spin", e.to_string()))?;
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(invalid("g", format!("must be positive, got {}", self.g)));
        }
        if self.z == 0 {
            return Err(invalid("z", "must be at least 1"));
        }
        if self.j_ex.is_some() && self.j_ex_kelvin.is_some() {
            return Err(ConfigError::ContradictoryUnits {
                field: "j_ex",
                other: "j_ex_kelvin",
            });
        }
        let exchange = match (self.j_ex, self.j_ex_kelvin) {
            (Some(j), None) => Some(("j_ex", j)),
            (None, Some(k)) => Some(("j_ex_kelvin", k * BOLTZMANN)),
            _ => None,
        };
        let base = match (exchange, self.lambda) {
            (Some((field, _)), Some(_)) => {
                return Err(ConfigError::Conflict {
                    first: field,
                    second: "lambda",
                })
            }
            (Some((field, j)), None) => {
                if !(j.is_finite() && j > 0.0) {
                    return Err(invalid(field, format!("must be positive, got {j}")));
                }
                MaterialModel::from_exchange(spin, self.g, self.z, j)
            }
            (None, Some(l)) => {
                if !(l.is_finite() && l > 0.0) {
                    return Err(invalid("lambda", format!("must be positive, got {l}")));
                }
                MaterialModel::from_lambda(spin, self.g, self.z, l)
            }
            (None, None) => MaterialModel::from_exchange(spin, self.g, self.z, DEFAULT_J_EX_KELVIN * BOLTZMANN),
        }
        .map_err(|e| invalid("model", e.to_string()))?;

        match self.lambda_prime_ratio.or(default_ratio) {
            None => Ok(base),
            Some(r) if !r.is_finite() || r < 0.0 => Err(invalid(
                "lambda_prime_ratio",
                format!("must be finite and >= 0, got {r}"),
            )),
            Some(r) => base
                .with_cubic_ratio(r, self.ratio_units.into())
                .map_err(|e| invalid("lambda_prime_ratio", e.to_string())),
        }
    }

    /// Temperatures in kelvin, ascending.
    pub fn temperatures(&self, model: &MaterialModel) -> Result<Vec<f64>, ConfigError> {
        let GridSpec { min, max, steps, units } = self.grid;
        if steps < 2 {
            return Err(invalid("grid.steps", format!("need at least 2 points, got {steps}")));
        }
        if !(min.is_finite() && min >= 0.0) {
            return Err(invalid("grid.min", format!("must be finite and >= 0, got {min}")));
        }
        if !(max.is_finite() && max > min) {
            return Err(invalid(
                "grid.max",
                format!("must be finite and above grid.min, got {max}"),
            ));
        }
        let scale = match units {
            GridUnits::Kelvin => 1.0,
            GridUnits::Reduced => model
                .critical_temperature()
                .map_err(|_| invalid("grid.units", "reduced units need a model with a critical temperature"))?,
        };
        Ok(linspace(min * scale, max * scale, steps))
    }

    pub fn fields(&self) -> Result<Vec<f64>, ConfigError> {
        if self.b0.is_empty() {
            return Err(invalid("b0", "at least one field is required"));
        }
        if let Some(b) = self.b0.iter().find(|b| !b.is_finite()) {
            return Err(invalid("b0", format!("must be finite, got {b}")));
        }
        Ok(self.b0.clone())
    }

    pub fn field_scan(&self) -> Result<Vec<f64>, ConfigError> {
        let FieldGridSpec { min, max, steps } = self.field_grid;
        if steps < 2 {
            return Err(invalid(
                "field_grid.steps",
                format!("need at least 2 points, got {steps}"),
            ));
        }
        if !(min.is_finite() && min >= 0.0) {
            return Err(invalid("field_grid.min", format!("must be finite and >= 0, got {min}")));
        }
        if !(max.is_finite() && max > min) {
            return Err(invalid(
                "field_grid.max",
                format!("must be finite and above field_grid.min, got {max}"),
            ));
        }
        Ok(linspace(min, max, steps))
    }

    pub fn sweep_directions(&self) -> Result<Vec<SweepDirection>, ConfigError> {
        if self.directions.is_empty() {
            return Err(invalid("directions", "at least one sweep direction is required"));
        }
        Ok(self.directions.iter().map(|&d| d.into()).collect())
    }

    pub fn checked_epsilon(&self) -> Result<f64, ConfigError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(invalid("epsilon", format!("must lie in (0, 1], got {}", self.epsilon)));
        }
        Ok(self.epsilon)
    }

    /// Resolved output path, or `None` for stdout. Relative paths are placed
    /// under `$SPINWRITE_OUTPUT_DIR` when it is set.
    pub fn output_path(&self) -> Result<Option<PathBuf>, ConfigError> {
        let Some(out) = &self.out else {
            return Ok(None);
        };
        let path = match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if out.is_relative() => Path::new(&dir).join(out),
            _ => out.clone(),
        };
        let parent = match path.parent() {
            Some(p) if !p.as_os_str().is_empty() => p.to_owned(),
            _ => PathBuf::from("."),
        };
        let meta = fs::metadata(&parent)
            .map_err(|e| invalid("out", format!("directory {} is not usable: {e}", parent.display())))?;
        if !meta.is_dir() || meta.permissions().readonly() {
            return Err(invalid(
                "out",
                format!("directory {} is not writable", parent.display()),
            ));
        }
        Ok(Some(path))
    }

    /// Explicit format, else `.json` paths give JSON and everything else CSV.
    pub fn output_format(&self) -> Format {
        self.format.unwrap_or_else(|| match &self.out {
            Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
            _ => Format::Csv,
        })
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else {
                a + (b - a) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Flags shared by the pipeline subcommands. Anything given here overrides
/// the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// JSON config file; flags take precedence over its values.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[arg(long, allow_hyphen_values = true)]
    pub spin: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub g: Option<f64>,
    #[arg(long)]
    pub z: Option<u32>,
    /// Exchange constant in joules.
    #[arg(long = "j-ex", allow_hyphen_values = true)]
    pub j_ex: Option<f64>,
    /// Exchange constant in kelvin.
    #[arg(long = "j-ex-kelvin", allow_hyphen_values = true)]
    pub j_ex_kelvin: Option<f64>,
    /// Molecular-field constant, T per (J/T).
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,
    /// lambda'/lambda; any value selects the first-order model.
    #[arg(long = "lambda-prime-ratio", allow_hyphen_values = true)]
    pub lambda_prime_ratio: Option<f64>,
    #[arg(long = "ratio-units", value_enum)]
    pub ratio_units: Option<RatioUnits>,

    /// External field in tesla; repeat for several curves.
    #[arg(long = "b0", allow_hyphen_values = true)]
    pub b0: Vec<f64>,

    #[arg(long = "t-min", allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long = "t-max", allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    /// Number of temperature points.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long = "grid-units", value_enum)]
    pub grid_units: Option<GridUnits>,

    #[arg(long = "b-min", allow_hyphen_values = true)]
    pub b_min: Option<f64>,
    #[arg(long = "b-max", allow_hyphen_values = true)]
    pub b_max: Option<f64>,
    #[arg(long = "b-steps")]
    pub b_steps: Option<usize>,

    /// Sweep direction; repeat for both.
    #[arg(long = "direction", value_enum)]
    pub directions: Vec<Direction>,

    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,

    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl RunArgs {
    /// Config file (or defaults) with every given flag applied on top.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg)?;
        Ok(cfg)
    }

    pub fn apply(&self, cfg: &mut RunConfig) -> Result<(), ConfigError> {
        let couplings = [
            ("j_ex", self.j_ex.is_some()),
            ("j_ex_kelvin", self.j_ex_kelvin.is_some()),
            ("lambda", self.lambda.is_some()),
        ];
        let given: Vec<&'static str> = couplings.iter().filter(|c| c.1).map(|c| c.0).collect();
        match given.as_slice() {
            ["j_ex", "j_ex_kelvin", ..] => {
                return Err(ConfigError::ContradictoryUnits {
                    field: "j_ex",
                    other: "j_ex_kelvin",
                })
            }
            [first, second, ..] => return Err(ConfigError::Conflict { first, second }),
            [_] => {
                cfg.j_ex = self.j_ex;
                cfg.j_ex_kelvin = self.j_ex_kelvin;
                cfg.lambda = self.lambda;
            }
            [] => {}
        }

        set(&mut cfg.spin, self.spin);
        set(&mut cfg.g, self.g);
        set(&mut cfg.z, self.z);
        if self.lambda_prime_ratio.is_some() {
            cfg.lambda_prime_ratio = self.lambda_prime_ratio;
        }
        set(&mut cfg.ratio_units, self.ratio_units);
        if !self.b0.is_empty() {
            cfg.b0 = self.b0.clone();
        }
        set(&mut cfg.grid.min, self.t_min);
        set(&mut cfg.grid.max, self.t_max);
        set(&mut cfg.grid.steps, self.steps);
        set(&mut cfg.grid.units, self.grid_units);
        set(&mut cfg.field_grid.min, self.b_min);
        set(&mut cfg.field_grid.max, self.b_max);
        set(&mut cfg.field_grid.steps, self.b_steps);
        if !self.directions.is_empty() {
            cfg.directions = self.directions.clone();
        }
        set(&mut cfg.epsilon, self.epsilon);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.format.is_some() {
            cfg.format = self.format;
        }
        Ok(())
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}
