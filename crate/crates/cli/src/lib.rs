//! Command-line driver: configuration, pipeline dispatch and output.

pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use spinwrite::{
    brillouin, build_angle_table, find_critical_field, roundtrip_magnetization, run_first_order, run_second_order,
    write_branch, Branch, CurvePoint, MaterialModel, Spin, SweepDirection,
};

use config::{linspace, ConfigError, Format, RunArgs, RunConfig, DEFAULT_FIRST_ORDER_RATIO};
use error::CliError;
use output::{emit, render, AngleRecord, BrillouinRecord, CurveRecord, FieldScanRecord};

#[derive(Debug, Parser)]
#[command(
    name = "spinwrite",
    version,
    about = "Mean-field magnetization written into a two-qubit register"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the Brillouin function.
    Brillouin(BrillouinArgs),
    /// Magnetization curves, one heating sweep per field.
    Curve(RunArgs),
    /// Heating and cooling branches of the first-order model.
    Hysteresis(RunArgs),
    /// Smallest field above which heating and cooling agree.
    CriticalField(RunArgs),
    /// Certified pulse angles along each requested sweep.
    AngleTable(RunArgs),
    /// Independent write and readback at every grid temperature.
    Roundtrip(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct BrillouinArgs {
    #[arg(long, default_value_t = 1.5)]
    pub spin: f64,
    #[arg(long = "y-min", default_value_t = -10.0, allow_hyphen_values = true)]
    pub y_min: f64,
    #[arg(long = "y-max", default_value_t = 10.0, allow_hyphen_values = true)]
    pub y_max: f64,
    #[arg(long, default_value_t = 201)]
    pub steps: usize,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Runs one command; the caller turns errors into exit codes.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Brillouin(args) => brillouin_table(args),
        Command::Curve(args) => curve(&args.resolve()?),
        Command::Hysteresis(args) => hysteresis(&args.resolve()?),
        Command::CriticalField(args) => critical_field(&args.resolve()?),
        Command::AngleTable(args) => angle_table(&args.resolve()?),
        Command::Roundtrip(args) => roundtrip(&args.resolve()?),
    }
}

fn write<T: serde::Serialize>(cfg: &RunConfig, records: &[T]) -> Result<(), CliError> {
    let path = cfg.output_path()?;
    emit(&render(records, cfg.output_format())?, path.as_deref())
}

fn brillouin_table(args: &BrillouinArgs) -> Result<(), CliError> {
    let spin = Spin::new(args.spin).map_err(|e| ConfigError::Invalid {
        field: "spin",
        reason: e.to_string(),
    })?;
    if args.steps < 2 {
        return Err(ConfigError::Invalid {
            field: "steps",
            reason: format!("need at least 2 points, got {}", args.steps),
        }
        .into());
    }
    if !(args.y_min.is_finite() && args.y_max.is_finite() && args.y_max > args.y_min) {
        return Err(ConfigError::Invalid {
            field: "y_max",
            reason: format!("need finite y_min < y_max, got [{}, {}]", args.y_min, args.y_max),
        }
        .into());
    }
    let records = linspace(args.y_min, args.y_max, args.steps)
        .into_iter()
        .map(|y| {
            Ok(BrillouinRecord {
                spin: spin.value(),
                y,
                brillouin: brillouin(spin, y)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let cfg = RunConfig {
        out: args.out.clone(),
        format: args.format,
        ..RunConfig::default()
    };
    write(&cfg, &records)
}

fn curve_records(points: &[CurvePoint]) -> impl Iterator<Item = CurveRecord> + '_ {
    points.iter().map(CurveRecord::from)
}

fn curve(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model(None)?;
    let grid = cfg.temperatures(&model)?;
    let fields = cfg.fields()?;
    let epsilon = cfg.checked_epsilon()?;
    let mut records = Vec::new();
    if model.is_first_order() {
        for &b0 in &fields {
            let branch = write_branch(&model, &grid, b0, SweepDirection::Up, Branch::Up, epsilon)?;
            records.extend(curve_records(&branch.points));
        }
    } else {
        for c in run_second_order(&model, &grid, &fields, epsilon)? {
            eprintln!("B0 = {} T: up/down gap {:e}", c.b0, c.max_branch_gap);
            records.extend(curve_records(&c.curve.points));
        }
    }
    write(cfg, &records)
}

fn first_order_model(cfg: &RunConfig) -> Result<MaterialModel, CliError> {
    let model = cfg.model(Some(DEFAULT_FIRST_ORDER_RATIO))?;
    if !model.is_first_order() {
        return Err(ConfigError::Invalid {
            field: "lambda_prime_ratio",
            reason: "this command needs a nonzero ratio".into(),
        }
        .into());
    }
    Ok(model)
}

fn hysteresis(cfg: &RunConfig) -> Result<(), CliError> {
    let model = first_order_model(cfg)?;
    let grid = cfg.temperatures(&model)?;
    let epsilon = cfg.checked_epsilon()?;
    let mut records = Vec::new();
    for pair in run_first_order(&model, &grid, &cfg.fields()?, epsilon)? {
        match pair.hysteresis_width() {
            Some(w) => eprintln!("B0 = {} T: hysteresis width {w} K", pair.b0),
            None => eprintln!(
                "B0 = {} T: no hysteresis, branch gap {:e}",
                pair.b0, pair.max_branch_gap
            ),
        }
        records.extend(curve_records(&pair.up.points));
        records.extend(curve_records(&pair.down.points));
    }
    write(cfg, &records)
}

fn critical_field(cfg: &RunConfig) -> Result<(), CliError> {
    let model = first_order_model(cfg)?;
    let grid = cfg.temperatures(&model)?;
    let scan = find_critical_field(&model, &grid, &cfg.field_scan()?)?;
    eprintln!("critical field {} T", scan.critical_field);
    let records: Vec<FieldScanRecord> = scan.rows.iter().map(FieldScanRecord::from).collect();
    write(cfg, &records)
}

fn angle_table(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model(None)?;
    let grid = cfg.temperatures(&model)?;
    let t_c = model.critical_temperature().ok();
    let mut records = Vec::new();
    for &b0 in &cfg.fields()? {
        for direction in cfg.sweep_directions()? {
            let branch = Branch::from(direction).to_string();
            for entry in build_angle_table(&model, &grid, b0, direction)? {
                records.push(AngleRecord::new(&entry, &branch, t_c));
            }
        }
    }
    write(cfg, &records)
}

fn roundtrip(cfg: &RunConfig) -> Result<(), CliError> {
    let model = cfg.model(None)?;
    let grid = cfg.temperatures(&model)?;
    let epsilon = cfg.checked_epsilon()?;
    let mut records = Vec::new();
    for &b0 in &cfg.fields()? {
        for direction in cfg.sweep_directions()? {
            for &t in &grid {
                let point = roundtrip_magnetization(&model, t, b0, direction.default_seed().max(1e-3), epsilon)?;
                let point = CurvePoint {
                    branch: direction.into(),
                    ..point
                };
                records.push(CurveRecord::from(&point));
            }
        }
    }
    let worst = records.iter().map(|r| r.discrepancy).fold(0.0, f64::max);
    eprintln!("{} points, max discrepancy {worst:e}", records.len());
    write(cfg, &records)
}
