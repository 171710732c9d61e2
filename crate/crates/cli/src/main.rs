//! `spinmech` command-line interface.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 numerical error.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod grid;
mod manifest;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use spinmech::config::{Config, DEFAULT_CONFIG};

use commands::{FitArgs, MapArgs, Output, Params, StressSweepArgs, SweepArgs};
use manifest::RunManifest;

#[derive(Debug, Parser)]
#[command(
    name = "spinmech",
    version,
    about = "Optomechanical spin-driving simulator"
)]
struct Cli {
    /// Device configuration file (defaults to the bundled device).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, `key=value`. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Output file; a `<out>.manifest.json` sidecar is written next to it.
    /// Without it, output goes to stdout and the manifest to stderr.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cavity and mechanical rates, lasing threshold, clamped amplitude.
    DeviceReport,
    /// Locked PSD and stress versus mechanical-injection detuning.
    LockProfile {
        #[arg(long, default_value_t = -2000.0, allow_negative_numbers = true)]
        delta_min_khz: f64,
        #[arg(long, default_value_t = 2000.0, allow_negative_numbers = true)]
        delta_max_khz: f64,
        /// Number of points.
        #[arg(long, default_value_t = 401)]
        steps: usize,
    },
    /// Hyperfine-resolved |+1⟩↔|−1⟩ transitions and their detuning from the
    /// mechanical mode.
    SpinReport {
        #[arg(long)]
        b_field_g: Option<f64>,
    },
    /// Populations versus injection detuning.
    Sweep {
        /// Spin-mechanics detuning δ_s,m/2π.
        #[arg(long, allow_negative_numbers = true)]
        delta_sm_khz: f64,
        /// Peak Rabi rate Ω/2π; defaults to the rate at the configured drive power.
        #[arg(long)]
        omega_khz: Option<f64>,
        /// Defaults to the configured T2*.
        #[arg(long)]
        t2star_us: Option<f64>,
        #[arg(long, default_value_t = 7.0)]
        drive_us: f64,
        #[arg(long, default_value_t = 1.0)]
        pi_fidelity: f64,
        /// δ_s,i/2π grid as start:stop:step.
        #[arg(long, default_value = "-1500:1500:10", allow_hyphen_values = true)]
        grid_khz: String,
    },
    /// Populations versus stress amplitude at fixed spin-injection detuning.
    StressSweep {
        /// Largest stress; defaults to the configured p_max.
        #[arg(long)]
        stress_max_mpa: Option<f64>,
        /// Number of points from zero stress.
        #[arg(long, default_value_t = 27)]
        steps: usize,
        #[arg(long, default_value_t = 263.0, allow_negative_numbers = true)]
        delta_si_khz: f64,
        #[arg(long)]
        t2star_us: Option<f64>,
        #[arg(long, default_value_t = 7.0)]
        drive_us: f64,
        #[arg(long, default_value_t = 1.0)]
        pi_fidelity: f64,
    },
    /// Peak width and contrast versus peak Rabi rate, with optional inversion.
    FwhmMap {
        /// Comma-separated dephasing times.
        #[arg(long, default_value = "0.5,0.8")]
        t2star_us: String,
        #[arg(long, allow_negative_numbers = true)]
        delta_sm_khz: f64,
        #[arg(long, default_value = "5:175:5")]
        omega_grid_khz: String,
        #[arg(long, default_value = "-1500:1500:10", allow_hyphen_values = true)]
        grid_khz: String,
        #[arg(long, default_value_t = 7.0)]
        drive_us: f64,
        /// Report Ω for this observed FWHM.
        #[arg(long)]
        invert_width_khz: Option<f64>,
        /// Report the lower bound on Ω for this uncorrected population change.
        #[arg(long)]
        invert_contrast: Option<f64>,
    },
    /// Fit (Ω_m, r) to a measured sweep CSV.
    Fit {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        delta_sm_khz: f64,
        #[arg(long)]
        t2star_us: Option<f64>,
        #[arg(long, default_value_t = 7.0)]
        drive_us: f64,
    },
    /// Spin-mechanical and optomechanical cooperativities for device presets.
    Roadmap {
        /// Use C_sm = g²/(γ_m·γ_spin) without the factor 4.
        #[arg(long)]
        no_factor4: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::DeviceReport => "device-report",
            Command::LockProfile { .. } => "lock-profile",
            Command::SpinReport { .. } => "spin-report",
            Command::Sweep { .. } => "sweep",
            Command::StressSweep { .. } => "stress-sweep",
            Command::FwhmMap { .. } => "fwhm-map",
            Command::Fit { .. } => "fit",
            Command::Roadmap { .. } => "roadmap",
        }
    }

    /// Format used when `--format` is not given.
    fn default_format(&self) -> Format {
        match self {
            Command::DeviceReport | Command::SpinReport { .. } | Command::Fit { .. } => {
                Format::Json
            }
            _ => Format::Csv,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
        }
    }
}

fn load_config(cli: &Cli, extra: &[String]) -> Result<Config, CliError> {
    let overrides: Vec<&str> = cli
        .overrides
        .iter()
        .map(String::as_str)
        .chain(extra.iter().map(String::as_str))
        .collect();
    let result = match &cli.config {
        Some(path) => Config::load(path, &overrides),
        None => Config::parse_with_overrides(DEFAULT_CONFIG, &overrides),
    };
    result.map_err(|e| CliError::Usage(e.to_string()))
}

fn run_command(cli: &Cli, cfg: &Config) -> Result<Output, CliError> {
    let (device, spin, drive) = cfg.params().map_err(|e| CliError::Usage(e.to_string()))?;
    let p = Params {
        config: cfg.clone(),
        device,
        spin,
        drive,
    };
    let t2 = |v: Option<f64>| v.unwrap_or(cfg.t2_star_us);
    match &cli.command {
        Command::DeviceReport => Ok(commands::device_report(&p)),
        Command::LockProfile {
            delta_min_khz,
            delta_max_khz,
            steps,
        } => commands::lock_profile(&p, *delta_min_khz, *delta_max_khz, *steps),
        Command::SpinReport { .. } => Ok(commands::spin_report(&p)),
        Command::Sweep {
            delta_sm_khz,
            omega_khz,
            t2star_us,
            drive_us,
            pi_fidelity,
            grid_khz,
        } => commands::sweep(
            &p,
            &SweepArgs {
                delta_sm_khz: *delta_sm_khz,
                omega_khz: *omega_khz,
                t2star_us: t2(*t2star_us),
                drive_us: *drive_us,
                pi_fidelity: *pi_fidelity,
                grid_khz,
            },
        ),
        Command::StressSweep {
            stress_max_mpa,
            steps,
            delta_si_khz,
            t2star_us,
            drive_us,
            pi_fidelity,
        } => commands::stress_sweep(
            &p,
            &StressSweepArgs {
                stress_max_mpa: *stress_max_mpa,
                steps: *steps,
                delta_si_khz: *delta_si_khz,
                t2star_us: t2(*t2star_us),
                drive_us: *drive_us,
                pi_fidelity: *pi_fidelity,
            },
        ),
        Command::FwhmMap {
            t2star_us,
            delta_sm_khz,
            omega_grid_khz,
            grid_khz,
            drive_us,
            invert_width_khz,
            invert_contrast,
        } => commands::fwhm_map(
            &p,
            &MapArgs {
                t2star_us,
                delta_sm_khz: *delta_sm_khz,
                omega_grid_khz,
                grid_khz,
                drive_us: *drive_us,
                invert_width_khz: *invert_width_khz,
                invert_contrast: *invert_contrast,
            },
        ),
        Command::Fit {
            data,
            delta_sm_khz,
            t2star_us,
            drive_us,
        } => commands::fit(
            &p,
            &FitArgs {
                data,
                delta_sm_khz: *delta_sm_khz,
                t2star_us: t2(*t2star_us),
                drive_us: *drive_us,
            },
        ),
        Command::Roadmap { no_factor4 } => Ok(commands::roadmap(!no_factor4)),
    }
}

fn render(out: &Output, format: Format, manifest_ref: &str) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let table = out.table.as_ref().ok_or_else(|| {
                CliError::Usage("this command has no CSV form; use --format json".into())
            })?;
            let mut text = format!("# manifest: {manifest_ref}\n");
            for c in &out.comments {
                text.push_str(&format!("# {c}\n"));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Usage(e.to_string());
            w.write_record(&table.columns).map_err(io)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|c| c.to_csv())).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Usage(e.to_string()))?;
            text.push_str(&String::from_utf8_lossy(&bytes));
            Ok(text)
        }
        Format::Json => {
            let mut body = match (&out.report, &out.table) {
                (Some(Value::Object(m)), _) => m.clone(),
                (_, Some(t)) => match t.to_json() {
                    Value::Object(m) => m,
                    _ => unreachable!(),
                },
                _ => Map::new(),
            };
            body.insert("manifest".into(), json!(manifest_ref));
            if !out.results.is_empty() && out.report.is_none() {
                body.insert("results".into(), Value::Object(out.results.clone()));
            }
            let mut text = serde_json::to_string_pretty(&Value::Object(body))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut extra = Vec::new();
    if let Command::SpinReport { b_field_g: Some(b) } = cli.command {
        extra.push(format!("b_field_g={b}"));
    }
    let cfg = load_config(cli, &extra)?;
    let out = run_command(cli, &cfg)?;
    let format = cli.format.unwrap_or_else(|| cli.command.default_format());
    let manifest_ref = manifest::reference(cli.out.as_deref());
    let text = render(&out, format, &manifest_ref)?;

    let mut outputs = Vec::new();
    if let Some(path) = &cli.out {
        outputs.push(path.display().to_string());
        outputs.push(manifest::sidecar_path(path).display().to_string());
    }
    let m = RunManifest {
        tool: "spinmech",
        tool_version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name().into(),
        arguments: std::env::args().skip(1).collect(),
        config_path: cli
            .config
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "<bundled default_device.cfg>".into()),
        overrides: cli
            .overrides
            .iter()
            .map(|o| manifest::split_override(o))
            .collect(),
        parameters: cfg
            .entries()
            .iter()
            .map(|(k, v)| (k.to_string(), json!(v)))
            .collect(),
        outputs,
        timestamp: manifest::timestamp(),
        results: out.results.clone(),
        warnings: out.warnings.clone(),
    };
    let mut manifest_text =
        serde_json::to_string_pretty(&m).map_err(|e| CliError::Usage(e.to_string()))?;
    manifest_text.push('\n');

    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    match &cli.out {
        Some(path) => {
            write_file(path, &text)?;
            write_file(&manifest::sidecar_path(path), &manifest_text)?;
        }
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            eprint!("{manifest_text}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
