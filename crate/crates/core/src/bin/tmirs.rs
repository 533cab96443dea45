//! Command-line front end: BER sweeps, schedule validation and oracle checks.
//!
//! Exit status: 0 ok, 1 validation failure, 2 bad input or I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use tmirs::config::{ModeName, SimConfig};
use tmirs::oracle::verify_random_instances;
use tmirs::sweep::{run_sweep, run_validate, write_file, AngleRange};
use tmirs::{Equalizer, Error};

const ORACLE_TOLERANCE: f64 = 1e-9;

#[derive(Parser, Debug)]
#[command(name = "tmirs", version, about = "TM-IRS directional modulation simulator")]
struct Cli {
    /// JSON configuration file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<ModeName>,
    #[arg(long)]
    seed: Option<u64>,
    /// OFDM symbols per grid point.
    #[arg(long)]
    symbols: Option<usize>,
    /// Use 16384 symbols per grid point.
    #[arg(long, conflicts_with = "symbols")]
    full_scale: bool,
    /// Data-symbol power over noise power, dB.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Disable receiver noise.
    #[arg(long, conflicts_with = "snr_db")]
    no_noise: bool,
    #[arg(long)]
    hop_period: Option<usize>,
    /// On-duration for planar mode and common-duration linear mode.
    #[arg(long)]
    duration: Option<f64>,
    /// `STEP` for both axes, or `T0:T1:DT,P0:P1:DP` in degrees.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_pgm: Option<PathBuf>,
    /// Run metadata (sweeps) or the design report (validation).
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write the designed schedule.
    #[arg(long)]
    out_schedule: Option<PathBuf>,
    #[arg(long, value_enum)]
    equalizer: Option<Equalizer>,
    /// Design and validate the schedule without sweeping.
    #[arg(long)]
    validate_only: bool,
    /// Compare the harmonic engine with the time-domain oracle on N random instances.
    #[arg(long, value_name = "N")]
    verify_oracle: Option<usize>,
}

enum Failure {
    Validation(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn parse_range(text: &str) -> Result<AngleRange, Error> {
    let parts: Vec<f64> = text
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Error::InvalidInput(format!("bad grid range '{text}': {e}")))?;
    match parts[..] {
        [start, stop, step] => Ok(AngleRange::new(start, stop, step)),
        _ => Err(Error::InvalidInput(format!(
            "grid range '{text}' must be START:STOP:STEP"
        ))),
    }
}

fn apply_grid(cfg: &mut SimConfig, grid: &str) -> Result<(), Error> {
    if let Some((theta, phi)) = grid.split_once(',') {
        cfg.sweep.theta_deg = parse_range(theta)?;
        cfg.sweep.phi_deg = parse_range(phi)?;
    } else {
        let step: f64 = grid
            .trim()
            .parse()
            .map_err(|e| Error::InvalidInput(format!("bad grid step '{grid}': {e}")))?;
        cfg.sweep.theta_deg.step = step;
        cfg.sweep.phi_deg.step = step;
    }
    Ok(())
}

fn build_config(cli: &Cli) -> Result<SimConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => SimConfig::load(path)?,
        None => SimConfig::default(),
    };
    if let Some(mode) = cli.mode {
        cfg.design.mode = mode;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.symbols {
        cfg.ofdm.n_symbols = n;
    }
    if cli.full_scale {
        cfg.ofdm.n_symbols = 1 << 14;
    }
    if let Some(snr) = cli.snr_db {
        cfg.link.snr_db = Some(snr);
    }
    if cli.no_noise {
        cfg.link.snr_db = None;
    }
    if let Some(p) = cli.hop_period {
        cfg.design.hop_period = p;
    }
    if let Some(d) = cli.duration {
        cfg.design.duration = d;
    }
    if let Some(grid) = &cli.grid {
        apply_grid(&mut cfg, grid)?;
    }
    if let Some(eq) = cli.equalizer {
        cfg.link.equalizer = eq;
    }
    macro_rules! override_path {
        ($flag:ident, $field:ident) => {
            if let Some(p) = &cli.$flag {
                cfg.output.$field = Some(p.clone());
            }
        };
    }
    override_path!(out_csv, csv);
    override_path!(out_pgm, pgm);
    override_path!(out_json, json);
    override_path!(out_schedule, schedule);
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.verify_oracle {
        let summary = verify_random_instances(n, cli.seed.unwrap_or(1))?;
        println!(
            "oracle: {} instances, max relative error {:.3e} (tolerance {ORACLE_TOLERANCE:e})",
            summary.instances, summary.max_relative_error
        );
        if summary.max_relative_error > ORACLE_TOLERANCE {
            return Err(Failure::Validation("engine disagrees with oracle".into()));
        }
        return Ok(());
    }

    let cfg = build_config(cli)?;
    let spec = cfg.to_spec()?;

    if cli.validate_only {
        let (schedule, report) = run_validate(&spec)?;
        let text = serde_json::to_string_pretty(&report).map_err(Error::from)?;
        match &cfg.output.json {
            Some(path) => write_file(path, text.as_bytes())?,
            None => println!("{text}"),
        }
        if let Some(path) = &cfg.output.schedule {
            write_file(path, schedule.to_json(&spec.geometry)?.as_bytes())?;
        }
        if !report.cancellation_ok() {
            return Err(Failure::Validation(format!(
                "residual {:.3e} outside the surviving offsets",
                report.max_nonstructural_residual
            )));
        }
        return Ok(());
    }

    let outcome = run_sweep(&spec)?;
    let map = &outcome.map;
    match &cfg.output.csv {
        Some(path) => map.write_csv(path)?,
        None => print!("{}", map.to_csv()),
    }
    if let Some(path) = &cfg.output.pgm {
        map.write_pgm(path)?;
    }
    let json_path = cfg
        .output
        .json
        .clone()
        .or_else(|| cfg.output.csv.as_ref().map(|p| p.with_extension("json")));
    if let Some(path) = json_path {
        map.write_metadata(&path)?;
    }
    if let Some(path) = &cfg.output.schedule {
        write_file(path, outcome.schedule.to_json(&spec.geometry)?.as_bytes())?;
    }
    eprintln!(
        "{} points, {} symbols each, {:.1} s",
        map.estimates.len(),
        spec.ofdm.n_symbols,
        map.metadata.runtime_s
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("validation failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
