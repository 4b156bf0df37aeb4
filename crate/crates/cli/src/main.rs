use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod report;

use commands::Failure;
use config::ExperimentConfig;
use report::{to_json, Check, Outcome, Provenance, Report, TOOL};

/// Certified convergence experiments: asymptotic centers, Δ/strong-Δ/polar
/// detectors, rotundity moduli, fixed points and Lᵖ duality checks.
#[derive(Parser, Debug)]
#[command(name = "polarconv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the seed of the configuration.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Report)]
    format: Format,
}

#[derive(Subcommand, Debug, Clone)]
enum Command {
    /// Asymptotic center and radius of a sequence.
    Center,
    /// Δ, strong-Δ and polar verdicts for a candidate limit.
    Classify,
    /// Extract a strong-Δ convergent subsequence.
    Extract,
    /// Estimate the rotundity modulus of a space.
    SrModulus,
    /// Fixed point via the asymptotic center, and the polar pipeline.
    Fixedpoint,
    /// Duality map of a grid function.
    Duality,
    /// Brezis-Lieb type deficit of a sequence.
    BlCheck,
    /// Run built-in fixtures (all of them without --name).
    Examples {
        #[arg(long)]
        name: Option<String>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Report,
    Csv,
}

impl Command {
    fn label(&self) -> &'static str {
        match self {
            Command::Center => "center",
            Command::Classify => "classify",
            Command::Extract => "extract",
            Command::SrModulus => "sr-modulus",
            Command::Fixedpoint => "fixedpoint",
            Command::Duality => "duality",
            Command::BlCheck => "bl-check",
            Command::Examples { .. } => "examples",
        }
    }
}

fn config_error(msg: &str) -> ExitCode {
    eprintln!("polarconv: configuration error: {msg}");
    ExitCode::from(2)
}

fn load(cli: &Cli) -> Result<ExperimentConfig, String> {
    let mut cfg = match (&cli.config, &cli.command) {
        (Some(path), _) => ExperimentConfig::load(path)?,
        (None, Command::Examples { .. }) => ExperimentConfig::with_seed(0),
        (None, _) => return Err("--config is required for this subcommand".into()),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cmd: &Command, cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    match cmd {
        Command::Center => commands::center(cfg),
        Command::Classify => commands::classify(cfg),
        Command::Extract => commands::extract(cfg),
        Command::SrModulus => commands::sr_modulus(cfg),
        Command::Fixedpoint => commands::fixedpoint(cfg),
        Command::Duality => commands::duality(cfg),
        Command::BlCheck => commands::bl_check(cfg),
        Command::Examples { name } => commands::examples(cfg, name.as_deref()),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => return config_error(&e),
    };
    let outcome = match run(&cli.command, &cfg) {
        Ok(o) => o,
        Err(Failure::Config(e)) => return config_error(&e),
        Err(Failure::Refused(e)) => Outcome {
            checks: vec![Check::new("hypotheses", false, e)],
            results: serde_json::Value::Null,
            probe_families: Vec::new(),
            notes: Vec::new(),
            csv: String::new(),
        },
    };
    let pass = outcome.pass();
    let text = match cli.format {
        Format::Csv => outcome.csv.clone(),
        Format::Report => {
            let report = Report {
                tool: TOOL.into(),
                version: env!("CARGO_PKG_VERSION").into(),
                command: cli.command.label().into(),
                config: to_json(&cfg),
                pass,
                checks: outcome.checks,
                results: outcome.results,
                provenance: Provenance {
                    seed: cfg.seed,
                    window: to_json(&cfg.window),
                    probe_families: outcome.probe_families,
                    notes: outcome.notes,
                },
            };
            let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
            s.push('\n');
            s
        }
    };
    let out = cli.out.clone().or_else(|| cfg.output.clone());
    if let Err(e) = write_out(out.as_deref(), &text) {
        eprintln!("polarconv: cannot write output: {e}");
        return ExitCode::from(2);
    }
    if let Some(path) = &out {
        let mut meta = path.clone().into_os_string();
        meta.push(".meta.json");
        let body = serde_json::json!({ "command": cli.command.label(), "wall_time_seconds": started.elapsed().as_secs_f64() });
        if let Err(e) = std::fs::write(&meta, format!("{body}\n")) {
            eprintln!("polarconv: cannot write metadata: {e}");
        }
    }
    if pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("polarconv: {} failed at least one check", cli.command.label());
        ExitCode::from(1)
    }
}
