use std::path::PathBuf;

use clap::{Parser, Subcommand};

use scsim_cli::commands;
use scsim_cli::commands::simulate::CheckerSpec;
use scsim_cli::config::RunConfig;
use scsim_cli::CliError;
use scsim_core::simulator::{ChiefComplaintMode, NegativeAnswer, ViolationMode};

#[derive(Parser)]
#[command(
    name = "scsim",
    version,
    about = "Simulate symptom-checker interviews on synthetic vignettes and estimate the per-disease impact of algorithm updates"
)]
struct Cli {
    /// Run configuration TOML; flags below override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Ranked-output cutoff K.
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    n_per_disease: Option<u32>,
    /// Negative-answer policy: absent or unknown.
    #[arg(long, global = true)]
    answer_policy: Option<String>,
    /// Chief-complaint policy: seeded or none.
    #[arg(long, global = true)]
    chief_complaint: Option<String>,
    /// Reject unrecognized frequency cells instead of downgrading them.
    #[arg(long, global = true)]
    strict_frequencies: bool,
    /// Parallelism degree for simulation (0 = all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the simulation dataset from annotations (plus synthetic
    /// common-disease vignettes when profiles are configured).
    Generate {
        #[arg(long)]
        out: PathBuf,
    },
    /// Ingest a user-feedback JSONL file as common-disease vignettes.
    IngestCommon {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Interview a symptom checker over every vignette of a dataset.
    Simulate {
        #[arg(long)]
        dataset: PathBuf,
        /// Directory holding priors.tsv and likelihoods.tsv for the
        /// built-in reference engine.
        #[arg(long, conflicts_with = "sc_cmd")]
        kb: Option<PathBuf>,
        /// External checker command speaking the NDJSON protocol.
        #[arg(long)]
        sc_cmd: Option<String>,
        #[arg(long)]
        out: PathBuf,
        /// Protocol violations: "warn" (batch default) or "error".
        #[arg(long, default_value = "warn")]
        violations: String,
    },
    /// Per-disease before/after metric deltas with bootstrap intervals.
    Compare {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        before: PathBuf,
        #[arg(long)]
        after: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Regress actual change on estimated change over a pairs CSV.
    Regress {
        #[arg(long)]
        pairs: PathBuf,
        /// Keep only pairs whose disease has frequency-annotated sources.
        #[arg(long)]
        freq_only: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write plot-ready scatter data (estimated, actual, disease,
        /// freq_flag).
        #[arg(long)]
        scatter: Option<PathBuf>,
    },
    /// Render a comparison document into a summary bundle.
    Report {
        #[arg(long)]
        delta: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Mapping coverage of the configured annotation set.
    AuditMapping {
        /// Comma-separated disease ids (default: every disease in the
        /// annotation file).
        #[arg(long)]
        diseases: Option<String>,
    },
    /// Run the full A/B story from checked-in fixtures.
    Demo {
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::base(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(k) = cli.k {
        config.k = k;
    }
    if let Some(n) = cli.n_per_disease {
        config.n_per_disease = n;
    }
    if let Some(policy) = &cli.answer_policy {
        config.answer_policy = match policy.as_str() {
            "absent" => NegativeAnswer::Absent,
            "unknown" => NegativeAnswer::Unknown,
            other => {
                return Err(CliError::Validation(format!(
                    "answer policy must be absent or unknown, got {other:?}"
                )))
            }
        };
    }
    if let Some(mode) = &cli.chief_complaint {
        config.chief_complaint = match mode.as_str() {
            "seeded" => ChiefComplaintMode::Seeded,
            "none" => ChiefComplaintMode::None,
            other => {
                return Err(CliError::Validation(format!(
                    "chief complaint mode must be seeded or none, got {other:?}"
                )))
            }
        };
    }
    if cli.strict_frequencies {
        config.strict_frequencies = true;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    Ok(config)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate { out } => {
            let config = effective_config(&cli)?;
            commands::generate::run(&config, out)?;
        }
        Command::IngestCommon { input, out } => {
            let config = effective_config(&cli)?;
            commands::ingest::run(&config, input, out)?;
        }
        Command::Simulate {
            dataset,
            kb,
            sc_cmd,
            out,
            violations,
        } => {
            let config = effective_config(&cli)?;
            let mode = match violations.as_str() {
                "warn" => ViolationMode::Warn,
                "error" => ViolationMode::Error,
                other => {
                    return Err(CliError::Validation(format!(
                        "violations must be warn or error, got {other:?}"
                    )))
                }
            };
            let spec = match (kb, sc_cmd) {
                (Some(dir), None) => CheckerSpec::KnowledgeBase(dir),
                (None, Some(cmd)) => CheckerSpec::Command(cmd),
                _ => {
                    return Err(CliError::Validation(
                        "exactly one of --kb or --sc-cmd is required".to_string(),
                    ))
                }
            };
            commands::simulate::run(&config, dataset, spec, out, mode)?;
        }
        Command::Compare {
            dataset,
            before,
            after,
            out,
            csv,
        } => {
            let config = effective_config(&cli)?;
            commands::compare::run(&config, dataset, before, after, out, csv.as_deref())?;
        }
        Command::Regress {
            pairs,
            freq_only,
            out,
            scatter,
        } => {
            commands::regress::run(pairs, *freq_only, out.as_deref(), scatter.as_deref())?;
        }
        Command::Report { delta, out_dir } => {
            commands::report::run(delta, out_dir)?;
        }
        Command::AuditMapping { diseases } => {
            let config = effective_config(&cli)?;
            commands::audit::run(&config, diseases.as_deref())?;
        }
        Command::Demo { out_dir } => {
            commands::demo::run(out_dir, cli.seed)?;
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
