//! Command-line front end: reads a JSON run configuration, dispatches the
//! requested experiment and writes tables, Touchstone files and SVG plots.

mod cmd;
pub mod config;
mod error;
pub mod output;
pub mod svg;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

pub use config::{parse, Loaded, RunConfig};
pub use error::CliError;
pub use output::{Format, Meta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Verb {
    /// Closed-form S-parameters and figures of merit over a frequency grid.
    Sparams,
    /// Design-space sweep over fm/f and ΔC/C0.
    Sweep,
    /// Time-domain run with harmonic extraction and closed-form comparison.
    Transient,
    /// Gain compression versus input power.
    Compress,
    /// Two-tone intermodulation and IIP3.
    Twotone,
    /// Receive-port noise including folded contributions.
    Noisefold,
    /// Modulation feed-network synthesis.
    Modnet,
}

impl Verb {
    pub fn name(self) -> &'static str {
        match self {
            Verb::Sparams => "sparams",
            Verb::Sweep => "sweep",
            Verb::Transient => "transient",
            Verb::Compress => "compress",
            Verb::Twotone => "twotone",
            Verb::Noisefold => "noisefold",
            Verb::Modnet => "modnet",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "lptv", version, about = "Spatio-temporally modulated LC circulator toolkit")]
pub struct Args {
    #[command(subcommand)]
    pub verb: Verb,
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: FormatArg,
}

/// What a verb produced: the files written and a summary also printed to stdout.
#[derive(Debug, Clone)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub summary: Value,
}

pub(crate) struct Ctx {
    pub config: RunConfig,
    pub meta: Meta,
    pub out: PathBuf,
    pub format: Format,
    pub seed: u64,
}

pub fn run(args: &Args) -> Result<Report, CliError> {
    let path = args
        .config
        .as_ref()
        .ok_or_else(|| CliError::Config("--config is required".into()))?;
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let loaded = parse(&text)?;
    run_loaded(args, loaded)
}

pub fn run_loaded(args: &Args, loaded: Loaded) -> Result<Report, CliError> {
    if args.threads == Some(0) {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    std::fs::create_dir_all(&args.out)?;
    let ctx = Ctx {
        config: loaded.config,
        meta: Meta {
            verb: args.verb.name(),
            hash: loaded.hash,
            seed: args.seed,
        },
        out: args.out.clone(),
        format: match args.format {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        },
        seed: args.seed,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = args.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| match args.verb {
        Verb::Sparams => cmd::sparams::run(&ctx),
        Verb::Sweep => cmd::sweep::run(&ctx),
        Verb::Transient => cmd::transient::run(&ctx),
        Verb::Compress => cmd::compress::run(&ctx),
        Verb::Twotone => cmd::twotone::run(&ctx),
        Verb::Noisefold => cmd::noisefold::run(&ctx),
        Verb::Modnet => cmd::modnet::run(&ctx),
    })
}
