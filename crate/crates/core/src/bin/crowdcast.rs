use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crowdcast::harness::{self, RunConfig};
use crowdcast::ingest::{CategoryFilter, Corpus, Manifest, ParseOptions};
use crowdcast::synth::{generate_corpus, SynthCorpusSpec};
use crowdcast::{Error, Result};

#[derive(Parser)]
#[command(name = "crowdcast", version, about = "Aggregate and evaluate crowds of quantile forecasts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Run config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    category: Option<CategoryFilter>,
    /// Sort non-monotone curves instead of rejecting them.
    #[arg(long)]
    sort_repair: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Full run: aggregate, score, rank and write report tables.
    Evaluate(RunArgs),
    /// Write aggregate forecasts only.
    Aggregate(RunArgs),
    /// Generate a synthetic corpus in the Hub layout.
    Synth {
        /// Synthetic corpus spec (TOML).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Ingest a corpus and report what would be dropped, without scoring.
    Validate {
        /// Run config or manifest (TOML).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        sort_repair: bool,
    },
}

fn run_config(args: &RunArgs) -> Result<RunConfig> {
    let mut config = RunConfig::load(&args.config)?;
    if let Some(out) = &args.out {
        config.out = out.clone();
    }
    if let Some(c) = args.category {
        config.category = c;
    }
    config.sort_repair |= args.sort_repair;
    Ok(config)
}

fn load_corpus(config: &RunConfig) -> Result<Corpus> {
    let manifest = Manifest::load(&config.manifest)?;
    Corpus::load(
        &manifest,
        ParseOptions {
            sort_repair: config.sort_repair,
        },
    )
}

fn list(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn synth(config: &Path, out: &Path, seed: Option<u64>) -> Result<()> {
    let text = std::fs::read_to_string(config).map_err(|e| Error::Io {
        path: config.into(),
        source: e,
    })?;
    let mut spec: SynthCorpusSpec =
        toml::from_str(&text).map_err(|e| Error::Config(format!("synth spec: {e}")))?;
    if let Some(s) = seed {
        spec.crowd.seed = s;
    }
    let corpus = generate_corpus(&spec)?;
    let manifest = corpus.export(out, spec.first_origin_week, Some(spec.last_origin_week()))?;
    let mut run = RunConfig::new("manifest.toml");
    run.final_week = Some(spec.final_week());
    let run_path = out.join("run.toml");
    std::fs::write(&run_path, run.to_toml()?).map_err(|e| Error::Io {
        path: run_path.clone(),
        source: e,
    })?;
    println!("wrote {}", manifest.display());
    println!("wrote {}", run_path.display());
    println!(
        "{} submissions, {} series, fingerprint {}",
        corpus.submissions.len(),
        corpus.truth.len(),
        corpus.fingerprint()?
    );
    Ok(())
}

fn validate(config: &Path, sort_repair: bool) -> Result<()> {
    let (manifest_path, sort_repair) = match RunConfig::load(config) {
        Ok(c) => (c.manifest, sort_repair || c.sort_repair),
        Err(_) => (config.to_path_buf(), sort_repair),
    };
    let manifest = Manifest::load(&manifest_path)?;
    let corpus = Corpus::load(&manifest, ParseOptions { sort_repair })?;
    for d in corpus.diagnostics.iter() {
        println!("{d}");
    }
    println!(
        "parsed {} slots, retained {}, dropped {}, {} teams, {} truth series",
        corpus.parsed_slots,
        corpus.submissions.len(),
        corpus.dropped_slots,
        corpus.teams().len(),
        corpus.truth.len()
    );
    for (reason, n) in corpus.diagnostics.counts() {
        println!("{reason}: {n}");
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate(args) => {
            let config = run_config(&args)?;
            let corpus = load_corpus(&config)?;
            let output = harness::run_evaluation(&config, &corpus)?;
            for w in &output.warnings {
                eprintln!("warning: {w}");
            }
            list(&harness::emit_reports(&output, &config.out)?.paths);
            println!("scored {} slots", output.slots_scored);
        }
        Command::Aggregate(args) => {
            let config = run_config(&args)?;
            let corpus = load_corpus(&config)?;
            let output = harness::run_aggregation(&config, &corpus)?;
            list(&harness::emit_aggregates(&output, &config.out)?.paths);
        }
        Command::Synth { config, out, seed } => synth(&config, &out, seed)?,
        Command::Validate { config, sort_repair } => validate(&config, sort_repair)?,
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} message={message}", e.kind());
            ExitCode::from(2)
        }
    }
}
