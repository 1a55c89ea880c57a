use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use labelmine::commands::{cmd_eval, cmd_mine, cmd_synth, cmd_update};
use labelmine::synth::SynthParams;
use labelmine::{DuplicatePolicy, Error, RunConfig};

/// Mine ranked family keywords from multi-vendor anti-virus labels.
#[derive(Parser, Debug)]
#[command(name = "labelmine", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Key = value configuration file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// NDJSON report file (input for mine/update, output for synth).
    #[arg(long, global = true)]
    reports: Option<PathBuf>,
    /// Keyword output file (written by mine/update, read by eval).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory holding the persisted corpus and model.
    #[arg(long, global = true)]
    state: Option<PathBuf>,
    /// Ground-truth CSV (read by eval, written by synth).
    #[arg(long, global = true)]
    gt: Option<PathBuf>,
    #[arg(long, global = true)]
    top_n: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker cap; 1 is the sequential reference mode.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Separate output entries with `||` instead of U+2016.
    #[arg(long, global = true)]
    ascii_sep: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mine keywords for every report in --reports.
    Mine,
    /// Add --reports to the corpus in --state and re-mine everything.
    Update {
        /// Ignore reports whose sample id is already known.
        #[arg(long)]
        skip_duplicates: bool,
    },
    /// Print Top-1..Top-10 accuracy of --out against --gt.
    Eval,
    /// Write a synthetic corpus to --reports and its families to --gt.
    Synth {
        #[arg(long, default_value_t = 20)]
        families: usize,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 30)]
        vendors: usize,
        #[arg(long, default_value_t = 0.3)]
        noise: f64,
        #[arg(long, default_value_t = 0.1)]
        misspell: f64,
    },
}

fn config(c: &Common) -> Result<RunConfig, Error> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = &c.$field {
                cfg.$field = v.clone().into();
            }
        )*};
    }
    set!(reports, out, state, gt, top_n, seed, threads);
    cfg.ascii_sep |= c.ascii_sep;
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    let cfg = config(&cli.common)?;
    match cli.command {
        Command::Mine => {
            let outcome = cmd_mine(&cfg)?;
            log::info!("mined {} samples", outcome.corpus.len());
        }
        Command::Update { skip_duplicates } => {
            let policy = if skip_duplicates {
                DuplicatePolicy::Skip
            } else {
                DuplicatePolicy::Reject
            };
            let outcome = cmd_update(&cfg, policy)?;
            log::info!("corpus now at version {} with {} samples", outcome.corpus.version(), outcome.corpus.len());
        }
        Command::Eval => {
            let out = cfg.out.as_ref().ok_or_else(|| Error::Config("missing --out".into()))?;
            let gt = cfg.gt.as_ref().ok_or_else(|| Error::Config("missing --gt".into()))?;
            println!("{}", cmd_eval(out, gt)?);
        }
        Command::Synth {
            families,
            samples,
            vendors,
            noise,
            misspell,
        } => {
            let reports = cfg.reports.as_ref().ok_or_else(|| Error::Config("missing --reports".into()))?;
            let gt = cfg.gt.as_ref().ok_or_else(|| Error::Config("missing --gt".into()))?;
            let params = SynthParams {
                families,
                samples,
                vendors,
                noise,
                misspell,
                seed: cfg.seed,
            };
            cmd_synth(&params, reports, gt)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
