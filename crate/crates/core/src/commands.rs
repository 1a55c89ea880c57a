//! Entry points behind the command-line subcommands.

use std::path::{Path, PathBuf};

use crate::cluster::Dictionary;
use crate::config::RunConfig;
use crate::corpus::{read_ndjson, write_atomic, Corpus, DuplicatePolicy};
use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};
use crate::pipeline::{render_output, run_pipeline, PipelineOutput};

pub use crate::eval::cmd_eval;
pub use crate::synth::cmd_synth;

pub const MODEL_FILE: &str = "model.txt";

/// What a mining run produced. `pipeline` is `None` when there was
/// nothing to mine.
pub struct MineOutcome {
    pub corpus: Corpus,
    pub pipeline: Option<PipelineOutput>,
    /// The exact bytes written to the output file.
    pub rendered: String,
}

pub fn load_dictionary(config: &RunConfig) -> Result<Dictionary> {
    match &config.dictionary_path {
        Some(p) => Dictionary::from_path(p),
        None => Ok(Dictionary::bundled()),
    }
}

fn required<'a>(path: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    path.as_deref()
        .ok_or_else(|| Error::Config(format!("missing {flag}")))
}

/// Mines `config.reports` from scratch, writes `config.out`, and persists
/// corpus and model under `config.state` when set.
pub fn cmd_mine(config: &RunConfig) -> Result<MineOutcome> {
    config.validate()?;
    let reports_path = required(&config.reports, "--reports")?;
    let out_path = required(&config.out, "--out")?;
    let dict = load_dictionary(config)?;

    let reports = read_ndjson(reports_path).map_err(|e| e.in_stage("ingest"))?;
    if reports.is_empty() {
        log::warn!("{} holds no reports; writing an empty output", reports_path.display());
    }
    let corpus = Corpus::new()
        .add_reports(reports, DuplicatePolicy::Reject)
        .map_err(|e| e.in_stage("ingest"))?;
    mine_corpus(corpus, config, &dict, out_path)
}

/// Adds `config.reports` to the corpus persisted in `config.state`, retrains
/// on the merged corpus and rewrites output and state.
pub fn cmd_update(config: &RunConfig, policy: DuplicatePolicy) -> Result<MineOutcome> {
    config.validate()?;
    let state = required(&config.state, "--state")?;
    let reports_path = required(&config.reports, "--reports")?;
    let out_path = required(&config.out, "--out")?;
    let dict = load_dictionary(config)?;

    let corpus = Corpus::load(state)?;
    let (_, model_version) = EmbeddingModel::load(&state.join(MODEL_FILE))?;
    if model_version != corpus.version() {
        return Err(Error::VersionMismatch(format!(
            "model was trained on corpus version {model_version}, state holds version {}",
            corpus.version()
        )));
    }
    let batch = read_ndjson(reports_path).map_err(|e| e.in_stage("ingest"))?;
    let merged = corpus.add_reports(batch, policy).map_err(|e| e.in_stage("ingest"))?;
    log::info!(
        "corpus version {} -> {} ({} reports)",
        corpus.version(),
        merged.version(),
        merged.len()
    );
    mine_corpus(merged, config, &dict, out_path)
}

fn mine_corpus(corpus: Corpus, config: &RunConfig, dict: &Dictionary, out_path: &Path) -> Result<MineOutcome> {
    if corpus.is_empty() {
        write_atomic(out_path, b"")?;
        return Ok(MineOutcome {
            corpus,
            pipeline: None,
            rendered: String::new(),
        });
    }
    let output = run_pipeline(&corpus, config, dict)?;
    let rendered = render_output(&output.rankings, config.separator());
    write_atomic(out_path, rendered.as_bytes())?;
    if let Some(state) = &config.state {
        corpus.save(state)?;
        output.model.save(&state.join(MODEL_FILE), corpus.version())?;
    }
    Ok(MineOutcome {
        corpus,
        pipeline: Some(output),
        rendered,
    })
}
