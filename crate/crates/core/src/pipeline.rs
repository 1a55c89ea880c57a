//! End-to-end mining: filter, embed, cluster, correct, score, rerank.

use std::collections::BTreeMap;

use crate::cluster::{self, cluster_sample, correct_sample, Dictionary, SampleClustering};
use crate::config::RunConfig;
use crate::corpus::Corpus;
use crate::embedding::{build_cooccurrence, train_glove, EmbeddingModel};
use crate::error::Result;
use crate::filter::{filter_tokens, FilteredCorpus};
use crate::par;
use crate::ranking::{compute_tfidf, format_output, rerank, RankedKeywords, Separator, TfidfIndex, TokenCounts};

pub struct PipelineOutput {
    pub filtered: FilteredCorpus,
    pub model: EmbeddingModel,
    /// Post-correction clusters, one per sample in sample-id order.
    pub clusterings: Vec<SampleClustering>,
    pub tfidf: Option<TfidfIndex>,
    /// One entry per sample in sample-id order.
    pub rankings: Vec<RankedKeywords>,
}

/// Runs every stage on a pool capped at `config.threads` workers.
pub fn run_pipeline(corpus: &Corpus, config: &RunConfig, dict: &Dictionary) -> Result<PipelineOutput> {
    config.validate()?;
    cluster::check_threshold(config.delta_threshold)?;
    par::with_threads(config.threads, || run_stages(corpus, config, dict))
}

fn run_stages(corpus: &Corpus, config: &RunConfig, dict: &Dictionary) -> Result<PipelineOutput> {

    let filtered = filter_tokens(corpus, &config.filter_params()).map_err(|e| e.in_stage("filter"))?;

    let model = embed(&filtered, config).map_err(|e| e.in_stage("embed"))?;

    let ids: Vec<&String> = filtered.samples.keys().collect();
    let params = config.cluster_params();
    let clusterings = par::map(&ids, |id| {
        let counts = filtered.sample_counts(id);
        let raw = cluster_sample(id, &counts, &model, &params)?;
        Ok(correct_sample(&raw, dict, params.delta_threshold))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()
    .map_err(|e| e.in_stage("cluster"))?;

    let corrected: BTreeMap<String, TokenCounts> = clusterings
        .iter()
        .map(|c| (c.sample_id.clone(), c.token_counts()))
        .collect();
    let tfidf = if corrected.is_empty() {
        None
    } else {
        Some(compute_tfidf(&corrected).map_err(|e| e.in_stage("rank"))?)
    };

    let top_n = config.top_n;
    let rankings = par::map(&clusterings, |c| {
        let order = match &tfidf {
            Some(idx) => idx.order(&c.sample_id, &corrected[&c.sample_id]),
            None => Vec::new(),
        };
        rerank(c, &order, top_n)
    });

    Ok(PipelineOutput {
        filtered,
        model,
        clusterings,
        tfidf,
        rankings,
    })
}

/// Trains the embedding, or returns the seeded initialization when the
/// corpus produced no co-occurring pair at all.
fn embed(filtered: &FilteredCorpus, config: &RunConfig) -> Result<EmbeddingModel> {
    let (vocab, x) = build_cooccurrence(filtered, config.window)?;
    let params = config.glove_params();
    if x.is_empty() {
        log::warn!("no co-occurring token pairs; embeddings are left at their initialization");
        return Ok(EmbeddingModel::initialize(vocab, params.dim, params.weighting, params.seed));
    }
    train_glove(&vocab, &x, &params)
}

/// One line per sample: `sample_id<TAB>token,count<SEP>token,count...`.
pub fn render_output(rankings: &[RankedKeywords], sep: Separator) -> String {
    let mut out = String::new();
    for rk in rankings {
        out.push_str(&rk.sample_id);
        out.push('\t');
        out.push_str(&format_output(rk, sep));
        out.push('\n');
    }
    out
}
