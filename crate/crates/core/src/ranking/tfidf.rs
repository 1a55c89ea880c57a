use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type TokenCounts = BTreeMap<String, u32>;

/// Term frequencies per sample and smoothed inverse document frequencies,
/// `idf = ln(N / (1 + doc_count))`. Tokens present in every sample get a
/// slightly negative idf and sink in rank.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TfidfIndex {
    pub n_samples: usize,
    pub doc_count: BTreeMap<String, usize>,
    pub idf: BTreeMap<String, f64>,
    pub tf: BTreeMap<String, BTreeMap<String, f64>>,
}

impl TfidfIndex {
    pub fn tf(&self, sample_id: &str, token: &str) -> Option<f64> {
        self.tf.get(sample_id)?.get(token).copied()
    }

    pub fn tfidf(&self, sample_id: &str, token: &str) -> Option<f64> {
        Some(self.tf(sample_id, token)? * self.idf.get(token)?)
    }

    /// Distinct tokens of a sample by descending tf-idf; ties go to the more
    /// frequent token, then to the lexicographically smaller one.
    pub fn order(&self, sample_id: &str, counts: &TokenCounts) -> Vec<String> {
        let mut scored: Vec<(&String, f64, u32)> = counts
            .iter()
            .map(|(t, &c)| (t, self.tfidf(sample_id, t).unwrap_or(f64::NEG_INFINITY), c))
            .collect();
        scored.sort_by(|a, b| {
            b.1.total_cmp(&a.1)
                .then_with(|| b.2.cmp(&a.2))
                .then_with(|| a.0.cmp(b.0))
        });
        scored.into_iter().map(|(t, _, _)| t.clone()).collect()
    }
}

/// Builds the index over post-correction token multisets, one per sample.
pub fn compute_tfidf(samples: &BTreeMap<String, TokenCounts>) -> Result<TfidfIndex> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("tf-idf needs at least one sample"));
    }
    let n = samples.len();
    let mut doc_count: BTreeMap<String, usize> = BTreeMap::new();
    let mut tf = BTreeMap::new();
    for (id, counts) in samples {
        let total: u64 = counts.values().map(|&c| u64::from(c)).sum();
        let mut row = BTreeMap::new();
        for (t, &c) in counts.iter().filter(|(_, &c)| c > 0) {
            *doc_count.entry(t.clone()).or_default() += 1;
            row.insert(t.clone(), f64::from(c) / total as f64);
        }
        tf.insert(id.clone(), row);
    }
    let idf = doc_count
        .iter()
        .map(|(t, &d)| (t.clone(), (n as f64 / (1 + d) as f64).ln()))
        .collect();
    Ok(TfidfIndex {
        n_samples: n,
        doc_count,
        idf,
        tf,
    })
}
