//! In-sample token clustering and spelling correction.

mod correction;
mod meanshift;

use std::collections::BTreeMap;

pub use correction::{correct_cluster, correction_delta, levenshtein, Dictionary};
pub use meanshift::{mean_shift, MeanShiftResult};

use crate::embedding::EmbeddingModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterParams {
    pub bandwidth: f64,
    pub max_iter: usize,
    pub delta_threshold: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            bandwidth: 2.0,
            max_iter: 100,
            delta_threshold: 0.3,
        }
    }
}

/// Tokens grouped together, most frequent first (ties lexicographic).
#[derive(Debug, Clone, PartialEq)]
pub struct TokenCluster {
    pub members: Vec<(String, u32)>,
    pub centroid: Vec<f64>,
}

impl TokenCluster {
    pub fn new(mut members: Vec<(String, u32)>, centroid: Vec<f64>) -> Self {
        members.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        TokenCluster { members, centroid }
    }

    pub fn contains(&self, token: &str) -> bool {
        self.members.iter().any(|(t, _)| t == token)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn total_frequency(&self) -> u64 {
        self.members.iter().map(|(_, f)| u64::from(*f)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleClustering {
    pub sample_id: String,
    pub clusters: Vec<TokenCluster>,
}

impl SampleClustering {
    /// Post-clustering token multiset of the sample.
    pub fn token_counts(&self) -> BTreeMap<String, u32> {
        let mut out = BTreeMap::new();
        for c in &self.clusters {
            for (t, f) in &c.members {
                *out.entry(t.clone()).or_default() += f;
            }
        }
        out
    }

    pub fn frequency(&self, token: &str) -> Option<u32> {
        self.clusters
            .iter()
            .flat_map(|c| &c.members)
            .find(|(t, _)| t == token)
            .map(|(_, f)| *f)
    }
}

/// Clusters the distinct tokens of one sample by their embeddings.
/// An empty token multiset yields an empty clustering.
pub fn cluster_sample(
    sample_id: &str,
    counts: &BTreeMap<String, u32>,
    model: &EmbeddingModel,
    params: &ClusterParams,
) -> Result<SampleClustering> {
    if counts.is_empty() {
        return Ok(SampleClustering {
            sample_id: sample_id.to_string(),
            clusters: Vec::new(),
        });
    }
    let tokens: Vec<(&String, u32)> = counts.iter().map(|(t, f)| (t, *f)).collect();
    let points = tokens
        .iter()
        .map(|(t, _)| model.token_vector(t))
        .collect::<Result<Vec<_>>>()?;
    let ms = mean_shift(&points, params.bandwidth, params.max_iter)?;
    let mut grouped: Vec<Vec<(String, u32)>> = vec![Vec::new(); ms.n_clusters()];
    for ((t, f), label) in tokens.into_iter().zip(&ms.labels) {
        grouped[*label].push((t.clone(), f));
    }
    let clusters = grouped
        .into_iter()
        .zip(ms.centers)
        .map(|(m, c)| TokenCluster::new(m, c))
        .collect();
    Ok(SampleClustering {
        sample_id: sample_id.to_string(),
        clusters,
    })
}

/// Applies [`correct_cluster`] to every cluster of a sample.
pub fn correct_sample(clustering: &SampleClustering, dict: &Dictionary, threshold: f64) -> SampleClustering {
    SampleClustering {
        sample_id: clustering.sample_id.clone(),
        clusters: clustering
            .clusters
            .iter()
            .map(|c| correct_cluster(c, dict, threshold))
            .collect(),
    }
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold <= 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("delta_threshold must be in (0, 1], got {threshold}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::{Vocabulary, Weighting};

    fn model_with(points: &[(&str, [f64; 2])]) -> EmbeddingModel {
        let vocab = Vocabulary::from_tokens(points.iter().map(|(t, _)| *t));
        let mut m = EmbeddingModel::initialize(vocab, 2, Weighting::default(), 0);
        m.context.iter_mut().for_each(|v| *v = 0.0);
        for (t, p) in points {
            let id = m.vocab.id(t).unwrap() as usize;
            m.main[id * 2..id * 2 + 2].copy_from_slice(p);
        }
        m
    }

    fn counts(items: &[(&str, u32)]) -> BTreeMap<String, u32> {
        items.iter().map(|(t, f)| (t.to_string(), *f)).collect()
    }

    #[test]
    fn single_token_single_cluster() {
        let m = model_with(&[("worm", [0.0, 0.0])]);
        let c = cluster_sample("s", &counts(&[("worm", 3)]), &m, &ClusterParams::default()).unwrap();
        assert_eq!(c.clusters.len(), 1);
        assert_eq!(c.clusters[0].members, [("worm".to_string(), 3)]);
    }

    #[test]
    fn groups_follow_geometry() {
        let m = model_with(&[
            ("a", [0.0, 0.0]),
            ("b", [0.3, 0.1]),
            ("c", [10.0, 10.0]),
            ("d", [10.2, 9.9]),
            ("e", [9.8, 10.1]),
        ]);
        let c = cluster_sample(
            "s",
            &counts(&[("a", 1), ("b", 4), ("c", 2), ("d", 2), ("e", 9)]),
            &m,
            &ClusterParams::default(),
        )
        .unwrap();
        let names: Vec<Vec<&str>> = c
            .clusters
            .iter()
            .map(|k| k.members.iter().map(|(t, _)| t.as_str()).collect())
            .collect();
        assert_eq!(names, [vec!["e", "c", "d"], vec!["b", "a"]]);
        assert_eq!(c.token_counts().values().sum::<u32>(), 18);
    }

    #[test]
    fn stale_model_names_token() {
        let m = model_with(&[("a", [0.0, 0.0])]);
        let e = cluster_sample("s", &counts(&[("a", 1), ("ghost", 1)]), &m, &ClusterParams::default())
            .unwrap_err();
        assert!(matches!(e, Error::UnknownToken(t) if t == "ghost"));
    }

    #[test]
    fn empty_sample() {
        let m = model_with(&[("a", [0.0, 0.0])]);
        let c = cluster_sample("s", &BTreeMap::new(), &m, &ClusterParams::default()).unwrap();
        assert!(c.clusters.is_empty());
    }
}
