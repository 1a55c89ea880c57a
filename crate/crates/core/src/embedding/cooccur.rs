use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::filter::FilteredCorpus;
use crate::par;

/// Dense, 0-based token ids. Ids follow lexicographic token order, so the
/// mapping does not depend on the order samples were added.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocabulary {
    pub fn from_tokens<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = tokens.into_iter().map(Into::into).collect();
        let tokens: Vec<String> = set.into_iter().collect();
        let ids = tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        Vocabulary { tokens, ids }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub row: u32,
    pub col: u32,
    pub value: f64,
}

/// Sparse co-occurrence counts, sorted by `(row, col)`. Matrices built from a
/// corpus hold both orientations of every pair and never a diagonal entry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CooccurrenceMatrix {
    size: usize,
    entries: Vec<Entry>,
}

impl CooccurrenceMatrix {
    /// Builds a matrix from explicit entries. Values must be positive and
    /// finite, ids below `size`, no diagonal, no repeats.
    pub fn from_entries(size: usize, mut entries: Vec<Entry>) -> Result<Self> {
        for e in &entries {
            if !(e.value > 0.0 && e.value.is_finite()) {
                return Err(Error::Domain(format!(
                    "X[{}][{}] = {} must be positive and finite",
                    e.row, e.col, e.value
                )));
            }
            if e.row as usize >= size || e.col as usize >= size {
                return Err(Error::Domain(format!("entry ({}, {}) outside {size}x{size}", e.row, e.col)));
            }
            if e.row == e.col {
                return Err(Error::Domain(format!("diagonal entry ({0}, {0})", e.row)));
            }
        }
        entries.sort_by_key(|e| (e.row, e.col));
        if entries.windows(2).any(|w| (w[0].row, w[0].col) == (w[1].row, w[1].col)) {
            return Err(Error::Domain("repeated matrix entry".into()));
        }
        Ok(CooccurrenceMatrix { size, entries })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, row: u32, col: u32) -> f64 {
        self.entries
            .binary_search_by_key(&(row, col), |e| (e.row, e.col))
            .map(|i| self.entries[i].value)
            .unwrap_or(0.0)
    }
}

/// Distance-weighted counts of one token sequence, keyed by the unordered
/// pair `(lo, hi)`.
fn count_sequence(ids: &[u32], window: usize) -> HashMap<(u32, u32), f64> {
    let mut acc = HashMap::new();
    for (p, &a) in ids.iter().enumerate() {
        for d in 1..=window {
            let Some(&b) = ids.get(p + d) else { break };
            if a != b {
                *acc.entry((a.min(b), a.max(b))).or_insert(0.0) += 1.0 / d as f64;
            }
        }
    }
    acc
}

/// Counts token co-occurrence inside each sample's surviving token sequence.
///
/// Each ordered pair of distinct tokens at distance `d <= window` adds `1/d`
/// to both `X[i][j]` and `X[j][i]`. Windows never cross samples.
pub fn build_cooccurrence(fc: &FilteredCorpus, window: usize) -> Result<(Vocabulary, CooccurrenceMatrix)> {
    if window == 0 {
        return Err(Error::Config("window must be at least 1".into()));
    }
    let vocab = Vocabulary::from_tokens(
        fc.samples
            .values()
            .flatten()
            .flat_map(|s| s.tokens.iter().cloned()),
    );
    let ids: Vec<&str> = fc.samples.keys().map(String::as_str).collect();
    let per_sample = par::map(&ids, |id| {
        let seq: Vec<u32> = fc
            .sample_sequence(id)
            .into_iter()
            .map(|t| vocab.id(t).expect("vocabulary covers every surviving token"))
            .collect();
        let mut pairs: Vec<((u32, u32), f64)> = count_sequence(&seq, window).into_iter().collect();
        pairs.sort_by_key(|(k, _)| *k);
        pairs
    });

    // Merge in sample-id order so float sums do not depend on scheduling.
    let mut merged: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for pairs in per_sample {
        for (k, v) in pairs {
            *merged.entry(k).or_insert(0.0) += v;
        }
    }
    let mut entries = Vec::with_capacity(merged.len() * 2);
    for (&(a, b), &value) in &merged {
        entries.push(Entry { row: a, col: b, value });
        entries.push(Entry { row: b, col: a, value });
    }
    entries.sort_by_key(|e| (e.row, e.col));
    Ok((
        vocab.clone(),
        CooccurrenceMatrix {
            size: vocab.len(),
            entries,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tokenize::TokenSeq;

    fn fc(samples: &[(&str, &[&[&str]])]) -> FilteredCorpus {
        let mut out = FilteredCorpus::default();
        for (id, vendors) in samples {
            let seqs = vendors
                .iter()
                .enumerate()
                .map(|(v, toks)| TokenSeq {
                    tokens: toks.iter().map(|t| t.to_string()).collect(),
                    source_vendor: format!("v{v}"),
                    source_sample: id.to_string(),
                })
                .collect();
            out.samples.insert(id.to_string(), seqs);
        }
        out
    }

    fn x(vocab: &Vocabulary, m: &CooccurrenceMatrix, a: &str, b: &str) -> f64 {
        m.get(vocab.id(a).unwrap(), vocab.id(b).unwrap())
    }

    #[test]
    fn adjacent_pair() {
        let (v, m) = build_cooccurrence(&fc(&[("s", &[&["a", "b"]])]), 40).unwrap();
        assert_eq!(x(&v, &m, "a", "b"), 1.0);
        assert_eq!(x(&v, &m, "b", "a"), 1.0);
    }

    #[test]
    fn distance_two() {
        let (v, m) = build_cooccurrence(&fc(&[("s", &[&["a", "x", "b"]])]), 40).unwrap();
        assert_eq!(x(&v, &m, "a", "b"), 0.5);
    }

    #[test]
    fn repeated_token_has_no_diagonal() {
        let (v, m) = build_cooccurrence(&fc(&[("s", &[&["a", "a", "b"]])]), 40).unwrap();
        assert_eq!(x(&v, &m, "a", "b"), 1.5);
        assert_eq!(x(&v, &m, "a", "a"), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn vendors_concatenate_but_samples_do_not() {
        let (v, m) = build_cooccurrence(&fc(&[("s1", &[&["a"], &["b"]]), ("s2", &[&["c"]])]), 40).unwrap();
        assert_eq!(x(&v, &m, "a", "b"), 1.0);
        assert_eq!(x(&v, &m, "b", "c"), 0.0);
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn window_limits_reach() {
        let (v, m) = build_cooccurrence(&fc(&[("s", &[&["a", "x", "y", "b"]])]), 2).unwrap();
        assert_eq!(x(&v, &m, "a", "b"), 0.0);
        assert_eq!(x(&v, &m, "a", "y"), 0.5);
    }

    #[test]
    fn empty_corpus_is_empty() {
        let (v, m) = build_cooccurrence(&FilteredCorpus::default(), 40).unwrap();
        assert!(v.is_empty() && m.is_empty());
    }

    #[test]
    fn from_entries_validates() {
        let e = |row, col, value| Entry { row, col, value };
        assert!(CooccurrenceMatrix::from_entries(2, vec![e(0, 1, 0.0)]).is_err());
        assert!(CooccurrenceMatrix::from_entries(2, vec![e(0, 0, 1.0)]).is_err());
        assert!(CooccurrenceMatrix::from_entries(2, vec![e(0, 2, 1.0)]).is_err());
        assert!(CooccurrenceMatrix::from_entries(2, vec![e(0, 1, 1.0), e(0, 1, 2.0)]).is_err());
        let m = CooccurrenceMatrix::from_entries(2, vec![e(1, 0, 3.0), e(0, 1, 3.0)]).unwrap();
        assert_eq!(m.entries()[0].row, 0);
    }
}
