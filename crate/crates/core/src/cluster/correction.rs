//! Spelling-variant correction inside a token cluster.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use super::TokenCluster;
use crate::error::{Error, Result};

/// Unit-cost edit distance over bytes (tokens are ASCII).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    let (a, b) = if a.len() < b.len() { (b, a) } else { (a, b) };
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = (up + 1).min(row[j] + 1).min(diag + usize::from(ca != cb));
            diag = up;
        }
    }
    row[b.len()]
}

/// Edit distance in excess of the length difference, over the longer length.
/// Zero when one token is a subsequence of the other ("gen" / "generic").
pub fn correction_delta(t1: &str, t2: &str) -> Result<f64> {
    if t1.is_empty() || t2.is_empty() {
        return Err(Error::Domain("correction delta of an empty token".into()));
    }
    let edit = levenshtein(t1, t2);
    let len_diff = t1.len().abs_diff(t2.len());
    let max_len = t1.len().max(t2.len());
    Ok((edit - len_diff) as f64 / max_len as f64)
}

/// Standard spellings that win a merge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dictionary {
    words: HashSet<String>,
}

const BUNDLED_WORDS: &str = include_str!("../../data/words.txt");

impl Dictionary {
    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: HashSet<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_ascii_lowercase())
            .filter(|w| !w.is_empty() && !w.starts_with('#'))
            .collect();
        if words.is_empty() {
            return Err(Error::Config("dictionary is empty".into()));
        }
        Ok(Dictionary { words })
    }

    /// Word list bundled with the crate.
    pub fn bundled() -> Self {
        Self::from_words(BUNDLED_WORDS.lines()).expect("bundled word list is non-empty")
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_words(text.lines())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Merges every member pair with `delta < threshold` (transitively) and
/// keeps one spelling per merged group:
/// the only dictionary word if exactly one member is in the dictionary,
/// otherwise the most frequent member, otherwise the lexicographically
/// smallest. Frequencies of a group are summed.
pub fn correct_cluster(cluster: &TokenCluster, dict: &Dictionary, threshold: f64) -> TokenCluster {
    let members = &cluster.members;
    let n = members.len();
    let mut sets = DisjointSet::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let delta = correction_delta(&members[i].0, &members[j].0)
                .expect("cluster members are non-empty tokens");
            if delta < threshold {
                sets.union(i, j);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        groups.entry(sets.find(i)).or_default().push(i);
    }
    let merged = groups.into_values().map(|idx| {
        let in_dict: Vec<usize> = idx.iter().copied().filter(|&i| dict.contains(&members[i].0)).collect();
        let survivor = if in_dict.len() == 1 {
            in_dict[0]
        } else {
            *idx.iter()
                .min_by(|&&a, &&b| {
                    members[b].1.cmp(&members[a].1).then_with(|| members[a].0.cmp(&members[b].0))
                })
                .expect("groups are non-empty")
        };
        let total: u32 = idx.iter().map(|&i| members[i].1).sum();
        (members[survivor].0.clone(), total)
    });
    TokenCluster::new(merged.collect(), cluster.centroid.clone())
}
