//! Positional noise filter.
//!
//! For each vendor, labels are viewed as columns of tokens, addressed from
//! the left (forward) and from the right (reverse), 1-based, without padding.
//! The unique index of a column is the share of its tokens that occur exactly
//! once there. Serial numbers and hashes make that share high. Two scans per
//! vendor (forward and reverse) keep columns while the index stays below the
//! threshold and stop at the first column that reaches it; a token survives
//! when its forward or reverse position was kept.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::par;
use crate::tokenize::TokenSeq;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    Forward,
    Reverse,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Reverse => "reverse",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterParams {
    pub sigma_threshold: f64,
    /// Vendors with fewer non-empty labels than this are left unfiltered.
    pub min_vendor_labels: usize,
}

impl Default for FilterParams {
    fn default() -> Self {
        FilterParams {
            sigma_threshold: 0.3,
            min_vendor_labels: 5,
        }
    }
}

type Column = HashMap<String, u32>;

/// Per-position token counts for one vendor.
#[derive(Debug, Clone, Default)]
pub struct VendorPositionTable {
    pub vendor: String,
    pub columns_fwd: Vec<Column>,
    pub columns_rev: Vec<Column>,
    pub i_max: usize,
    /// Number of non-empty labels folded into the table.
    pub labels: usize,
}

impl VendorPositionTable {
    pub fn new(vendor: impl Into<String>) -> Self {
        VendorPositionTable {
            vendor: vendor.into(),
            ..Default::default()
        }
    }

    pub fn from_labels<S: AsRef<str>>(vendor: &str, labels: &[Vec<S>]) -> Self {
        let mut t = Self::new(vendor);
        for l in labels {
            t.add(l);
        }
        t
    }

    pub fn add<S: AsRef<str>>(&mut self, tokens: &[S]) {
        let n = tokens.len();
        if n == 0 {
            return;
        }
        if n > self.i_max {
            self.i_max = n;
            self.columns_fwd.resize_with(n, Column::new);
            self.columns_rev.resize_with(n, Column::new);
        }
        for (p, tok) in tokens.iter().enumerate() {
            let tok = tok.as_ref();
            *self.columns_fwd[p].entry(tok.to_string()).or_default() += 1;
            *self.columns_rev[n - 1 - p].entry(tok.to_string()).or_default() += 1;
        }
        self.labels += 1;
    }

    pub fn column(&self, position: usize, direction: Direction) -> Option<&Column> {
        let cols = match direction {
            Direction::Forward => &self.columns_fwd,
            Direction::Reverse => &self.columns_rev,
        };
        position.checked_sub(1).and_then(|i| cols.get(i))
    }

    pub fn total_tokens(&self, direction: Direction) -> u64 {
        let cols = match direction {
            Direction::Forward => &self.columns_fwd,
            Direction::Reverse => &self.columns_rev,
        };
        cols.iter().flat_map(|c| c.values()).map(|&n| u64::from(n)).sum()
    }
}

/// Share of tokens in the addressed column that occur exactly once there.
pub fn unique_index(table: &VendorPositionTable, position: usize, direction: Direction) -> Result<f64> {
    let undefined = || Error::UndefinedColumn {
        vendor: table.vendor.clone(),
        position,
        direction: direction.as_str(),
    };
    let col = table.column(position, direction).ok_or_else(undefined)?;
    let all: u64 = col.values().map(|&n| u64::from(n)).sum();
    if all == 0 {
        return Err(undefined());
    }
    let unique = col.values().filter(|&&n| n == 1).count() as u64;
    Ok(unique as f64 / all as f64)
}

/// Kept positions of one directional scan.
fn scan(table: &VendorPositionTable, direction: Direction, threshold: f64) -> Result<Vec<usize>> {
    let mut kept = Vec::new();
    for position in 1..=table.i_max {
        if unique_index(table, position, direction)? < threshold {
            kept.push(position);
        } else {
            break;
        }
    }
    Ok(kept)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KeptPositions {
    pub forward: BTreeSet<usize>,
    pub reverse: BTreeSet<usize>,
    /// True when the vendor had too few labels and was not filtered.
    pub unfiltered: bool,
}

impl KeptPositions {
    /// Whether the token at 1-based `position` of a `len`-token label survives.
    pub fn keeps(&self, position: usize, len: usize) -> bool {
        self.unfiltered
            || self.forward.contains(&position)
            || self.reverse.contains(&(len + 1 - position))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Direction, usize)> + '_ {
        self.forward
            .iter()
            .map(|&p| (Direction::Forward, p))
            .chain(self.reverse.iter().map(|&p| (Direction::Reverse, p)))
    }
}

pub fn kept_positions(table: &VendorPositionTable, params: &FilterParams) -> Result<KeptPositions> {
    if table.labels < params.min_vendor_labels {
        return Ok(KeptPositions {
            forward: (1..=table.i_max).collect(),
            reverse: BTreeSet::new(),
            unfiltered: true,
        });
    }
    Ok(KeptPositions {
        forward: scan(table, Direction::Forward, params.sigma_threshold)?.into_iter().collect(),
        reverse: scan(table, Direction::Reverse, params.sigma_threshold)?.into_iter().collect(),
        unfiltered: false,
    })
}

/// Surviving tokens of every sample, keyed by sample id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FilteredCorpus {
    /// Vendor order within a sample follows the report.
    pub samples: BTreeMap<String, Vec<TokenSeq>>,
    pub kept_positions: BTreeMap<String, KeptPositions>,
}

impl FilteredCorpus {
    /// All surviving tokens of a sample, vendors concatenated in report order.
    pub fn sample_sequence(&self, sample_id: &str) -> Vec<&str> {
        self.samples
            .get(sample_id)
            .into_iter()
            .flatten()
            .flat_map(|s| s.tokens.iter().map(String::as_str))
            .collect()
    }

    pub fn sample_counts(&self, sample_id: &str) -> BTreeMap<String, u32> {
        let mut counts = BTreeMap::new();
        for t in self.sample_sequence(sample_id) {
            *counts.entry(t.to_string()).or_default() += 1;
        }
        counts
    }
}

pub fn build_tables(tokenized: &[Vec<TokenSeq>]) -> BTreeMap<String, VendorPositionTable> {
    let mut tables: BTreeMap<String, VendorPositionTable> = BTreeMap::new();
    for seq in tokenized.iter().flatten() {
        tables
            .entry(seq.source_vendor.clone())
            .or_insert_with(|| VendorPositionTable::new(seq.source_vendor.clone()))
            .add(&seq.tokens);
    }
    tables
}

pub fn filter_tokens(corpus: &Corpus, params: &FilterParams) -> Result<FilteredCorpus> {
    if !(params.sigma_threshold > 0.0 && params.sigma_threshold <= 1.0) {
        return Err(Error::Config(format!(
            "sigma_threshold must be in (0, 1], got {}",
            params.sigma_threshold
        )));
    }
    let tokenized: Vec<Vec<TokenSeq>> = par::map(corpus.reports(), |r| {
        r.detections
            .iter()
            .map(|d| TokenSeq::from_label(&r.sample_id, &d.vendor, &d.label))
            .collect()
    });
    let tables: Vec<VendorPositionTable> = build_tables(&tokenized).into_values().collect();
    let kept: Vec<Result<KeptPositions>> = par::map(&tables, |t| kept_positions(t, params));
    let mut kept_positions = BTreeMap::new();
    for (t, k) in tables.iter().zip(kept) {
        kept_positions.insert(t.vendor.clone(), k?);
    }

    let filtered: Vec<Vec<TokenSeq>> = par::map(&tokenized, |seqs| {
        seqs.iter()
            .map(|s| {
                let len = s.tokens.len();
                let tokens = match kept_positions.get(&s.source_vendor) {
                    Some(k) => s
                        .tokens
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| k.keeps(i + 1, len))
                        .map(|(_, t)| t.clone())
                        .collect(),
                    None => Vec::new(),
                };
                TokenSeq {
                    tokens,
                    source_vendor: s.source_vendor.clone(),
                    source_sample: s.source_sample.clone(),
                }
            })
            .collect()
    });

    let samples = corpus
        .reports()
        .iter()
        .map(|r| r.sample_id.clone())
        .zip(filtered)
        .collect();
    Ok(FilteredCorpus {
        samples,
        kept_positions,
    })
}
