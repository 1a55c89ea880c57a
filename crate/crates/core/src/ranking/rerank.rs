use std::fmt;

use crate::cluster::SampleClustering;

/// Final ordered keywords of one sample, each with its in-sample count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedKeywords {
    pub sample_id: String,
    pub entries: Vec<(String, u32)>,
    pub top_n: usize,
}

impl RankedKeywords {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(t, _)| t.as_str())
    }
}

/// Picks the output keywords of a sample.
///
/// The best cluster is the one holding the top tf-idf token. When it has at
/// least `top_n` members, its `top_n` most frequent members are used and the
/// last slot goes to the second tf-idf token if that token lies outside the
/// best cluster. Otherwise the whole best cluster is used and the remaining
/// slots are filled in tf-idf order.
pub fn rerank(clustering: &SampleClustering, tfidf_order: &[String], top_n: usize) -> RankedKeywords {
    let freq = |t: &str| clustering.frequency(t).unwrap_or(0);
    let mut result: Vec<&str> = Vec::with_capacity(top_n);

    let best = tfidf_order
        .first()
        .and_then(|first| clustering.clusters.iter().find(|c| c.contains(first)));

    match best {
        Some(best) if top_n > 0 && best.len() >= top_n => {
            result.extend(best.members[..top_n].iter().map(|(t, _)| t.as_str()));
            if let Some(second) = tfidf_order.get(1) {
                if !best.contains(second) {
                    result[top_n - 1] = second;
                }
            }
        }
        _ => {
            if let Some(best) = best {
                result.extend(best.members.iter().map(|(t, _)| t.as_str()));
            }
            for t in tfidf_order {
                if result.len() >= top_n {
                    break;
                }
                if !result.contains(&t.as_str()) {
                    result.push(t);
                }
            }
        }
    }

    RankedKeywords {
        sample_id: clustering.sample_id.clone(),
        entries: result.into_iter().map(|t| (t.to_string(), freq(t))).collect(),
        top_n,
    }
}

/// Separator placed between `token,count` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Separator {
    /// U+2016 DOUBLE VERTICAL LINE.
    #[default]
    DoubleBar,
    /// Two ASCII pipes.
    Ascii,
}

impl Separator {
    pub fn as_str(self) -> &'static str {
        match self {
            Separator::DoubleBar => "\u{2016}",
            Separator::Ascii => "||",
        }
    }
}

impl fmt::Display for Separator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn format_output(rk: &RankedKeywords, sep: Separator) -> String {
    rk.entries
        .iter()
        .map(|(t, c)| format!("{t},{c}"))
        .collect::<Vec<_>>()
        .join(sep.as_str())
}

/// Inverse of [`format_output`] for either separator; counts are dropped.
pub fn parse_keywords(formatted: &str) -> Vec<String> {
    if formatted.is_empty() {
        return Vec::new();
    }
    formatted
        .split(Separator::DoubleBar.as_str())
        .flat_map(|part| part.split(Separator::Ascii.as_str()))
        .filter(|e| !e.is_empty())
        .map(|e| match e.rsplit_once(',') {
            Some((t, _)) => t.to_string(),
            None => e.to_string(),
        })
        .collect()
}
