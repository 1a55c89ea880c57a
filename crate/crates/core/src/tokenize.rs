//! Label tokenization: every character outside `[A-Za-z0-9]` separates
//! tokens, tokens are lowercased, empty fragments are dropped.

/// Token sequence produced by one vendor for one sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub tokens: Vec<String>,
    pub source_vendor: String,
    pub source_sample: String,
}

impl TokenSeq {
    pub fn from_label(sample: &str, vendor: &str, raw_label: &str) -> Self {
        TokenSeq {
            tokens: tokenize_label(raw_label),
            source_vendor: vendor.to_string(),
            source_sample: sample.to_string(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

pub fn tokenize_label(raw_label: &str) -> Vec<String> {
    raw_label
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|frag| !frag.is_empty())
        .map(str::to_ascii_lowercase)
        .collect()
}
