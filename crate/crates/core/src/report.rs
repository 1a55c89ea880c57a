//! Per-sample vendor label reports and their NDJSON wire form.
//!
//! One line per sample:
//! `{"sample_id": "...", "first_seen": "2012-03-01", "detections": {"Vendor": "Label", ...}}`.
//! Vendor order inside `detections` is preserved exactly as written.

use std::collections::HashSet;
use std::fmt;

use serde::de::{Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One vendor verdict. An empty label means the vendor gave no verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    pub vendor: String,
    pub label: String,
}

/// All vendor labels reported for a single sample.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AvReport {
    pub sample_id: String,
    pub first_seen: Option<String>,
    pub detections: Vec<Detection>,
}

impl AvReport {
    /// Builds a report, enforcing a non-empty id and unique vendor names.
    pub fn new<I, V, L>(sample_id: impl Into<String>, detections: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, L)>,
        V: Into<String>,
        L: Into<String>,
    {
        let report = AvReport {
            sample_id: sample_id.into(),
            first_seen: None,
            detections: detections
                .into_iter()
                .map(|(v, l)| Detection {
                    vendor: v.into(),
                    label: l.into(),
                })
                .collect(),
        };
        report.validate()?;
        Ok(report)
    }

    pub fn with_first_seen(mut self, date: impl Into<String>) -> Self {
        self.first_seen = Some(date.into());
        self
    }

    fn validate(&self) -> Result<()> {
        if self.sample_id.is_empty() {
            return Err(schema("sample_id must be non-empty"));
        }
        let mut seen = HashSet::with_capacity(self.detections.len());
        for d in &self.detections {
            if !seen.insert(d.vendor.as_str()) {
                return Err(schema(format!("duplicate vendor {:?}", d.vendor)));
            }
        }
        Ok(())
    }

    /// Serializes to a single JSON line (no trailing newline).
    pub fn to_json(&self) -> String {
        serde_json::to_string(&WireReport {
            sample_id: &self.sample_id,
            first_seen: self.first_seen.as_deref(),
            detections: DetectionsRef(&self.detections),
        })
        .expect("report serialization is infallible")
    }
}

fn schema(message: impl Into<String>) -> Error {
    Error::Schema {
        line: None,
        message: message.into(),
    }
}

/// Parses one report from UTF-8 JSON text.
pub fn parse_report(raw: &[u8]) -> Result<AvReport> {
    let text = std::str::from_utf8(raw).map_err(|e| Error::Parse {
        line: None,
        offset: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })?;
    let parsed: RawReport = serde_json::from_str(text).map_err(|e| classify(text, e))?;

    let sample_id = parsed
        .sample_id
        .ok_or_else(|| schema("missing field `sample_id`"))?;
    let detections = parsed
        .detections
        .ok_or_else(|| schema("missing field `detections`"))?;
    if let Some(vendor) = detections.duplicate {
        return Err(schema(format!("duplicate vendor {vendor:?}")));
    }
    let report = AvReport {
        sample_id,
        first_seen: parsed.first_seen,
        detections: detections.entries,
    };
    report.validate()?;
    Ok(report)
}

fn classify(text: &str, e: serde_json::Error) -> Error {
    use serde_json::error::Category;
    match e.classify() {
        Category::Data => schema(strip_position(&e)),
        _ => Error::Parse {
            line: None,
            offset: byte_offset(text, e.line(), e.column()),
            message: strip_position(&e),
        },
    }
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// serde_json reports 1-based line and column; convert to a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

#[derive(Deserialize)]
struct RawReport {
    #[serde(default)]
    sample_id: Option<String>,
    #[serde(default)]
    first_seen: Option<String>,
    #[serde(default)]
    detections: Option<RawDetections>,
}

/// Order-preserving map that remembers the first repeated key instead of
/// letting the last value win.
struct RawDetections {
    entries: Vec<Detection>,
    duplicate: Option<String>,
}

impl<'de> Deserialize<'de> for RawDetections {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct DetVisitor;

        impl<'de> Visitor<'de> for DetVisitor {
            type Value = RawDetections;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of vendor name to label")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<RawDetections, A::Error> {
                let mut entries = Vec::new();
                let mut seen = HashSet::new();
                let mut duplicate = None;
                while let Some((vendor, label)) = map.next_entry::<String, Option<String>>()? {
                    if !seen.insert(vendor.clone()) && duplicate.is_none() {
                        duplicate = Some(vendor.clone());
                    }
                    entries.push(Detection {
                        vendor,
                        label: label.unwrap_or_default(),
                    });
                }
                Ok(RawDetections { entries, duplicate })
            }
        }

        deserializer.deserialize_map(DetVisitor)
    }
}

#[derive(Serialize)]
struct WireReport<'a> {
    sample_id: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    first_seen: Option<&'a str>,
    detections: DetectionsRef<'a>,
}

struct DetectionsRef<'a>(&'a [Detection]);

impl Serialize for DetectionsRef<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for d in self.0 {
            map.serialize_entry(&d.vendor, &d.label)?;
        }
        map.end()
    }
}
