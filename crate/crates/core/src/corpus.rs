//! Append-only sample corpus and its on-disk form: an NDJSON report file
//! plus a small version sidecar.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::par;
use crate::report::{parse_report, AvReport};

/// Bumped when the on-disk layout changes.
pub const STATE_FORMAT: u32 = 1;

pub const CORPUS_FILE: &str = "corpus.ndjson";
pub const VERSION_FILE: &str = "corpus.version";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DuplicatePolicy {
    #[default]
    Reject,
    Skip,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    reports: Vec<AvReport>,
    version: u64,
}

impl Corpus {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn reports(&self) -> &[AvReport] {
        &self.reports
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn len(&self) -> usize {
        self.reports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reports.is_empty()
    }

    pub fn contains(&self, sample_id: &str) -> bool {
        self.reports.iter().any(|r| r.sample_id == sample_id)
    }

    /// Returns a new corpus holding every prior report plus `batch`.
    ///
    /// Under [`DuplicatePolicy::Reject`] any id already present (or repeated
    /// inside the batch) fails the whole call. Under `Skip` the first
    /// occurrence wins. The version only moves when something was added.
    pub fn add_reports(&self, batch: Vec<AvReport>, policy: DuplicatePolicy) -> Result<Corpus> {
        let mut ids: HashSet<&str> = self.reports.iter().map(|r| r.sample_id.as_str()).collect();
        let mut fresh = Vec::with_capacity(batch.len());
        let mut dups = Vec::new();
        for r in &batch {
            if ids.insert(r.sample_id.as_str()) {
                fresh.push(r);
            } else {
                dups.push(r.sample_id.clone());
            }
        }
        if policy == DuplicatePolicy::Reject && !dups.is_empty() {
            dups.sort();
            dups.dedup();
            return Err(Error::DuplicateSamples(dups));
        }
        let added = !fresh.is_empty();
        let mut reports = self.reports.clone();
        reports.extend(fresh.into_iter().cloned());
        Ok(Corpus {
            reports,
            version: self.version + u64::from(added),
        })
    }

    /// Loads a persisted corpus directory written by [`Corpus::save`].
    pub fn load(dir: &Path) -> Result<Corpus> {
        let sidecar = dir.join(VERSION_FILE);
        let text = fs::read_to_string(&sidecar).map_err(|e| Error::io(&sidecar, e))?;
        let meta = Sidecar::parse(&text)
            .ok_or_else(|| Error::VersionMismatch(format!("{}: unreadable sidecar", sidecar.display())))?;
        if meta.format != STATE_FORMAT {
            return Err(Error::VersionMismatch(format!(
                "state format {} but this build reads format {STATE_FORMAT}",
                meta.format
            )));
        }
        let reports = read_ndjson(&dir.join(CORPUS_FILE))?;
        if reports.len() != meta.count {
            return Err(Error::VersionMismatch(format!(
                "sidecar records {} reports but {} holds {}",
                meta.count,
                CORPUS_FILE,
                reports.len()
            )));
        }
        Ok(Corpus {
            reports,
            version: meta.version,
        })
    }

    /// Writes the corpus and its sidecar. Each file is written to a temporary
    /// sibling and renamed, so readers only see complete versions.
    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut body = String::new();
        for r in &self.reports {
            body.push_str(&r.to_json());
            body.push('\n');
        }
        write_atomic(&dir.join(CORPUS_FILE), body.as_bytes())?;
        let meta = Sidecar {
            format: STATE_FORMAT,
            version: self.version,
            count: self.reports.len(),
        };
        write_atomic(&dir.join(VERSION_FILE), meta.render().as_bytes())
    }
}

struct Sidecar {
    format: u32,
    version: u64,
    count: usize,
}

impl Sidecar {
    fn render(&self) -> String {
        format!(
            "format={}\nversion={}\ncount={}\n",
            self.format, self.version, self.count
        )
    }

    fn parse(text: &str) -> Option<Sidecar> {
        let (mut format, mut version, mut count) = (None, None, None);
        for line in text.lines() {
            let (k, v) = line.split_once('=')?;
            match k.trim() {
                "format" => format = v.trim().parse().ok(),
                "version" => version = v.trim().parse().ok(),
                "count" => count = v.trim().parse().ok(),
                _ => {}
            }
        }
        Some(Sidecar {
            format: format?,
            version: version?,
            count: count?,
        })
    }
}

/// Reads and parses every non-blank line of an NDJSON report file.
/// Errors carry the 1-based line number of the first bad line.
pub fn read_ndjson(path: &Path) -> Result<Vec<AvReport>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ndjson(&text)
}

pub fn parse_ndjson(text: &str) -> Result<Vec<AvReport>> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l))
        .collect();
    let parsed = par::map(&lines, |(n, l)| parse_report(l.as_bytes()).map_err(|e| e.at_line(*n)));
    parsed.into_iter().collect()
}

pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!(
        "{}.tmp",
        path.extension().and_then(|e| e.to_str()).unwrap_or("")
    ));
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
