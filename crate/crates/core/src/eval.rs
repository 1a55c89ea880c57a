//! Top-N tagging accuracy against a ground-truth family table.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::ranking::parse_keywords;

pub const MAX_TOP_N: usize = 10;

/// `accuracy[n - 1]` is the share of evaluated samples whose family appears
/// among their first `n` output tokens (case-insensitive).
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub accuracy: [f64; MAX_TOP_N],
    pub hits: [usize; MAX_TOP_N],
    pub evaluated: usize,
    /// Ground-truth ids with no line in the outputs.
    pub missing: Vec<String>,
}

impl EvalReport {
    pub fn top(&self, n: usize) -> f64 {
        self.accuracy[n.clamp(1, MAX_TOP_N) - 1]
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "TopN  Accuracy  Hits")?;
        for n in 0..MAX_TOP_N {
            writeln!(f, "{:>4}  {:>8.3}  {:>4}", n + 1, self.accuracy[n], self.hits[n])?;
        }
        write!(f, "evaluated {}, unevaluable {}", self.evaluated, self.missing.len())
    }
}

/// Parses `sample_id<TAB>keywords` lines into token lists.
pub fn parse_outputs(text: &str) -> BTreeMap<String, Vec<String>> {
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            let (id, kws) = l.split_once('\t').unwrap_or((l, ""));
            (id.to_string(), parse_keywords(kws))
        })
        .collect()
}

/// Parses a `sample_id,family` CSV with a header row. Fields may not
/// contain commas; there is no quoting.
pub fn parse_ground_truth(text: &str, path: &Path) -> Result<Vec<(String, String)>> {
    let err = |line: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.trim_start_matches('\u{feff}').as_bytes());
    let mut records = reader.records();
    match records.next() {
        Some(Ok(h)) if h.iter().eq(["sample_id", "family"]) => {}
        Some(Ok(h)) => return Err(err(1, format!("expected header `sample_id,family`, found {:?}", h.as_slice()))),
        Some(Err(e)) => return Err(err(1, e.to_string())),
        None => return Err(err(1, "missing header".into())),
    }
    let mut rows = Vec::new();
    for record in records {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != 2 {
            return Err(err(line, format!("expected 2 fields, found {}", record.len())));
        }
        let (id, fam) = (&record[0], &record[1]);
        if id.is_empty() || fam.is_empty() {
            return Err(err(line, "empty field".into()));
        }
        rows.push((id.to_string(), fam.to_string()));
    }
    Ok(rows)
}

pub fn evaluate(outputs: &BTreeMap<String, Vec<String>>, ground_truth: &[(String, String)]) -> EvalReport {
    let mut hits = [0usize; MAX_TOP_N];
    let mut evaluated = 0;
    let mut missing = Vec::new();
    for (id, family) in ground_truth {
        let Some(tokens) = outputs.get(id) else {
            missing.push(id.clone());
            continue;
        };
        evaluated += 1;
        let family = family.to_lowercase();
        if let Some(pos) = tokens.iter().position(|t| t.to_lowercase() == family) {
            for h in hits.iter_mut().skip(pos) {
                *h += 1;
            }
        }
    }
    let mut accuracy = [0.0; MAX_TOP_N];
    if evaluated > 0 {
        for (a, h) in accuracy.iter_mut().zip(hits) {
            *a = h as f64 / evaluated as f64;
        }
    }
    EvalReport {
        accuracy,
        hits,
        evaluated,
        missing,
    }
}

pub fn cmd_eval(outputs_path: &Path, groundtruth_csv: &Path) -> Result<EvalReport> {
    let out = std::fs::read_to_string(outputs_path).map_err(|e| Error::io(outputs_path, e))?;
    let gt = std::fs::read_to_string(groundtruth_csv).map_err(|e| Error::io(groundtruth_csv, e))?;
    let ground_truth = parse_ground_truth(&gt, groundtruth_csv)?;
    Ok(evaluate(&parse_outputs(&out), &ground_truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outputs(items: &[(&str, &[&str])]) -> BTreeMap<String, Vec<String>> {
        items
            .iter()
            .map(|(id, t)| (id.to_string(), t.iter().map(|s| s.to_string()).collect()))
            .collect()
    }

    fn gt(items: &[(&str, &str)]) -> Vec<(String, String)> {
        items.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn hit_position() {
        let r = evaluate(&outputs(&[("s", &["win32", "flystudio", "worm"])]), &gt(&[("s", "flystudio")]));
        assert_eq!(r.top(1), 0.0);
        assert_eq!(r.top(2), 1.0);
        assert_eq!(r.top(10), 1.0);
    }

    #[test]
    fn half_at_three() {
        let r = evaluate(
            &outputs(&[("a", &["x", "y", "fam"]), ("b", &["x", "y", "z"])]),
            &gt(&[("a", "fam"), ("b", "fam")]),
        );
        assert_eq!(r.top(3), 0.5);
        assert_eq!(r.top(2), 0.0);
    }

    #[test]
    fn case_insensitive() {
        let r = evaluate(&outputs(&[("s", &["flystudio"])]), &gt(&[("s", "FlyStudio")]));
        assert_eq!(r.top(1), 1.0);
    }

    #[test]
    fn missing_ids_reported() {
        let r = evaluate(&outputs(&[("a", &["fam"])]), &gt(&[("a", "fam"), ("ghost", "fam")]));
        assert_eq!(r.evaluated, 1);
        assert_eq!(r.missing, ["ghost"]);
        assert_eq!(r.top(1), 1.0);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let p = Path::new("gt.csv");
        assert!(matches!(parse_ground_truth("id,fam\n", p), Err(Error::Csv { line: 1, .. })));
        assert!(matches!(
            parse_ground_truth("sample_id,family\na,b\nc,d,e\n", p),
            Err(Error::Csv { line: 3, .. })
        ));
        assert_eq!(parse_ground_truth("sample_id,family\na,b\n\n", p).unwrap(), gt(&[("a", "b")]));
    }

    #[test]
    fn quoted_fields_and_bom() {
        let text = "\u{feff}sample_id,family\r\n\"x,1\", zbot \r\n";
        assert_eq!(parse_ground_truth(text, Path::new("g")).unwrap(), gt(&[("x,1", "zbot")]));
    }

    #[test]
    fn outputs_file_parsing() {
        let o = parse_outputs("s1\tzbot,5\u{2016}win32,3\ns2\t\n");
        assert_eq!(o["s1"], ["zbot", "win32"]);
        assert!(o["s2"].is_empty());
    }
}
