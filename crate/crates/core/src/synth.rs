//! Seeded generator of labelled multi-vendor report corpora.
//!
//! Every sample carries one planted family name. Most vendors put it into a
//! vendor-specific label template next to platform and behaviour tokens and
//! a per-label serial; the rest emit family-less generic detections.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cluster::{correction_delta, Dictionary};
use crate::corpus::write_atomic;
use crate::error::{Error, Result};
use crate::report::AvReport;
use crate::tokenize::tokenize_label;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthParams {
    pub families: usize,
    pub samples: usize,
    pub vendors: usize,
    /// Share of vendors per sample that emit a generic, family-less label.
    /// Capped at 0.4 so the family stays in at least 60% of the labels.
    pub noise: f64,
    /// Probability that a family-bearing label misspells the family.
    pub misspell: f64,
    pub seed: u64,
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        if self.families == 0 || self.samples == 0 || self.vendors == 0 {
            return Err(Error::Config("families, samples and vendors must be at least 1".into()));
        }
        for (name, v) in [("noise", self.noise), ("misspell", self.misspell)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must be in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

pub const MAX_NOISE: f64 = 0.4;

/// Minimum correction distance between a family name and any other token
/// the generator can emit.
const FAMILY_SEPARATION: f64 = 0.3;

const VENDOR_NAMES: &[&str] = &[
    "Avast", "AVG", "Avira", "BitDefender", "ClamAV", "Comodo", "Cyren", "DrWeb", "Emsisoft", "ESET-NOD32",
    "F-Secure", "Fortinet", "GData", "Ikarus", "Jiangmin", "K7GW", "Kaspersky", "Lionic", "Malwarebytes",
    "McAfee", "Microsoft", "NANO-Antivirus", "Panda", "Rising", "Sophos", "Symantec", "Tencent", "TrendMicro",
    "VBA32", "VIPRE", "Webroot", "Yandex", "Zillya", "ZoneAlarm", "Antiy-AVL", "Baidu", "Zoner", "Arcabit",
    "Cynet", "SUPERAntiSpyware",
];

const PLATFORMS: &[&[&str]] = &[
    &["Win32", "W32", "WinNT"],
    &["Android", "AndroidOS"],
    &["Linux", "ELF64"],
    &["O97M", "W97M", "Macro"],
];

const BEHAVIOURS: &[&[&str]] = &[
    &["Trojan", "Trojware"],
    &["Worm", "NetWorm"],
    &["Adware", "Grayware"],
    &["Downloader", "TrojanDownloader"],
    &["Backdoor", "RemoteAdmin"],
    &["Spyware", "InfoStealer"],
];

const GENERIC_LABELS: &[&str] = &[
    "Generic.Malware",
    "Trojan.Generic",
    "Malicious.Heuristic",
    "Suspicious.Behavior",
    "Artemis.Unsafe",
    "Riskware.Confidence",
];

/// `P` platform, `B` behaviour, `F` family, `S` serial. Like real vendor
/// formats, only some templates carry a platform or behaviour token.
const TEMPLATES: &[&str] = &[
    "P/F.B.S",
    "B.P.F.S",
    "B:P/F-S",
    "F.S.B",
    "P.F!S",
    "B/F.S",
    "P/F.S",
    "F.S",
    "F!S.P",
    "B.F.S",
];

const ONSETS: &[&str] = &[
    "b", "br", "d", "dr", "f", "fl", "g", "gr", "k", "kl", "l", "m", "n", "p", "pl", "r", "s", "st", "t", "tr",
    "v", "z",
];
const VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ou", "ya"];
const CODAS: &[&str] = &["", "", "k", "n", "r", "x"];

#[derive(Debug, Clone, Copy)]
enum Case {
    Title,
    Lower,
    Upper,
}

#[derive(Debug, Clone)]
struct VendorStyle {
    name: String,
    template: &'static str,
    /// Offset into each alias list, so vendors disagree on spellings.
    alias: usize,
    case: Case,
}

#[derive(Debug, Clone, Default)]
pub struct SynthCorpus {
    pub reports: Vec<AvReport>,
    /// `(sample_id, family)` in generation order.
    pub ground_truth: Vec<(String, String)>,
}

impl SynthCorpus {
    pub fn to_ndjson(&self) -> String {
        let mut s = String::new();
        for r in &self.reports {
            s.push_str(&r.to_json());
            s.push('\n');
        }
        s
    }

    pub fn ground_truth_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sample_id", "family"]).expect("in-memory write");
        for (id, fam) in &self.ground_truth {
            w.write_record([id, fam]).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
    }

    pub fn family_of(&self, sample_id: &str) -> Option<&str> {
        self.ground_truth
            .iter()
            .find(|(id, _)| id == sample_id)
            .map(|(_, f)| f.as_str())
    }
}

/// Every token the generator can emit besides families and serials.
fn fixed_tokens() -> Vec<String> {
    let mut out: Vec<String> = PLATFORMS
        .iter()
        .chain(BEHAVIOURS)
        .flat_map(|aliases| aliases.iter())
        .chain(GENERIC_LABELS)
        .flat_map(|l| tokenize_label(l))
        .collect();
    out.sort();
    out.dedup();
    out
}

fn far_from(candidate: &str, others: &[String]) -> bool {
    others
        .iter()
        .all(|o| correction_delta(candidate, o).is_ok_and(|d| d >= FAMILY_SEPARATION))
}

/// Draws `k` pronounceable names of 6 to 9 letters that are not dictionary
/// words and are at least the correction threshold apart from each other
/// and from every fixed token.
pub fn family_names(k: usize, rng: &mut impl Rng, dict: &Dictionary) -> Vec<String> {
    let fixed = fixed_tokens();
    let mut names: Vec<String> = Vec::with_capacity(k);
    while names.len() < k {
        let mut w = String::new();
        while w.len() < 6 {
            w.push_str(ONSETS.choose(rng).unwrap());
            w.push_str(VOWELS.choose(rng).unwrap());
        }
        w.push_str(CODAS.choose(rng).unwrap());
        if w.len() > 9 || dict.contains(&w) || !far_from(&w, &fixed) || !far_from(&w, &names) {
            continue;
        }
        names.push(w);
    }
    names
}

fn misspell(word: &str, rng: &mut impl Rng) -> String {
    let mut bytes = word.as_bytes().to_vec();
    let i = rng.gen_range(0..bytes.len());
    let mut c = bytes[i];
    while c == bytes[i] {
        c = rng.gen_range(b'a'..=b'z');
    }
    bytes[i] = c;
    String::from_utf8(bytes).expect("ascii")
}

fn serial(rng: &mut impl Rng) -> String {
    const ALNUM: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789";
    let len = rng.gen_range(5..=8);
    (0..len).map(|_| ALNUM[rng.gen_range(0..ALNUM.len())] as char).collect()
}

fn apply_case(s: &str, case: Case) -> String {
    match case {
        Case::Lower => s.to_lowercase(),
        Case::Upper => s.to_uppercase(),
        Case::Title => {
            let mut c = s.chars();
            match c.next() {
                Some(f) => f.to_uppercase().chain(c).collect(),
                None => String::new(),
            }
        }
    }
}

struct Generator {
    rng: ChaCha8Rng,
    vendors: Vec<VendorStyle>,
    ids: HashSet<String>,
}

impl Generator {
    fn new(seed: u64, n_vendors: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vendors = (0..n_vendors)
            .map(|v| VendorStyle {
                name: VENDOR_NAMES
                    .get(v)
                    .map(|n| n.to_string())
                    .unwrap_or_else(|| format!("Vendor{v}")),
                template: TEMPLATES[v % TEMPLATES.len()],
                alias: rng.gen_range(0..6),
                case: [Case::Title, Case::Lower, Case::Upper][rng.gen_range(0..3)],
            })
            .collect();
        Generator {
            rng,
            vendors,
            ids: HashSet::new(),
        }
    }

    fn sample_id(&mut self) -> String {
        loop {
            let id: String = (0..16).map(|_| format!("{:02x}", self.rng.gen::<u8>())).collect();
            if self.ids.insert(id.clone()) {
                return id;
            }
        }
    }

    fn context(&mut self) -> (usize, usize) {
        (self.rng.gen_range(0..PLATFORMS.len()), self.rng.gen_range(0..BEHAVIOURS.len()))
    }

    fn report(&mut self, family: &str, noise: f64, misspell_rate: f64) -> AvReport {
        let context = self.context();
        self.report_in(family, context, noise, misspell_rate)
    }

    /// `context` indexes the platform and behaviour alias lists.
    fn report_in(&mut self, family: &str, context: (usize, usize), noise: f64, misspell_rate: f64) -> AvReport {
        let id = self.sample_id();
        let platform = PLATFORMS[context.0];
        let behaviour = BEHAVIOURS[context.1];

        let n = self.vendors.len();
        let n_noisy = ((noise.min(MAX_NOISE) * n as f64).round() as usize).min((MAX_NOISE * n as f64) as usize);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut self.rng);
        let noisy: HashSet<usize> = order[..n_noisy].iter().copied().collect();

        let mut detections = Vec::with_capacity(n);
        for v in 0..n {
            let style = self.vendors[v].clone();
            let label = if noisy.contains(&v) {
                GENERIC_LABELS[self.rng.gen_range(0..GENERIC_LABELS.len())].to_string()
            } else {
                let fam = if self.rng.gen_bool(misspell_rate) {
                    misspell(family, &mut self.rng)
                } else {
                    family.to_string()
                };
                let mut label = String::new();
                for c in style.template.chars() {
                    match c {
                        'P' => label.push_str(&apply_case(platform[style.alias % platform.len()], style.case)),
                        'B' => label.push_str(&apply_case(behaviour[style.alias % behaviour.len()], style.case)),
                        'F' => label.push_str(&apply_case(&fam, style.case)),
                        'S' => label.push_str(&serial(&mut self.rng)),
                        other => label.push(other),
                    }
                }
                label
            };
            detections.push((style.name, label));
        }
        AvReport::new(id, detections).expect("generated reports are valid")
    }
}

/// Builds a corpus with `params.samples` reports, each assigned a uniformly
/// drawn family.
pub fn generate(params: &SynthParams, dict: &Dictionary) -> Result<SynthCorpus> {
    params.validate()?;
    let mut gen = Generator::new(params.seed, params.vendors);
    let families = family_names(params.families, &mut gen.rng, dict);
    let mut out = SynthCorpus::default();
    for _ in 0..params.samples {
        let fam = families[gen.rng.gen_range(0..families.len())].clone();
        let r = gen.report(&fam, params.noise, params.misspell);
        out.ground_truth.push((r.sample_id.clone(), fam));
        out.reports.push(r);
    }
    Ok(out)
}

/// Writes a generated corpus as NDJSON plus a `sample_id,family` CSV.
pub fn cmd_synth(params: &SynthParams, reports_path: &Path, gt_path: &Path) -> Result<SynthCorpus> {
    let corpus = generate(params, &Dictionary::bundled())?;
    write_atomic(reports_path, corpus.to_ndjson().as_bytes())?;
    write_atomic(gt_path, corpus.ground_truth_csv().as_bytes())?;
    Ok(corpus)
}

/// A small long-tail corpus and a later batch that makes one of its
/// families common.
#[derive(Debug, Clone)]
pub struct ExpansionScenario {
    /// 50 reports, each of a different family.
    pub base: SynthCorpus,
    /// 200 reports of the planted family with its platform and behaviour.
    pub update: SynthCorpus,
    pub planted_id: String,
    pub planted_family: String,
}

/// In the base corpus every family occurs once, so the family column of
/// each vendor looks like serial noise and is dropped. The update batch
/// repeats the planted family in the planted sample's context, which makes
/// that column stable.
pub fn expansion_scenario(seed: u64, vendors: usize) -> ExpansionScenario {
    const BASE: usize = 50;
    const UPDATE: usize = 200;
    let mut gen = Generator::new(seed, vendors);
    let families = family_names(BASE, &mut gen.rng, &Dictionary::bundled());
    let planted_family = families[0].clone();

    let planted_context = gen.context();

    let mut base = SynthCorpus::default();
    for (k, fam) in families.iter().enumerate() {
        let context = if k == 0 { planted_context } else { gen.context() };
        let r = gen.report_in(fam, context, 0.0, 0.0);
        base.ground_truth.push((r.sample_id.clone(), fam.clone()));
        base.reports.push(r);
    }
    let planted_id = base.reports[0].sample_id.clone();

    let mut update = SynthCorpus::default();
    for _ in 0..UPDATE {
        let r = gen.report_in(&planted_family, planted_context, 0.0, 0.0);
        update.ground_truth.push((r.sample_id.clone(), planted_family.clone()));
        update.reports.push(r);
    }
    ExpansionScenario {
        base,
        update,
        planted_id,
        planted_family,
    }
}
