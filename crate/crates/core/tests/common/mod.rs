//! Shared references and fixtures for the integration tests.
#![allow(dead_code)]

use std::collections::HashMap;

use labelmine::AvReport;

/// Keeps the token at 1-based position `p` of an `l`-token label when the
/// forward scan reached column `p` or the reverse scan reached column
/// `l + 1 - p`. A scan keeps columns while the share of once-only tokens
/// stays below the threshold.
pub fn reference_filter(labels: &[Vec<String>], threshold: f64, min_labels: usize) -> Vec<Vec<String>> {
    if labels.len() < min_labels {
        return labels.to_vec();
    }
    let reach = |column_of: &dyn Fn(&Vec<String>, usize) -> Option<String>| -> usize {
        let mut p = 1;
        loop {
            let column: Vec<String> = labels.iter().filter_map(|l| column_of(l, p)).collect();
            if column.is_empty() {
                return p - 1;
            }
            let mut counts: HashMap<&str, usize> = HashMap::new();
            for t in &column {
                *counts.entry(t).or_default() += 1;
            }
            let once = column.iter().filter(|t| counts[t.as_str()] == 1).count();
            if once as f64 / column.len() as f64 >= threshold {
                return p - 1;
            }
            p += 1;
        }
    };
    let fwd = reach(&|l, p| l.get(p - 1).cloned());
    let rev = reach(&|l, p| if p <= l.len() { Some(l[l.len() - p].clone()) } else { None });
    labels
        .iter()
        .map(|l| {
            (1..=l.len())
                .filter(|&p| p <= fwd || l.len() + 1 - p <= rev)
                .map(|p| l[p - 1].clone())
                .collect()
        })
        .collect()
}

pub const TARGET: &str = "f1a5c0de";

/// Ten-vendor worm fixture: the flystudio target plus nine background
/// samples (two more flystudio, four buzus, three virut), so every vendor
/// has ten labels and the column filter engages.
pub fn worm_fixture() -> Vec<AvReport> {
    let samples: [(&str, &str); 10] = [
        (TARGET, "flystudio"),
        ("f2b6d1ef", "flystudio"),
        ("f3c7e2f0", "flystudio"),
        ("b1a1a1a1", "buzus"),
        ("b2b2b2b2", "buzus"),
        ("b3c3c3c3", "buzus"),
        ("b4d4d4d4", "buzus"),
        ("c1e1e1e1", "virut"),
        ("c2f2f2f2", "virut"),
        ("c3a9a9a9", "virut"),
    ];
    let letters = ["A", "B", "C", "D", "E", "F", "G", "H", "J", "K"];
    let pairs = ["AB", "CD", "EF", "GH", "JK", "LM", "NP", "QR", "ST", "UV"];
    samples
        .iter()
        .enumerate()
        .map(|(k, (id, family))| {
            let title = {
                let mut c = family.chars();
                let f = c.next().unwrap().to_ascii_uppercase();
                format!("{f}{}", c.as_str())
            };
            let fly = *family == "flystudio";
            let quickheal = if fly { "Nuj".to_string() } else { title.clone() };
            let kaspersky = if fly { "AutoRun".to_string() } else { title.clone() };
            let trend = if fly { "FLYSTUD".to_string() } else { family.to_uppercase() };
            let serial = format!("{:x}", 0x3a7f1 + 7919 * k);
            let detections = vec![
                ("AhnLab-V3", format!("Win32/{title}.worm.Gen")),
                ("CAT-QuickHeal", format!("Win32.Worm.{quickheal}.{}.{}", letters[k], (k * 7 + 5) % 10)),
                ("ESET-NOD32", format!("a variant of Win32/{title}.{}", pairs[k])),
                ("Avast", format!("Win32:{title}-{} [Trj]", letters[(k + 3) % 10])),
                ("BitDefender", format!("Gen:Variant.{title}.{}", 11 + k * 13)),
                ("Kaspersky", format!("Worm.Win32.{kaspersky}.{serial}")),
                ("Jiangmin", format!("Worm/{kaspersky}.{}", 100 + 37 * k)),
                ("Rising", format!("Worm.{title}!1.{serial}")),
                ("Symantec", format!("W32.{title}")),
                ("TrendMicro", format!("WORM_{trend}.{}", pairs[(k + 5) % 10])),
            ];
            AvReport::new(*id, detections).unwrap()
        })
        .collect()
}
