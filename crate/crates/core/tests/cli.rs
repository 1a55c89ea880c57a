use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn labelmine(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_labelmine"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn synth_mine_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let synth = labelmine(
        d,
        &["synth", "--reports", "r.ndjson", "--gt", "gt.csv", "--families", "3", "--samples", "30", "--vendors", "8"],
    );
    assert_eq!(code(&synth), 0, "{}", stderr(&synth));
    let mine = labelmine(
        d,
        &["mine", "--reports", "r.ndjson", "--out", "o.txt", "--state", "st", "--threads", "1", "--top-n", "3"],
    );
    assert_eq!(code(&mine), 0, "{}", stderr(&mine));
    let out = fs::read_to_string(d.join("o.txt")).unwrap();
    assert_eq!(out.lines().count(), 30);
    assert!(out.lines().all(|l| l.split('\u{2016}').count() <= 3));
    assert!(d.join("st/model.txt").exists());

    let eval = labelmine(d, &["eval", "--out", "o.txt", "--gt", "gt.csv"]);
    assert_eq!(code(&eval), 0, "{}", stderr(&eval));
    let table = String::from_utf8(eval.stdout).unwrap();
    assert!(table.starts_with("TopN"));
    assert_eq!(table.lines().count(), 12);
}

#[test]
fn ascii_separator_flag() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    labelmine(d, &["synth", "--reports", "r.ndjson", "--gt", "gt.csv", "--samples", "20", "--vendors", "8"]);
    let mine = labelmine(d, &["mine", "--reports", "r.ndjson", "--out", "o.txt", "--ascii-sep"]);
    assert_eq!(code(&mine), 0, "{}", stderr(&mine));
    let out = fs::read_to_string(d.join("o.txt")).unwrap();
    assert!(out.contains("||"));
    assert!(!out.contains('\u{2016}'));
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    labelmine(d, &["synth", "--reports", "r.ndjson", "--gt", "gt.csv", "--samples", "20", "--vendors", "8"]);
    fs::write(d.join("run.toml"), "top_n = 1\nreports = \"r.ndjson\"\nout = \"o.txt\"\n").unwrap();
    assert_eq!(code(&labelmine(d, &["mine", "--config", "run.toml"])), 0);
    let one = fs::read_to_string(d.join("o.txt")).unwrap();
    assert!(one.lines().all(|l| !l.contains('\u{2016}')));
    assert_eq!(code(&labelmine(d, &["mine", "--config", "run.toml", "--top-n", "4"])), 0);
    let four = fs::read_to_string(d.join("o.txt")).unwrap();
    assert!(four.lines().any(|l| l.contains('\u{2016}')));
}

#[test]
fn empty_reports_succeed_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("r.ndjson"), "").unwrap();
    let mine = labelmine(d, &["mine", "--reports", "r.ndjson", "--out", "o.txt"]);
    assert_eq!(code(&mine), 0);
    assert!(stderr(&mine).contains("no reports"));
    assert_eq!(fs::read_to_string(d.join("o.txt")).unwrap(), "");
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let good = r#"{"sample_id":"a","detections":{"V":"Win32/Flystudio.worm.Gen"}}"#;
    fs::write(d.join("r.ndjson"), format!("{good}\n{}\n{{oops\n", good.replace("\"a\"", "\"b\""))).unwrap();
    let mine = labelmine(d, &["mine", "--reports", "r.ndjson", "--out", "o.txt"]);
    assert_eq!(code(&mine), 2);
    assert!(stderr(&mine).contains("line 3"), "{}", stderr(&mine));
    assert!(!d.join("o.txt").exists());

    fs::write(d.join("gt.csv"), "id,family\n").unwrap();
    fs::write(d.join("o.txt"), "").unwrap();
    let eval = labelmine(d, &["eval", "--out", "o.txt", "--gt", "gt.csv"]);
    assert_eq!(code(&eval), 2);
    assert!(stderr(&eval).contains("line 1"));
}

#[test]
fn usage_and_config_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&labelmine(d, &["mine", "--no-such-flag"])), 1);
    assert_eq!(code(&labelmine(d, &["frobnicate"])), 1);
    assert_eq!(code(&labelmine(d, &["mine", "--out", "o.txt"])), 1);
    assert_eq!(code(&labelmine(d, &["mine", "--top-n", "0", "--reports", "r", "--out", "o"])), 1);
    fs::write(d.join("bad.toml"), "sigma_threshold = 2.0\n").unwrap();
    assert_eq!(code(&labelmine(d, &["mine", "--config", "bad.toml"])), 1);
    assert_eq!(code(&labelmine(d, &["synth", "--reports", "r", "--gt", "g", "--noise", "1.5"])), 1);
    assert_eq!(code(&labelmine(d, &["--help"])), 0);
}

#[test]
fn update_with_version_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    labelmine(d, &["synth", "--reports", "r.ndjson", "--gt", "gt.csv", "--samples", "15", "--vendors", "6"]);
    assert_eq!(code(&labelmine(d, &["mine", "--reports", "r.ndjson", "--out", "o.txt", "--state", "st"])), 0);
    fs::write(d.join("st/corpus.version"), "format=99\nversion=1\ncount=15\n").unwrap();
    let up = labelmine(d, &["update", "--reports", "r.ndjson", "--out", "o.txt", "--state", "st"]);
    assert_eq!(code(&up), 2);
    assert!(stderr(&up).contains("version mismatch"), "{}", stderr(&up));
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for k in 0..2 {
        let r = format!("r{k}.ndjson");
        let g = format!("g{k}.csv");
        assert_eq!(code(&labelmine(d, &["synth", "--reports", &r, "--gt", &g, "--seed", "5", "--samples", "25"])), 0);
    }
    assert_eq!(fs::read(d.join("r0.ndjson")).unwrap(), fs::read(d.join("r1.ndjson")).unwrap());
    assert_eq!(fs::read(d.join("g0.csv")).unwrap(), fs::read(d.join("g1.csv")).unwrap());
}
