use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn lla(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lla")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn files(dir: &Path) -> Vec<String> {
    let mut v: Vec<String> =
        std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    v.sort();
    v
}

#[test]
fn annotates_one_file() {
    let out = tempfile::tempdir().unwrap();
    let o = lla(&["annotate", s(&fixture("2col_page.xml")), "-o", s(out.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let xml = std::fs::read_to_string(out.path().join("2col_page.xml")).unwrap();
    assert!(xml.contains(r#"ID="P1_B3" HPOS="450" VPOS="#));
    assert!(xml.contains(r#"TYPE="title""#));
}

#[test]
fn one_bad_file_does_not_stop_the_batch() {
    let out = tempfile::tempdir().unwrap();
    let o = lla(&["annotate", s(&fixture("2col_page.xml")), s(&fixture("malformed.xml")), "-o", s(out.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("malformed.xml"), "{}", stderr(&o));
    assert_eq!(files(out.path()), vec!["2col_page.xml"]);
}

#[test]
fn csv_has_one_row_per_element() {
    let out = tempfile::tempdir().unwrap();
    let o = lla(&["annotate", s(&fixture("3col_page.xml")), "-o", s(out.path()), "-f", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(out.path().join("3col_page.csv")).unwrap();
    let mut rows = csv.lines();
    assert_eq!(rows.next(), Some("document_id,page,element_id,kind,label"));
    assert_eq!(rows.count(), 12 + 87);
}

#[test]
fn feature_extraction_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = lla(&["extract-features", s(&fixture("newspaper_3c.xml")), "-o", s(dir.path())]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let names = files(a.path());
    assert_eq!(names, vec!["newspaper_3c.blocks.csv", "newspaper_3c.document.json", "newspaper_3c.lines.csv"]);
    for n in &names {
        assert_eq!(std::fs::read(a.path().join(n)).unwrap(), std::fs::read(b.path().join(n)).unwrap(), "{n}");
    }
    let lines = std::fs::read_to_string(a.path().join("newspaper_3c.lines.csv")).unwrap();
    assert_eq!(lines.lines().count(), 1 + 339);
}

/// Lines are Title iff f1 > 0.7 and f2; f3 is noise. f1 takes ten evenly
/// spread levels so every bin edge falls between two of them.
fn planted_tables(dir: &Path) -> (PathBuf, PathBuf) {
    let mut features = String::from("document_id,element_id,f1,f2,f3\n");
    let mut truth = String::from("document_id,element_id,kind,label\n");
    for i in 0..300 {
        let f1 = 0.05 + 0.1 * ((i * 7) % 10) as f64;
        let f2 = i % 3 != 0;
        let f3 = (i * 13) % 7;
        let label = if f1 > 0.7 && f2 { "title" } else { "text" };
        let _ = writeln!(features, "d,l{i},{f1},{f2},{f3}");
        let _ = writeln!(truth, "d,l{i},line,{label}");
    }
    let (fp, tp) = (dir.join("lines.csv"), dir.join("truth.csv"));
    std::fs::write(&fp, features).unwrap();
    std::fs::write(&tp, truth).unwrap();
    (fp, tp)
}

#[test]
fn training_finds_the_planted_conjunction() {
    let dir = tempfile::tempdir().unwrap();
    let (features, truth) = planted_tables(dir.path());
    let out = dir.path().join("model");
    let o = lla(&["train", "--features", s(&features), "--truth", s(&truth), "--label", "title", "-o", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("Title (1 rule(s))"), "{text}");
    let rule = text.lines().find(|l| l.contains(" and ")).unwrap_or_default();
    assert!(rule.contains("L.f1") && rule.contains("L.f2") && !rule.contains("f3"), "{text}");
    let rules = std::fs::read_to_string(out.join("line.rules")).unwrap();
    assert!(rules.contains("L.f1") && rules.contains("L.f2"));
    assert!(out.join("line.json").exists());
}

#[test]
fn grid_writes_the_full_table() {
    let dir = tempfile::tempdir().unwrap();
    let (features, truth) = planted_tables(dir.path());
    let out = dir.path().join("model");
    let o = lla(&[
        "train", "--features", s(&features), "--truth", s(&truth), "--label", "title", "--grid", "--folds", "3", "-o",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let table = std::fs::read_to_string(out.join("line.grid.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 72);
    let best: Vec<&&str> = rows.iter().filter(|r| r.ends_with(",true")).collect();
    assert_eq!(best.len(), 1);
    let f1 = |r: &str| r.split(',').nth(5).unwrap().parse::<f64>().unwrap();
    assert!(rows.iter().all(|r| f1(r) <= f1(best[0])));
}

#[test]
fn same_seed_same_model_files() {
    let dir = tempfile::tempdir().unwrap();
    let (features, truth) = planted_tables(dir.path());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = lla(&["train", "--features", s(&features), "--truth", s(&truth), "--seed", "9", "-o", s(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    for f in ["line.rules", "line.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

fn newspaper_predictions(dir: &Path) -> PathBuf {
    let o = lla(&["annotate", s(&fixture("newspaper_3c.xml")), "-o", s(dir), "-f", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    dir.join("newspaper_3c.csv")
}

#[test]
fn evaluates_one_file() {
    let dir = tempfile::tempdir().unwrap();
    let preds = newspaper_predictions(dir.path());
    let json = dir.path().join("report.json");
    let o = lla(&[
        "evaluate", s(&preds), "--truth", s(&fixture("newspaper_3c.truth.csv")), "--layouts", s(&fixture("layouts.csv")),
        "--json", s(&json),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("3c+") && text.contains("Mean"), "{text}");
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(report["reports"].as_array().unwrap().len(), 1);
}

#[test]
fn compares_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let preds = newspaper_predictions(dir.path());
    let csv = std::fs::read_to_string(&preds).unwrap();
    let worse = csv.replace(",title\n", ",text\n");
    let worst = worse.replace(",header\n", ",text\n");
    std::fs::write(dir.path().join("worse.csv"), worse).unwrap();
    std::fs::write(dir.path().join("worst.csv"), worst).unwrap();
    let o = lla(&[
        "evaluate",
        s(&preds),
        s(&dir.path().join("worse.csv")),
        s(&dir.path().join("worst.csv")),
        "--truth",
        s(&fixture("newspaper_3c.truth.csv")),
        "--layouts",
        s(&fixture("layouts.csv")),
        "--name",
        "rules",
        "--name",
        "worse",
        "--name",
        "worst",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let cmp = &text[text.find("== Comparison").expect("comparison section")..];
    assert!(cmp.contains('*'), "{cmp}");
    assert!(cmp.contains("rules") && cmp.contains("worst"), "{cmp}");
}

#[test]
fn evaluation_without_layouts_warns() {
    let dir = tempfile::tempdir().unwrap();
    let preds = newspaper_predictions(dir.path());
    let o = lla(&["evaluate", s(&preds), "--truth", s(&fixture("newspaper_3c.truth.csv"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("no layout manifest"), "{}", stderr(&o));
    assert!(stdout(&o).contains("All"));
}

#[test]
fn bad_config_is_a_user_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "[thresholds]\nno_such_threshold = 1\n").unwrap();
    let o = lla(&["--config", s(&cfg), "annotate", s(&fixture("2col_page.xml")), "-o", s(dir.path())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("no_such_threshold"), "{}", stderr(&o));
}

#[test]
fn config_title_changes_sim_title() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "doc_title = \"GRANDE NOUVELLE\"\n").unwrap();
    let o = lla(&["--config", s(&cfg), "extract-features", s(&fixture("2col_page.xml")), "-o", s(dir.path())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("2col_page.lines.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|c| *c == "simTitle").unwrap();
    let row = csv.lines().find(|l| l.contains(",P1_B3_L1,")).unwrap();
    // "grande" against "grande nouvelle": 9 edits over 15 characters.
    assert_eq!(row.split(',').nth(col).unwrap().parse::<f64>().unwrap(), 40.0);
}
