use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const FIXTURE: [&str; 10] = [
    "--corpus",
    "data/fixture/corpus.jsonl",
    "--dict",
    "data/lexicon.txt",
    "--hmm",
    "data/hmm.json",
    "--convert-table",
    "data/ts_table.txt",
    "--test-ids",
    "data/fixture/test_ids.txt",
];

fn zhstance(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_zhstance"))
        .args(args)
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn with_fixture<'a>(cmd: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend(FIXTURE);
    v.extend(extra);
    v
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn segment_reads_stdin() {
    let o = zhstance(
        &[
            "segment",
            "--dict",
            "data/lexicon.txt",
            "--hmm",
            "data/hmm.json",
            "--convert-table",
            "data/ts_table.txt",
        ],
        "我們看足球比賽 https://t.co/x @fifa\n烹饪食谱\n",
    );
    assert_eq!(stdout(&o), "我们 看 足球 比赛\n烹饪 食谱\n");
}

#[test]
fn segment_no_clean_keeps_urls() {
    let o = zhstance(
        &["segment", "--dict", "data/lexicon.txt", "--no-clean"],
        "足球 https://t.co/x\n",
    );
    assert_eq!(stdout(&o), "足球 https://t.co/x\n");
}

#[test]
fn convert_reads_stdin() {
    let o = zhstance(&["convert", "--convert-table", "data/ts_table.txt"], "體育場 ok\n");
    assert_eq!(stdout(&o), "体育场 ok\n");
}

#[test]
fn crossval_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let first = zhstance(&with_fixture("crossval", &["--output", path_str(&a)]), "");
    let second = zhstance(&with_fixture("crossval", &["--output", path_str(&b)]), "");
    assert_eq!(stdout(&first), stdout(&second));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(report["kind"], "crossval");
    assert_eq!(report["config"]["seed"], 0);
    assert_eq!(report["folds"].as_array().unwrap().len(), 5);
    assert!(report["aggregate"]["accuracy"]["mean"].as_f64().unwrap() >= 0.9);
}

#[test]
fn test_report_matches_checked_in_copy() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("test.json");
    let o = zhstance(&with_fixture("test", &["--output", path_str(&out)]), "");
    let text = stdout(&o);
    assert!(text.contains("accuracy 1.00"), "{text}");
    let expected =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixture/expected_test_report.json"))
            .unwrap();
    assert_eq!(std::fs::read_to_string(&out).unwrap(), expected);
}

#[test]
fn report_subcommand_renders_stored_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cv.json");
    let live = stdout(&zhstance(&with_fixture("crossval", &["--output", path_str(&out)]), ""));
    let replay = stdout(&zhstance(&["report", path_str(&out)], ""));
    assert_eq!(live, replay);
}

#[test]
fn config_file_is_echoed_and_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"model": {"k": 3, "weighting": "inverse"}, "seed": 9}"#).unwrap();
    let out = dir.path().join("cv.json");
    let args = with_fixture(
        "crossval",
        &["--config", path_str(&cfg), "--seed", "4", "--output", path_str(&out)],
    );
    stdout(&zhstance(&args, ""));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["model"]["k"], 3);
    assert_eq!(report["config"]["model"]["weighting"], "inverse");
    assert_eq!(report["config"]["seed"], 4);

    // the echoed config reproduces the run on its own
    let echo = dir.path().join("echo.json");
    std::fs::write(&echo, report["config"].to_string()).unwrap();
    let again = dir.path().join("again.json");
    stdout(&zhstance(
        &["crossval", "--config", path_str(&echo), "--output", path_str(&again)],
        "",
    ));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn baseline0_predicts_one_label() {
    let o = zhstance(&with_fixture("classify", &["--model", "baseline0"]), "");
    let lines: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert!(lines.iter().all(|l| l["predicted"] == lines[0]["predicted"]));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b0.json");
    stdout(&zhstance(
        &with_fixture("crossval", &["--model", "baseline0", "--output", path_str(&out)]),
        "",
    ));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    for fold in report["folds"].as_array().unwrap() {
        let m = &fold["confusion"];
        let predicted_cols = (0..2)
            .filter(|&c| m[0][c].as_u64().unwrap() + m[1][c].as_u64().unwrap() > 0)
            .count();
        assert_eq!(predicted_cols, 1, "{fold}");
    }
}

#[test]
fn baseline1_runs() {
    let o = zhstance(
        &with_fixture("classify", &["--model", "baseline1", "--top-n", "10", "--k", "3"]),
        "",
    );
    let first: serde_json::Value = serde_json::from_str(stdout(&o).lines().next().unwrap()).unwrap();
    let neighbors = first["neighbors"].as_array().unwrap();
    assert_eq!(neighbors.len(), 3);
    assert!(neighbors.iter().all(|n| n["distance"].is_u64()));
}

#[test]
fn vectorize_emits_one_line_per_account() {
    let o = zhstance(&with_fixture("vectorize", &[]), "");
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 20);
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["weights"]
            .as_object()
            .unwrap()
            .values()
            .all(|w| w.as_f64().unwrap() > 0.0));
    }
}

#[test]
fn exit_codes() {
    let missing = zhstance(&["segment", "--dict", "data/no_such_file.txt"], "");
    assert_eq!(missing.status.code(), Some(2));
    assert!(!missing.stderr.is_empty());

    let bad_flag = zhstance(&["crossval", "--k", "zero"], "");
    assert_eq!(bad_flag.status.code(), Some(1));

    let no_ids = zhstance(
        &[
            "test",
            "--corpus",
            "data/fixture/corpus.jsonl",
            "--dict",
            "data/lexicon.txt",
        ],
        "",
    );
    assert_eq!(no_ids.status.code(), Some(1));

    let too_many_folds = zhstance(&with_fixture("crossval", &["--folds", "50"]), "");
    assert_eq!(too_many_folds.status.code(), Some(1));
}
