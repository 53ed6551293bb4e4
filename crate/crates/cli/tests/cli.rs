use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn parima(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parima"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = parima(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn sample_csv() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/sample_consumption.csv")
}

fn read(path: impl AsRef<Path>) -> String {
    std::fs::read_to_string(path.as_ref()).unwrap_or_else(|e| panic!("{}: {e}", path.as_ref().display()))
}

/// Drops the named columns from a CSV so timing fields can be ignored.
fn without_columns(csv: &str, drop: &[&str]) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let keep: Vec<usize> = (0..header.len()).filter(|&i| !drop.contains(&header[i])).collect();
    std::iter::once(header)
        .chain(lines.map(|l| l.split(',').collect()))
        .map(|cells: Vec<&str>| keep.iter().map(|&i| cells[i]).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn simulate_then_gridsearch_recovers_order() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--order", "2,1,2", "--n", "5000", "--seed", "7"]);
    let summary = ok(d, &["gridsearch", "--input", "series.csv", "--p", "0..3", "--d", "0..2", "--q", "0..3", "--workers", "4"]);
    assert!(summary.contains("(2,1,2)"), "{summary}");
    let best: Value = serde_json::from_str(&read(d.join("best.json"))).unwrap();
    assert_eq!(best["best"], "(2,1,2)");
    assert_eq!(best["candidates"], 48);
}

#[test]
fn worker_count_does_not_change_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--order", "1,1,1", "--n", "1500", "--seed", "3"]);
    let mut tables = Vec::new();
    for w in ["1", "8"] {
        let out = format!("w{w}");
        ok(d, &["gridsearch", "--input", "series.csv", "--p", "0..2", "--d", "0..1", "--q", "0..2", "--workers", w, "--out-dir", &out]);
        tables.push((without_columns(&read(d.join(&out).join("candidates.csv")), &["fit_time"]), read(d.join(&out).join("best.json"))));
    }
    assert_eq!(tables[0], tables[1]);
}

#[test]
fn every_command_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--order", "1,0,1", "--n", "400", "--seed", "11", "--intercept", "20"]);
    let sample = sample_csv();
    let sample = sample.to_str().unwrap();
    let runs: Vec<Vec<&str>> = vec![
        vec!["simulate", "--order", "2,1,2", "--n", "300", "--seed", "5"],
        vec!["preprocess", "--input", sample, "--time-column", "month", "--value-column", "consumption_mwh", "--group-column", "sector", "--normalize", "--difference", "1"],
        vec!["fit", "--input", "series.csv", "--order", "1,0,1"],
        vec!["forecast", "--input", "series.csv", "--order", "1,0,1", "--horizon", "6", "--format", "json"],
        vec!["gridsearch", "--input", "series.csv", "--p", "0..1", "--d", "0", "--q", "0..1", "--workers", "2"],
        vec!["validate", "--input", "series.csv", "--order", "1,0,1", "--folds", "3", "--horizon", "10"],
    ];
    for args in runs {
        let snapshot = |tag: &str| -> BTreeMap<String, String> {
            let out = d.join(format!("{}_{tag}", args[0]));
            let mut a = args.clone();
            let out_s = out.to_str().unwrap().to_string();
            a.extend(["--out-dir", &out_s]);
            ok(d, &a);
            let mut files = BTreeMap::new();
            for entry in std::fs::read_dir(&out).unwrap() {
                let p = entry.unwrap().path();
                let name = p.file_name().unwrap().to_str().unwrap().to_string();
                let mut text = read(&p);
                if name == "candidates.csv" {
                    text = without_columns(&text, &["fit_time"]);
                }
                if name == "run_manifest.json" {
                    text = text.replace(&out_s, "<out>");
                }
                files.insert(name, text);
            }
            files
        };
        let (a, b) = (snapshot("a"), snapshot("b"));
        assert!(!a.is_empty());
        assert_eq!(a, b, "{}", args[0]);
    }
}

#[test]
fn manifest_reproduces_run() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["simulate", "--order", "0,1,1", "--n", "200", "--seed", "9", "--out-dir", "first"]);
    let manifest: Value = serde_json::from_str(&read(d.join("first/run_manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 9);
    assert!(manifest.get("timestamp").is_none());
    ok(d, &["simulate", "--config", "first/run_manifest.json", "--out-dir", "second"]);
    assert_eq!(read(d.join("first/series.csv")), read(d.join("second/series.csv")));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("cfg.json"), r#"{"order": "1,0,0", "n": 100, "seed": 1}"#).unwrap();
    ok(d, &["simulate", "--config", "cfg.json", "--out-dir", "a"]);
    ok(d, &["simulate", "--config", "cfg.json", "--seed", "2", "--out-dir", "b"]);
    ok(d, &["simulate", "--order", "1,0,0", "--n", "100", "--seed", "1", "--out-dir", "c"]);
    assert_eq!(read(d.join("a/series.csv")), read(d.join("c/series.csv")));
    assert_ne!(read(d.join("a/series.csv")), read(d.join("b/series.csv")));
}

#[test]
fn sample_data_aggregates_to_eleven_months() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let sample = sample_csv();
    ok(d, &["preprocess", "--input", sample.to_str().unwrap(), "--time-column", "month", "--value-column", "consumption_mwh", "--group-column", "sector"]);
    let text = read(d.join("preprocessed.csv"));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[0].starts_with("2023-01,") && rows[10].starts_with("2023-11,"));
}

#[test]
fn exit_codes_and_json_errors() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("dup.csv"), "t,value\n1,2\n1,3\n").unwrap();
    std::fs::write(d.join("flat.csv"), "t,value\n1,5\n2,5\n3,5\n").unwrap();
    let cases: Vec<(Vec<&str>, i32, &str)> = vec![
        (vec!["fit", "--order", "1,0,0", "--input", "missing.csv"], 2, "usage"),
        (vec!["fit", "--order", "1,0,0", "--input", "dup.csv"], 3, "data"),
        (vec!["fit", "--order", "9,9,9", "--input", "dup.csv"], 2, "usage"),
        (vec!["preprocess", "--input", "flat.csv", "--normalize"], 3, "data"),
        (vec!["simulate", "--n", "10"], 2, "usage"),
        (vec!["simulate", "--order", "1,0,0", "--n", "10", "--sizes", "5"], 2, "usage"),
        (vec!["fit", "--no-such-flag"], 2, "usage"),
    ];
    for (mut args, code, class) in cases {
        args.push("--errors=json");
        let out = parima(d, &args);
        assert_eq!(out.status.code(), Some(code), "{args:?}");
        let err: Value = serde_json::from_slice(&out.stderr).unwrap_or_else(|_| panic!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
        assert_eq!(err["class"], class, "{args:?}");
        assert_eq!(err["exit_code"], code);
    }
    let out = parima(d, &["fit", "--order", "1,0,0", "--input", "dup.csv"]);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: duplicate row"));
}

#[test]
fn benchmark_outputs_have_table_headers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["benchmark", "size-sweep", "--sizes", "200,400", "--workers", "2", "--p", "0..1", "--d", "1", "--q", "0..1", "--allow-oversubscribe"]);
    let csv = read(d.join("size_sweep.csv"));
    assert_eq!(csv.lines().next().unwrap(), parima::bench::CSV_HEADER);
    assert_eq!(csv.lines().count(), 3);
    assert!(read(d.join("size_sweep.svg")).starts_with("<svg"));
    assert!(read(d.join("size_sweep_plot.csv")).starts_with("data_size,speedup,efficiency"));

    ok(d, &["benchmark", "order-sweep", "--orders", "1,1,1;2,1,2", "--size", "600", "--workers", "2", "--allow-oversubscribe", "--format", "json"]);
    let report: Value = serde_json::from_str(&read(d.join("order_sweep.json"))).unwrap();
    assert_eq!(report["kind"], "order-sweep");
    assert_eq!(report["records"].as_array().unwrap().len(), 2);
}
