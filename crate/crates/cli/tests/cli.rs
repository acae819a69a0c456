use std::fs;
use std::process::{Command, Output};

fn rprun(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rprun"))
        .args(args)
        .output()
        .expect("run rprun")
}

fn stdout(args: &[&str]) -> String {
    let out = rprun(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

/// Data lines of one CSV table (comments and the column header removed).
fn table<'a>(text: &'a str, name: &str) -> Vec<&'a str> {
    let marker = format!("# table: {name}");
    let start = text
        .find(&marker)
        .unwrap_or_else(|| panic!("no table {name}"));
    text[start..]
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .take_while(|l| !l.is_empty())
        .collect()
}

fn long_value(rows: &[&str], k: &str, label: &str, stat: &str) -> String {
    rows.iter()
        .map(|r| r.split(',').collect::<Vec<_>>())
        .find(|c| c[0] == k && c[2] == label && c[3] == stat)
        .unwrap_or_else(|| panic!("no row {k},{label},{stat}"))[4]
        .to_string()
}

#[test]
fn rp_small_limits() {
    let out = stdout(&["--deterministic", "rp", "--limit", "5"]);
    assert_eq!(table(&out, "rp_values"), vec!["1,2"]);
    assert_eq!(table(&out, "rp_classification"), vec!["2,1", "3,0", "5,0"]);
    let out = rprun(&["rp", "--limit", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rp_thousand_matches_known_list() {
    let out = stdout(&["--deterministic", "rp", "--limit", "1000"]);
    let values = table(&out, "rp_values");
    let first: Vec<&str> = values
        .iter()
        .take(8)
        .map(|r| r.split(',').nth(1).unwrap())
        .collect();
    assert_eq!(first, ["2", "11", "17", "29", "41", "47", "59", "67"]);
    assert_eq!(values.last().unwrap(), &"72,983");
    assert!(table(&out, "rp_summary").contains(&"prime_count,168"));
}

#[test]
fn every_output_has_a_header() {
    let out = stdout(&["--deterministic", "--seed", "5", "predict", "--k-max", "3"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        format!("# rprun {}", env!("CARGO_PKG_VERSION"))
    );
    assert!(out.contains("# seed: 5\n"));
    assert!(out.contains("# config: k_max=3\n"));
    assert!(!out.contains("timestamp"));
    assert!(stdout(&["predict"]).contains("# timestamp: "));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# comment\nk-max = 4\nk_min=2\nseed=9\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let out = stdout(&[
        "--deterministic",
        "--config",
        cfg,
        "predict",
        "--k-max",
        "3",
    ]);
    assert!(out.contains("config: k_min=2"));
    assert!(out.contains("config: k_max=3"));
    assert!(out.contains("# seed: 9"));
    fs::write(dir.path().join("bad.cfg"), "nonsense_key=1\n").unwrap();
    let bad = rprun(&[
        "--config",
        dir.path().join("bad.cfg").to_str().unwrap(),
        "predict",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let missing = rprun(&[
        "--config",
        dir.path().join("absent.cfg").to_str().unwrap(),
        "predict",
    ]);
    assert_eq!(missing.status.code(), Some(4));
}

#[test]
fn exit_codes() {
    assert_eq!(rprun(&["runs", "--source", "stars"]).status.code(), Some(2));
    assert_eq!(rprun(&["coins", "--p", "0.4"]).status.code(), Some(2));
    assert_eq!(
        rprun(&["compare", "--k-min", "5", "--k-max", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        rprun(&["--out", "/proc/forbidden/x.csv", "predict"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        rprun(&["sieve", "--limit", "18446744073709551615"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(rprun(&["--help"]).status.code(), Some(0));
}

#[test]
fn out_file_and_directory() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pred.json");
    stdout(&[
        "--format",
        "json",
        "--deterministic",
        "--out",
        file.to_str().unwrap(),
        "predict",
        "--k-max",
        "2",
    ]);
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(&file).unwrap()).unwrap();
    assert_eq!(doc["meta"]["command"], "predict");
    assert_eq!(doc["columns"][0], "k");
    assert!(doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .any(|r| r["statistic"] == "q_tail"));

    let sub = dir.path().join("rp");
    stdout(&["--out", sub.to_str().unwrap(), "rp", "--limit", "100"]);
    for name in ["rp_values", "rp_classification", "rp_summary"] {
        let text = fs::read_to_string(sub.join(format!("{name}.csv"))).unwrap();
        assert!(text.starts_with("# rprun"));
    }
}

#[test]
fn primes_have_longer_blue_runs() {
    let out = stdout(&[
        "--deterministic",
        "runs",
        "--source",
        "primes",
        "--limit",
        "1000000",
        "--k-max",
        "3",
    ]);
    let rows = table(&out, "runs");
    let red: usize = long_value(&rows, "", "red", "longest_run").parse().unwrap();
    let blue: usize = long_value(&rows, "", "blue", "longest_run")
        .parse()
        .unwrap();
    assert!(blue >= red, "{blue} < {red}");
}

#[test]
fn first_red_head_comes_early() {
    let out = stdout(&[
        "--deterministic",
        "runs",
        "--source",
        "coins",
        "--trials",
        "200",
        "--k-max",
        "1",
        "--n",
        "4096",
    ]);
    let rows = table(&out, "runs");
    let median: f64 = long_value(&rows, "1", "red", "median_first_position")
        .parse()
        .unwrap();
    assert!(median <= 10.0, "{median}");
}

#[test]
fn unseen_run_lengths_are_absent() {
    let out = stdout(&[
        "--deterministic",
        "first-run",
        "--source",
        "coins",
        "--n",
        "200",
        "--trials",
        "3",
        "--k",
        "150",
    ]);
    let rows = table(&out, "first_run");
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.ends_with(",,,")), "{rows:?}");
    let out = stdout(&[
        "--deterministic",
        "runs",
        "--source",
        "primes",
        "--limit",
        "1000",
        "--k-min",
        "60",
        "--k-max",
        "60",
    ]);
    assert_eq!(
        long_value(&table(&out, "runs"), "60", "red", "first_index"),
        "inf"
    );
}

#[test]
fn compare_report() {
    let args = [
        "--deterministic",
        "compare",
        "--k-min",
        "9",
        "--k-max",
        "10",
        "--trials",
        "40",
        "--limit",
        "100000",
    ];
    let out = stdout(&args);
    let rows = table(&out, "compare");
    let fair: f64 = long_value(&rows, "10", "", "expected_wait")
        .parse()
        .unwrap();
    assert!(fair / 1024.0 <= 2.0 && fair / 1024.0 >= 0.5);
    assert!(!long_value(&rows, "10", "red", "median_first_index").is_empty());
    assert_eq!(out, stdout(&args));
}

#[test]
fn coins_transcript_and_poisson_modes() {
    let out = stdout(&["--deterministic", "coins", "--n", "12", "--transcript"]);
    assert_eq!(table(&out, "transcript").len(), 12);
    assert_eq!(table(&out, "coins").len(), 1);
    for mode in ["dual", "synthetic", "paired", "coupled"] {
        let out = stdout(&[
            "--deterministic",
            "poisson",
            "--mode",
            mode,
            "--horizon",
            "50",
            "--length",
            "40",
            "--x0",
            "1000",
            "--x-end",
            "3000",
        ]);
        assert!(
            out.contains("# config: mode=") && out.lines().count() > 10,
            "{mode}"
        );
    }
    assert_eq!(
        rprun(&["poisson", "--mode", "coupled", "--x0", "2000", "--x-end", "1000"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn sieve_cache_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("primes.bin");
    let c = cache.to_str().unwrap();
    let first = stdout(&[
        "--deterministic",
        "sieve",
        "--limit",
        "100000",
        "--cache",
        c,
    ]);
    assert!(cache.exists());
    let second = stdout(&[
        "--deterministic",
        "sieve",
        "--limit",
        "100000",
        "--cache",
        c,
    ]);
    assert_eq!(first, second);
    assert!(table(&first, "sieve").contains(&"prime_count,9592"));
    fs::write(&cache, b"junk").unwrap();
    assert_eq!(
        rprun(&["sieve", "--limit", "100000", "--cache", c])
            .status
            .code(),
        Some(4)
    );
}
