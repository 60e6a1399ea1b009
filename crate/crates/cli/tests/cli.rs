use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const FIVE_SENTENCES: &str = "Down, down, down. Would the fall never come to an end! 'I wonder how many miles I've fallen by this time?' she said aloud. 'I must be getting somewhere near the centre of the earth.'";

fn punctus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_punctus"))
        .args(args)
        .env_clear()
        .output()
        .unwrap()
}

fn punctus_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_punctus"))
        .args(args)
        .env_clear()
        .envs(env.iter().copied())
        .output()
        .unwrap()
}

fn novel() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/alice.txt")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn validator() -> jsonschema::Validator {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schema/report.schema.json");
    jsonschema::validator_for(&read_json(&path)).unwrap()
}

fn assert_valid(report: &Value) {
    let v = validator();
    let errors: Vec<String> = v
        .iter_errors(report)
        .map(|e| format!("{e} at {}", e.instance_path))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn histogram(section: &Value) -> Vec<(u64, u64)> {
    section["histogram"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| (b["k"].as_u64().unwrap(), b["count"].as_u64().unwrap()))
        .collect()
}

#[test]
fn hand_counted_report() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("five.txt");
    std::fs::write(&input, FIVE_SENTENCES).unwrap();
    let out = dir.path().join("out");
    let run = punctus(&["analyze", s(&input), "--out", s(&out)]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );

    let report = read_json(&out.join("five.report.json"));
    assert_valid(&report);
    assert_eq!(report["word_count"], 35);
    // IPI 1 1 1 8 10 3 11, SLV 3 8 10 3 11
    assert_eq!(
        histogram(&report["ipi"]),
        [(1, 3), (3, 1), (8, 1), (10, 1), (11, 1)]
    );
    assert_eq!(
        histogram(&report["slv"]),
        [(3, 2), (8, 1), (10, 1), (11, 1)]
    );
    assert_eq!(report["ipi"]["dropped_tail"], 0);
    assert_eq!(report["ipi"]["collapsed_runs"], 4);
    assert_eq!(report["mfdfa_ipi"]["status"], "skipped");
    assert_eq!(report["mfdfa_slv"]["status"], "skipped");
    assert!(report["mfdfa_ipi"]["reason"]
        .as_str()
        .unwrap()
        .contains("too short"));

    let distribution = std::fs::read_to_string(out.join("five.ipi.distribution.csv")).unwrap();
    assert_eq!(distribution.lines().next(), Some("k,count,frequency"));
    assert!(distribution
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("1,3,4.2857142857142855e-1"));
    assert!(!out.join("five.ipi.fluctuation.csv").exists());
}

#[test]
fn novel_report_is_complete_and_valid() {
    let dir = tempfile::tempdir().unwrap();
    let run = punctus(&["analyze", s(&novel()), "--out", s(dir.path())]);
    assert_eq!(run.status.code(), Some(0));
    let report = read_json(&dir.path().join("alice.report.json"));
    assert_valid(&report);
    for key in ["mfdfa_ipi", "mfdfa_slv"] {
        assert_eq!(report[key]["status"], "ok");
        assert_eq!(report[key]["h"].as_array().unwrap().len(), 33);
    }
    assert_eq!(report["ipi"]["weibull_fit"]["converged"], true);
    assert_eq!(report["rng"], punctus_core_generator());

    let words = report["word_count"].as_u64().unwrap();
    for key in ["ipi", "slv"] {
        let sum: u64 = histogram(&report[key]).iter().map(|(k, c)| k * c).sum();
        assert_eq!(sum + report[key]["dropped_tail"].as_u64().unwrap(), words);
    }

    let fluct = std::fs::read_to_string(dir.path().join("alice.ipi.fluctuation.csv")).unwrap();
    let mut rows = fluct.lines();
    assert_eq!(rows.next(), Some("q,s,F"));
    let scales = report["mfdfa_ipi"]["scales"].as_array().unwrap().len();
    assert_eq!(rows.count(), 33 * scales);
    let spectrum = std::fs::read_to_string(dir.path().join("alice.slv.spectrum.csv")).unwrap();
    assert_eq!(spectrum.lines().next(), Some("alpha,f"));
}

fn punctus_core_generator() -> &'static str {
    "ChaCha8Rng (rand_chacha 0.9, seed_from_u64)"
}

#[test]
fn failures_produce_error_reports_and_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let good = dir.path().join("good.txt");
    std::fs::write(&good, FIVE_SENTENCES).unwrap();
    let missing = dir.path().join("missing.txt");
    let out = dir.path().join("out");
    let run = punctus(&[
        "analyze",
        s(&good),
        s(&empty),
        s(&missing),
        "--out",
        s(&out),
    ]);
    assert_eq!(run.status.code(), Some(1));
    for id in ["empty", "missing"] {
        let report = read_json(&out.join(format!("{id}.report.json")));
        assert_valid(&report);
        assert_eq!(report["status"], "error");
    }
    assert_eq!(read_json(&out.join("good.report.json"))["status"], "ok");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.txt");
    std::fs::write(&input, FIVE_SENTENCES).unwrap();
    let out = dir.path().join("out");
    assert_eq!(punctus(&["analyze"]).status.code(), Some(2));
    assert_eq!(
        punctus(&[
            "analyze",
            s(&input),
            "--detrend-order",
            "0",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        punctus(&[
            "analyze",
            s(&input),
            "--terminal-marks",
            ". ,",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(2)
    );
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[mfdfa]\nq_stepp = 1\n").unwrap();
    assert_eq!(
        punctus(&["analyze", s(&input), "--config", s(&bad), "--out", s(&out)])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        punctus(&["generate", "persistent", "--n", "100"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        punctus(&["generate", "cascade", "--weight", "0.4"])
            .status
            .code(),
        Some(2)
    );
    assert!(!out.exists());
}

#[test]
fn config_precedence_and_echo() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("t.txt");
    std::fs::write(&input, FIVE_SENTENCES).unwrap();
    let config = dir.path().join("c.toml");
    std::fs::write(
        &config,
        "seed = 5\n[mfdfa]\ndetrend_order = 3\nq_step = 0.5\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = punctus_env(
        &["analyze", s(&input), "--out", s(&out), "--q-min", "-2"],
        &[
            ("PUNCTUS_CONFIG", s(&config)),
            ("PUNCTUS_DETREND_ORDER", "1"),
            ("PUNCTUS_Q_MIN", "-3"),
        ],
    );
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    let c = &read_json(&out.join("t.report.json"))["config"];
    assert_eq!(c["seed"], 5);
    assert_eq!(c["mfdfa"]["detrend_order"], 1);
    assert_eq!(c["mfdfa"]["q_step"], 0.5);
    assert_eq!(c["mfdfa"]["q_min"], -2.0);
    assert_eq!(c["mfdfa"]["q_max"], 4.0);
}

/// TOML has no null; an absent key means the same thing.
fn without_nulls(value: Value) -> Value {
    match value {
        Value::Object(map) => Value::Object(
            map.into_iter()
                .filter(|(_, v)| !v.is_null())
                .map(|(k, v)| (k, without_nulls(v)))
                .collect(),
        ),
        other => other,
    }
}

#[test]
fn echoed_config_reproduces_report() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a");
    let run = punctus(&[
        "analyze",
        s(&novel()),
        "--out",
        s(&first),
        "--detrend-order",
        "1",
        "--q-step",
        "0.5",
        "--collapse-runs",
        "false",
        "--terminal-marks",
        ". ! ?",
    ]);
    assert_eq!(run.status.code(), Some(0));
    let bytes = std::fs::read(first.join("alice.report.json")).unwrap();
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    assert_valid(&report);
    // zero intervals are kept without run collapsing, which the fit rejects
    assert!(report["ipi"]["fit_error"]
        .as_str()
        .unwrap()
        .contains("zero-length"));

    let echoed: toml::Value =
        serde_json::from_value(without_nulls(report["config"].clone())).unwrap();
    let config = dir.path().join("echo.toml");
    std::fs::write(&config, toml::to_string(&echoed).unwrap()).unwrap();
    let second = dir.path().join("b");
    let run = punctus(&[
        "analyze",
        s(&novel()),
        "--out",
        s(&second),
        "--config",
        s(&config),
    ]);
    assert_eq!(
        run.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(
        std::fs::read(second.join("alice.report.json")).unwrap(),
        bytes
    );
}

#[test]
fn profile_excerpt_positions() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("five.txt");
    std::fs::write(&a, FIVE_SENTENCES).unwrap();
    let b = dir.path().join("short.txt");
    std::fs::write(&b, "One, two three. Four?").unwrap();

    let run = punctus(&["profile-excerpt", s(&a), s(&b)]);
    assert_eq!(run.status.code(), Some(0));
    let expected = "text_id,word_index,mark_class\n\
        five,1,internal\nfive,2,internal\nfive,3,terminal\nfive,11,terminal\n\
        five,21,terminal\nfive,24,terminal\nfive,35,terminal\n\
        short,1,internal\nshort,3,terminal\nshort,4,terminal\n";
    assert_eq!(String::from_utf8(run.stdout).unwrap(), expected);

    let run = punctus(&[
        "profile-excerpt",
        s(&a),
        s(&b),
        "--range",
        "3:21",
        "--range",
        "2:",
    ]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(run.stdout).unwrap(),
        "text_id,word_index,mark_class\nfive,3,terminal\nfive,11,terminal\nfive,21,terminal\nshort,3,terminal\nshort,4,terminal\n"
    );

    let run = punctus(&["profile-excerpt", s(&b), "--range", "0:5"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("outside"));
    assert_eq!(
        punctus(&[
            "profile-excerpt",
            s(&a),
            s(&b),
            "--range",
            "1:2",
            "--range",
            "1:2",
            "--range",
            "1:2"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn generators() {
    let run = punctus(&[
        "generate", "cascade", "--depth", "4", "--weight", "0.7", "--seed", "1",
    ]);
    let text = String::from_utf8(run.stdout).unwrap();
    let values: Vec<f64> = text.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(values.len(), 16);
    assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-12);

    let a = punctus(&["generate", "white-noise", "--n", "10", "--seed", "7"]);
    let b = punctus_env(
        &["generate", "white-noise", "--n", "10"],
        &[("PUNCTUS_SEED", "7")],
    );
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 10);

    let draws = punctus(&[
        "generate", "weibull", "--p", "0.3", "--beta", "0.9", "--n", "50",
    ]);
    let text = String::from_utf8(draws.stdout).unwrap();
    assert!(text.lines().all(|l| l.parse::<u64>().unwrap() >= 1));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.txt");
    std::fs::write(&path, &text).unwrap();
    let shuffled = punctus(&["generate", "shuffle", s(&path), "--seed", "3"]);
    let mut x: Vec<&str> = text.lines().collect();
    let out = String::from_utf8(shuffled.stdout).unwrap();
    let mut y: Vec<&str> = out.lines().collect();
    x.sort_unstable();
    y.sort_unstable();
    assert_eq!(x, y);
}

#[test]
fn persistent_series_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let run = punctus(&[
        "generate",
        "persistent",
        "--n",
        "65536",
        "--hurst",
        "0.75",
        "--seed",
        "0",
    ]);
    assert_eq!(run.status.code(), Some(0));
    let path = dir.path().join("persistent.txt");
    std::fs::write(&path, &run.stdout).unwrap();

    let out = dir.path().join("out");
    let run = punctus(&["analyze", "--series", s(&path), "--out", s(&out)]);
    assert_eq!(run.status.code(), Some(0));
    let report = read_json(&out.join("persistent.report.json"));
    assert_valid(&report);
    let h = report["mfdfa_series"]["hurst"].as_f64().unwrap();
    assert!((h - 0.75).abs() <= 0.05, "{h}");

    let run = punctus(&["mfdfa", s(&path)]);
    let summary: Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(summary["mfdfa"]["hurst"].as_f64().unwrap(), h);
}

#[test]
fn fit_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let run = punctus(&[
        "generate", "weibull", "--p", "0.2", "--beta", "0.8", "--n", "20000", "--seed", "4",
    ]);
    let path = dir.path().join("draws.txt");
    std::fs::write(&path, &run.stdout).unwrap();
    let run = punctus(&["fit", s(&path)]);
    assert_eq!(run.status.code(), Some(0));
    let out: Value = serde_json::from_slice(&run.stdout).unwrap();
    let fit = &out["intervals"]["weibull_fit"];
    assert!((fit["p"].as_f64().unwrap() - 0.2).abs() < 0.02);
    assert!((fit["beta"].as_f64().unwrap() - 0.8).abs() < 0.05);

    let run = punctus(&[
        "fit",
        "--extract",
        "ipi",
        s(&novel()),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(run.status.code(), Some(0));
    assert!(dir.path().join("alice.fit.json").exists());
    assert!(dir.path().join("alice.hazard.csv").exists());

    let constant = dir.path().join("constant.txt");
    std::fs::write(&constant, "3\n3\n3\n").unwrap();
    assert_eq!(punctus(&["fit", s(&constant)]).status.code(), Some(1));
}
