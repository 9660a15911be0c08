use std::process::{Command, Output};

use mlsc::experiment::{preset, CSV_COLUMNS};

fn mlsc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlsc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn plan_prints_three_rows_per_target() {
    let out = mlsc(&[
        "plan", "--preset", "paper-1d-n20", "--eps", "6.3e-4", "--eps", "7.9e-5", "--eps", "1.4e-5", "--eps", "1e-3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 12);
    // three grid entries at the first target
    assert_eq!(lines[0].split_whitespace().count(), 3 + 3);
    assert!(lines[1].ends_with("841 841 41"), "{}", lines[1]);
}

#[test]
fn plan_for_a_loose_target_has_one_level() {
    let out = mlsc(&["plan", "--preset", "paper-1d-n20", "--eps", "10"]);
    assert!(out.status.success());
    for line in stdout(&out).lines() {
        assert!(line.contains("K=0"));
        assert_eq!(line.split_whitespace().count(), 4);
    }
}

#[test]
fn invalid_eta_is_reported_by_key() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = preset("paper-1d-n20").unwrap();
    cfg.problem.eta = 1;
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let out = mlsc(&["run", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("eta"), "{}", stderr(&out));
}

#[test]
fn unknown_keys_and_presets_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut text = preset("paper-1d-n20").unwrap().to_toml().unwrap();
    text.push_str("\nbogus_field = 3\n");
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, text).unwrap();
    let out = mlsc(&["plan", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("bogus_field"), "{}", stderr(&out));

    let out = mlsc(&["plan", "--preset", "no-such-preset"]);
    assert!(!out.status.success());
    let out = mlsc(&["plan", "--preset", "paper-1d-n20", "--config", path.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn slsc_at_grid_level_one_in_two_dimensions_uses_21_points() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("slsc.csv");
    let out = mlsc(&[
        "run",
        "--preset",
        "paper-2d-n10",
        "--method",
        "slsc",
        "--grid-level",
        "1",
        "--no-reference",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let reports: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("slsc.csv.reports.json")).unwrap()).unwrap();
    assert_eq!(reports[0]["per_level"][0]["points"], 21);
    assert_eq!(reports[0]["total_solve_count"], 21);

    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("slsc.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["schema_version"], 1);
}

/// CSV rows with the wall-clock column removed.
fn without_wall_time(text: &str) -> Vec<String> {
    let wall = CSV_COLUMNS.iter().position(|&c| c == "wall_s").unwrap();
    text.lines()
        .map(|l| {
            l.split(',')
                .enumerate()
                .filter(|(i, _)| *i != wall)
                .map(|(_, c)| c)
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect()
}

#[test]
fn runs_are_bitwise_reproducible() {
    for method in ["mlsc", "mlmc"] {
        let args = [
            "run", "--preset", "paper-1d-n20", "--method", method, "--eps", "5e-3", "--h-star", "0.03125", "--l-star",
            "1", "--seed", "9",
        ];
        let a = mlsc(&args);
        let b = mlsc(&args);
        assert!(a.status.success(), "{}", stderr(&a));
        assert_eq!(without_wall_time(&stdout(&a)), without_wall_time(&stdout(&b)));
    }
}

#[test]
fn reference_values_are_cached() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "reference",
        "--preset",
        "paper-1d-n20",
        "--h-star",
        "0.0625",
        "--l-star",
        "1",
        "--cache-dir",
        cache.to_str().unwrap(),
    ];
    let first = mlsc(&args);
    assert!(first.status.success(), "{}", stderr(&first));
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let second = mlsc(&args);
    assert_eq!(stdout(&first), stdout(&second));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    assert!(doc["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn estimate_constants_prints_a_report() {
    let out = mlsc(&["estimate-constants", "--preset", "paper-1d-n20"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let alpha = doc["constants"]["alpha"].as_f64().unwrap();
    assert!(alpha > 1.5 && alpha < 2.5, "alpha = {alpha}");
}
