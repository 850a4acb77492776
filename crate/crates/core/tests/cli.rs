use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::process::{Command, Output};

fn bellfoundry(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellfoundry"))
        .args(args)
        .env_remove("BELLFOUNDRY_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn simulate_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("m1");
    let out = bellfoundry(&[
        "simulate",
        "--model",
        "model1",
        "--axes",
        "0,pi/2,pi/4,3pi/4",
        "--trials",
        "200000",
        "--seed",
        "5",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("Bell bound violated"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("m1.json")).unwrap())
            .unwrap();
    assert_eq!(json["seed"], 5);
    assert_eq!(json["model"], "model1");
    assert_eq!(json["chsh"][0]["verdict"], "violated");
    assert!(json.get("wall_clock_secs").is_none());
    let csv = std::fs::read_to_string(dir.path().join("m1.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
    let summary = std::fs::read_to_string(dir.path().join("m1_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 6);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let prefix = dir.path().join("lhv");
    std::fs::write(
        &cfg,
        serde_json::json!({
            "model": "quantum",
            "axes": [[0.0, FRAC_PI_2, FRAC_PI_4, 3.0 * FRAC_PI_4]],
            "trials": 100000,
            "seed": 1,
            "sign_choice": "-",
            "output": prefix,
        })
        .to_string(),
    )
    .unwrap();
    let out = bellfoundry(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--model",
        "sign-lhv",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(stdout(&out).contains("bound respected"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("lhv.json")).unwrap())
            .unwrap();
    assert_eq!(json["model"], "sign-lhv");
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (threads, name) in [("1", "a"), ("3", "b")] {
        let prefix = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_bellfoundry"))
            .args([
                "simulate",
                "--model",
                "model2",
                "--trials",
                "150000",
                "--out",
                prefix.to_str().unwrap(),
            ])
            .env("BELLFOUNDRY_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success());
        files.push(std::fs::read(dir.path().join(format!("{name}.json"))).unwrap());
        files.push(std::fs::read(dir.path().join(format!("{name}.csv"))).unwrap());
    }
    assert_eq!(files[0], files[2]);
    assert_eq!(files[1], files[3]);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        bellfoundry(&["simulate", "--model", "bohm"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bellfoundry(&["simulate", "--trials", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        bellfoundry(&["simulate", "--axes", "0,1"]).status.code(),
        Some(2)
    );
    assert_eq!(bellfoundry(&["verify", "nonsense"]).status.code(), Some(2));
    assert_eq!(
        bellfoundry(&["scan", "--model", "quantum", "--grid", "1"])
            .status
            .code(),
        Some(2)
    );
    let out = bellfoundry(&[
        "simulate",
        "--trials",
        "10",
        "--out",
        "/nonexistent-dir/x/run",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_prints_table() {
    let out = bellfoundry(&["verify", "identity", "wigner"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("suite\tcheck\tvalue\ttarget\tmargin\tstatus")
    );
    assert!(lines.all(|l| l.ends_with("\tPASS")));
    assert!(text.contains("identity\t") && text.contains("wigner\t"));
}

#[test]
fn scan_reports_best_axes() {
    let out = bellfoundry(&["scan", "--model", "quantum", "--grid", "16"]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((r["value"].as_f64().unwrap() - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
    assert!(r["std_error"].is_null());
}

#[test]
fn oracle_prints_values() {
    let out = bellfoundry(&["oracle"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text
        .lines()
        .find(|l| l.starts_with("tsirelson_grid_max(64)"))
        .unwrap();
    let v: f64 = line.split('\t').nth(1).unwrap().parse().unwrap();
    assert!((v - std::f64::consts::SQRT_2 / 2.0).abs() < 1e-12);
}
