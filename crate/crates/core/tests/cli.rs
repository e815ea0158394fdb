use std::path::PathBuf;

use fatflat::cli::{parse_config, run};
use serde_json::Value;

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("fatflat-cli-{}-{name}", std::process::id()))
}

fn run_to_json(args: &[&str], name: &str) -> (i32, Value) {
    let out = temp(name);
    let mut argv = vec!["fatflat"];
    argv.extend_from_slice(args);
    argv.extend_from_slice(&["--out", out.to_str().unwrap()]);
    let code = run(argv);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let _ = std::fs::remove_file(&out);
    (code, serde_json::from_str(&text).unwrap_or(Value::Null))
}

#[test]
fn passing_profile_exits_zero() {
    let (code, report) = run_to_json(
        &[
            "verify-profile",
            "--k",
            "19",
            "--grid-max",
            "60",
            "--grid-step",
            "1e-2",
        ],
        "pass",
    );
    assert_eq!(code, 0);
    assert_eq!(report["command"], "verify-profile");
    assert_eq!(report["checks"].as_array().unwrap().len(), 7);
    assert!(report.get("wall_time").is_none());
}

#[test]
fn failing_check_exits_one() {
    let (code, report) = run_to_json(
        &[
            "verify-profile",
            "--k",
            "1",
            "--grid-max",
            "6",
            "--grid-step",
            "1e-3",
        ],
        "fail",
    );
    assert_eq!(code, 1);
    let failed: Vec<_> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["passed"] == false)
        .collect();
    assert!(failed.iter().any(|c| c["name"] == "rho'' + rho >= 0"));
    assert!(failed
        .iter()
        .all(|c| c["worst_value"].as_f64().unwrap() < 0.0));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(["fatflat", "no-such-command"]), 2);
    assert_eq!(run(["fatflat", "ff-lemma", "--q", "4"]), 2);
    assert_eq!(run(["fatflat", "verify-profile", "--grid-step", "-1"]), 2);
    assert_eq!(
        run([
            "fatflat",
            "verify-profile",
            "--config",
            "/nonexistent/fatflat.conf"
        ]),
        2
    );
}

#[test]
fn flags_override_config_file() {
    let config = temp("conf");
    std::fs::write(
        &config,
        "# profile grid\ngrid_max = 45\ngrid-step=1e-2\nk = 7\n",
    )
    .unwrap();
    let (code, report) = run_to_json(
        &[
            "verify-profile",
            "--config",
            config.to_str().unwrap(),
            "--k",
            "19",
        ],
        "conf-out",
    );
    std::fs::remove_file(&config).unwrap();
    assert_eq!(code, 0);
    assert_eq!(report["parameters"]["k"], "19");
    assert_eq!(report["parameters"]["grid-max"], "45");
    assert_eq!(report["parameters"]["grid-step"], "0.01");
    assert!(parse_config("no equals sign").is_err());
}

#[test]
fn timing_is_opt_in() {
    let (_, report) = run_to_json(&["--timing", "ff-lemma", "--q", "5"], "timing");
    assert!(report["wall_time"].as_f64().unwrap() >= 0.0);
}
