use std::process::Command;

use pfc::scenario::{parse_report, strip_timing, CheckStatus};

fn pfc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pfc"))
}

fn write(dir: &std::path::Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn list_families_names_the_catalog() {
    let out = pfc().arg("list-families").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for info in pfc::lab::builtin_families() {
        assert!(text.contains(info.name));
    }
}

#[test]
fn witness_prints_csv_rows() {
    let out = pfc().args(["witness", "--family", "sin-inv", "--n", "3"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    let first: Vec<f64> = lines[1].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!((first[2] - 0.1061033).abs() < 1e-7);
    assert!((first[3] - 1.0).abs() < 1e-7);
}

#[test]
fn passing_scenario_exits_zero_and_writes_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "s.toml",
        "checks = [\"domination\", \"witness\"]\n[family]\nname = \"scalar-exp\"\n[pairs]\nlist = [[[1.0], [0.5]]]\n",
    );
    let out_dir = dir.path().join("out");
    let status = pfc().args(["run", "--quiet", "--format", "both", "--out"]).arg(&out_dir).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(1), "witness on scalar-exp is a check error");

    let cfg = write(dir.path(), "t.toml", "checks = [\"domination\"]\n[family]\nname = \"scalar-exp\"\n[pairs]\nlist = [[[1.0], [0.5]]]\n");
    let status = pfc().args(["run", "--quiet", "--format", "both", "--out"]).arg(&out_dir).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let report = parse_report(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report.results[0].status, CheckStatus::Passed);
    assert!(out_dir.join("domination.csv").exists());
}

#[test]
fn config_errors_exit_two_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.toml", "checks = [\"modulus\"]\n[family]\nname = \"sin-inv\"\n");
    let out = pfc().arg("run").arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("sampler.seed"));
    let out = pfc().args(["run", "--seed", "3", "--quiet"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn seeded_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "m.toml",
        "checks = [\"modulus\", \"equicontinuity\"]\n[family]\nname = \"mu-sin-pi\"\n[sampler]\nseed = 9\npairs_per_rung = 16\n",
    );
    let run = || {
        let out = pfc().args(["run", "--quiet"]).arg(&cfg).output().unwrap();
        assert!(out.status.success());
        strip_timing(&String::from_utf8(out.stdout).unwrap()).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn bundled_example_scenarios_run() {
    let root = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/scenarios");
    let mut seen = 0;
    for entry in std::fs::read_dir(&root).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = pfc().args(["run", "--quiet"]).arg(&path).output().unwrap();
            assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
            seen += 1;
        }
    }
    assert!(seen >= 2);
}
