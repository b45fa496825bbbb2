use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gpme"))
}

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name)
}

fn run(args: &[&str], cfg: &Path) -> Output {
    let mut cmd = exe();
    cmd.arg(args[0]).arg("--config").arg(cfg).args(&args[1..]);
    cmd.output().unwrap()
}

#[test]
fn analyze_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = run(
        &["analyze", "--out", out.to_str().unwrap()],
        &config("log_1d.toml"),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!((v["lambda_exist"].as_f64().unwrap() - 16.0).abs() < 1e-6);
    assert!((v["lambda_nonexist"].as_f64().unwrap() - 19.74).abs() < 0.01);
    for key in [
        "sigma",
        "sigma_method",
        "K_status",
        "K_value",
        "K_tail_bound",
        "sup_v1",
        "lambda1",
        "lambda_exist",
        "lambda_nonexist",
        "verdict",
        "flat_zone_measure",
        "grid_n",
        "tol_linear",
        "tol_eig",
        "tol_series",
        "tool",
        "config_hash",
    ] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("ExistsCertified"));
}

#[test]
fn invalid_sequence_exits_3() {
    let o = run(&["analyze"], &config("zero_first_coefficient.toml"));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_data_file_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("log_1d.toml"))
        .unwrap()
        .replace(
            "kind = \"constant\"\nvalue = 1.0\nlambda_scale",
            "kind = \"file\"\npath = \"missing.csv\"\nlambda_scale",
        );
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, text).unwrap();
    let o = run(&["analyze"], &cfg);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("data.path"));
    let o = run(&["analyze"], &dir.path().join("nope.toml"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn file_datum_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = gpme::elliptic::build_grid(&gpme::elliptic::DomainSpec::unit_interval(128)).unwrap();
    let f = gpme::elliptic::GridFunction::constant(&grid, 1.0);
    f.write_csv(
        std::fs::File::create(dir.path().join("f.csv")).unwrap(),
        Some("datum"),
    )
    .unwrap();
    let text = std::fs::read_to_string(config("log_1d.toml"))
        .unwrap()
        .replace(
            "kind = \"constant\"\nvalue = 1.0\nlambda_scale",
            "kind = \"file\"\npath = \"f.csv\"\nlambda_scale",
        );
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.path().join("r.json");
    let o = run(&["analyze", "--out", out.to_str().unwrap()], &cfg);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert!((v["lambda_exist"].as_f64().unwrap() - 16.0).abs() < 1e-6);
}

#[test]
fn solve_matches_harmonic_limit() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("u.csv");
    let o = run(
        &["solve", "--n", "64", "--out", out.to_str().unwrap()],
        &config("harmonic_1d.toml"),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# gpme "));
    assert_eq!(lines.next().unwrap(), "x,value");
    let mut worst: f64 = 0.0;
    for line in lines {
        let (x, u) = line.split_once(',').unwrap();
        let (x, u): (f64, f64) = (x.parse().unwrap(), u.parse().unwrap());
        worst = worst.max((u - (1.0 - (-x * (1.0 - x)).exp())).abs());
    }
    assert!(worst <= 1e-6, "{worst}");
    let hist = std::fs::read_to_string(dir.path().join("u.history.csv")).unwrap();
    assert_eq!(
        hist.lines().nth(1).unwrap(),
        "n,sup_u,h1_seminorm,residual,measure_above_M"
    );
}

#[test]
fn sweep_outputs_and_empty_range() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = run(
        &[
            "sweep",
            "--lambda-min",
            "8",
            "--lambda-max",
            "20",
            "--steps",
            "4",
            "--out",
            out.to_str().unwrap(),
        ],
        &config("log_1d.toml"),
    );
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<&str> = text
        .lines()
        .skip(2)
        .map(|l| l.split_once(',').unwrap().1)
        .collect();
    assert_eq!(
        rows,
        [
            "ExistsCertified",
            "ExistsCertified",
            "Indeterminate",
            "NonexistenceProven"
        ]
    );
    let o = run(
        &[
            "sweep",
            "--lambda-min",
            "20",
            "--lambda-max",
            "8",
            "--steps",
            "4",
            "--out",
            out.to_str().unwrap(),
        ],
        &config("log_1d.toml"),
    );
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn flatzone_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f.csv");
    let o = run(
        &[
            "flatzone",
            "--n-max",
            "1000",
            "--out",
            out.to_str().unwrap(),
        ],
        &config("flat_zone_1d.toml"),
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(v["status"], "Applicable");
    assert!((v["measure"].as_f64().unwrap() - 2f64.sqrt() / 2.0).abs() < 2.0 / 128.0);
    assert_eq!(v["entry_n"], 1000);

    let o = run(
        &["flatzone", "--n-max", "50", "--out", out.to_str().unwrap()],
        &config("harmonic_1d.toml"),
    );
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(v["status"], "NotApplicable");
}

#[test]
fn solver_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config("log_1d.toml"))
        .unwrap()
        .replace("tol_series = 1e-10", "tol_series = 1e-10\ncg_max_iter = 2");
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, text).unwrap();
    assert_eq!(run(&["analyze"], &cfg).status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("s{k}.csv"));
        run(
            &[
                "sweep",
                "--lambda-min",
                "1",
                "--lambda-max",
                "30",
                "--steps",
                "7",
                "--out",
                out.to_str().unwrap(),
            ],
            &config("bump_2d.toml"),
        );
        bodies.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}
