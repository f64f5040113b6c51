use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cdkink"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cdkink-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    let _ = std::fs::remove_file(&path);
    path
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn probs_schema_small_ring() {
    let o = run(&["probs", "--L", "4", "--method", "lz", "--T", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["k", "p", "method", "L", "T", "n", "model"]);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1][2], "LZ");
    assert_eq!(rows[1][6], "TFIM");
    // 17 significant digits.
    assert_eq!(rows[1][0].split('e').next().unwrap().len(), 18);
}

#[test]
fn ode_and_fast_methods_agree_in_sudden_limit() {
    let common = ["probs", "--L", "1600", "--T", "1e-6", "--cd-order", "4", "--g0", "10000"];
    let parse = |method: &str| -> Vec<f64> {
        let o = run(&[&common[..], &["--method", method]].concat());
        assert!(o.status.success());
        csv_rows(&stdout(&o))[1..].iter().map(|r| r[1].parse().unwrap()).collect()
    };
    let (ode, fast) = (parse("ode"), parse("fast"));
    assert_eq!(ode.len(), 800);
    for (a, b) in ode.iter().zip(&fast) {
        assert!((a - b).abs() < 1e-3, "{a} vs {b}");
    }
}

#[test]
fn invalid_size_exits_two_without_file() {
    let out = scratch("invalid.csv");
    let o = run(&["probs", "--L", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());

    let o = run(&["cumulants", "--qmax", "7"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["probs", "--L", "8", "--method", "lz", "--cd-order", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identical_invocations_are_byte_identical() {
    let (a, b) = (scratch("a.csv"), scratch("b.csv"));
    for p in [&a, &b] {
        let o = run(&[
            "cumulants", "--L", "128", "--T", "0.3", "--cd-order", "3", "--qmax", "4", "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let rows = csv_rows(&std::fs::read_to_string(&a).unwrap());
    assert_eq!(rows[0], ["q", "kappa", "density", "ratio_to_k1"]);
    assert_eq!(rows.len(), 5);
}

#[test]
fn dumped_config_reproduces_output() {
    let cfg = scratch("run.cfg");
    let base = scratch("base.cfg");
    std::fs::write(&base, "# base file\nL = 96\nT = 5\nmethod = fast\n").unwrap();
    let flags = ["--config", base.to_str().unwrap(), "--T", "1e-6", "--cd-order", "5"];

    let o = run(&[&["dist"], &flags[..], &["--dump-config"]].concat());
    assert!(o.status.success());
    let dump = stdout(&o);
    assert!(dump.contains("L = 96") && dump.contains("T = 0.000001"));
    std::fs::write(&cfg, &dump).unwrap();

    let direct = run(&[&["dist"], &flags[..]].concat());
    let replay = run(&["dist", "--config", cfg.to_str().unwrap()]);
    assert!(direct.status.success() && replay.status.success());
    assert_eq!(direct.stdout, replay.stdout);
}

#[test]
fn distribution_is_normalized() {
    let o = run(&["dist", "--L", "1600", "--T", "2", "--cd-order", "8"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows[0], ["N", "p_exact", "p_gauss"]);
    let total: f64 = rows[1..].iter().map(|r| r[1].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-10);
    assert!(rows[1..].iter().all(|r| r[0].parse::<usize>().unwrap() % 2 == 0));
}

#[test]
fn scales_reports_thresholds() {
    let o = run(&["scales", "--L", "1600", "--cd-order", "16"]);
    assert!(o.status.success());
    let rows = csv_rows(&stdout(&o));
    let value = |name: &str| -> f64 {
        rows.iter().find(|r| r[0] == name).unwrap()[1].parse().unwrap()
    };
    assert!((value("n_ad") - 267.4).abs() < 0.05);
    assert_eq!(value("T_fast"), 256.0);
    assert!((value("k_n") - 0.0656).abs() < 1e-4);
}

#[test]
fn json_mirrors_csv_rows() {
    let args = ["kitaev", "--L", "32", "--cd-order", "2", "--method", "universal", "--alpha", "2.5", "--beta", "1.8"];
    let csv = run(&args);
    let json = run(&[&args[..], &["--format", "json"]].concat());
    assert!(csv.status.success() && json.status.success());
    let rows = csv_rows(&stdout(&csv));
    assert_eq!(rows[0], ["k", "j_alpha", "d_beta", "p"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), rows.len() - 1);
    assert_eq!(records.len(), 16);
    assert_eq!(v["meta"]["model"], "LRKM");
    for (r, row) in records.iter().zip(&rows[1..]) {
        let p: f64 = row[3].parse().unwrap();
        assert_eq!(r["p"].as_f64().unwrap(), p);
    }
}

#[test]
fn sweep_emits_one_row_per_value() {
    let o = run(&[
        "sweep", "--L", "256", "--param", "n", "--values", "2,4,8", "--method", "fast", "--T", "1e-6",
        "--distribution",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(
        rows[0],
        [
            "n", "kappa_1", "kappa_2", "kappa_3", "density_1", "density_2", "density_3", "ratio_21",
            "ratio_31", "mean", "variance", "tv_gaussian", "error"
        ]
    );
    assert_eq!(rows.len(), 4);
    let k1: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(k1[0] > k1[1] && k1[1] > k1[2]);

    let bad = run(&["sweep", "--L", "64", "--param", "n", "--values", "2,100"]);
    assert_eq!(bad.status.code(), Some(2));
    let missing = run(&["sweep", "--L", "64"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn validate_exit_status_follows_report() {
    let out = scratch("report.csv");
    let o = run(&["validate", "--criteria", "A10,P1.norm", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let rows = csv_rows(&std::fs::read_to_string(&out).unwrap());
    assert_eq!(rows[0], ["id", "passed", "description", "measured", "tolerance"]);
    assert_eq!(rows.len(), 3);

    let o = run(&["validate", "--level", "quick"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| l.contains(" PASS |") || l.contains(" FAIL |")).collect();
    assert!(lines.len() >= 8);
    let any_fail = lines.iter().any(|l| l.contains(" FAIL |"));
    assert_eq!(o.status.code(), Some(if any_fail { 3 } else { 0 }));
}

#[test]
fn unknown_config_key_is_rejected() {
    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "L = 64\ncolour = blue\n").unwrap();
    let o = run(&["probs", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let missing: &Path = Path::new("/nonexistent/cdkink.cfg");
    let o = run(&["probs", "--config", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}
