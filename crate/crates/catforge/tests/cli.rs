use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn catforge(args: &[&str]) -> Output {
    catforge_env(args, &[])
}

fn catforge_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_catforge"));
    cmd.args(args).env_remove("CATFORGE_THREADS");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn last_csv_field(o: &Output) -> f64 {
    let text = stdout(o);
    let row = text.lines().nth(1).expect("data row");
    row.rsplit(',').next().unwrap().parse().unwrap()
}

#[test]
fn point_fidelities() {
    let o = catforge(&[
        "fidelity", "--scheme", "tpss", "--r", "-0.7", "--alpha", "1.26", "--rprime", "-0.425",
    ]);
    assert!(o.status.success());
    assert!(last_csv_field(&o) > 0.999);

    let o = catforge(&[
        "fidelity", "--scheme", "psas", "--r", "-0.7", "--alpha", "2", "--rprime", "-0.14",
    ]);
    assert!((last_csv_field(&o) - 0.955).abs() < 0.004);

    let o = catforge(&[
        "fidelity", "--scheme", "tpss", "--r", "-0.7", "--alpha", "0", "--rprime", "-0.7",
    ]);
    let expected = 1.0 / (1.0 + 2.0 * 0.7f64.tanh().powi(2));
    assert!((last_csv_field(&o) - expected).abs() < 1e-11);
}

#[test]
fn realistic_point_reports_probability() {
    let o = catforge(&[
        "fidelity",
        "--scheme",
        "realistic-psas",
        "--alpha",
        "1.9",
        "--rprime",
        "-0.2",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let p = v["success_probability"].as_f64().unwrap();
    let f = v["fidelity"].as_f64().unwrap();
    assert!(p > 0.0 && p < 1e-2, "{p}");
    assert!(f > 0.85 && f < 0.92, "{f}");
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "alpha = 1\nwidth = 3\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["fidelity", "--config", bad.to_str().unwrap()],
        vec!["fidelity", "--scheme", "tpss", "--alpha", "-1"],
        vec!["fidelity", "--scheme", "realistic-tpss", "--T", "1.5"],
        vec!["fidelity", "--format", "xml"],
        vec!["figure", "--id", "3", "--out", dir.path().to_str().unwrap()],
        vec!["wigner", "--state", "npss", "--N", "16"],
        vec!["validate", "--level", "medium"],
        vec!["no-such-command"],
    ];
    for args in cases {
        let o = catforge(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
    let o = catforge_env(&["validate"], &[("CATFORGE_THREADS", "zero")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(
        &cfg,
        "# point\nscheme = psas\nalpha = 2   # amplitude\nrprime = -0.14\nr = -0.7\n",
    )
    .unwrap();
    let from_file = catforge(&["fidelity", "--config", cfg.to_str().unwrap()]);
    assert!((last_csv_field(&from_file) - 0.9552).abs() < 1e-3);
    let overridden = catforge(&[
        "fidelity",
        "--config",
        cfg.to_str().unwrap(),
        "--scheme",
        "tpss",
    ]);
    assert!(stdout(&overridden).contains("\ntpss,"));
}

#[test]
fn empty_config_uses_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.cfg");
    fs::write(&cfg, "").unwrap();
    let o = catforge(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], Value::Bool(true));
}

#[test]
fn full_validation_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = catforge(&[
        "validate",
        "--level",
        "full",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 4);
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let text = fs::read_to_string(path).unwrap();
    assert!(!text.contains('\r'));
    text.lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|c| c.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect()
}

fn max_col(rows: &[Vec<f64>], c: usize) -> f64 {
    rows.iter().map(|r| r[c]).fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn figure_one_curves_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = catforge(&["figure", "--id", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let solid = read_csv(&dir.path().join("fig1_solid.csv"));
    let dashed = read_csv(&dir.path().join("fig1_dashed.csv"));
    let panel = read_csv(&dir.path().join("fig1_panel_b.csv"));
    assert_eq!(solid.len(), 71);
    assert!(max_col(&solid, 1) > 0.999);
    assert!((max_col(&dashed, 1) - 0.90).abs() < 0.01);
    assert_eq!(panel.len(), 71);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig1_manifest.json")).unwrap())
            .unwrap();
    let files: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["file"].as_str().unwrap())
        .collect();
    assert_eq!(
        files,
        ["fig1_solid.csv", "fig1_dashed.csv", "fig1_panel_b.csv"]
    );
    for f in files {
        assert!(dir.path().join(f).exists());
    }
    assert_eq!(manifest["parameters"]["r"].as_f64(), Some(-0.7));
}

#[test]
fn figures_are_deterministic_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| {
        vec![
            "figure".to_string(),
            "--id".into(),
            "8".into(),
            "--out".into(),
            d.to_str().unwrap().into(),
            "--format".into(),
            "json".into(),
        ]
    };
    let aa = args(a.path());
    let bb = args(b.path());
    assert!(catforge_env(
        &aa.iter().map(String::as_str).collect::<Vec<_>>(),
        &[("CATFORGE_THREADS", "1")]
    )
    .status
    .success());
    assert!(catforge_env(
        &bb.iter().map(String::as_str).collect::<Vec<_>>(),
        &[("CATFORGE_THREADS", "3")]
    )
    .status
    .success());
    for name in [
        "fig8_solid.json",
        "fig8_dashed.json",
        "fig8_panel_b.json",
        "fig8_manifest.json",
    ] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
    let solid: Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("fig8_solid.json")).unwrap())
            .unwrap();
    let best = solid["best"]["F_opt"].as_f64().unwrap();
    assert!((best - 0.89).abs() < 0.01, "{best}");
}

#[test]
fn figure_nine_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let o = catforge(&[
        "figure",
        "--id",
        "9",
        "--out",
        dir.path().to_str().unwrap(),
        "--n-min",
        "3",
        "--n-max",
        "4",
        "--alpha-min",
        "1",
        "--alpha-max",
        "2.2",
        "--alpha-steps",
        "7",
        "--grid-step",
        "0.05",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig9_manifest.json")).unwrap())
            .unwrap();
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 2);
    let mut prev = 0.0;
    for f in files {
        let opt = &f["parameters"]["optimum"];
        assert!(opt["F"].as_f64().unwrap() > 0.999);
        let a = opt["alpha"].as_f64().unwrap();
        assert!(a > prev);
        prev = a;
        assert!(dir.path().join(f["file"].as_str().unwrap()).exists());
    }
}

/// Parses the grid CSV into (header, rows).
fn grid(o: &Output) -> (String, Vec<Vec<f64>>) {
    let text = stdout(o);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    (
        header,
        lines
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect(),
    )
}

#[test]
fn wigner_grids_overlap_like_the_states() {
    let common = ["--x-max", "9", "--p-max", "5", "--step", "0.05"];
    let mut tp = vec!["wigner", "--state", "tpss", "--r", "-0.7"];
    tp.extend(common);
    let mut cat = vec![
        "wigner", "--state", "sscs", "--alpha", "1.26", "--rprime", "-0.425",
    ];
    cat.extend(common);
    let (h1, a) = grid(&catforge(&tp));
    let (_, b) = grid(&catforge(&cat));
    assert!(h1.starts_with("# x_min=-9,x_max=9,nx=361,"));
    let d = 0.05 * 0.05;
    let overlap: f64 = a
        .iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(u, v)| u * v)
        .sum::<f64>()
        * d;
    assert!(2.0 * std::f64::consts::PI * overlap > 0.999);
}

#[test]
fn vacuum_and_parity_grids() {
    let o = catforge(&[
        "wigner", "--state", "sscs", "--alpha", "0", "--rprime", "0", "--x-max", "2", "--p-max",
        "2", "--step", "0.5",
    ]);
    let (_, rows) = grid(&o);
    assert!((rows[4][4] - 1.0 / std::f64::consts::PI).abs() < 1e-11);
    assert!((rows[4][6] - (-1.0f64).exp() / std::f64::consts::PI).abs() < 1e-11);

    let o = catforge(&[
        "wigner", "--state", "npss", "--N", "3", "--R", "0.6", "--x-max", "8", "--p-max", "3",
        "--step", "0.1",
    ]);
    let (_, rows) = grid(&o);
    let (np, nx) = (rows.len(), rows[0].len());
    for j in 0..np {
        for i in 0..nx {
            assert!((rows[j][i] - rows[np - 1 - j][nx - 1 - i]).abs() < 1e-9);
        }
    }
}

#[test]
fn wigner_json_shape_and_boundary_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w.json");
    let o = catforge(&[
        "wigner",
        "--state",
        "realistic",
        "--scheme",
        "psas",
        "--eta",
        "0.6",
        "--x-max",
        "2",
        "--p-max",
        "1",
        "--step",
        "0.25",
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let v: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(v["x_axis"].as_array().unwrap().len(), 17);
    assert_eq!(v["p_axis"].as_array().unwrap().len(), 9);
    assert_eq!(v["values"].as_array().unwrap().len(), 9);
    assert!(v["meta"].as_str().unwrap().starts_with("realistic psas"));
}
