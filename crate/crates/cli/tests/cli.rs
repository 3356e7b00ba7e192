use std::path::Path;
use std::process::{Command, Output};

fn sense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sense"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Header and rows of a CSV produced by the binary.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_string).collect()).collect();
    (header, rows)
}

fn col(rows: &[Vec<String>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r[j].parse().unwrap()).collect()
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap()
}

#[test]
fn spectrum_columns_and_dip() {
    let out = stdout(&sense(&["spectrum", "--preset", "fig3", "--grid", "0.8,1.3,20001"]));
    let (header, rows) = csv(&out);
    assert_eq!(
        header,
        ["omega_over_omega_m", "S_total", "S_th1", "S_th2", "S_ba", "S_shot", "flag"]
    );
    assert!(rows.iter().all(|r| r[6] == "ok"));
    let w = col(&rows, 0);
    assert!(w.windows(2).all(|p| p[0] < p[1]));
    let s = col(&rows, 1);
    let i = argmin(&s);
    assert!((w[i] - 1.072).abs() <= 0.005, "{}", w[i]);
    assert!(!out.contains('\r'));
}

#[test]
fn phase_optimum_at_zero() {
    let out = stdout(&sense(&["phase", "--preset", "fig2"]));
    let (header, rows) = csv(&out);
    assert_eq!(header[0], "Phi");
    assert_eq!(rows.len(), 181);
    let s = col(&rows, 1);
    assert_eq!(col(&rows, 0)[argmin(&s)], 0.0);
}

#[test]
fn photon_columns_monotone() {
    let out = stdout(&sense(&["photons", "--preset", "fig6", "--grid", "0,2000,41"]));
    let (header, rows) = csv(&out);
    assert_eq!(header.len(), 5);
    for j in 1..=3 {
        let c = col(&rows, j);
        assert!(c.windows(2).all(|p| p[0] < p[1]), "column {j}");
    }
    for r in rows.iter().skip(1) {
        let v: Vec<f64> = r[1..4].iter().map(|x| x.parse().unwrap()).collect();
        assert!(v[0] < v[1] && v[1] < v[2]);
    }
}

#[test]
fn byte_identical_reruns() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("run{i}.{format}"))).collect();
        for p in &paths {
            let o = sense(&[
                "gain", "--preset", "fig5", "--format", format, "--out", p.to_str().unwrap(),
            ]);
            assert!(o.status.success());
        }
        assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
    }
}

#[test]
fn json_metadata() {
    let out = stdout(&sense(&["steady", "--preset", "fig9", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let m = &v["metadata"];
    assert_eq!(m["preset"], "fig9");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    let lambda = m["config"]["lambda"].as_f64().unwrap();
    assert!((lambda / (2.0 * std::f64::consts::PI * 1e6) - 0.15).abs() < 1e-12);
    assert_eq!(m["rows_total"], 1);
    assert_eq!(v["columns"][9]["name"], "N_ave");
}

fn minimize(args: &[&str]) -> (f64, f64) {
    let out = stdout(&sense(&[&["minimize"], args].concat()));
    let (_, rows) = csv(&out);
    assert_eq!(rows[0][5], "ok");
    let width: f64 = rows[0][4].parse().unwrap();
    assert!(width < 1e-6);
    (rows[0][0].parse().unwrap(), rows[0][2].parse().unwrap())
}

#[test]
fn minimize_finds_modes() {
    let (w, _) = minimize(&["--preset", "fig3", "--grid", "1.0,1.15,2001"]);
    assert!((w - 1.15f64.sqrt()).abs() < 1e-4, "{w}");
    let (w, _) = minimize(&["--preset", "fig3", "--set", "lambda=0", "--grid", "0.9,1.1,2001"]);
    assert!((w - 1.0).abs() < 1e-3, "{w}");
}

#[test]
fn minimize_stable_under_denser_grid() {
    let (a, _) = minimize(&["--preset", "fig3", "--grid", "1.0,1.15,2001"]);
    let (b, _) = minimize(&["--preset", "fig3", "--grid", "1.0,1.15,4001"]);
    assert!((a - b).abs() < 1e-9, "{a} {b}");
}

#[test]
fn joint_minimum_beats_single_ingredients() {
    let bracket = ["--grid", "0.8,1.3,20001"];
    let (_, joint) = minimize(&[&["--preset", "fig9"][..], &bracket].concat());
    let (_, opa) = minimize(&[&["--preset", "fig9", "--set", "lambda=0"][..], &bracket].concat());
    let (_, osc) = minimize(&[&["--preset", "fig9", "--set", "G=0"][..], &bracket].concat());
    assert!(joint < opa && joint < osc, "{joint} {opa} {osc}");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.toml");
    std::fs::write(&path, "lambda = 0.0\nT = 0.0\n").unwrap();
    let out = stdout(&sense(&[
        "steady", "--preset", "fig3", "--config", path.to_str().unwrap(), "--set", "E_L=6.283e8", "--format", "json",
    ]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["metadata"]["config"]["lambda"], 0.0);
    assert_eq!(v["metadata"]["config"]["E_L"], 6.283e8);
}

fn code(args: &[&str]) -> i32 {
    sense(args).status.code().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["steady", "--preset", "fig4"]), 1);
    assert_eq!(code(&["steady", "--set", "kapa=1"]), 1);
    assert_eq!(code(&["spectrum", "--grid", "1,0,5"]), 1);
    assert_eq!(code(&["steady", "--set", "lambda=1e9"]), 1);
    assert_eq!(
        code(&["spectrum", "--preset", "fig3", "--set", "G=1e9", "--grid", "1,1.1,3", "--no-refine"]),
        2
    );
    assert_eq!(code(&["steady", "--config", "/nonexistent/c.toml"]), 3);
    assert_eq!(code(&["steady", "--out", "/nonexistent/dir/x.csv"]), 3);
    assert_eq!(code(&["steady", "--preset", "fig3"]), 0);
}

#[test]
fn flagged_rows_are_accounted() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let o = sense(&[
        "squeeze", "--preset", "fig7", "--grid", "0,0.3,31", "--format", "json", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(Path::new(&out)).unwrap()).unwrap();
    let m = &v["metadata"];
    let (t, ok, bad) = (
        m["rows_total"].as_u64().unwrap(),
        m["rows_ok"].as_u64().unwrap(),
        m["rows_flagged"].as_u64().unwrap(),
    );
    assert_eq!(t, ok + bad);
    assert!(bad > 0 && ok > 0);
    let flags = v["flag"].as_array().unwrap();
    assert!(flags.iter().any(|f| f == "unstable" || f == "singular_steady_state"));
}

#[test]
fn gsweep_reports_reversal() {
    let out = stdout(&sense(&["gsweep", "--preset", "fig8", "--format", "json"]));
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let g = v["metadata"]["summary"]["first_g_with_enhancement"].as_f64().unwrap();
    assert!(g > 1e-3 && g < 1.0, "{g}");
}

#[test]
fn every_subcommand_runs() {
    for sub in [
        "spectrum", "phase", "gain", "coupling", "gsweep", "photons", "squeeze", "stability", "crosscheck",
        "minimize", "steady",
    ] {
        let grid = match sub {
            "gsweep" => "1e-4,1,5,log",
            "squeeze" | "stability" => "0,0.2,5",
            "photons" => "0,1000,5",
            _ => "0.9,1.1,11",
        };
        let o = sense(&[sub, "--preset", "fig10", "--grid", grid]);
        assert!(o.status.success(), "{sub}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
