use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const CENTER: &str = "a1 = 0\na2 = 0\na3 = -1\na4 = 1\nb1 = 1\nb2 = -1\nb3 = 0\nb4 = 0\n";
const BASE_POINT: &str = "a1 = 0\na2 = -1\na3 = -1\na4 = 4\nb1 = 0\nb2 = -2\nb3 = -1\nb4 = 0\n";

fn ssys(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssys"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run(cmd: &str, config: &str, dir: &Path, extra: &[&str]) -> Output {
    let cfg = dir.join("config.toml");
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let mut args = vec![
        cmd,
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    ssys(&args)
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("out/report.json")).unwrap()).unwrap()
}

#[test]
fn classify_center_scheme() {
    let d = tempfile::tempdir().unwrap();
    let o = run("classify", CENTER, d.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(d.path());
    assert_eq!(r["center"], true);
    assert!(r["center_cases"]
        .as_array()
        .unwrap()
        .contains(&Value::from("S")));
    assert_eq!(r["global_center"], true);
    assert_eq!(r["orientation"], "clockwise");
}

#[test]
fn report_lists_every_field() {
    let d = tempfile::tempdir().unwrap();
    assert!(run("classify", CENTER, d.path(), &[]).status.success());
    let r = report(d.path());
    for key in [
        "equilibrium",
        "trace",
        "det",
        "sign_matrix",
        "local_verdict",
        "global_verdict",
        "boundedness",
        "center",
        "center_cases",
        "L1",
        "L2",
        "ell1",
        "global_center",
        "orientation",
    ] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn classify_branch_a_ssystem() {
    // G - H = -I
    let text = "alpha1 = 2\nalpha2 = 1\nbeta1 = 1\nbeta2 = 3\n\
                g11 = 0\ng12 = 0.5\ng21 = 0.5\ng22 = 0\n\
                h11 = 1\nh12 = 0.5\nh21 = 0.5\nh22 = 1\n";
    let d = tempfile::tempdir().unwrap();
    let o = run("classify", text, d.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(d.path());
    let g = &r["global_verdict"];
    assert_eq!(g["verdict"], "globally_stable_all_gamma", "{g}");
    assert_eq!(g["detail"], "a", "{g}");
}

#[test]
fn classify_base_point() {
    let d = tempfile::tempdir().unwrap();
    assert!(run("classify", BASE_POINT, d.path(), &[]).status.success());
    let r = report(d.path());
    assert_eq!(r["trace"], 0.0);
    assert_eq!(r["det"], 9.0);
    assert!(r["L1"].as_f64().unwrap().abs() < 1e-12);
    let l2 = r["L2"].as_f64().unwrap();
    let exact = -10.0 * std::f64::consts::PI / 288.0;
    assert!((l2 - exact).abs() < 1e-12 * exact.abs(), "{l2}");
    assert_eq!(r["center"], false);
}

#[test]
fn degenerate_ssystem_still_reports() {
    // G - H singular
    let text = "alpha1 = 1\nalpha2 = 1\nbeta1 = 1\nbeta2 = 1\n\
                g11 = 1\ng12 = 1\ng21 = 0\ng22 = 0\n\
                h11 = 0\nh12 = 0\nh21 = 1\nh22 = 1\n";
    let d = tempfile::tempdir().unwrap();
    let o = run("classify", text, d.path(), &[]);
    assert!(o.status.success());
    let r = report(d.path());
    assert_eq!(r["trace"], Value::Null);
    assert!(!r["notes"].as_array().unwrap().is_empty());
}

#[test]
fn config_errors_exit_2_with_line() {
    let d = tempfile::tempdir().unwrap();
    let o = run("classify", "a1 = 0\na2 = = 1\n", d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");

    let o = run("classify", &format!("{CENTER}zeta = 1\n"), d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 9"));

    let o = run("classify", "a1 = 1\n", d.path(), &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = ssys(&["classify", "--config", "/nonexistent/ssys.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let o = run("poincare", CENTER, d.path(), &["--rel-tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn portrait_is_deterministic() {
    let text = format!("{CENTER}grid = 4\ndetect_closed = true\n");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run("portrait", &text, a.path(), &[]).status.success());
    assert!(run("portrait", &text, b.path(), &[]).status.success());
    for f in [
        "trajectories.csv",
        "nullclines.csv",
        "portrait.json",
        "portrait.svg",
    ] {
        let x = fs::read(a.path().join("out").join(f)).unwrap();
        let y = fs::read(b.path().join("out").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
    let svg = fs::read_to_string(a.path().join("out/portrait.svg")).unwrap();
    assert!(svg.contains(r#"class="u-nullcline""#));
    assert!(svg.contains("#d62728"));
    let p: Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("out/portrait.json")).unwrap())
            .unwrap();
    // every seed off the origin lies on a closed orbit
    let seeds = p["seeds"].as_array().unwrap();
    assert_eq!(seeds.len(), 16);
    assert!(seeds.iter().all(|s| s["closed"] == true), "{p}");
}

#[test]
fn degenerate_det_portrait_renders() {
    // a1 - a2 = 1, b1 - b2 = 1, a3 - a4 = 1, b3 - b4 = 1: det J = 0
    let text = "a1 = 1\na2 = 0\na3 = 0\na4 = -1\nb1 = 1\nb2 = 0\nb3 = 0\nb4 = -1\ngrid = 3\n";
    let d = tempfile::tempdir().unwrap();
    let o = run("portrait", text, d.path(), &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let p: Value =
        serde_json::from_str(&fs::read_to_string(d.path().join("out/portrait.json")).unwrap())
            .unwrap();
    assert_eq!(p["equilibrium_curve"], true);
}

#[test]
fn poincare_sweep_on_center() {
    let d = tempfile::tempdir().unwrap();
    let text = format!("{CENTER}c_min = 0.2\nc_max = 1.0\nc_count = 5\n");
    let o = run("poincare", &text, d.path(), &["--section", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(d.path().join("out/poincare.csv")).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let cols: Vec<&str> = r.split(',').collect();
        let disp: f64 = cols[2].parse().unwrap();
        assert!(disp.abs() < 1e-7, "{r}");
    }
    assert!(csv.contains("# section_angle=0.5"));
}

#[test]
fn bautin_demo_finds_two_cycles() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("out");
    let o = ssys(&["bautin-demo", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: Value =
        serde_json::from_str(&fs::read_to_string(out.join("bautin.json")).unwrap()).unwrap();
    let cycles = r["stage2"]["cycles"]["cycles"].as_array().unwrap();
    assert_eq!(cycles.len(), 2);
    assert_eq!(cycles[0]["stability"], "unstable");
    assert_eq!(cycles[1]["stability"], "stable");
    assert!(r["eps1"].as_f64().unwrap() > 0.0);
    assert!(r["eps2"].as_f64().unwrap() > 0.0);
}
