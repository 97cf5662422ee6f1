use serde_json::Value;
use ssys_web::{bautin_impl, classify_impl, orbit_impl, portrait_impl, return_map_impl};

const CENTER: [f64; 8] = [0.0, 0.0, -1.0, 1.0, 1.0, -1.0, 0.0, 0.0];

#[test]
fn classify_returns_report() {
    let r: Value = serde_json::from_str(&classify_impl(&CENTER).unwrap()).unwrap();
    assert_eq!(r["center"], true);
    assert_eq!(r["global_center"], true);
}

#[test]
fn wrong_length_is_an_error() {
    assert!(classify_impl(&[1.0, 2.0]).is_err());
    assert!(classify_impl(&[f64::NAN; 8]).is_err());
}

#[test]
fn portrait_is_svg() {
    let svg = portrait_impl(&CENTER, 2.0, 3).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("u-nullcline"));
    assert!(portrait_impl(&CENTER, -1.0, 3).is_err());
}

#[test]
fn orbit_points() {
    let r: Value = serde_json::from_str(&orbit_impl(&CENTER, 1.0, 0.0, 5.0).unwrap()).unwrap();
    assert!(r["points"].as_array().unwrap().len() > 2);
    assert_eq!(r["termination"], "TimeLimit");
}

#[test]
fn return_map_on_center_is_flat() {
    let r: Value =
        serde_json::from_str(&return_map_impl(&CENTER, 0.0, 0.1, 1.0, 4).unwrap()).unwrap();
    for row in r.as_array().unwrap() {
        assert!(row["displacement"].as_f64().unwrap().abs() < 1e-7, "{row}");
    }
}

#[test]
fn bautin_finds_two_cycles() {
    let r: Value = serde_json::from_str(&bautin_impl().unwrap()).unwrap();
    assert_eq!(r["stage2"]["cycles"]["cycles"].as_array().unwrap().len(), 2);
}
