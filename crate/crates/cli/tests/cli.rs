use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ramify_cli::format::canonical_json;
use ramify_cli::schema::InstanceFile;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn instance(name: &str) -> PathBuf {
    root().join("configs/instances").join(name)
}

fn ramify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ramify")).args(args).output().expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = ramify(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn two_atoms_give_a_straight_segment() {
    let p = instance("two_atoms.json");
    let v = ok_json(&["solve", p.to_str().unwrap()]);
    assert!((v["cost"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["path"]["edges"].as_array().unwrap().len(), 1);
    let svg = ramify(&["solve", p.to_str().unwrap(), "--out", "svg"]);
    let text = String::from_utf8(svg.stdout).unwrap();
    assert!(text.starts_with("<svg"));
    assert!(text.contains(r#"viewBox="0 0 1000 1000""#));
    assert_eq!(text.matches("<line").count(), 1);
    assert_eq!(text.matches("<circle").count(), 2);
}

#[test]
fn symmetric_instance_draws_a_y() {
    let p = instance("symmetric_y.json");
    let v = ok_json(&["solve", p.to_str().unwrap()]);
    assert!((v["cost"].as_f64().unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-6);
    assert_eq!(v["path"]["vertices"].as_array().unwrap().len(), 4);
    let text = String::from_utf8(ramify(&["solve", p.to_str().unwrap(), "--out", "svg"]).stdout).unwrap();
    assert_eq!(text.matches("<line").count(), 3);
}

#[test]
fn local_search_matches_the_oracle_on_the_y() {
    let p = instance("symmetric_y.json");
    let v = ok_json(&["solve", p.to_str().unwrap(), "--method", "local", "--seed", "3"]);
    assert!((v["cost"].as_f64().unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-4);
    assert_eq!(v["method"], "local");
}

#[test]
fn malformed_input_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"dimension": 2, "alpha": "x", "ambient_radius": 1, "mu_minus": [], "mu_plus": []}"#).unwrap();
    let out = ramify(&["solve", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("alpha"), "{}", stderr(&out));

    fs::write(&bad, r#"{"dimension": 2, "alpha": 0.5, "ambient_radius": 1, "mu_plus": []}"#).unwrap();
    let out = ramify(&["solve", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("mu_minus"), "{}", stderr(&out));

    fs::write(&bad, r#"{"dimension": 2, "alpha": 0.5, "ambient_radius": 1, "mu_minus": [{"at": [0, 0], "mass": -1}], "mu_plus": []}"#)
        .unwrap();
    let out = ramify(&["solve", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("mu_minus[0].mass"), "{}", stderr(&out));

    fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&ramify(&["solve", bad.to_str().unwrap()])), 2);
}

#[test]
fn exit_codes_are_distinct() {
    let missing = ramify(&["solve", "/definitely/not/here.json"]);
    assert_eq!(code(&missing), 1);

    let dir = tempfile::tempdir().unwrap();
    let big = dir.path().join("big.json");
    let atoms = |y: f64| (0..4).map(|i| format!(r#"{{"at": [{i}, {y}], "mass": 1}}"#)).collect::<Vec<_>>().join(",");
    fs::write(
        &big,
        format!(r#"{{"dimension": 2, "alpha": 0.5, "ambient_radius": 9, "mu_minus": [{}], "mu_plus": [{}]}}"#, atoms(0.0), atoms(2.0)),
    )
    .unwrap();
    assert_eq!(code(&ramify(&["solve", big.to_str().unwrap()])), 3);

    let cfg = root().join("configs/stability_alpha_0.3.json");
    let below = ramify(&["stability", cfg.to_str().unwrap(), "--dim", "3"]);
    assert_eq!(code(&below), 4);
}

#[test]
fn decompose_splits_the_diamond() {
    let p = instance("diamond.json");
    let v = ok_json(&["decompose", p.to_str().unwrap()]);
    let curves = v["curves"].as_array().unwrap();
    assert_eq!(curves.len(), 2);
    assert!((v["total_weight"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((v["boundary_mass"].as_f64().unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn solutions_read_back_as_instances() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("sol.json");
    let p = instance("three_atoms.json");
    let out = ramify(&["solve", p.to_str().unwrap(), "-o", sol.to_str().unwrap()]);
    assert!(out.status.success());
    let v = ok_json(&["decompose", sol.to_str().unwrap()]);
    assert_eq!(v["curves"].as_array().unwrap().len(), 2);
}

#[test]
fn flat_distance_of_identical_paths_is_zero() {
    let p = instance("diamond.json");
    let v = ok_json(&["flatnorm", p.to_str().unwrap(), p.to_str().unwrap()]);
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
    assert_eq!(v["method"], "grid");
    let q = instance("two_atoms.json");
    let v = ok_json(&["flatnorm", q.to_str().unwrap(), q.to_str().unwrap()]);
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn stability_csv_has_vanishing_gaps() {
    let cfg = root().join("configs/stability_alpha_0.3.json");
    let out = ramify(&["stability", cfg.to_str().unwrap(), "--out", "csv"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        ["n", "cost_n", "boundary_gap_minus", "boundary_gap_plus", "flat_gap_T", "mass_bounded", "gaps_monotone", "verdict"]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 7);
    let gap = |r: &csv::StringRecord| r[2].parse::<f64>().unwrap().max(r[3].parse::<f64>().unwrap());
    for w in rows.windows(2) {
        assert!(gap(&w[1]) <= gap(&w[0]));
    }
    assert!(gap(rows.last().unwrap()) < 0.01);
    assert!(rows.iter().all(|r| &r[7] == "optimal limit"));
}

#[test]
fn competitor_beats_the_member() {
    let p = instance("three_atoms.json");
    let v = ok_json(&["competitor", p.to_str().unwrap(), "--seed", "5"]);
    assert!(v["boundary_error"].as_f64().unwrap() <= 1e-9);
    assert!(v["competitor"]["cost"].as_f64().unwrap() < v["member"]["cost"].as_f64().unwrap());
    assert_eq!(v["ledger"]["improved"], true);
}

#[test]
fn seeded_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = instance("symmetric_y.json");
    let cfg = root().join("configs/stability_alpha_0.6.json");
    let runs: [(&str, Vec<&str>); 3] = [
        ("local", vec!["solve", p.to_str().unwrap(), "--method", "local"]),
        ("comp", vec!["competitor", p.to_str().unwrap()]),
        ("stab", vec!["stability", cfg.to_str().unwrap(), "--out", "csv"]),
    ];
    for (name, args) in runs {
        let mut bytes = Vec::new();
        for k in 0..2 {
            let f = dir.path().join(format!("{name}{k}"));
            let mut a = args.clone();
            a.extend(["--seed", "11", "-o", f.to_str().unwrap()]);
            let out = ramify(&a);
            assert!(out.status.success(), "{name}: {}", stderr(&out));
            bytes.push(fs::read(&f).unwrap());
        }
        assert_eq!(bytes[0], bytes[1], "{name}");
    }
    // no temporary files left behind
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 6);
}

#[test]
fn instance_round_trip_is_stable() {
    for name in ["two_atoms.json", "symmetric_y.json", "diamond.json", "three_atoms.json"] {
        let text = fs::read_to_string(instance(name)).unwrap();
        let a = InstanceFile::parse(&text).unwrap();
        let once = canonical_json(&a).unwrap();
        let b = InstanceFile::parse(&once).unwrap();
        assert_eq!(a, b);
        assert_eq!(once, canonical_json(&b).unwrap());
    }
}
