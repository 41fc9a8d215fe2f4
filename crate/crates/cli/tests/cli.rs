use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

const PLANT: &str = r#"{"A": [[-2, 3], [-8, -10]], "B": [[-1.3, 3.4], [3.6, -1.7]], "C": [[8, 9], [10, 7]], "D": [[8, 8], [6, -8]]}"#;

fn scratch(test: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("passmat-cli-{}-{test}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn file(dir: &PathBuf, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn passmat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_passmat")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    assert!(o.status.success(), "{}", stderr(o));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn analyze_plant_reports_ofp_index() {
    let dir = scratch("analyze");
    let sys = file(&dir, "plant.json", PLANT);
    let o = passmat(&["analyze", &sys]);
    let doc = json(&o);
    let xi = doc["scalar_indices"]["xi"].as_f64().unwrap();
    assert!((xi + 0.1095).abs() <= 2e-3, "xi {xi}");
    assert_eq!(doc["kind"], "OFP");
    assert!(doc["verification"]["primary_margin"].as_f64().unwrap() >= -1e-6);
    assert!(stderr(&o).contains("xi = -0.109"));
    assert!(doc["meta"].as_str().unwrap().contains("lmi_eps_rel=1e-8"));
}

#[test]
fn static_identity_gain_is_unit_ifp() {
    let dir = scratch("static");
    let sys = file(&dir, "id.json", r#"{"A": [], "B": [], "C": [], "D": [[1, 0], [0, 1]]}"#);
    let doc = json(&passmat(&["analyze", &sys, "--mode", "ifp", "--principle", "trace"]));
    let phi = &doc["phi"];
    for i in 0..2 {
        for j in 0..2 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((phi[i][j].as_f64().unwrap() - want).abs() < 1e-6, "{phi}");
        }
    }
    assert!(doc["verification"]["primary_margin"].as_f64().unwrap() >= -1e-6);
}

#[test]
fn unstable_system_exits_3() {
    let dir = scratch("unstable");
    let sys = file(&dir, "u.json", r#"{"A": [[0.5]], "B": [[1]], "C": [[1]], "D": [[1]]}"#);
    let o = passmat(&["analyze", &sys]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("not Hurwitz"), "{}", stderr(&o));
}

#[test]
fn malformed_input_exits_2() {
    let dir = scratch("malformed");
    let sys = file(&dir, "bad.json", "{\"A\": [[1, 2]");
    assert_eq!(passmat(&["analyze", &sys]).status.code(), Some(2));
    assert_eq!(passmat(&["analyze", &dir.join("missing.json").to_string_lossy()]).status.code(), Some(2));
    assert_eq!(passmat(&["smib-region", "--grid", "0x3"]).status.code(), Some(2));
    assert_eq!(passmat(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn invalid_thread_count_exits_2() {
    let o = Command::new(env!("CARGO_BIN_EXE_passmat"))
        .args(["smib-sim", "--k11", "0.1", "--k22", "0.3", "--T", "0.1"])
        .env("PASSMAT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn passivation_sweep_thresholds_are_ordered() {
    let dir = scratch("sweep");
    let sys = file(&dir, "plant.json", PLANT);
    let gain = file(&dir, "k.json", r#"{"K": [[0.987, 0.643], [0.643, 1.013]]}"#);
    let o = passmat(&["passivation-sweep", &sys, &gain, "--steps", "20"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "theta,true_passive,scalar_cert,trace_cert,mineig_cert");
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 22);
    let footer = rows.last().unwrap();
    assert_eq!(footer[0], "threshold");
    let t: Vec<f64> = footer[1..].iter().map(|s| s.parse().unwrap()).collect();
    // every certified threshold bounds the true one from above
    for c in &t[1..] {
        assert!(*c >= t[0] - 1e-9, "{t:?}");
    }
    assert!(t[3] <= t[1] + 1e-9, "{t:?}");
}

#[test]
fn region_scalar_certificates_lie_in_matrix_region() {
    let o = passmat(&["smib-region", "--grid", "9x9"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 81);
    for r in &rows {
        if r[2] == "true" {
            assert_eq!(r[3], "true", "{r:?}");
        }
    }
}

#[test]
fn unstable_gain_simulation_diverges() {
    let o = passmat(&["smib-sim", "--k11", "-0.4", "--k22", "0.6", "--T", "60", "--stride", "500"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().next().unwrap().contains("status=Diverged"), "{}", text.lines().next().unwrap());
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = scratch("determinism");
    let sys = file(&dir, "plant.json", PLANT);
    for args in [vec!["analyze", sys.as_str()], vec!["smib-region", "--grid", "7x7"], vec!["spectral", sys.as_str(), "--T", "5", "--N", "32", "--count", "4"]] {
        let a = passmat(&args);
        let b = passmat(&args);
        assert!(a.status.success(), "{}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn analyze_output_feeds_interconnect() {
    let dir = scratch("roundtrip");
    let sys = file(&dir, "plant.json", PLANT);
    let cert = dir.join("cert.json").to_string_lossy().into_owned();
    let o = passmat(&["analyze", &sys, "-o", &cert]);
    assert!(o.status.success(), "{}", stderr(&o));
    let unit = file(&dir, "unit.json", r#"{"phi": [[0, 0], [0, 0]], "xi": [[1, 0], [0, 1]], "kind": "OFP", "provenance": "Declared", "storage": null}"#);
    let doc = json(&passmat(&["interconnect", &cert, &unit, "--topology", "lyapunov"]));
    assert_eq!(doc["topology"], "lyapunov");
    assert!(doc["satisfied"].is_boolean());
    assert!(doc["conditions"].as_array().is_some_and(|c| !c.is_empty()));
}

#[test]
fn parallel_of_unit_osp_certificates_halves() {
    let dir = scratch("parallel");
    let unit = file(&dir, "unit.json", r#"{"phi": [[0, 0], [0, 0]], "xi": [[1, 0], [0, 1]], "kind": "OFP", "provenance": "Declared", "storage": null}"#);
    let doc = json(&passmat(&["interconnect", &unit, &unit, "--topology", "parallel"]));
    assert_eq!(doc["composed"]["xi"], serde_json::json!([[0.5, 0.0], [0.0, 0.5]]));
}

#[test]
fn static_map_ofp_is_inverse_symmetric_part() {
    let dir = scratch("static-ofp");
    let sys = file(&dir, "d.json", r#"{"A": [], "B": [], "C": [], "D": [[2, 0], [0, 4]]}"#);
    let doc = json(&passmat(&["analyze", &sys]));
    assert_eq!(doc["xi"], serde_json::json!([[0.5, 0.0], [0.0, 0.25]]));
    let sys = file(&dir, "singular.json", r#"{"A": [], "B": [], "C": [], "D": [[1, 1], [1, 1]]}"#);
    assert_eq!(passmat(&["analyze", &sys]).status.code(), Some(4));
}
