use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qudit-observe"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn json_stdout(args: &[&str]) -> Value {
    serde_json::from_slice(&run(args).stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn decompose_examples() {
    let sz = json_stdout(&["decompose", s(&data("sz_qubit.spin.json"))]);
    let terms = sz["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 1);
    assert!((terms[0]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(terms[0]["paulis"], serde_json::json!([[0, 1]]));

    let x = json_stdout(&["decompose", s(&data("x_qubit.dense.json"))]);
    assert_eq!(x["terms"].as_array().unwrap().len(), 1);
    assert_eq!(x["terms"][0]["paulis"], serde_json::json!([[1, 0]]));

    let szsz = json_stdout(&["decompose", s(&data("szsz_qutrits.spin.json"))]);
    let terms = szsz["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 4);
    assert!(terms.iter().all(|t| t["paulis"].as_array().unwrap().iter().all(|f| f[0] == 0)));
}

#[test]
fn plan_examples() {
    let dir = tempfile::tempdir().unwrap();
    let xz = dir.path().join("xz.json");
    std::fs::write(
        &xz,
        r#"{"dims": [2], "terms": [{"re": 1, "im": 0, "paulis": [[1, 0]]}, {"re": 0.5, "im": 0, "paulis": [[0, 1]]}]}"#,
    )
    .unwrap();
    let plan = json_stdout(&["plan", "--observable", s(&xz)]);
    let cliques = plan["cliques"].as_array().unwrap();
    assert_eq!(cliques.len(), 2);
    let mut locs: Vec<u64> = cliques.iter().map(|c| c["n_loc"].as_u64().unwrap()).collect();
    locs.sort();
    assert_eq!(locs, vec![0, 1]);
    assert!(plan["manifest_sha256"].is_string());

    let gc = json_stdout(&["plan", "--observable", s(&data("bell_terms.observable.json"))]);
    assert!(gc["cliques"].as_array().unwrap().iter().any(|c| c["n_ent"].as_u64().unwrap() > 0));
    let bc = json_stdout(&["plan", "--observable", s(&data("bell_terms.observable.json")), "--mode", "bc"]);
    assert!(bc["cliques"].as_array().unwrap().iter().all(|c| c["n_ent"] == 0));

    let pair = dir.path().join("pair.json");
    std::fs::write(
        &pair,
        r#"{"dims": [2, 2], "terms": [{"re": 1, "im": 0, "paulis": [[1, 0], [1, 0]]}, {"re": 1, "im": 0, "paulis": [[0, 1], [0, 1]]}]}"#,
    )
    .unwrap();
    let p = json_stdout(&["plan", "--observable", s(&pair)]);
    let cl = p["cliques"].as_array().unwrap();
    assert_eq!(cl.len(), 1);
    assert!(cl[0]["n_ent"].as_u64().unwrap() >= 1);
}

#[test]
fn decompose_output_round_trips_into_run() {
    let dir = tempfile::tempdir().unwrap();
    let obs = dir.path().join("obs.json");
    run(&["decompose", s(&data("sz_qubit.spin.json")), "--out", s(&obs)]);
    let out = dir.path().join("run");
    run(&[
        "run",
        "--observable",
        s(&obs),
        "--state",
        s(&data("zero_qubit.state.json")),
        "--budget",
        "1000",
        "--seed",
        "3",
        "--out",
        s(&out),
    ]);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    let r = &report["report"];
    // S_z on a qubit is Z, so ⟨0|S_z|0⟩ = 1
    let o = r["estimate_re"].as_f64().unwrap();
    let var = r["variance"].as_f64().unwrap();
    assert!((o - 1.0).abs() <= 3.0 * var.sqrt(), "{o} ± {}", var.sqrt());
    assert_eq!(report["seed"], 3);
    assert!(report["manifest_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn noise_aware_run_fills_every_column() {
    let dir = tempfile::tempdir().unwrap();
    run(&["run", "--manifest", s(&data("manifest.json")), "--budget", "400", "--out", s(dir.path())]);
    let text = std::fs::read_to_string(dir.path().join("history.csv")).unwrap();
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rd.headers().unwrap().clone();
    assert_eq!(
        headers.iter().collect::<Vec<_>>(),
        ["m_total", "o_est_re", "o_est_im", "var_stat", "dev_sys_sq", "var_noise_aware", "selected_clique"]
    );
    let rows: Vec<_> = rd.records().map(|r| r.unwrap()).collect();
    assert!(!rows.is_empty());
    for row in &rows {
        assert!(row.iter().all(|f| !f.is_empty() && f.parse::<f64>().is_ok()));
    }
    assert!(rows.iter().any(|r| r[4].parse::<f64>().unwrap() > 0.0));

    let fit = json_stdout(&["fit-noise", s(&dir.path().join("probes.csv"))]);
    assert!(fit["fit"]["xi_ent"]["std"].as_f64().unwrap() > 0.0);
}

#[test]
fn fit_noise_flags_unidentifiable_and_rejects_empty_logs() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("local.csv");
    let mut text = String::from("n_loc,n_ent,outcomes,error\n");
    for k in 0..300 {
        text.push_str(&format!("4,0,2,{}\n", k % 20 == 0));
    }
    std::fs::write(&log, text).unwrap();
    let fit = json_stdout(&["fit-noise", s(&log)]);
    assert_eq!(fit["fit"]["xi_ent"]["unidentifiable"], true);
    assert_eq!(fit["fit"]["xi_loc"]["unidentifiable"], false);

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "n_loc,n_ent,outcomes,error\n").unwrap();
    let out = bin().args(["fit-noise", s(&empty)]).output().unwrap();
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "empty");
}

#[test]
fn bad_input_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dims\": [2],\n \"terms\": [oops]}").unwrap();
    let out = bin().args(["decompose", s(&bad)]).output().unwrap();
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");
    assert!(err["error"]["message"].as_str().unwrap().contains("line 2"));

    let composite = dir.path().join("four.json");
    std::fs::write(&composite, r#"{"dims": [4], "terms": [{"re": 1, "im": 0, "paulis": [[1, 0]]}]}"#).unwrap();
    let out = bin().args(["plan", "--observable", s(&composite)]).output().unwrap();
    assert!(!out.status.success());
}
