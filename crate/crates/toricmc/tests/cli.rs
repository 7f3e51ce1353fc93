//! End-to-end tests of the toricmc binary: exit codes, canonical output,
//! and byte-for-byte round-trips of emitted files.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toricmc"))
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const BINOMIAL: &str =
    r#"{"rows": [[1,1,1,1,1,1],[0,1,2,3,4,5]], "mu": [1,5,10,10,5,1]}"#;

const K3: &str = r#"{
  "vertices": ["a","b","c"],
  "arcs": [["a","b"],["b","a"],["b","c"],["c","b"],["a","c"],["c","a"]],
  "loops": ["a","b","c"]
}"#;

const DRIFT: &str = r#"{"p": [[0.2,0.6,0.2],[0.2,0.2,0.6],[0.6,0.2,0.2]]}"#;
const SYMMETRIC: &str = r#"{"p": [[0.5,0.3,0.2],[0.3,0.5,0.2],[0.2,0.2,0.6]]}"#;

#[test]
fn hilbert_binomial_golden() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "model.json", BINOMIAL);
    let out = bin().arg("hilbert").arg(&model).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        v["hilbert"],
        serde_json::json!([[0, 1, 2, 3, 4, 5], [5, 4, 3, 2, 1, 0]])
    );
}

#[test]
fn kernel_rank_and_csv_input() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "model.json", BINOMIAL);
    let out = bin().arg("kernel").arg(&model).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kernel"].as_array().unwrap().len(), 4);

    // The same matrix as a CSV file gives the same kernel.
    let csv = write(&dir, "model.csv", "1,1,1,1,1,1\n0,1,2,3,4,5\n");
    let out2 = bin()
        .args(["kernel", csv.to_str().unwrap(), "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out2.status.code(), Some(0));
    let v2: serde_json::Value = serde_json::from_str(&stdout(&out2)).unwrap();
    assert_eq!(v["kernel"], v2["kernel"]);
}

#[test]
fn model_output_round_trips_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "model.json", BINOMIAL);
    let first = bin().arg("closure").arg(&model).output().unwrap();
    assert_eq!(first.status.code(), Some(0));
    let emitted = write(&dir, "closure.json", &stdout(&first));
    // The emitted model is already closed; closing it again must reproduce
    // the exact same bytes.
    let second = bin().arg("closure").arg(&emitted).output().unwrap();
    assert_eq!(second.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));
}

#[test]
fn kcheck_exit_codes_and_witness() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    let sym = write(&dir, "sym.json", SYMMETRIC);
    let drift = write(&dir, "drift.json", DRIFT);

    let out = bin().arg("kcheck").arg(&graph).arg(&sym).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["reversible"], serde_json::json!(true));

    let out = bin().arg("kcheck").arg(&graph).arg(&drift).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["reversible"], serde_json::json!(false));
    assert_eq!(v["witness"], serde_json::json!(["a", "b", "c"]));
}

#[test]
fn input_error_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(&dir, "bad.json", "{\"rows\": \"nope\"}");
    let out = bin().arg("kernel").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("does-not-exist.json");
    let out = bin().arg("kernel").arg(&missing).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().arg("no-such-command").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    let out = bin()
        .args(["cycles", graph.to_str().unwrap(), "--max-candidates", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn budget_env_var_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    let out = bin()
        .arg("cycles")
        .arg(&graph)
        .env("TORICMC_MAX_CANDIDATES", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn dbsolve_and_divergence_agree_on_reversibility() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    let sym = write(&dir, "sym.json", SYMMETRIC);
    let drift = write(&dir, "drift.json", DRIFT);

    let out = bin().arg("dbsolve").arg(&graph).arg(&sym).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let kappa = v["kappa"].as_array().unwrap();
    assert_eq!(kappa.len(), 3);

    let out = bin().arg("dbsolve").arg(&graph).arg(&drift).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin()
        .args(["divergence", graph.to_str().unwrap(), sym.to_str().unwrap(), "--steps", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["divergence"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn cycles_census_on_k4() {
    let k4 = r#"{
      "vertices": ["1","2","3","4"],
      "arcs": [["1","2"],["2","1"],["1","3"],["3","1"],["1","4"],["4","1"],
               ["2","3"],["3","2"],["2","4"],["4","2"],["3","4"],["4","3"]],
      "loops": []
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k4.json", k4);
    let out = bin().arg("cycles").arg(&graph).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Loop-free K4: 6 two-cycles, 8 oriented triangles, 6 oriented squares.
    assert_eq!(v["census"]["totals"]["oriented"], serde_json::json!(20));
    assert_eq!(v["census"]["totals"]["unoriented"], serde_json::json!(13));
    assert_eq!(v["census"]["totals"]["undirected"], serde_json::json!(7));
    assert_eq!(v["census"]["oriented"]["3"], serde_json::json!(8));
}

#[test]
fn realizable_and_decompose() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    // Counts of the closed walk a b c a.
    let counts = write(&dir, "n.json", "[[0,1,0],[0,0,1],[1,0,0]]");
    let out = bin().arg("realizable").arg(&graph).arg(&counts).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["kind"], serde_json::json!("closed"));

    // Two extra a->b push the defect at a beyond an open walk's single +1.
    let bad = write(&dir, "bad.json", "[[0,3,0],[0,0,1],[1,0,0]]");
    let out = bin().arg("realizable").arg(&graph).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = bin()
        .args([
            "decompose",
            graph.to_str().unwrap(),
            "--trajectory",
            "a,b,c,a,b",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["cycles"][0]["states"], serde_json::json!(["a", "b", "c"]));
    assert_eq!(v["remainder"], serde_json::json!(["a", "b"]));
}

#[test]
fn mbasis_and_indicator_on_small_design() {
    // 2x2 factorial design with an interaction row.
    let model = r#"{
      "rows": [[1,1,1,1],[0,1,0,1],[0,0,1,1]],
      "row_labels": ["1","x1","x2"],
      "col_labels": ["00","10","01","11"]
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "design.json", model);
    let out = bin().arg("mbasis").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(
        v["basis"],
        serde_json::json!([[0, 0], [0, 1], [1, 0], [1, 1]])
    );

    let out = bin()
        .args(["indicator", path.to_str().unwrap(), "--point", "11"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // x1*x2 is 1 exactly at (1,1) on this design.
    assert_eq!(v["terms"], serde_json::json!([{"coefficient": 1, "exponents": [1, 1]}]));
}

#[test]
fn tmc_z_matches_expected_total() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    let params = write(
        &dir,
        "params.json",
        r#"{"init": [1.0, 1.0, 1.0], "weight": [[0.2,0.6,0.2],[0.2,0.2,0.6],[0.6,0.2,0.2]]}"#,
    );
    let out = bin()
        .args(["tmc-z", graph.to_str().unwrap(), params.to_str().unwrap(), "--steps", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // Stochastic rows and flat init: Z = sum over states of 1.
    assert!((v["z"].as_f64().unwrap() - 3.0).abs() < 1e-12);

    let out = bin()
        .args([
            "tmc-expected",
            graph.to_str().unwrap(),
            params.to_str().unwrap(),
            "--steps",
            "4",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let total: f64 = v["expected"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|row| row.as_array().unwrap())
        .map(|x| x.as_f64().unwrap())
        .sum();
    assert!((total - 4.0).abs() < 1e-10);
}

#[test]
fn homog_witness_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    let good = write(
        &dir,
        "good.json",
        r#"{"init": [1.0,0.0,0.0], "weight": [[0.4,1.2,0.4],[0.4,0.4,1.2],[1.2,0.4,0.4]]}"#,
    );
    let out = bin().arg("tmc-homog").arg(&graph).arg(&good).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["is_mc"], serde_json::json!(true));
    assert!((v["row_sum"].as_f64().unwrap() - 2.0).abs() < 1e-12);

    let bad = write(
        &dir,
        "bad.json",
        r#"{"init": [1.0,0.0,0.0], "weight": [[0.4,1.2,0.4],[0.4,0.4,1.2],[1.2,0.4,0.9]]}"#,
    );
    let out = bin().arg("tmc-homog").arg(&graph).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rev_params_build_round_trip_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    let sym = write(&dir, "sym.json", SYMMETRIC);

    let params_out = bin().arg("rev-params").arg(&graph).arg(&sym).output().unwrap();
    assert_eq!(params_out.status.code(), Some(0));
    let params = write(&dir, "params.json", &stdout(&params_out));

    let build_out = bin().arg("rev-build").arg(&graph).arg(&params).output().unwrap();
    assert_eq!(build_out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&build_out)).unwrap();
    let p = v["p"].as_array().unwrap();
    for (vtx, row) in p.iter().enumerate() {
        for (w, x) in row.as_array().unwrap().iter().enumerate() {
            let orig: serde_json::Value = serde_json::from_str(SYMMETRIC).unwrap();
            let expect = orig["p"][vtx][w].as_f64().unwrap();
            assert!((x.as_f64().unwrap() - expect).abs() < 1e-12);
        }
    }

    // Rebuilding from re-derived parameters reproduces identical bytes.
    let params2_out = bin().arg("rev-params").arg(&graph).arg(&sym).output().unwrap();
    assert_eq!(stdout(&params_out), stdout(&params2_out));

    let drift = write(&dir, "drift.json", DRIFT);
    let out = bin().arg("rev-params").arg(&graph).arg(&drift).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn metropolis_symmetrizes_joint() {
    let dir = tempfile::tempdir().unwrap();
    let graph = write(&dir, "k3.json", K3);
    let joint = write(
        &dir,
        "q.json",
        r#"[[0.10,0.08,0.02],[0.04,0.30,0.06],[0.10,0.05,0.25]]"#,
    );
    for combiner in ["min", "harmonic", "product"] {
        let out = bin()
            .args([
                "metropolis",
                graph.to_str().unwrap(),
                joint.to_str().unwrap(),
                "--combiner",
                combiner,
            ])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let p = v["p"].as_array().unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let x = p[a][b].as_f64().unwrap();
                let y = p[b][a].as_f64().unwrap();
                if a != b {
                    assert_eq!(x, y);
                }
            }
        }
        let margins = v["margins"].as_array().unwrap();
        assert!((margins[0].as_f64().unwrap() - 0.20).abs() < 1e-15);
        assert!((margins[1].as_f64().unwrap() - 0.40).abs() < 1e-15);
        assert!((margins[2].as_f64().unwrap() - 0.40).abs() < 1e-15);
    }
}

#[test]
fn output_flag_writes_file_and_table_goes_to_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "model.json", BINOMIAL);
    let out_path = dir.path().join("result.json");
    let out = bin()
        .args([
            "hilbert",
            model.to_str().unwrap(),
            "--output",
            out_path.to_str().unwrap(),
            "--table",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["hilbert"].as_array().unwrap().len(), 2);
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains('0') && err.contains('5'));
}

#[test]
fn confounded_and_equiv() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "model.json", BINOMIAL);
    // Scaling t0 only rescales q; the normalized densities agree.
    let out = bin()
        .args([
            "confounded",
            model.to_str().unwrap(),
            "--s",
            "1.0,2.0",
            "--t",
            "5.0,2.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["confounded"], serde_json::json!(true));

    let out = bin()
        .args([
            "confounded",
            model.to_str().unwrap(),
            "--s",
            "1.0,2.0",
            "--t",
            "1.0,3.0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // Row operations preserve the span: {1, x} vs {1, 2x + 1}.
    let other = write(
        &dir,
        "other.json",
        r#"{"rows": [[1,1,1,1,1,1],[1,3,5,7,9,11]], "mu": [1,5,10,10,5,1]}"#,
    );
    let out = bin().arg("equiv").arg(&model).arg(&other).output().unwrap();
    assert_eq!(out.status.code(), Some(0));

    let different = write(
        &dir,
        "different.json",
        r#"{"rows": [[1,1,1,1,1,1],[0,1,4,9,16,25]], "mu": [1,5,10,10,5,1]}"#,
    );
    let out = bin().arg("equiv").arg(&model).arg(&different).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn moments_binomial_mean() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "model.json", BINOMIAL);
    let out = bin()
        .args([
            "moments",
            model.to_str().unwrap(),
            "--t",
            "1.0,1.0",
            "--alpha",
            "1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((v["moment"].as_f64().unwrap() - 2.5).abs() < 1e-12);
}

#[test]
fn face_of_binomial_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(&dir, "model.json", BINOMIAL);
    let out = bin()
        .args(["face", model.to_str().unwrap(), "--rows", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // x = 0 is the only point where the exponent row vanishes.
    assert_eq!(v["support"], serde_json::json!([0]));
}
