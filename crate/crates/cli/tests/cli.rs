use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sparse_gauss::extract_isosurface;
use sparse_gauss::persist::ModelDocument;

const DIALA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/diala.pqr");

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-gauss"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn one_atom(dir: &Path) -> PathBuf {
    let path = dir.join("one.pqr");
    fs::write(
        &path,
        "ATOM      1  C   ALA     1       0.000   0.000   0.000  0.0000 1.5000\n",
    )
    .unwrap();
    path
}

fn short_fit(pqr: &str, out: &Path) -> Output {
    run(&[
        "sparsify",
        pqr,
        "--max-iter",
        "120",
        "--sparse-iter",
        "80",
        "--deterministic",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn info_reports_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["info", one_atom(dir.path()).to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("N=1\n"));
    let o = run(&["info", DIALA]);
    assert!(stdout(&o).contains("N=22"));
    assert!(stdout(&o).contains("radius_max=1.908"));
}

#[test]
fn malformed_input_exits_with_parse_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pqr");
    fs::write(&bad, "ATOM 1 C ALA 1 x 0 0 0 1.5\n").unwrap();
    let o = run(&["info", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
}

#[test]
fn single_atom_sparsify_keeps_one_basis() {
    let dir = tempfile::tempdir().unwrap();
    let pqr = one_atom(dir.path());
    let out = dir.path().join("run");
    let o = short_fit(pqr.to_str().unwrap(), &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["N_ERBF"], 1);
    assert_eq!(summary["S_r"], 1.0);
    assert_eq!(summary["config"]["max_iter"], "120");
    for file in ["trace.csv", "weights.txt"] {
        let text = fs::read_to_string(out.join(file)).unwrap();
        assert!(text.starts_with("# input = "), "{file}");
        assert!(text.contains("# error_cap = 0.5"), "{file}");
    }
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(trace.lines().any(|l| l == "iter,f,Es,El1,ws,wl,nbasis,tau"));
    let doc = ModelDocument::load(out.join("model.json")).unwrap();
    assert!(doc
        .metadata
        .config
        .iter()
        .any(|(k, v)| k == "band" && v == "1"));
}

#[test]
fn deterministic_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(short_fit(DIALA, &a).status.success());
    assert!(short_fit(DIALA, &b).status.success());
    for file in ["model.json", "trace.csv", "weights.txt"] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
}

#[test]
fn model_mesh_matches_library_mesh() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    assert!(short_fit(DIALA, &out).status.success());
    let model_path = out.join("model.json");
    let obj = dir.path().join("fit.obj");
    let o = run(&[
        "mesh",
        "--model",
        model_path.to_str().unwrap(),
        "-o",
        obj.to_str().unwrap(),
    ]);
    assert!(o.status.success());

    let doc = ModelDocument::load(&model_path).unwrap();
    let mesh = extract_isosurface(&doc.model(), &doc.metadata.bounds, 0.5, 1.0).unwrap();
    let text = fs::read_to_string(&obj).unwrap();
    let vertices = text.lines().filter(|l| l.starts_with("v ")).count();
    let faces = text.lines().filter(|l| l.starts_with("f ")).count();
    assert_eq!(
        (vertices, faces),
        (mesh.vertices.len(), mesh.triangles.len())
    );
    let mut expected = Vec::new();
    mesh.write_obj(&mut expected, &[]).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(body.as_bytes(), expected.as_slice());
}

#[test]
fn mesh_of_atom_is_a_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let pqr = one_atom(dir.path());
    let obj = dir.path().join("one.obj");
    let o = run(&[
        "mesh",
        "--pqr",
        pqr.to_str().unwrap(),
        "--mesh-spacing",
        "0.2",
        "-o",
        obj.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(&obj).unwrap();
    for line in text.lines().filter(|l| l.starts_with("v ")) {
        let r: f64 = line[2..]
            .split_whitespace()
            .map(|t| t.parse::<f64>().unwrap().powi(2))
            .sum::<f64>()
            .sqrt();
        assert!((r - 1.5).abs() <= 0.2, "{line}");
    }
}

#[test]
fn missing_crossing_exits_with_mesh_code() {
    let dir = tempfile::tempdir().unwrap();
    let pqr = one_atom(dir.path());
    let obj = dir.path().join("none.obj");
    let o = run(&[
        "mesh",
        "--pqr",
        pqr.to_str().unwrap(),
        "--isovalue",
        "1000",
        "-o",
        obj.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn collapse_exits_with_code_and_marker() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&[
        "sparsify",
        DIALA,
        "--max-iter",
        "40",
        "--sparse-iter",
        "30",
        "--prune-tol",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(fs::read_to_string(out.join("FAILED"))
        .unwrap()
        .contains("iteration 20"));
    assert!(out.join("trace.csv").exists() && out.join("model.partial.json").exists());
    assert!(!out.join("model.json").exists());
}

#[test]
fn compare_initial_model_has_no_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run(&[
        "sparsify",
        DIALA,
        "--max-iter",
        "0",
        "--sparse-iter",
        "0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report_path = dir.path().join("report.json");
    let o = run(&[
        "compare",
        "--pqr",
        DIALA,
        "--model",
        out.join("model.json").to_str().unwrap(),
        "--output",
        report_path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report_path).unwrap()).unwrap();
    for key in ["Error_A", "Error_V", "H"] {
        assert!(
            report[key].as_f64().unwrap() < 1e-9,
            "{key}: {}",
            report[key]
        );
    }
    assert!(report["A_original"].as_f64().unwrap() > 100.0);
}
