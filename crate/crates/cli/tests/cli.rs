//! End-to-end runs of the binary: outputs, files and exit codes.

use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gausstopo"));
    c.env_remove("GAUSSTOPO_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("gausstopo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_model(name: &str, params: &str) -> PathBuf {
    let path = scratch(&format!("{name}-{}.json", params.replace([',', '='], "_")));
    let out = run(&["model", "--name", name, "--params", params, "--out", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn classify_from_spec() {
    let v = json_of(&run(&["classify", "--spec", r#"{"trs":"plus","u1":false,"su2":"none"}"#]));
    assert_eq!(v, serde_json::json!({"class": "BDI"}));
}

#[test]
fn untabulated_spec_is_a_usage_error() {
    let out = run(&["classify", "--spec", r#"{"trs":"plus","u1":true,"su2":"full"}"#]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn kitaev_winding_from_file() {
    let m = write_model("kitaev", "μ=1,t=1,Δ=1");
    let v = json_of(&run(&["invariant", "--name", "winding", "--model", s(&m), "--grid", "64"]));
    assert_eq!(v["value"], 1);
    assert!(v["quantization_gap"].as_f64().unwrap() < 1e-6);
}

#[test]
fn gap_closing_is_a_domain_error() {
    let m = write_model("kitaev", "mu=2");
    let out = run(&["invariant", "--name", "winding", "--model", s(&m), "--grid", "64"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["tables", "--bogus"]).status.code(), Some(2));
    assert_eq!(run(&["model", "--name", "kitaev", "--params", "zeta=1"]).status.code(), Some(2));
    let m = write_model("kitaev", "mu=1");
    assert_eq!(run(&["invariant", "--name", "nope", "--model", s(&m)]).status.code(), Some(2));
}

#[test]
fn tables_entry_and_dump() {
    let v = json_of(&run(&["tables", "--class", "AII", "--dim", "3"]));
    assert_eq!(v["state_group"], "Z2");
    assert_eq!(v["image"], "0");
    assert_eq!(v["kernel_genuinely_dynamical"], "Z2");
    let dump = json_of(&run(&["tables", "--dump"]));
    assert_eq!(dump["states"]["D"][2], "Z");
    assert_eq!(dump["spaces"]["AII"], serde_json::json!(["R4", "R5"]));
}

#[test]
fn reports() {
    let k = json_of(&run(&["report", "--model", s(&write_model("kitaev", "mu=1")), "--grid", "64"]));
    assert_eq!(k["class"], "BDI");
    assert_eq!(k["invariants"]["winding"]["value"], 1);
    assert_eq!(k["invariants"]["pfaffian"]["value"], -1);
    assert_eq!(k["disentanglable"], true);
    let p = json_of(&run(&["report", "--model", s(&write_model("pip", "mu=1")), "--grid", "24"]));
    assert_eq!(p["class"], "D");
    assert_eq!(p["invariants"]["chern"]["value"], 1);
    assert_eq!(p["disentanglable"], false);
    let v = json_of(&run(&["report", "--model", s(&write_model("vacuum", "dim=1")), "--grid", "16"]));
    for (name, inv) in v["invariants"].as_object().unwrap() {
        let value = inv["value"].as_i64().unwrap();
        assert!(value == 0 || value == 1, "{name} = {value}");
    }
    assert_eq!(v["disentanglable"], true);
}

#[test]
fn disentangle_emits_an_op() {
    let m = write_model("kitaev", "mu=1");
    let op = scratch("kitaev-op.json");
    let v = json_of(&run(&["disentangle", "--model", s(&m), "--grid", "32", "--emit-op", s(&op)]));
    assert_eq!(v["verdict"], true);
    assert!(v["residual_mass"].as_f64().unwrap() < 1e-8);
    let field: Value = serde_json::from_str(&std::fs::read_to_string(&op).unwrap()).unwrap();
    assert_eq!(field["role"], "fermion-op");
}

#[test]
fn deform_connect_and_boson_paths() {
    let a = write_model("kitaev", "mu=0");
    let b = write_model("kitaev", "mu=1");
    let v = json_of(&run(&["deform", "connect", "--model", s(&a), "--to", s(&b), "--grid", "64", "--steps", "200"]));
    assert!(v["residual"].as_f64().unwrap() < 1e-6);
    assert_eq!(v["op_valid"], true);

    let r: f64 = 0.4;
    let state = scratch("squeezed.json");
    let text = format!(
        r#"{{"particle":"boson","kind":"state","n":1,"dim":1,"terms":[{{"dr":[0],"re":[[{},0],[0,{}]]}}]}}"#,
        (2.0 * r).exp(),
        (-2.0 * r).exp()
    );
    std::fs::write(&state, text).unwrap();
    let bundle = scratch("squeezed-path.json");
    let t = json_of(&run(&["deform", "trivialize-bstate", "--model", s(&state), "--grid", "8", "--steps", "20", "--bundle", s(&bundle)]));
    assert_eq!(t["pass"], true);
    assert!(t["endpoint_distance_from_identity"].as_f64().unwrap() < 1e-12);
    let c = json_of(&run(&["deform", "connect", "--bundle", s(&bundle)]));
    assert!(c["group_violation"].as_f64().unwrap() < 1e-8);

    let sq = write_model("squeezer", "w=1,r=0.5");
    let u = json_of(&run(&["deform", "unitarize-bop", "--model", s(&sq), "--steps", "10"]));
    assert!(u["endpoint_unitarity_violation"].as_f64().unwrap() < 1e-10);
}

#[test]
fn seeded_random_models_are_reproducible() {
    let one = run(&["model", "--name", "random", "--class", "DIII", "--params", "dim=1", "--seed", "9"]);
    let two = run(&["model", "--name", "random", "--class", "DIII", "--params", "dim=1", "--seed", "9"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, two.stdout);
    let path = scratch("random-diii.json");
    std::fs::write(&path, &one.stdout).unwrap();
    let v = json_of(&run(&["validate", "--model", s(&path), "--grid", "16"]));
    assert_eq!(v["pass"], true);
}

#[test]
fn thread_count_does_not_change_results() {
    let m = write_model("pip", "mu=1");
    let serial = run(&["invariant", "--name", "chern", "--model", s(&m), "--grid", "24"]);
    let threaded = bin()
        .args(["invariant", "--name", "chern", "--model", s(&m), "--grid", "24"])
        .env("GAUSSTOPO_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(serial.stdout, threaded.stdout);
}

#[test]
fn toml_models_are_accepted() {
    let path = scratch("vac.toml");
    std::fs::write(
        &path,
        "particle = \"fermion\"\nkind = \"hamiltonian\"\nn = 1\ndim = 1\n\n[symmetry]\ntrs = \"plus\"\nu1 = false\nsu2 = \"none\"\n\n[[terms]]\ndr = [0]\nre = [[0.0, 0.0], [0.0, 0.0]]\nim = [[0.0, -1.0], [1.0, 0.0]]\n",
    )
    .unwrap();
    let v = json_of(&run(&["invariant", "--name", "winding", "--model", s(&path), "--grid", "8"]));
    assert_eq!(v["value"], 0);
}
