use diffqe::bundle::Bundle;
use diffqe::catalog::{catalog, CATALOG_JSON};
use diffqe::cli::main_with_args;
use diffqe::Error;
use serde_json::Value;

const CATALOG: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/catalog/catalog.json");

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut full = vec!["diffqe"];
    full.extend_from_slice(args);
    let code = main_with_args(full, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(args: &[&str]) -> Value {
    let (code, out) = run(args);
    assert_eq!(code, 0, "{out}");
    serde_json::from_str(&out).unwrap()
}

#[test]
fn points_of_the_graph() {
    let v = json(&["points", CATALOG, "graph", "--q", "3", "--m", "1"]);
    assert_eq!(v["points"], serde_json::json!([["0"], ["1"]]));
    assert_eq!(v["q"], 3);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["validate", CATALOG]).0, 0);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["points", CATALOG, "graph"]).0, 2);
    let (code, out) = run(&["points", CATALOG, "missing", "--q", "3"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["stage"], "schema");
    let (code, out) = run(&["points", CATALOG, "graph", "--q", "6"]);
    assert_eq!(code, 1);
    assert!(out.contains("\"error\""));
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["decompose", CATALOG, "reducible"],
        vec!["eval-galois", CATALOG, "kummer_non", "--q", "7"],
        vec!["image", CATALOG, "square", "gm_top", "--case", "finite-etale"],
        vec!["qe", CATALOG, "kummer", "--q", "5"],
        vec!["gal2fo", CATALOG, "mixed"],
        vec!["frobscan", CATALOG, "graph", "--grid", "2:7"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(a.0, 0, "{args:?}: {}", a.1);
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn command_results() {
    let v = json(&["eval-galois", CATALOG, "kummer_non", "--q", "7"]);
    assert_eq!(v["points"].as_array().unwrap().len(), 3);
    let v = json(&["decompose", CATALOG, "reducible"]);
    assert_eq!(v["components"].as_array().unwrap().len(), 2);
    let v = json(&["frobscan", CATALOG, "graph", "--grid", "2:7"]);
    assert_eq!(v["N"], 2);
    let v = json(&["frobscan", CATALOG, "top", "--grid", "3:7", "--m-max", "1"]);
    assert_eq!(v["N"], 3);
    let v = json(&["eval-formula", CATALOG, "kummer", "--q", "7"]);
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    // the image and elimination outputs are loadable bundles that evaluate like their sources
    let v = json(&["image", CATALOG, "square", "gm_top", "--case", "finite-etale"]);
    let b = Bundle::from_json(&v["bundle"]).unwrap();
    let k = diffqe::points::DiffField::from_q(7, 1).unwrap();
    let pts = b.stratification("image").unwrap().evaluate(&k, 1 << 20).unwrap().points;
    assert_eq!(pts.len(), 3);
    let v = json(&["qe", CATALOG, "kummer", "--q", "7"]);
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    Bundle::from_json(&v["bundle"]).unwrap();
}

#[test]
fn out_flag_writes_the_result() {
    let dir = std::env::temp_dir().join(format!("diffqe-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("points.json");
    let (code, out) = run(&["points", CATALOG, "graph", "--q", "5", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), out);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bundle_round_trip_is_byte_identical() {
    let b = catalog();
    assert_eq!(b.canonical(), CATALOG_JSON);
    let dir = std::env::temp_dir().join(format!("diffqe-bundle-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("catalog.json");
    b.save(&path).unwrap();
    assert_eq!(Bundle::load(&path).unwrap().canonical(), CATALOG_JSON);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn edited(f: impl FnOnce(&mut Value)) -> Result<Bundle, Error> {
    let mut v: Value = serde_json::from_str(CATALOG_JSON).unwrap();
    f(&mut v);
    Bundle::from_json(&v)
}

fn pointer(e: Error) -> String {
    match e {
        Error::Schema { pointer, .. } => pointer,
        other => panic!("expected a schema error, got {other}"),
    }
}

#[test]
fn schema_errors_name_the_location() {
    let e = edited(|v| v["stratifications"]["kummer_non"]["strata"][0]["cover"] = "nowhere".into()).unwrap_err();
    assert!(e.to_string().contains("nowhere"));
    assert_eq!(pointer(e), "/stratifications/kummer_non/strata/0/cover");
    let e = edited(|v| v["version"] = 7.into()).unwrap_err();
    assert_eq!(pointer(e), "/version");
    let e = edited(|v| v["presentations"]["graph"]["I1"][0] = "y0 - ".into()).unwrap_err();
    assert_eq!(pointer(e), "/presentations/graph/I1/0");
    let e = edited(|v| v["covers"]["kummer2"]["G0"]["table"][0][0] = "g".into()).unwrap_err();
    assert_eq!(pointer(e), "/covers/kummer2/G0/table");
    let e = edited(|v| v["morphisms"]["square"]["target"] = "graph".into()).unwrap_err();
    assert_eq!(pointer(e), "/morphisms/square");
    let e = edited(|v| v["presentations"]["graph"]["I0"] = serde_json::json!(["x0 - 1"])).unwrap_err();
    assert_eq!(pointer(e), "/presentations/graph");
}
