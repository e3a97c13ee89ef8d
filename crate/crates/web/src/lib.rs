//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes object names from the built-in catalog (or formula text) and returns a
//! JSON string; errors come back as `{"error": ...}` rather than exceptions.

use diffqe::algebra::Field;
use diffqe::catalog::catalog;
use diffqe::logic::{parse, Oracle};
use diffqe::points::{enumerate_realisations, render_points, DiffField, DEFAULT_BUDGET};
use diffqe::qe::quantifier_eliminate;
use diffqe::Result;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Budget for the page: small enough to keep the tab responsive.
const BUDGET: u128 = DEFAULT_BUDGET / 8;

fn wrap(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": { "stage": e.stage(), "detail": e.to_string() } }).to_string(),
    }
}

/// Names of the catalog objects, grouped by kind.
#[wasm_bindgen]
pub fn catalog_names() -> String {
    let b = catalog();
    json!({
        "presentations": b.presentations.keys().collect::<Vec<_>>(),
        "covers": b.covers.keys().collect::<Vec<_>>(),
        "formulas": b.formulas.iter().map(|(k, f)| json!({ "name": k, "text": f.to_string() })).collect::<Vec<_>>(),
    })
    .to_string()
}

pub fn realisations_json(presentation: &str, q: u64, m: u32) -> Result<Value> {
    let b = catalog();
    let p = b.presentation(presentation)?;
    let k = DiffField::from_q(q, m)?;
    let pts = enumerate_realisations(p, &k, BUDGET)?;
    Ok(json!({ "vars": p.x.vars, "points": render_points(&k, &pts)? }))
}

/// Realisations of a catalog presentation over F_{q^m} with σ the q-power map.
#[wasm_bindgen]
pub fn realisations(presentation: &str, q: u32, m: u32) -> String {
    wrap(realisations_json(presentation, q.into(), m))
}

pub fn frobenius_classes_json(cover: &str, q: u64, m: u32) -> Result<Value> {
    let b = catalog();
    let c = b.cover(cover)?;
    let k = DiffField::from_q(q, m)?;
    k.check_base(&c.base.field)?;
    let label = |g: usize| c.g0.labels[g].clone();
    let pts = enumerate_realisations(&c.base, &k, BUDGET)?;
    let rendered = render_points(&k, &pts)?;
    let mut rows = Vec::new();
    for (x, shown) in pts.iter().zip(rendered) {
        let row = match c.local_frobenius(&k, x) {
            Ok(fr) => json!({
                "point": shown,
                "element": label(fr.element),
                "class": fr.class.iter().map(|&g| label(g)).collect::<Vec<_>>(),
            }),
            Err(e) => json!({ "point": shown, "error": e.to_string() }),
        };
        rows.push(row);
    }
    let classes: Vec<Vec<String>> =
        c.twisted_classes().iter().map(|s| s.iter().map(|&g| label(g)).collect()).collect();
    Ok(json!({ "group": c.g0.labels, "classes": classes, "points": rows }))
}

/// Frobenius element and twisted class at every base point of a catalog cover.
#[wasm_bindgen]
pub fn frobenius_classes(cover: &str, q: u32, m: u32) -> String {
    wrap(frobenius_classes_json(cover, q.into(), m))
}

pub fn formula_json(text: &str, q: u64, m: u32, extension: u32) -> Result<Value> {
    let f = parse(text)?;
    let k = DiffField::from_q(q, m)?;
    let vars = f.free_vars();
    let brute = Oracle::with_extension(&k, extension, BUDGET)?.realisations(&f, &vars)?;
    let mut out = json!({ "formula": f.to_string(), "vars": vars, "oracle": render_points(&k, &brute)? });
    match quantifier_eliminate(&f, &Field::Rationals, Some(&vars)) {
        Ok(r) => {
            let pts = r.realisations(&k, BUDGET)?;
            out["eliminated"] = json!(render_points(&k, &pts)?);
            out["strata"] = json!(r.stratification.strata.len());
            out["agree"] = json!(pts == brute);
        }
        Err(e) => out["eliminated_error"] = json!(e.to_string()),
    }
    Ok(out)
}

/// Evaluate a formula by brute force over F_{q^{m·extension}} and by quantifier elimination.
#[wasm_bindgen]
pub fn evaluate_formula(text: &str, q: u32, m: u32, extension: u32) -> String {
    wrap(formula_json(text, q.into(), m, extension))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_points() {
        let v: Value = serde_json::from_str(&realisations("graph", 5, 1)).unwrap();
        // x^5 = x^2 has only 0 and 1 in F_5
        assert_eq!(v["points"], json!([["0"], ["1"]]));
    }

    #[test]
    fn kummer_classes() {
        let v = frobenius_classes_json("kummer2", 7, 1).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 6);
        let non = pts.iter().filter(|p| p["element"] != "e").count();
        assert_eq!(non, 3);
    }

    #[test]
    fn formula_agrees() {
        let v = formula_json("E z. z*z - v1 = 0 & s(z) - z = 0", 7, 1, 1).unwrap();
        assert_eq!(v["oracle"].as_array().unwrap().len(), 4);
        assert_eq!(v["agree"], true);
    }

    #[test]
    fn errors_are_json() {
        let v: Value = serde_json::from_str(&realisations("missing", 5, 1)).unwrap();
        assert!(v["error"]["detail"].is_string());
        let v: Value = serde_json::from_str(&evaluate_formula("E z.", 5, 1, 1)).unwrap();
        assert!(v["error"].is_object());
    }
}
