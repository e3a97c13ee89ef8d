//! The built-in catalog of small instances used by the acceptance suite and the CLI examples.

use crate::bundle::Bundle;
use crate::points::DiffField;
use crate::presentation::Presentation;

pub const CATALOG_JSON: &str = include_str!("../catalog/catalog.json");

pub fn catalog() -> Bundle {
    Bundle::parse(CATALOG_JSON).expect("the built-in catalog loads")
}

/// Presentations checked by decomposition soundness.
pub const DECOMPOSITION: &[&str] = &["graph", "fixed_zero", "shift", "reducible", "empty", "swap", "square_chain"];

/// Stratification pairs checked by the Boolean laws.
pub const BOOLEAN_PAIRS: &[(&str, &str)] =
    &[("kummer_non", "kummer_twisted"), ("kummer_res", "mixed"), ("cubic_res", "cubic_non")];

/// Formulas in the supported fragment, with the least extension degree their bound
/// variables need beyond the witness extension of the result.
pub const QE_FORMULAS: &[(&str, u32)] = &[
    ("kummer", 1),
    ("twisted_kummer", 1),
    ("quantifier_free", 1),
    ("top", 1),
    ("boolean", 1),
    ("non_residue", 1),
    ("cube_root", 1),
    ("any_root", 2),
    ("inverse_orbit", 1),
];

/// Fields of the grid over which `p` can be evaluated.
pub fn grid_fields(p: &Presentation, qs: &[u64], ms: &[u32]) -> Vec<DiffField> {
    let mut out = Vec::new();
    for &q in qs {
        for &m in ms {
            if let Ok(k) = DiffField::from_q(q, m) {
                if k.check_base(&p.field).is_ok() {
                    out.push(k);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_canonical() {
        let b = catalog();
        let again = Bundle::parse(&b.canonical()).unwrap();
        assert_eq!(again.canonical(), b.canonical());
        assert_eq!(CATALOG_JSON, b.canonical());
        assert_eq!(b.presentations.len(), 11);
        assert_eq!(b.covers.len(), 4);
        for name in DECOMPOSITION {
            b.presentation(name).unwrap();
        }
        for (a, c) in BOOLEAN_PAIRS {
            b.stratification(a).unwrap();
            b.stratification(c).unwrap();
        }
        for (f, _) in QE_FORMULAS {
            b.formula(f).unwrap();
        }
    }
}
