//! Relative algebraic closure in a presented tower of function fields.

use super::decompose::{degree_over, minimal_primes};
use super::field::Field;
use super::ideal::Ideal;
use super::mpoly::{MPoly, Ring, RingRef};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub enum GeneratorKind {
    Transcendental,
    /// Annihilating polynomial, in the base variables, earlier generators and this one.
    Algebraic(String),
}

#[derive(Clone, Debug)]
pub struct TowerGenerator {
    pub name: String,
    pub kind: GeneratorKind,
}

/// `k(Y) ⊆ k(Z)` with `k(Y)` purely transcendental on `base_vars` and `k(Z)` generated by
/// `generators` in order.
#[derive(Clone, Debug)]
pub struct FunctionFieldTower {
    pub field: Field,
    pub base_vars: Vec<String>,
    pub generators: Vec<TowerGenerator>,
}

/// `L = k(Y)(generators)`, presented by `ideal` in `k[Y, generators]`.
#[derive(Clone, Debug)]
pub struct RelativeClosure {
    pub ring: RingRef,
    pub generators: Vec<String>,
    pub ideal: Ideal,
    pub degree: usize,
}

/// The elements of `k(Z)` algebraic over `k(Y)`.
///
/// Algebraic generators are kept when their polynomial involves only the base and earlier
/// algebraic generators; each is checked to stay irreducible over the field built so far.
pub fn relative_algebraic_closure(t: &FunctionFieldTower) -> Result<RelativeClosure> {
    let mut names: Vec<String> = t.base_vars.clone();
    names.extend(t.generators.iter().map(|g| g.name.clone()));
    let full = Ring::new(t.field.clone(), names);
    let nb = t.base_vars.len();
    let mut alg: Vec<usize> = Vec::new();
    let mut trans: Vec<usize> = Vec::new();
    let mut polys: Vec<MPoly> = Vec::new();
    for (k, g) in t.generators.iter().enumerate() {
        let idx = nb + k;
        match &g.kind {
            GeneratorKind::Transcendental => trans.push(idx),
            GeneratorKind::Algebraic(text) => {
                let f = MPoly::parse(&full, text)?;
                if !f.involves(idx) {
                    return Err(Error::PresentationInsufficient(format!(
                        "polynomial for {} does not involve it",
                        g.name
                    )));
                }
                if let Some(&bad) = f.support().iter().find(|&&v| v > idx || trans.contains(&v)) {
                    return Err(Error::PresentationInsufficient(format!(
                        "polynomial for {} involves {}, whose algebraicity over the base is not presented",
                        g.name, full.vars[bad]
                    )));
                }
                alg.push(idx);
                polys.push(f);
            }
        }
    }
    let mut keep: Vec<String> = t.base_vars.clone();
    keep.extend(alg.iter().map(|&i| full.vars[i].clone()));
    let ring = Ring::new(t.field.clone(), keep);
    let map: Vec<usize> = (0..full.nvars())
        .map(|i| if i < nb { i } else { alg.iter().position(|&a| a == i).map(|p| nb + p).unwrap_or(usize::MAX) })
        .collect();
    let base: Vec<usize> = (0..nb).collect();
    let mut ideal = Ideal::zero(&ring);
    for (j, f) in polys.iter().enumerate() {
        let fr = f.rename(&ring, &map);
        let next = ideal.add_gens(&[fr]);
        let comps = minimal_primes(&next)?;
        if comps.len() != 1 || !next.contains_ideal(&comps[0]) {
            return Err(Error::PresentationInsufficient(format!(
                "the polynomial for {} is not irreducible over the preceding field",
                ring.vars[nb + j]
            )));
        }
        ideal = next;
    }
    let degree = if alg.is_empty() {
        1
    } else {
        degree_over(&ideal, &base)
            .ok_or_else(|| Error::PresentationInsufficient("closure is not finite over the base".into()))?
    };
    Ok(RelativeClosure {
        generators: alg.iter().map(|&i| full.vars[i].clone()).collect(),
        ring,
        ideal: ideal.with_basis(),
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(name: &str, kind: Option<&str>) -> TowerGenerator {
        TowerGenerator {
            name: name.into(),
            kind: match kind {
                None => GeneratorKind::Transcendental,
                Some(f) => GeneratorKind::Algebraic(f.into()),
            },
        }
    }

    #[test]
    fn purely_transcendental() {
        let t = FunctionFieldTower {
            field: Field::Rationals,
            base_vars: vec!["t".into()],
            generators: vec![gen("u", None)],
        };
        let l = relative_algebraic_closure(&t).unwrap();
        assert_eq!(l.degree, 1);
        assert!(l.generators.is_empty());
    }

    #[test]
    fn square_root_of_the_parameter() {
        let t = FunctionFieldTower {
            field: Field::Prime(5),
            base_vars: vec!["t".into()],
            generators: vec![gen("s", Some("s^2 - t"))],
        };
        let l = relative_algebraic_closure(&t).unwrap();
        assert_eq!(l.degree, 2);
        assert_eq!(l.generators, vec!["s".to_string()]);
    }

    #[test]
    fn constant_extension_and_transcendental() {
        let t = FunctionFieldTower {
            field: Field::Rationals,
            base_vars: vec!["t".into()],
            generators: vec![gen("w", Some("w^2 - 2")), gen("u", None)],
        };
        let l = relative_algebraic_closure(&t).unwrap();
        assert_eq!(l.degree, 2);
        assert_eq!(l.generators, vec!["w".to_string()]);
    }

    #[test]
    fn insufficient_presentations() {
        let t = FunctionFieldTower {
            field: Field::Rationals,
            base_vars: vec!["t".into()],
            generators: vec![gen("u", None), gen("a", Some("a^2 - u"))],
        };
        assert!(matches!(relative_algebraic_closure(&t), Err(Error::PresentationInsufficient(_))));
        // w^2 - 4 = (w - 2)(w + 2) does not determine w
        let t = FunctionFieldTower {
            field: Field::Rationals,
            base_vars: vec!["t".into()],
            generators: vec![gen("w", Some("w^2 - 4"))],
        };
        assert!(matches!(relative_algebraic_closure(&t), Err(Error::PresentationInsufficient(_))));
    }
}
