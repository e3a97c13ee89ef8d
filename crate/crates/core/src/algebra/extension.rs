//! Embeddings between finite fields and splitting fields of univariate polynomials.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::factor::{factor_univariate, roots_fq};
use super::field::{Elem, Field};
use super::mpoly::{MPoly, RingRef};
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// A field homomorphism `from -> to`, determined by the image of the generator of `from`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub from: Field,
    pub to: Field,
    pub gen_image: Elem,
}

fn cache() -> &'static Mutex<HashMap<(Field, Field), Elem>> {
    static C: OnceLock<Mutex<HashMap<(Field, Field), Elem>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

impl Embedding {
    pub fn identity(f: &Field) -> Embedding {
        Embedding { from: f.clone(), to: f.clone(), gen_image: f.generator() }
    }

    /// The embedding sending the generator of `from` to the least root (by index) of its
    /// modulus in `to`. Deterministic, so compositions of such embeddings are compatible
    /// whenever the target is fixed.
    pub fn new(from: &Field, to: &Field) -> Result<Embedding> {
        if from == to {
            return Ok(Embedding::identity(from));
        }
        match (from, to) {
            (Field::Rationals, Field::Rationals) => Ok(Embedding::identity(from)),
            (Field::Prime(p), t) if t.characteristic() == *p => {
                Ok(Embedding { from: from.clone(), to: to.clone(), gen_image: to.one() })
            }
            (Field::Extension { p, modulus }, t) if t.characteristic() == *p => {
                let k = modulus.len() - 1;
                if t.degree() % k != 0 {
                    return Err(Error::Field(format!("{from} does not embed in {to}")));
                }
                let key = (from.clone(), to.clone());
                if let Some(g) = cache().lock().unwrap().get(&key) {
                    return Ok(Embedding { from: from.clone(), to: to.clone(), gen_image: g.clone() });
                }
                let m = UPoly::new(t, modulus.iter().map(|&c| t.from_i64(c as i64)).collect());
                let roots = roots_fq(&m);
                let g = roots
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::Field(format!("no root of the modulus of {from} in {to}")))?;
                cache().lock().unwrap().insert(key, g.clone());
                Ok(Embedding { from: from.clone(), to: to.clone(), gen_image: g })
            }
            _ => Err(Error::Field(format!("{from} does not embed in {to}"))),
        }
    }

    pub fn map(&self, a: &Elem) -> Elem {
        match a {
            Elem::Q(_) => a.clone(),
            Elem::P(x) => self.to.from_i64(*x as i64),
            Elem::E(v) => {
                if self.from == self.to {
                    return a.clone();
                }
                let t = &self.to;
                let mut acc = t.zero();
                let mut pw = t.one();
                for &c in v {
                    if c != 0 {
                        acc = t.add(&acc, &t.mul(&pw, &t.from_i64(c as i64)));
                    }
                    pw = t.mul(&pw, &self.gen_image);
                }
                acc
            }
        }
    }

    pub fn map_poly(&self, f: &MPoly, target: &RingRef) -> MPoly {
        f.map_coeffs(target, |c| Ok(self.map(c))).expect("embedding is total")
    }

    pub fn map_upoly(&self, f: &UPoly) -> UPoly {
        f.map(&self.to, |c| self.map(c))
    }

    /// Preimage of an element lying in the image, by exhaustive search of `from` (small fields).
    pub fn preimage(&self, b: &Elem) -> Option<Elem> {
        let ord = self.from.order()?;
        if ord > 1 << 22 {
            return None;
        }
        (0..ord as u64).map(|i| self.from.elem_from_index(i)).find(|a| self.map(a) == *b)
    }
}

/// A finite extension `base(root)` with `min_poly(root) = 0`, realized as a concrete field.
#[derive(Clone, Debug)]
pub struct FieldExtensionDesc {
    pub base: Field,
    pub min_poly: UPoly,
    pub field: Field,
    pub embedding: Embedding,
    pub root: Elem,
}

/// Splitting field of `f` over a finite field, with all roots (with multiplicity once each).
#[derive(Clone, Debug)]
pub struct SplittingField {
    pub tower: Vec<FieldExtensionDesc>,
    pub field: Field,
    pub embedding: Embedding,
    pub roots: Vec<Elem>,
}

/// Splitting field of a nonzero polynomial. Over a finite field this is a single extension
/// of degree the lcm of the irreducible factor degrees; over the rationals only polynomials
/// splitting into linear factors are supported.
pub fn splitting_field(f: &UPoly) -> Result<SplittingField> {
    let fac = factor_univariate(f)?;
    let base = f.field.clone();
    match &base {
        Field::Rationals => {
            if fac.factors.iter().any(|(g, _)| g.deg() > 1) {
                return Err(Error::unsupported(
                    "splitting-field",
                    "number-field towers beyond the rationals are not implemented",
                ));
            }
            let roots =
                fac.factors.iter().map(|(g, _)| base.neg(&base.div(&g.coeff(0), &g.coeff(1)))).collect();
            Ok(SplittingField {
                tower: vec![],
                field: base.clone(),
                embedding: Embedding::identity(&base),
                roots,
            })
        }
        _ => {
            let mut l = 1usize;
            for (g, _) in &fac.factors {
                l = num_integer::lcm(l, g.deg() as usize);
            }
            let big = Field::galois(base.characteristic(), base.degree() * l)?;
            let emb = Embedding::new(&base, &big)?;
            let mut tower = Vec::new();
            for (g, _) in fac.factors.iter().filter(|(g, _)| g.deg() > 1) {
                let r = roots_fq(&emb.map_upoly(g));
                tower.push(FieldExtensionDesc {
                    base: base.clone(),
                    min_poly: g.clone(),
                    field: big.clone(),
                    embedding: emb.clone(),
                    root: r[0].clone(),
                });
            }
            let roots = roots_fq(&emb.map_upoly(f));
            Ok(SplittingField { tower, field: big, embedding: emb, roots })
        }
    }
}

/// Coefficient map of `f` into the field of `target`, which has the same variables.
pub fn coerce_poly(f: &MPoly, target: &RingRef) -> Result<MPoly> {
    let from = f.field().clone();
    let to = target.field.clone();
    if from == to {
        return f.map_coeffs(target, |c| Ok(c.clone()));
    }
    match &from {
        Field::Rationals => f.map_coeffs(target, |c| to.from_rational(from.as_rational(c).unwrap())),
        _ => {
            let e = Embedding::new(&from, &to)?;
            f.map_coeffs(target, |c| Ok(e.map(c)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_is_a_homomorphism() {
        let f9: Field = "F9".parse().unwrap();
        let f81: Field = "F81".parse().unwrap();
        let e = Embedding::new(&f9, &f81).unwrap();
        for a in f9.elements() {
            for b in f9.elements() {
                assert_eq!(e.map(&f9.mul(&a, &b)), f81.mul(&e.map(&a), &e.map(&b)));
                assert_eq!(e.map(&f9.add(&a, &b)), f81.add(&e.map(&a), &e.map(&b)));
            }
        }
        assert!(Embedding::new(&f9, &"F27".parse().unwrap()).is_err());
    }

    #[test]
    fn splitting_field_of_cubic() {
        // T^3 - 2 over F5: 5 = 2 mod 3, so one root in F5 and the rest in F25
        let f5 = Field::Prime(5);
        let f = UPoly::from_i64s(&f5, &[-2, 0, 0, 1]);
        let s = splitting_field(&f).unwrap();
        assert_eq!(s.field.order(), Some(25));
        assert_eq!(s.roots.len(), 3);
        for r in &s.roots {
            assert!(s.field.is_zero(&s.embedding.map_upoly(&f).eval(r)));
        }
        // the cubes mod 7 are {0, 1, 6}, so T^3 - 2 is irreducible over F7
        let f7 = Field::Prime(7);
        let s = splitting_field(&UPoly::from_i64s(&f7, &[-2, 0, 0, 1])).unwrap();
        assert_eq!(s.field.order(), Some(343));
        assert_eq!(s.roots.len(), 3);
    }
}
