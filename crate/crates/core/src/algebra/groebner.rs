//! Buchberger's algorithm with the Gebauer–Möller pair criteria.

use std::cmp::Ordering;

use super::field::{Elem, Field};
use super::mpoly::{MPoly, Mono, MonoOrder, RingRef};

/// Polynomial with terms sorted in decreasing order, used inside the basis computation.
#[derive(Clone, Debug)]
pub(crate) struct SPoly {
    pub t: Vec<(Mono, Elem)>,
}

impl SPoly {
    pub fn from_mpoly(p: &MPoly, order: &MonoOrder) -> SPoly {
        let mut t: Vec<(Mono, Elem)> = p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        t.sort_by(|a, b| order.cmp(&b.0, &a.0));
        SPoly { t }
    }

    pub fn to_mpoly(&self, ring: &RingRef) -> MPoly {
        MPoly::from_terms(ring, self.t.iter().cloned())
    }

    pub fn is_zero(&self) -> bool {
        self.t.is_empty()
    }

    pub fn lm(&self) -> &Mono {
        &self.t[0].0
    }

    fn make_monic(&mut self, f: &Field) {
        if let Some((_, c)) = self.t.first() {
            if !f.is_one(c) {
                let inv = f.inv(c);
                for (_, a) in self.t.iter_mut() {
                    *a = f.mul(a, &inv);
                }
            }
        }
    }

    /// `self - c * m * g`, where the result stays sorted.
    fn sub_mul(&self, c: &Elem, m: &Mono, g: &SPoly, f: &Field, order: &MonoOrder) -> SPoly {
        let mut out = Vec::with_capacity(self.t.len() + g.t.len());
        let mut i = 0;
        let mut j = 0;
        let shifted: Vec<(Mono, Elem)> =
            g.t.iter().map(|(gm, gc)| (gm.mul(m), f.neg(&f.mul(gc, c)))).collect();
        while i < self.t.len() && j < shifted.len() {
            match order.cmp(&self.t[i].0, &shifted[j].0) {
                Ordering::Greater => {
                    out.push(self.t[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(shifted[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let s = f.add(&self.t[i].1, &shifted[j].1);
                    if !f.is_zero(&s) {
                        out.push((self.t[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.t[i..]);
        out.extend(shifted[j..].iter().cloned());
        SPoly { t: out }
    }
}

/// Full reduction of `p` modulo `basis` (a list of monic polynomials sorted under `order`).
pub(crate) fn reduce_full(p: &SPoly, basis: &[&SPoly], f: &Field, order: &MonoOrder) -> SPoly {
    let mut rest = p.clone();
    let mut done: Vec<(Mono, Elem)> = Vec::new();
    'outer: while !rest.is_zero() {
        let (m, c) = rest.t[0].clone();
        for g in basis {
            if g.lm().divides(&m) {
                let q = g.lm().div_into(&m);
                let coef = f.div(&c, &g.t[0].1);
                rest = rest.sub_mul(&coef, &q, g, f, order);
                continue 'outer;
            }
        }
        done.push((m, c));
        rest.t.remove(0);
    }
    SPoly { t: done }
}

fn spoly(a: &SPoly, b: &SPoly, f: &Field, order: &MonoOrder) -> SPoly {
    let l = a.lm().lcm(b.lm());
    let ma = a.lm().div_into(&l);
    let mb = b.lm().div_into(&l);
    let ca = f.inv(&a.t[0].1);
    let cb = f.inv(&b.t[0].1);
    let left = SPoly { t: vec![] }.sub_mul(&f.neg(&ca), &ma, a, f, order);
    left.sub_mul(&cb, &mb, b, f, order)
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Mono,
}

/// Reduced Gröbner basis of the ideal generated by `gens` under `order`.
///
/// The output is sorted by decreasing leading monomial and every element is monic.
pub fn groebner_basis(gens: &[MPoly], order: &MonoOrder) -> Vec<MPoly> {
    let Some(first) = gens.first() else { return vec![] };
    let ring = first.ring().clone();
    let f = ring.field.clone();
    let mut polys: Vec<SPoly> = Vec::new();
    let mut active: Vec<bool> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();

    let mut input: Vec<SPoly> = gens
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| {
            let mut s = SPoly::from_mpoly(g, order);
            s.make_monic(&f);
            s
        })
        .collect();
    input.sort_by(|a, b| order.cmp(a.lm(), b.lm()));

    for mut h in input {
        let basis: Vec<&SPoly> =
            polys.iter().zip(&active).filter(|(_, &a)| a).map(|(p, _)| p).collect();
        h = reduce_full(&h, &basis, &f, order);
        if h.is_zero() {
            continue;
        }
        h.make_monic(&f);
        update(&mut polys, &mut active, &mut pairs, h);
    }

    while !pairs.is_empty() {
        // normal strategy: least lcm first
        let mut best = 0;
        for k in 1..pairs.len() {
            if order.cmp(&pairs[k].lcm, &pairs[best].lcm) == Ordering::Less {
                best = k;
            }
        }
        let pr = pairs.swap_remove(best);
        let s = spoly(&polys[pr.i], &polys[pr.j], &f, order);
        let basis: Vec<&SPoly> =
            polys.iter().zip(&active).filter(|(_, &a)| a).map(|(p, _)| p).collect();
        let mut h = reduce_full(&s, &basis, &f, order);
        if h.is_zero() {
            continue;
        }
        h.make_monic(&f);
        if h.lm().is_one() {
            return vec![MPoly::one(&ring)];
        }
        update(&mut polys, &mut active, &mut pairs, h);
    }

    let g: Vec<SPoly> = polys.into_iter().zip(active).filter(|(_, a)| *a).map(|(p, _)| p).collect();
    interreduce(g, &f, order).iter().map(|p| p.to_mpoly(&ring)).collect()
}

fn update(polys: &mut Vec<SPoly>, active: &mut Vec<bool>, pairs: &mut Vec<Pair>, h: SPoly) {
    let hi = polys.len();
    let hlm = h.lm().clone();
    let cands: Vec<usize> = (0..polys.len()).filter(|&k| active[k]).collect();
    let lcms: Vec<Mono> = cands.iter().map(|&k| polys[k].lm().lcm(&hlm)).collect();

    // chain criterion among the new pairs
    let mut keep = vec![true; cands.len()];
    for a in 0..cands.len() {
        let coprime = polys[cands[a]].lm().coprime(&hlm);
        if coprime {
            continue;
        }
        for b in 0..cands.len() {
            if a == b || !keep[b] {
                continue;
            }
            if lcms[b].divides(&lcms[a]) && (lcms[b] != lcms[a] || b < a) {
                keep[a] = false;
                break;
            }
        }
    }
    // drop coprime pairs (product criterion), after they served in the chain test
    let mut new_pairs = Vec::new();
    for a in 0..cands.len() {
        if keep[a] && !polys[cands[a]].lm().coprime(&hlm) {
            new_pairs.push(Pair { i: cands[a], j: hi, lcm: lcms[a].clone() });
        }
    }
    // old pairs made redundant by h
    pairs.retain(|pr| {
        let li = polys[pr.i].lm().lcm(&hlm);
        let lj = polys[pr.j].lm().lcm(&hlm);
        !(hlm.divides(&pr.lcm) && li != pr.lcm && lj != pr.lcm)
    });
    pairs.extend(new_pairs);
    for k in 0..polys.len() {
        if active[k] && hlm.divides(polys[k].lm()) {
            active[k] = false;
        }
    }
    polys.push(h);
    active.push(true);
}

fn interreduce(mut g: Vec<SPoly>, f: &Field, order: &MonoOrder) -> Vec<SPoly> {
    g.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    let mut minimal: Vec<SPoly> = Vec::new();
    for p in g {
        if !minimal.iter().any(|q| q.lm().divides(p.lm())) {
            minimal.retain(|q| !p.lm().divides(q.lm()));
            minimal.push(p);
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<&SPoly> =
            minimal.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, p)| p).collect();
        let mut r = reduce_full(&minimal[k], &others, f, order);
        r.make_monic(f);
        out.push(r);
    }
    out.sort_by(|a, b| order.cmp(b.lm(), a.lm()));
    out
}

/// Normal form of `p` with respect to a Gröbner basis.
pub fn normal_form(p: &MPoly, basis: &[MPoly], order: &MonoOrder) -> MPoly {
    let f = p.field().clone();
    let b: Vec<SPoly> = basis.iter().map(|g| SPoly::from_mpoly(g, order)).collect();
    let refs: Vec<&SPoly> = b.iter().collect();
    reduce_full(&SPoly::from_mpoly(p, order), &refs, &f, order).to_mpoly(p.ring())
}

/// Leading monomial under `order`.
pub fn leading_monomial(p: &MPoly, order: &MonoOrder) -> Option<Mono> {
    p.leading(order).map(|(m, _)| m.clone())
}

/// Checks that every S-polynomial of `basis` reduces to zero.
pub fn is_groebner(basis: &[MPoly], order: &MonoOrder) -> bool {
    let Some(first) = basis.first() else { return true };
    let f = first.field().clone();
    let b: Vec<SPoly> = basis
        .iter()
        .map(|g| {
            let mut s = SPoly::from_mpoly(g, order);
            s.make_monic(&f);
            s
        })
        .collect();
    let refs: Vec<&SPoly> = b.iter().collect();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            let s = spoly(&b[i], &b[j], &f, order);
            if !reduce_full(&s, &refs, &f, order).is_zero() {
                return false;
            }
        }
    }
    true
}

/// Whether a basis is reduced: monic, and no term of any element divisible by another leading monomial.
pub fn is_reduced(basis: &[MPoly], order: &MonoOrder) -> bool {
    let lms: Vec<Mono> = basis.iter().filter_map(|g| leading_monomial(g, order)).collect();
    for (i, g) in basis.iter().enumerate() {
        if !g.field().is_one(&g.lc(order)) {
            return false;
        }
        for (m, _) in g.terms() {
            for (j, l) in lms.iter().enumerate() {
                if i != j && l.divides(m) {
                    return false;
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::mpoly::Ring;

    fn ring(field: Field, vars: &[&str]) -> RingRef {
        Ring::new(field, vars.iter().map(|s| s.to_string()).collect())
    }

    fn polys(r: &RingRef, s: &[&str]) -> Vec<MPoly> {
        s.iter().map(|x| MPoly::parse(r, x).unwrap()).collect()
    }

    #[test]
    fn already_reduced() {
        let r = ring(Field::Rationals, &["x", "y"]);
        let g = groebner_basis(&polys(&r, &["x", "y"]), &MonoOrder::Lex);
        assert_eq!(g, polys(&r, &["x", "y"]));
    }

    #[test]
    fn y_cubed_appears() {
        // S(x^2+y^2, xy) = y*(x^2+y^2) - x*(xy) = y^3
        let r = ring(Field::Rationals, &["x", "y"]);
        let g = groebner_basis(&polys(&r, &["x^2 + y^2", "x*y"]), &MonoOrder::Lex);
        assert!(g.contains(&MPoly::parse(&r, "y^3").unwrap()));
        assert!(is_groebner(&g, &MonoOrder::Lex));
        assert!(is_reduced(&g, &MonoOrder::Lex));
    }

    #[test]
    fn unit_ideal() {
        let r = ring(Field::Prime(5), &["x", "y"]);
        let g = groebner_basis(&polys(&r, &["x*y - 1", "x"]), &MonoOrder::GrevLex);
        assert_eq!(g, vec![MPoly::one(&r)]);
    }

    #[test]
    fn cyclic3_over_q() {
        let r = ring(Field::Rationals, &["a", "b", "c"]);
        let gens = polys(&r, &["a + b + c", "a*b + b*c + c*a", "a*b*c - 1"]);
        for order in [MonoOrder::Lex, MonoOrder::GrevLex] {
            let g = groebner_basis(&gens, &order);
            assert!(is_groebner(&g, &order));
            assert!(is_reduced(&g, &order));
            for p in &gens {
                assert!(normal_form(p, &g, &order).is_zero());
            }
        }
        let g = groebner_basis(&gens, &MonoOrder::Lex);
        assert!(g.contains(&MPoly::parse(&r, "c^3 - 1").unwrap()));
    }
}
