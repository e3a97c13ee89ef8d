//! Polynomial ideals with a write-once cached Gröbner basis.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::{Arc, OnceLock};

use super::field::Field;
use super::groebner::{groebner_basis, leading_monomial, normal_form};
use super::mpoly::{MPoly, Mono, MonoOrder, Ring, RingRef};
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct Ideal {
    ring: RingRef,
    gens: Vec<MPoly>,
    gb: Arc<OnceLock<Vec<MPoly>>>,
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{:?}", self.gens)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g: Vec<String> = self.gens.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", g.join(", "))
    }
}

impl Ideal {
    pub fn new(ring: &RingRef, gens: Vec<MPoly>) -> Ideal {
        let gens: Vec<MPoly> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        for g in &gens {
            assert!(**g.ring() == **ring, "generator from a different ring");
        }
        Ideal { ring: ring.clone(), gens, gb: Arc::new(OnceLock::new()) }
    }

    pub fn zero(ring: &RingRef) -> Ideal {
        Ideal::new(ring, vec![])
    }

    pub fn unit(ring: &RingRef) -> Ideal {
        Ideal::new(ring, vec![MPoly::one(ring)])
    }

    pub fn parse(ring: &RingRef, gens: &[impl AsRef<str>]) -> Result<Ideal> {
        let g = gens.iter().map(|s| MPoly::parse(ring, s.as_ref())).collect::<Result<Vec<_>>>()?;
        Ok(Ideal::new(ring, g))
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn field(&self) -> &Field {
        &self.ring.field
    }

    pub fn gens(&self) -> &[MPoly] {
        &self.gens
    }

    /// Reduced Gröbner basis under degree reverse lexicographic order (cached).
    pub fn gb(&self) -> &[MPoly] {
        self.gb.get_or_init(|| groebner_basis(&self.gens, &MonoOrder::GrevLex))
    }

    /// Reduced Gröbner basis under an arbitrary order (not cached).
    pub fn groebner(&self, order: &MonoOrder) -> Vec<MPoly> {
        if *order == MonoOrder::GrevLex {
            return self.gb().to_vec();
        }
        groebner_basis(&self.gens, order)
    }

    /// The ideal generated by its own reduced basis, with the cache filled.
    pub fn with_basis(&self) -> Ideal {
        let g = self.gb().to_vec();
        let cell = OnceLock::new();
        let _ = cell.set(g.clone());
        Ideal { ring: self.ring.clone(), gens: g, gb: Arc::new(cell) }
    }

    pub fn is_unit(&self) -> bool {
        self.gb().iter().any(|g| g.is_constant() && !g.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn reduce(&self, f: &MPoly) -> MPoly {
        normal_form(f, self.gb(), &MonoOrder::GrevLex)
    }

    pub fn contains(&self, f: &MPoly) -> bool {
        self.reduce(f).is_zero()
    }

    /// Membership with a ring check.
    pub fn member(&self, f: &MPoly) -> Result<bool> {
        self.check(f)?;
        Ok(self.reduce(f).is_zero())
    }

    fn check(&self, f: &MPoly) -> Result<()> {
        if **f.ring() != *self.ring {
            return Err(Error::VariableMismatch(format!(
                "polynomial over {:?} tested against ideal over {:?}",
                f.ring().vars,
                self.ring.vars
            )));
        }
        Ok(())
    }

    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        other.gens.iter().all(|g| self.contains(g))
    }

    pub fn equals(&self, other: &Ideal) -> bool {
        self.contains_ideal(other) && other.contains_ideal(self)
    }

    pub fn add(&self, other: &Ideal) -> Ideal {
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().cloned());
        Ideal::new(&self.ring, g)
    }

    pub fn add_gens(&self, extra: &[MPoly]) -> Ideal {
        let mut g = self.gens.clone();
        g.extend(extra.iter().cloned());
        Ideal::new(&self.ring, g)
    }

    pub fn mul(&self, other: &Ideal) -> Ideal {
        let mut g = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                g.push(a.mul(b));
            }
        }
        Ideal::new(&self.ring, g)
    }

    /// Transport generators to another ring along a variable map.
    pub fn rename(&self, target: &RingRef, map: &[usize]) -> Ideal {
        Ideal::new(target, self.gens.iter().map(|g| g.rename(target, map)).collect())
    }

    pub fn embed_by_name(&self, target: &RingRef) -> Result<Ideal> {
        Ok(Ideal::new(
            target,
            self.gens.iter().map(|g| g.embed_by_name(target)).collect::<Result<Vec<_>>>()?,
        ))
    }

    /// `I ∩ k[keep]`, returned in the subring on the kept variables (in their original order).
    pub fn eliminate(&self, keep: &[usize]) -> Ideal {
        let n = self.ring.nvars();
        let keep_set: BTreeSet<usize> = keep.iter().copied().collect();
        let mask: Vec<bool> = (0..n).map(|i| !keep_set.contains(&i)).collect();
        let sub_vars: Vec<String> = keep_set.iter().map(|&i| self.ring.vars[i].clone()).collect();
        let sub = self.ring.with_vars(sub_vars);
        let mut pos = vec![0usize; n];
        for (k, &i) in keep_set.iter().enumerate() {
            pos[i] = k;
        }
        let g = groebner_basis(&self.gens, &MonoOrder::Elim(mask.clone()));
        let mut out = Vec::new();
        for p in g {
            if p.support().iter().all(|i| keep_set.contains(i)) {
                let map: Vec<usize> = (0..n).map(|i| pos[i]).collect();
                out.push(p.rename(&sub, &map));
            }
        }
        Ideal::new(&sub, out)
    }

    /// `I ∩ k[keep]` kept inside the same ambient ring.
    pub fn eliminate_in_place(&self, keep: &[usize]) -> Ideal {
        let n = self.ring.nvars();
        let mask: Vec<bool> = (0..n).map(|i| !keep.contains(&i)).collect();
        let g = groebner_basis(&self.gens, &MonoOrder::Elim(mask.clone()));
        Ideal::new(
            &self.ring,
            g.into_iter().filter(|p| p.support().iter().all(|i| !mask[*i])).collect(),
        )
    }

    /// Eliminate by variable names, result in the subring on the kept names.
    pub fn eliminate_names(&self, keep: &[&str]) -> Result<Ideal> {
        let idx = keep
            .iter()
            .map(|v| {
                self.ring
                    .var_index(v)
                    .ok_or_else(|| Error::VariableMismatch(format!("unknown variable `{v}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.eliminate(&idx))
    }

    /// Ring with one extra variable appended, plus the embedding of this ideal into it.
    fn extend_ring(&self, name: &str) -> (RingRef, Ideal) {
        let mut vars = self.ring.vars.clone();
        let mut nm = name.to_string();
        while vars.contains(&nm) {
            nm.push('_');
        }
        vars.push(nm);
        let big = Ring::new(self.ring.field.clone(), vars);
        let map: Vec<usize> = (0..self.ring.nvars()).collect();
        let i = self.rename(&big, &map);
        (big, i)
    }

    pub fn intersect(&self, other: &Ideal) -> Ideal {
        if self.is_zero() || other.is_zero() {
            return Ideal::zero(&self.ring);
        }
        let n = self.ring.nvars();
        let (big, a) = self.extend_ring("_t");
        let map: Vec<usize> = (0..n).collect();
        let b = other.rename(&big, &map);
        let t = MPoly::var(&big, n);
        let one_minus_t = MPoly::one(&big).sub(&t);
        let mut g: Vec<MPoly> = a.gens.iter().map(|p| p.mul(&t)).collect();
        g.extend(b.gens.iter().map(|p| p.mul(&one_minus_t)));
        let j = Ideal::new(&big, g);
        let e = j.eliminate(&map);
        e.rename(&self.ring, &map)
    }

    /// `I : f`
    pub fn quotient_poly(&self, f: &MPoly) -> Ideal {
        if f.is_zero() {
            return Ideal::unit(&self.ring);
        }
        let fi = Ideal::new(&self.ring, vec![f.clone()]);
        let inter = self.intersect(&fi);
        let g: Vec<MPoly> = inter
            .gens
            .iter()
            .map(|p| divide_exact(p, f).expect("element of (f) is divisible by f"))
            .collect();
        Ideal::new(&self.ring, g)
    }

    /// `I : J`
    pub fn quotient(&self, j: &Ideal) -> Ideal {
        let mut acc: Option<Ideal> = None;
        for g in &j.gens {
            let q = self.quotient_poly(g);
            acc = Some(match acc {
                None => q,
                Some(a) => a.intersect(&q),
            });
        }
        acc.unwrap_or_else(|| Ideal::unit(&self.ring))
    }

    /// `I : f^∞` via the Rabinowitsch trick.
    pub fn saturate_poly(&self, f: &MPoly) -> Ideal {
        if f.is_zero() {
            return Ideal::unit(&self.ring);
        }
        if f.is_constant() {
            return self.clone();
        }
        let n = self.ring.nvars();
        let (big, a) = self.extend_ring("_s");
        let map: Vec<usize> = (0..n).collect();
        let fb = f.rename(&big, &map);
        let s = MPoly::var(&big, n);
        let rab = MPoly::one(&big).sub(&s.mul(&fb));
        let j = a.add_gens(&[rab]);
        j.eliminate(&map).rename(&self.ring, &map)
    }

    /// `I : J^∞`
    pub fn saturate(&self, j: &Ideal) -> Ideal {
        let mut acc: Option<Ideal> = None;
        for g in &j.gens {
            let q = self.saturate_poly(g);
            acc = Some(match acc {
                None => q,
                Some(a) => a.intersect(&q),
            });
        }
        acc.unwrap_or_else(|| Ideal::unit(&self.ring))
    }

    /// Whether `f` lies in the radical of `I`.
    pub fn radical_contains(&self, f: &MPoly) -> bool {
        if f.is_zero() {
            return true;
        }
        let n = self.ring.nvars();
        let (big, a) = self.extend_ring("_r");
        let map: Vec<usize> = (0..n).collect();
        let fb = f.rename(&big, &map);
        let s = MPoly::var(&big, n);
        a.add_gens(&[MPoly::one(&big).sub(&s.mul(&fb))]).is_unit()
    }

    /// A maximal independent set of variables modulo `I`, from the leading monomials.
    pub fn independent_set(&self) -> Option<Vec<usize>> {
        if self.is_unit() {
            return None;
        }
        let n = self.ring.nvars();
        let lms: Vec<Mono> =
            self.gb().iter().filter_map(|g| leading_monomial(g, &MonoOrder::GrevLex)).collect();
        let mut best: Vec<usize> = Vec::new();
        // subsets enumerated by decreasing size, lexicographically, for determinism
        let mut found = false;
        for size in (0..=n).rev() {
            for subset in subsets(n, size) {
                let ok = lms.iter().all(|m| m.support().any(|i| !subset.contains(&i)));
                if ok {
                    best = subset;
                    found = true;
                    break;
                }
            }
            if found {
                break;
            }
        }
        Some(best)
    }

    /// Krull dimension of `V(I)`, `-1` for the empty variety.
    pub fn dimension(&self) -> i64 {
        match self.independent_set() {
            None => -1,
            Some(u) => u.len() as i64,
        }
    }

    /// Vector-space dimension of `k[x]/I` for zero-dimensional `I`.
    pub fn quotient_dimension(&self) -> Option<usize> {
        if self.is_unit() {
            return Some(0);
        }
        if self.dimension() != 0 {
            return None;
        }
        let lms: Vec<Mono> =
            self.gb().iter().filter_map(|g| leading_monomial(g, &MonoOrder::GrevLex)).collect();
        Some(count_standard(&lms, self.ring.nvars(), &(0..self.ring.nvars()).collect::<Vec<_>>()))
    }

    /// Generators written as strings, sorted; a canonical key for deterministic ordering.
    pub fn key(&self) -> String {
        let mut g: Vec<String> = self.gb().iter().map(|p| p.to_string()).collect();
        g.sort();
        g.join(",")
    }
}

/// Number of monomials in the variables `vars` not divisible by any of `lms`
/// (restricted to their `vars` components, with other variables required to be absent).
pub(crate) fn count_standard(lms: &[Mono], n: usize, vars: &[usize]) -> usize {
    // breadth-first over monomials; finite when the quotient is finite
    let mut count = 0usize;
    let mut frontier = vec![Mono::one(n)];
    let mut seen = BTreeSet::new();
    seen.insert(Mono::one(n));
    while let Some(m) = frontier.pop() {
        if lms.iter().any(|l| l.divides(&m)) {
            continue;
        }
        count += 1;
        if count > 1_000_000 {
            break;
        }
        for &v in vars {
            let mut e = m.clone();
            e.0[v] += 1;
            if seen.insert(e.clone()) {
                frontier.push(e);
            }
        }
    }
    count
}

pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Exact multivariate division; `None` when `d` does not divide `p`.
pub fn divide_exact(p: &MPoly, d: &MPoly) -> Option<MPoly> {
    let order = MonoOrder::GrevLex;
    let f = p.field().clone();
    let (dm, dc) = d.leading(&order)?;
    let (dm, dc) = (dm.clone(), dc.clone());
    let mut rest = p.clone();
    let mut q = MPoly::zero(p.ring());
    while !rest.is_zero() {
        let (m, c) = rest.leading(&order).map(|(m, c)| (m.clone(), c.clone())).unwrap();
        if !dm.divides(&m) {
            return None;
        }
        let mono = dm.div_into(&m);
        let coef = f.div(&c, &dc);
        rest = rest.sub(&d.mul_term(&mono, &coef));
        q = q.add(&MPoly::monomial(p.ring(), mono, coef));
    }
    Some(q)
}
