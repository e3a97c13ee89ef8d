//! Sparse multivariate polynomials over a [`Field`] with named variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::field::{Elem, Field};
use crate::error::{Error, Result};

/// A polynomial ring: coefficient field plus an ordered list of variable names.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    pub field: Field,
    pub vars: Vec<String>,
}

pub type RingRef = Arc<Ring>;

impl Ring {
    pub fn new(field: Field, vars: Vec<String>) -> RingRef {
        Arc::new(Ring { field, vars })
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Ring with the same field and different variables.
    pub fn with_vars(&self, vars: Vec<String>) -> RingRef {
        Ring::new(self.field.clone(), vars)
    }
}

/// Exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn one(n: usize) -> Mono {
        Mono(vec![0; n])
    }

    pub fn var(n: usize, i: usize, e: u16) -> Mono {
        let mut v = vec![0; n];
        v[i] = e;
        Mono(v)
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.0[i]
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, o: &Mono) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming divisibility.
    pub fn div_into(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| b - a).collect())
    }

    pub fn lcm(&self, o: &Mono) -> Mono {
        Mono(self.0.iter().zip(&o.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, o: &Mono) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, _)| i)
    }
}

/// Monomial orders.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonoOrder {
    /// Pure lexicographic, variable 0 largest.
    Lex,
    /// Degree reverse lexicographic.
    GrevLex,
    /// Block order: the masked variables are compared first (grevlex), then the rest (grevlex).
    Elim(Vec<bool>),
}

fn grevlex_cmp(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

fn grevlex_masked(a: &[u16], b: &[u16], mask: &[bool], want: bool) -> Ordering {
    let deg = |m: &[u16]| -> u32 {
        m.iter().zip(mask).filter(|(_, &k)| k == want).map(|(e, _)| *e as u32).sum()
    };
    match deg(a).cmp(&deg(b)) {
        Ordering::Equal => {}
        o => return o,
    }
    for i in (0..a.len()).rev() {
        if mask[i] != want {
            continue;
        }
        match a[i].cmp(&b[i]) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

impl MonoOrder {
    pub fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        match self {
            MonoOrder::Lex => a.0.cmp(&b.0),
            MonoOrder::GrevLex => grevlex_cmp(&a.0, &b.0),
            MonoOrder::Elim(mask) => match grevlex_masked(&a.0, &b.0, mask, true) {
                Ordering::Equal => grevlex_masked(&a.0, &b.0, mask, false),
                o => o,
            },
        }
    }
}

/// Sparse multivariate polynomial. Zero coefficients are never stored.
#[derive(Clone)]
pub struct MPoly {
    ring: RingRef,
    terms: BTreeMap<Mono, Elem>,
}

impl PartialEq for MPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && *self.ring == *other.ring
    }
}

impl Eq for MPoly {}

impl std::hash::Hash for MPoly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.terms.hash(state);
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl MPoly {
    pub fn zero(ring: &RingRef) -> MPoly {
        MPoly { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &RingRef, c: Elem) -> MPoly {
        let mut p = MPoly::zero(ring);
        if !ring.field.is_zero(&c) {
            p.terms.insert(Mono::one(ring.nvars()), c);
        }
        p
    }

    pub fn one(ring: &RingRef) -> MPoly {
        MPoly::constant(ring, ring.field.one())
    }

    pub fn from_i64(ring: &RingRef, n: i64) -> MPoly {
        MPoly::constant(ring, ring.field.from_i64(n))
    }

    pub fn var(ring: &RingRef, i: usize) -> MPoly {
        MPoly::monomial(ring, Mono::var(ring.nvars(), i, 1), ring.field.one())
    }

    pub fn var_named(ring: &RingRef, name: &str) -> Result<MPoly> {
        let i = ring
            .var_index(name)
            .ok_or_else(|| Error::VariableMismatch(format!("unknown variable `{name}`")))?;
        Ok(MPoly::var(ring, i))
    }

    pub fn monomial(ring: &RingRef, m: Mono, c: Elem) -> MPoly {
        let mut p = MPoly::zero(ring);
        if !ring.field.is_zero(&c) {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(ring: &RingRef, terms: impl IntoIterator<Item = (Mono, Elem)>) -> MPoly {
        let mut p = MPoly::zero(ring);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn field(&self) -> &Field {
        &self.ring.field
    }

    pub fn nvars(&self) -> usize {
        self.ring.nvars()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_value(&self) -> Option<Elem> {
        if self.is_zero() {
            return Some(self.field().zero());
        }
        if self.is_constant() {
            return self.terms.values().next().cloned();
        }
        None
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().map(|c| self.field().is_one(&c)).unwrap_or(false)
    }

    pub fn coeff(&self, m: &Mono) -> Elem {
        self.terms.get(m).cloned().unwrap_or_else(|| self.field().zero())
    }

    /// `-1` for the zero polynomial.
    pub fn total_degree(&self) -> i64 {
        self.terms.keys().map(|m| m.degree() as i64).max().unwrap_or(-1)
    }

    pub fn degree_in(&self, i: usize) -> i64 {
        self.terms.keys().map(|m| m.exp(i) as i64).max().unwrap_or(-1)
    }

    /// Indices of variables actually occurring.
    pub fn support(&self) -> Vec<usize> {
        let n = self.nvars();
        (0..n).filter(|&i| self.terms.keys().any(|m| m.exp(i) > 0)).collect()
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exp(i) > 0)
    }

    fn add_term(&mut self, m: Mono, c: Elem) {
        let f = &self.ring.field;
        if f.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = f.add(old, &c);
                if f.is_zero(&s) {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_ring(&self, other: &MPoly) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || *self.ring == *other.ring,
            "polynomials from different rings: {:?} vs {:?}",
            self.ring.vars,
            other.ring.vars
        );
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        self.check_ring(other);
        let mut r = self.clone();
        for (m, c) in &other.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        let f = self.field();
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), f.neg(c))).collect(),
        }
    }

    pub fn scale(&self, c: &Elem) -> MPoly {
        let f = self.field();
        if f.is_zero(c) {
            return MPoly::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), f.mul(a, c))).collect(),
        }
    }

    pub fn mul_term(&self, m: &Mono, c: &Elem) -> MPoly {
        let f = self.field();
        if f.is_zero(c) {
            return MPoly::zero(&self.ring);
        }
        MPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(a, x)| (a.mul(m), f.mul(x, c))).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        self.check_ring(other);
        let f = self.field();
        let mut r = MPoly::zero(&self.ring);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                r.add_term(m1.mul(m2), f.mul(c1, c2));
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut r = MPoly::one(&self.ring);
        let mut b = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&b);
            }
            e >>= 1;
            if e > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn leading(&self, order: &MonoOrder) -> Option<(&Mono, &Elem)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    /// Leading coefficient under the given order.
    pub fn lc(&self, order: &MonoOrder) -> Elem {
        self.leading(order).map(|(_, c)| c.clone()).unwrap_or_else(|| self.field().zero())
    }

    /// Divide by the leading coefficient under `order`.
    pub fn monic(&self, order: &MonoOrder) -> MPoly {
        match self.leading(order) {
            None => self.clone(),
            Some((_, c)) => {
                let inv = self.field().inv(c);
                self.scale(&inv)
            }
        }
    }

    /// Normalize the leading coefficient under grevlex to one (canonical associate).
    pub fn normalized(&self) -> MPoly {
        self.monic(&MonoOrder::GrevLex)
    }

    /// For the rationals: scale to a primitive integer polynomial with positive leading
    /// coefficient (grevlex). For finite fields: monic.
    pub fn primitive_associate(&self) -> MPoly {
        if self.is_zero() {
            return self.clone();
        }
        match self.field() {
            Field::Rationals => {
                use num_integer::Integer;
                use num_traits::{Signed, Zero};
                let mut den = BigInt::from(1);
                for c in self.terms.values() {
                    let Elem::Q(q) = c else { unreachable!() };
                    den = den.lcm(q.denom());
                }
                let mut num = BigInt::zero();
                for c in self.terms.values() {
                    let Elem::Q(q) = c else { unreachable!() };
                    let v = q.numer() * (&den / q.denom());
                    num = num.gcd(&v);
                }
                let (_, lc) = self.leading(&MonoOrder::GrevLex).unwrap();
                let Elem::Q(lcq) = lc else { unreachable!() };
                let sign = if lcq.is_negative() { -1 } else { 1 };
                let factor = BigRational::new(den * sign, num);
                self.scale(&Elem::Q(factor))
            }
            _ => self.normalized(),
        }
    }

    pub fn derivative(&self, i: usize) -> MPoly {
        let f = self.field();
        let mut r = MPoly::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.exp(i);
            if e == 0 {
                continue;
            }
            let mut m2 = m.clone();
            m2.0[i] -= 1;
            r.add_term(m2, f.mul(c, &f.from_i64(e as i64)));
        }
        r
    }

    /// Evaluate at a point of the coefficient field.
    pub fn eval(&self, point: &[Elem]) -> Elem {
        let f = self.field();
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = f.mul(&t, &f.pow(&point[i], e as u128));
                }
            }
            acc = f.add(&acc, &t);
        }
        acc
    }

    /// Substitute polynomials (all in one target ring) for the variables.
    pub fn compose(&self, images: &[MPoly]) -> MPoly {
        assert_eq!(images.len(), self.nvars(), "one image per variable");
        let target = match images.first() {
            Some(p) => p.ring.clone(),
            None => self.ring.clone(),
        };
        let f = &target.field;
        let mut r = MPoly::zero(&target);
        // cache powers
        let mut pow_cache: Vec<Vec<MPoly>> = vec![Vec::new(); images.len()];
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut pow_cache[i];
                if cache.is_empty() {
                    cache.push(MPoly::one(&target));
                }
                while cache.len() <= e as usize {
                    let next = cache.last().unwrap().mul(&images[i]);
                    cache.push(next);
                }
                t = t.mul(&cache[e as usize]);
            }
            r = r.add(&t);
        }
        let _ = f;
        r
    }

    /// Substitute a single variable.
    pub fn subst(&self, i: usize, value: &MPoly) -> MPoly {
        let images: Vec<MPoly> = (0..self.nvars())
            .map(|j| if j == i { value.clone() } else { MPoly::var(&self.ring, j) })
            .collect();
        self.compose(&images)
    }

    /// Move into another ring along a variable map (`map[i]` = index in the target).
    pub fn rename(&self, target: &RingRef, map: &[usize]) -> MPoly {
        assert_eq!(map.len(), self.nvars());
        let n = target.nvars();
        let mut r = MPoly::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; n];
            for (i, &k) in m.0.iter().enumerate() {
                if k > 0 {
                    e[map[i]] += k;
                }
            }
            r.add_term(Mono(e), c.clone());
        }
        r
    }

    /// Move into a ring whose variable names contain all occurring variables.
    pub fn embed_by_name(&self, target: &RingRef) -> Result<MPoly> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, v) in self.ring.vars.iter().enumerate() {
            match target.var_index(v) {
                Some(j) => map.push(j),
                None => {
                    if self.involves(i) {
                        return Err(Error::VariableMismatch(format!(
                            "variable `{v}` not present in target ring {:?}",
                            target.vars
                        )));
                    }
                    map.push(usize::MAX);
                }
            }
        }
        Ok(self.rename(target, &map))
    }

    /// Change the coefficient field along a map on elements.
    pub fn map_coeffs(&self, target: &RingRef, f: impl Fn(&Elem) -> Result<Elem>) -> Result<MPoly> {
        assert_eq!(target.nvars(), self.nvars());
        let mut r = MPoly::zero(target);
        for (m, c) in &self.terms {
            r.add_term(m.clone(), f(c)?);
        }
        Ok(r)
    }

    /// Coefficients in variable `i`: `self = sum_k coeff_k * x_i^k`, `coeff_k` free of `x_i`.
    pub fn coefficients_in(&self, i: usize) -> Vec<MPoly> {
        let d = self.degree_in(i);
        if d < 0 {
            return vec![];
        }
        let mut out = vec![MPoly::zero(&self.ring); d as usize + 1];
        for (m, c) in &self.terms {
            let e = m.exp(i) as usize;
            let mut m2 = m.clone();
            m2.0[i] = 0;
            out[e].add_term(m2, c.clone());
        }
        out
    }

    pub fn from_coefficients_in(ring: &RingRef, i: usize, coeffs: &[MPoly]) -> MPoly {
        let xi = MPoly::var(ring, i);
        let mut r = MPoly::zero(ring);
        let mut pw = MPoly::one(ring);
        for c in coeffs {
            r = r.add(&c.mul(&pw));
            pw = pw.mul(&xi);
        }
        r
    }

    /// Terms sorted by descending grevlex, the canonical printing order.
    pub fn sorted_terms(&self) -> Vec<(&Mono, &Elem)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| grevlex_cmp(&b.0 .0, &a.0 .0));
        v
    }

    pub fn parse(ring: &RingRef, s: &str) -> Result<MPoly> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, ring };
        let r = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse { pos: p.pos, msg: format!("unexpected `{}`", &s[p.pos..]) });
        }
        Ok(r)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    ring: &'a RingRef,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = if self.peek() == Some(b'-') {
            self.pos += 1;
            self.term()?.neg()
        } else {
            if self.peek() == Some(b'+') {
                self.pos += 1;
            }
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let start = self.pos;
                    let n = self.integer()?;
                    let f = &self.ring.field;
                    let d = f.from_rational(&BigRational::from_integer(n))?;
                    if f.is_zero(&d) {
                        self.pos = start;
                        return self.err("division by zero");
                    }
                    acc = acc.scale(&f.inv(&d));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<MPoly> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| Error::Parse {
                pos: self.pos,
                msg: "exponent out of range".into(),
            })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected integer");
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<MPoly> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(MPoly::constant(self.ring, self.ring.field.from_bigint(&n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.ring.var_index(name) {
                    Some(i) => Ok(MPoly::var(self.ring, i)),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown variable `{name}`"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected `{}`", c as char)),
            None => self.err("unexpected end of input"),
        }
    }
}

fn format_coeff(field: &Field, c: &Elem) -> (bool, String) {
    // returns (negative, magnitude text)
    match c {
        Elem::Q(q) => {
            use num_traits::Signed;
            (q.is_negative(), q.abs().to_string())
        }
        Elem::P(x) => {
            let v = super::field::signed_mod(*x, field.characteristic());
            (v < 0, v.abs().to_string())
        }
        Elem::E(_) => (false, format!("({})", field.format_elem(c, "t"))),
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let field = self.field();
        let mut first = true;
        for (m, c) in self.sorted_terms() {
            let (neg, mag) = format_coeff(field, c);
            let mon: Vec<String> = m
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    if e == 1 {
                        self.ring.vars[i].clone()
                    } else {
                        format!("{}^{}", self.ring.vars[i], e)
                    }
                })
                .collect();
            let body = if mon.is_empty() {
                mag
            } else if mag == "1" {
                mon.join("*")
            } else {
                format!("{}*{}", mag, mon.join("*"))
            };
            if first {
                if neg {
                    write!(f, "-{body}")?;
                } else {
                    write!(f, "{body}")?;
                }
                first = false;
            } else if neg {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

/// Standard variable names `prefix0, prefix1, ...`.
pub fn var_names(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(vars: &[&str]) -> RingRef {
        Ring::new(Field::Rationals, vars.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn parse_and_print() {
        let r = ring(&["x0", "y0"]);
        let p = MPoly::parse(&r, "y0 - x0^2").unwrap();
        assert_eq!(p.to_string(), "-x0^2 + y0");
        let q = MPoly::parse(&r, "(x0 + 1)^2 - 2*x0 - 1").unwrap();
        assert_eq!(q.to_string(), "x0^2");
        let h = MPoly::parse(&r, "x0/2 + -3").unwrap();
        assert_eq!(h.to_string(), "1/2*x0 - 3");
    }

    #[test]
    fn parse_errors_report_position() {
        let r = ring(&["x0"]);
        match MPoly::parse(&r, "x0 + z") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(MPoly::parse(&r, "x0 +").is_err());
    }

    #[test]
    fn finite_field_printing_uses_symmetric_residues() {
        let r = Ring::new(Field::Prime(5), vec!["x0".into(), "y0".into()]);
        let p = MPoly::parse(&r, "y0 - x0^2").unwrap();
        assert_eq!(p.to_string(), "-x0^2 + y0");
        assert_eq!(MPoly::parse(&r, &p.to_string()).unwrap(), p);
    }

    #[test]
    fn compose_and_rename() {
        let r = ring(&["x", "y"]);
        let p = MPoly::parse(&r, "x*y + y").unwrap();
        let s = ring(&["t"]);
        let t = MPoly::var(&s, 0);
        let img = p.compose(&[t.clone(), t.pow(2)]);
        assert_eq!(img, MPoly::parse(&s, "t^3 + t^2").unwrap());
        let big = ring(&["a", "x", "b", "y"]);
        assert_eq!(p.rename(&big, &[1, 3]), MPoly::parse(&big, "x*y + y").unwrap());
    }

    #[test]
    fn orders() {
        let a = Mono(vec![1, 0, 2]);
        let b = Mono(vec![0, 3, 0]);
        assert_eq!(MonoOrder::Lex.cmp(&a, &b), Ordering::Greater);
        // same degree; last variable exponent larger -> smaller in grevlex
        assert_eq!(MonoOrder::GrevLex.cmp(&a, &b), Ordering::Less);
        let elim = MonoOrder::Elim(vec![false, true, false]);
        assert_eq!(elim.cmp(&a, &b), Ordering::Less);
    }
}
