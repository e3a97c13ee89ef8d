//! Table-driven finite fields for enumeration.
//!
//! Elements are `u32` indices using the same digit convention as
//! [`Field::elem_from_index`], so conversion to and from [`Elem`] is exact.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use super::extension::Embedding;
use super::field::{Elem, Field};
use super::mpoly::MPoly;
use crate::error::{Error, Result};

/// Largest field order backed by log tables.
pub const MAX_TABLE_ORDER: u64 = 1 << 23;

#[derive(Debug)]
pub struct Gf {
    pub field: Field,
    pub p: u32,
    pub k: u32,
    pub size: u32,
    pw: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

fn cache() -> &'static Mutex<HashMap<Field, Arc<Gf>>> {
    static C: OnceLock<Mutex<HashMap<Field, Arc<Gf>>>> = OnceLock::new();
    C.get_or_init(|| Mutex::new(HashMap::new()))
}

fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for d in (k..prod.len()).rev() {
        let c = prod[d];
        if c != 0 {
            for (i, &m) in modulus.iter().enumerate().take(k) {
                let t = d - k + i;
                prod[t] = (prod[t] + (p - c) * m) % p;
            }
            prod[d] = 0;
        }
    }
    prod.truncate(k);
    prod
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl Gf {
    /// The table field for `F_{p^k}`, shared across callers.
    pub fn get(p: u64, k: usize) -> Result<Arc<Gf>> {
        Gf::of(&Field::galois(p, k)?)
    }

    pub fn of(field: &Field) -> Result<Arc<Gf>> {
        if let Some(g) = cache().lock().unwrap().get(field) {
            return Ok(g.clone());
        }
        let g = Arc::new(Gf::build(field)?);
        cache().lock().unwrap().insert(field.clone(), g.clone());
        Ok(g)
    }

    fn build(field: &Field) -> Result<Gf> {
        let order = field.order().ok_or_else(|| Error::Field("table fields are finite".into()))?;
        if order as u64 > MAX_TABLE_ORDER {
            return Err(Error::Budget { needed: order, budget: MAX_TABLE_ORDER as u128 });
        }
        let p = field.characteristic();
        let k = field.degree();
        let size = order as u64;
        let modulus: Vec<u64> = match field {
            Field::Extension { modulus, .. } => modulus.clone(),
            _ => vec![0, 1],
        };
        let digits = |mut i: u64| -> Vec<u64> {
            let mut v = Vec::with_capacity(k);
            for _ in 0..k {
                v.push(i % p);
                i /= p;
            }
            v
        };
        let index = |v: &[u64]| -> u64 { v.iter().rev().fold(0, |acc, &c| acc * p + c) };
        let mul = |a: &[u64], b: &[u64]| -> Vec<u64> {
            if k == 1 {
                vec![a[0] * b[0] % p]
            } else {
                poly_mulmod(a, b, &modulus, p)
            }
        };
        let pow = |a: &[u64], mut e: u64| -> Vec<u64> {
            let mut r = digits(1);
            let mut b = a.to_vec();
            while e > 0 {
                if e & 1 == 1 {
                    r = mul(&r, &b);
                }
                b = mul(&b, &b);
                e >>= 1;
            }
            r
        };
        let n = size - 1;
        let factors = prime_factors(n);
        let mut gen = None;
        for cand in 2..size.max(3) {
            if size == 2 {
                gen = Some(digits(1));
                break;
            }
            let g = digits(cand);
            if factors.iter().all(|&f| index(&pow(&g, n / f)) != 1) {
                gen = Some(g);
                break;
            }
        }
        let g = gen.unwrap_or_else(|| digits(1));
        let mut exp = vec![0u32; n as usize];
        let mut log = vec![0u32; size as usize];
        let mut x = digits(1);
        for (i, slot) in exp.iter_mut().enumerate() {
            let idx = index(&x);
            *slot = idx as u32;
            log[idx as usize] = i as u32;
            x = mul(&x, &g);
        }
        let pw = (0..k).map(|i| (p as u32).pow(i as u32)).collect();
        Ok(Gf { field: field.clone(), p: p as u32, k: k as u32, size: size as u32, pw, exp, log })
    }

    pub fn order(&self) -> u64 {
        self.size as u64
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        if self.k == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b, mut r) = (a, b, 0);
        for &w in &self.pw {
            let d = a % self.p + b % self.p;
            r += if d >= self.p { d - self.p } else { d } * w;
            a /= self.p;
            b /= self.p;
        }
        r
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        if self.k == 1 {
            return if a == 0 { 0 } else { self.p - a };
        }
        let (mut a, mut r) = (a, 0);
        for &w in &self.pw {
            let d = a % self.p;
            r += if d == 0 { 0 } else { self.p - d } * w;
            a /= self.p;
        }
        r
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let n = self.size - 1;
        let s = self.log[a as usize] as u64 + self.log[b as usize] as u64;
        self.exp[(s % n as u64) as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        let n = self.size - 1;
        self.exp[((n - self.log[a as usize]) % n) as usize]
    }

    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    #[inline]
    pub fn pow(&self, a: u32, e: u128) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let n = (self.size - 1) as u128;
        self.exp[((self.log[a as usize] as u128 * (e % n)) % n) as usize]
    }

    pub fn from_i64(&self, c: i64) -> u32 {
        c.rem_euclid(self.p as i64) as u32
    }

    pub fn to_elem(&self, a: u32) -> Elem {
        self.field.elem_from_index(a as u64)
    }

    pub fn from_elem(&self, a: &Elem) -> u32 {
        self.field.index_of(a) as u32
    }

    /// Image of a coefficient from a base field embedding in this field.
    pub fn coerce(&self, base: &Field, a: &Elem) -> Result<u32> {
        match base {
            Field::Rationals => {
                let q = base.as_rational(a).unwrap();
                Ok(self.from_elem(&self.field.from_rational(q)?))
            }
            _ if *base == self.field => Ok(self.from_elem(a)),
            _ => {
                let e = Embedding::new(base, &self.field)?;
                Ok(self.from_elem(&e.map(a)))
            }
        }
    }

    /// Compile a polynomial for repeated evaluation.
    pub fn compile(&self, f: &MPoly) -> Result<GfPoly> {
        let base = f.field().clone();
        let emb = match &base {
            Field::Rationals => None,
            b if *b == self.field => None,
            b => Some(Embedding::new(b, &self.field)?),
        };
        let mut terms = Vec::with_capacity(f.num_terms());
        for (m, c) in f.terms() {
            let cc = match (&base, &emb) {
                (Field::Rationals, _) => self.from_elem(&self.field.from_rational(base.as_rational(c).unwrap())?),
                (_, Some(e)) => self.from_elem(&e.map(c)),
                _ => self.from_elem(c),
            };
            if cc == 0 {
                continue;
            }
            let vars: Vec<(usize, u32)> =
                m.0.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e as u32)).collect();
            terms.push((cc, vars));
        }
        Ok(GfPoly { terms })
    }

    /// Map of every element of the subfield `sub` into this field, by index.
    pub fn subfield_table(&self, sub: &Gf) -> Result<Vec<u32>> {
        let e = Embedding::new(&sub.field, &self.field)?;
        Ok((0..sub.size).map(|i| self.from_elem(&e.map(&sub.to_elem(i)))).collect())
    }
}

/// A polynomial with coefficients already mapped into a [`Gf`].
#[derive(Clone, Debug)]
pub struct GfPoly {
    terms: Vec<(u32, Vec<(usize, u32)>)>,
}

impl GfPoly {
    pub fn eval(&self, gf: &Gf, point: &[u32]) -> u32 {
        let mut acc = 0;
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(i, e) in vars {
                t = gf.mul(t, gf.pow(point[i], e as u128));
                if t == 0 {
                    break;
                }
            }
            acc = gf.add(acc, t);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_agree_with_generic_arithmetic() {
        for (p, k) in [(2u64, 1usize), (2, 3), (3, 2), (5, 1), (7, 2)] {
            let gf = Gf::get(p, k).unwrap();
            let f = &gf.field;
            for a in 0..gf.size {
                for b in 0..gf.size {
                    let (ea, eb) = (gf.to_elem(a), gf.to_elem(b));
                    assert_eq!(gf.to_elem(gf.add(a, b)), f.add(&ea, &eb));
                    assert_eq!(gf.to_elem(gf.mul(a, b)), f.mul(&ea, &eb));
                }
                assert_eq!(gf.to_elem(gf.neg(a)), f.neg(&gf.to_elem(a)));
                assert_eq!(gf.to_elem(gf.pow(a, p as u128)), f.frobenius(&gf.to_elem(a)));
            }
        }
    }

    #[test]
    fn compiled_evaluation() {
        use crate::algebra::mpoly::Ring;
        let r = Ring::new(Field::Rationals, vec!["x".into(), "y".into()]);
        let f = MPoly::parse(&r, "x^2 - y/2 + 3").unwrap();
        let gf = Gf::get(5, 2).unwrap();
        let c = gf.compile(&f).unwrap();
        let (x, y) = (gf.from_i64(2), gf.from_i64(4));
        // 4 - 2 + 3 = 5 = 0
        assert_eq!(c.eval(&gf, &[x, y]), 0);
    }
}
