//! Dense univariate polynomials over a [`Field`].

use std::fmt;

use super::field::{Elem, Field};
use super::mpoly::{MPoly, Mono, RingRef};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct UPoly {
    pub field: Field,
    /// Coefficients, low degree first, no trailing zeros.
    pub c: Vec<Elem>,
}

impl fmt::Debug for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.c.iter().map(|e| self.field.format_elem(e, "t")).collect();
        write!(f, "UPoly[{}]", parts.join(", "))
    }
}

impl UPoly {
    pub fn new(field: &Field, mut c: Vec<Elem>) -> UPoly {
        while c.last().map(|x| field.is_zero(x)).unwrap_or(false) {
            c.pop();
        }
        UPoly { field: field.clone(), c }
    }

    pub fn zero(field: &Field) -> UPoly {
        UPoly { field: field.clone(), c: vec![] }
    }

    pub fn one(field: &Field) -> UPoly {
        UPoly::constant(field, field.one())
    }

    pub fn constant(field: &Field, a: Elem) -> UPoly {
        UPoly::new(field, vec![a])
    }

    pub fn x(field: &Field) -> UPoly {
        UPoly::new(field, vec![field.zero(), field.one()])
    }

    /// `x - a`
    pub fn linear(field: &Field, a: &Elem) -> UPoly {
        UPoly::new(field, vec![field.neg(a), field.one()])
    }

    pub fn from_i64s(field: &Field, c: &[i64]) -> UPoly {
        UPoly::new(field, c.iter().map(|&x| field.from_i64(x)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    /// `-1` for zero.
    pub fn deg(&self) -> isize {
        self.c.len() as isize - 1
    }

    pub fn lc(&self) -> Elem {
        self.c.last().cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeff(&self, i: usize) -> Elem {
        self.c.get(i).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.field.is_one(&self.c[0])
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let f = &self.field;
        let n = self.c.len().max(o.c.len());
        UPoly::new(f, (0..n).map(|i| f.add(&self.coeff(i), &o.coeff(i))).collect())
    }

    pub fn neg(&self) -> UPoly {
        UPoly::new(&self.field, self.c.iter().map(|a| self.field.neg(a)).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, a: &Elem) -> UPoly {
        UPoly::new(&self.field, self.c.iter().map(|x| self.field.mul(x, a)).collect())
    }

    pub fn shift(&self, k: usize) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut c = vec![self.field.zero(); k];
        c.extend(self.c.iter().cloned());
        UPoly { field: self.field.clone(), c }
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero(&self.field);
        }
        let f = &self.field;
        let mut r = vec![f.zero(); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if f.is_zero(a) {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                r[i + j] = f.add(&r[i + j], &f.mul(a, b));
            }
        }
        UPoly::new(f, r)
    }

    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let f = &self.field;
        let mut r = self.c.clone();
        let dd = d.c.len() - 1;
        if r.len() <= dd {
            return (UPoly::zero(f), self.clone());
        }
        let inv = f.inv(&d.lc());
        let mut q = vec![f.zero(); r.len() - dd];
        while r.len() > dd {
            let top = r.pop().unwrap();
            if f.is_zero(&top) {
                continue;
            }
            let c = f.mul(&top, &inv);
            let shift = r.len() - dd;
            for i in 0..dd {
                r[shift + i] = f.sub(&r[shift + i], &f.mul(&c, &d.c[i]));
            }
            q[shift] = c;
        }
        (UPoly::new(f, q), UPoly::new(f, r))
    }

    pub fn rem(&self, d: &UPoly) -> UPoly {
        self.divrem(d).1
    }

    pub fn div_exact(&self, d: &UPoly) -> Option<UPoly> {
        let (q, r) = self.divrem(d);
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    pub fn monic(&self) -> UPoly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.field.inv(&self.lc()))
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s*self + t*o = g` monic.
    pub fn ext_gcd(&self, o: &UPoly) -> (UPoly, UPoly, UPoly) {
        let f = &self.field;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (UPoly::one(f), UPoly::zero(f));
        let (mut t0, mut t1) = (UPoly::zero(f), UPoly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.divrem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
            t0 = t1;
            t1 = t2;
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = f.inv(&r0.lc());
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn mulmod(&self, o: &UPoly, m: &UPoly) -> UPoly {
        self.mul(o).rem(m)
    }

    pub fn powmod(&self, mut e: u128, m: &UPoly) -> UPoly {
        let mut r = UPoly::one(&self.field).rem(m);
        let mut b = self.rem(m);
        while e > 0 {
            if e & 1 == 1 {
                r = r.mulmod(&b, m);
            }
            e >>= 1;
            if e > 0 {
                b = b.mulmod(&b, m);
            }
        }
        r
    }

    /// `self^(p^k) mod m` by repeated `p`-th powers.
    pub fn frobenius_powmod(&self, k: usize, m: &UPoly) -> UPoly {
        let p = self.field.characteristic() as u128;
        let mut r = self.rem(m);
        for _ in 0..k {
            r = r.powmod(p, m);
        }
        r
    }

    pub fn derivative(&self) -> UPoly {
        let f = &self.field;
        UPoly::new(
            f,
            self.c.iter().enumerate().skip(1).map(|(i, a)| f.mul(a, &f.from_i64(i as i64))).collect(),
        )
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        let f = &self.field;
        self.c.iter().rev().fold(f.zero(), |acc, a| f.add(&f.mul(&acc, x), a))
    }

    /// `self(g)`.
    pub fn compose(&self, g: &UPoly) -> UPoly {
        let f = &self.field;
        self.c.iter().rev().fold(UPoly::zero(f), |acc, a| acc.mul(g).add(&UPoly::constant(f, a.clone())))
    }

    pub fn pow(&self, e: u32) -> UPoly {
        let mut r = UPoly::one(&self.field);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Coefficients mapped into another field.
    pub fn map(&self, target: &Field, g: impl Fn(&Elem) -> Elem) -> UPoly {
        UPoly::new(target, self.c.iter().map(g).collect())
    }

    /// Polynomial of a univariate [`MPoly`] in variable `i`.
    pub fn from_mpoly(p: &MPoly, i: usize) -> UPoly {
        let f = p.field();
        let d = p.degree_in(i).max(0) as usize;
        let mut c = vec![f.zero(); d + 1];
        for (m, a) in p.terms() {
            assert!(
                m.0.iter().enumerate().all(|(j, &e)| j == i || e == 0),
                "polynomial is not univariate in the requested variable"
            );
            c[m.exp(i) as usize] = a.clone();
        }
        UPoly::new(f, c)
    }

    pub fn to_mpoly(&self, ring: &RingRef, i: usize) -> MPoly {
        MPoly::from_terms(
            ring,
            self.c
                .iter()
                .enumerate()
                .map(|(k, a)| (Mono::var(ring.nvars(), i, k as u16), a.clone())),
        )
    }

    /// Resultant by the Euclidean algorithm.
    pub fn resultant(&self, o: &UPoly) -> Elem {
        let f = &self.field;
        if self.is_zero() || o.is_zero() {
            return f.zero();
        }
        let (mut a, mut b) = (self.clone(), o.clone());
        let mut res = f.one();
        loop {
            let (da, db) = (a.deg(), b.deg());
            if db == 0 {
                return f.mul(&res, &f.pow(&b.lc(), da as u128));
            }
            let r = a.rem(&b);
            if r.is_zero() {
                return f.zero();
            }
            if da % 2 == 1 && db % 2 == 1 {
                res = f.neg(&res);
            }
            let dr = r.deg();
            res = f.mul(&res, &f.pow(&b.lc(), (da - dr) as u128));
            a = b;
            b = r;
        }
    }

    pub fn discriminant(&self) -> Elem {
        let f = &self.field;
        let d = self.deg();
        let r = self.resultant(&self.derivative());
        let sign = if (d * (d - 1) / 2) % 2 == 1 { f.neg(&f.one()) } else { f.one() };
        f.div(&f.mul(&r, &sign), &self.lc())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divrem_reconstructs() {
        let f = Field::Prime(7);
        let a = UPoly::from_i64s(&f, &[1, 2, 3, 4, 5]);
        let b = UPoly::from_i64s(&f, &[3, 0, 1]);
        let (q, r) = a.divrem(&b);
        assert_eq!(q.mul(&b).add(&r), a);
        assert!(r.deg() < b.deg());
    }

    #[test]
    fn ext_gcd_bezout() {
        let f = Field::Rationals;
        let a = UPoly::from_i64s(&f, &[-1, 0, 1]);
        let b = UPoly::from_i64s(&f, &[-1, 1]);
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(g, UPoly::from_i64s(&f, &[-1, 1]));
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn discriminant_of_quadratic() {
        // x^2 + b x + c has discriminant b^2 - 4c
        let f = Field::Rationals;
        let p = UPoly::from_i64s(&f, &[3, 5, 1]);
        assert_eq!(p.discriminant(), f.from_i64(25 - 12));
        let cubic = UPoly::from_i64s(&f, &[-2, 0, 0, 1]);
        // x^3 + a x + b: -4a^3 - 27b^2
        assert_eq!(cubic.discriminant(), f.from_i64(-27 * 4));
    }
}
