//! Coefficient fields: the rationals, prime fields and finite extensions of prime fields.
//!
//! Elements are stored in a tagged [`Elem`]; every operation goes through the owning
//! [`Field`], which knows how to reduce.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rationals,
    Prime(u64),
    /// `F_p[t]/(modulus)`; the modulus is monic, stored low degree first.
    Extension { p: u64, modulus: Vec<u64> },
}

/// An element of some [`Field`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Elem {
    Q(BigRational),
    P(u64),
    /// Coefficient vector of length equal to the extension degree.
    E(Vec<u64>),
}

pub(crate) fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub(crate) fn mod_inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    mod_pow(a, p - 2, p)
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Dense polynomial helpers over `F_p`, low degree first.
pub(crate) mod fp_poly {
    use super::mod_inv;

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut r = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                r[i + j] = (r[i + j] + x * y) % p;
            }
        }
        trim(&mut r);
        r
    }

    pub fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut r: Vec<u64> = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(&mut r);
        r
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv = mod_inv(m[dm], p);
        while r.len() > dm {
            let c = r[r.len() - 1] * inv % p;
            let shift = r.len() - 1 - dm;
            for (i, &mc) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mc % p) % p;
            }
            trim(&mut r);
        }
        r
    }

    pub fn divrem(a: &[u64], m: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        if r.len() <= dm {
            return (vec![], r);
        }
        let mut q = vec![0u64; r.len() - dm];
        let inv = mod_inv(m[dm], p);
        while r.len() > dm {
            let c = r[r.len() - 1] * inv % p;
            let shift = r.len() - 1 - dm;
            q[shift] = c;
            for (i, &mc) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p - c * mc % p) % p;
            }
            trim(&mut r);
        }
        trim(&mut q);
        (q, r)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        if let Some(&l) = a.last() {
            let inv = mod_inv(l, p);
            for c in a.iter_mut() {
                *c = *c * inv % p;
            }
        }
        a
    }

    /// Returns `(g, s)` with `s*a = g (mod m)`.
    pub fn inv_mod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
        let mut r0 = m.to_vec();
        let mut r1 = a.to_vec();
        trim(&mut r1);
        let mut s0: Vec<u64> = vec![];
        let mut s1: Vec<u64> = vec![1];
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1, p);
            let s2 = sub(&s0, &mul(&q, &s1, p), p);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s2;
        }
        if r0.len() != 1 {
            return None;
        }
        let inv = mod_inv(r0[0], p);
        let mut s = rem(&s0, m, p);
        for c in s.iter_mut() {
            *c = *c * inv % p;
        }
        Some(s)
    }

    pub fn pow_mod(base: &[u64], mut e: u128, m: &[u64], p: u64) -> Vec<u64> {
        let mut r = vec![1u64];
        let mut b = rem(base, m, p);
        while e > 0 {
            if e & 1 == 1 {
                r = rem(&mul(&r, &b, p), m, p);
            }
            b = rem(&mul(&b, &b, p), m, p);
            e >>= 1;
        }
        r
    }

    /// Rabin-style irreducibility test for a monic polynomial over `F_p`.
    pub fn is_irreducible(f: &[u64], p: u64) -> bool {
        let k = f.len() - 1;
        if k == 0 {
            return false;
        }
        if k == 1 {
            return true;
        }
        let x = vec![0, 1];
        let mut xp = x.clone();
        for i in 1..=k {
            xp = pow_mod(&xp, p as u128, f, p);
            if i <= k / 2 {
                let g = gcd(f, &sub(&xp, &x, p), p);
                if g.len() > 1 {
                    return false;
                }
            }
        }
        xp == x || sub(&xp, &x, p).is_empty()
    }

    /// First monic irreducible polynomial of degree `k` over `F_p`, searching
    /// coefficient vectors `(c_{k-1}, ..., c_0)` in lexicographic order.
    pub fn first_irreducible(p: u64, k: usize) -> Vec<u64> {
        if k == 1 {
            return vec![0, 1];
        }
        let total = (p as u128).pow(k as u32);
        let mut n: u128 = 0;
        while n < total {
            let mut f = Vec::with_capacity(k + 1);
            let mut t = n;
            for _ in 0..k {
                f.push((t % p as u128) as u64);
                t /= p as u128;
            }
            f.push(1);
            if f[0] != 0 && is_irreducible(&f, p) {
                return f;
            }
            n += 1;
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}

impl Field {
    pub fn prime(p: u64) -> Result<Field> {
        if !is_prime(p) || p >= (1 << 31) {
            return Err(Error::Field(format!("{p} is not a supported prime")));
        }
        Ok(Field::Prime(p))
    }

    /// `F_{p^k}` with the deterministic modulus (first irreducible in lexicographic order).
    pub fn galois(p: u64, k: usize) -> Result<Field> {
        let f = Field::prime(p)?;
        if k == 1 {
            return Ok(f);
        }
        Ok(Field::Extension { p, modulus: fp_poly::first_irreducible(p, k) })
    }

    pub fn extension(p: u64, modulus: Vec<u64>) -> Result<Field> {
        Field::prime(p)?;
        let mut m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        fp_poly::trim(&mut m);
        if m.len() < 2 || *m.last().unwrap() != 1 {
            return Err(Error::Field("extension modulus must be monic of positive degree".into()));
        }
        if !fp_poly::is_irreducible(&m, p) {
            return Err(Error::Field("extension modulus is not irreducible".into()));
        }
        if m.len() == 2 {
            return Ok(Field::Prime(p));
        }
        Ok(Field::Extension { p, modulus: m })
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Field::Rationals => 0,
            Field::Prime(p) => *p,
            Field::Extension { p, .. } => *p,
        }
    }

    /// Degree over the prime field (1 for `Q` and `F_p`).
    pub fn degree(&self) -> usize {
        match self {
            Field::Extension { modulus, .. } => modulus.len() - 1,
            _ => 1,
        }
    }

    /// Number of elements, `None` for the rationals.
    pub fn order(&self) -> Option<u128> {
        match self {
            Field::Rationals => None,
            Field::Prime(p) => Some(*p as u128),
            Field::Extension { p, modulus } => Some((*p as u128).pow((modulus.len() - 1) as u32)),
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Field::Rationals)
    }

    pub fn zero(&self) -> Elem {
        match self {
            Field::Rationals => Elem::Q(BigRational::zero()),
            Field::Prime(_) => Elem::P(0),
            Field::Extension { modulus, .. } => Elem::E(vec![0; modulus.len() - 1]),
        }
    }

    pub fn one(&self) -> Elem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> Elem {
        match self {
            Field::Rationals => Elem::Q(BigRational::from_integer(BigInt::from(n))),
            Field::Prime(p) => Elem::P(n.rem_euclid(*p as i64) as u64),
            Field::Extension { p, modulus } => {
                let mut v = vec![0; modulus.len() - 1];
                v[0] = n.rem_euclid(*p as i64) as u64;
                Elem::E(v)
            }
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elem {
        match self {
            Field::Rationals => Elem::Q(BigRational::from_integer(n.clone())),
            _ => {
                let p = BigInt::from(self.characteristic());
                let r = n.mod_floor(&p).to_i64().unwrap();
                self.from_i64(r)
            }
        }
    }

    /// Image of a rational number; fails when the denominator vanishes in the field.
    pub fn from_rational(&self, q: &BigRational) -> Result<Elem> {
        match self {
            Field::Rationals => Ok(Elem::Q(q.clone())),
            _ => {
                let n = self.from_bigint(q.numer());
                let d = self.from_bigint(q.denom());
                if self.is_zero(&d) {
                    return Err(Error::Field(format!(
                        "denominator of {q} vanishes in characteristic {}",
                        self.characteristic()
                    )));
                }
                Ok(self.div(&n, &d))
            }
        }
    }

    /// Element of an extension field from its coefficient vector.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Elem {
        match self {
            Field::Rationals => self.from_i64(coeffs.first().copied().unwrap_or(0) as i64),
            Field::Prime(p) => Elem::P(coeffs.first().copied().unwrap_or(0) % p),
            Field::Extension { p, modulus } => {
                let k = modulus.len() - 1;
                let reduced = fp_poly::rem(coeffs, modulus, *p);
                let mut v = vec![0; k];
                v[..reduced.len()].copy_from_slice(&reduced);
                Elem::E(v)
            }
        }
    }

    /// Coefficient vector over the prime field (finite fields only).
    pub fn coeffs(&self, a: &Elem) -> Vec<u64> {
        match a {
            Elem::P(x) => vec![*x],
            Elem::E(v) => v.clone(),
            Elem::Q(_) => panic!("rational element has no prime-field coordinates"),
        }
    }

    /// Generator `t` of an extension field.
    pub fn generator(&self) -> Elem {
        match self {
            Field::Extension { .. } => self.from_coeffs(&[0, 1]),
            _ => self.one(),
        }
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        match a {
            Elem::Q(x) => x.is_zero(),
            Elem::P(x) => *x == 0,
            Elem::E(v) => v.iter().all(|&c| c == 0),
        }
    }

    pub fn is_one(&self, a: &Elem) -> bool {
        match a {
            Elem::Q(x) => x.is_one(),
            Elem::P(x) => *x == 1,
            Elem::E(v) => v[0] == 1 && v[1..].iter().all(|&c| c == 0),
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Q(x), Elem::Q(y)) => Elem::Q(x + y),
            (Elem::P(x), Elem::P(y)) => Elem::P((x + y) % self.characteristic()),
            (Elem::E(x), Elem::E(y)) => {
                let p = self.characteristic();
                Elem::E(x.iter().zip(y).map(|(u, v)| (u + v) % p).collect())
            }
            _ => panic!("mixed field elements"),
        }
    }

    pub fn neg(&self, a: &Elem) -> Elem {
        match a {
            Elem::Q(x) => Elem::Q(-x),
            Elem::P(x) => {
                let p = self.characteristic();
                Elem::P((p - x) % p)
            }
            Elem::E(v) => {
                let p = self.characteristic();
                Elem::E(v.iter().map(|x| (p - x) % p).collect())
            }
        }
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (a, b) {
            (Elem::Q(x), Elem::Q(y)) => Elem::Q(x * y),
            (Elem::P(x), Elem::P(y)) => Elem::P(x * y % self.characteristic()),
            (Elem::E(x), Elem::E(y)) => {
                let Field::Extension { p, modulus } = self else { panic!("mixed field elements") };
                let prod = fp_poly::mul(x, y, *p);
                self.from_coeffs(&fp_poly::rem(&prod, modulus, *p))
            }
            _ => panic!("mixed field elements"),
        }
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: &Elem) -> Elem {
        assert!(!self.is_zero(a), "inverse of zero");
        match a {
            Elem::Q(x) => Elem::Q(x.recip()),
            Elem::P(x) => Elem::P(mod_inv(*x, self.characteristic())),
            Elem::E(v) => {
                let Field::Extension { p, modulus } = self else { unreachable!() };
                let s = fp_poly::inv_mod(v, modulus, *p).expect("modulus is irreducible");
                self.from_coeffs(&s)
            }
        }
    }

    pub fn div(&self, a: &Elem, b: &Elem) -> Elem {
        self.mul(a, &self.inv(b))
    }

    pub fn pow(&self, a: &Elem, mut e: u128) -> Elem {
        let mut r = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(&r, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        r
    }

    /// `a^p`, the absolute Frobenius (identity on `Q`).
    pub fn frobenius(&self, a: &Elem) -> Elem {
        match self {
            Field::Rationals => a.clone(),
            _ => self.pow(a, self.characteristic() as u128),
        }
    }

    /// The unique `p`-th root in a finite field.
    pub fn pth_root(&self, a: &Elem) -> Elem {
        match self {
            Field::Rationals => a.clone(),
            Field::Prime(_) => a.clone(),
            Field::Extension { p, .. } => {
                let k = self.degree() as u32;
                self.pow(a, (*p as u128).pow(k - 1))
            }
        }
    }

    /// All elements of a finite field, in index order.
    pub fn elements(&self) -> Vec<Elem> {
        let Some(n) = self.order() else { panic!("cannot enumerate an infinite field") };
        (0..n as u64).map(|i| self.elem_from_index(i)).collect()
    }

    /// Element whose base-`p` digits (low first) are the coefficient vector.
    pub fn elem_from_index(&self, mut i: u64) -> Elem {
        let p = self.characteristic();
        let k = self.degree();
        let mut v = Vec::with_capacity(k);
        for _ in 0..k {
            v.push(i % p);
            i /= p;
        }
        self.from_coeffs(&v)
    }

    pub fn index_of(&self, a: &Elem) -> u64 {
        let p = self.characteristic();
        self.coeffs(a).iter().rev().fold(0u64, |acc, &c| acc * p + c)
    }

    /// Rational number representing `a` (rationals only).
    pub fn as_rational<'a>(&self, a: &'a Elem) -> Option<&'a BigRational> {
        match a {
            Elem::Q(x) => Some(x),
            _ => None,
        }
    }

    /// Whether `a` lies in the prime subfield; returns its integer representative.
    pub fn prime_subfield_value(&self, a: &Elem) -> Option<i64> {
        match a {
            Elem::Q(x) => {
                if x.is_integer() {
                    x.to_integer().to_i64()
                } else {
                    None
                }
            }
            Elem::P(x) => Some(*x as i64),
            Elem::E(v) => {
                if v[1..].iter().all(|&c| c == 0) {
                    Some(v[0] as i64)
                } else {
                    None
                }
            }
        }
    }

    /// Render an element; extension elements use `gen` for the generator.
    pub fn format_elem(&self, a: &Elem, gen: &str) -> String {
        match a {
            Elem::Q(x) => x.to_string(),
            Elem::P(x) => signed_mod(*x, self.characteristic()).to_string(),
            Elem::E(v) => {
                let p = self.characteristic();
                let mut parts = Vec::new();
                for (i, &c) in v.iter().enumerate().rev() {
                    if c == 0 {
                        continue;
                    }
                    let c = signed_mod(c, p);
                    let mon = match i {
                        0 => String::new(),
                        1 => gen.to_string(),
                        _ => format!("{gen}^{i}"),
                    };
                    parts.push(match (c, mon.is_empty()) {
                        (c, true) => c.to_string(),
                        (1, false) => mon,
                        (-1, false) => format!("-{mon}"),
                        (c, false) => format!("{c}*{mon}"),
                    });
                }
                if parts.is_empty() {
                    "0".to_string()
                } else {
                    let mut s = parts[0].clone();
                    for t in &parts[1..] {
                        if let Some(rest) = t.strip_prefix('-') {
                            s.push_str(" - ");
                            s.push_str(rest);
                        } else {
                            s.push_str(" + ");
                            s.push_str(t);
                        }
                    }
                    s
                }
            }
        }
    }

    /// Elements of the field are written in terms of `t` in descriptors.
    pub fn descriptor(&self) -> String {
        self.to_string()
    }

    /// Small-integer pseudo-random element, used by splitting heuristics.
    pub fn sample(&self, i: u64) -> Elem {
        match self {
            Field::Rationals => {
                let n = i as i64;
                // 0, 1, -1, 2, -2, ...
                let v = if n % 2 == 1 { n / 2 + 1 } else { -(n / 2) };
                self.from_i64(v)
            }
            _ => {
                let ord = self.order().unwrap();
                self.elem_from_index((i as u128 % ord) as u64)
            }
        }
    }

    /// Integer bound `b` such that `b` does not vanish in the field (for the rationals, always).
    pub fn is_rational_integer_zero(&self, n: &BigInt) -> bool {
        match self {
            Field::Rationals => n.is_zero(),
            _ => (n % BigInt::from(self.characteristic())).is_zero(),
        }
    }

    pub fn rational_abs_height(q: &BigRational) -> BigInt {
        q.numer().abs().max(q.denom().abs())
    }
}

/// Symmetric representative in `(-p/2, p/2]`.
pub(crate) fn signed_mod(x: u64, p: u64) -> i64 {
    if p > 2 && x > p / 2 {
        x as i64 - p as i64
    } else {
        x as i64
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rationals => write!(f, "Q"),
            Field::Prime(p) => write!(f, "F{p}"),
            Field::Extension { p, modulus } => {
                let order = (*p as u128).pow((modulus.len() - 1) as u32);
                let terms: Vec<String> = modulus
                    .iter()
                    .enumerate()
                    .rev()
                    .filter(|(_, &c)| c != 0)
                    .map(|(i, &c)| {
                        let c = signed_mod(c, *p);
                        let mon = match i {
                            0 => String::new(),
                            1 => "t".to_string(),
                            _ => format!("t^{i}"),
                        };
                        match (c, mon.is_empty()) {
                            (c, true) => c.to_string(),
                            (1, false) => mon,
                            (-1, false) => format!("-{mon}"),
                            (c, false) => format!("{c}*{mon}"),
                        }
                    })
                    .collect();
                let mut s = terms[0].clone();
                for t in &terms[1..] {
                    if let Some(rest) = t.strip_prefix('-') {
                        s.push_str(" - ");
                        s.push_str(rest);
                    } else {
                        s.push_str(" + ");
                        s.push_str(t);
                    }
                }
                write!(f, "F{order}:{}", s.replace(' ', ""))
            }
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    /// Parses `Q`, `F5`, `F9` (deterministic modulus) or `F9:t^2+1`.
    fn from_str(s: &str) -> Result<Field> {
        let s = s.trim();
        if s == "Q" {
            return Ok(Field::Rationals);
        }
        let Some(rest) = s.strip_prefix('F') else {
            return Err(Error::Field(format!("unknown field descriptor `{s}`")));
        };
        let (order, modulus) = match rest.split_once(':') {
            Some((o, m)) => (o, Some(m)),
            None => (rest, None),
        };
        let order: u64 =
            order.parse().map_err(|_| Error::Field(format!("bad field order in `{s}`")))?;
        let (p, k) = prime_power(order)
            .ok_or_else(|| Error::Field(format!("{order} is not a prime power")))?;
        match modulus {
            None => Field::galois(p, k),
            Some(m) => {
                let coeffs = parse_univariate_fp(m, "t", p)?;
                if coeffs.len() != k + 1 {
                    return Err(Error::Field(format!(
                        "modulus `{m}` has degree {} but F{order} needs degree {k}",
                        coeffs.len().saturating_sub(1)
                    )));
                }
                Field::extension(p, coeffs)
            }
        }
    }
}

pub fn prime_power(n: u64) -> Option<(u64, usize)> {
    if n < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let mut k = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        k += 1;
    }
    if m == 1 && is_prime(p) {
        Some((p, k))
    } else {
        None
    }
}

/// Minimal parser for univariate polynomials in `var` with integer coefficients, reduced mod `p`.
fn parse_univariate_fp(s: &str, var: &str, p: u64) -> Result<Vec<u64>> {
    let ring = crate::algebra::mpoly::Ring::new(Field::prime(p)?, vec![var.to_string()]);
    let f = crate::algebra::mpoly::MPoly::parse(&ring, s)?;
    let mut out = vec![0u64; (f.total_degree().max(0) as usize) + 1];
    for (m, c) in f.terms() {
        let Elem::P(c) = c else { unreachable!() };
        out[m.exp(0) as usize] = *c;
    }
    fp_poly::trim(&mut out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_round_trip() {
        for s in ["Q", "F5", "F9:t^2+1", "F8"] {
            let f: Field = s.parse().unwrap();
            let again: Field = f.to_string().parse().unwrap();
            assert_eq!(f, again);
        }
        assert!("F6".parse::<Field>().is_err());
    }

    #[test]
    fn reducible_modulus_rejected() {
        // t^2 - 1 = (t - 1)(t + 1) over F_3
        assert!("F9:t^2-1".parse::<Field>().is_err());
    }

    #[test]
    fn extension_inverse() {
        let f: Field = "F9:t^2+1".parse().unwrap();
        for a in f.elements().into_iter().filter(|a| !f.is_zero(a)) {
            assert!(f.is_one(&f.mul(&a, &f.inv(&a))));
        }
    }

    #[test]
    fn rationals_reduce_mod_p() {
        let f = Field::Prime(7);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.from_rational(&half).unwrap(), Elem::P(4));
        assert!(Field::Prime(2).from_rational(&half).is_err());
    }

    #[test]
    fn deterministic_modulus() {
        // first monic irreducible quadratic over F_3 in lexicographic order: t^2 + 1
        assert_eq!(fp_poly::first_irreducible(3, 2), vec![1, 0, 1]);
        assert_eq!(fp_poly::first_irreducible(2, 3), vec![1, 1, 0, 1]);
    }

    #[test]
    fn pth_root_inverts_frobenius() {
        let f = Field::galois(5, 3).unwrap();
        for a in f.elements() {
            assert_eq!(f.pth_root(&f.frobenius(&a)), a);
        }
    }
}
