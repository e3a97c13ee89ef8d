//! Polynomial factorization.
//!
//! Univariate: Cantor–Zassenhaus over finite fields, Zassenhaus with Hensel lifting over
//! the rationals. Multivariate: Kronecker substitution followed by recombination of the
//! univariate factors and trial division.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::field::{is_prime, Elem, Field};
use super::ideal::{divide_exact, Ideal};
use super::mpoly::{MPoly, Mono, RingRef};
use super::upoly::UPoly;
use crate::error::{Error, Result};

/// `unit * prod(factor^mult)`; factors are monic (finite fields) or primitive with
/// positive leading coefficient (rationals), sorted deterministically.
#[derive(Clone, Debug)]
pub struct Factorization<P> {
    pub unit: Elem,
    pub factors: Vec<(P, u32)>,
}

const SEED: u64 = 0x5eed_f00d;

fn rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED)
}

// ---------------------------------------------------------------- finite fields

fn random_poly(f: &Field, deg: usize, rng: &mut ChaCha8Rng) -> UPoly {
    let ord = f.order().unwrap();
    let c = (0..deg).map(|_| f.elem_from_index((rng.gen::<u64>() as u128 % ord) as u64)).collect();
    UPoly::new(f, c)
}

/// Square-free decomposition over a finite field: `f = lc * prod(g_i^i)`.
pub fn squarefree_fq(f: &UPoly) -> Vec<(UPoly, u32)> {
    let field = &f.field;
    let p = field.characteristic() as u32;
    let mut out: Vec<(UPoly, u32)> = Vec::new();
    let f = f.monic();
    if f.deg() <= 0 {
        return out;
    }
    let df = f.derivative();
    if df.is_zero() {
        // f = g(x^p)
        let g = pth_root_poly(&f);
        for (h, m) in squarefree_fq(&g) {
            out.push((h, m * p));
        }
        return merge(out);
    }
    let mut c = f.gcd(&df);
    let mut w = f.div_exact(&c).unwrap();
    let mut i = 1u32;
    while w.deg() > 0 {
        let y = w.gcd(&c);
        let z = w.div_exact(&y).unwrap();
        if z.deg() > 0 {
            out.push((z.monic(), i));
        }
        i += 1;
        w = y;
        c = c.div_exact(&w).unwrap();
    }
    if c.deg() > 0 {
        let g = pth_root_poly(&c);
        for (h, m) in squarefree_fq(&g) {
            out.push((h, m * p));
        }
    }
    merge(out)
}

fn merge(v: Vec<(UPoly, u32)>) -> Vec<(UPoly, u32)> {
    let mut out: Vec<(UPoly, u32)> = Vec::new();
    for (g, m) in v {
        if let Some(e) = out.iter_mut().find(|(h, _)| *h == g) {
            e.1 += m;
        } else {
            out.push((g, m));
        }
    }
    out
}

fn pth_root_poly(f: &UPoly) -> UPoly {
    let field = &f.field;
    let p = field.characteristic() as usize;
    let c = f.c.iter().step_by(p).map(|a| field.pth_root(a)).collect();
    UPoly::new(field, c)
}

/// Distinct-degree factorization of a monic square-free polynomial.
pub fn ddf(f: &UPoly) -> Vec<(UPoly, usize)> {
    let field = &f.field;
    let k = field.degree();
    let x = UPoly::x(field);
    let mut out = Vec::new();
    let mut rest = f.clone();
    let mut h = x.rem(&rest);
    let mut d = 0;
    while rest.deg() >= 2 * (d as isize + 1) {
        d += 1;
        h = h.frobenius_powmod(k, &rest);
        let g = rest.gcd(&h.sub(&x));
        if g.deg() > 0 {
            rest = rest.div_exact(&g).unwrap();
            h = h.rem(&rest);
            out.push((g, d));
        }
    }
    if rest.deg() > 0 {
        let d = rest.deg() as usize;
        out.push((rest, d));
    }
    out
}

/// Equal-degree factorization: `f` monic square-free with all factors of degree `d`.
pub fn edf(f: &UPoly, d: usize, rng: &mut ChaCha8Rng) -> Vec<UPoly> {
    let n = f.deg() as usize;
    if n == d {
        return vec![f.clone()];
    }
    let field = &f.field;
    let k = field.degree();
    let p = field.characteristic();
    loop {
        let a = random_poly(field, n, rng);
        if a.deg() < 1 {
            continue;
        }
        let b = if p == 2 {
            // trace to F_2: sum of a^(2^i), i < k*d
            let mut t = a.rem(f);
            let mut acc = t.clone();
            for _ in 1..k * d {
                t = t.mulmod(&t, f);
                acc = acc.add(&t);
            }
            acc
        } else {
            // a^((q^d - 1)/2) = (prod_{i<d} a^(q^i))^((q-1)/2)
            let q = field.order().unwrap();
            let mut prod = UPoly::one(field);
            let mut t = a.rem(f);
            for i in 0..d {
                if i > 0 {
                    t = t.frobenius_powmod(k, f);
                }
                prod = prod.mulmod(&t, f);
            }
            prod.powmod((q - 1) / 2, f).sub(&UPoly::one(field))
        };
        let g = f.gcd(&b);
        if g.deg() > 0 && g.deg() < f.deg() {
            let h = f.div_exact(&g).unwrap();
            let mut out = edf(&g, d, rng);
            out.extend(edf(&h, d, rng));
            return out;
        }
    }
}

fn sort_factors(v: &mut [(UPoly, u32)]) {
    v.sort_by(|a, b| {
        a.0.deg().cmp(&b.0.deg()).then_with(|| {
            let f = &a.0.field;
            let ka: Vec<String> = a.0.c.iter().rev().map(|x| f.format_elem(x, "t")).collect();
            let kb: Vec<String> = b.0.c.iter().rev().map(|x| f.format_elem(x, "t")).collect();
            ka.cmp(&kb)
        })
    });
}

fn factor_fq(f: &UPoly) -> Factorization<UPoly> {
    let mut rng = rng();
    let mut out = Vec::new();
    for (g, m) in squarefree_fq(f) {
        for (h, d) in ddf(&g) {
            for e in edf(&h, d, &mut rng) {
                out.push((e.monic(), m));
            }
        }
    }
    sort_factors(&mut out);
    Factorization { unit: f.lc(), factors: out }
}

/// All roots of `f` in its coefficient field (finite fields only), sorted by index.
pub fn roots_fq(f: &UPoly) -> Vec<Elem> {
    let field = &f.field;
    if f.deg() <= 0 {
        return vec![];
    }
    let f = f.monic();
    let x = UPoly::x(field);
    let xq = x.frobenius_powmod(field.degree(), &f);
    let g = f.gcd(&xq.sub(&x));
    if g.deg() <= 0 {
        return vec![];
    }
    let mut rng = rng();
    let mut roots: Vec<Elem> =
        edf(&g, 1, &mut rng).into_iter().map(|l| field.neg(&l.monic().coeff(0))).collect();
    roots.sort_by_key(|r| field.index_of(r));
    roots
}

// ---------------------------------------------------------------- rationals

type ZPoly = Vec<BigInt>;

fn zp_trim(a: &mut ZPoly) {
    while a.last().map(|c| c.is_zero()).unwrap_or(false) {
        a.pop();
    }
}

fn zp_mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    zp_trim(&mut r);
    r
}

fn zp_mod(a: &[BigInt], m: &BigInt) -> ZPoly {
    let mut r: ZPoly = a.iter().map(|c| c.mod_floor(m)).collect();
    zp_trim(&mut r);
    r
}

fn zp_symmetric(a: &[BigInt], m: &BigInt) -> ZPoly {
    let half = m / 2;
    let mut r: ZPoly = a
        .iter()
        .map(|c| {
            let c = c.mod_floor(m);
            if c > half {
                c - m
            } else {
                c
            }
        })
        .collect();
    zp_trim(&mut r);
    r
}

fn zp_content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
}

fn zp_primitive(a: &[BigInt]) -> ZPoly {
    let c = zp_content(a);
    if c.is_zero() {
        return vec![];
    }
    let sign = if a.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
    a.iter().map(|x| x / &c * &sign).collect()
}

fn to_fp(a: &[BigInt], p: u64) -> UPoly {
    let f = Field::Prime(p);
    UPoly::new(&f, a.iter().map(|c| f.from_bigint(c)).collect())
}

fn from_fp(a: &UPoly) -> ZPoly {
    a.c.iter().map(|e| if let Elem::P(x) = e { BigInt::from(*x) } else { unreachable!() }).collect()
}

/// Exact division in `Z[x]`; `None` if not divisible.
fn zp_divexact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let mut r = a.to_vec();
    zp_trim(&mut r);
    let db = b.len() - 1;
    if r.len() < b.len() {
        return if r.is_empty() { Some(vec![]) } else { None };
    }
    let lb = b.last().unwrap();
    let mut q = vec![BigInt::zero(); r.len() - db];
    while r.len() > db {
        let top = r.last().unwrap().clone();
        let (c, rem) = top.div_rem(lb);
        if !rem.is_zero() {
            return None;
        }
        let shift = r.len() - 1 - db;
        for (i, bc) in b.iter().enumerate() {
            r[shift + i] -= &c * bc;
        }
        q[shift] = c;
        zp_trim(&mut r);
    }
    if r.is_empty() {
        Some(q)
    } else {
        None
    }
}

/// Monic Hensel lifting of `F = G*H (mod p^j)` to modulus `p^(j+1)`.
fn hensel_step(
    big_f: &[BigInt],
    g: &ZPoly,
    h: &ZPoly,
    s: &UPoly,
    t: &UPoly,
    p: u64,
    pj: &BigInt,
) -> (ZPoly, ZPoly) {
    let gh = zp_mul(g, h);
    let mut e: ZPoly = (0..big_f.len().max(gh.len()))
        .map(|i| {
            let a = big_f.get(i).cloned().unwrap_or_default();
            let b = gh.get(i).cloned().unwrap_or_default();
            (a - b) / pj
        })
        .collect();
    zp_trim(&mut e);
    let ep = to_fp(&e, p);
    let gp = to_fp(g, p);
    let hp = to_fp(h, p);
    let dg = ep.mul(t).rem(&gp);
    let dh = ep.mul(s).rem(&hp);
    let add = |a: &ZPoly, d: &UPoly| -> ZPoly {
        let dz = from_fp(d);
        let mut r = a.clone();
        for (i, c) in dz.iter().enumerate() {
            r[i] += c * pj;
        }
        r
    };
    (add(g, &dg), add(h, &dh))
}

/// Lift a monic factorization mod `p` of `F` (monic mod `p^k`) to mod `p^k`.
fn hensel_lift(big_f: &ZPoly, factors: &[UPoly], p: u64, k: u32) -> Vec<ZPoly> {
    if factors.len() == 1 {
        let pk = BigInt::from(p).pow(k);
        return vec![zp_mod(big_f, &pk)];
    }
    let g0 = factors[0].clone();
    let h0 = factors[1..].iter().fold(UPoly::one(&g0.field), |a, b| a.mul(b));
    let (_, s, t) = g0.ext_gcd(&h0);
    let mut g = from_fp(&g0);
    let mut h = from_fp(&h0);
    let mut pj = BigInt::from(p);
    for _ in 1..k {
        let fm = zp_mod(big_f, &(&pj * BigInt::from(p)));
        let (g2, h2) = hensel_step(&fm, &g, &h, &s, &t, p, &pj);
        pj *= BigInt::from(p);
        g = zp_mod(&g2, &pj);
        h = zp_mod(&h2, &pj);
    }
    let mut out = vec![g];
    out.extend(hensel_lift(&h, &factors[1..], p, k));
    out
}

/// Factor a primitive square-free integer polynomial of positive degree.
fn zassenhaus(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.len() - 1;
    if n == 1 {
        return vec![f.clone()];
    }
    let lc = f.last().unwrap().clone();
    // choose a good prime with few modular factors
    let mut best: Option<(u64, Vec<UPoly>)> = None;
    let mut tried = 0;
    let mut p = 2u64;
    while tried < 6 {
        p += 1;
        if !is_prime(p) || (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = to_fp(f, p);
        if fp.deg() != n as isize || fp.gcd(&fp.derivative()).deg() > 0 {
            continue;
        }
        tried += 1;
        let fac = factor_fq(&fp);
        let list: Vec<UPoly> = fac.factors.into_iter().map(|(g, _)| g).collect();
        if list.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().map(|(_, b)| list.len() < b.len()).unwrap_or(true) {
            best = Some((p, list));
        }
    }
    let (p, mut modular) = best.unwrap();
    // coefficient bound for factors times the leading coefficient
    let norm: BigInt = f.iter().map(|c| c.abs()).max().unwrap();
    let bound = BigInt::from(2).pow(n as u32) * (BigInt::from((n + 1) as u64).sqrt() + 1) * norm * lc.abs();
    let mut k = 1u32;
    let mut pk = BigInt::from(p);
    while pk <= &bound * 2 {
        pk *= BigInt::from(p);
        k += 1;
    }
    let lc_inv = mod_inverse(&lc, &pk);
    let monic_f: ZPoly = zp_mod(&f.iter().map(|c| c * &lc_inv).collect::<Vec<_>>(), &pk);
    let mut lifted = hensel_lift(&monic_f, &modular, p, k);
    let mut rest = f.clone();
    let mut out = Vec::new();
    let mut size = 1;
    while 2 * size <= lifted.len() {
        let mut found = false;
        for subset in super::ideal::subsets(lifted.len(), size) {
            let rlc = rest.last().unwrap().clone();
            let mut cand: ZPoly = vec![rlc.clone()];
            for &i in &subset {
                cand = zp_mod(&zp_mul(&cand, &lifted[i]), &pk);
            }
            let cand = zp_primitive(&zp_symmetric(&cand, &pk));
            if cand.len() < 2 {
                continue;
            }
            if let Some(q) = zp_divexact(&rest, &cand) {
                out.push(cand);
                rest = q;
                let keep: Vec<usize> = (0..lifted.len()).filter(|i| !subset.contains(i)).collect();
                lifted = keep.iter().map(|&i| lifted[i].clone()).collect();
                modular = keep.iter().map(|&i| modular[i].clone()).collect();
                found = true;
                break;
            }
        }
        if !found {
            size += 1;
        }
    }
    if rest.len() > 1 {
        out.push(zp_primitive(&rest));
    }
    out
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    e.x.mod_floor(m)
}

fn factor_q(f: &UPoly) -> Factorization<UPoly> {
    let field = Field::Rationals;
    // clear denominators
    let mut den = BigInt::one();
    for c in &f.c {
        if let Elem::Q(q) = c {
            den = den.lcm(q.denom());
        }
    }
    let z: ZPoly = f
        .c
        .iter()
        .map(|c| if let Elem::Q(q) = c { (q * BigRational::from_integer(den.clone())).to_integer() } else { unreachable!() })
        .collect();
    let prim = zp_primitive(&z);
    let mut factors = Vec::new();
    // square-free decomposition over Q (Yun)
    let qp = |v: &ZPoly| UPoly::new(&field, v.iter().map(|c| Elem::Q(BigRational::from_integer(c.clone()))).collect());
    let fq = qp(&prim);
    let mut sqf: Vec<(UPoly, u32)> = Vec::new();
    if fq.deg() > 0 {
        let df = fq.derivative();
        let a = fq.gcd(&df);
        let mut b = fq.div_exact(&a).unwrap();
        let mut c = df.div_exact(&a).unwrap();
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if g.deg() > 0 {
                sqf.push((g.clone(), i));
            }
            b = b.div_exact(&g).unwrap();
            if b.deg() <= 0 {
                break;
            }
            c = d.div_exact(&g).unwrap();
            d = c.sub(&b.derivative());
            i += 1;
        }
    }
    for (g, m) in sqf {
        let gz = to_primitive_z(&g);
        for h in zassenhaus(&gz) {
            factors.push((qp(&h), m));
        }
    }
    sort_factors(&mut factors);
    let prod = factors.iter().fold(UPoly::one(&field), |acc, (g, m)| acc.mul(&g.pow(*m)));
    let unit = field.div(&f.lc(), &prod.lc());
    Factorization { unit, factors }
}

fn to_primitive_z(g: &UPoly) -> ZPoly {
    let mut den = BigInt::one();
    for c in &g.c {
        if let Elem::Q(q) = c {
            den = den.lcm(q.denom());
        }
    }
    let z: ZPoly = g
        .c
        .iter()
        .map(|c| if let Elem::Q(q) = c { (q * BigRational::from_integer(den.clone())).to_integer() } else { unreachable!() })
        .collect();
    zp_primitive(&z)
}

/// Factor a nonzero univariate polynomial into irreducibles with multiplicities.
pub fn factor_univariate(f: &UPoly) -> Result<Factorization<UPoly>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.deg() == 0 {
        return Ok(Factorization { unit: f.lc(), factors: vec![] });
    }
    Ok(match f.field {
        Field::Rationals => factor_q(f),
        _ => factor_fq(f),
    })
}

pub fn is_irreducible_univariate(f: &UPoly) -> Result<bool> {
    let fac = factor_univariate(f)?;
    Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
}

// ---------------------------------------------------------------- multivariate

/// Kronecker map `x_i -> t^(w_i)` with mixed radix `w_i = prod_{j<i} D_j`.
fn kronecker(f: &MPoly, radix: &[u64]) -> UPoly {
    let field = f.field();
    let mut weights = vec![1u64; radix.len()];
    for i in 1..radix.len() {
        weights[i] = weights[i - 1] * radix[i - 1];
    }
    let total: u64 = weights.last().unwrap() * radix.last().unwrap();
    let mut c = vec![field.zero(); total as usize];
    for (m, a) in f.terms() {
        let e: u64 = m.0.iter().zip(&weights).map(|(&x, w)| x as u64 * w).sum();
        c[e as usize] = a.clone();
    }
    UPoly::new(field, c)
}

fn inverse_kronecker(u: &UPoly, radix: &[u64], ring: &RingRef) -> MPoly {
    let n = radix.len();
    let mut terms = Vec::new();
    for (k, a) in u.c.iter().enumerate() {
        if u.field.is_zero(a) {
            continue;
        }
        let mut e = vec![0u16; n];
        let mut r = k as u64;
        for i in 0..n {
            e[i] = (r % radix[i]) as u16;
            r /= radix[i];
        }
        if r != 0 {
            return MPoly::zero(ring);
        }
        terms.push((Mono(e), a.clone()));
    }
    MPoly::from_terms(ring, terms)
}

/// Normalized representative of a multivariate factor.
fn normalize(p: &MPoly) -> MPoly {
    p.primitive_associate()
}

/// Limit on the number of univariate image factors tried in recombination.
const MAX_RECOMBINATION: usize = 22;

/// Factor a multivariate polynomial into irreducibles over its coefficient field.
pub fn factor(f: &MPoly) -> Result<Factorization<MPoly>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let field = f.field().clone();
    let ring = f.ring().clone();
    if f.is_constant() {
        return Ok(Factorization { unit: f.constant_value().unwrap(), factors: vec![] });
    }
    // strip monomial content first
    let n = f.nvars();
    let mut mono_content = vec![u16::MAX; n];
    for (m, _) in f.terms() {
        for i in 0..n {
            mono_content[i] = mono_content[i].min(m.exp(i));
        }
    }
    let mut factors: Vec<(MPoly, u32)> = Vec::new();
    let mut rest = f.clone();
    if mono_content.iter().any(|&e| e > 0) {
        let m = Mono(mono_content.clone());
        rest = divide_exact(&rest, &MPoly::monomial(&ring, m, field.one())).unwrap();
        for (i, &e) in mono_content.iter().enumerate() {
            if e > 0 {
                factors.push((MPoly::var(&ring, i), e as u32));
            }
        }
    }
    if !rest.is_constant() {
        let support = rest.support();
        if support.len() == 1 {
            let i = support[0];
            let u = UPoly::from_mpoly(&rest, i);
            for (g, m) in factor_univariate(&u)?.factors {
                factors.push((normalize(&g.to_mpoly(&ring, i)), m));
            }
        } else {
            let radix: Vec<u64> = (0..n).map(|i| rest.degree_in(i).max(0) as u64 + 1).collect();
            let total: u64 = radix.iter().product();
            if total > 4096 {
                return Err(Error::unsupported(
                    "factor",
                    format!("Kronecker image of degree {total} exceeds the desk-scale limit"),
                ));
            }
            let u = kronecker(&rest, &radix);
            let fac = factor_univariate(&u)?;
            let mut pool: Vec<UPoly> = Vec::new();
            for (g, m) in &fac.factors {
                for _ in 0..*m {
                    pool.push(g.clone());
                }
            }
            if pool.len() > MAX_RECOMBINATION {
                return Err(Error::DecompositionIncomplete(format!(
                    "{} univariate image factors exceed the recombination limit",
                    pool.len()
                )));
            }
            let mut size = 1;
            while size <= pool.len() && !rest.is_constant() {
                let mut found = false;
                let mut seen = std::collections::BTreeSet::new();
                for subset in super::ideal::subsets(pool.len(), size) {
                    let key: Vec<String> = subset.iter().map(|&i| format!("{:?}", pool[i])).collect();
                    if !seen.insert(key) {
                        continue;
                    }
                    let prod = subset.iter().fold(UPoly::one(&field), |a, &i| a.mul(&pool[i]));
                    let cand = inverse_kronecker(&prod, &radix, &ring);
                    if cand.is_zero() || cand.is_constant() {
                        continue;
                    }
                    if let Some(q) = divide_exact(&rest, &cand) {
                        let cand = normalize(&cand);
                        let mut mult = 1;
                        rest = q;
                        let mut drop: Vec<usize> = subset.clone();
                        while let Some(q2) = divide_exact(&rest, &cand) {
                            rest = q2;
                            mult += 1;
                            // remove another copy of the same univariate factors
                            let img = kronecker(&cand, &radix);
                            let mut img_left = img;
                            for (k, g) in pool.iter().enumerate() {
                                if drop.contains(&k) {
                                    continue;
                                }
                                if let Some(r) = img_left.div_exact(g) {
                                    if g.deg() > 0 {
                                        img_left = r;
                                        drop.push(k);
                                    }
                                }
                                if img_left.deg() == 0 {
                                    break;
                                }
                            }
                        }
                        factors.push((cand, mult));
                        pool = pool
                            .iter()
                            .enumerate()
                            .filter(|(k, _)| !drop.contains(k))
                            .map(|(_, g)| g.clone())
                            .collect();
                        found = true;
                        break;
                    }
                }
                if !found {
                    size += 1;
                }
            }
            if !rest.is_constant() {
                factors.push((normalize(&rest), 1));
            }
        }
    }
    // merge equal factors and compute the unit
    let mut merged: Vec<(MPoly, u32)> = Vec::new();
    for (g, m) in factors {
        if let Some(e) = merged.iter_mut().find(|(h, _)| *h == g) {
            e.1 += m;
        } else {
            merged.push((g, m));
        }
    }
    merged.sort_by(|a, b| {
        a.0.total_degree().cmp(&b.0.total_degree()).then_with(|| a.0.to_string().cmp(&b.0.to_string()))
    });
    let prod = merged.iter().fold(MPoly::one(&ring), |acc, (g, m)| acc.mul(&g.pow(*m)));
    let unit = divide_exact(f, &prod)
        .and_then(|u| u.constant_value())
        .ok_or_else(|| Error::DecompositionIncomplete("factor product mismatch".into()))?;
    Ok(Factorization { unit, factors: merged })
}

/// Product of the distinct irreducible factors.
pub fn squarefree_part(f: &MPoly) -> Result<MPoly> {
    let fac = factor(f)?;
    Ok(fac.factors.iter().fold(MPoly::one(f.ring()), |a, (g, _)| a.mul(g)))
}

pub fn is_irreducible(f: &MPoly) -> Result<bool> {
    let fac = factor(f)?;
    Ok(fac.factors.len() == 1 && fac.factors[0].1 == 1)
}

/// Least common multiple via ideal intersection.
pub fn lcm(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() || b.is_zero() {
        return MPoly::zero(a.ring());
    }
    let ring = a.ring();
    let i = Ideal::new(ring, vec![a.clone()]).intersect(&Ideal::new(ring, vec![b.clone()]));
    let g = i.gb();
    normalize(&g[0])
}

pub fn gcd(a: &MPoly, b: &MPoly) -> MPoly {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    let l = lcm(a, b);
    normalize(&divide_exact(&a.mul(b), &l).expect("lcm divides the product"))
}

/// Decimal value of a small rational coefficient, used by tests.
pub fn small_int(e: &Elem) -> Option<i64> {
    match e {
        Elem::Q(q) if q.is_integer() => q.to_integer().to_i64(),
        Elem::P(x) => Some(*x as i64),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::mpoly::Ring;

    fn up(field: &Field, c: &[i64]) -> UPoly {
        UPoly::from_i64s(field, c)
    }

    fn product(fac: &Factorization<UPoly>) -> UPoly {
        fac.factors
            .iter()
            .fold(UPoly::constant(&fac.factors[0].0.field, fac.unit.clone()), |a, (g, m)| a.mul(&g.pow(*m)))
    }

    #[test]
    fn fp_examples() {
        let f7 = Field::Prime(7);
        let fac = factor_univariate(&up(&f7, &[-1, 0, 1])).unwrap();
        let got: Vec<UPoly> = fac.factors.iter().map(|(g, _)| g.clone()).collect();
        assert_eq!(got, vec![up(&f7, &[-1, 1]), up(&f7, &[1, 1])]);

        let f3 = Field::Prime(3);
        assert!(is_irreducible_univariate(&up(&f3, &[1, 0, 1])).unwrap());

        // 3^2 = 2 mod 7
        let fac = factor_univariate(&up(&f7, &[-2, 0, 1])).unwrap();
        let got: Vec<UPoly> = fac.factors.iter().map(|(g, _)| g.clone()).collect();
        assert_eq!(got, vec![up(&f7, &[-3, 1]), up(&f7, &[-4, 1])]);
        assert!(factor_univariate(&UPoly::zero(&f7)).is_err());
    }

    #[test]
    fn fp_multiplicities_and_pth_powers() {
        let f3 = Field::Prime(3);
        // (x+1)^3 (x^2+1)^2 x
        let f = up(&f3, &[1, 1]).pow(3).mul(&up(&f3, &[1, 0, 1]).pow(2)).mul(&up(&f3, &[0, 1]));
        let fac = factor_univariate(&f).unwrap();
        assert_eq!(product(&fac), f);
        let mults: Vec<u32> = fac.factors.iter().map(|(_, m)| *m).collect();
        assert_eq!(mults, vec![1, 3, 2]);
    }

    #[test]
    fn extension_field_factoring() {
        let f9: Field = "F9".parse().unwrap();
        // x^2 + 1 splits over F9
        let fac = factor_univariate(&up(&f9, &[1, 0, 1])).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert_eq!(product(&fac), up(&f9, &[1, 0, 1]));
        let f4: Field = "F4".parse().unwrap();
        // x^4 + x = x (x+1) (x^2+x+1) over F2 splits completely over F4
        let fac = factor_univariate(&up(&f4, &[0, 1, 0, 0, 1])).unwrap();
        assert_eq!(fac.factors.len(), 4);
        assert_eq!(roots_fq(&up(&f4, &[0, 1, 0, 0, 1])).len(), 4);
    }

    #[test]
    fn rational_factoring() {
        let q = Field::Rationals;
        // (x^2 - 2)(x^2 + x + 1)(2x - 3)^2
        let f = up(&q, &[-2, 0, 1]).mul(&up(&q, &[1, 1, 1])).mul(&up(&q, &[-3, 2]).pow(2));
        let fac = factor_univariate(&f).unwrap();
        assert_eq!(product(&fac), f);
        assert_eq!(fac.factors.len(), 3);
        // Swinnerton-Dyer style: x^4 - 10x^2 + 1 is irreducible over Q
        assert!(is_irreducible_univariate(&up(&q, &[1, 0, -10, 0, 1])).unwrap());
        // x^6 - 1 = (x-1)(x+1)(x^2+x+1)(x^2-x+1)
        let fac = factor_univariate(&up(&q, &[-1, 0, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!(fac.factors.len(), 4);
    }

    #[test]
    fn multivariate_factoring() {
        let r = Ring::new(Field::Rationals, vec!["x".into(), "y".into()]);
        let f = MPoly::parse(&r, "x^2 - y^2").unwrap();
        let fac = factor(&f).unwrap();
        let got: Vec<String> = fac.factors.iter().map(|(g, _)| g.to_string()).collect();
        assert_eq!(got, vec!["x + y", "x - y"]);
        let g = MPoly::parse(&r, "x^2*y - x*y^3 + 2*x - 2*y^2").unwrap();
        let fac = factor(&g).unwrap();
        assert_eq!(fac.factors.len(), 2);
        let f3 = Ring::new(Field::Prime(3), vec!["x".into(), "y".into()]);
        assert!(is_irreducible(&MPoly::parse(&f3, "x^2 + y^2").unwrap()).unwrap());
        let f9 = Ring::new("F9".parse().unwrap(), vec!["x".into(), "y".into()]);
        assert!(!is_irreducible(&MPoly::parse(&f9, "x^2 + y^2").unwrap()).unwrap());
    }

    #[test]
    fn gcd_and_lcm() {
        let r = Ring::new(Field::Rationals, vec!["x".into(), "y".into()]);
        let a = MPoly::parse(&r, "(x + y)^2*(x - 1)").unwrap();
        let b = MPoly::parse(&r, "(x + y)*(y - 2)").unwrap();
        assert_eq!(gcd(&a, &b), MPoly::parse(&r, "x + y").unwrap());
    }
}
