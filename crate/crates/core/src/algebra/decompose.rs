//! Minimal primes and geometric integrality.
//!
//! Components are found by splitting on factorizations of generators, then by a
//! primitive-element reduction over a maximal independent set `U`: on the open set where
//! the leading coefficients in `K[U]` are invertible the ideal becomes zero-dimensional over
//! `K(U)`, a generic linear form `s` has a minimal polynomial `M(U, s)`, and the factors of
//! `M` cut out the components. Each component is certified prime by comparing
//! `dim_{K(U)}` of its quotient with `deg_s` of its factor.

use super::extension::Embedding;
use super::factor::{factor, is_irreducible};
use super::field::Field;
use super::ideal::{count_standard, Ideal};
use super::mpoly::{MPoly, Mono, MonoOrder, Ring, RingRef};
use crate::error::{Error, Result};

const LINEAR_FORM_TRIES: u64 = 24;

/// Minimal primes of `I`, sorted by their canonical key; empty for the unit ideal.
pub fn minimal_primes(i: &Ideal) -> Result<Vec<Ideal>> {
    if i.is_unit() {
        return Ok(vec![]);
    }
    let mut primes = Vec::new();
    for part in split_by_factors(i, 0)? {
        primes.extend(gtz(&part, 0)?);
    }
    Ok(minimalize(primes))
}

/// Remove duplicates and non-minimal members; sort deterministically.
pub fn minimalize(primes: Vec<Ideal>) -> Vec<Ideal> {
    let primes: Vec<Ideal> = primes.into_iter().map(|p| p.with_basis()).collect();
    let mut keep: Vec<Ideal> = Vec::new();
    for (k, p) in primes.iter().enumerate() {
        let dominated = primes.iter().enumerate().any(|(j, q)| {
            j != k && p.contains_ideal(q) && (!q.contains_ideal(p) || j < k)
        });
        if !dominated {
            keep.push(p.clone());
        }
    }
    keep.sort_by_key(|p| p.key());
    keep
}

/// Split `I` along factorizations of its basis elements.
fn split_by_factors(i: &Ideal, depth: usize) -> Result<Vec<Ideal>> {
    if i.is_unit() {
        return Ok(vec![]);
    }
    if depth > 12 {
        return Ok(vec![i.clone()]);
    }
    let gb = i.gb().to_vec();
    for (k, g) in gb.iter().enumerate() {
        if g.total_degree() < 2 {
            continue;
        }
        let fac = match factor(g) {
            Ok(f) => f,
            Err(Error::Unsupported { .. }) | Err(Error::DecompositionIncomplete(_)) => continue,
            Err(e) => return Err(e),
        };
        if fac.factors.len() == 1 && fac.factors[0].1 == 1 {
            continue;
        }
        let mut out = Vec::new();
        for (h, _) in &fac.factors {
            let mut gens = gb.clone();
            gens[k] = h.clone();
            out.extend(split_by_factors(&Ideal::new(i.ring(), gens), depth + 1)?);
        }
        return Ok(out);
    }
    Ok(vec![i.clone()])
}

/// Data of an ideal viewed over `K(U)`.
struct Generic {
    vmask: Vec<bool>,
    order: MonoOrder,
    basis: Vec<MPoly>,
    h: MPoly,
}

fn generic(i: &Ideal, u: &[usize]) -> Generic {
    let n = i.ring().nvars();
    let vmask: Vec<bool> = (0..n).map(|k| !u.contains(&k)).collect();
    let order = MonoOrder::Elim(vmask.clone());
    let basis = i.groebner(&order);
    let mut h = MPoly::one(i.ring());
    for g in &basis {
        let c = lc_in_u(g, &vmask, &order);
        if !c.is_constant() && !divides_poly(&c, &h) {
            h = h.mul(&c);
        }
    }
    Generic { vmask, order, basis, h }
}

fn divides_poly(a: &MPoly, b: &MPoly) -> bool {
    super::ideal::divide_exact(b, a).is_some()
}

/// Coefficient in `K[U]` of the leading `V`-monomial of `g`.
fn lc_in_u(g: &MPoly, vmask: &[bool], order: &MonoOrder) -> MPoly {
    let (lm, _) = g.leading(order).unwrap();
    let vpart = |m: &Mono| -> Vec<u16> {
        m.0.iter().zip(vmask).map(|(&e, &v)| if v { e } else { 0 }).collect()
    };
    let target = vpart(lm);
    MPoly::from_terms(
        g.ring(),
        g.terms().filter(|(m, _)| vpart(m) == target).map(|(m, c)| {
            let e: Vec<u16> = m.0.iter().zip(vmask).map(|(&e, &v)| if v { 0 } else { e }).collect();
            (Mono(e), c.clone())
        }),
    )
}

/// `dim_{K(U)} K(U)[V]/I` from a block basis; `None` if infinite or `I ∩ K[U] ≠ 0`.
fn generic_degree(basis: &[MPoly], vmask: &[bool], order: &MonoOrder) -> Option<usize> {
    let n = vmask.len();
    let mut lms = Vec::new();
    for g in basis {
        let (lm, _) = g.leading(order)?;
        let v: Vec<u16> = lm.0.iter().zip(vmask).map(|(&e, &m)| if m { e } else { 0 }).collect();
        if v.iter().all(|&e| e == 0) {
            return None;
        }
        lms.push(Mono(v));
    }
    let vars: Vec<usize> = (0..n).filter(|&k| vmask[k]).collect();
    // finiteness: every V variable needs a pure power among the leading monomials
    for &k in &vars {
        if !lms.iter().any(|m| m.exp(k) > 0 && m.support().all(|j| j == k)) {
            return None;
        }
    }
    Some(count_standard(&lms, n, &vars))
}

/// `[k(V(I)) : k(U)]` for the variables `u`, when `I` is generically finite over `k(U)`.
pub fn degree_over(i: &Ideal, u: &[usize]) -> Option<usize> {
    if i.is_unit() {
        return None;
    }
    let g = generic(i, u);
    generic_degree(&g.basis, &g.vmask, &g.order)
}

/// Linear forms tried as primitive elements, deterministic.
fn linear_form(ring: &RingRef, vars: &[usize], attempt: u64) -> MPoly {
    let f = &ring.field;
    if attempt < vars.len() as u64 {
        return MPoly::var(ring, vars[vars.len() - 1 - attempt as usize]);
    }
    let mut l = MPoly::zero(ring);
    let mut seed = attempt * 7919 + 13;
    for &v in vars.iter().rev() {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let c = f.sample(1 + (seed >> 33) % 9);
        l = l.add(&MPoly::var(ring, v).scale(&c));
    }
    if attempt >= LINEAR_FORM_TRIES / 2 && !vars.is_empty() {
        // nonlinear perturbation helps over very small fields
        let v = vars[(attempt as usize) % vars.len()];
        l = l.add(&MPoly::var(ring, v).pow(2));
    }
    l
}

fn gtz(i: &Ideal, depth: usize) -> Result<Vec<Ideal>> {
    if i.is_unit() {
        return Ok(vec![]);
    }
    if depth > 2 * i.ring().nvars() + 4 {
        return Err(Error::DecompositionIncomplete("recursion on lower-dimensional loci did not terminate".into()));
    }
    let u = i.independent_set().unwrap();
    let gen = generic(i, &u);
    let sat = if gen.h.is_constant() { i.clone() } else { i.saturate_poly(&gen.h) };
    let mut out = top_components(&sat, &u)?;
    if !gen.h.is_constant() {
        out.extend(gtz(&i.add_gens(&[gen.h.clone()]), depth + 1)?);
    }
    Ok(out)
}

/// Components of an ideal whose associated primes all have `U` independent.
fn top_components(sat: &Ideal, u: &[usize]) -> Result<Vec<Ideal>> {
    if sat.is_unit() {
        return Ok(vec![]);
    }
    let ring = sat.ring().clone();
    let n = ring.nvars();
    let vars: Vec<usize> = (0..n).filter(|k| !u.contains(k)).collect();
    if vars.is_empty() {
        // I ∩ K[U] = 0 with U all variables: I = 0 after saturation
        return Ok(vec![sat.clone()]);
    }
    let mut svars = ring.vars.clone();
    let mut sname = "s".to_string();
    while svars.contains(&sname) {
        sname.push('_');
    }
    svars.push(sname);
    let big = Ring::new(ring.field.clone(), svars);
    let ident: Vec<usize> = (0..n).collect();
    let sat_big = sat.rename(&big, &ident);
    let mut keep: Vec<usize> = u.to_vec();
    keep.push(n);
    'attempt: for attempt in 0..LINEAR_FORM_TRIES {
        let l = linear_form(&ring, &vars, attempt);
        let lb = l.rename(&big, &ident);
        let s = MPoly::var(&big, n);
        let j = sat_big.add_gens(&[s.sub(&lb)]);
        let elim = j.eliminate_in_place(&keep);
        let Some(m) = elim
            .gens()
            .iter()
            .filter(|g| g.involves(n))
            .min_by_key(|g| (g.degree_in(n), g.num_terms()))
            .cloned()
        else {
            continue;
        };
        let fac = factor(&m)?;
        let mut comps = Vec::new();
        for (mj, _) in &fac.factors {
            if !mj.involves(n) {
                continue;
            }
            // substitute s = l back into the original ring
            let mut images: Vec<MPoly> = (0..n).map(|k| MPoly::var(&ring, k)).collect();
            images.push(l.clone());
            let mj_x = mj.compose(&images);
            let jj = sat.add_gens(&[mj_x]);
            let g2 = generic(&jj, u);
            let pj = if g2.h.is_constant() { jj } else { jj.saturate_poly(&g2.h) };
            if pj.is_unit() {
                continue;
            }
            let g3 = generic(&pj, u);
            match generic_degree(&g3.basis, &g3.vmask, &g3.order) {
                Some(d) if d as i64 == mj.degree_in(n) => comps.push(pj.with_basis()),
                _ => continue 'attempt,
            }
        }
        if comps.is_empty() {
            continue;
        }
        return Ok(comps);
    }
    Err(Error::DecompositionIncomplete(format!(
        "no separating element found for {sat} over the independent set {:?}",
        u.iter().map(|&k| ring.vars[k].clone()).collect::<Vec<_>>()
    )))
}

/// Whether `I` is prime (certified); errors propagate from the decomposition.
pub fn is_prime(i: &Ideal) -> Result<bool> {
    let mp = minimal_primes(i)?;
    Ok(mp.len() == 1 && i.contains_ideal(&mp[0]))
}

/// Whether `I` is radical (equal to the intersection of its minimal primes).
pub fn is_radical(i: &Ideal) -> Result<bool> {
    let mp = minimal_primes(i)?;
    if mp.is_empty() {
        return Ok(true);
    }
    let inter = mp[1..].iter().fold(mp[0].clone(), |a, p| a.intersect(p));
    Ok(i.contains_ideal(&inter))
}

/// Radical of `I` as the intersection of its minimal primes.
pub fn radical(i: &Ideal) -> Result<Ideal> {
    let mp = minimal_primes(i)?;
    if mp.is_empty() {
        return Ok(Ideal::unit(i.ring()));
    }
    Ok(mp[1..].iter().fold(mp[0].clone(), |a, p| a.intersect(p)))
}

/// Primitive-element hypersurface `M(U, s)` of a prime ideal, in the ring `K[U, s]`.
fn primitive_hypersurface(p: &Ideal) -> Result<MPoly> {
    let ring = p.ring().clone();
    let n = ring.nvars();
    let u = p.independent_set().unwrap();
    let vars: Vec<usize> = (0..n).filter(|k| !u.contains(k)).collect();
    let mut names: Vec<String> = u.iter().map(|&k| ring.vars[k].clone()).collect();
    names.push("s_".into());
    let small = Ring::new(ring.field.clone(), names);
    if vars.is_empty() {
        return Ok(MPoly::var(&small, u.len()));
    }
    let mut svars = ring.vars.clone();
    svars.push("s_".into());
    let big = Ring::new(ring.field.clone(), svars);
    let ident: Vec<usize> = (0..n).collect();
    let pb = p.rename(&big, &ident);
    let mut keep = u.clone();
    keep.push(n);
    let total = p.with_basis();
    let g = generic(&total, &u);
    let target = generic_degree(&g.basis, &g.vmask, &g.order)
        .ok_or_else(|| Error::DecompositionIncomplete("prime is not generically finite".into()))?;
    for attempt in 0..LINEAR_FORM_TRIES {
        let l = linear_form(&ring, &vars, attempt);
        let s = MPoly::var(&big, n);
        let elim = pb.add_gens(&[s.sub(&l.rename(&big, &ident))]).eliminate(&keep);
        if let Some(m) = elim.gens().iter().find(|g| g.involves(u.len())) {
            if m.degree_in(u.len()) as usize == target {
                return Ok(m.clone());
            }
        }
        let _ = &small;
    }
    Err(Error::DecompositionIncomplete("no primitive element found".into()))
}

/// Geometric integrality of a prime ideal.
///
/// Finite fields: the primitive hypersurface is irreducible over the extension of degree
/// its total degree. Rationals: a reduction modulo a prime preserving total degree is
/// absolutely irreducible. Non-prime input returns `false`.
pub fn is_geometrically_integral(i: &Ideal) -> Result<bool> {
    if !is_prime(i)? {
        return Ok(false);
    }
    let m = primitive_hypersurface(i)?;
    absolutely_irreducible(&m)
}

/// Absolute irreducibility of a polynomial (see [`is_geometrically_integral`]).
pub fn absolutely_irreducible(m: &MPoly) -> Result<bool> {
    let d = m.total_degree();
    if d <= 1 {
        return Ok(d == 1);
    }
    let field = m.field().clone();
    match &field {
        Field::Rationals => {
            if !is_irreducible(m)? {
                return Ok(false);
            }
            let prim = m.primitive_associate();
            for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
                let fp = Field::Prime(p);
                let ring = Ring::new(fp.clone(), m.ring().vars.clone());
                let Ok(mp) = prim.map_coeffs(&ring, |c| fp.from_rational(field.as_rational(c).unwrap())) else {
                    continue;
                };
                if mp.total_degree() != d {
                    continue;
                }
                if finite_absolutely_irreducible(&mp)? {
                    return Ok(true);
                }
            }
            Err(Error::Undecided(format!("no reduction certifies absolute irreducibility of {m}")))
        }
        _ => finite_absolutely_irreducible(m),
    }
}

fn finite_absolutely_irreducible(m: &MPoly) -> Result<bool> {
    if !is_irreducible(m)? {
        return Ok(false);
    }
    let field = m.field().clone();
    let d = m.total_degree() as usize;
    let big = Field::galois(field.characteristic(), field.degree() * d)?;
    let emb = Embedding::new(&field, &big)?;
    let ring = Ring::new(big, m.ring().vars.clone());
    is_irreducible(&emb.map_poly(m, &ring))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ideal(field: Field, vars: &[&str], g: &[&str]) -> Ideal {
        let r = Ring::new(field, vars.iter().map(|s| s.to_string()).collect());
        Ideal::parse(&r, g).unwrap()
    }

    fn keys(v: &[Ideal]) -> Vec<String> {
        v.iter().map(|p| p.key()).collect()
    }

    #[test]
    fn decomposition_examples() {
        let q = Field::Rationals;
        let xy = minimal_primes(&ideal(q.clone(), &["x", "y"], &["x*y"])).unwrap();
        assert_eq!(keys(&xy), vec!["x", "y"]);
        let sq = minimal_primes(&ideal(q.clone(), &["x", "y"], &["x^2 - y^2"])).unwrap();
        assert_eq!(keys(&sq), vec!["x + y", "x - y"]);
        let pts = minimal_primes(&ideal(q.clone(), &["x", "y"], &["y - x^2", "y - 1"])).unwrap();
        assert_eq!(keys(&pts), vec!["x + 1,y - 1", "x - 1,y - 1"]);
        assert!(minimal_primes(&ideal(q, &["x"], &["1"])).unwrap().is_empty());
    }

    #[test]
    fn embedded_and_nonreduced() {
        let q = Field::Rationals;
        // (x^2, x*y): radical (x)
        let mp = minimal_primes(&ideal(q.clone(), &["x", "y"], &["x^2", "x*y"])).unwrap();
        assert_eq!(keys(&mp), vec!["x"]);
        // twisted cubic is prime
        let tc = ideal(q, &["x", "y", "z"], &["y - x^2", "z - x^3"]);
        assert!(is_prime(&tc).unwrap());
    }

    #[test]
    fn irreducible_but_not_split_over_the_base() {
        // x^2 + 1 over Q: one maximal ideal of degree 2
        let mp = minimal_primes(&ideal(Field::Rationals, &["x", "y"], &["x^2 + 1", "y"])).unwrap();
        assert_eq!(mp.len(), 1);
        // x^2 + y^2 over F3 is prime, over F5 it splits
        let f3 = ideal(Field::Prime(3), &["x", "y"], &["x^2 + y^2"]);
        assert!(is_prime(&f3).unwrap());
        let f5 = ideal(Field::Prime(5), &["x", "y"], &["x^2 + y^2"]);
        assert_eq!(minimal_primes(&f5).unwrap().len(), 2);
    }

    #[test]
    fn geometric_integrality_examples() {
        let f5 = Field::Prime(5);
        assert!(is_geometrically_integral(&ideal(f5.clone(), &["x", "y"], &["y - x^2"])).unwrap());
        assert!(!is_geometrically_integral(&ideal(Field::Prime(3), &["x", "y"], &["x^2 + y^2"])).unwrap());
        assert!(!is_geometrically_integral(&ideal(f5, &["x", "y"], &["x^2 + y^2"])).unwrap());
        let q = Field::Rationals;
        assert!(is_geometrically_integral(&ideal(q.clone(), &["x", "y"], &["y^2 - x^3 - x"])).unwrap());
        assert!(matches!(
            is_geometrically_integral(&ideal(q, &["x", "y"], &["x^2 + y^2"])),
            Err(Error::Undecided(_))
        ));
    }
}
