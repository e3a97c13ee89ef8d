//! Constructions of covers: splitting covers, Galois closures, pushforwards along
//! fibrations and refinement of almost direct covers.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::algebra::decompose::minimal_primes;
use crate::algebra::groebner::{groebner_basis, normal_form};
use crate::algebra::{Ideal, MPoly, MonoOrder, Ring};
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::presentation::{fresh_names, product_list, Morphism, Presentation};

/// The splitting cover of `f(x̄, t)` over `base`: coordinates `(x̄, t₁..t_d)` with
/// `lc(f)·e_k(t) = (−1)^k a_{d−k}(x̄)` and `S_d` permuting the roots.
///
/// `f` lives in `base.x` extended by one variable `t`. When `sigma = (c, h)` is given, with
/// `c, h` in `base.xy` extended by `t`, the correspondence is `c·s_i = h(x̄, ȳ, t_i)`; otherwise
/// it is the whole fibre product, which makes the cover almost direct.
pub fn splitting_cover(
    base: Arc<Presentation>,
    f: &MPoly,
    sigma: Option<(&MPoly, &MPoly)>,
) -> Result<(Cover, Vec<Vec<usize>>)> {
    let n = base.n();
    let d = f.degree_in(n);
    if d < 1 {
        return Err(Error::unsupported("splitting-cover", "polynomial has no roots to permute"));
    }
    let d = d as usize;
    let coeffs = f.coefficients_in(n);
    let mut taken = base.xy.vars.clone();
    let ts = fresh_names("t", d, 1, &taken);
    taken.extend(ts.iter().cloned());
    let ss = fresh_names("s", d, 1, &taken);
    let mut zs = base.xs().to_vec();
    zs.extend(ts);
    let mut ws = base.ys().to_vec();
    ws.extend(ss);
    let (zx, zxy) = Presentation::rings(&base.field, &zs, &ws)?;
    let xmap: Vec<usize> = (0..n).chain([usize::MAX]).collect();
    let lc = coeffs[d].rename(&zx, &xmap);
    let t = |i: usize| MPoly::var(&zx, n + i);
    let mut rel = Vec::new();
    // elementary symmetric polynomials by the product expansion
    let mut e: Vec<MPoly> = vec![MPoly::one(&zx)];
    for i in 0..d {
        let mut next = vec![MPoly::zero(&zx); e.len() + 1];
        for (k, ek) in e.iter().enumerate() {
            next[k] = next[k].add(ek);
            next[k + 1] = next[k + 1].add(&ek.mul(&t(i)));
        }
        e = next;
    }
    for k in 1..=d {
        let a = coeffs[d - k].rename(&zx, &xmap);
        let rhs = if k % 2 == 0 { a } else { a.neg() };
        rel.push(lc.mul(&e[k]).sub(&rhs));
    }
    let mut vander = lc.clone();
    for i in 0..d {
        for j in i + 1..d {
            vander = vander.mul(&t(i).sub(&t(j)));
        }
    }
    let bmap0: Vec<usize> = (0..n).collect();
    let zbase: Vec<MPoly> = base.i0.gens().iter().map(|g| g.rename(&zx, &bmap0)).collect();
    let mut i0 = zbase;
    i0.extend(rel);
    let base_open0: Vec<MPoly> = base.open0.iter().map(|g| g.rename(&zx, &bmap0)).collect();
    let mut z = Presentation {
        field: base.field.clone(),
        i0: Ideal::new(&zx, i0.clone()),
        i1: Ideal::zero(&zxy),
        open0: product_list(&base_open0, &[vander.clone()]),
        open1: vec![MPoly::one(&zxy)],
        x: zx.clone(),
        xy: zxy.clone(),
        almost: sigma.is_none(),
    };
    // (x̄, ȳ) of the base inside (z, w)
    let bmap: Vec<usize> = (0..n).chain(n + d..2 * n + d).collect();
    let mut i1: Vec<MPoly> = base.i1.gens().iter().map(|g| g.rename(&zxy, &bmap)).collect();
    i1.extend(i0.iter().map(|g| z.on_x(g)));
    i1.extend(i0.iter().map(|g| z.on_y(g)));
    let mut open1: Vec<MPoly> = base.open1.iter().map(|g| g.rename(&zxy, &bmap)).collect();
    open1 = product_list(&open1, &[z.on_x(&vander).mul(&z.on_y(&vander))]);
    if let Some((c, h)) = sigma {
        // c, h in (x̄, ȳ, t)
        for i in 0..d {
            let map: Vec<usize> = (0..n).chain(n + d..2 * n + d).chain([n + i]).collect();
            let s_i = MPoly::var(&zxy, 2 * n + d + i);
            i1.push(c.rename(&zxy, &map).mul(&s_i).sub(&h.rename(&zxy, &map)));
        }
        let map: Vec<usize> = (0..n).chain(n + d..2 * n + d).chain([n]).collect();
        open1 = product_list(&open1, &[c.rename(&zxy, &map)]);
    }
    z.i1 = Ideal::new(&zxy, i1);
    z.open1 = open1;
    let (g, perms) = FiniteGroup::symmetric(d);
    let act0: Vec<Vec<MPoly>> = perms
        .iter()
        .map(|p| {
            let mut inv = vec![0; d];
            for (i, &pi) in p.iter().enumerate() {
                inv[pi] = i;
            }
            let mut v: Vec<MPoly> = (0..n).map(|i| MPoly::var(&zx, i)).collect();
            v.extend((0..d).map(|i| t(inv[i])));
            v
        })
        .collect();
    let p0: Vec<MPoly> = (0..n).map(|i| MPoly::var(&zx, i)).collect();
    let cover = Cover::new(base, z, p0, None, g, act0, None)?;
    Ok((cover, perms))
}

/// Galois closure of `f: X → Y` where `X` adds one coordinate `t` cut out by a single
/// polynomial over `Y`, with `σ(t)` given by a relation linear in the `y`-copy of `t`.
#[derive(Clone, Debug)]
pub struct GaloisClosure {
    pub cover: Cover,
    /// The coordinates of `X` as polynomials on the cover.
    pub x_in_z: Vec<MPoly>,
    /// Elements of `G₀` fixing the first root, the group of `Z → X`.
    pub stabilizer: BTreeSet<usize>,
}

pub fn galois_closure(f: &Morphism) -> Result<GaloisClosure> {
    let x = &f.source;
    let y = f.target.clone();
    let n = y.n();
    let is_proj = f.f0.iter().enumerate().all(|(j, g)| *g == MPoly::var(&x.x, j));
    if !is_proj || !(x.n() == n || x.n() == n + 1) {
        return Err(Error::unsupported(
            "galois-closure",
            "source must be the target coordinates followed by at most one more",
        ));
    }
    if x.n() == n {
        let cover = Cover::trivial(y);
        let x_in_z = (0..n).map(|i| MPoly::var(&cover.z.x, i)).collect();
        return Ok(GaloisClosure { cover, x_in_z, stabilizer: [0].into() });
    }
    let fpoly = x
        .i0
        .gb()
        .iter()
        .filter(|g| g.degree_in(n) > 0)
        .min_by_key(|g| (g.degree_in(n), g.num_terms()))
        .cloned()
        .ok_or_else(|| Error::unsupported("galois-closure", "the extra coordinate is not algebraic"))?;
    let lifted: Vec<MPoly> = y.i0.gens().iter().map(|g| g.rename(&x.x, &(0..n).collect::<Vec<_>>())).collect();
    if !Ideal::new(&x.x, lifted).add_gens(&[fpoly.clone()]).equals(&x.i0) {
        return Err(Error::unsupported("galois-closure", "X0 is not cut out by a single polynomial over Y0"));
    }
    // lex with t' largest: an element linear in t'
    let tp = 2 * n + 1;
    let order = MonoOrder::Elim((0..2 * n + 2).map(|i| i == tp).collect());
    let gb = groebner_basis(x.i1.gens(), &order);
    let rel = gb
        .iter()
        .filter(|g| g.degree_in(tp) == 1)
        .min_by_key(|g| g.num_terms())
        .cloned()
        .ok_or_else(|| Error::unsupported("galois-closure", "no relation determines the y-copy of t"))?;
    let parts = rel.coefficients_in(tp);
    let ring_c = Ring::new(y.field.clone(), y.xy.vars.iter().cloned().chain(["t".to_string()]).collect());
    // X.xy = (x̄, t, ȳ, t')  ->  (x̄, ȳ, t)
    let map: Vec<usize> = (0..n).chain([2 * n]).chain(n..2 * n).chain([usize::MAX]).collect();
    let c = parts[1].rename(&ring_c, &map);
    let h = parts[0].neg().rename(&ring_c, &map);
    let ring_f = Ring::new(y.field.clone(), y.xs().iter().cloned().chain(["t".to_string()]).collect());
    let fmap: Vec<usize> = (0..=n).collect();
    let fy = fpoly.rename(&ring_f, &fmap);
    let (cover, _) = splitting_cover(y, &fy, Some((&c, &h)))?;
    let cover = choose_component(cover)?;
    let r = cover.validate();
    if !r.valid {
        return Err(Error::Validation(r.errors));
    }
    let mut x_in_z: Vec<MPoly> = (0..n).map(|i| MPoly::var(&cover.z.x, i)).collect();
    x_in_z.push(MPoly::var(&cover.z.x, n));
    let stabilizer = (0..cover.g0.order())
        .filter(|&g| cover.act0[g][n] == MPoly::var(&cover.z.x, n))
        .collect();
    Ok(GaloisClosure { cover, x_in_z, stabilizer })
}

/// Keep one irreducible component of `Z₀` and its decomposition group.
fn choose_component(cover: Cover) -> Result<Cover> {
    let comps = minimal_primes(&cover.z.i0)?;
    if comps.len() <= 1 {
        return Ok(cover);
    }
    let mut comps = comps;
    comps.sort_by_key(|c| c.key());
    for p in comps {
        let stab: BTreeSet<usize> = (0..cover.g0.order())
            .filter(|&g| p.gens().iter().all(|h| p.contains(&h.compose(&cover.act0[g]))))
            .collect();
        let mut z = cover.z.clone();
        z.i0 = p.with_basis();
        z.i1 = z.i1.add_gens(&z.lift_both(&p));
        let c = restrict_groups(&cover, z, &stab, &stab)?;
        if !c.z.is_empty() {
            return Ok(c);
        }
    }
    Err(Error::unsupported("galois-closure", "no component of the splitting algebra is compatible with σ"))
}

/// The cover with `G₀`, `G₁` replaced by subgroups (given as index sets).
fn restrict_groups(cover: &Cover, z: Presentation, s0: &BTreeSet<usize>, s1: &BTreeSet<usize>) -> Result<Cover> {
    let (g0, inc0) = cover.g0.subgroup(s0)?;
    let (g1, inc1) = cover.g1.subgroup(s1)?;
    let pos0 = |g: usize| inc0.iter().position(|&h| h == g);
    let mut hp = Vec::new();
    let mut hs = Vec::new();
    for &g in &inc1 {
        hp.push(pos0(cover.hom_pi1[g]).ok_or_else(|| Error::Validation(vec!["hom_pi1 leaves the subgroup".into()]))?);
        hs.push(pos0(cover.hom_sigma[g]).ok_or_else(|| Error::Validation(vec!["hom_sigma leaves the subgroup".into()]))?);
    }
    let act0 = inc0.iter().map(|&g| cover.act0[g].clone()).collect();
    let act1 = inc1.iter().map(|&g| cover.act1[g].clone()).collect();
    Cover::new(cover.base.clone(), z, cover.p0.clone(), Some(cover.p1.clone()), g0, act0, Some((g1, act1, hp, hs)))
}

/// `f_*Z` with the surjection `G₀ → G₀'` and its kernel.
#[derive(Clone, Debug)]
pub struct Pushforward {
    pub cover: Cover,
    pub surjection: Vec<usize>,
    pub kernel: BTreeSet<usize>,
}

/// Pushforward of `d` along `f`: the cover coordinates algebraic over the target form the
/// relative algebraic closure, and the groups act on them through a quotient.
pub fn pushforward_cover(f: &Morphism, d: &Cover) -> Result<Pushforward> {
    let nu = f.target.n();
    let nz = d.nz();
    let zs = &d.z.x.vars;
    let mut vars = fresh_names("ub", nu, 0, &d.z.xy.vars);
    vars.extend(zs.iter().cloned());
    let ring = Ring::new(d.z.field.clone(), vars);
    let zmap: Vec<usize> = (nu..nu + nz).collect();
    let mut gens: Vec<MPoly> = d.z.i0.gens().iter().map(|g| g.rename(&ring, &zmap)).collect();
    let image: Vec<MPoly> = f.f0.iter().map(|g| g.compose(&d.p0)).collect();
    for (j, g) in image.iter().enumerate() {
        gens.push(MPoly::var(&ring, j).sub(&g.rename(&ring, &zmap)));
    }
    let graph = Ideal::new(&ring, gens);
    let alg: Vec<usize> = (0..nz)
        .filter(|&i| {
            let mut keep: Vec<usize> = (0..nu).collect();
            keep.push(nu + i);
            graph.eliminate_in_place(&keep).gens().iter().any(|g| g.degree_in(nu + i) > 0)
        })
        .collect();
    // normal forms with the transcendental coordinates eliminated first
    let order0 = MonoOrder::Elim((0..nz).map(|i| !alg.contains(&i)).collect());
    let gb0 = groebner_basis(d.z.i0.gens(), &order0);
    let na = alg.len();
    let ws: Vec<String> = alg.iter().map(|&i| d.z.ys()[i].clone()).collect();
    let xs: Vec<String> = alg.iter().map(|&i| zs[i].clone()).collect();
    let (ax, axy) = Presentation::rings(&d.z.field, &xs, &ws)?;
    let to_a0: Vec<usize> = (0..nz).map(|i| alg.iter().position(|&a| a == i).unwrap_or(usize::MAX)).collect();
    let restrict0 = |p: &MPoly, what: &str| -> Result<MPoly> {
        let r = normal_form(p, &gb0, &order0);
        if r.support().iter().any(|i| !alg.contains(i)) {
            return Err(Error::PresentationInsufficient(format!(
                "{what} is not expressed in the algebraic coordinates"
            )));
        }
        Ok(r.rename(&ax, &to_a0))
    };
    let p0a = image.iter().map(|g| restrict0(g, "the target coordinate")).collect::<Result<Vec<_>>>()?;
    let tuple0: Vec<Vec<MPoly>> = (0..d.g0.order())
        .map(|g| alg.iter().map(|&i| restrict0(&d.act0[g][i], "the group action")).collect())
        .collect::<Result<_>>()?;
    let (g0a, sur0) = quotient(&d.g0, &tuple0);
    // Z1 side on (z_A, w_A)
    let keep1: Vec<usize> = alg.iter().copied().chain(alg.iter().map(|&i| nz + i)).collect();
    let order1 = MonoOrder::Elim((0..2 * nz).map(|i| !keep1.contains(&i)).collect());
    let gb1 = groebner_basis(d.z.i1.gens(), &order1);
    let to_a1: Vec<usize> =
        (0..2 * nz).map(|i| keep1.iter().position(|&a| a == i).unwrap_or(usize::MAX)).collect();
    let restrict1 = |p: &MPoly| -> Result<MPoly> {
        let r = normal_form(p, &gb1, &order1);
        if r.support().iter().any(|i| !keep1.contains(i)) {
            return Err(Error::PresentationInsufficient("the G1 action leaves the algebraic coordinates".into()));
        }
        Ok(r.rename(&axy, &to_a1))
    };
    let tuple1: Vec<Vec<MPoly>> = (0..d.g1.order())
        .map(|g| keep1.iter().map(|&i| restrict1(&d.act1[g][i])).collect())
        .collect::<Result<_>>()?;
    let (g1a, sur1) = quotient(&d.g1, &tuple1);
    let hom_pi1 = induced(&g1a, &sur1, &d.hom_pi1, &sur0);
    let hom_sigma = induced(&g1a, &sur1, &d.hom_sigma, &sur0);
    let i0a = d.z.i0.eliminate(&alg);
    let i1a = d.z.i1.eliminate(&keep1);
    let open0: Vec<MPoly> = d
        .z
        .open0
        .iter()
        .filter(|o| o.support().iter().all(|i| alg.contains(i)))
        .map(|o| o.rename(&ax, &to_a0))
        .collect();
    let mut za = Presentation {
        field: d.z.field.clone(),
        i0: i0a.rename(&ax, &(0..na).collect::<Vec<_>>()),
        i1: i1a.rename(&axy, &(0..2 * na).collect::<Vec<_>>()),
        open0: if open0.is_empty() { vec![MPoly::one(&ax)] } else { open0 },
        open1: vec![MPoly::one(&axy)],
        x: ax.clone(),
        xy: axy.clone(),
        almost: d.z.almost,
    };
    let o1: Vec<MPoly> = za.open0.iter().map(|o| za.on_x(o)).collect();
    let o2: Vec<MPoly> = za.open0.iter().map(|o| za.on_y(o)).collect();
    za.open1 = product_list(&o1, &o2);
    let act0: Vec<Vec<MPoly>> = (0..g0a.order())
        .map(|k| tuple0[sur0.iter().position(|&c| c == k).unwrap()].clone())
        .collect();
    let act1: Vec<Vec<MPoly>> = (0..g1a.order())
        .map(|k| tuple1[sur1.iter().position(|&c| c == k).unwrap()].clone())
        .collect();
    let p1a = {
        let mut v: Vec<MPoly> = p0a.iter().map(|g| za.on_x(g)).collect();
        v.extend(p0a.iter().map(|g| za.on_y(g)));
        v
    };
    let kernel: BTreeSet<usize> = (0..d.g0.order()).filter(|&g| sur0[g] == sur0[d.g0.identity]).collect();
    let cover = Cover::new(f.target.clone(), za, p0a, Some(p1a), g0a, act0, Some((g1a, act1, hom_pi1, hom_sigma)))?;
    Ok(Pushforward { cover, surjection: sur0, kernel })
}

/// The quotient of `g` by the elements acting like the identity on the given tuples.
fn quotient(g: &FiniteGroup, tuples: &[Vec<MPoly>]) -> (FiniteGroup, Vec<usize>) {
    let mut reps: Vec<usize> = Vec::new();
    let mut class = vec![0usize; g.order()];
    for a in 0..g.order() {
        match reps.iter().position(|&r| tuples[r] == tuples[a]) {
            Some(k) => class[a] = k,
            None => {
                class[a] = reps.len();
                reps.push(a);
            }
        }
    }
    let labels = reps.iter().map(|&r| g.labels[r].clone()).collect();
    let table = reps.iter().map(|&a| reps.iter().map(|&b| class[g.mul(a, b)]).collect()).collect();
    (FiniteGroup::new(labels, table).expect("quotient group"), class)
}

fn induced(g1a: &FiniteGroup, sur1: &[usize], hom: &[usize], sur0: &[usize]) -> Vec<usize> {
    (0..g1a.order())
        .map(|k| {
            let g = sur1.iter().position(|&c| c == k).unwrap();
            sur0[hom[g]]
        })
        .collect()
}

/// Replace `Z₁` by the component of the full fibre product `(Z₀ × Z₀) ×_{X₀×X₀} X₁` that
/// contains the image of `tilde` (an ideal in `(z, w)` followed by any extra coordinates),
/// or of the cover's own `Z₁` when `tilde` is absent.
pub fn to_direct_cover(d: &Cover, tilde: Option<&Ideal>) -> Result<Cover> {
    let z = &d.z;
    let nz = d.nz();
    let t = match tilde {
        Some(i) => {
            let keep: Vec<usize> = (0..2 * nz).collect();
            i.eliminate(&keep).rename(&z.xy, &keep)
        }
        None => z.i1.clone(),
    };
    let mut gens = z.lift_both(&z.i0);
    gens.extend(d.base.i1.gens().iter().map(|g| g.compose(&d.p1)));
    let full = Ideal::new(&z.xy, gens);
    let mut comps = minimal_primes(&full)?;
    comps.sort_by_key(|c| c.key());
    let inside: Vec<&Ideal> = comps.iter().filter(|p| p.gens().iter().all(|g| t.radical_contains(g))).collect();
    let chosen = match inside.first() {
        Some(p) => (*p).clone(),
        None => comps
            .iter()
            .find(|p| p.contains_ideal(&t))
            .cloned()
            .ok_or_else(|| Error::unsupported("to-direct-cover", "no prime component contains the correspondence"))?,
    };
    if chosen.gens().iter().all(|g| t.radical_contains(g)) && t.gens().iter().all(|g| chosen.radical_contains(g)) {
        if tilde.is_none() {
            return Ok(d.clone());
        }
    }
    let stab1: BTreeSet<usize> = (0..d.g1.order())
        .filter(|&g| chosen.gens().iter().all(|h| chosen.contains(&h.compose(&d.act1[g]))))
        .collect();
    let mut nzp = z.clone();
    nzp.i1 = chosen.with_basis();
    nzp.almost = false;
    let all0: BTreeSet<usize> = (0..d.g0.order()).collect();
    let c = restrict_groups(d, nzp, &all0, &stab1)?;
    let r = c.validate();
    if !r.valid {
        return Err(Error::Validation(r.errors));
    }
    Ok(c)
}

/// A cover of the target pulled back along a coordinate projection `X → Y`, where `X` has
/// the target coordinates first.
pub fn pullback_cover(d: &Cover, source: Arc<Presentation>) -> Result<Cover> {
    let ny = d.base.n();
    let nx = source.n();
    let nz = d.nz();
    if nx < ny || source.xs()[..ny] != d.base.xs()[..] {
        return Err(Error::unsupported("pullback", "the target coordinates must come first in the source"));
    }
    let extra = nx - ny;
    let mut taken = d.z.xy.vars.clone();
    taken.extend(source.xy.vars.iter().cloned());
    let ex = fresh_names("za", extra, 0, &taken);
    let ey = fresh_names("wa", extra, 0, &taken);
    let zs: Vec<String> = d.z.xs().iter().cloned().chain(ex).collect();
    let ws: Vec<String> = d.z.ys().iter().cloned().chain(ey).collect();
    let (zx, zxy) = Presentation::rings(&d.z.field, &zs, &ws)?;
    let m0: Vec<usize> = (0..nz).collect();
    let m1: Vec<usize> = (0..nz).chain(nz + extra..2 * nz + extra).collect();
    let r0 = |v: &[MPoly]| -> Vec<MPoly> { v.iter().map(|g| g.rename(&zx, &m0)).collect() };
    let r1 = |v: &[MPoly]| -> Vec<MPoly> { v.iter().map(|g| g.rename(&zxy, &m1)).collect() };
    let mut p0 = r0(&d.p0);
    p0.extend((0..extra).map(|i| MPoly::var(&zx, nz + i)));
    let mut p1 = r1(&d.p1[..ny]);
    p1.extend((0..extra).map(|i| MPoly::var(&zxy, nz + i)));
    p1.extend(r1(&d.p1[ny..]));
    p1.extend((0..extra).map(|i| MPoly::var(&zxy, 2 * nz + extra + i)));
    let mut i0 = r0(d.z.i0.gens());
    i0.extend(source.i0.gens().iter().map(|g| g.compose(&p0)));
    let mut i1 = r1(d.z.i1.gens());
    i1.extend(source.i1.gens().iter().map(|g| g.compose(&p1)));
    let open0 = product_list(&r0(&d.z.open0), &source.open0.iter().map(|g| g.compose(&p0)).collect::<Vec<_>>());
    let open1 = product_list(&r1(&d.z.open1), &source.open1.iter().map(|g| g.compose(&p1)).collect::<Vec<_>>());
    let z = Presentation {
        field: d.z.field.clone(),
        i0: Ideal::new(&zx, i0),
        i1: Ideal::new(&zxy, i1),
        open0,
        open1,
        x: zx.clone(),
        xy: zxy.clone(),
        almost: d.z.almost,
    };
    let act0: Vec<Vec<MPoly>> = d
        .act0
        .iter()
        .map(|a| {
            let mut v = r0(a);
            v.extend((0..extra).map(|i| MPoly::var(&zx, nz + i)));
            v
        })
        .collect();
    let act1: Vec<Vec<MPoly>> = d
        .act1
        .iter()
        .map(|a| {
            let mut v = r1(&a[..nz]);
            v.extend((0..extra).map(|i| MPoly::var(&zxy, nz + i)));
            v.extend(r1(&a[nz..]));
            v.extend((0..extra).map(|i| MPoly::var(&zxy, 2 * nz + extra + i)));
            v
        })
        .collect();
    Cover::new(
        source,
        z,
        p0,
        Some(p1),
        d.g0.clone(),
        act0,
        Some((d.g1.clone(), act1, d.hom_pi1.clone(), d.hom_sigma.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::points::DiffField;

    fn punctured_line(field: &Field, var: &str) -> Arc<Presentation> {
        let xs = vec![var.to_string()];
        let ys = vec![format!("{var}y")];
        Arc::new(
            Presentation::parse_named(field, &xs, &ys, &["0"], &[format!("{var}y - {var}")])
                .unwrap()
                .with_open(&[var], &[] as &[&str])
                .unwrap(),
        )
    }

    fn power_map(field: &Field, k: u32) -> Morphism {
        let y = punctured_line(field, "u");
        let xs = vec!["u".to_string(), "t".to_string()];
        let ys = vec!["uy".to_string(), "ty".to_string()];
        let x = Arc::new(
            Presentation::parse_named(
                field,
                &xs,
                &ys,
                &[format!("t^{k} - u")],
                &["uy - u".to_string(), "ty - t".to_string(), format!("t^{k} - u")],
            )
            .unwrap()
            .with_open(&["u"], &[] as &[&str])
            .unwrap(),
        );
        Morphism::parse(x, y, &["u"]).unwrap()
    }

    #[test]
    fn closure_of_squaring_is_kummer() {
        let g = galois_closure(&power_map(&Field::Prime(7), 2)).unwrap();
        assert_eq!(g.cover.g0.order(), 2);
        assert_eq!(g.stabilizer.len(), 1);
        let k = DiffField::from_q(7, 1).unwrap();
        // 3 is not a square mod 7
        let lf = g.cover.local_frobenius(&k, &[3]).unwrap();
        assert_ne!(lf.element, g.cover.g0.identity);
        let lf = g.cover.local_frobenius(&k, &[2]).unwrap();
        assert_eq!(lf.element, g.cover.g0.identity);
    }

    #[test]
    fn closure_of_cubing_has_order_six() {
        let g = galois_closure(&power_map(&Field::Prime(5), 3)).unwrap();
        assert_eq!(g.cover.g0.order(), 6);
        let k = DiffField::from_q(5, 1).unwrap();
        let gf = k.gf().unwrap();
        // every element of F5 is a cube, but F5 has no primitive cube root of unity
        for a in 1..gf.size {
            let lf = g.cover.local_frobenius(&k, &[a]).unwrap();
            assert_eq!(g.cover.g0.element_order(lf.element), 2);
        }
    }

    #[test]
    fn closure_of_identity_is_trivial() {
        let y = punctured_line(&Field::Rationals, "u");
        let g = galois_closure(&Morphism::identity(y)).unwrap();
        assert!(g.cover.is_trivial());
    }

    fn plane_kummer(fibre_var: bool) -> (Morphism, Cover) {
        let q = Field::Rationals;
        let xs = vec!["a".to_string(), "b".to_string()];
        let ys = vec!["ay".to_string(), "by".to_string()];
        let x = Arc::new(
            Presentation::parse_named(&q, &xs, &ys, &["0"], &["ay - a", "by - b"])
                .unwrap()
                .with_open(&["a*b"], &[] as &[&str])
                .unwrap(),
        );
        let y = punctured_line(&q, "a");
        let f = Morphism::parse(x.clone(), y, &["a"]).unwrap();
        let zs = vec!["z0".to_string(), "z1".to_string()];
        let ws = vec!["w0".to_string(), "w1".to_string()];
        let z = Presentation::parse_named(&q, &zs, &ws, &["0"], &["w0 - z0", "w1 - z1"])
            .unwrap()
            .with_open(&["z0*z1"], &[] as &[&str])
            .unwrap();
        let (p0, act) = if fibre_var {
            (vec!["z0", "z1^2"], vec!["z0", "-z1"])
        } else {
            (vec!["z0^2", "z1"], vec!["-z0", "z1"])
        };
        let p0 = p0.iter().map(|s| MPoly::parse(&z.x, s).unwrap()).collect();
        let id = vec![MPoly::parse(&z.x, "z0").unwrap(), MPoly::parse(&z.x, "z1").unwrap()];
        let g = act.iter().map(|s| MPoly::parse(&z.x, s).unwrap()).collect();
        let c = Cover::new(x, z, p0, None, FiniteGroup::cyclic(2), vec![id, g], None).unwrap();
        (f, c)
    }

    #[test]
    fn pushforward_of_pulled_back_kummer() {
        let (f, c) = plane_kummer(false);
        assert!(c.validate().valid, "{:?}", c.validate().errors);
        let p = pushforward_cover(&f, &c).unwrap();
        assert_eq!(p.cover.g0.order(), 2);
        assert_eq!(p.kernel.len(), 1);
        assert_eq!(p.cover.nz(), 1);
        assert!(p.cover.validate().valid, "{:?}", p.cover.validate().errors);
        assert_eq!(c.g0.order(), p.kernel.len() * p.cover.g0.order());
    }

    #[test]
    fn pushforward_of_fibre_kummer_is_trivial() {
        let (f, c) = plane_kummer(true);
        let p = pushforward_cover(&f, &c).unwrap();
        assert_eq!(p.cover.g0.order(), 1);
        assert_eq!(p.kernel.len(), 2);
    }

    #[test]
    fn almost_to_direct() {
        let q = Field::Rationals;
        let base = punctured_line(&q, "x0");
        let zs = vec!["z0".to_string()];
        let ws = vec!["w0".to_string()];
        let mk = |i1: &str| {
            let z = Presentation::parse_named(&q, &zs, &ws, &["0"], &[i1]).unwrap().with_open(&["z0"], &[] as &[&str]).unwrap();
            let p0 = vec![MPoly::parse(&z.x, "z0^2").unwrap()];
            let act = vec![vec![MPoly::parse(&z.x, "z0").unwrap()], vec![MPoly::parse(&z.x, "-z0").unwrap()]];
            Cover::new(base.clone(), z, p0, None, FiniteGroup::cyclic(2), act, None).unwrap()
        };
        let direct = mk("w0 - z0");
        let same = to_direct_cover(&direct, None).unwrap();
        assert!(same.z.i1.equals(&direct.z.i1));
        let almost = mk("w0^2 - z0^2");
        let d = to_direct_cover(&almost, None).unwrap();
        assert_eq!(d.z.i1.gens().len(), 1);
        assert!(d.validate().valid);
        // a spurious extra coordinate e with e^2 = 2
        let r = Ring::new(q.clone(), vec!["z0".into(), "w0".into(), "e".into()]);
        let tilde = Ideal::parse(&r, &["w0 + z0", "e^2 - 2"]).unwrap();
        let d = to_direct_cover(&almost, Some(&tilde)).unwrap();
        assert!(d.z.i1.contains(&MPoly::parse(&d.z.xy, "w0 + z0").unwrap()));
    }

    #[test]
    fn pullback_along_projection() {
        let (f, c) = plane_kummer(false);
        let p = pushforward_cover(&f, &c).unwrap();
        let back = pullback_cover(&p.cover, f.source.clone()).unwrap();
        assert!(back.validate().valid, "{:?}", back.validate().errors);
        assert_eq!(back.g0.order(), 2);
    }
}
