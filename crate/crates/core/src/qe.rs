//! Direct images of Galois stratifications along morphisms of presentations, quantifier
//! elimination built on them, and empirical Frobenius thresholds.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::decompose::minimal_primes;
use crate::algebra::groebner::{groebner_basis, normal_form};
use crate::algebra::{Field, Ideal, MPoly, MonoOrder, Ring};
use crate::error::{Error, Result};
use crate::galois::{galois_closure, pushforward_cover};
use crate::logic::{Formula, Term};
use crate::points::{nonempty_witness, DiffField};
use crate::presentation::{
    fresh_names, product_list, stratify_by_property, Morphism, Piece, Presentation, Property,
};
use crate::strat::{Stratification, Stratum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    FiniteEtale,
    Fibration,
    Composite,
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Case> {
        match s {
            "finite_etale" => Ok(Case::FiniteEtale),
            "fibration" => Ok(Case::Fibration),
            "composite" => Ok(Case::Composite),
            _ => Err(Error::unsupported("image", format!("unknown case `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DirectImageTask {
    pub morphism: Morphism,
    pub input: Stratification,
    pub case: Case,
}

#[derive(Clone, Debug)]
pub struct ImageReport {
    pub output: Stratification,
    pub max_depth: usize,
    pub depth_bound: usize,
}

/// Recursion bookkeeping for excised loci.
struct Devissage {
    bound: usize,
    max_depth: usize,
}

impl Devissage {
    fn new(bound: usize) -> Devissage {
        Devissage { bound, max_depth: 0 }
    }

    fn enter(&mut self, depth: usize) -> Result<()> {
        self.max_depth = self.max_depth.max(depth);
        if depth > self.bound {
            return Err(Error::unsupported("devissage", format!("depth {depth} exceeds the bound {}", self.bound)));
        }
        Ok(())
    }
}

fn is_target_projection(f: &Morphism) -> bool {
    let m = f.target.n();
    f.source.n() >= m && f.f0.iter().enumerate().all(|(j, g)| *g == MPoly::var(&f.source.x, j))
}

/// The source rewritten with the target coordinates first: itself when `f` is already such a
/// projection, otherwise the graph of `f`. Returns the map of source coordinates.
fn projection_form(f: &Morphism) -> Result<(Arc<Presentation>, Vec<usize>)> {
    let src = &f.source;
    let n = src.n();
    if is_target_projection(f) {
        return Ok((src.clone(), (0..n).collect()));
    }
    let m = f.target.n();
    let mut taken: Vec<String> = f.target.xy.vars.clone();
    taken.extend(src.xy.vars.iter().cloned());
    let mut xs = f.target.xs().to_vec();
    let mut ys = f.target.ys().to_vec();
    for (i, v) in src.xs().iter().enumerate() {
        let clash = xs.contains(v) || ys.contains(v);
        xs.push(if clash { fresh_names(&format!("{v}_"), 1, 0, &taken)[0].clone() } else { v.clone() });
        let w = &src.ys()[i];
        let clash = xs.contains(w) || ys.contains(w);
        ys.push(if clash { fresh_names(&format!("{w}_"), 1, 0, &taken)[0].clone() } else { w.clone() });
    }
    let (gx, gxy) = Presentation::rings(&src.field, &xs, &ys)?;
    let map0: Vec<usize> = (m..m + n).collect();
    let map1: Vec<usize> = (m..m + n).chain(2 * m + n..2 * (m + n)).collect();
    let mut i0: Vec<MPoly> = src.i0.gens().iter().map(|g| g.rename(&gx, &map0)).collect();
    let mut i1: Vec<MPoly> = src.i1.gens().iter().map(|g| g.rename(&gxy, &map1)).collect();
    for (j, fj) in f.f0.iter().enumerate() {
        let fx = fj.rename(&gx, &map0);
        i0.push(MPoly::var(&gx, j).sub(&fx));
        let fx1 = fj.rename(&gxy, &map1[..n]);
        let fy1 = fj.rename(&gxy, &map1[n..]);
        i1.push(MPoly::var(&gxy, j).sub(&fx1));
        i1.push(MPoly::var(&gxy, m + n + j).sub(&fy1));
    }
    let p = Presentation {
        field: src.field.clone(),
        i0: Ideal::new(&gx, i0),
        i1: Ideal::new(&gxy, i1),
        open0: src.open0.iter().map(|o| o.rename(&gx, &map0)).collect(),
        open1: src.open1.iter().map(|o| o.rename(&gxy, &map1)).collect(),
        x: gx,
        xy: gxy,
        almost: src.almost,
    };
    Ok((Arc::new(p), map0))
}

/// Whether the correspondence of `src` constrains its last coordinate by a relation linear in
/// its `y`-copy.
fn has_sigma_relation(src: &Presentation) -> bool {
    let n = src.n();
    let tp = 2 * n - 1;
    let order = MonoOrder::Elim((0..2 * n).map(|i| i == tp).collect());
    groebner_basis(src.i1.gens(), &order).iter().any(|g| g.degree_in(tp) == 1)
}

/// Whether `X₁` is the whole fibre product over the target correspondence.
fn is_full_product(src: &Presentation, target: &Presentation) -> bool {
    let n = target.n();
    let ns = src.n();
    let map: Vec<usize> = (0..n).chain(ns..ns + n).collect();
    let mut gens = src.lift_both(&src.i0);
    gens.extend(target.i1.gens().iter().map(|g| g.rename(&src.xy, &map)));
    let full = Ideal::new(&src.xy, gens);
    src.i1.gens().iter().all(|g| full.radical_contains(g))
}

/// Whether `X₁` of `src` maps onto a dense part of `Y₁`.
fn dominates(src: &Presentation, base: &Presentation) -> bool {
    let n = base.n();
    let ns = src.n();
    let keep: Vec<usize> = (0..n).chain(ns..ns + n).collect();
    let mut gens = src.i1.gens().to_vec();
    gens.extend(src.lift_both(&src.i0));
    let image = Ideal::new(&src.xy, gens).eliminate(&keep);
    let mut full = base.i1.gens().to_vec();
    full.extend(base.lift_both(&base.i0));
    let full = Ideal::new(&base.xy, full);
    let id: Vec<usize> = (0..2 * n).collect();
    image.gens().iter().all(|g| full.radical_contains(&g.rename(&base.xy, &id)))
}

fn nonvanishing(gens: &[MPoly], j: &Ideal) -> Vec<MPoly> {
    gens.iter().filter(|g| !j.radical_contains(g)).cloned().collect()
}

/// Image of the realisations of `src` on `piece`, where `src` has the target coordinates
/// followed by one more.
fn image_one(
    src: &Arc<Presentation>,
    target: &Arc<Presentation>,
    piece: &Piece,
    dev: &mut Devissage,
    depth: usize,
) -> Result<Stratification> {
    dev.enter(depth)?;
    let full = src.x0_piece().intersect(piece);
    let mut out = Stratification::constant(target.clone(), false);
    if full.is_empty() {
        return Ok(out);
    }
    let mut comps = minimal_primes(&full.ideal())?;
    comps.sort_by_key(|c| c.key());
    for p in comps {
        let img = image_prime(src, target, &p, &full.open, dev, depth)?;
        out = out.or(&img)?;
    }
    Ok(out)
}

fn image_prime(
    src: &Arc<Presentation>,
    target: &Arc<Presentation>,
    p: &Ideal,
    opens: &[MPoly],
    dev: &mut Devissage,
    depth: usize,
) -> Result<Stratification> {
    let n = target.n();
    let t = n;
    let keep: Vec<usize> = (0..n).collect();
    let down: Vec<usize> = (0..n).chain([usize::MAX]).collect();
    let bottom = Stratification::constant(target.clone(), false);
    if opens.iter().all(|o| p.radical_contains(o)) {
        return Ok(bottom);
    }
    let j = p.eliminate(&keep).rename(&target.x, &keep);
    let mut with_open = p.gens().to_vec();
    with_open.extend(opens.iter().cloned());
    let e = Ideal::new(&src.x, with_open).eliminate(&keep).rename(&target.x, &keep);
    let order = MonoOrder::Elim((0..=n).map(|i| i == t).collect());
    let gb = groebner_basis(p.gens(), &order);
    let fpoly = gb.iter().filter(|g| g.involves(t)).min_by_key(|g| (g.degree_in(t), g.num_terms())).cloned();
    let Some(fpoly) = fpoly else {
        // the extra coordinate is free on this component: points lie over every target
        // point where some open generator is not identically zero in it
        let coeffs: Vec<MPoly> = opens
            .iter()
            .flat_map(|o| o.coefficients_in(t))
            .filter(|c| !c.is_zero())
            .map(|c| c.rename(&target.x, &down))
            .collect();
        let open = nonvanishing(&coeffs, &j);
        let piece = Piece::new(&target.x, j.gens().to_vec(), open).simplified();
        return Ok(Stratification::of_piece(target.clone(), piece, true));
    };
    let lifted_j: Vec<MPoly> = j.gens().iter().map(|g| g.rename(&src.x, &keep)).collect();
    if !Ideal::new(&src.x, lifted_j).add_gens(&[fpoly.clone()]).equals(p) {
        return Err(Error::unsupported(
            "finite-etale",
            format!("component {} is not cut out by one polynomial over its image", p.key()),
        ));
    }
    let e_open = nonvanishing(e.gens(), &j);
    if e_open.is_empty() {
        return Err(Error::unsupported("finite-etale", "the open condition removes a root over every point"));
    }
    let lc = fpoly.coefficients_in(t).last().cloned().unwrap().rename(&target.x, &down);
    let mut dgens = p.gens().to_vec();
    dgens.push(fpoly.derivative(t));
    let disc = nonvanishing(Ideal::new(&src.x, dgens).eliminate(&keep).rename(&target.x, &keep).gens(), &j);
    if disc.is_empty() {
        return Err(Error::unsupported("finite-etale", "the fibres are everywhere ramified"));
    }
    let good_open = product_list(&product_list(&e_open, &[lc]), &disc);
    let good = Piece::new(&target.x, j.gens().to_vec(), good_open).simplified();
    let mut out = bottom;
    if !good.is_empty() {
        let ybase = Arc::new(target.restrict(&good));
        let lifted = good.rename(&src.x, &keep);
        let spiece = Piece { ring: src.x.clone(), closed: p.gens().to_vec(), open: product_list(opens, &lifted.open) };
        let xsrc = Arc::new(src.restrict(&spiece));
        if !dominates(&xsrc, &ybase) {
            return Err(Error::unsupported("finite-etale", "the image of the correspondence is not cut out by the base"));
        }
        let stratum = if has_sigma_relation(&xsrc) {
            let proj = (0..n).map(|i| MPoly::var(&xsrc.x, i)).collect();
            let m = Morphism::new(xsrc.clone(), ybase.clone(), proj)?;
            let c = galois_closure(&m)?.cover;
            let domain: BTreeSet<usize> = (0..c.g0.order())
                .filter(|&g| (n..c.nz()).any(|i| c.act0[g][i] == MPoly::var(&c.z.x, i)))
                .collect();
            Stratum { piece: good.clone(), cover: Arc::new(c), domain }.simplified(target)
        } else if is_full_product(&xsrc, target) {
            Stratum::constant(target, good.clone(), true)
        } else {
            return Err(Error::unsupported("finite-etale", "the correspondence does not determine σ on the fibre"));
        };
        let mut strata = vec![stratum];
        for c in good.complement() {
            strata.push(Stratum::constant(target, c, false));
        }
        out = Stratification::new(target.clone(), strata)?;
    }
    for c in good.complement() {
        let lifted = c.rename(&src.x, &keep);
        let mut closed = p.gens().to_vec();
        closed.extend(lifted.closed);
        let bad = Piece { ring: src.x.clone(), closed, open: product_list(opens, &lifted.open) };
        if bad.is_empty() {
            continue;
        }
        let sub = image_one(src, target, &bad, dev, depth + 1)?;
        out = out.or(&sub)?;
    }
    Ok(out)
}

fn constant_strata(a: &Stratification, stage: &str) -> Result<()> {
    if a.strata.iter().any(|s| !s.is_top() && !s.is_bottom()) {
        return Err(Error::unsupported(stage, "input strata with nontrivial covers (towers) are not supported here"));
    }
    Ok(())
}

/// `f_∃` of a stratification with constant strata along a morphism whose source is the
/// target plus one coordinate (or a one-coordinate source mapped by a polynomial).
pub fn direct_image_finite_etale(f: &Morphism, a: &Stratification) -> Result<Stratification> {
    Ok(finite_etale_report(f, a)?.output)
}

fn finite_etale_report(f: &Morphism, a: &Stratification) -> Result<ImageReport> {
    constant_strata(a, "finite-etale")?;
    let (src, map) = projection_form(f)?;
    let m = f.target.n();
    if src.n() != m + 1 {
        return Err(Error::unsupported("finite-etale", "the source must add exactly one coordinate to the target"));
    }
    let mut dev = Devissage::new(src.n() + 1);
    let mut out = Stratification::constant(f.target.clone(), false);
    for s in a.strata.iter().filter(|s| s.is_top()) {
        let piece = s.piece.rename(&src.x, &map);
        let img = image_one(&src, &f.target, &piece, &mut dev, 0)?;
        out = out.or(&img)?;
    }
    Ok(ImageReport { output: out, max_depth: dev.max_depth, depth_bound: dev.bound })
}

/// `f_∃` along a morphism with geometrically integral fibres: each stratum goes to the closure
/// of its image with the pushforward cover and the image of its domain.
pub fn direct_image_fibration(f: &Morphism, a: &Stratification) -> Result<Stratification> {
    let target = &f.target;
    let mut out = Stratification::constant(target.clone(), false);
    for s in &a.strata {
        if s.is_bottom() {
            continue;
        }
        let base = s.cover.base.clone();
        let fs = Morphism::new(base.clone(), target.clone(), f.f0.clone())?;
        for ps in stratify_by_property(&fs, Property::GeomIntegralFibres)? {
            if !ps.holds {
                return Err(Error::unsupported(
                    "fibration",
                    format!("fibres over the image of {} are not geometrically integral", ps.piece.key()),
                ));
            }
        }
        let image = fs.image_closure(&s.piece);
        let piece = Piece::new(&target.x, image.gens().to_vec(), target.open0.clone()).simplified();
        if piece.is_empty() {
            continue;
        }
        let ybase = Arc::new(target.restrict(&piece));
        let stratum = if s.is_top() {
            Stratum::constant(target, piece.clone(), true)
        } else {
            let fz = Morphism::new(base, ybase, f.f0.clone())?;
            let push = pushforward_cover(&fz, &s.cover)?;
            let domain = s.domain.iter().map(|&g| push.surjection[g]).collect();
            Stratum { piece: piece.clone(), cover: Arc::new(push.cover), domain }.simplified(target)
        };
        let mut strata = vec![stratum];
        for c in piece.complement() {
            strata.push(Stratum::constant(target, c, false));
        }
        out = out.or(&Stratification::new(target.clone(), strata)?)?;
    }
    Ok(out)
}

/// `f = h ∘ g` with `g: X → Ỹ` onto the coordinates of `X` algebraic over the target and
/// `h: Ỹ → Y` finite.
pub fn stein_factorize(f: &Morphism) -> Result<(Morphism, Morphism)> {
    let src = &f.source;
    let n = src.n();
    let m = f.target.n();
    let mut vars = src.xs().to_vec();
    vars.extend(fresh_names("ut", m, 0, &src.xy.vars));
    let ring = Ring::new(src.field.clone(), vars);
    let id: Vec<usize> = (0..n).collect();
    let mut gens: Vec<MPoly> = src.i0.gens().iter().map(|g| g.rename(&ring, &id)).collect();
    for (j, fj) in f.f0.iter().enumerate() {
        gens.push(MPoly::var(&ring, n + j).sub(&fj.rename(&ring, &id)));
    }
    let graph = Ideal::new(&ring, gens);
    let alg: Vec<usize> = (0..n)
        .filter(|&i| {
            let keep: Vec<usize> = (n..n + m).chain([i]).collect();
            let v = MPoly::var(&src.x, i);
            f.f0.contains(&v) || graph.eliminate_in_place(&keep).gens().iter().any(|g| g.involves(i))
        })
        .collect();
    let na = alg.len();
    let xs: Vec<String> = alg.iter().map(|&i| src.xs()[i].clone()).collect();
    let ys: Vec<String> = alg.iter().map(|&i| src.ys()[i].clone()).collect();
    let (ax, axy) = Presentation::rings(&src.field, &xs, &ys)?;
    let keep1: Vec<usize> = alg.iter().copied().chain(alg.iter().map(|&i| n + i)).collect();
    let to_a0: Vec<usize> = (0..n).map(|i| alg.iter().position(|&a| a == i).unwrap_or(usize::MAX)).collect();
    let to_a1: Vec<usize> = (0..2 * n).map(|i| keep1.iter().position(|&a| a == i).unwrap_or(usize::MAX)).collect();
    let open0: Vec<MPoly> = src
        .open0
        .iter()
        .filter(|o| o.support().iter().all(|i| alg.contains(i)))
        .map(|o| o.rename(&ax, &to_a0))
        .collect();
    let open1: Vec<MPoly> = src
        .open1
        .iter()
        .filter(|o| o.support().iter().all(|i| keep1.contains(i)))
        .map(|o| o.rename(&axy, &to_a1))
        .collect();
    let mid = Arc::new(Presentation {
        field: src.field.clone(),
        i0: src.i0.eliminate(&alg).rename(&ax, &(0..na).collect::<Vec<_>>()),
        i1: src.i1.eliminate(&keep1).rename(&axy, &(0..2 * na).collect::<Vec<_>>()),
        open0: if open0.is_empty() { vec![MPoly::one(&ax)] } else { open0 },
        open1: if open1.is_empty() { vec![MPoly::one(&axy)] } else { open1 },
        x: ax.clone(),
        xy: axy,
        almost: src.almost,
    });
    let order = MonoOrder::Elim((0..n).map(|i| !alg.contains(&i)).collect());
    let gb = groebner_basis(src.i0.gens(), &order);
    let h0 = f
        .f0
        .iter()
        .map(|fj| {
            let r = normal_form(fj, &gb, &order);
            if r.support().iter().any(|i| !alg.contains(i)) {
                return Err(Error::PresentationInsufficient(format!(
                    "{fj} is not a function of the algebraic coordinates"
                )));
            }
            Ok(r.rename(&ax, &to_a0))
        })
        .collect::<Result<Vec<_>>>()?;
    let g0 = alg.iter().map(|&i| MPoly::var(&src.x, i)).collect();
    let g = Morphism::new(src.clone(), mid.clone(), g0)?;
    let h = Morphism::new(mid, f.target.clone(), h0)?;
    Ok((g, h))
}

pub fn direct_image(task: &DirectImageTask) -> Result<ImageReport> {
    let f = &task.morphism;
    let errs = f.validate();
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }
    if f.source.is_empty() {
        return Ok(ImageReport {
            output: Stratification::constant(f.target.clone(), false),
            max_depth: 0,
            depth_bound: 0,
        });
    }
    let stage = |s: &str, e: Error| match e {
        Error::Unsupported { .. } => e,
        other => Error::unsupported(s, other.to_string()),
    };
    match task.case {
        Case::FiniteEtale => finite_etale_report(f, &task.input).map_err(|e| stage("finite-etale", e)),
        Case::Fibration => {
            let output = direct_image_fibration(f, &task.input).map_err(|e| stage("fibration", e))?;
            Ok(ImageReport { output, max_depth: 0, depth_bound: f.source.n() + 1 })
        }
        Case::Composite => {
            let (g, h) = stein_factorize(f).map_err(|e| stage("stein", e))?;
            let mid = direct_image_fibration(&g, &task.input).map_err(|e| stage("fibration", e))?;
            let r = finite_etale_report(&h, &mid).map_err(|e| stage("finite-etale", e))?;
            Ok(ImageReport { depth_bound: f.source.n() + 1, ..r })
        }
    }
}

// quantifier elimination

/// A prolonged ambient: coordinates for `σ^j(v)` of every variable in scope.
#[derive(Clone)]
struct Scope {
    pres: Arc<Presentation>,
    /// Per variable, the coordinate of each `σ^j`.
    vars: Vec<(String, Vec<usize>)>,
}

impl Scope {
    fn ambient(field: &Field, vars: &[String], depth: u32) -> Result<Scope> {
        let n = vars.len();
        let k = depth as usize;
        let mut xs = Vec::new();
        for j in 0..=k {
            for v in vars {
                xs.push(if j == 0 { v.clone() } else { format!("{v}_{j}") });
            }
        }
        let ys: Vec<String> = xs.iter().map(|v| format!("{v}_y")).collect();
        let (x, xy) = Presentation::rings(field, &xs, &ys)?;
        let total = xs.len();
        let mut i1 = Vec::new();
        for j in 0..k {
            for i in 0..n {
                i1.push(MPoly::var(&xy, total + j * n + i).sub(&MPoly::var(&xy, (j + 1) * n + i)));
            }
        }
        let pres = Presentation {
            field: field.clone(),
            i0: Ideal::zero(&x),
            i1: Ideal::new(&xy, i1),
            open0: vec![MPoly::one(&x)],
            open1: vec![MPoly::one(&xy)],
            x,
            xy,
            almost: false,
        };
        let vs = vars.iter().enumerate().map(|(i, v)| (v.clone(), (0..=k).map(|j| j * n + i).collect())).collect();
        Ok(Scope { pres: Arc::new(pres), vars: vs })
    }

    /// Add a bound variable `z` with coordinates `z, σ(z)` and the relation `σ(z) = z'`.
    fn extend(&self, z: &str) -> Result<Scope> {
        let p = &self.pres;
        let n = p.n();
        let taken: Vec<String> = p.xy.vars.clone();
        let zs = fresh_names(&format!("{z}_q"), 2, 0, &taken);
        let mut xs = p.xs().to_vec();
        xs.extend(zs.iter().cloned());
        let mut ys = p.ys().to_vec();
        ys.extend(zs.iter().map(|v| format!("{v}_y")));
        let (x, xy) = Presentation::rings(&p.field, &xs, &ys)?;
        let map1: Vec<usize> = (0..n).chain(n + 2..2 * n + 2).collect();
        let mut i1: Vec<MPoly> = p.i1.gens().iter().map(|g| g.rename(&xy, &map1)).collect();
        i1.push(MPoly::var(&xy, 2 * n + 2).sub(&MPoly::var(&xy, n + 1)));
        let pres = Presentation {
            field: p.field.clone(),
            i0: Ideal::zero(&x),
            i1: Ideal::new(&xy, i1),
            open0: vec![MPoly::one(&x)],
            open1: vec![MPoly::one(&xy)],
            x,
            xy,
            almost: false,
        };
        let mut vars = self.vars.clone();
        vars.push((z.to_string(), vec![n, n + 1]));
        Ok(Scope { pres: Arc::new(pres), vars })
    }

    fn coord(&self, v: &str, shift: u32) -> Result<usize> {
        let (_, cs) = self
            .vars
            .iter()
            .rev()
            .find(|(n, _)| n == v)
            .ok_or_else(|| Error::VariableMismatch(format!("unknown variable `{v}`")))?;
        cs.get(shift as usize).copied().ok_or_else(|| {
            Error::unsupported("qe", format!("σ^{shift}({v}) exceeds the supported σ-depth"))
        })
    }

    fn poly(&self, t: &Term, shift: u32) -> Result<MPoly> {
        let r = &self.pres.x;
        Ok(match t {
            Term::Var(v) => MPoly::var(r, self.coord(v, shift)?),
            Term::Const(c) => MPoly::from_i64(r, *c),
            Term::Sigma(k, u) => self.poly(u, shift + k)?,
            Term::Neg(u) => self.poly(u, shift)?.neg(),
            Term::Add(a, b) => self.poly(a, shift)?.add(&self.poly(b, shift)?),
            Term::Sub(a, b) => self.poly(a, shift)?.sub(&self.poly(b, shift)?),
            Term::Mul(a, b) => self.poly(a, shift)?.mul(&self.poly(b, shift)?),
            Term::Pow(a, e) => self.poly(a, shift)?.pow(*e),
        })
    }
}

/// Output of [`quantifier_eliminate`]: a stratification on the prolonged ambient whose first
/// coordinates are the free variables.
#[derive(Clone, Debug)]
pub struct QeResult {
    pub stratification: Stratification,
    pub vars: Vec<String>,
    pub depth: u32,
    pub max_devissage: usize,
}

impl QeResult {
    /// Realisations projected to the free variables, sorted.
    pub fn realisations(&self, k: &DiffField, budget: u128) -> Result<Vec<Vec<u32>>> {
        let n = self.vars.len();
        let mut pts: Vec<Vec<u32>> = self
            .stratification
            .evaluate(k, budget)?
            .points
            .into_iter()
            .map(|p| p[..n].to_vec())
            .collect();
        pts.sort();
        pts.dedup();
        Ok(pts)
    }
}

fn free_depth(f: &Formula) -> u32 {
    depth_of(f, &|_| true, &mut Vec::new())
}

/// Largest σ-shift applied to a variable selected by `pick` outside the binders in `bound`.
fn depth_of(f: &Formula, pick: &dyn Fn(&str) -> bool, bound: &mut Vec<String>) -> u32 {
    fn term(t: &Term, shift: u32, pick: &dyn Fn(&str) -> bool, bound: &[String]) -> u32 {
        match t {
            Term::Var(v) if !bound.contains(v) && pick(v) => shift,
            Term::Var(_) | Term::Const(_) => 0,
            Term::Sigma(k, u) => term(u, shift + k, pick, bound),
            Term::Neg(u) | Term::Pow(u, _) => term(u, shift, pick, bound),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => term(a, shift, pick, bound).max(term(b, shift, pick, bound)),
        }
    }
    match f {
        Formula::Eq(a, b) => term(a, 0, pick, bound).max(term(b, 0, pick, bound)),
        Formula::Not(g) => depth_of(g, pick, bound),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            depth_of(a, pick, bound).max(depth_of(b, pick, bound))
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            bound.push(v.clone());
            let d = depth_of(g, pick, bound);
            bound.pop();
            d
        }
    }
}

/// Eliminate the quantifiers of `f` over `field`. Free variables are ordered as in `vars`
/// (default: order of first occurrence).
pub fn quantifier_eliminate(f: &Formula, field: &Field, vars: Option<&[String]>) -> Result<QeResult> {
    let vars: Vec<String> = match vars {
        Some(v) => v.to_vec(),
        None => f.free_vars(),
    };
    if let Some(v) = f.free_vars().iter().find(|v| !vars.contains(v)) {
        return Err(Error::VariableMismatch(format!("free variable `{v}` missing from the variable list")));
    }
    let depth = free_depth(f) + f.quantifier_depth() as u32;
    let scope = Scope::ambient(field, &vars, depth)?;
    let mut dev = Devissage::new(scope.pres.n() + 3);
    let s = qe_rec(f, &scope, &mut dev)?;
    Ok(QeResult { stratification: s, vars, depth, max_devissage: dev.max_depth })
}

fn qe_rec(f: &Formula, scope: &Scope, dev: &mut Devissage) -> Result<Stratification> {
    let amb = &scope.pres;
    match f {
        Formula::Eq(a, b) => {
            let p = scope.poly(a, 0)?.sub(&scope.poly(b, 0)?);
            if p.is_zero() {
                return Ok(Stratification::constant(amb.clone(), true));
            }
            let mut closed = vec![p];
            for shift in 1.. {
                match (scope.poly(a, shift), scope.poly(b, shift)) {
                    (Ok(x), Ok(y)) => closed.push(x.sub(&y)),
                    _ => break,
                }
            }
            Ok(Stratification::of_piece(amb.clone(), Piece::new(&amb.x, closed, vec![MPoly::one(&amb.x)]), true))
        }
        Formula::Not(g) => Ok(qe_rec(g, scope, dev)?.not()),
        Formula::And(a, b) => qe_rec(a, scope, dev)?.and(&qe_rec(b, scope, dev)?),
        Formula::Or(a, b) => qe_rec(a, scope, dev)?.or(&qe_rec(b, scope, dev)?),
        Formula::Implies(a, b) => qe_rec(a, scope, dev)?.not().or(&qe_rec(b, scope, dev)?),
        Formula::Forall(v, g) => {
            let neg = Formula::Exists(v.clone(), Box::new(Formula::Not(g.clone())));
            Ok(qe_rec(&neg, scope, dev)?.not())
        }
        Formula::Exists(z, g) => {
            let ext = scope.extend(z)?;
            let sigma_used = depth_of(g, &|v| v == z, &mut Vec::new()) > 0;
            let body = qe_rec(g, &ext, dev).map_err(|e| match e {
                Error::Unsupported { stage, detail } => Error::Unsupported { stage, detail: format!("{detail} in `{g}`") },
                e => e,
            })?;
            let mut out = Stratification::constant(amb.clone(), false);
            for s in &body.strata {
                if s.is_bottom() {
                    continue;
                }
                if !s.is_top() {
                    return Err(Error::unsupported("qe", format!("nested quantifier with a Galois cover in `{f}`")));
                }
                out = out.or(&project_bound(&ext, scope, &s.piece, sigma_used, dev)?)?;
            }
            Ok(out)
        }
    }
}

/// Image of a piece of the extended ambient `(…, z, z')` in the enclosing one.
fn project_bound(ext: &Scope, scope: &Scope, piece: &Piece, sigma_used: bool, dev: &mut Devissage) -> Result<Stratification> {
    let amb = &scope.pres;
    let n = amb.n();
    let (iz, izp) = (n, n + 1);
    let full = ext.pres.x0_piece().intersect(piece);
    let mut out = Stratification::constant(amb.clone(), false);
    if full.is_empty() {
        return Ok(out);
    }
    // source over (…, z) with z' eliminated
    let mut xs = amb.xs().to_vec();
    xs.push(ext.pres.xs()[iz].clone());
    let mut ys = amb.ys().to_vec();
    ys.push(ext.pres.ys()[iz].clone());
    let (sx, sxy) = Presentation::rings(&amb.field, &xs, &ys)?;
    let map1: Vec<usize> = (0..n).chain(n + 1..2 * n + 1).collect();
    let base_i1: Vec<MPoly> = amb.i1.gens().iter().map(|g| g.rename(&sxy, &map1)).collect();
    let mut comps = minimal_primes(&full.ideal())?;
    comps.sort_by_key(|c| c.key());
    for p in comps {
        let order = MonoOrder::Elim((0..n + 2).map(|i| i == izp).collect());
        let gb = groebner_basis(p.gens(), &order);
        let rel = gb
            .iter()
            .filter(|g| g.degree_in(izp) == 1 && g.coefficients_in(izp)[1].is_constant())
            .min_by_key(|g| g.num_terms())
            .cloned();
        let to_s: Vec<usize> = (0..=n).chain([usize::MAX]).collect();
        let (images, relation, gens) = match rel {
            Some(g) => {
                let parts = g.coefficients_in(izp);
                let c = parts[1].constant_value().unwrap();
                let h = parts[0].neg().scale(&amb.field.inv(&c));
                let mut images: Vec<MPoly> = (0..=n).map(|i| MPoly::var(&ext.pres.x, i)).collect();
                images.push(h.clone());
                let hs = h.rename(&sx, &to_s);
                let hxy = hs.rename(&sxy, &(0..=n).collect::<Vec<_>>());
                (images, Some(MPoly::var(&sxy, 2 * n + 1).sub(&hxy)), p.gens().to_vec())
            }
            // σ(z) only enters through shifted copies of the atoms
            None if !sigma_used && !full.open.iter().any(|g| g.involves(izp)) =>
            {
                let keep: Vec<usize> = (0..=n).collect();
                let images: Vec<MPoly> = (0..n + 2).map(|i| MPoly::var(&ext.pres.x, i)).collect();
                (images, None, p.eliminate_in_place(&keep).gens().to_vec())
            }
            None => {
                return Err(Error::unsupported("qe", "σ of the bound variable is not determined linearly"));
            }
        };
        let sub = |f: &MPoly| f.compose(&images).rename(&sx, &to_s);
        let closed: Vec<MPoly> = gens.iter().map(sub).filter(|g| !g.is_zero()).collect();
        let open: Vec<MPoly> = full.open.iter().map(sub).collect();
        let mut i1 = base_i1.clone();
        i1.extend(relation);
        let src = Arc::new(Presentation {
            field: amb.field.clone(),
            i0: Ideal::zero(&sx),
            i1: Ideal::new(&sxy, i1),
            open0: vec![MPoly::one(&sx)],
            open1: vec![MPoly::one(&sxy)],
            x: sx.clone(),
            xy: sxy.clone(),
            almost: false,
        });
        let piece = Piece { ring: sx.clone(), closed, open };
        out = out.or(&image_one(&src, amb, &piece, dev, 0)?)?;
    }
    Ok(out)
}

// Frobenius thresholds

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FrobReport {
    pub instance: String,
    pub grid: Vec<(u64, u32)>,
    /// Least tested `q` from which every tested `q' ≥ q` succeeds.
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub failures: Vec<(u64, u32)>,
    /// Per `q`, the least `m` with a witness (presentations only).
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witness_degrees: Vec<(u64, Option<u32>)>,
}

fn threshold(qs: &[u64], failed: &BTreeSet<u64>) -> Option<u64> {
    let mut n = None;
    for &q in qs.iter().rev() {
        if failed.contains(&q) {
            break;
        }
        n = Some(q);
    }
    n
}

/// Least tested `q` beyond which `p` has a realisation over some `F_{q^m}`, `m ≤ m_max`.
pub fn frobenius_scan(instance: &str, p: &Presentation, qs: &[u64], m_max: u32, budget: u128) -> Result<FrobReport> {
    let mut qs = qs.to_vec();
    qs.sort();
    let mut grid = Vec::new();
    let mut failures = Vec::new();
    let mut degrees = Vec::new();
    let mut failed = BTreeSet::new();
    for &q in &qs {
        let w = nonempty_witness(p, q, m_max, budget)?;
        let m = w.as_ref().map(|(k, _)| k.m);
        grid.extend((1..=m.unwrap_or(m_max)).map(|i| (q, i)));
        if m.is_none() {
            failures.push((q, m_max));
            failed.insert(q);
        }
        degrees.push((q, m));
    }
    Ok(FrobReport { instance: instance.into(), grid, n: threshold(&qs, &failed), failures, witness_degrees: degrees })
}

/// Least tested `q` beyond which two evaluations agree at every tested `m`. An evaluation
/// that fails (a degenerate fibre in small characteristic, say) counts as disagreement.
pub fn frobenius_scan_pair<F>(instance: &str, qs: &[u64], ms: &[u32], mut eval: F) -> Result<FrobReport>
where
    F: FnMut(&DiffField) -> Result<(Vec<Vec<u32>>, Vec<Vec<u32>>)>,
{
    let mut qs = qs.to_vec();
    qs.sort();
    let mut grid = Vec::new();
    let mut failures = Vec::new();
    let mut failed = BTreeSet::new();
    for &q in &qs {
        for &m in ms {
            let k = DiffField::from_q(q, m)?;
            let agree = match eval(&k) {
                Ok((mut a, mut b)) => {
                    a.sort();
                    b.sort();
                    a == b
                }
                Err(e @ Error::Budget { .. }) => return Err(e),
                Err(_) => false,
            };
            grid.push((q, m));
            if !agree {
                failures.push((q, m));
                failed.insert(q);
            }
        }
    }
    Ok(FrobReport { instance: instance.into(), grid, n: threshold(&qs, &failed), failures, witness_degrees: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Cover;
    use crate::group::FiniteGroup;
    use crate::logic::{parse, Oracle};
    use crate::points::{enumerate_realisations, DEFAULT_BUDGET};

    fn fixed_line(field: &Field, var: &str, punctured: bool) -> Arc<Presentation> {
        let xs = vec![var.to_string()];
        let ys = vec![format!("{var}y")];
        let p = Presentation::parse_named(field, &xs, &ys, &["0"], &[format!("{var}y - {var}")]).unwrap();
        Arc::new(if punctured { p.with_open(&[var], &[] as &[&str]).unwrap() } else { p })
    }

    fn squaring(p: u64) -> Morphism {
        let f = Field::Prime(p);
        Morphism::parse(fixed_line(&f, "x", true), fixed_line(&f, "u", true), &["x^2"]).unwrap()
    }

    fn image_of(f: &Morphism, a: &Stratification, k: &DiffField) -> Vec<Vec<u32>> {
        let gf = k.gf().unwrap();
        let pts = a.evaluate(k, DEFAULT_BUDGET).unwrap().points;
        let mut out: Vec<Vec<u32>> = pts
            .iter()
            .map(|x| f.f0.iter().map(|g| gf.compile(g).unwrap().eval(&gf, x)).collect())
            .collect();
        out.sort();
        out.dedup();
        out
    }

    fn sorted(mut v: Vec<Vec<u32>>) -> Vec<Vec<u32>> {
        v.sort();
        v
    }

    #[test]
    fn squaring_image_is_residues() {
        let f = squaring(7);
        let top = Stratification::constant(f.source.clone(), true);
        let out = direct_image_finite_etale(&f, &top).unwrap();
        let k = DiffField::from_q(7, 1).unwrap();
        let got = sorted(out.evaluate(&k, DEFAULT_BUDGET).unwrap().points);
        assert_eq!(got, vec![vec![1], vec![2], vec![4]]);
        assert!(out.strata.iter().any(|s| s.cover.g0.order() == 2 && s.domain.len() == 1));
        let bottom = Stratification::constant(f.source.clone(), false);
        assert!(direct_image_finite_etale(&f, &bottom).unwrap().evaluate(&k, DEFAULT_BUDGET).unwrap().points.is_empty());
        for (q, m) in [(7u64, 2u32), (49, 1)] {
            let k = DiffField::from_q(q, m).unwrap();
            assert_eq!(sorted(out.evaluate(&k, DEFAULT_BUDGET).unwrap().points), image_of(&f, &top, &k));
        }
    }

    #[test]
    fn identity_image_is_unchanged() {
        let y = fixed_line(&Field::Rationals, "u", true);
        let f = Morphism::identity(y.clone());
        let r = direct_image(&DirectImageTask {
            morphism: f,
            input: Stratification::constant(y.clone(), true),
            case: Case::Fibration,
        })
        .unwrap();
        let k = DiffField::from_q(5, 1).unwrap();
        assert_eq!(r.output.evaluate(&k, DEFAULT_BUDGET).unwrap().points.len(), 4);
    }

    fn plane() -> Arc<Presentation> {
        let q = Field::Rationals;
        let xs = vec!["a".to_string(), "b".to_string()];
        let ys = vec!["ay".to_string(), "by".to_string()];
        Arc::new(
            Presentation::parse_named(&q, &xs, &ys, &["0"], &["ay - a", "by - b"])
                .unwrap()
                .with_open(&["a*b"], &[] as &[&str])
                .unwrap(),
        )
    }

    #[test]
    fn fibration_pulled_back_kummer() {
        let x = plane();
        let y = fixed_line(&Field::Rationals, "a", true);
        let f = Morphism::parse(x.clone(), y, &["a"]).unwrap();
        let zs = vec!["z0".to_string(), "z1".to_string()];
        let ws = vec!["w0".to_string(), "w1".to_string()];
        let z = Presentation::parse_named(&Field::Rationals, &zs, &ws, &["0"], &["w0 - z0", "w1 - z1"])
            .unwrap()
            .with_open(&["z0*z1"], &[] as &[&str])
            .unwrap();
        let p0 = vec![MPoly::parse(&z.x, "z0^2").unwrap(), MPoly::parse(&z.x, "z1").unwrap()];
        let act = vec![
            vec![MPoly::parse(&z.x, "z0").unwrap(), MPoly::parse(&z.x, "z1").unwrap()],
            vec![MPoly::parse(&z.x, "-z0").unwrap(), MPoly::parse(&z.x, "z1").unwrap()],
        ];
        let c = Cover::new(x.clone(), z, p0, None, FiniteGroup::cyclic(2), act, None).unwrap();
        let a = Stratification::new(x.clone(), vec![Stratum { piece: Piece::full(&x.x), cover: Arc::new(c), domain: [1].into() }])
            .unwrap();
        let out = direct_image_fibration(&f, &a).unwrap();
        for q in [3u64, 5, 7, 9, 11, 13] {
            let k = DiffField::from_q(q, 1).unwrap();
            assert_eq!(sorted(out.evaluate(&k, DEFAULT_BUDGET).unwrap().points), image_of(&f, &a, &k), "q={q}");
        }
    }

    #[test]
    fn stein_factorization_shapes() {
        // x ↦ x² after forgetting a free coordinate s
        let q = Field::Rationals;
        let xs = vec!["x".to_string(), "s".to_string()];
        let ys = vec!["xy".to_string(), "sy".to_string()];
        let src = Arc::new(
            Presentation::parse_named(&q, &xs, &ys, &["0"], &["xy - x", "sy - s"])
                .unwrap()
                .with_open(&["x"], &[] as &[&str])
                .unwrap(),
        );
        let y = fixed_line(&q, "u", true);
        let f = Morphism::parse(src.clone(), y.clone(), &["x^2"]).unwrap();
        let (g, h) = stein_factorize(&f).unwrap();
        assert_eq!(g.target.xs(), &["x".to_string()]);
        assert_eq!(h.f0[0].to_string(), "x^2");
        let r = direct_image(&DirectImageTask {
            morphism: f.clone(),
            input: Stratification::constant(src.clone(), true),
            case: Case::Composite,
        })
        .unwrap();
        assert!(r.max_depth <= r.depth_bound);
        for qq in [3u64, 5, 7, 11] {
            let k = DiffField::from_q(qq, 1).unwrap();
            let want = image_of(&f, &Stratification::constant(src.clone(), true), &k);
            assert_eq!(sorted(r.output.evaluate(&k, DEFAULT_BUDGET).unwrap().points), want);
        }
        // finite étale: nothing to split off
        let (g, h) = stein_factorize(&squaring(7)).unwrap();
        assert_eq!(g.f0.len(), 1);
        assert_eq!(h.f0[0].to_string(), "x^2");
        // integral fibres: the finite part is the identity
        let f = Morphism::parse(plane(), fixed_line(&q, "a", true), &["a"]).unwrap();
        let (_, h) = stein_factorize(&f).unwrap();
        assert_eq!(h.f0[0].to_string(), "a");
    }

    fn oracle_check(text: &str, qs: &[u64], min_ext: u32) {
        let f = parse(text).unwrap();
        let r = quantifier_eliminate(&f, &Field::Rationals, None).unwrap();
        let ext = num_integer::lcm(crate::logic::witness_extension(&r.stratification), min_ext);
        for &q in qs {
            for m in [1u32, 2] {
                let k = DiffField::from_q(q, m).unwrap();
                if k.order().pow(r.vars.len() as u32) > 200 || k.order().pow(ext) > DEFAULT_BUDGET {
                    continue;
                }
                let o = Oracle::with_extension(&k, ext, DEFAULT_BUDGET).unwrap_or_else(|e| panic!("{text} q={q} m={m} ext={ext}: {e}"));
                let want = o.realisations(&f, &r.vars).unwrap_or_else(|e| panic!("{text} q={q} m={m} ext={ext}: {e}"));
                assert_eq!(r.realisations(&k, DEFAULT_BUDGET).unwrap(), want, "{text} at q={q}, m={m}");
            }
        }
    }

    #[test]
    fn qe_round_trips() {
        oracle_check("E z. z*z - v1 = 0 & s(z) - z = 0", &[3, 5, 7, 11, 13], 1);
        oracle_check("s(v1) - v1^2 = 0 | v1 = 1", &[2, 3, 5, 7], 1);
        oracle_check("0 = 0", &[3, 5], 1);
        oracle_check("E z. z*z - v1 = 0", &[3, 5, 7], 2);
        oracle_check("~(E z. z*z - v1 = 0 & s(z) - z = 0) & ~(v1 = 0)", &[3, 5, 7, 9], 1);
        oracle_check("E z. z*z - v1 = 0 & s(z) + z = 0", &[3, 5, 7, 9], 1);
        oracle_check("A z. ~(z*z - v1 = 0) | ~(s(z) - z = 0)", &[3, 5, 7], 1);
        oracle_check("E z. z^3 - v1 = 0 & s(z) - z = 0", &[5, 7, 11], 1);
        oracle_check("E z. s(z) - z^2 = 0 & z*v1 - 1 = 0", &[2, 3, 5], 1);
        oracle_check("E z. z*z - v1 - v2 = 0 & s(z) - z = 0", &[3, 5], 1);
    }

    #[test]
    fn qe_rejects_nonlinear_sigma() {
        let f = parse("E z. s(z)*s(z) - z = 0 & z*z - v1 = 0").unwrap();
        assert!(matches!(quantifier_eliminate(&f, &Field::Rationals, None), Err(Error::Unsupported { .. })));
    }

    #[test]
    fn frobenius_scans() {
        let q = Field::Rationals;
        let graph = Presentation::parse(&q, 1, &["0"], &["y0 - x0^2"]).unwrap();
        let r = frobenius_scan("graph", &graph, &[2, 3, 4, 5, 7], 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.n, Some(2));
        assert!(r.failures.is_empty());
        let shift = Presentation::parse(&q, 1, &["0"], &["y0 - x0 - 1"]).unwrap();
        let r = frobenius_scan("shift", &shift, &[2, 3, 5], 6, DEFAULT_BUDGET).unwrap();
        assert_eq!(r.witness_degrees, vec![(2, Some(2)), (3, Some(3)), (5, Some(5))]);
        let same = frobenius_scan_pair("same", &[3, 5, 7], &[1], |k| {
            let pts = enumerate_realisations(&graph, k, DEFAULT_BUDGET)?;
            Ok((pts.clone(), pts))
        })
        .unwrap();
        assert_eq!(same.n, Some(3));
        let json = serde_json::to_value(&same).unwrap();
        assert_eq!(json["N"], 3);
    }
}
