//! Direct Galois covers `Z → X`, local Frobenius substitutions and twisted classes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::{Arc, OnceLock};

use crate::algebra::extension::{coerce_poly, Embedding};
use crate::algebra::factor::{factor_univariate, roots_fq};
use crate::algebra::gf::{Gf, GfPoly};
use crate::algebra::{Ideal, MPoly, Ring, UPoly};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::points::{Compiled, DiffField};
use crate::presentation::{jacobian, minors, product_list, Piece, Presentation};

#[derive(Clone, Debug)]
pub struct Cover {
    pub base: Arc<Presentation>,
    /// The cover presentation; its `x` block are the `z` coordinates, its `y` block the `w`.
    pub z: Presentation,
    /// Images of the base coordinates, in `z`.
    pub p0: Vec<MPoly>,
    /// Images of the base `(x, y)`, in `(z, w)`.
    pub p1: Vec<MPoly>,
    pub g0: FiniteGroup,
    /// Per element of `g0`, the images of `z` under its action.
    pub act0: Vec<Vec<MPoly>>,
    pub g1: FiniteGroup,
    /// Per element of `g1`, the images of `(z, w)`.
    pub act1: Vec<Vec<MPoly>>,
    pub hom_pi1: Vec<usize>,
    pub hom_sigma: Vec<usize>,
    cache: Arc<OnceLock<Vec<Option<MPoly>>>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverReport {
    pub valid: bool,
    pub errors: Vec<String>,
    pub etale: bool,
    pub faithful: Option<bool>,
}

/// The fibre of `Z₀ → X₀` over a realisation, with all points over one extension.
#[derive(Clone, Debug)]
pub struct Fibre {
    pub field: DiffField,
    pub gf: Arc<Gf>,
    pub x: Vec<u32>,
    pub points: Vec<Vec<u32>>,
}

#[derive(Clone, Debug)]
pub struct LocalFrobenius {
    pub element: usize,
    pub class: BTreeSet<usize>,
    pub field: DiffField,
    pub z: Vec<u32>,
    pub w: Vec<u32>,
}

struct Eval {
    act0: Vec<Vec<GfPoly>>,
    i0: Vec<GfPoly>,
    open0: Vec<GfPoly>,
    p0: Vec<GfPoly>,
    i1: Vec<GfPoly>,
    open1: Vec<GfPoly>,
}

impl Cover {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        base: Arc<Presentation>,
        z: Presentation,
        p0: Vec<MPoly>,
        p1: Option<Vec<MPoly>>,
        g0: FiniteGroup,
        act0: Vec<Vec<MPoly>>,
        g1: Option<(FiniteGroup, Vec<Vec<MPoly>>, Vec<usize>, Vec<usize>)>,
    ) -> Result<Cover> {
        if p0.len() != base.n() {
            return Err(Error::VariableMismatch(format!("p0 has {} entries, base has {}", p0.len(), base.n())));
        }
        if act0.len() != g0.order() || act0.iter().any(|a| a.len() != z.n()) {
            return Err(Error::VariableMismatch("G0 action must give one image per cover coordinate".into()));
        }
        let p1 = p1.unwrap_or_else(|| {
            let mut v: Vec<MPoly> = p0.iter().map(|f| z.on_x(f)).collect();
            v.extend(p0.iter().map(|f| z.on_y(f)));
            v
        });
        if p1.len() != 2 * base.n() {
            return Err(Error::VariableMismatch("p1 must give images of both base blocks".into()));
        }
        let (g1, act1, hom_pi1, hom_sigma) = match g1 {
            Some(t) => t,
            None => {
                let ident: Vec<usize> = (0..g0.order()).collect();
                let act1 = (0..g0.order()).map(|g| both_blocks(&z, &act0[g], &act0[g])).collect();
                (g0.clone(), act1, ident.clone(), ident)
            }
        };
        if act1.len() != g1.order() || act1.iter().any(|a| a.len() != 2 * z.n()) {
            return Err(Error::VariableMismatch("G1 action must give images of (z, w)".into()));
        }
        if hom_pi1.len() != g1.order() || hom_sigma.len() != g1.order() {
            return Err(Error::VariableMismatch("homomorphisms must be defined on all of G1".into()));
        }
        if hom_pi1.iter().chain(&hom_sigma).any(|&g| g >= g0.order()) {
            return Err(Error::VariableMismatch("homomorphism values outside G0".into()));
        }
        Ok(Cover { base, z, p0, p1, g0, act0, g1, act1, hom_pi1, hom_sigma, cache: Default::default() })
    }

    /// `Z = X` with trivial groups; cover coordinates are renamed `z*`, `w*`.
    pub fn trivial(base: Arc<Presentation>) -> Cover {
        let n = base.n();
        let taken: Vec<String> = base.xy.vars.clone();
        let zs = crate::presentation::fresh_names("z", n, 0, &taken);
        let ws = crate::presentation::fresh_names("w", n, 0, &taken);
        let z = base.renamed(&zs, &ws).expect("fresh names");
        let p0: Vec<MPoly> = (0..n).map(|i| MPoly::var(&z.x, i)).collect();
        let act0 = vec![p0.clone()];
        Cover::new(base, z, p0, None, FiniteGroup::trivial(), act0, None).expect("trivial cover")
    }

    pub fn is_trivial(&self) -> bool {
        self.g0.order() == 1 && self.g1.order() == 1
    }

    pub fn nz(&self) -> usize {
        self.z.n()
    }

    fn z0_piece(&self) -> Piece {
        let base_open: Vec<MPoly> = self.base.open0.iter().map(|o| o.compose(&self.p0)).collect();
        let base_closed: Vec<MPoly> = self.base.i0.gens().iter().map(|g| g.compose(&self.p0)).collect();
        let mut closed = self.z.i0.gens().to_vec();
        closed.extend(base_closed);
        Piece { ring: self.z.x.clone(), closed, open: product_list(&self.z.open0, &base_open) }
    }

    fn z1_piece(&self) -> Piece {
        let zp = self.z.x1_piece();
        let base_open: Vec<MPoly> = self.base.x1_piece().open.iter().map(|o| o.compose(&self.p1)).collect();
        let mut closed = zp.closed.clone();
        closed.extend(self.base.i1.gens().iter().map(|g| g.compose(&self.p1)));
        Piece { ring: self.z.xy.clone(), closed, open: product_list(&zp.open, &base_open) }
    }

    pub fn validate(&self) -> CoverReport {
        let mut errors = Vec::new();
        let zr = self.z.validate();
        errors.extend(zr.errors.iter().map(|e| format!("cover presentation: {e}")));
        let z0 = self.z0_piece();
        let z1 = self.z1_piece();
        for g in self.base.i0.gens() {
            let h = g.compose(&self.p0);
            if !z0.vanishes(&h) {
                errors.push(format!("p0 does not map Z0 into X0: {g} pulls back to {h}"));
            }
        }
        for g in self.base.i1.gens() {
            let h = g.compose(&self.p1);
            if !z1.vanishes(&h) {
                errors.push(format!("p1 does not map Z1 into X1: {g} pulls back to {h}"));
            }
        }
        let nz = self.nz();
        for (k, f) in self.p1.iter().enumerate() {
            let expect = if k < self.p0.len() {
                self.z.on_x(&self.p0[k])
            } else {
                self.z.on_y(&self.p0[k - self.p0.len()])
            };
            if !z1.vanishes(&f.sub(&expect)) {
                errors.push(format!("p1 component {k} is not p0 on the corresponding block"));
            }
        }
        self.check_action(&z0, &self.g0, &self.act0, &self.p0, "G0", &mut errors);
        self.check_action(&z1, &self.g1, &self.act1, &self.p1, "G1", &mut errors);
        if !self.g1.is_homomorphism(&self.g0, &self.hom_pi1) {
            errors.push("hom_pi1 is not a homomorphism".into());
        }
        if !self.g1.is_homomorphism(&self.g0, &self.hom_sigma) {
            errors.push("hom_sigma is not a homomorphism".into());
        }
        for g1 in 0..self.g1.order() {
            let a = &self.act1[g1];
            let za: Vec<MPoly> = self.act0[self.hom_pi1[g1]].iter().map(|f| self.z.on_x(f)).collect();
            let wa: Vec<MPoly> = self.act0[self.hom_sigma[g1]].iter().map(|f| self.z.on_y(f)).collect();
            for i in 0..nz {
                let d = a[i].sub(&za[i]);
                if !z1.vanishes(&d) {
                    errors.push(format!(
                        "first projection does not intertwine {} with {}: {}",
                        self.g1.labels[g1],
                        self.g0.labels[self.hom_pi1[g1]],
                        z1.ideal().reduce(&d)
                    ));
                }
                let d = a[nz + i].sub(&wa[i]);
                if !z1.vanishes(&d) {
                    errors.push(format!(
                        "second projection does not intertwine {} with {}: {}",
                        self.g1.labels[g1],
                        self.g0.labels[self.hom_sigma[g1]],
                        z1.ideal().reduce(&d)
                    ));
                }
            }
        }
        let etale = self.is_unramified(&z0, &self.p0, 0) && self.is_unramified(&z1, &self.p1, 1);
        if !etale {
            errors.push("cover is not unramified over the base".into());
        }
        let faithful = if errors.is_empty() { self.sample_fibres(&mut errors) } else { None };
        CoverReport { valid: errors.is_empty(), errors, etale, faithful }
    }

    fn check_action(
        &self,
        piece: &Piece,
        g: &FiniteGroup,
        act: &[Vec<MPoly>],
        p: &[MPoly],
        name: &str,
        errors: &mut Vec<String>,
    ) {
        for a in 0..g.order() {
            for c in &piece.closed {
                let h = c.compose(&act[a]);
                if !piece.vanishes(&h) {
                    errors.push(format!(
                        "{name} element {} does not preserve the ideal: {c} maps to {}",
                        g.labels[a],
                        piece.ideal().reduce(&h)
                    ));
                }
            }
            for f in p {
                let d = f.compose(&act[a]).sub(f);
                if !piece.vanishes(&d) {
                    errors.push(format!("{name} element {} does not commute with the covering map", g.labels[a]));
                }
            }
            for b in 0..g.order() {
                let ab = g.mul(a, b);
                for (i, f) in act[ab].iter().enumerate() {
                    let comp = act[a][i].compose(&act[b]);
                    if !piece.vanishes(&f.sub(&comp)) {
                        errors.push(format!(
                            "{name} action is not compatible with the table at ({}, {})",
                            g.labels[a], g.labels[b]
                        ));
                    }
                }
            }
        }
    }

    /// `[J(closed); J(p)]` has full rank at every point of the piece.
    fn is_unramified(&self, piece: &Piece, p: &[MPoly], _side: usize) -> bool {
        let ring = &piece.ring;
        let n = ring.nvars();
        let vars: Vec<usize> = (0..n).collect();
        let gens = piece.ideal().gb().to_vec();
        let mut m = jacobian(&gens, &vars);
        m.extend(jacobian(p, &vars));
        let ms = minors(&m, n, ring);
        let mut closed = piece.closed.clone();
        closed.extend(ms);
        Piece { ring: ring.clone(), closed, open: piece.open.clone() }.is_empty()
    }

    /// Fibres of `Z₀(F_q) → X₀(F_q)` over a small field must be `G₀`-orbits; returns whether
    /// every sampled stabiliser is trivial.
    fn sample_fibres(&self, errors: &mut Vec<String>) -> Option<bool> {
        let k = sample_field(&self.z.field)?;
        let gf = k.gf().ok()?;
        let zp = Presentation {
            i0: Ideal::new(&self.z.x, self.z0_piece().closed),
            open0: self.z0_piece().open,
            ..self.z.clone()
        };
        let pts = crate::points::enumerate_x0(&zp, &k, 200_000).ok()?;
        let ev = self.compile(&gf).ok()?;
        let mut fibres: BTreeMap<Vec<u32>, Vec<Vec<u32>>> = BTreeMap::new();
        for z in &pts {
            let x: Vec<u32> = ev.p0.iter().map(|f| f.eval(&gf, z)).collect();
            fibres.entry(x).or_default().push(z.clone());
        }
        let mut faithful = true;
        for (x, fib) in fibres {
            let orbit: BTreeSet<Vec<u32>> = (0..self.g0.order()).map(|g| ev.act(&gf, g, &fib[0])).collect();
            let fset: BTreeSet<Vec<u32>> = fib.iter().cloned().collect();
            if orbit != fset {
                errors.push(format!("fibre over {x:?} in {} is not a single G0-orbit", gf.field));
                return None;
            }
            if orbit.len() != self.g0.order() {
                faithful = false;
            }
        }
        Some(faithful)
    }

    fn compile(&self, gf: &Gf) -> Result<Eval> {
        let c = |v: &[MPoly]| v.iter().map(|f| gf.compile(f)).collect::<Result<Vec<_>>>();
        let z0 = self.z0_piece();
        let z1 = self.z1_piece();
        Ok(Eval {
            act0: self.act0.iter().map(|a| c(a)).collect::<Result<_>>()?,
            i0: c(&z0.closed)?,
            open0: c(&z0.open)?,
            p0: c(&self.p0)?,
            i1: c(&z1.closed)?,
            open1: c(&z1.open)?,
        })
    }

    /// For each cover coordinate, a polynomial in the base coordinates and that coordinate
    /// vanishing on the graph of `p0`.
    fn eliminants(&self) -> &Vec<Option<MPoly>> {
        self.cache.get_or_init(|| {
            let nx = self.base.n();
            let nz = self.nz();
            let mut vars: Vec<String> = crate::presentation::fresh_names("xb", nx, 0, &self.z.x.vars);
            vars.extend(self.z.x.vars.iter().cloned());
            let ring = Ring::new(self.z.field.clone(), vars);
            let zmap: Vec<usize> = (nx..nx + nz).collect();
            let mut gens: Vec<MPoly> = self.z0_piece().closed.iter().map(|g| g.rename(&ring, &zmap)).collect();
            for (j, f) in self.p0.iter().enumerate() {
                gens.push(MPoly::var(&ring, j).sub(&f.rename(&ring, &zmap)));
            }
            let ideal = Ideal::new(&ring, gens);
            (0..nz)
                .map(|i| {
                    let mut keep: Vec<usize> = (0..nx).collect();
                    keep.push(nx + i);
                    let e = ideal.eliminate_in_place(&keep);
                    e.gens()
                        .iter()
                        .filter(|g| g.degree_in(nx + i) > 0)
                        .min_by_key(|g| (g.degree_in(nx + i), g.num_terms()))
                        .cloned()
                })
                .collect()
        })
    }

    /// All points of `Z₀` over the realisation `x` of the base over `k`, together with the
    /// least extension of `k` (among those this search produces) containing them.
    pub fn fibre(&self, k: &DiffField, x: &[u32]) -> Result<Fibre> {
        if !Compiled::new(&self.base, k)?.contains(x) {
            return Err(Error::Validation(vec!["point is not a realisation of the base".into()]));
        }
        let kf = k.field()?;
        let gk = k.gf()?;
        let xe: Vec<_> = x.iter().map(|&a| gk.to_elem(a)).collect();
        let nx = self.base.n();
        let nz = self.nz();
        let kz = Ring::new(kf.clone(), self.z.x.vars.clone());
        let mut polys: Vec<UPoly> = Vec::new();
        let elim = self.eliminants();
        let mut fallback: Option<Ideal> = None;
        for i in 0..nz {
            let spec = match &elim[i] {
                Some(g) => {
                    let kr = Ring::new(kf.clone(), g.ring().vars.clone());
                    let gk2 = coerce_poly(g, &kr)?;
                    let mut images: Vec<MPoly> = xe.iter().map(|c| MPoly::constant(&kz, c.clone())).collect();
                    images.extend((0..nz).map(|j| MPoly::var(&kz, j)));
                    let s = gk2.compose(&images);
                    if s.is_zero() {
                        None
                    } else {
                        Some(s)
                    }
                }
                None => None,
            };
            let s = match spec {
                Some(s) => s,
                None => {
                    let j = match &fallback {
                        Some(j) => j.clone(),
                        None => {
                            let mut gens = Vec::new();
                            for g in &self.z0_piece().closed {
                                gens.push(coerce_poly(g, &kz)?);
                            }
                            for (j, f) in self.p0.iter().enumerate() {
                                gens.push(coerce_poly(f, &kz)?.sub(&MPoly::constant(&kz, xe[j].clone())));
                            }
                            let j = Ideal::new(&kz, gens);
                            if j.dimension() > 0 {
                                return Err(Error::NonEtale("the fibre is not finite".into()));
                            }
                            fallback = Some(j.clone());
                            j
                        }
                    };
                    if j.is_unit() {
                        return Err(Error::LiftNotFound("the fibre is empty".into()));
                    }
                    let e = j.eliminate_in_place(&[i]);
                    e.gens()
                        .iter()
                        .find(|g| g.degree_in(i) > 0)
                        .cloned()
                        .ok_or_else(|| Error::NonEtale("coordinate not finite over the base".into()))?
                }
            };
            polys.push(UPoly::from_mpoly(&s, i));
        }
        let mut d = 1usize;
        for f in &polys {
            for (g, _) in factor_univariate(f)?.factors {
                d = num_integer::lcm(d, g.deg().max(1) as usize);
            }
        }
        let big = k.extend(d as u32);
        let gb = big.gf()?;
        let emb = Embedding::new(&kf, &gb.field)?;
        let roots: Vec<Vec<u32>> = polys
            .iter()
            .map(|f| {
                let mut r: Vec<u32> = roots_fq(&emb.map_upoly(f)).iter().map(|e| gb.from_elem(e)).collect();
                r.sort();
                r.dedup();
                r
            })
            .collect();
        let xb: Vec<u32> = xe.iter().map(|e| gb.from_elem(&emb.map(e))).collect();
        let ev = self.compile(&gb)?;
        let mut points = Vec::new();
        let mut cur = vec![0u32; nz];
        search(&roots, 0, &mut cur, &mut |z| {
            if ev.i0.iter().all(|f| f.eval(&gb, z) == 0)
                && ev.open0.iter().any(|f| f.eval(&gb, z) != 0)
                && ev.p0.iter().zip(&xb).all(|(f, &a)| f.eval(&gb, z) == a)
            {
                points.push(z.to_vec());
            }
        });
        let _ = nx;
        if points.is_empty() {
            return Err(Error::LiftNotFound(format!("no point of the cover over {x:?}")));
        }
        if points.len() != self.g0.order() {
            return Err(Error::NonEtale(format!(
                "fibre has {} points, the group has {} elements",
                points.len(),
                self.g0.order()
            )));
        }
        Ok(Fibre { field: big, gf: gb, x: xb, points })
    }

    /// All `(z, w)` in `Z₁` over `(x, x^q)` with `z` in the fibre.
    pub fn lifts(&self, fibre: &Fibre) -> Result<Vec<(Vec<u32>, Vec<u32>)>> {
        let gf = &fibre.gf;
        let ev = self.compile(gf)?;
        let q = fibre.field.q();
        let mut out = Vec::new();
        for z in &fibre.points {
            let zq: Vec<u32> = z.iter().map(|&a| gf.pow(a, q)).collect();
            let mut seen = BTreeSet::new();
            for g in 0..self.g0.order() {
                let w = ev.act(gf, g, &zq);
                if !seen.insert(w.clone()) {
                    continue;
                }
                let mut zw = z.clone();
                zw.extend(w.iter().copied());
                if ev.i1.iter().all(|f| f.eval(gf, &zw) == 0) && ev.open1.iter().any(|f| f.eval(gf, &zw) != 0) {
                    out.push((z.clone(), w));
                }
            }
        }
        Ok(out)
    }

    /// The unique `g ∈ G₀` with `g·w = target`.
    pub fn find_group_element(&self, gf: &Gf, w: &[u32], target: &[u32]) -> Result<usize> {
        let ev = self.compile(gf)?;
        let hits: Vec<usize> = (0..self.g0.order()).filter(|&g| ev.act(gf, g, w) == target).collect();
        match hits.len() {
            0 => Err(Error::NoElement),
            1 => Ok(hits[0]),
            _ => Err(Error::NonUnique),
        }
    }

    /// The substitution at a lift: `g₀` with `g₀·w = z^q`.
    pub fn substitution(&self, fibre: &Fibre, z: &[u32], w: &[u32]) -> Result<usize> {
        let zq: Vec<u32> = z.iter().map(|&a| fibre.gf.pow(a, fibre.field.q())).collect();
        self.find_group_element(&fibre.gf, w, &zq)
    }

    pub fn local_frobenius(&self, k: &DiffField, x: &[u32]) -> Result<LocalFrobenius> {
        let fibre = self.fibre(k, x)?;
        let lifts = self.lifts(&fibre)?;
        let (z, w) = lifts
            .into_iter()
            .next()
            .ok_or_else(|| Error::LiftNotFound("no point of Z1 over the realisation".into()))?;
        let element = self.substitution(&fibre, &z, &w)?;
        let class = self.twisted_closure(&[element].into());
        Ok(LocalFrobenius { element, class, field: fibre.field, z, w })
    }

    /// Substitutions at every lift, for checking independence of the choice.
    pub fn all_substitutions(&self, k: &DiffField, x: &[u32]) -> Result<Vec<usize>> {
        let fibre = self.fibre(k, x)?;
        self.lifts(&fibre)?.iter().map(|(z, w)| self.substitution(&fibre, z, w)).collect()
    }

    /// Least superset closed under `ẋ ↦ g₁^{π₁} ẋ (g₁⁻¹)^{σ̃}`.
    pub fn twisted_closure(&self, s: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = s.clone();
        let mut frontier: Vec<usize> = s.iter().copied().collect();
        while let Some(a) = frontier.pop() {
            for g1 in 0..self.g1.order() {
                let l = self.hom_pi1[g1];
                let r = self.hom_sigma[self.g1.inv[g1]];
                let b = self.g0.mul(self.g0.mul(l, a), r);
                if out.insert(b) {
                    frontier.push(b);
                }
            }
        }
        out
    }

    pub fn twisted_classes(&self) -> Vec<BTreeSet<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for g in 0..self.g0.order() {
            if seen.contains(&g) {
                continue;
            }
            let c = self.twisted_closure(&[g].into());
            seen.extend(c.iter().copied());
            out.push(c);
        }
        out
    }

    /// The same cover over the restriction of its base to a smaller presentation with the
    /// same coordinates.
    pub fn restrict(&self, base: Arc<Presentation>) -> Cover {
        let mut z = self.z.clone();
        let extra0: Vec<MPoly> = base.i0.gens().iter().map(|g| g.compose(&self.p0)).collect();
        let extra1: Vec<MPoly> = base.i1.gens().iter().map(|g| g.compose(&self.p1)).collect();
        z.i0 = z.i0.add_gens(&extra0);
        z.i1 = z.i1.add_gens(&extra1);
        let o0: Vec<MPoly> = base.open0.iter().map(|g| g.compose(&self.p0)).collect();
        let o1: Vec<MPoly> = base.x1_piece().open.iter().map(|g| g.compose(&self.p1)).collect();
        let w0: Vec<MPoly> = o0.iter().map(|f| z.on_x(f)).collect();
        let w1: Vec<MPoly> = o0.iter().map(|f| z.on_y(f)).collect();
        z.open0 = product_list(&z.open0, &o0);
        z.open1 = product_list(&product_list(&product_list(&z.open1, &o1), &w0), &w1);
        let lifted_x: Vec<MPoly> = extra0.iter().map(|f| z.on_y(f)).collect();
        z.i1 = z.i1.add_gens(&extra0.iter().map(|f| z.on_x(f)).collect::<Vec<_>>()).add_gens(&lifted_x);
        Cover { base, z, cache: Default::default(), ..self.clone() }
    }

    /// `Z ×_X Z'` with the product groups acting componentwise.
    pub fn fibre_product(&self, other: &Cover) -> Result<Cover> {
        if self.base.x.vars != other.base.x.vars {
            return Err(Error::VariableMismatch("covers over different bases".into()));
        }
        let (na, nb) = (self.nz(), other.nz());
        let mut taken = self.z.xy.vars.clone();
        taken.extend(other.z.xy.vars.iter().cloned());
        let zs: Vec<String> = self
            .z
            .xs()
            .iter()
            .cloned()
            .chain(crate::presentation::fresh_names("zb", nb, 0, &taken))
            .collect();
        let ws: Vec<String> = self
            .z
            .ys()
            .iter()
            .cloned()
            .chain(crate::presentation::fresh_names("wb", nb, 0, &taken))
            .collect();
        let (x, xy) = Presentation::rings(&self.z.field, &zs, &ws)?;
        let ma0: Vec<usize> = (0..na).collect();
        let mb0: Vec<usize> = (na..na + nb).collect();
        let ma1: Vec<usize> = (0..na).chain(na + nb..2 * na + nb).collect();
        let mb1: Vec<usize> = (na..na + nb).chain(2 * na + nb..2 * (na + nb)).collect();
        let r = |v: &[MPoly], ring: &crate::algebra::RingRef, m: &[usize]| -> Vec<MPoly> {
            v.iter().map(|f| f.rename(ring, m)).collect()
        };
        let mut i0 = r(self.z.i0.gens(), &x, &ma0);
        i0.extend(r(other.z.i0.gens(), &x, &mb0));
        let pa = r(&self.p0, &x, &ma0);
        let pb = r(&other.p0, &x, &mb0);
        i0.extend(pa.iter().zip(&pb).map(|(a, b)| a.sub(b)));
        let mut i1 = r(self.z.i1.gens(), &xy, &ma1);
        i1.extend(r(other.z.i1.gens(), &xy, &mb1));
        let pa1 = r(&self.p1, &xy, &ma1);
        let pb1 = r(&other.p1, &xy, &mb1);
        i1.extend(pa1.iter().zip(&pb1).map(|(a, b)| a.sub(b)));
        let open0 = product_list(&r(&self.z.open0, &x, &ma0), &r(&other.z.open0, &x, &mb0));
        let open1 = product_list(&r(&self.z.open1, &xy, &ma1), &r(&other.z.open1, &xy, &mb1));
        let z = Presentation {
            field: self.z.field.clone(),
            i0: Ideal::new(&x, i0),
            i1: Ideal::new(&xy, i1),
            open0,
            open1,
            x,
            xy,
            almost: self.z.almost || other.z.almost,
        };
        let g0 = self.g0.product(&other.g0);
        let g1 = self.g1.product(&other.g1);
        let m0 = other.g0.order();
        let m1 = other.g1.order();
        let act0: Vec<Vec<MPoly>> = (0..g0.order())
            .map(|k| {
                let mut v = r(&self.act0[k / m0], &z.x, &ma0);
                v.extend(r(&other.act0[k % m0], &z.x, &mb0));
                v
            })
            .collect();
        let act1: Vec<Vec<MPoly>> = (0..g1.order())
            .map(|k| {
                let a = r(&self.act1[k / m1], &z.xy, &ma1);
                let b = r(&other.act1[k % m1], &z.xy, &mb1);
                let mut v: Vec<MPoly> = a[..na].to_vec();
                v.extend(b[..nb].iter().cloned());
                v.extend(a[na..].iter().cloned());
                v.extend(b[nb..].iter().cloned());
                v
            })
            .collect();
        let hom = |ha: &[usize], hb: &[usize]| -> Vec<usize> {
            (0..g1.order()).map(|k| ha[k / m1] * m0 + hb[k % m1]).collect()
        };
        let hom_pi1 = hom(&self.hom_pi1, &other.hom_pi1);
        let hom_sigma = hom(&self.hom_sigma, &other.hom_sigma);
        Cover::new(self.base.clone(), z, pa, Some(pa1), g0, act0, Some((g1, act1, hom_pi1, hom_sigma)))
    }
}

impl Eval {
    fn act(&self, gf: &Gf, g: usize, z: &[u32]) -> Vec<u32> {
        self.act0[g].iter().map(|f| f.eval(gf, z)).collect()
    }
}

fn search(roots: &[Vec<u32>], i: usize, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
    if i == roots.len() {
        f(cur);
        return;
    }
    for &r in &roots[i] {
        cur[i] = r;
        search(roots, i + 1, cur, f);
    }
}

/// `(z, w)` images: `a` on the `z` block and `b` on the `w` block.
pub fn both_blocks(z: &Presentation, a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let mut v: Vec<MPoly> = a.iter().map(|f| z.on_x(f)).collect();
    v.extend(b.iter().map(|f| z.on_y(f)));
    v
}

fn sample_field(f: &crate::algebra::Field) -> Option<DiffField> {
    match f {
        crate::algebra::Field::Rationals => DiffField::new(7, 1, 1).ok(),
        f => DiffField::new(f.characteristic(), f.degree() as u32, 1).ok(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;

    fn kummer(field: &Field, action: &str) -> Cover {
        let base = Arc::new(
            Presentation::parse(field, 1, &["0"], &["y0 - x0"]).unwrap().with_open(&["x0"], &[] as &[&str]).unwrap(),
        );
        let zs = vec!["z0".to_string()];
        let ws = vec!["w0".to_string()];
        let z = Presentation::parse_named(field, &zs, &ws, &["0"], &["w0 - z0"])
            .unwrap()
            .with_open(&["z0"], &[] as &[&str])
            .unwrap();
        let p0 = vec![MPoly::parse(&z.x, "z0^2").unwrap()];
        let act0 = vec![vec![MPoly::parse(&z.x, "z0").unwrap()], vec![MPoly::parse(&z.x, action).unwrap()]];
        let g = FiniteGroup::cyclic(2);
        Cover::new(base, z, p0, None, g, act0, None).unwrap()
    }

    #[test]
    fn kummer_validation() {
        let c = kummer(&Field::Prime(5), "-z0");
        let r = c.validate();
        assert!(r.valid, "{:?}", r.errors);
        assert!(r.etale);
        assert_eq!(r.faithful, Some(true));
        let bad = kummer(&Field::Prime(5), "z0 + 1").validate();
        assert!(!bad.valid);
        assert!(bad.errors.iter().any(|e| e.contains("does not commute")));
        let t = Cover::trivial(Arc::new(Presentation::affine(&Field::Rationals, 1)));
        assert!(t.validate().valid);
    }

    #[test]
    fn kummer_group_elements() {
        let c = kummer(&Field::Rationals, "-z0");
        let gf = Gf::get(7, 1).unwrap();
        assert_eq!(c.find_group_element(&gf, &[3], &[4]).unwrap(), 1);
        assert_eq!(c.find_group_element(&gf, &[3], &[3]).unwrap(), 0);
        assert!(matches!(c.find_group_element(&gf, &[3], &[1]), Err(Error::NoElement)));
    }

    #[test]
    fn kummer_frobenius_is_the_quadratic_character() {
        let c = kummer(&Field::Rationals, "-z0");
        for q in [3u64, 5, 7, 9, 11, 13] {
            let k = DiffField::from_q(q, 1).unwrap();
            let gf = k.gf().unwrap();
            let mut trivial = 0;
            for a in 1..gf.size {
                let lf = c.local_frobenius(&k, &[a]).unwrap();
                let square = gf.pow(a, ((q - 1) / 2) as u128) == 1;
                assert_eq!(lf.element == 0, square, "q={q} a={a}");
                assert_eq!(lf.class.len(), 1);
                if lf.element == 0 {
                    trivial += 1;
                }
                let all = c.all_substitutions(&k, &[a]).unwrap();
                assert!(all.iter().all(|&g| g == lf.element));
            }
            assert_eq!(trivial as u64, (q - 1) / 2);
        }
    }

    #[test]
    fn twisted_closure_examples() {
        let c = kummer(&Field::Rationals, "-z0");
        assert_eq!(c.twisted_closure(&[0].into()), [0].into());
        assert!(c.twisted_closure(&BTreeSet::new()).is_empty());
    }

    #[test]
    fn fibre_product_of_kummer_covers() {
        let c = kummer(&Field::Rationals, "-z0");
        let p = c.fibre_product(&c).unwrap();
        assert_eq!(p.g0.order(), 4);
        let r = p.validate();
        assert!(r.valid, "{:?}", r.errors);
        let k = DiffField::from_q(7, 1).unwrap();
        let lf = p.local_frobenius(&k, &[3]).unwrap();
        assert_eq!(p.g0.labels[lf.element], "(g1,g1)");
    }

    #[test]
    fn non_etale_point_and_non_realisation() {
        let c = kummer(&Field::Rationals, "-z0");
        let k = DiffField::from_q(7, 1).unwrap();
        assert!(c.local_frobenius(&k, &[0]).is_err());
    }
}
