//! Direct presentations `X₀ ← X₁ → X₀` of difference schemes, their morphisms,
//! locally closed pieces, decomposition into H-direct components and property strata.

use std::sync::Arc;

use crate::algebra::decompose::{is_geometrically_integral, is_radical, minimal_primes};
use crate::algebra::{Field, Ideal, MPoly, Ring, RingRef};
use crate::error::{Error, Result};

/// A locally closed subset `V(closed) ∖ V(open)` of an affine space; a point lies in it when
/// every closed generator vanishes and some open generator does not.
#[derive(Clone, Debug)]
pub struct Piece {
    pub ring: RingRef,
    pub closed: Vec<MPoly>,
    pub open: Vec<MPoly>,
}

/// Pairwise products, dropping zeros and repeats.
pub fn product_list(a: &[MPoly], b: &[MPoly]) -> Vec<MPoly> {
    let mut out: Vec<MPoly> = Vec::new();
    for f in a {
        for g in b {
            let h = f.mul(g).normalized();
            if !h.is_zero() && !out.contains(&h) {
                out.push(h);
            }
        }
    }
    out
}

impl Piece {
    pub fn full(ring: &RingRef) -> Piece {
        Piece { ring: ring.clone(), closed: vec![], open: vec![MPoly::one(ring)] }
    }

    pub fn new(ring: &RingRef, closed: Vec<MPoly>, open: Vec<MPoly>) -> Piece {
        let open = if open.is_empty() { vec![MPoly::zero(ring)] } else { open };
        Piece { ring: ring.clone(), closed, open }
    }

    pub fn parse(ring: &RingRef, closed: &[impl AsRef<str>], open: &[impl AsRef<str>]) -> Result<Piece> {
        let c = closed.iter().map(|s| MPoly::parse(ring, s.as_ref())).collect::<Result<Vec<_>>>()?;
        let o = if open.is_empty() {
            vec![MPoly::one(ring)]
        } else {
            open.iter().map(|s| MPoly::parse(ring, s.as_ref())).collect::<Result<Vec<_>>>()?
        };
        Ok(Piece::new(ring, c, o))
    }

    pub fn ideal(&self) -> Ideal {
        Ideal::new(&self.ring, self.closed.clone())
    }

    /// Empty over every field: each open generator vanishes on `V(closed)`.
    pub fn is_empty(&self) -> bool {
        let i = self.ideal();
        i.is_unit() || self.open.iter().all(|o| i.radical_contains(o))
    }

    pub fn intersect(&self, other: &Piece) -> Piece {
        let mut closed = self.closed.clone();
        closed.extend(other.closed.iter().cloned());
        Piece { ring: self.ring.clone(), closed, open: product_list(&self.open, &other.open) }
    }

    /// Disjoint pieces covering the complement of `self`.
    pub fn complement(&self) -> Vec<Piece> {
        let mut out = Vec::new();
        let outside = Piece { ring: self.ring.clone(), closed: vec![], open: self.closed.clone() };
        if !self.closed.is_empty() {
            out.push(outside);
        }
        let mut closed = self.closed.clone();
        closed.extend(self.open.iter().cloned());
        out.push(Piece { ring: self.ring.clone(), closed, open: vec![MPoly::one(&self.ring)] });
        out.into_iter().filter(|p| !p.is_empty()).collect()
    }

    /// Simplified copy: closed part replaced by a reduced basis, open generators reduced
    /// modulo it, vanishing ones dropped.
    pub fn simplified(&self) -> Piece {
        let i = self.ideal();
        if i.is_unit() {
            return Piece { ring: self.ring.clone(), closed: vec![MPoly::one(&self.ring)], open: vec![] };
        }
        let closed: Vec<MPoly> = i.gb().iter().map(|g| g.primitive_associate()).collect();
        let mut open: Vec<MPoly> = Vec::new();
        for o in &self.open {
            let r = i.reduce(o);
            if r.is_zero() {
                continue;
            }
            let r = if r.is_constant() { MPoly::one(&self.ring) } else { r.primitive_associate() };
            if !open.contains(&r) {
                open.push(r);
            }
        }
        if open.iter().any(|o| o.is_one()) {
            open = vec![MPoly::one(&self.ring)];
        }
        open.sort_by_key(|o| o.to_string());
        Piece { ring: self.ring.clone(), closed, open }
    }

    /// Whether `f` vanishes at every point of the piece: `f·o ∈ rad(closed)` for every `o`.
    pub fn vanishes(&self, f: &MPoly) -> bool {
        let i = self.ideal();
        i.contains(f) || self.open.iter().all(|o| i.radical_contains(&f.mul(o)))
    }

    pub fn key(&self) -> String {
        let s = self.simplified();
        let c: Vec<String> = s.closed.iter().map(|p| p.to_string()).collect();
        let o: Vec<String> = s.open.iter().map(|p| p.to_string()).collect();
        format!("[{}]\\[{}]", c.join(","), o.join(","))
    }

    pub fn rename(&self, target: &RingRef, map: &[usize]) -> Piece {
        Piece {
            ring: target.clone(),
            closed: self.closed.iter().map(|f| f.rename(target, map)).collect(),
            open: self.open.iter().map(|f| f.rename(target, map)).collect(),
        }
    }
}

/// `X₀ = V(I0) ∖ V(open0)` in variables `x`, `X₁ = V(I1) ∖ V(open1)` in `(x, y)`.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub field: Field,
    pub x: RingRef,
    pub xy: RingRef,
    pub i0: Ideal,
    pub i1: Ideal,
    pub open0: Vec<MPoly>,
    pub open1: Vec<MPoly>,
    pub almost: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub valid: bool,
    pub errors: Vec<String>,
    pub reduced: Option<bool>,
    pub empty: bool,
}

impl Presentation {
    /// Default variable names `x0..`, `y0..`.
    pub fn names(n: usize) -> (Vec<String>, Vec<String>) {
        ((0..n).map(|i| format!("x{i}")).collect(), (0..n).map(|i| format!("y{i}")).collect())
    }

    pub fn rings(field: &Field, xs: &[String], ys: &[String]) -> Result<(RingRef, RingRef)> {
        if xs.len() != ys.len() {
            return Err(Error::VariableMismatch("x and y blocks differ in length".into()));
        }
        let mut all = xs.to_vec();
        all.extend(ys.iter().cloned());
        let mut sorted = all.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::VariableMismatch(format!("repeated variable names in {all:?}")));
        }
        Ok((Ring::new(field.clone(), xs.to_vec()), Ring::new(field.clone(), all)))
    }

    /// Build from polynomial text with explicit variable names.
    pub fn parse_named(
        field: &Field,
        xs: &[String],
        ys: &[String],
        i0: &[impl AsRef<str>],
        i1: &[impl AsRef<str>],
    ) -> Result<Presentation> {
        let (x, xy) = Presentation::rings(field, xs, ys)?;
        Ok(Presentation {
            field: field.clone(),
            i0: Ideal::parse(&x, i0)?,
            i1: Ideal::parse(&xy, i1)?,
            open0: vec![MPoly::one(&x)],
            open1: vec![MPoly::one(&xy)],
            x,
            xy,
            almost: false,
        })
    }

    pub fn parse(field: &Field, n: usize, i0: &[impl AsRef<str>], i1: &[impl AsRef<str>]) -> Result<Presentation> {
        let (xs, ys) = Presentation::names(n);
        Presentation::parse_named(field, &xs, &ys, i0, i1)
    }

    /// `X₀ = 𝔸ⁿ` with an unconstrained correspondence.
    pub fn affine(field: &Field, n: usize) -> Presentation {
        Presentation::parse(field, n, &["0"], &["0"]).expect("affine space")
    }

    pub fn with_open(mut self, open0: &[impl AsRef<str>], open1: &[impl AsRef<str>]) -> Result<Presentation> {
        if !open0.is_empty() {
            self.open0 = open0.iter().map(|s| MPoly::parse(&self.x, s.as_ref())).collect::<Result<_>>()?;
        }
        if !open1.is_empty() {
            self.open1 = open1.iter().map(|s| MPoly::parse(&self.xy, s.as_ref())).collect::<Result<_>>()?;
        }
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.x.nvars()
    }

    pub fn xs(&self) -> &[String] {
        &self.x.vars
    }

    pub fn ys(&self) -> &[String] {
        &self.xy.vars[self.n()..]
    }

    /// `f(x)` as a polynomial on `X₁`.
    pub fn on_x(&self, f: &MPoly) -> MPoly {
        let map: Vec<usize> = (0..self.n()).collect();
        f.rename(&self.xy, &map)
    }

    /// `f(y)` as a polynomial on `X₁`.
    pub fn on_y(&self, f: &MPoly) -> MPoly {
        let n = self.n();
        let map: Vec<usize> = (n..2 * n).collect();
        f.rename(&self.xy, &map)
    }

    /// The closed part of `X₁` with its open set, as a piece of the `(x, y)` space.
    pub fn x1_piece(&self) -> Piece {
        let mut opens = self.open1.clone();
        opens = product_list(&opens, &self.open0.iter().map(|o| self.on_x(o)).collect::<Vec<_>>());
        Piece { ring: self.xy.clone(), closed: self.i1.gens().to_vec(), open: opens }
    }

    pub fn x0_piece(&self) -> Piece {
        Piece { ring: self.x.clone(), closed: self.i0.gens().to_vec(), open: self.open0.clone() }
    }

    /// Empty as a scheme (no points over any field).
    pub fn is_empty(&self) -> bool {
        self.x0_piece().is_empty() || self.x1_piece().is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut errors = Vec::new();
        for g in self.i0.gens() {
            let gx = self.on_x(g);
            if !self.i1.contains(&gx) && !self.i1.radical_contains(&gx) {
                errors.push(format!("I0 generator {g} pulled back along the first projection is not in I1"));
            }
            let gy = self.on_y(g);
            if !self.i1.contains(&gy) && !self.i1.radical_contains(&gy) {
                errors.push(format!(
                    "I0 generator {g} pulled back along the second projection ({gy}) is not in I1"
                ));
            }
        }
        let empty = self.is_empty();
        let reduced = match (is_radical(&self.i0), is_radical(&self.i1)) {
            (Ok(a), Ok(b)) => Some(a && b),
            _ => None,
        };
        ValidationReport { valid: errors.is_empty(), errors, reduced, empty }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let r = self.validate();
        if r.valid {
            Ok(())
        } else {
            Err(Error::Validation(r.errors))
        }
    }

    /// Ideal of the closure of the projection of `X₁` to the `x` block (`which = 0`) or the
    /// `y` block (`which = 1`), as an ideal in the `x` variables.
    pub fn projection_closure(&self, which: usize) -> Ideal {
        let n = self.n();
        let keep: Vec<usize> = if which == 0 { (0..n).collect() } else { (n..2 * n).collect() };
        let e = self.i1.eliminate(&keep);
        let ident: Vec<usize> = (0..n).collect();
        e.rename(&self.x, &ident)
    }

    /// Both `I0`, `I1` prime and both projections dominant.
    pub fn is_h_direct(&self) -> Result<bool> {
        if self.i0.is_unit() || self.i1.is_unit() {
            return Ok(false);
        }
        let p0 = minimal_primes(&self.i0)?;
        let p1 = minimal_primes(&self.i1)?;
        if p0.len() != 1 || p1.len() != 1 || !self.i0.contains_ideal(&p0[0]) || !self.i1.contains_ideal(&p1[0]) {
            return Ok(false);
        }
        Ok(self.projection_closure(0).equals(&self.i0) && self.projection_closure(1).equals(&self.i0))
    }

    /// Same presentation with a different correspondence and base ideal.
    pub fn with_ideals(&self, i0: Ideal, i1: Ideal) -> Presentation {
        Presentation { i0, i1, ..self.clone() }
    }

    /// Components whose realisation sets jointly give those of `self`; each is H-direct.
    pub fn direct_decompose(&self) -> Result<Vec<Presentation>> {
        self.ensure_valid()?;
        let mut out = Vec::new();
        let bound = self.n() + 2;
        for w in minimal_primes(&self.i1)? {
            self.decompose_component(w, bound, &mut out)?;
        }
        out.sort_by_key(|p| (p.i0.key(), p.i1.key()));
        out.dedup_by(|a, b| a.i0.equals(&b.i0) && a.i1.equals(&b.i1));
        Ok(out)
    }

    fn decompose_component(&self, w: Ideal, depth: usize, out: &mut Vec<Presentation>) -> Result<()> {
        if w.is_unit() {
            return Ok(());
        }
        if depth == 0 {
            return Err(Error::DecompositionIncomplete("direct decomposition did not stabilise".into()));
        }
        let probe = self.with_ideals(self.i0.clone(), w.clone());
        let a = probe.projection_closure(0);
        let b = probe.projection_closure(1);
        let x0 = a.add(&b);
        if x0.is_unit() {
            return Ok(());
        }
        if a.equals(&b) {
            // W prime and both projections have the same closure, itself prime
            out.push(self.with_ideals(a.with_basis(), w.with_basis()));
            return Ok(());
        }
        let lifted: Vec<MPoly> = x0
            .gens()
            .iter()
            .flat_map(|g| [self.on_x(g), self.on_y(g)])
            .collect();
        let w2 = w.add_gens(&lifted);
        for c in minimal_primes(&w2)? {
            self.decompose_component(c, depth - 1, out)?;
        }
        Ok(())
    }

    /// The open sub-presentation on `π₁⁻¹(V₀) ∩ π₂⁻¹(V₀) ∩ V₁`.
    pub fn direct_localize(&self, v0: &[MPoly], v1: &[MPoly]) -> Presentation {
        let v0x: Vec<MPoly> = v0.iter().map(|o| self.on_x(o)).collect();
        let v0y: Vec<MPoly> = v0.iter().map(|o| self.on_y(o)).collect();
        let mut open1 = product_list(&self.open1, &v0x);
        open1 = product_list(&open1, &v0y);
        if !v1.is_empty() {
            open1 = product_list(&open1, v1);
        }
        Presentation { open0: product_list(&self.open0, v0), open1, ..self.clone() }
    }

    /// The x-ideal pulled into `(x, y)` along both projections.
    pub fn lift_both(&self, i: &Ideal) -> Vec<MPoly> {
        i.gens().iter().flat_map(|g| [self.on_x(g), self.on_y(g)]).collect()
    }

    /// The presentation of `X` restricted to a piece of `X₀`, on both sides of `X₁`.
    pub fn restrict(&self, piece: &Piece) -> Presentation {
        let extra = Ideal::new(&self.x, piece.closed.clone());
        let i0 = self.i0.add_gens(&piece.closed);
        let i1 = self.i1.add_gens(&self.lift_both(&extra));
        let p = Presentation { i0, i1, ..self.clone() };
        p.direct_localize(&piece.open, &[])
    }

    /// Copy with variables renamed (same field and ideals).
    pub fn renamed(&self, xs: &[String], ys: &[String]) -> Result<Presentation> {
        let (x, xy) = Presentation::rings(&self.field, xs, ys)?;
        let n = self.n();
        let id0: Vec<usize> = (0..n).collect();
        let id1: Vec<usize> = (0..2 * n).collect();
        Ok(Presentation {
            field: self.field.clone(),
            i0: self.i0.rename(&x, &id0),
            i1: self.i1.rename(&xy, &id1),
            open0: self.open0.iter().map(|f| f.rename(&x, &id0)).collect(),
            open1: self.open1.iter().map(|f| f.rename(&xy, &id1)).collect(),
            x,
            xy,
            almost: self.almost,
        })
    }
}

/// `n` names `{prefix}{i}` (numbered from `start`) avoiding `taken`; the prefix is repeated
/// until no clash remains.
pub fn fresh_names(prefix: &str, n: usize, start: usize, taken: &[String]) -> Vec<String> {
    let mut pre = prefix.to_string();
    loop {
        let names: Vec<String> = (start..start + n).map(|i| format!("{pre}{i}")).collect();
        if names.iter().all(|v| !taken.contains(v)) {
            return names;
        }
        pre.push_str(prefix);
    }
}

/// A morphism given on `X₀` by a polynomial tuple; on `X₁` it acts as `f0` on both blocks.
#[derive(Clone, Debug)]
pub struct Morphism {
    pub source: Arc<Presentation>,
    pub target: Arc<Presentation>,
    pub f0: Vec<MPoly>,
}

impl Morphism {
    pub fn new(source: Arc<Presentation>, target: Arc<Presentation>, f0: Vec<MPoly>) -> Result<Morphism> {
        if f0.len() != target.n() {
            return Err(Error::VariableMismatch(format!(
                "morphism has {} components, target has {} coordinates",
                f0.len(),
                target.n()
            )));
        }
        Ok(Morphism { source, target, f0 })
    }

    pub fn parse(source: Arc<Presentation>, target: Arc<Presentation>, f0: &[impl AsRef<str>]) -> Result<Morphism> {
        let f = f0.iter().map(|s| MPoly::parse(&source.x, s.as_ref())).collect::<Result<Vec<_>>>()?;
        Morphism::new(source, target, f)
    }

    pub fn identity(p: Arc<Presentation>) -> Morphism {
        let f0 = (0..p.n()).map(|i| MPoly::var(&p.x, i)).collect();
        Morphism { source: p.clone(), target: p, f0 }
    }

    /// `f1 = (f0(x), f0(y))` in the source's `(x, y)` ring.
    pub fn f1(&self) -> Vec<MPoly> {
        let mut out: Vec<MPoly> = self.f0.iter().map(|f| self.source.on_x(f)).collect();
        out.extend(self.f0.iter().map(|f| self.source.on_y(f)));
        out
    }

    /// Pullback of target `I0` and `I1` generators vanish on the source pieces.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let s = &self.source;
        let p0 = s.x0_piece();
        for g in self.target.i0.gens() {
            let h = g.compose(&self.f0);
            if !p0.vanishes(&h) {
                errors.push(format!("target I0 generator {g} does not vanish on the image of X0"));
            }
        }
        let p1 = s.x1_piece();
        let f1 = self.f1();
        for g in self.target.i1.gens() {
            let h = g.compose(&f1);
            if !p1.vanishes(&h) {
                errors.push(format!("target I1 generator {g} does not vanish on the image of X1"));
            }
        }
        errors
    }

    /// Ideal of the closure of `f0(piece)` in the target coordinates.
    pub fn image_closure(&self, piece: &Piece) -> Ideal {
        let (ring, graph) = self.graph(piece);
        let n = self.source.n();
        let m = self.target.n();
        let keep: Vec<usize> = (n..n + m).collect();
        let e = graph.saturate_poly(&piece_open_product(&ring, piece, n)).eliminate(&keep);
        let ident: Vec<usize> = (0..m).collect();
        e.rename(&self.target.x, &ident)
    }

    /// `(x, u)` ring with the graph ideal `piece.closed + (u − f0(x))`.
    fn graph(&self, piece: &Piece) -> (RingRef, Ideal) {
        let n = self.source.n();
        let mut vars = self.source.xs().to_vec();
        for v in self.target.xs() {
            let mut name = format!("{v}_t");
            while vars.contains(&name) {
                name.push('t');
            }
            vars.push(name);
        }
        let ring = Ring::new(self.source.field.clone(), vars);
        let ident: Vec<usize> = (0..n).collect();
        let mut gens: Vec<MPoly> = piece.closed.iter().map(|g| g.rename(&ring, &ident)).collect();
        for (j, f) in self.f0.iter().enumerate() {
            gens.push(MPoly::var(&ring, n + j).sub(&f.rename(&ring, &ident)));
        }
        (ring.clone(), Ideal::new(&ring, gens))
    }
}

fn piece_open_product(ring: &RingRef, piece: &Piece, n: usize) -> MPoly {
    // a single open generator is used for saturation; several are handled by the caller
    let ident: Vec<usize> = (0..n).collect();
    if piece.open.len() == 1 {
        piece.open[0].rename(ring, &ident)
    } else {
        MPoly::one(ring)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    Etale,
    Smooth,
    GeomIntegralFibres,
}

impl std::str::FromStr for Property {
    type Err = Error;
    fn from_str(s: &str) -> Result<Property> {
        match s {
            "etale" => Ok(Property::Etale),
            "smooth" => Ok(Property::Smooth),
            "geom_integral_fibres" => Ok(Property::GeomIntegralFibres),
            _ => Err(Error::unsupported("stratify", format!("unknown property `{s}`"))),
        }
    }
}

/// One stratum of [`stratify_by_property`]: a source piece, the closure of its image, and
/// whether the restricted morphism has the property.
#[derive(Clone, Debug)]
pub struct PropertyStratum {
    pub piece: Piece,
    pub image: Ideal,
    pub holds: bool,
}

pub fn jacobian(polys: &[MPoly], vars: &[usize]) -> Vec<Vec<MPoly>> {
    polys.iter().map(|f| vars.iter().map(|&v| f.derivative(v)).collect()).collect()
}

pub fn determinant(m: &[Vec<MPoly>]) -> MPoly {
    let k = m.len();
    if k == 1 {
        return m[0][0].clone();
    }
    let mut acc = MPoly::zero(m[0][0].ring());
    for j in 0..k {
        if m[0][j].is_zero() {
            continue;
        }
        let sub: Vec<Vec<MPoly>> =
            m[1..].iter().map(|row| row.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, e)| e.clone()).collect()).collect();
        let t = m[0][j].mul(&determinant(&sub));
        acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
    }
    acc
}

/// All `k × k` minors; `[1]` for `k = 0`.
pub fn minors(m: &[Vec<MPoly>], k: usize, ring: &RingRef) -> Vec<MPoly> {
    if k == 0 {
        return vec![MPoly::one(ring)];
    }
    if m.is_empty() || k > m.len() || k > m[0].len() {
        return vec![];
    }
    let rows = crate::algebra::ideal::subsets(m.len(), k);
    let cols = crate::algebra::ideal::subsets(m[0].len(), k);
    let mut out = Vec::new();
    for r in &rows {
        for c in &cols {
            let sub: Vec<Vec<MPoly>> = r.iter().map(|&i| c.iter().map(|&j| m[i][j].clone()).collect()).collect();
            let d = determinant(&sub);
            if !d.is_zero() {
                out.push(d);
            }
        }
    }
    out
}

/// Partition the source `X₀` into pieces on which `f` restricted has the property (or not).
///
/// Étale and smooth use Jacobian ranks on each irreducible component; the complement of the
/// good open set is treated recursively, so the recursion depth is bounded by `dim X₀`.
/// Geometric integrality of fibres is certified on a specialised generic fibre.
pub fn stratify_by_property(f: &Morphism, property: Property) -> Result<Vec<PropertyStratum>> {
    let errs = f.validate();
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }
    let src = &f.source;
    let mut out = Vec::new();
    let mut work = vec![(src.x0_piece(), 0usize)];
    let bound = src.n() + 2;
    while let Some((piece, depth)) = work.pop() {
        if piece.is_empty() {
            continue;
        }
        if depth > bound {
            return Err(Error::unsupported("stratify", "devissage exceeded the dimension bound"));
        }
        let comps = minimal_primes(&piece.ideal())?;
        let mut earlier: Vec<MPoly> = vec![];
        for c in comps {
            // points of this component not on earlier components
            let open = if earlier.is_empty() { piece.open.clone() } else { product_list(&piece.open, &earlier) };
            let sub = Piece { ring: piece.ring.clone(), closed: c.gb().to_vec(), open };
            earlier = if earlier.is_empty() { c.gb().to_vec() } else { product_list(&earlier, c.gb()) };
            if sub.is_empty() {
                continue;
            }
            let image = f.image_closure(&sub);
            let dx = c.dimension();
            let dy = image.dimension();
            match property {
                Property::GeomIntegralFibres => {
                    let holds = generic_fibre_integral(f, &c, &image)?;
                    out.push(PropertyStratum { piece: sub.simplified(), image, holds });
                }
                Property::Etale | Property::Smooth => {
                    if property == Property::Etale && dx != dy {
                        out.push(PropertyStratum { piece: sub.simplified(), image, holds: false });
                        continue;
                    }
                    let good = jacobian_open(f, &c, &image, dx, dy, property);
                    let good: Vec<MPoly> = good.into_iter().filter(|g| !c.contains(g)).collect();
                    if good.is_empty() {
                        out.push(PropertyStratum { piece: sub.simplified(), image, holds: false });
                        continue;
                    }
                    let ok = Piece { ring: sub.ring.clone(), closed: sub.closed.clone(), open: product_list(&sub.open, &good) };
                    if !ok.is_empty() {
                        let img = f.image_closure(&ok);
                        out.push(PropertyStratum { piece: ok.simplified(), image: img, holds: true });
                    }
                    let mut closed = sub.closed.clone();
                    closed.extend(good);
                    work.push((Piece { ring: sub.ring.clone(), closed, open: sub.open.clone() }, depth + 1));
                }
            }
        }
    }
    out.sort_by_key(|s| s.piece.key());
    Ok(out)
}

fn jacobian_open(f: &Morphism, c: &Ideal, image: &Ideal, dx: i64, dy: i64, property: Property) -> Vec<MPoly> {
    let src = &f.source;
    let n = src.n();
    let r = f.target.n();
    let ring = &src.x;
    let vars: Vec<usize> = (0..n).collect();
    let gens = c.gb().to_vec();
    let codim = (n as i64 - dx) as usize;
    let jp = jacobian(&gens, &vars);
    let smooth_x = minors(&jp, codim, ring);
    let mut stacked = jp.clone();
    stacked.extend(jacobian(&f.f0, &vars));
    let rank = match property {
        Property::Etale => n,
        _ => codim + dy as usize,
    };
    let unram = minors(&stacked, rank, ring);
    let tvars: Vec<usize> = (0..r).collect();
    let tgens = image.gb().to_vec();
    let tcodim = (r as i64 - dy) as usize;
    let smooth_y: Vec<MPoly> =
        minors(&jacobian(&tgens, &tvars), tcodim, &f.target.x).iter().map(|m| m.compose(&f.f0)).collect();
    let a = product_list(&smooth_x, &unram);
    product_list(&a, &smooth_y)
}

fn generic_fibre_integral(f: &Morphism, c: &Ideal, image: &Ideal) -> Result<bool> {
    let src = &f.source;
    let u = image.independent_set().unwrap_or_default();
    // specialise independent target coordinates at small values, keep the rest symbolic
    for attempt in 0..6u64 {
        let mut gens: Vec<MPoly> = c.gb().to_vec();
        let mut constrained = image.gb().iter().map(|g| g.compose(&f.f0)).collect::<Vec<_>>();
        for (k, &j) in u.iter().enumerate() {
            let v = src.field.sample(2 + attempt * 3 + k as u64);
            gens.push(f.f0[j].sub(&MPoly::constant(&src.x, v)));
        }
        gens.append(&mut constrained);
        let fibre = Ideal::new(&src.x, gens);
        if fibre.is_unit() {
            continue;
        }
        if fibre.dimension() != c.dimension() - u.len() as i64 {
            continue;
        }
        return match is_geometrically_integral(&fibre) {
            Ok(b) => Ok(b),
            Err(Error::Undecided(_)) => continue,
            Err(e) => Err(e),
        };
    }
    Err(Error::Undecided("no specialised fibre certified".into()))
}

/// Fibre product `P ×_R Q` along `f: P → R`, `g: Q → R`; the variables of `Q` are renamed.
pub fn fibre_product(f: &Morphism, g: &Morphism) -> Result<Presentation> {
    if !Arc::ptr_eq(&f.target, &g.target) && f.target.xy.vars != g.target.xy.vars {
        return Err(Error::VariableMismatch("morphisms have different targets".into()));
    }
    let p = &f.source;
    let q = &g.source;
    let (np, nq) = (p.n(), q.n());
    let mut taken: Vec<String> = p.xy.vars.clone();
    let mut fresh = |v: &str| {
        let mut name = format!("{v}_2");
        while taken.contains(&name) {
            name.push('2');
        }
        taken.push(name.clone());
        name
    };
    let qx: Vec<String> = q.xs().iter().map(|v| fresh(v)).collect();
    let qy: Vec<String> = q.ys().iter().map(|v| fresh(v)).collect();
    let mut xs = p.xs().to_vec();
    xs.extend(qx);
    let mut ys = p.ys().to_vec();
    ys.extend(qy);
    let (x, xy) = Presentation::rings(&p.field, &xs, &ys)?;
    let px: Vec<usize> = (0..np).collect();
    let qxm: Vec<usize> = (np..np + nq).collect();
    let pxy: Vec<usize> = (0..np).chain(np + nq..2 * np + nq).collect();
    let qxym: Vec<usize> = (np..np + nq).chain(2 * np + nq..2 * (np + nq)).collect();
    let mut g0: Vec<MPoly> = p.i0.gens().iter().map(|h| h.rename(&x, &px)).collect();
    g0.extend(q.i0.gens().iter().map(|h| h.rename(&x, &qxm)));
    for (a, b) in f.f0.iter().zip(&g.f0) {
        g0.push(a.rename(&x, &px).sub(&b.rename(&x, &qxm)));
    }
    let mut g1: Vec<MPoly> = p.i1.gens().iter().map(|h| h.rename(&xy, &pxy)).collect();
    g1.extend(q.i1.gens().iter().map(|h| h.rename(&xy, &qxym)));
    for (a, b) in f.f1().iter().zip(&g.f1()) {
        g1.push(a.rename(&xy, &pxy).sub(&b.rename(&xy, &qxym)));
    }
    let open0 = product_list(
        &p.open0.iter().map(|h| h.rename(&x, &px)).collect::<Vec<_>>(),
        &q.open0.iter().map(|h| h.rename(&x, &qxm)).collect::<Vec<_>>(),
    );
    let open1 = product_list(
        &p.open1.iter().map(|h| h.rename(&xy, &pxy)).collect::<Vec<_>>(),
        &q.open1.iter().map(|h| h.rename(&xy, &qxym)).collect::<Vec<_>>(),
    );
    Ok(Presentation {
        field: p.field.clone(),
        i0: Ideal::new(&x, g0),
        i1: Ideal::new(&xy, g1),
        open0,
        open1,
        x,
        xy,
        almost: p.almost || q.almost,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(i0: &[&str], i1: &[&str]) -> Presentation {
        Presentation::parse(&Field::Rationals, 1, i0, i1).unwrap()
    }

    #[test]
    fn validation_examples() {
        assert!(pres(&["0"], &["y0 - x0^2"]).validate().valid);
        let bad = pres(&["x0 - 1"], &["y0 - x0"]).validate();
        assert!(!bad.valid);
        assert!(bad.errors.iter().any(|e| e.contains("second projection")));
        let empty = pres(&["1"], &["1"]).validate();
        assert!(empty.valid && empty.empty);
    }

    #[test]
    fn h_direct_examples() {
        assert!(pres(&["0"], &["y0 - x0^2"]).is_h_direct().unwrap());
        assert!(!pres(&["0"], &["y0"]).is_h_direct().unwrap());
        assert!(pres(&["x0"], &["x0", "y0"]).is_h_direct().unwrap());
    }

    #[test]
    fn decomposition_examples() {
        let p = pres(&["0"], &["y0 - x0^2"]);
        let d = p.direct_decompose().unwrap();
        assert_eq!(d.len(), 1);
        assert!(d[0].i1.equals(&p.i1));

        let d = pres(&["0"], &["y0"]).direct_decompose().unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].i0.key(), "x0");
        assert_eq!(d[0].i1.key(), "x0,y0");

        let d = pres(&["0"], &["y0*(y0 - x0)"]).direct_decompose().unwrap();
        let keys: Vec<String> = d.iter().map(|p| p.i1.key()).collect();
        assert_eq!(keys.len(), 2);
        assert!(keys.contains(&"x0 - y0".to_string()) || keys.contains(&"-x0 + y0".to_string()));
        assert!(keys.contains(&"x0,y0".to_string()));
        for c in &d {
            assert!(c.is_h_direct().unwrap());
        }
    }

    #[test]
    fn etale_strata_of_squaring() {
        let f5 = Field::Prime(5);
        let a = Arc::new(Presentation::affine(&f5, 1));
        let f = Morphism::parse(a.clone(), a, &["x0^2"]).unwrap();
        let s = stratify_by_property(&f, Property::Etale).unwrap();
        assert_eq!(s.len(), 2);
        let keys: Vec<String> = s.iter().map(|t| t.piece.key()).collect();
        assert!(keys.contains(&"[]\\[x0]".to_string()));
        assert!(keys.contains(&"[x0]\\[1]".to_string()));
        let id = Morphism::identity(Arc::new(Presentation::affine(&f5, 1)));
        for p in [Property::Etale, Property::Smooth, Property::GeomIntegralFibres] {
            let s = stratify_by_property(&id, p).unwrap();
            assert_eq!(s.len(), 1);
            assert!(s[0].holds);
        }
    }

    #[test]
    fn integral_fibre_over_a_point() {
        let f5 = Field::Prime(5);
        let x = Arc::new(Presentation::parse(&f5, 2, &["x1 - x0^2"], &["x1 - x0^2", "y1 - y0^2"]).unwrap());
        let pt = Arc::new(Presentation::parse(&f5, 0, &[] as &[&str], &[] as &[&str]).unwrap());
        let f = Morphism::new(x, pt, vec![]).unwrap();
        let s = stratify_by_property(&f, Property::GeomIntegralFibres).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s[0].holds);
    }

    #[test]
    fn fibre_products() {
        let q = Field::Rationals;
        let g = Arc::new(pres(&["0"], &["y0 - x0^2"]));
        let pt = Arc::new(Presentation::parse(&q, 0, &[] as &[&str], &[] as &[&str]).unwrap());
        let to_pt = Morphism::new(g.clone(), pt, vec![]).unwrap();
        let fp = fibre_product(&to_pt, &to_pt).unwrap();
        assert_eq!(fp.n(), 2);
        let id = Morphism::identity(g.clone());
        let diag = fibre_product(&id, &id).unwrap();
        assert!(diag.i0.contains(&MPoly::parse(&diag.x, "x0 - x0_2").unwrap()));
    }
}
