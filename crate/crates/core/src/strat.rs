//! Galois stratifications: pieces of an ambient presentation, each with a cover and a
//! twisted-conjugation-closed domain; evaluation, Boolean operations, inflation, refinement.

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::algebra::decompose::minimal_primes;
use crate::algebra::gf::{Gf, GfPoly};
use crate::algebra::{Ideal, MPoly};
use crate::cover::{both_blocks, Cover};
use crate::error::{Error, Result};
use crate::points::{Compiled, DiffField};
use crate::presentation::{Piece, Presentation};

#[derive(Clone, Debug)]
pub struct Stratum {
    pub piece: Piece,
    pub cover: Arc<Cover>,
    pub domain: BTreeSet<usize>,
}

#[derive(Clone, Debug)]
pub struct Stratification {
    pub ambient: Arc<Presentation>,
    pub strata: Vec<Stratum>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub field: DiffField,
    pub points: Vec<Vec<u32>>,
    /// Stratum index of each point in `points`.
    pub attribution: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
}

impl Stratum {
    pub fn is_top(&self) -> bool {
        self.domain.len() == self.cover.g0.order()
    }

    pub fn is_bottom(&self) -> bool {
        self.domain.is_empty()
    }

    /// A trivial-cover stratum with a constant truth value.
    pub fn constant(ambient: &Presentation, piece: Piece, value: bool) -> Stratum {
        let base = Arc::new(ambient.restrict(&piece));
        let cover = Arc::new(Cover::trivial(base));
        let domain = if value { [0].into() } else { BTreeSet::new() };
        Stratum { piece, cover, domain }
    }

    /// Replace covers of constant strata by the trivial one.
    pub fn simplified(self, ambient: &Presentation) -> Stratum {
        if !self.cover.is_trivial() && (self.is_top() || self.is_bottom()) {
            let v = self.is_top();
            return Stratum::constant(ambient, self.piece, v);
        }
        self
    }
}

struct CompiledPiece {
    closed: Vec<GfPoly>,
    open: Vec<GfPoly>,
}

impl CompiledPiece {
    fn new(gf: &Gf, p: &Piece) -> Result<CompiledPiece> {
        Ok(CompiledPiece {
            closed: p.closed.iter().map(|f| gf.compile(f)).collect::<Result<_>>()?,
            open: p.open.iter().map(|f| gf.compile(f)).collect::<Result<_>>()?,
        })
    }

    fn contains(&self, gf: &Gf, x: &[u32]) -> bool {
        self.closed.iter().all(|f| f.eval(gf, x) == 0) && self.open.iter().any(|f| f.eval(gf, x) != 0)
    }
}

impl Stratification {
    pub fn constant(ambient: Arc<Presentation>, value: bool) -> Stratification {
        let s = Stratum::constant(&ambient, Piece::full(&ambient.x), value);
        Stratification { ambient, strata: vec![s] }
    }

    /// `value` on the piece and `!value` on its complement.
    pub fn of_piece(ambient: Arc<Presentation>, piece: Piece, value: bool) -> Stratification {
        let mut strata = Vec::new();
        for c in piece.complement() {
            strata.push(Stratum::constant(&ambient, c, !value));
        }
        if !piece.is_empty() {
            strata.push(Stratum::constant(&ambient, piece, value));
        }
        Stratification { ambient, strata }
    }

    pub fn new(ambient: Arc<Presentation>, strata: Vec<Stratum>) -> Result<Stratification> {
        for (i, s) in strata.iter().enumerate() {
            if s.cover.base.x.vars != ambient.x.vars {
                return Err(Error::VariableMismatch(format!("stratum {i} has a cover over other coordinates")));
            }
            if s.domain.iter().any(|&g| g >= s.cover.g0.order()) {
                return Err(Error::Validation(vec![format!("stratum {i}: domain outside G0")]));
            }
            if s.cover.twisted_closure(&s.domain) != s.domain {
                return Err(Error::Validation(vec![format!("stratum {i}: domain is not closed under twisted conjugation")]));
            }
        }
        Ok(Stratification { ambient, strata })
    }

    /// Realisations of the ambient presentation on which the stratification holds.
    pub fn evaluate(&self, k: &DiffField, budget: u128) -> Result<Evaluation> {
        let pts = Compiled::new(&self.ambient, k)?.enumerate(budget)?;
        let gf = k.gf()?;
        let pieces =
            self.strata.iter().map(|s| CompiledPiece::new(&gf, &s.piece)).collect::<Result<Vec<_>>>()?;
        let mut points = Vec::new();
        let mut attribution = Vec::new();
        for x in pts {
            let Some(i) = pieces.iter().position(|p| p.contains(&gf, &x)) else { continue };
            let s = &self.strata[i];
            let holds = if s.is_top() {
                true
            } else if s.is_bottom() {
                false
            } else {
                let lf = s.cover.local_frobenius(k, &x)?;
                s.domain.contains(&lf.element)
            };
            if holds {
                points.push(x);
                attribution.push(i);
            }
        }
        Ok(Evaluation { field: k.clone(), points, attribution })
    }

    /// Stratum index of every realisation (`None` when no piece contains it), for
    /// partition checks.
    pub fn locate(&self, k: &DiffField, budget: u128) -> Result<Vec<(Vec<u32>, Vec<usize>)>> {
        let pts = Compiled::new(&self.ambient, k)?.enumerate(budget)?;
        let gf = k.gf()?;
        let pieces =
            self.strata.iter().map(|s| CompiledPiece::new(&gf, &s.piece)).collect::<Result<Vec<_>>>()?;
        Ok(pts
            .into_iter()
            .map(|x| {
                let hits = (0..pieces.len()).filter(|&i| pieces[i].contains(&gf, &x)).collect();
                (x, hits)
            })
            .collect())
    }

    pub fn not(&self) -> Stratification {
        let strata = self
            .strata
            .iter()
            .map(|s| {
                let all: BTreeSet<usize> = (0..s.cover.g0.order()).collect();
                Stratum { domain: all.difference(&s.domain).copied().collect(), ..s.clone() }
            })
            .collect();
        Stratification { ambient: self.ambient.clone(), strata }
    }

    pub fn and(&self, other: &Stratification) -> Result<Stratification> {
        self.combine(other, Connective::And)
    }

    pub fn or(&self, other: &Stratification) -> Result<Stratification> {
        self.combine(other, Connective::Or)
    }

    /// Common refinement of the pieces, a common cover on each, and the set operation on
    /// the domains.
    pub fn combine(&self, other: &Stratification, op: Connective) -> Result<Stratification> {
        if self.ambient.x.vars != other.ambient.x.vars {
            return Err(Error::VariableMismatch("stratifications over different ambients".into()));
        }
        let amb = &self.ambient;
        let mut strata = Vec::new();
        for a in &self.strata {
            for b in &other.strata {
                let piece = a.piece.intersect(&b.piece);
                if piece.is_empty() {
                    continue;
                }
                let piece = piece.simplified();
                // constant sides decide or pass through without a product
                let (ta, fa) = (a.is_top(), a.is_bottom());
                let (tb, fb) = (b.is_top(), b.is_bottom());
                let constant = match op {
                    Connective::And if fa || fb => Some(false),
                    Connective::And if ta && tb => Some(true),
                    Connective::Or if ta || tb => Some(true),
                    Connective::Or if fa && fb => Some(false),
                    _ => None,
                };
                if let Some(v) = constant {
                    strata.push(Stratum::constant(amb, piece, v));
                    continue;
                }
                let base = Arc::new(amb.restrict(&piece));
                let pass = match op {
                    Connective::And if ta => Some(b),
                    Connective::And if tb => Some(a),
                    Connective::Or if fa => Some(b),
                    Connective::Or if fb => Some(a),
                    _ => None,
                };
                if let Some(s) = pass {
                    let cover = Arc::new(s.cover.restrict(base));
                    strata.push(Stratum { piece, cover, domain: s.domain.clone() });
                    continue;
                }
                let ca = a.cover.restrict(base.clone());
                let cb = b.cover.restrict(base);
                let prod = ca.fibre_product(&cb)?;
                let m = cb.g0.order();
                let domain = (0..prod.g0.order())
                    .filter(|&k| {
                        let (x, y) = (a.domain.contains(&(k / m)), b.domain.contains(&(k % m)));
                        match op {
                            Connective::And => x && y,
                            Connective::Or => x || y,
                        }
                    })
                    .collect();
                strata.push(Stratum { piece, cover: Arc::new(prod), domain });
            }
        }
        Ok(Stratification { ambient: amb.clone(), strata })
    }

    /// Replace the cover of stratum `i` by a dominating cover `big`, with `dom` the images of
    /// the old cover coordinates in `big` and `pi0`, `pi1` the group surjections.
    pub fn inflate(
        &self,
        i: usize,
        big: Arc<Cover>,
        dom: &[MPoly],
        pi0: &[usize],
        pi1: Option<&[usize]>,
    ) -> Result<Stratification> {
        let s = &self.strata[i];
        let small = &s.cover;
        let pi1: Vec<usize> = match pi1 {
            Some(p) => p.to_vec(),
            None if big.g1 == big.g0 && small.g1 == small.g0 => pi0.to_vec(),
            None => return Err(Error::Validation(vec!["G1 surjection required".into()])),
        };
        let mut errors = Vec::new();
        if !big.g0.is_homomorphism(&small.g0, pi0) || pi0.iter().collect::<BTreeSet<_>>().len() != small.g0.order() {
            errors.push("pi0 is not a surjective homomorphism".to_string());
        }
        if !big.g1.is_homomorphism(&small.g1, &pi1) || pi1.iter().collect::<BTreeSet<_>>().len() != small.g1.order() {
            errors.push("pi1 is not a surjective homomorphism".to_string());
        }
        if dom.len() != small.nz() {
            errors.push("domination map must give every coordinate of the smaller cover".into());
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let zbig = Piece { ring: big.z.x.clone(), closed: big.z.i0.gens().to_vec(), open: big.z.open0.clone() };
        for g in small.z.i0.gens() {
            if !zbig.vanishes(&g.compose(dom)) {
                errors.push(format!("domination map does not send Z0' into Z0 ({g})"));
            }
        }
        for (a, b) in small.p0.iter().zip(&big.p0) {
            if !zbig.vanishes(&a.compose(dom).sub(b)) {
                errors.push("domination map does not commute with the covering maps".into());
            }
        }
        for g in 0..big.g0.order() {
            for (j, d) in dom.iter().enumerate() {
                let lhs = d.compose(&big.act0[g]);
                let rhs = small.act0[pi0[g]][j].compose(dom);
                if !zbig.vanishes(&lhs.sub(&rhs)) {
                    errors.push(format!("domination map is not equivariant at {}", big.g0.labels[g]));
                    break;
                }
            }
        }
        let dom1 = both_blocks(&big.z, dom, dom);
        let z1big = big.z.x1_piece();
        for g in small.z.i1.gens() {
            if !z1big.vanishes(&g.compose(&dom1)) {
                errors.push(format!("domination map does not send Z1' into Z1 ({g})"));
            }
        }
        if !errors.is_empty() {
            return Err(Error::Validation(errors));
        }
        let domain = (0..big.g0.order()).filter(|&g| s.domain.contains(&pi0[g])).collect();
        let mut out = self.clone();
        out.strata[i] = Stratum { piece: s.piece.clone(), cover: big, domain };
        Ok(out)
    }

    /// Replace stratum `i` by the given pieces (which partition it), restricting the cover to
    /// one component over each piece with its decomposition groups.
    pub fn refine(&self, i: usize, pieces: &[Piece]) -> Result<Stratification> {
        let s = &self.strata[i];
        let mut new = Vec::new();
        for p in pieces {
            let piece = s.piece.intersect(p);
            if piece.is_empty() {
                continue;
            }
            let base = Arc::new(self.ambient.restrict(&piece));
            let c = s.cover.restrict(base);
            new.push(refine_component(&c, piece, &s.domain)?);
        }
        let mut out = self.clone();
        out.strata.splice(i..=i, new);
        Ok(out)
    }
}

fn refine_component(c: &Cover, piece: Piece, domain: &BTreeSet<usize>) -> Result<Stratum> {
    let z = &c.z;
    let sat0 = saturate_all(&z.i0, &z.open0);
    let mut comps0 = minimal_primes(&sat0)?;
    comps0.sort_by_key(|p| p.key());
    if comps0.len() <= 1 {
        let sat1 = saturate_all(&z.i1, &z.open1);
        if minimal_primes(&sat1)?.len() <= 1 {
            return Ok(Stratum { piece, cover: Arc::new(c.clone()), domain: domain.clone() });
        }
    }
    let p0 = comps0
        .first()
        .cloned()
        .ok_or_else(|| Error::Validation(vec!["cover is empty over the piece".into()]))?;
    let d0: BTreeSet<usize> = (0..c.g0.order())
        .filter(|&g| p0.gens().iter().all(|h| p0.contains(&h.compose(&c.act0[g]))))
        .collect();
    let lifted: Vec<MPoly> = p0.gens().iter().map(|g| z.on_x(g)).collect();
    let sat1 = saturate_all(&z.i1.add_gens(&lifted), &z.open1);
    let mut comps1 = minimal_primes(&sat1)?;
    comps1.sort_by_key(|p| p.key());
    let p1 = comps1
        .first()
        .cloned()
        .ok_or_else(|| Error::Validation(vec!["no component of Z1 over the chosen component".into()]))?;
    // g* with g*·π₂(Z_ij1) ⊆ Z_ij0
    let gstar = (0..c.g0.order())
        .find(|&g| p0.gens().iter().all(|h| p1.contains(&z.on_y(&h.compose(&c.act0[g])))))
        .ok_or_else(|| Error::Validation(vec!["no translate of the second projection lies in the component".into()]))?;
    let ginv = c.g0.inv[gstar];
    // Z1' = {(z, g*·w)}: substitute w = g*⁻¹·w'
    let mut subst: Vec<MPoly> = (0..z.n()).map(|i| MPoly::var(&z.xy, i)).collect();
    subst.extend(c.act0[ginv].iter().map(|f| z.on_y(f)));
    let i1 = Ideal::new(&z.xy, p1.gens().iter().map(|g| g.compose(&subst)).collect());
    let d1: BTreeSet<usize> = (0..c.g1.order())
        .filter(|&g| p1.gens().iter().all(|h| p1.contains(&h.compose(&c.act1[g]))))
        .collect();
    let incl0: Vec<usize> = d0.iter().copied().collect();
    let incl1: Vec<usize> = d1.iter().copied().collect();
    let (g0s, _) = c.g0.subgroup(&d0)?;
    let (g1s, _) = c.g1.subgroup(&d1)?;
    let pos = |g: usize| {
        incl0
            .iter()
            .position(|&h| h == g)
            .ok_or_else(|| Error::Validation(vec!["decomposition groups are not compatible".into()]))
    };
    let mut hp = Vec::new();
    let mut hs = Vec::new();
    for &g1 in &incl1 {
        hp.push(pos(c.hom_pi1[g1])?);
        hs.push(pos(c.g0.mul(c.g0.mul(gstar, c.hom_sigma[g1]), ginv))?);
    }
    let mut nz = z.clone();
    nz.i0 = p0.with_basis();
    nz.i1 = i1.add_gens(&nz.lift_both(&p0));
    let act0: Vec<Vec<MPoly>> = incl0.iter().map(|&g| c.act0[g].clone()).collect();
    let act1: Vec<Vec<MPoly>> =
        (0..incl1.len()).map(|k| both_blocks(&nz, &c.act0[incl0[hp[k]]], &c.act0[incl0[hs[k]]])).collect();
    let cover = Cover::new(c.base.clone(), nz, c.p0.clone(), Some(c.p1.clone()), g0s, act0, Some((g1s, act1, hp, hs)))?;
    let new_domain: BTreeSet<usize> = domain
        .iter()
        .map(|&g| c.g0.mul(g, ginv))
        .filter_map(|g| incl0.iter().position(|&h| h == g))
        .collect();
    Ok(Stratum { piece, cover: Arc::new(cover), domain: new_domain })
}

fn saturate_all(i: &Ideal, opens: &[MPoly]) -> Ideal {
    if opens.len() == 1 && !opens[0].is_constant() {
        i.saturate_poly(&opens[0])
    } else {
        i.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Field;
    use crate::group::FiniteGroup;
    use crate::points::DEFAULT_BUDGET;
    use proptest::prelude::*;

    fn line(field: &Field) -> Arc<Presentation> {
        Arc::new(
            Presentation::parse(field, 1, &["0"], &["y0 - x0"]).unwrap().with_open(&["x0"], &[] as &[&str]).unwrap(),
        )
    }

    fn kummer(base: Arc<Presentation>, k: u32, gen: &str) -> Cover {
        let field = base.field.clone();
        let zs = vec!["z0".to_string()];
        let ws = vec!["w0".to_string()];
        let z = Presentation::parse_named(&field, &zs, &ws, &["0"], &["w0 - z0"])
            .unwrap()
            .with_open(&["z0"], &[] as &[&str])
            .unwrap();
        let p0 = vec![MPoly::parse(&z.x, &format!("z0^{k}")).unwrap()];
        let g = FiniteGroup::cyclic(k as usize);
        let act0 = (0..k).map(|i| vec![MPoly::parse(&z.x, &format!("({gen})^{i}*z0")).unwrap()]).collect();
        Cover::new(base, z, p0, None, g, act0, None).unwrap()
    }

    fn kummer_strat(field: &Field, domain: &[usize]) -> Stratification {
        let amb = line(field);
        let c = Arc::new(kummer(amb.clone(), 2, "-1"));
        let s = Stratum { piece: Piece::full(&amb.x), cover: c, domain: domain.iter().copied().collect() };
        Stratification::new(amb, vec![s]).unwrap()
    }

    fn elems(e: &Evaluation) -> Vec<u32> {
        e.points.iter().map(|p| p[0]).collect()
    }

    #[test]
    fn kummer_evaluation() {
        let k = DiffField::from_q(7, 1).unwrap();
        let non = kummer_strat(&Field::Rationals, &[1]);
        assert_eq!(elems(&non.evaluate(&k, DEFAULT_BUDGET).unwrap()), vec![3, 5, 6]);
        let all = kummer_strat(&Field::Rationals, &[0, 1]);
        assert_eq!(all.evaluate(&k, DEFAULT_BUDGET).unwrap().points.len(), 6);
        let none = kummer_strat(&Field::Rationals, &[]);
        assert!(none.evaluate(&k, DEFAULT_BUDGET).unwrap().points.is_empty());
    }

    #[test]
    fn boolean_laws() {
        let a = kummer_strat(&Field::Rationals, &[1]);
        let res = kummer_strat(&Field::Rationals, &[0]);
        let k9 = DiffField::from_q(9, 1).unwrap();
        let both = res.or(&a).unwrap();
        assert_eq!(both.evaluate(&k9, DEFAULT_BUDGET).unwrap().points.len(), 8);
        let contra = a.and(&a.not()).unwrap();
        let top = Stratification::constant(a.ambient.clone(), true);
        for q in [3, 5, 7, 9, 11] {
            let k = DiffField::from_q(q, 1).unwrap();
            assert!(contra.evaluate(&k, DEFAULT_BUDGET).unwrap().points.is_empty());
            let ea = a.evaluate(&k, DEFAULT_BUDGET).unwrap();
            assert_eq!(top.and(&a).unwrap().evaluate(&k, DEFAULT_BUDGET).unwrap().points, ea.points);
        }
    }

    #[test]
    fn product_of_two_kummer_covers() {
        // x is a non-residue and x + 1 is a residue, via a second cover z^2 = x + 1
        let amb = Arc::new(
            Presentation::parse(&Field::Rationals, 1, &["0"], &["y0 - x0"])
                .unwrap()
                .with_open(&["x0*(x0 + 1)"], &[] as &[&str])
                .unwrap(),
        );
        let a = Stratum { piece: Piece::full(&amb.x), cover: Arc::new(kummer(amb.clone(), 2, "-1")), domain: [1].into() };
        let zs = vec!["z0".to_string()];
        let ws = vec!["w0".to_string()];
        let z = Presentation::parse_named(&Field::Rationals, &zs, &ws, &["0"], &["w0 - z0"])
            .unwrap()
            .with_open(&["z0"], &[] as &[&str])
            .unwrap();
        let p0 = vec![MPoly::parse(&z.x, "z0^2 - 1").unwrap()];
        let act = vec![vec![MPoly::parse(&z.x, "z0").unwrap()], vec![MPoly::parse(&z.x, "-z0").unwrap()]];
        let c2 = Cover::new(amb.clone(), z, p0, None, FiniteGroup::cyclic(2), act, None).unwrap();
        let b = Stratum { piece: Piece::full(&amb.x), cover: Arc::new(c2), domain: [0].into() };
        let sa = Stratification::new(amb.clone(), vec![a]).unwrap();
        let sb = Stratification::new(amb, vec![b]).unwrap();
        let both = sa.and(&sb).unwrap();
        for q in [5u64, 7, 11, 13] {
            let k = DiffField::from_q(q, 1).unwrap();
            let gf = k.gf().unwrap();
            let sq = |a: u32| gf.pow(a, ((q - 1) / 2) as u128) == 1;
            let expect: Vec<u32> = (1..gf.size).filter(|&x| x != gf.neg(1) && !sq(x) && sq(gf.add(x, 1))).collect();
            assert_eq!(elems(&both.evaluate(&k, DEFAULT_BUDGET).unwrap()), expect, "q={q}");
        }
    }

    #[test]
    fn inflation_along_kummer_tower() {
        let f5 = Field::Prime(5);
        let s = kummer_strat(&f5, &[1]);
        let big = Arc::new(kummer(s.ambient.clone(), 4, "2"));
        assert!(big.validate().valid);
        let dom = vec![MPoly::parse(&big.z.x, "z0^2").unwrap()];
        let inflated = s.inflate(0, big, &dom, &[0, 1, 0, 1], None).unwrap();
        assert_eq!(inflated.strata[0].domain, [1, 3].into());
        for e in [1u32, 2] {
            let k = DiffField::new(5, e, 1).unwrap();
            assert_eq!(
                s.evaluate(&k, DEFAULT_BUDGET).unwrap().points,
                inflated.evaluate(&k, DEFAULT_BUDGET).unwrap().points
            );
        }
        let id = vec![MPoly::parse(&s.strata[0].cover.z.x, "z0").unwrap()];
        let same = s.inflate(0, s.strata[0].cover.clone(), &id, &[0, 1], None).unwrap();
        assert_eq!(same.strata[0].domain, s.strata[0].domain);
    }

    #[test]
    fn refinement_preserves_evaluation() {
        let s = kummer_strat(&Field::Rationals, &[1]);
        let r = &s.ambient.x;
        let at_one = Piece::parse(r, &["x0 - 1"], &[] as &[&str]).unwrap();
        let rest = Piece::parse(r, &[] as &[&str], &["x0 - 1"]).unwrap();
        let refined = s.refine(0, &[at_one, rest]).unwrap();
        assert_eq!(refined.strata.len(), 2);
        let split = refined.strata.iter().find(|t| t.piece.closed.len() == 1).unwrap();
        assert_eq!(split.cover.g0.order(), 1);
        assert!(split.domain.is_empty());
        for q in [3u64, 5, 7, 9, 11, 13] {
            let k = DiffField::from_q(q, 1).unwrap();
            assert_eq!(
                s.evaluate(&k, DEFAULT_BUDGET).unwrap().points,
                refined.evaluate(&k, DEFAULT_BUDGET).unwrap().points
            );
            let loc = refined.locate(&k, DEFAULT_BUDGET).unwrap();
            assert!(loc.iter().all(|(_, h)| h.len() == 1));
        }
    }

    fn two_covers(da: &[usize], db: &[usize]) -> (Stratification, Stratification) {
        let amb = Arc::new(
            Presentation::parse(&Field::Rationals, 1, &["0"], &["y0 - x0"])
                .unwrap()
                .with_open(&["x0*(x0 + 1)"], &[] as &[&str])
                .unwrap(),
        );
        let zs = vec!["z0".to_string()];
        let ws = vec!["w0".to_string()];
        let z = Presentation::parse_named(&Field::Rationals, &zs, &ws, &["0"], &["w0 - z0"])
            .unwrap()
            .with_open(&["z0"], &[] as &[&str])
            .unwrap();
        let p0 = vec![MPoly::parse(&z.x, "z0^2 - 1").unwrap()];
        let act = vec![vec![MPoly::parse(&z.x, "z0").unwrap()], vec![MPoly::parse(&z.x, "-z0").unwrap()]];
        let c2 = Cover::new(amb.clone(), z, p0, None, FiniteGroup::cyclic(2), act, None).unwrap();
        let at_one = Piece::parse(&amb.x, &["x0 - 1"], &[] as &[&str]).unwrap();
        let rest = Piece::parse(&amb.x, &[] as &[&str], &["x0 - 1"]).unwrap();
        let a = Stratification::new(
            amb.clone(),
            vec![Stratum { piece: Piece::full(&amb.x), cover: Arc::new(kummer(amb.clone(), 2, "-1")), domain: da.iter().copied().collect() }],
        )
        .unwrap()
        .refine(0, &[at_one, rest])
        .unwrap();
        let b = Stratification::new(
            amb.clone(),
            vec![Stratum { piece: Piece::full(&amb.x), cover: Arc::new(c2), domain: db.iter().copied().collect() }],
        )
        .unwrap();
        (a, b)
    }

    fn subset() -> impl Strategy<Value = Vec<usize>> {
        proptest::sample::subsequence(vec![0usize, 1], 0..=2)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn connectives_act_pointwise(da in subset(), db in subset(), q in proptest::sample::select(vec![5u64, 7, 9, 11, 13])) {
            let (a, b) = two_covers(&da, &db);
            let k = DiffField::from_q(q, 1).unwrap();
            let all = Compiled::new(&a.ambient, &k).unwrap().enumerate(DEFAULT_BUDGET).unwrap();
            let ea = a.evaluate(&k, DEFAULT_BUDGET).unwrap().points;
            let eb = b.evaluate(&k, DEFAULT_BUDGET).unwrap().points;
            let mut and: Vec<_> = ea.iter().filter(|x| eb.contains(x)).cloned().collect();
            let mut or: Vec<_> = ea.iter().chain(eb.iter().filter(|x| !ea.contains(x))).cloned().collect();
            let mut not: Vec<_> = all.iter().filter(|x| !ea.contains(x)).cloned().collect();
            for v in [&mut and, &mut or, &mut not] {
                v.sort();
            }
            let sorted = |s: Stratification| {
                let mut p = s.evaluate(&k, DEFAULT_BUDGET).unwrap().points;
                p.sort();
                p
            };
            prop_assert_eq!(sorted(a.and(&b).unwrap()), and);
            prop_assert_eq!(sorted(a.or(&b).unwrap()), or);
            prop_assert_eq!(sorted(a.not()), not);
        }

        #[test]
        fn strata_partition_the_ambient(da in subset(), db in subset(), q in proptest::sample::select(vec![5u64, 7, 11])) {
            let (a, b) = two_covers(&da, &db);
            let k = DiffField::from_q(q, 1).unwrap();
            for s in [a.and(&b).unwrap(), a.or(&b).unwrap(), a.not(), a] {
                let loc = s.locate(&k, DEFAULT_BUDGET).unwrap();
                prop_assert!(loc.iter().all(|(_, h)| h.len() == 1));
            }
        }
    }
}
