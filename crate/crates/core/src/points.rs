//! Realisations of presentations over `(F_{q^m}, x ↦ x^q)`, by exhaustive search.

use std::sync::Arc;

use crate::algebra::gf::{Gf, GfPoly};
use crate::algebra::{Elem, Field, MPoly};
use crate::error::{Error, Result};
use crate::presentation::Presentation;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// `F_{q^m}` with `q = p^e`, acting by `x ↦ x^q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DiffField {
    pub p: u64,
    pub e: u32,
    pub m: u32,
}

impl DiffField {
    pub fn new(p: u64, e: u32, m: u32) -> Result<DiffField> {
        Field::prime(p)?;
        if e == 0 || m == 0 {
            return Err(Error::Field("Frobenius power and extension degree must be positive".into()));
        }
        Ok(DiffField { p, e, m })
    }

    /// From a prime power `q` and extension degree `m`.
    pub fn from_q(q: u64, m: u32) -> Result<DiffField> {
        let (p, e) =
            crate::algebra::field::prime_power(q).ok_or_else(|| Error::Field(format!("{q} is not a prime power")))?;
        DiffField::new(p, e as u32, m)
    }

    pub fn q(&self) -> u128 {
        (self.p as u128).pow(self.e)
    }

    pub fn degree(&self) -> usize {
        (self.e * self.m) as usize
    }

    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.e * self.m)
    }

    pub fn field(&self) -> Result<Field> {
        Field::galois(self.p, self.degree())
    }

    pub fn gf(&self) -> Result<Arc<Gf>> {
        Gf::get(self.p, self.degree())
    }

    /// The same Frobenius on `F_{q^{mk}}`.
    pub fn extend(&self, k: u32) -> DiffField {
        DiffField { m: self.m * k, ..self.clone() }
    }

    /// Base field of the presentation must be fixed by `x ↦ x^q`.
    pub fn check_base(&self, base: &Field) -> Result<()> {
        match base {
            Field::Rationals => Ok(()),
            f if f.characteristic() != self.p => {
                Err(Error::Field(format!("{f} has characteristic {}, expected {}", f.characteristic(), self.p)))
            }
            f if self.e as usize % f.degree() != 0 => Err(Error::Field(format!(
                "{f} is not fixed by x -> x^{}; its degree must divide {}",
                self.q(),
                self.e
            ))),
            _ => Ok(()),
        }
    }

    pub fn sigma(&self, gf: &Gf, a: u32) -> u32 {
        gf.pow(a, self.q())
    }

    pub fn render(&self, gf: &Gf, a: u32) -> String {
        gf.field.format_elem(&gf.to_elem(a), "a")
    }

    pub fn parse_elem(&self, gf: &Gf, s: &str) -> Result<u32> {
        let r = crate::algebra::Ring::new(gf.field.clone(), vec!["a".into()]);
        let f = MPoly::parse(&r, s)?;
        // the generator `a` of the table field
        let g = gf.field.generator();
        let v = f.eval(&[g]);
        Ok(gf.from_elem(&v))
    }
}

/// A presentation compiled into a table field, ready for point tests.
pub struct Compiled {
    pub gf: Arc<Gf>,
    pub n: usize,
    pub q: u128,
    i0: Vec<(usize, GfPoly)>,
    open0: Vec<GfPoly>,
    i1: Vec<(usize, GfPoly)>,
    open1: Vec<GfPoly>,
}

fn max_level(f: &MPoly, n: usize) -> usize {
    f.support().iter().map(|&v| v % n.max(1)).max().unwrap_or(0)
}

impl Compiled {
    pub fn new(p: &Presentation, k: &DiffField) -> Result<Compiled> {
        k.check_base(&p.field)?;
        let gf = k.gf()?;
        let n = p.n();
        let comp = |f: &MPoly| gf.compile(f);
        let mut i0 = Vec::new();
        for g in p.i0.gens() {
            i0.push((max_level(g, n), comp(g)?));
        }
        let mut i1 = Vec::new();
        for g in p.i1.gens() {
            i1.push((max_level(g, n), comp(g)?));
        }
        let open0 = p.open0.iter().map(comp).collect::<Result<Vec<_>>>()?;
        let open1 = p.open1.iter().map(comp).collect::<Result<Vec<_>>>()?;
        Ok(Compiled { gf: gf.clone(), n, q: k.q(), i0, open0, i1, open1 })
    }

    fn partial_ok(&self, x: &[u32], xy: &mut Vec<u32>, level: usize) -> bool {
        let gf = &*self.gf;
        if self.i0.iter().any(|(l, g)| *l == level && g.eval(gf, x) != 0) {
            return false;
        }
        xy.clear();
        xy.extend_from_slice(x);
        xy.resize(self.n, 0);
        for i in 0..self.n {
            let v = if i < x.len() { gf.pow(x[i], self.q) } else { 0 };
            xy.push(v);
        }
        !self.i1.iter().any(|(l, g)| *l == level && g.eval(gf, xy) != 0)
    }

    pub fn contains(&self, x: &[u32]) -> bool {
        let gf = &*self.gf;
        if self.i0.iter().any(|(_, g)| g.eval(gf, x) != 0) || self.open0.iter().all(|g| g.eval(gf, x) == 0) {
            return false;
        }
        let mut xy = x.to_vec();
        xy.extend(x.iter().map(|&a| gf.pow(a, self.q)));
        !self.i1.iter().any(|(_, g)| g.eval(gf, &xy) != 0) && self.open1.iter().any(|g| g.eval(gf, &xy) != 0)
    }

    /// All realisations in lexicographic index order; generators are checked as soon as the
    /// coordinates they involve are assigned.
    pub fn enumerate(&self, budget: u128) -> Result<Vec<Vec<u32>>> {
        let size = self.gf.size;
        let n = self.n;
        let total = (size as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
        let mut out = Vec::new();
        if n == 0 {
            if self.contains(&[]) {
                out.push(vec![]);
            }
            return Ok(out);
        }
        let mut x: Vec<u32> = Vec::with_capacity(n);
        let mut scratch = Vec::with_capacity(2 * n);
        let mut evals: u128 = 0;
        // iterative depth-first search over coordinates
        let mut next: Vec<u32> = vec![0];
        while let Some(top) = next.last_mut() {
            if *top >= size {
                next.pop();
                x.pop();
                continue;
            }
            let v = *top;
            *top += 1;
            let level = next.len() - 1;
            x.truncate(level);
            x.push(v);
            evals += 1;
            if evals > budget {
                return Err(Error::Budget { needed: total, budget });
            }
            if !self.partial_ok(&x, &mut scratch, level) {
                x.pop();
                continue;
            }
            if level + 1 == n {
                if self.contains(&x) {
                    out.push(x.clone());
                }
                x.pop();
            } else {
                next.push(0);
            }
        }
        Ok(out)
    }
}

pub fn enumerate_realisations(p: &Presentation, k: &DiffField, budget: u128) -> Result<Vec<Vec<u32>>> {
    Compiled::new(p, k)?.enumerate(budget)
}

pub fn is_point(p: &Presentation, k: &DiffField, x: &[u32]) -> Result<bool> {
    if x.len() != p.n() {
        return Err(Error::VariableMismatch(format!("point has {} coordinates, expected {}", x.len(), p.n())));
    }
    let c = Compiled::new(p, k)?;
    if x.iter().any(|&a| a >= c.gf.size) {
        return Err(Error::Field("coordinate outside the field".into()));
    }
    Ok(c.contains(x))
}

/// Points of `X₀` (ignoring the correspondence) over a table field.
pub fn enumerate_x0(p: &Presentation, k: &DiffField, budget: u128) -> Result<Vec<Vec<u32>>> {
    let free = Presentation { i1: crate::algebra::Ideal::zero(&p.xy), open1: vec![MPoly::one(&p.xy)], ..p.clone() };
    enumerate_realisations(&free, k, budget)
}

/// Least `m ≤ m_max` with a realisation over `F_{q^m}`, with one witness.
pub fn nonempty_witness(
    p: &Presentation,
    q: u64,
    m_max: u32,
    budget: u128,
) -> Result<Option<(DiffField, Vec<u32>)>> {
    if p.is_empty() {
        return Ok(None);
    }
    for m in 1..=m_max {
        let k = DiffField::from_q(q, m)?;
        let c = Compiled::new(p, &k)?;
        let pts = match c.enumerate(budget) {
            Ok(v) => v,
            Err(Error::Budget { .. }) if m > 1 => return Ok(None),
            Err(e) => return Err(e),
        };
        if let Some(x) = pts.into_iter().next() {
            return Ok(Some((k, x)));
        }
    }
    Ok(None)
}

/// Coordinates rendered in the tower generator `a`.
pub fn render_points(k: &DiffField, pts: &[Vec<u32>]) -> Result<Vec<Vec<String>>> {
    let gf = k.gf()?;
    Ok(pts.iter().map(|x| x.iter().map(|&a| k.render(&gf, a)).collect()).collect())
}

pub fn to_elems(gf: &Gf, x: &[u32]) -> Vec<Elem> {
    x.iter().map(|&a| gf.to_elem(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pres(i0: &[&str], i1: &[&str]) -> Presentation {
        Presentation::parse(&Field::Rationals, 1, i0, i1).unwrap()
    }

    #[test]
    fn squaring_graph() {
        let p = pres(&["0"], &["y0 - x0^2"]);
        let k = DiffField::from_q(2, 3).unwrap();
        assert_eq!(enumerate_realisations(&p, &k, DEFAULT_BUDGET).unwrap().len(), 8);
        let k = DiffField::from_q(3, 1).unwrap();
        let pts = enumerate_realisations(&p, &k, DEFAULT_BUDGET).unwrap();
        assert_eq!(pts, vec![vec![0], vec![1]]);
        assert!(is_point(&p, &k, &[1]).unwrap());
        assert!(!is_point(&p, &k, &[2]).unwrap());
        assert!(enumerate_realisations(&pres(&["1"], &["1"]), &k, DEFAULT_BUDGET).unwrap().is_empty());
        let free = pres(&["0"], &["0"]);
        assert!((0..3).all(|a| is_point(&free, &k, &[a]).unwrap()));
    }

    #[test]
    fn witnesses() {
        let p = pres(&["0"], &["y0 - x0^2"]);
        let (k, x) = nonempty_witness(&p, 3, 4, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!((k.m, x), (1, vec![0]));
        let a = pres(&["0"], &["y0 - x0 - 1"]);
        let (k, x) = nonempty_witness(&a, 5, 6, DEFAULT_BUDGET).unwrap().unwrap();
        assert_eq!(k.m, 5);
        let gf = k.gf().unwrap();
        assert_eq!(gf.pow(x[0], 5), gf.add(x[0], 1));
        assert!(nonempty_witness(&pres(&["1"], &["1"]), 5, 3, DEFAULT_BUDGET).unwrap().is_none());
    }

    #[test]
    fn budget_and_base_field() {
        let p = Presentation::affine(&Field::Rationals, 3);
        let k = DiffField::from_q(7, 2).unwrap();
        assert!(matches!(enumerate_realisations(&p, &k, 1000), Err(Error::Budget { .. })));
        let f9: Field = "F9".parse().unwrap();
        let p = Presentation::affine(&f9, 1);
        assert!(enumerate_realisations(&p, &DiffField::from_q(3, 2).unwrap(), DEFAULT_BUDGET).is_err());
        assert_eq!(enumerate_realisations(&p, &DiffField::from_q(9, 1).unwrap(), DEFAULT_BUDGET).unwrap().len(), 9);
    }

    #[test]
    fn points_match_realisations() {
        // a direct presentation: the point set of σx = x^2 in x ↦ (x, σx) coordinates
        let p = Presentation::parse(&Field::Rationals, 2, &["x1 - x0^2"], &["x1 - x0^2", "y0 - x1", "y1 - y0^2"]).unwrap();
        let k = DiffField::from_q(5, 2).unwrap();
        let r = enumerate_realisations(&p, &k, DEFAULT_BUDGET).unwrap();
        let gf = k.gf().unwrap();
        let direct = (0..gf.size).filter(|&a| gf.pow(a, 5) == gf.mul(a, a)).count();
        assert_eq!(r.len(), direct);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn realisations_are_frobenius_stable(c in 0i64..5, d in 1u32..4) {
            let p = pres(&["0"], &[&format!("y0 - x0^2 - {c}")]);
            let k = DiffField::from_q(5, d).unwrap();
            let gf = k.gf().unwrap();
            let pts = enumerate_realisations(&p, &k, DEFAULT_BUDGET).unwrap();
            for x in &pts {
                let y = vec![gf.pow(x[0], 5)];
                prop_assert!(pts.contains(&y));
            }
            let all: Vec<Vec<u32>> = (0..gf.size).filter(|&a| is_point(&p, &k, &[a]).unwrap()).map(|a| vec![a]).collect();
            prop_assert_eq!(all, pts);
        }
    }
}
