//! JSON artifact bundles: named presentations, morphisms, covers, stratifications and formulas.
//!
//! Polynomials are stored as text. Keys are sorted on output, so saving a loaded bundle
//! reproduces its canonical form byte for byte.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::algebra::{Field, MPoly, RingRef};
use crate::cover::{both_blocks, Cover};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::logic::{parse, Formula};
use crate::presentation::{Morphism, Piece, Presentation};
use crate::strat::{Stratification, Stratum};

pub const VERSION: u64 = 1;

#[derive(Clone, Debug, Default)]
pub struct Bundle {
    pub presentations: BTreeMap<String, Arc<Presentation>>,
    pub morphisms: BTreeMap<String, Morphism>,
    pub covers: BTreeMap<String, Arc<Cover>>,
    pub stratifications: BTreeMap<String, Stratification>,
    pub formulas: BTreeMap<String, Formula>,
}

fn ptr(base: &str, key: &str) -> String {
    format!("{base}/{}", key.replace('~', "~0").replace('/', "~1"))
}

fn get<'a>(v: &'a Value, at: &str, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::schema(at, format!("missing `{key}`")))
}

fn as_obj<'a>(v: &'a Value, at: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::schema(at, "expected an object"))
}

fn as_str<'a>(v: &'a Value, at: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| Error::schema(at, "expected a string"))
}

fn as_arr<'a>(v: &'a Value, at: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::schema(at, "expected an array"))
}

fn strings(v: &Value, at: &str) -> Result<Vec<String>> {
    as_arr(v, at)?.iter().enumerate().map(|(i, s)| as_str(s, &format!("{at}/{i}")).map(String::from)).collect()
}

fn polys(ring: &RingRef, v: &Value, at: &str) -> Result<Vec<MPoly>> {
    strings(v, at)?
        .iter()
        .enumerate()
        .map(|(i, s)| MPoly::parse(ring, s).map_err(|e| Error::schema(format!("{at}/{i}"), e.to_string())))
        .collect()
}

fn texts(ps: &[MPoly]) -> Value {
    Value::from(ps.iter().map(|p| p.to_string()).collect::<Vec<_>>())
}

fn is_one(ps: &[MPoly]) -> bool {
    ps.len() == 1 && ps[0].is_constant() && !ps[0].is_zero()
}

fn map_value<T>(m: &BTreeMap<String, T>, f: impl Fn(&str, &T) -> Value) -> Value {
    Value::Object(m.iter().map(|(k, v)| (k.clone(), f(k, v))).collect())
}

pub fn presentation_from_json(v: &Value, at: &str) -> Result<Presentation> {
    as_obj(v, at)?;
    let field: Field = as_str(get(v, at, "field")?, &ptr(at, "field"))?
        .parse()
        .map_err(|e: Error| Error::schema(ptr(at, "field"), e.to_string()))?;
    let n = get(v, at, "n")?.as_u64().ok_or_else(|| Error::schema(ptr(at, "n"), "expected a count"))? as usize;
    let (dx, dy) = Presentation::names(n);
    let xs = match v.get("x") {
        Some(x) => strings(x, &ptr(at, "x"))?,
        None => dx,
    };
    let ys = match v.get("y") {
        Some(y) => strings(y, &ptr(at, "y"))?,
        None => dy,
    };
    if xs.len() != n || ys.len() != n {
        return Err(Error::schema(at, format!("expected {n} names per block")));
    }
    let (x, xy) = Presentation::rings(&field, &xs, &ys).map_err(|e| Error::schema(at, e.to_string()))?;
    let opens = |key: &str, ring: &RingRef| -> Result<Vec<MPoly>> {
        match v.get(key) {
            Some(o) => polys(ring, o, &ptr(at, key)),
            None => Ok(vec![MPoly::one(ring)]),
        }
    };
    let i0 = polys(&x, get(v, at, "I0")?, &ptr(at, "I0"))?;
    let i1 = polys(&xy, get(v, at, "I1")?, &ptr(at, "I1"))?;
    let p = Presentation {
        field,
        i0: crate::algebra::Ideal::new(&x, i0),
        i1: crate::algebra::Ideal::new(&xy, i1),
        open0: opens("open0", &x)?,
        open1: opens("open1", &xy)?,
        almost: v.get("almost").and_then(Value::as_bool).unwrap_or(false),
        x,
        xy,
    };
    Ok(p)
}

pub fn presentation_to_json(p: &Presentation) -> Value {
    let mut o = Map::new();
    o.insert("field".into(), p.field.descriptor().into());
    o.insert("n".into(), p.n().into());
    let (dx, dy) = Presentation::names(p.n());
    if p.xs() != dx.as_slice() || p.ys() != dy.as_slice() {
        o.insert("x".into(), p.xs().into());
        o.insert("y".into(), p.ys().into());
    }
    o.insert("I0".into(), texts(p.i0.gens()));
    o.insert("I1".into(), texts(p.i1.gens()));
    if !is_one(&p.open0) {
        o.insert("open0".into(), texts(&p.open0));
    }
    if !is_one(&p.open1) {
        o.insert("open1".into(), texts(&p.open1));
    }
    o.insert("almost".into(), p.almost.into());
    Value::Object(o)
}

fn group_from_json(v: &Value, at: &str, ring: &RingRef, width: usize) -> Result<(FiniteGroup, Vec<Vec<MPoly>>)> {
    let labels = strings(get(v, at, "elements")?, &ptr(at, "elements"))?;
    let table_at = ptr(at, "table");
    let table = as_arr(get(v, at, "table")?, &table_at)?
        .iter()
        .enumerate()
        .map(|(i, r)| strings(r, &format!("{table_at}/{i}")))
        .collect::<Result<Vec<_>>>()?;
    let g = FiniteGroup::from_labels(labels.clone(), &table).map_err(|e| Error::schema(&table_at, e.to_string()))?;
    let act_at = ptr(at, "action");
    let action = as_obj(get(v, at, "action")?, &act_at)?;
    let mut act = Vec::new();
    for l in &labels {
        let images = match action.get(l) {
            Some(a) => polys(ring, a, &ptr(&act_at, l))?,
            None if g.index(l).ok() == Some(g.identity) => (0..width).map(|i| MPoly::var(ring, i)).collect(),
            None => return Err(Error::schema(&act_at, format!("no action given for `{l}`"))),
        };
        if images.len() != width {
            return Err(Error::schema(ptr(&act_at, l), format!("expected {width} images")));
        }
        act.push(images);
    }
    Ok((g, act))
}

fn group_to_json(g: &FiniteGroup, act: &[Vec<MPoly>]) -> Value {
    let table: Vec<Vec<String>> =
        g.table.iter().map(|r| r.iter().map(|&k| g.labels[k].clone()).collect()).collect();
    let action: Map<String, Value> =
        g.labels.iter().zip(act).map(|(l, a)| (l.clone(), texts(a))).collect();
    json!({ "elements": g.labels, "table": table, "action": action })
}

fn hom_from_json(v: &Value, at: &str, src: &FiniteGroup, dst: &FiniteGroup) -> Result<Vec<usize>> {
    let m = as_obj(v, at)?;
    src.labels
        .iter()
        .map(|l| {
            let t = m.get(l).ok_or_else(|| Error::schema(at, format!("no image for `{l}`")))?;
            dst.index(as_str(t, &ptr(at, l))?).map_err(|e| Error::schema(ptr(at, l), e.to_string()))
        })
        .collect()
}

fn hom_to_json(src: &FiniteGroup, dst: &FiniteGroup, h: &[usize]) -> Value {
    Value::Object(src.labels.iter().zip(h).map(|(l, &k)| (l.clone(), dst.labels[k].clone().into())).collect())
}

pub fn cover_from_json(v: &Value, at: &str, base: Arc<Presentation>) -> Result<Cover> {
    let z = presentation_from_json(get(v, at, "Z")?, &ptr(at, "Z"))?;
    let p0 = polys(&z.x, get(v, at, "p0")?, &ptr(at, "p0"))?;
    let p1 = v.get("p1").map(|p| polys(&z.xy, p, &ptr(at, "p1"))).transpose()?;
    let (g0, act0) = group_from_json(get(v, at, "G0")?, &ptr(at, "G0"), &z.x, z.n())?;
    let g1 = match v.get("G1") {
        Some(g) => {
            let (g1, act1) = group_from_json(g, &ptr(at, "G1"), &z.xy, 2 * z.n())?;
            let pi1 = hom_from_json(get(v, at, "hom_pi1")?, &ptr(at, "hom_pi1"), &g1, &g0)?;
            let sigma = hom_from_json(get(v, at, "hom_sigma")?, &ptr(at, "hom_sigma"), &g1, &g0)?;
            Some((g1, act1, pi1, sigma))
        }
        None => None,
    };
    let c = Cover::new(base, z, p0, p1, g0, act0, g1).map_err(|e| Error::schema(at, e.to_string()))?;
    let report = c.validate();
    if !report.valid {
        return Err(Error::schema(at, report.errors.join("; ")));
    }
    Ok(c)
}

fn default_g1(c: &Cover) -> bool {
    let ident: Vec<usize> = (0..c.g0.order()).collect();
    c.g1 == c.g0
        && c.hom_pi1 == ident
        && c.hom_sigma == ident
        && c.act1.iter().zip(&c.act0).all(|(a1, a0)| *a1 == both_blocks(&c.z, a0, a0))
}

pub fn cover_to_json(c: &Cover, base: &str) -> Value {
    let mut o = Map::new();
    o.insert("base".into(), base.into());
    o.insert("Z".into(), presentation_to_json(&c.z));
    o.insert("p0".into(), texts(&c.p0));
    let dp1: Vec<MPoly> = c.p0.iter().map(|f| c.z.on_x(f)).chain(c.p0.iter().map(|f| c.z.on_y(f))).collect();
    if c.p1 != dp1 {
        o.insert("p1".into(), texts(&c.p1));
    }
    o.insert("G0".into(), group_to_json(&c.g0, &c.act0));
    let hom_at = |h: &[usize]| hom_to_json(&c.g1, &c.g0, h);
    if !default_g1(c) {
        o.insert("G1".into(), group_to_json(&c.g1, &c.act1));
    }
    o.insert("hom_pi1".into(), hom_at(&c.hom_pi1));
    o.insert("hom_sigma".into(), hom_at(&c.hom_sigma));
    Value::Object(o)
}

fn piece_from_json(v: &Value, at: &str, ring: &RingRef) -> Result<Piece> {
    let closed = polys(ring, get(v, at, "closed")?, &ptr(at, "closed"))?;
    let open = match v.get("open") {
        Some(o) => polys(ring, o, &ptr(at, "open"))?,
        None => vec![MPoly::one(ring)],
    };
    Ok(Piece::new(ring, closed, open))
}

fn piece_to_json(p: &Piece) -> Value {
    json!({ "closed": texts(&p.closed), "open": texts(&p.open) })
}

impl Bundle {
    pub fn new() -> Bundle {
        Bundle::default()
    }

    pub fn from_json(v: &Value) -> Result<Bundle> {
        as_obj(v, "")?;
        let version = get(v, "", "version")?.as_u64().ok_or_else(|| Error::schema("/version", "expected an integer"))?;
        if version != VERSION {
            return Err(Error::schema("/version", format!("unsupported version {version}, expected {VERSION}")));
        }
        let empty = Value::Object(Map::new());
        let section = |k: &str| -> Result<&Map<String, Value>> { as_obj(v.get(k).unwrap_or(&empty), &format!("/{k}")) };
        let mut b = Bundle::new();
        for (name, p) in section("presentations")? {
            let at = ptr("/presentations", name);
            let pres = presentation_from_json(p, &at)?;
            let report = pres.validate();
            if !report.valid {
                return Err(Error::schema(at, report.errors.join("; ")));
            }
            b.presentations.insert(name.clone(), Arc::new(pres));
        }
        let pres_ref = |b: &Bundle, v: &Value, at: &str| -> Result<Arc<Presentation>> {
            let name = as_str(v, at)?;
            b.presentations.get(name).cloned().ok_or_else(|| Error::schema(at, format!("unknown presentation `{name}`")))
        };
        for (name, m) in section("morphisms")? {
            let at = ptr("/morphisms", name);
            let source = pres_ref(&b, get(m, &at, "source")?, &ptr(&at, "source"))?;
            let target = pres_ref(&b, get(m, &at, "target")?, &ptr(&at, "target"))?;
            let f0 = polys(&source.x, get(m, &at, "f0")?, &ptr(&at, "f0"))?;
            let f = Morphism::new(source, target, f0).map_err(|e| Error::schema(&at, e.to_string()))?;
            let errs = f.validate();
            if !errs.is_empty() {
                return Err(Error::schema(at, errs.join("; ")));
            }
            b.morphisms.insert(name.clone(), f);
        }
        for (name, c) in section("covers")? {
            let at = ptr("/covers", name);
            let base = pres_ref(&b, get(c, &at, "base")?, &ptr(&at, "base"))?;
            b.covers.insert(name.clone(), Arc::new(cover_from_json(c, &at, base)?));
        }
        for (name, s) in section("stratifications")? {
            let at = ptr("/stratifications", name);
            let ambient = pres_ref(&b, get(s, &at, "ambient")?, &ptr(&at, "ambient"))?;
            let sat = ptr(&at, "strata");
            let mut strata = Vec::new();
            for (i, st) in as_arr(get(s, &at, "strata")?, &sat)?.iter().enumerate() {
                let at = format!("{sat}/{i}");
                let piece = piece_from_json(get(st, &at, "piece")?, &ptr(&at, "piece"), &ambient.x)?;
                let domain = strings(get(st, &at, "domain")?, &ptr(&at, "domain"))?;
                let stratum = match st.get("cover") {
                    None | Some(Value::Null) => Stratum::constant(&ambient, piece, !domain.is_empty()),
                    Some(r) => {
                        let cat = ptr(&at, "cover");
                        let name = as_str(r, &cat)?;
                        let cover =
                            b.covers.get(name).cloned().ok_or_else(|| Error::schema(&cat, format!("unknown cover `{name}`")))?;
                        let domain = cover
                            .g0
                            .set_from_labels(&domain)
                            .map_err(|e| Error::schema(ptr(&at, "domain"), e.to_string()))?;
                        Stratum { piece, cover, domain }
                    }
                };
                strata.push(stratum);
            }
            let strat = Stratification::new(ambient, strata).map_err(|e| Error::schema(&at, e.to_string()))?;
            b.stratifications.insert(name.clone(), strat);
        }
        for (name, f) in section("formulas")? {
            let at = ptr("/formulas", name);
            let formula = match f {
                Value::String(s) => parse(s).map_err(|e| Error::schema(&at, e.to_string()))?,
                other => Formula::from_json(other).map_err(|e| Error::schema(&at, e.to_string()))?,
            };
            b.formulas.insert(name.clone(), formula);
        }
        Ok(b)
    }

    pub fn parse(text: &str) -> Result<Bundle> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::schema("", e.to_string()))?;
        Bundle::from_json(&v)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Bundle> {
        Bundle::parse(&std::fs::read_to_string(path)?)
    }

    fn presentation_name(&self, p: &Arc<Presentation>) -> Option<&str> {
        self.presentations.iter().find(|(_, q)| Arc::ptr_eq(p, q)).map(|(k, _)| k.as_str())
    }

    /// Name every object reachable from the stratifications and morphisms.
    fn closed(&self) -> Bundle {
        let mut b = self.clone();
        let add_pres = |b: &mut Bundle, p: &Arc<Presentation>, name: String| -> String {
            if let Some(n) = b.presentation_name(p) {
                return n.to_string();
            }
            b.presentations.insert(name.clone(), p.clone());
            name
        };
        for (name, f) in self.morphisms.clone() {
            add_pres(&mut b, &f.source, format!("{name}.source"));
            add_pres(&mut b, &f.target, format!("{name}.target"));
        }
        for (name, c) in self.covers.clone() {
            add_pres(&mut b, &c.base, format!("{name}.base"));
        }
        for (name, s) in self.stratifications.clone() {
            add_pres(&mut b, &s.ambient, format!("{name}.ambient"));
            for (i, st) in s.strata.iter().enumerate() {
                if st.cover.is_trivial() || b.covers.values().any(|c| Arc::ptr_eq(c, &st.cover)) {
                    continue;
                }
                add_pres(&mut b, &st.cover.base, format!("{name}.{i}.base"));
                b.covers.insert(format!("{name}.{i}"), st.cover.clone());
            }
        }
        b
    }

    pub fn to_json(&self) -> Value {
        let b = self.closed();
        let pname = |p: &Arc<Presentation>| b.presentation_name(p).unwrap_or("").to_string();
        let cname = |c: &Arc<Cover>| b.covers.iter().find(|(_, d)| Arc::ptr_eq(c, d)).map(|(k, _)| k.clone());
        let mut o = Map::new();
        o.insert("version".into(), VERSION.into());
        o.insert("presentations".into(), map_value(&b.presentations, |_, p| presentation_to_json(p)));
        o.insert(
            "morphisms".into(),
            map_value(&b.morphisms, |_, f| json!({ "source": pname(&f.source), "target": pname(&f.target), "f0": texts(&f.f0) })),
        );
        o.insert("covers".into(), map_value(&b.covers, |_, c| cover_to_json(c, &pname(&c.base))));
        o.insert(
            "stratifications".into(),
            map_value(&b.stratifications, |_, s| {
                let strata: Vec<Value> = s
                    .strata
                    .iter()
                    .map(|st| {
                        let cover = cname(&st.cover).filter(|_| !st.cover.is_trivial());
                        let domain: Vec<String> = match &cover {
                            Some(_) => st.cover.g0.labels_of(&st.domain),
                            None if st.domain.is_empty() => vec![],
                            None => vec![st.cover.g0.labels[0].clone()],
                        };
                        json!({ "piece": piece_to_json(&st.piece), "cover": cover, "domain": domain })
                    })
                    .collect();
                json!({ "ambient": pname(&s.ambient), "strata": strata })
            }),
        );
        o.insert("formulas".into(), map_value(&b.formulas, |_, f| f.to_string().into()));
        Value::Object(o)
    }

    /// Canonical text: sorted keys, two-space indentation, trailing newline.
    pub fn canonical(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("json");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.canonical())?)
    }

    pub fn presentation(&self, name: &str) -> Result<&Arc<Presentation>> {
        self.presentations.get(name).ok_or_else(|| Error::schema(ptr("/presentations", name), "no such presentation"))
    }

    pub fn morphism(&self, name: &str) -> Result<&Morphism> {
        self.morphisms.get(name).ok_or_else(|| Error::schema(ptr("/morphisms", name), "no such morphism"))
    }

    pub fn cover(&self, name: &str) -> Result<&Arc<Cover>> {
        self.covers.get(name).ok_or_else(|| Error::schema(ptr("/covers", name), "no such cover"))
    }

    pub fn stratification(&self, name: &str) -> Result<&Stratification> {
        self.stratifications.get(name).ok_or_else(|| Error::schema(ptr("/stratifications", name), "no such stratification"))
    }

    pub fn formula(&self, name: &str) -> Result<&Formula> {
        self.formulas.get(name).ok_or_else(|| Error::schema(ptr("/formulas", name), "no such formula"))
    }
}
