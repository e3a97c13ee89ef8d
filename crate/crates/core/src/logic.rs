//! First-order formulas in the language of difference rings: syntax, a brute-force
//! evaluator over `(F_{q^m}, x ↦ x^q)`, and translations from presentations and
//! Galois stratifications.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::algebra::gf::Gf;
use crate::algebra::{Field, MPoly};
use crate::error::{Error, Result};
use crate::points::DiffField;
use crate::presentation::{Piece, Presentation};
use crate::strat::Stratification;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Term {
    Var(String),
    Const(i64),
    /// `σ^k(t)` with `k ≥ 1`.
    Sigma(u32, Box<Term>),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn sigma(self, k: u32) -> Term {
        match self {
            _ if k == 0 => self,
            Term::Sigma(j, t) => Term::Sigma(j + k, t),
            t => Term::Sigma(k, Box::new(t)),
        }
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Sigma(_, t) | Term::Neg(t) | Term::Pow(t, _) => t.collect_vars(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    /// Largest `k` with `σ^k` applied (nested counts add).
    pub fn sigma_depth(&self) -> u32 {
        match self {
            Term::Var(_) | Term::Const(_) => 0,
            Term::Sigma(k, t) => k + t.sigma_depth(),
            Term::Neg(t) | Term::Pow(t, _) => t.sigma_depth(),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => a.sigma_depth().max(b.sigma_depth()),
        }
    }
}

impl Formula {
    pub fn tt() -> Formula {
        Formula::Eq(Term::Const(0), Term::Const(0))
    }

    pub fn ff() -> Formula {
        Formula::Eq(Term::Const(1), Term::Const(0))
    }

    pub fn is_tt(&self) -> bool {
        matches!(self, Formula::Eq(Term::Const(a), Term::Const(b)) if a == b)
    }

    pub fn is_ff(&self) -> bool {
        matches!(self, Formula::Eq(Term::Const(a), Term::Const(b)) if a != b)
    }

    pub fn zero(t: Term) -> Formula {
        Formula::Eq(t, Term::Const(0))
    }

    pub fn not(f: Formula) -> Formula {
        if f.is_tt() {
            Formula::ff()
        } else if f.is_ff() {
            Formula::tt()
        } else {
            Formula::Not(Box::new(f))
        }
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        if a.is_ff() || b.is_tt() {
            a
        } else if b.is_ff() || a.is_tt() {
            b
        } else {
            Formula::And(Box::new(a), Box::new(b))
        }
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        if a.is_tt() || b.is_ff() {
            a
        } else if b.is_tt() || a.is_ff() {
            b
        } else {
            Formula::Or(Box::new(a), Box::new(b))
        }
    }

    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        fs.into_iter().fold(Formula::tt(), Formula::and)
    }

    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        fs.into_iter().fold(Formula::ff(), Formula::or)
    }

    pub fn exists(v: &str, body: Formula) -> Formula {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            Formula::Eq(a, b) => {
                let mut vs = Vec::new();
                a.collect_vars(&mut vs);
                b.collect_vars(&mut vs);
                for v in vs {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    pub fn sigma_depth(&self) -> u32 {
        match self {
            Formula::Eq(a, b) => a.sigma_depth().max(b.sigma_depth()),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.sigma_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => a.sigma_depth().max(b.sigma_depth()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("formula serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Formula> {
        serde_json::from_value(v.clone()).map_err(|e| Error::schema("", e.to_string()))
    }
}

// printing

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Add(..) | Term::Sub(..) => 1,
        Term::Mul(..) => 2,
        Term::Neg(_) => 3,
        Term::Pow(..) => 4,
        _ => 5,
    }
}

fn write_term(t: &Term, min: u8, out: &mut String) {
    let paren = term_prec(t) < min;
    if paren {
        out.push('(');
    }
    match t {
        Term::Var(v) => out.push_str(v),
        Term::Const(c) => out.push_str(&c.to_string()),
        Term::Sigma(k, t) => {
            for _ in 0..*k {
                out.push_str("s(");
            }
            write_term(t, 0, out);
            for _ in 0..*k {
                out.push(')');
            }
        }
        Term::Neg(t) => {
            out.push('-');
            write_term(t, 3, out);
        }
        Term::Add(a, b) | Term::Sub(a, b) => {
            write_term(a, 1, out);
            out.push_str(if matches!(t, Term::Add(..)) { " + " } else { " - " });
            write_term(b, 2, out);
        }
        Term::Mul(a, b) => {
            write_term(a, 2, out);
            out.push('*');
            write_term(b, 3, out);
        }
        Term::Pow(a, e) => {
            write_term(a, 5, out);
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
    if paren {
        out.push(')');
    }
}

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(_) | Formula::Exists(..) | Formula::Forall(..) => 4,
        Formula::Eq(..) => 5,
    }
}

/// Quantifier bodies extend to the right, so a quantifier needs parentheses unless it
/// ends the enclosing text.
fn ends_in_quantifier(f: &Formula) -> bool {
    match f {
        Formula::Exists(..) | Formula::Forall(..) => true,
        Formula::Not(g) => ends_in_quantifier(g),
        Formula::And(_, b) | Formula::Or(_, b) | Formula::Implies(_, b) => ends_in_quantifier(b),
        Formula::Eq(..) => false,
    }
}

fn write_formula(f: &Formula, min: u8, tail: bool, out: &mut String) {
    let paren = formula_prec(f) < min || (!tail && ends_in_quantifier(f));
    let tail = tail || paren;
    if paren {
        out.push('(');
    }
    match f {
        Formula::Eq(a, b) => {
            write_term(a, 0, out);
            out.push_str(" = ");
            write_term(b, 0, out);
        }
        Formula::Not(g) => {
            out.push('~');
            write_formula(g, 4, tail, out);
        }
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (p, op) = if matches!(f, Formula::And(..)) { (3, " & ") } else { (2, " | ") };
            write_formula(a, p, false, out);
            out.push_str(op);
            write_formula(b, p + 1, tail, out);
        }
        Formula::Implies(a, b) => {
            write_formula(a, 2, false, out);
            out.push_str(" -> ");
            write_formula(b, 1, tail, out);
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            out.push_str(if matches!(f, Formula::Exists(..)) { "E " } else { "A " });
            out.push_str(v);
            out.push_str(". ");
            write_formula(g, 0, tail, out);
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(self, 0, &mut s);
        f.write_str(&s)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(self, 0, true, &mut s);
        f.write_str(&s)
    }
}

// parsing

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Sym(&'static str),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    const SYMS: [&str; 12] = ["->", "+", "-", "*", "^", "(", ")", "=", "~", "&", "|", "."];
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    'outer: while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            let v = src[s..i].parse().map_err(|_| Error::Parse { pos: s, msg: "integer too large".into() })?;
            out.push((Tok::Int(v), s));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'\'') {
                i += 1;
            }
            out.push((Tok::Ident(src[s..i].to_string()), s));
            continue;
        }
        for sym in SYMS {
            if src[i..].starts_with(sym) {
                out.push((Tok::Sym(sym), i));
                i += sym.len();
                continue 'outer;
            }
        }
        let ch = src[i..].chars().next().unwrap();
        return Err(Error::Parse { pos: i, msg: format!("unexpected character `{ch}`") });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { pos: self.offset(), msg: msg.into() }
    }

    fn eat(&mut self, s: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(t)) if *t == s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn is_quantifier(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(q)) if q == "E" || q == "A")
            && matches!(self.peek_at(1), Some(Tok::Ident(_)))
            && matches!(self.peek_at(2), Some(Tok::Sym(".")))
    }

    fn formula(&mut self) -> Result<Formula> {
        let a = self.disj()?;
        if self.eat("->") {
            let b = self.formula()?;
            return Ok(Formula::Implies(Box::new(a), Box::new(b)));
        }
        Ok(a)
    }

    fn disj(&mut self) -> Result<Formula> {
        let mut a = self.conj()?;
        while self.eat("|") {
            let b = self.conj()?;
            a = Formula::Or(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn conj(&mut self) -> Result<Formula> {
        let mut a = self.unary()?;
        while self.eat("&") {
            let b = self.unary()?;
            a = Formula::And(Box::new(a), Box::new(b));
        }
        Ok(a)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat("~") {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.is_quantifier() {
            let Some(Tok::Ident(q)) = self.peek().cloned() else { unreachable!() };
            let Some(Tok::Ident(v)) = self.peek_at(1).cloned() else { unreachable!() };
            self.pos += 3;
            let body = Box::new(self.formula()?);
            return Ok(if q == "E" { Formula::Exists(v, body) } else { Formula::Forall(v, body) });
        }
        if matches!(self.peek(), Some(Tok::Sym("("))) {
            let save = self.pos;
            if let Ok(a) = self.atom() {
                return Ok(a);
            }
            self.pos = save;
            self.expect("(")?;
            let f = self.formula()?;
            self.expect(")")?;
            return Ok(f);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula> {
        let a = self.sum()?;
        self.expect("=")?;
        let b = self.sum()?;
        Ok(Formula::Eq(a, b))
    }

    fn sum(&mut self) -> Result<Term> {
        let mut a = self.product()?;
        loop {
            if self.eat("+") {
                a = Term::Add(Box::new(a), Box::new(self.product()?));
            } else if self.eat("-") {
                a = Term::Sub(Box::new(a), Box::new(self.product()?));
            } else {
                return Ok(a);
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut a = self.signed()?;
        while self.eat("*") {
            a = Term::Mul(Box::new(a), Box::new(self.signed()?));
        }
        Ok(a)
    }

    fn signed(&mut self) -> Result<Term> {
        if self.eat("-") {
            return Ok(Term::Neg(Box::new(self.signed()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Term> {
        let mut a = self.primary()?;
        while self.eat("^") {
            match self.peek().cloned() {
                Some(Tok::Int(e)) if e >= 0 && e <= u32::MAX as i64 => {
                    self.pos += 1;
                    a = Term::Pow(Box::new(a), e as u32);
                }
                _ => return Err(self.err("expected a nonnegative integer exponent")),
            }
        }
        Ok(a)
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Int(c)) => {
                self.pos += 1;
                Ok(Term::Const(c))
            }
            Some(Tok::Ident(s)) if s == "s" && matches!(self.peek_at(1), Some(Tok::Sym("("))) => {
                self.pos += 2;
                let t = self.sum()?;
                self.expect(")")?;
                Ok(t.sigma(1))
            }
            Some(Tok::Ident(v)) if v != "E" && v != "A" => {
                self.pos += 1;
                Ok(Term::Var(v))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.sum()?;
                self.expect(")")?;
                Ok(t)
            }
            _ => Err(self.err("expected a term")),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let f = p.formula()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(f)
}

pub fn parse_term(text: &str) -> Result<Term> {
    let mut p = Parser { toks: lex(text)?, pos: 0, end: text.len() };
    let t = p.sum()?;
    if p.pos != p.toks.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(t)
}

// evaluation

/// Brute-force evaluator: free variables take values in `F_{q^m}`, quantifiers range over
/// `F_{q^{m·ext}}` (`ext = 1` is the plain semantics over the field itself).
pub struct Oracle {
    pub field: DiffField,
    pub quant_field: DiffField,
    gf: Arc<Gf>,
    small: Arc<Gf>,
    embed: Vec<u32>,
    budget: u128,
    used: Cell<u128>,
}

impl Oracle {
    pub fn new(k: &DiffField, budget: u128) -> Result<Oracle> {
        Oracle::with_extension(k, 1, budget)
    }

    pub fn with_extension(k: &DiffField, ext: u32, budget: u128) -> Result<Oracle> {
        let big = k.extend(ext.max(1));
        let gf = big.gf()?;
        let small = k.gf()?;
        let embed = if ext <= 1 { (0..small.size).collect() } else { gf.subfield_table(&small)? };
        Ok(Oracle { field: k.clone(), quant_field: big, gf, small, embed, budget, used: Cell::new(0) })
    }

    pub fn small_gf(&self) -> &Arc<Gf> {
        &self.small
    }

    fn charge(&self) -> Result<()> {
        let u = self.used.get() + 1;
        self.used.set(u);
        if u > self.budget {
            return Err(Error::Budget { needed: u, budget: self.budget });
        }
        Ok(())
    }

    fn term(&self, t: &Term, env: &[(String, u32)]) -> Result<u32> {
        let gf = &self.gf;
        Ok(match t {
            Term::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|e| e.1)
                .ok_or_else(|| Error::VariableMismatch(format!("unassigned variable `{v}`")))?,
            Term::Const(c) => gf.from_i64(*c),
            Term::Sigma(k, t) => {
                let a = self.term(t, env)?;
                let k = *k % self.quant_field.m;
                gf.pow(a, self.quant_field.q().pow(k))
            }
            Term::Neg(t) => gf.neg(self.term(t, env)?),
            Term::Add(a, b) => gf.add(self.term(a, env)?, self.term(b, env)?),
            Term::Sub(a, b) => gf.sub(self.term(a, env)?, self.term(b, env)?),
            Term::Mul(a, b) => gf.mul(self.term(a, env)?, self.term(b, env)?),
            Term::Pow(a, e) => gf.pow(self.term(a, env)?, *e as u128),
        })
    }

    /// Truth value under an environment of values in the quantifier field.
    pub fn eval_in(&self, f: &Formula, env: &mut Vec<(String, u32)>) -> Result<bool> {
        match f {
            Formula::Eq(a, b) => {
                self.charge()?;
                Ok(self.term(a, env)? == self.term(b, env)?)
            }
            Formula::Not(g) => Ok(!self.eval_in(g, env)?),
            Formula::And(a, b) => Ok(self.eval_in(a, env)? && self.eval_in(b, env)?),
            Formula::Or(a, b) => Ok(self.eval_in(a, env)? || self.eval_in(b, env)?),
            Formula::Implies(a, b) => Ok(!self.eval_in(a, env)? || self.eval_in(b, env)?),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let want = matches!(f, Formula::Exists(..));
                for a in 0..self.gf.size {
                    env.push((v.clone(), a));
                    let r = self.eval_in(g, env);
                    env.pop();
                    if r? == want {
                        return Ok(want);
                    }
                }
                Ok(!want)
            }
        }
    }

    /// Truth value with free variables assigned elements of `F_{q^m}`.
    pub fn eval(&self, f: &Formula, assignment: &[(String, u32)]) -> Result<bool> {
        let mut env: Vec<(String, u32)> =
            assignment.iter().map(|(n, a)| (n.clone(), self.embed[*a as usize])).collect();
        self.eval_in(f, &mut env)
    }

    /// All tuples over `F_{q^m}` for `vars` satisfying `f`, in lexicographic index order.
    pub fn realisations(&self, f: &Formula, vars: &[String]) -> Result<Vec<Vec<u32>>> {
        let free = f.free_vars();
        if let Some(v) = free.iter().find(|v| !vars.contains(v)) {
            return Err(Error::VariableMismatch(format!("free variable `{v}` is not among {vars:?}")));
        }
        let n = vars.len();
        let size = self.small.size;
        let total = (size as u128).pow(n as u32);
        if total > self.budget {
            return Err(Error::Budget { needed: total, budget: self.budget });
        }
        let mut out = Vec::new();
        let mut x = vec![0u32; n];
        loop {
            let assignment: Vec<(String, u32)> = vars.iter().cloned().zip(x.iter().copied()).collect();
            if self.eval(f, &assignment)? {
                out.push(x.clone());
            }
            let mut i = n;
            loop {
                if i == 0 {
                    return Ok(out);
                }
                i -= 1;
                x[i] += 1;
                if x[i] < size {
                    break;
                }
                x[i] = 0;
            }
        }
    }
}

pub fn eval_formula(f: &Formula, assignment: &[(String, u32)], k: &DiffField, budget: u128) -> Result<bool> {
    Oracle::new(k, budget)?.eval(f, assignment)
}

/// Realisation sets of `f` over `F_{q^m}` for each `m` in `ms`, quantifiers ranging over the
/// same field.
pub fn realisations_per_m(
    f: &Formula,
    vars: &[String],
    p: u64,
    e: u32,
    ms: &[u32],
    budget: u128,
) -> Result<Vec<(u32, Vec<Vec<u32>>)>> {
    ms.iter()
        .map(|&m| {
            let k = DiffField::new(p, e, m)?;
            Ok((m, Oracle::new(&k, budget)?.realisations(f, vars)?))
        })
        .collect()
}

// translations

/// Integer coefficients of `f` up to a nonzero scalar (denominators cleared over `Q`), with
/// terms in later variables first.
fn integer_terms(f: &MPoly) -> Result<Vec<(Vec<u16>, i64)>> {
    let field = f.field();
    let mut terms: Vec<_> = f.terms().collect();
    terms.sort_by(|a, b| b.0 .0.iter().rev().cmp(a.0 .0.iter().rev()));
    match field {
        Field::Rationals => {
            let den = terms
                .iter()
                .map(|(_, c)| field.as_rational(c).unwrap().denom().clone())
                .fold(num_bigint::BigInt::one(), |a, b| a.lcm(&b));
            terms
                .iter()
                .map(|(m, c)| {
                    let v = field.as_rational(c).unwrap() * num_rational::BigRational::from_integer(den.clone());
                    let v = v.to_integer();
                    let v = v.to_i64().ok_or_else(|| Error::UnsupportedDomain(format!("coefficient {v} too large")))?;
                    Ok((m.0.clone(), v))
                })
                .collect()
        }
        _ => terms
            .iter()
            .map(|(m, c)| {
                let v = field.prime_subfield_value(c).ok_or_else(|| {
                    Error::UnsupportedDomain(format!("coefficient of {f} outside the prime field"))
                })?;
                let p = field.characteristic() as i64;
                let v = if v > p / 2 { v - p } else { v };
                Ok((m.0.clone(), v))
            })
            .collect(),
    }
}

/// `f` as a term, with variable `i` replaced by `vars[i]`.
pub fn poly_to_term(f: &MPoly, vars: &[Term]) -> Result<Term> {
    let mut acc: Option<Term> = None;
    for (m, c) in integer_terms(f)? {
        let mut factors: Vec<Term> = Vec::new();
        for (i, &e) in m.iter().enumerate() {
            if e == 1 {
                factors.push(vars[i].clone());
            } else if e > 1 {
                factors.push(Term::Pow(Box::new(vars[i].clone()), e as u32));
            }
        }
        let mag = c.abs();
        if factors.is_empty() || mag != 1 {
            factors.insert(0, Term::Const(mag));
        }
        let mono = factors.into_iter().reduce(|a, b| Term::Mul(Box::new(a), Box::new(b))).unwrap();
        acc = Some(match acc {
            None if c < 0 => Term::Neg(Box::new(mono)),
            None => mono,
            Some(a) if c < 0 => Term::Sub(Box::new(a), Box::new(mono)),
            Some(a) => Term::Add(Box::new(a), Box::new(mono)),
        });
    }
    Ok(acc.unwrap_or(Term::Const(0)))
}

fn poly_atom(f: &MPoly, vars: &[Term]) -> Result<Formula> {
    if f.is_zero() {
        return Ok(Formula::tt());
    }
    if f.is_constant() {
        return Ok(Formula::ff());
    }
    let f = if integer_terms(f)?.first().is_some_and(|t| t.1 < 0) { f.neg() } else { f.clone() };
    Ok(Formula::zero(poly_to_term(&f, vars)?))
}

/// `⋁ o ≠ 0` over the open generators.
fn opens_formula(opens: &[MPoly], vars: &[Term]) -> Result<Formula> {
    if opens.iter().any(|o| o.is_constant() && !o.is_zero()) {
        return Ok(Formula::tt());
    }
    Ok(Formula::or_all(opens.iter().map(|o| poly_atom(o, vars).map(Formula::not)).collect::<Result<Vec<_>>>()?))
}

/// Ambient variable names `v1..vn` used by the translations.
pub fn ambient_vars(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("v{i}")).collect()
}

fn var_terms(names: &[String]) -> Vec<Term> {
    names.iter().map(|v| Term::var(v)).collect()
}

fn sigma_terms(names: &[String]) -> Vec<Term> {
    names.iter().map(|v| Term::var(v).sigma(1)).collect()
}

fn piece_formula(p: &Piece, vars: &[Term]) -> Result<Formula> {
    let closed = p.closed.iter().map(|g| poly_atom(g, vars)).collect::<Result<Vec<_>>>()?;
    Ok(Formula::and(Formula::and_all(closed), opens_formula(&p.open, vars)?))
}

/// Quantifier-free formula in `v1..vn` whose realisations are those of `p`.
pub fn presentation_to_fo(p: &Presentation) -> Result<Formula> {
    if p.is_empty() {
        return Ok(Formula::ff());
    }
    let names = ambient_vars(p.n());
    let v = var_terms(&names);
    let mut vs = v.clone();
    vs.extend(sigma_terms(&names));
    let mut parts = Vec::new();
    for g in p.i0.gens() {
        parts.push(poly_atom(g, &v)?);
    }
    for g in p.i1.gens() {
        parts.push(poly_atom(g, &vs)?);
    }
    parts.push(opens_formula(&p.open0, &v)?);
    parts.push(opens_formula(&p.open1, &vs)?);
    Ok(Formula::and_all(parts))
}

/// Disjunction over strata of piece membership and an existential statement over the cover
/// coordinates. Cover points live over extensions, so evaluate it with
/// [`Oracle::with_extension`] and [`witness_extension`].
pub fn galois_to_fo(a: &Stratification) -> Result<Formula> {
    let n = a.ambient.n();
    let names = ambient_vars(n);
    let v = var_terms(&names);
    let mut disjuncts = Vec::new();
    for s in &a.strata {
        if s.is_bottom() {
            continue;
        }
        let member = piece_formula(&s.piece, &v)?;
        if s.is_top() {
            disjuncts.push(member);
            continue;
        }
        let c = &s.cover;
        let zn: Vec<String> = (1..=c.nz()).map(|i| format!("z{i}")).collect();
        let z = var_terms(&zn);
        let sz = sigma_terms(&zn);
        let mut body = Vec::new();
        for g in c.z.i0.gens() {
            body.push(poly_atom(g, &z)?);
        }
        for (pi, vi) in c.p0.iter().zip(&v) {
            body.push(Formula::Eq(poly_to_term(pi, &z)?, vi.clone()));
        }
        body.push(opens_formula(&c.z.open0, &z)?);
        let mut alts = Vec::new();
        for &g in &s.domain {
            let ginv = c.g0.inv[g];
            // w = g⁻¹·σ(z)
            let mut zw = z.clone();
            for f in &c.act0[ginv] {
                zw.push(poly_to_term(f, &sz)?);
            }
            let eqs = c.z.i1.gens().iter().map(|h| poly_atom(h, &zw)).collect::<Result<Vec<_>>>()?;
            alts.push(Formula::and(Formula::and_all(eqs), opens_formula(&c.z.open1, &zw)?));
        }
        body.push(Formula::or_all(alts));
        let mut inner = Formula::and_all(body);
        for zi in zn.iter().rev() {
            inner = Formula::exists(zi, inner);
        }
        disjuncts.push(Formula::and(member, inner));
    }
    Ok(Formula::and(presentation_to_fo(&a.ambient)?, Formula::or_all(disjuncts)))
}

/// Extension degree over which every fibre of every cover of `a` splits.
pub fn witness_extension(a: &Stratification) -> u32 {
    a.strata
        .iter()
        .filter(|s| !s.is_top() && !s.is_bottom())
        .map(|s| s.cover.g0.exponent() as u32)
        .fold(1, num_integer::lcm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cover::Cover;
    use crate::group::FiniteGroup;
    use crate::points::{enumerate_realisations, DEFAULT_BUDGET};
    use crate::strat::Stratum;
    use proptest::prelude::*;

    fn k(q: u64) -> DiffField {
        DiffField::from_q(q, 1).unwrap()
    }

    fn vars(n: usize) -> Vec<String> {
        ambient_vars(n)
    }

    #[test]
    fn grammar_examples() {
        let f = parse("E z. z*z - v1 = 0").unwrap();
        assert!(matches!(&f, Formula::Exists(v, _) if v == "z"));
        assert_eq!(f.free_vars(), vec!["v1"]);
        let g = parse("s(v1) - v1 = 0").unwrap();
        assert_eq!(g.sigma_depth(), 1);
        let h = parse("A x. ~(x = 0) -> E y. x*y - 1 = 0").unwrap();
        let Formula::Forall(_, body) = &h else { panic!("{h:?}") };
        assert!(matches!(**body, Formula::Implies(..)));
        assert_eq!(h.to_string(), "A x. ~x = 0 -> E y. x*y - 1 = 0");
        assert_eq!(parse(&h.to_string()).unwrap(), h);
        assert_eq!(parse("s(s(v)) = v").unwrap().sigma_depth(), 2);
        assert!(matches!(parse("(v + 1)*v = 0").unwrap(), Formula::Eq(..)));
        let err = parse("v1 = = 0").unwrap_err();
        assert!(matches!(err, Error::Parse { pos: 5, .. }), "{err:?}");
        let json = h.to_json();
        assert_eq!(Formula::from_json(&json).unwrap(), h);
    }

    #[test]
    fn oracle_examples() {
        for q in [3u64, 5, 7, 11, 13] {
            let kq = k(q);
            let o = Oracle::new(&kq, DEFAULT_BUDGET).unwrap();
            let axiom = parse("A x. ~(x = 0) -> E y. x*y - 1 = 0").unwrap();
            assert!(o.eval(&axiom, &[]).unwrap());
            let fixed = parse("s(v) - v = 0").unwrap();
            for a in 0..q as u32 {
                assert!(o.eval(&fixed, &[("v".into(), a)]).unwrap());
            }
        }
        let o7 = Oracle::new(&k(7), DEFAULT_BUDGET).unwrap();
        assert!(o7.eval(&parse("E z. z*z = 2").unwrap(), &[]).unwrap());
        assert!(!o7.eval(&parse("E z. z*z = 3").unwrap(), &[]).unwrap());
        // σ is not the identity on F_49
        let o49 = Oracle::new(&DiffField::new(7, 1, 2).unwrap(), DEFAULT_BUDGET).unwrap();
        assert!(!o49.eval(&parse("A x. s(x) = x").unwrap(), &[]).unwrap());
        let tiny = Oracle::new(&k(7), 10).unwrap();
        assert!(matches!(tiny.eval(&parse("E a. E b. a*b = 6").unwrap(), &[]), Err(Error::Budget { .. })));
    }

    #[test]
    fn presentation_translation_matches_enumeration() {
        let q = Field::Rationals;
        let cases = [
            Presentation::parse(&q, 1, &["0"], &["y0 - x0^2"]).unwrap(),
            Presentation::parse(&q, 1, &["0"], &["y0 - x0^2", "x0^3 - x0"]).unwrap(),
            Presentation::parse(&q, 1, &["0"], &["y0 - x0 - 1"]).unwrap(),
            Presentation::parse(&q, 2, &["x0*x1 - 1"], &["y0 - x1", "y1 - x0"]).unwrap(),
            Presentation::parse(&q, 1, &["0"], &["y0 - x0"]).unwrap().with_open(&["x0"], &[] as &[&str]).unwrap(),
            Presentation::parse(&q, 1, &["1"], &["0"]).unwrap(),
        ];
        let f = presentation_to_fo(&cases[0]).unwrap();
        assert_eq!(f.to_string(), "s(v1) - v1^2 = 0");
        assert!(presentation_to_fo(&cases[5]).unwrap().is_ff());
        assert_eq!(presentation_to_fo(&cases[5]).unwrap().to_string(), "1 = 0");
        for p in &cases {
            let f = presentation_to_fo(p).unwrap();
            for (qq, m) in [(2u64, 1u32), (3, 1), (3, 2), (5, 1), (7, 1), (4, 1)] {
                let kk = DiffField::from_q(qq, m).unwrap();
                let o = Oracle::new(&kk, DEFAULT_BUDGET).unwrap();
                let got = o.realisations(&f, &vars(p.n())).unwrap();
                let want = enumerate_realisations(p, &kk, DEFAULT_BUDGET).unwrap();
                assert_eq!(got, want, "{f} over {qq}^{m}");
            }
        }
    }

    fn kummer_strat(domain: &[usize]) -> Stratification {
        let field = Field::Rationals;
        let amb = Arc::new(
            Presentation::parse(&field, 1, &["0"], &["y0 - x0"]).unwrap().with_open(&["x0"], &[] as &[&str]).unwrap(),
        );
        let zs = vec!["z0".to_string()];
        let ws = vec!["w0".to_string()];
        let z = Presentation::parse_named(&field, &zs, &ws, &["0"], &["w0 - z0"])
            .unwrap()
            .with_open(&["z0"], &[] as &[&str])
            .unwrap();
        let p0 = vec![MPoly::parse(&z.x, "z0^2").unwrap()];
        let act0 = vec![vec![MPoly::parse(&z.x, "z0").unwrap()], vec![MPoly::parse(&z.x, "-z0").unwrap()]];
        let c = Cover::new(amb.clone(), z, p0, None, FiniteGroup::cyclic(2), act0, None).unwrap();
        let s = Stratum { piece: Piece::full(&amb.x), cover: Arc::new(c), domain: domain.iter().copied().collect() };
        Stratification::new(amb, vec![s]).unwrap()
    }

    #[test]
    fn galois_translation_matches_evaluation() {
        let triv = kummer_strat(&[0]);
        let f = galois_to_fo(&triv).unwrap();
        let shown = f.to_string();
        assert!(shown.contains("E z1.") && shown.contains("s(z1)"), "{shown}");
        let strats = [kummer_strat(&[0]), kummer_strat(&[1]), kummer_strat(&[0, 1]), kummer_strat(&[])];
        for a in &strats {
            let f = galois_to_fo(a).unwrap();
            let ext = witness_extension(a);
            for q in [3u64, 5, 7, 9, 11, 13] {
                let o = Oracle::with_extension(&k(q), ext, DEFAULT_BUDGET).unwrap();
                let got = o.realisations(&f, &vars(1)).unwrap();
                let want = a.evaluate(&k(q), DEFAULT_BUDGET).unwrap().points;
                assert_eq!(got, want, "q={q}: {f}");
            }
        }
        let bottom = Stratification::constant(triv.ambient.clone(), false);
        assert!(galois_to_fo(&bottom).unwrap().is_ff());
        let top = Stratification::constant(triv.ambient.clone(), true);
        assert_eq!(galois_to_fo(&top).unwrap(), presentation_to_fo(&triv.ambient).unwrap());
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["v1", "v2", "z", "s1"]).prop_map(Term::var),
            (0i64..20).prop_map(Term::Const),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (1u32..3, inner.clone()).prop_map(|(k, t)| t.sigma(k)),
                inner.clone().prop_map(|t| Term::Neg(Box::new(t))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Add(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::Mul(Box::new(a), Box::new(b))),
                (inner, 0u32..4).prop_map(|(a, e)| Term::Pow(Box::new(a), e)),
            ]
        })
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Eq(a, b));
        leaf.prop_recursive(4, 16, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::And(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Or(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::Implies(Box::new(a), Box::new(b))),
                inner.clone().prop_map(|f| Formula::Exists("z".into(), Box::new(f))),
                inner.prop_map(|f| Formula::Forall("v2".into(), Box::new(f))),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(f in arb_formula()) {
            let text = f.to_string();
            prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
        }

        #[test]
        fn negation_flips_truth(f in arb_formula(), a in 0u32..5, b in 0u32..5) {
            let o = Oracle::new(&k(5), DEFAULT_BUDGET).unwrap();
            let env = vec![("v1".to_string(), a), ("s1".to_string(), b), ("v2".to_string(), 0), ("z".to_string(), 1)];
            let t = o.eval(&f, &env).unwrap();
            prop_assert_eq!(o.eval(&Formula::Not(Box::new(f)), &env).unwrap(), !t);
        }
    }
}
