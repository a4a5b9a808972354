//! Noncommutative polynomials over named generators, their evaluation on
//! matrix polynomials, and degree-bounded checks of finite presentations.
//!
//! Relations are evaluated exactly. Surjectivity is checked on truncations:
//! the subalgebra generated in `M_N(K[v]/v^(d+1))` is compared with the
//! degree-`d` slice of the target algebra. Injectivity of the presentation
//! map is not checked.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::linalg::Echelon;
use crate::exact::{Gq, Var};
use crate::expr::Grid;
use crate::matpoly::MatPoly;
use crate::solver::AlgebraSlice;
use crate::theorems::{Coord, ExampleId, Gamma};

mod modular;
use modular::{Evaluated, Screen};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PresentationError {
    #[error("syntax error in `{text}` at byte {pos}: {msg}")]
    Syntax { text: String, pos: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unassigned generator `{0}`")]
    Unassigned(String),
    #[error("no candidate found")]
    NoCandidate,
    #[error("assignment: {0}")]
    Assignment(String),
}

/// Word in generator indices; the empty word is the unit.
pub type Word = Vec<usize>;

/// Element of the free algebra `K⟨g_0, g_1, …⟩`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct FreeElement {
    terms: BTreeMap<Word, Gq>,
}

impl FreeElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Vec::new())
    }

    pub fn word(w: Word) -> Self {
        Self { terms: BTreeMap::from([(w, Gq::one())]) }
    }

    pub fn generator(g: usize) -> Self {
        Self::word(vec![g])
    }

    pub fn terms(&self) -> &BTreeMap<Word, Gq> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, w: Word, c: Gq) {
        let slot = self.terms.entry(w).or_insert_with(Gq::zero);
        *slot += &c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Gq) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(w, v)| (w.clone(), v * c)).collect() }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(&-Gq::one()))
    }

    /// Concatenation product, left to right.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (a, u) in &self.terms {
            for (b, v) in &rhs.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, u * v);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Largest generator index used.
    pub fn max_generator(&self) -> Option<usize> {
        self.terms.keys().flat_map(|w| w.iter().copied()).max()
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let word = if w.is_empty() { "1".to_string() } else { w.iter().map(|&g| names[g].as_str()).collect::<Vec<_>>().join(" ") };
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(m) if !m.contains(['+', '-']) => (true, m.to_string()),
                _ => (false, cs.clone()),
            };
            if k > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            if mag == "1" {
                out.push_str(&word);
            } else if w.is_empty() {
                out.push_str(&mag);
            } else if mag.contains(['+', '-']) {
                out.push_str(&format!("({mag}) {word}"));
            } else {
                out.push_str(&format!("{mag} {word}"));
            }
        }
        out
    }
}

/// Parses `[c] factor {factor} {(+|-) [c] factor {factor}}` where a factor is
/// a generator name or a parenthesized expression, optionally raised to a
/// nonnegative integer power. Coefficients are integers or `p/q`.
pub fn parse_free(text: &str, names: &[String]) -> Result<FreeElement, PresentationError> {
    let mut p = FreeParser { text, bytes: text.as_bytes(), pos: 0, names };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return p.err("trailing input");
    }
    Ok(e)
}

struct FreeParser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
    names: &'a [String],
}

impl FreeParser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T, PresentationError> {
        Err(PresentationError::Syntax { text: self.text.into(), pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && (self.bytes[self.pos].is_ascii_whitespace() || self.bytes[self.pos] == b'*') {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn integer(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.text[start..self.pos].parse().expect("digits"))
    }

    fn expr(&mut self) -> Result<FreeElement, PresentationError> {
        let mut acc = FreeElement::zero();
        let mut sign = Gq::one();
        if self.peek() == Some(b'-') {
            self.pos += 1;
            sign = -Gq::one();
        }
        loop {
            let t = self.term()?;
            acc = acc.add(&t.scale(&sign));
            match self.peek() {
                Some(b'+') => sign = Gq::one(),
                Some(b'-') => sign = -Gq::one(),
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<FreeElement, PresentationError> {
        let mut coeff = Gq::one();
        let numeric = matches!(self.peek(), Some(c) if c.is_ascii_digit());
        if numeric {
            let num = self.integer().expect("digit");
            let den = if self.bytes.get(self.pos) == Some(&b'/') {
                self.pos += 1;
                match self.integer() {
                    Some(d) if d != BigInt::from(0) => d,
                    _ => return self.err("bad denominator"),
                }
            } else {
                BigInt::from(1)
            };
            coeff = Gq::from_real(BigRational::new(num, den));
        }
        let mut acc = FreeElement::one();
        let mut any = false;
        while let Some(c) = self.peek() {
            if !(c.is_ascii_alphabetic() || c == b'(') {
                break;
            }
            acc = acc.mul(&self.factor()?);
            any = true;
        }
        if !any && !numeric {
            return self.err("expected a term");
        }
        Ok(acc.scale(&coeff))
    }

    fn factor(&mut self) -> Result<FreeElement, PresentationError> {
        let base = if self.peek() == Some(b'(') {
            self.pos += 1;
            let e = self.expr()?;
            if self.peek() != Some(b')') {
                return self.err("expected `)`");
            }
            self.pos += 1;
            e
        } else {
            let start = self.pos;
            while self.pos < self.bytes.len() && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            let name = &self.text[start..self.pos];
            let g = self.names.iter().position(|n| n == name).ok_or_else(|| PresentationError::UnknownGenerator(name.into()))?;
            FreeElement::generator(g)
        };
        if self.bytes.get(self.pos) == Some(&b'^') {
            self.pos += 1;
            let e = self.integer().and_then(|e| u32::try_from(e).ok());
            match e {
                Some(e) => Ok(base.pow(e)),
                None => self.err("expected exponent"),
            }
        } else {
            Ok(base)
        }
    }
}

/// Generators and ideal generators of a presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PresentationSpec {
    pub id: ExampleId,
    pub generators: Vec<String>,
    pub relations: Vec<(String, FreeElement)>,
    /// Leading relations (nilpotency, idempotency, annihilation) that every
    /// reported assignment satisfies, including partial ones.
    pub distinguished: usize,
}

const RELATIONS_EX1: &[&str] = &["a0^2", "a1^3 + a0 a1 a0 - 3 a1 a0 a1 + a0 a1^2 + a1^2 a0"];

const RELATIONS_EX2: &[&str] = &["a2^3", "a3^2 - a3", "(a3 a2)^2 a3 - 4 a3 a2^2 a3"];

const RELATIONS_EX3: &[&str] = &[
    "t1^2 - t1",
    "t4^2",
    "t4 t5",
    "t4 t1 + t4 t3 - 2 t4 - t5 t4 - t5^2",
    "t3^2 - t3 + t5 - 3 t3 t4 t3 t5 - t1 t4 - t5 t1",
    "t3 t1 - t1 - t4 - 1/2 t4 t1 + 1/2 t4 t3 + t5 t1 - 1/2 t5 t4 + 1/2 t5^2 + t3 t4 - t1 t5 - t3 t5",
    "t1 t3 - t3 + t4 + t5 - 3/2 t4 t1 + 3/2 t4 t3 - 2 t5 t1 - 3/2 t5 t4 + 3/2 t5^2 + 3 t3 t4 + t3 t5",
    "t5 t3 - t4 t1 + t4 t3 - t5 t1 - t5 t4 + t5^2",
    "t5 t1 t5 - t5^2 t1 - t5 t4",
    "t5 t4 t1 - t5^3 + t5 t1 t4 + t5^2 t1",
    "t4 t1 t5 + t4 t3 t5 - t3^3",
    "t5 t3 t4 + t5 t1 t4",
];

impl PresentationSpec {
    pub fn new(id: ExampleId, generators: &[&str], relations: &[&str], distinguished: usize) -> Result<Self, PresentationError> {
        let generators: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let relations: Vec<(String, FreeElement)> = relations
            .iter()
            .map(|r| Ok((r.to_string(), parse_free(r, &generators)?)))
            .collect::<Result<_, PresentationError>>()?;
        let distinguished = distinguished.min(relations.len());
        Ok(Self { id, generators, relations, distinguished })
    }

    pub fn catalog(id: ExampleId) -> Self {
        match id {
            ExampleId::Ex1 => Self::new(id, &["a0", "a1"], RELATIONS_EX1, 1),
            ExampleId::Ex2 => Self::new(id, &["a2", "a3"], RELATIONS_EX2, 2),
            ExampleId::Ex3 => Self::new(id, &["t1", "t3", "t4", "t5"], RELATIONS_EX3, 3),
        }
        .expect("catalog relations parse")
    }
}

/// Generator name → matrix polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorAssignment {
    pub var: Var,
    pub n: usize,
    pub values: BTreeMap<String, MatPoly>,
}

/// File form of an assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssignmentDoc {
    pub n: usize,
    pub variable: Var,
    pub generators: BTreeMap<String, Grid>,
}

impl GeneratorAssignment {
    pub fn new(var: Var, n: usize) -> Self {
        Self { var, n, values: BTreeMap::new() }
    }

    pub fn with(mut self, name: &str, p: MatPoly) -> Self {
        self.values.insert(name.to_string(), p);
        self
    }

    pub fn to_doc(&self) -> AssignmentDoc {
        AssignmentDoc {
            n: self.n,
            variable: self.var,
            generators: self.values.iter().map(|(k, v)| (k.clone(), v.to_grid())).collect(),
        }
    }

    pub fn from_doc(doc: &AssignmentDoc) -> Result<Self, PresentationError> {
        let mut out = Self::new(doc.variable, doc.n);
        for (name, grid) in &doc.generators {
            let m = MatPoly::from_grid(doc.variable, grid).map_err(|msg| PresentationError::Assignment(format!("{name}: {msg}")))?;
            if m.n() != doc.n {
                return Err(PresentationError::Assignment(format!("{name}: expected a {0}x{0} grid", doc.n)));
            }
            out.values.insert(name.clone(), m);
        }
        Ok(out)
    }
}

fn eval_ordered(e: &FreeElement, gens: &[MatPoly], var: Var, n: usize) -> MatPoly {
    let mut acc = MatPoly::zero(var, n);
    for (w, c) in e.terms() {
        let mut prod = MatPoly::identity(var, n);
        for &g in w {
            prod = prod.mul(&gens[g]).expect("same ring");
        }
        acc = acc.add(&prod.scale(c)).expect("same ring");
    }
    acc
}

/// Image of `e` under the assignment; the unit word maps to `I`.
pub fn eval_element(e: &FreeElement, names: &[String], a: &GeneratorAssignment) -> Result<MatPoly, PresentationError> {
    if let Some(g) = e.max_generator() {
        if g >= names.len() {
            return Err(PresentationError::UnknownGenerator(format!("#{g}")));
        }
    }
    let used: Vec<String> = names.to_vec();
    let gens: Vec<MatPoly> = used
        .iter()
        .enumerate()
        .map(|(k, n)| match a.values.get(n) {
            Some(p) => Ok(p.clone()),
            None if e.terms().keys().any(|w| w.contains(&k)) => Err(PresentationError::Unassigned(n.clone())),
            None => Ok(MatPoly::zero(a.var, a.n)),
        })
        .collect::<Result<_, _>>()?;
    Ok(eval_ordered(e, &gens, a.var, a.n))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationResult {
    pub relation: String,
    pub zero: bool,
    pub residual: Grid,
}

/// Evaluates every ideal generator; `zero` marks relations that hold.
pub fn check_relations(spec: &PresentationSpec, a: &GeneratorAssignment) -> Result<Vec<RelationResult>, PresentationError> {
    spec.relations
        .iter()
        .map(|(text, r)| {
            let v = eval_element(r, &spec.generators, a)?;
            Ok(RelationResult { relation: text.clone(), zero: v.is_zero(), residual: v.to_grid() })
        })
        .collect()
}

/// Span of all products of the generators and the unit, truncated at
/// degree `d`.
pub fn generated_slice(gens: &[MatPoly], var: Var, n: usize, d: usize) -> AlgebraSlice {
    let ncols = (d + 1) * n * n;
    let mut span = Echelon::new(ncols);
    let one = MatPoly::identity(var, n);
    span.insert(one.coords(d));
    let gens: Vec<MatPoly> = gens.iter().map(|g| g.truncate(d)).collect();
    let mut queue = VecDeque::from([one]);
    while let Some(e) = queue.pop_front() {
        for g in &gens {
            let p = e.mul_trunc(g, d).expect("same ring");
            if span.insert(p.coords(d)) {
                queue.push_back(p);
            }
        }
    }
    AlgebraSlice::from_spanning(var, n, d, span.rref())
}

pub fn generated_slice_of(a: &GeneratorAssignment, d: usize) -> AlgebraSlice {
    let gens: Vec<MatPoly> = a.values.values().cloned().collect();
    generated_slice(&gens, a.var, a.n, d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Surjectivity {
    pub degree: usize,
    pub equal: bool,
    pub generated_dims: Vec<usize>,
    pub target_dims: Vec<usize>,
    /// A target element outside the generated span.
    pub missing: Option<Grid>,
}

/// Compares the generated truncated algebra with the target slice.
pub fn surjectivity_check(gamma: &Gamma, a: &GeneratorAssignment, d: usize) -> Surjectivity {
    let generated = generated_slice_of(a, d);
    let target = gamma.slice(d);
    let missing = target.basis().into_iter().find(|p| !generated.contains(p)).map(|p| p.to_grid());
    Surjectivity {
        degree: d,
        equal: generated == target,
        generated_dims: generated.dimension_profile(),
        target_dims: target.dimension_profile(),
        missing,
    }
}

/// Members built from small parameter values: at most `support` nonzero
/// parameters of degree ≤ `d`, each drawn from `{±1, ±2}`, in a fixed order.
pub fn candidates(gamma: &Gamma, d: usize, support: usize) -> Vec<MatPoly> {
    const VALUES: [i64; 4] = [-2, -1, 1, 2];
    let params = gamma.parameters(d);
    let r = params.len();
    let mut out = Vec::new();
    let mut subsets: Vec<Vec<usize>> = vec![Vec::new()];
    for size in 1..=support.min(r) {
        let mut next = Vec::new();
        for s in &subsets {
            let start = s.last().map_or(0, |&l| l + 1);
            for k in start..r {
                let mut t = s.clone();
                t.push(k);
                next.push(t);
            }
        }
        subsets = next;
        for s in &subsets {
            for code in 0..VALUES.len().pow(size as u32) {
                let mut c = code;
                let values: Vec<(Coord, Gq)> = s
                    .iter()
                    .map(|&k| {
                        let v = Gq::from_int(VALUES[c % VALUES.len()]);
                        c /= VALUES.len();
                        (params[k], v)
                    })
                    .collect();
                out.push(gamma.member(&values));
            }
        }
    }
    out
}

/// Search limits for [`find_generators`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOptions {
    /// Largest degree of a nonzero candidate parameter.
    pub d_search: usize,
    /// Nonzero parameters per candidate.
    pub support: usize,
    /// Degree of the surjectivity check.
    pub check_degree: usize,
    /// Stop after this many survivors.
    pub max_survivors: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { d_search: 2, support: 2, check_degree: 4, max_survivors: 16 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub search_order: Vec<String>,
    pub candidates_per_generator: usize,
    pub relation_survivors: usize,
    pub survivors: Vec<AssignmentDoc>,
    pub truncated: bool,
    /// Filled only when there are no survivors: surjective assignments
    /// satisfying the distinguished relations, most relations first.
    pub partial: Vec<PartialAssignment>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartialAssignment {
    pub assignment: AssignmentDoc,
    pub satisfied: usize,
    pub relations: Vec<RelationResult>,
}

/// Generator order for the backtracking search: greedily pick the generator
/// that completes the most relations, ties broken by catalog order.
pub fn search_order(spec: &PresentationSpec) -> Vec<usize> {
    let used: Vec<Vec<usize>> = spec
        .relations
        .iter()
        .map(|(_, r)| {
            let mut g: Vec<usize> = r.terms().keys().flatten().copied().collect();
            g.sort_unstable();
            g.dedup();
            g
        })
        .collect();
    let mut order: Vec<usize> = Vec::new();
    let mut done = vec![false; used.len()];
    while order.len() < spec.generators.len() {
        let best = (0..spec.generators.len())
            .filter(|g| !order.contains(g))
            .max_by_key(|&g| {
                let completed = used
                    .iter()
                    .zip(&done)
                    .filter(|(u, d)| !**d && u.iter().all(|x| *x == g || order.contains(x)))
                    .count();
                (completed, std::cmp::Reverse(g))
            })
            .expect("unassigned generator left");
        order.push(best);
        for (u, d) in used.iter().zip(done.iter_mut()) {
            *d = u.iter().all(|x| order.contains(x));
        }
    }
    order
}

/// Backtracking search over candidate generators. Generators are assigned
/// in [`search_order`] and every relation is checked as soon as all of its
/// generators are assigned; full assignments must then pass the
/// surjectivity check. Parallel over the first generator; results keep
/// enumeration order.
pub fn find_generators(spec: &PresentationSpec, gamma: &Gamma, opts: &SearchOptions) -> Result<SearchReport, PresentationError> {
    let pool = candidates(gamma, opts.d_search, opts.support);
    let order = search_order(spec);
    let (var, n) = (gamma.var, gamma.n);
    let all: Vec<usize> = (0..spec.relations.len()).collect();
    let tuples = enumerate(spec, &pool, &order, &all, var, n);
    let relation_survivors = tuples.len();

    let assign = |t: &[usize]| {
        let mut a = GeneratorAssignment::new(var, n);
        for (&g, &c) in order.iter().zip(t) {
            a.values.insert(spec.generators[g].clone(), pool[c].clone());
        }
        a
    };
    let (hits, truncated) = first_surjective(gamma, opts, tuples.iter().map(|t| t.as_slice()), &assign);
    let survivors: Vec<AssignmentDoc> = hits.iter().map(|a| a.to_doc()).collect();

    let mut partial = Vec::new();
    if survivors.is_empty() {
        let required: Vec<usize> = (0..spec.distinguished).collect();
        let screen = Screening::new(spec, &pool, n);
        let mut ranked: Vec<(usize, Vec<usize>)> = enumerate(spec, &pool, &order, &required, var, n)
            .into_par_iter()
            .map(|t| {
                let mut idx = vec![0; spec.generators.len()];
                for (&g, &c) in order.iter().zip(&t) {
                    idx[g] = c;
                }
                let ok = (0..spec.relations.len()).filter(|&r| screen.may_vanish(r, &idx)).count();
                (ok, t)
            })
            .collect();
        ranked.sort_by_key(|r| std::cmp::Reverse(r.0));
        let (hits, _) = first_surjective(gamma, opts, ranked.iter().map(|(_, t)| t.as_slice()), &assign);
        for a in hits {
            let relations = check_relations(spec, &a)?;
            let satisfied = relations.iter().filter(|r| r.zero).count();
            partial.push(PartialAssignment { assignment: a.to_doc(), satisfied, relations });
        }
    }
    if survivors.is_empty() && partial.is_empty() {
        return Err(PresentationError::NoCandidate);
    }
    Ok(SearchReport {
        search_order: order.iter().map(|&g| spec.generators[g].clone()).collect(),
        candidates_per_generator: pool.len(),
        relation_survivors,
        survivors,
        truncated,
        partial,
    })
}

/// All candidate tuples (indexed in search order) satisfying the relations
/// in `active`, each checked as soon as its generators are assigned.
fn enumerate(spec: &PresentationSpec, pool: &[MatPoly], order: &[usize], active: &[usize], var: Var, n: usize) -> Vec<Vec<usize>> {
    let k = order.len();
    // stage[i]: relations completed once order[..=i] is assigned
    let mut stage: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut seen = vec![false; spec.relations.len()];
    for i in 0..k {
        for &r in active {
            if !seen[r] && spec.relations[r].1.terms().keys().flatten().all(|g| order[..=i].contains(g)) {
                seen[r] = true;
                stage[i].push(r);
            }
        }
    }
    let screen = Screening::new(spec, pool, n);
    let ctx = SearchCtx { pool, order, stage: &stage, spec, var, n, screen: &screen };
    (0..pool.len())
        .into_par_iter()
        .flat_map_iter(|first| {
            let mut out = Vec::new();
            ctx.extend(&mut vec![first], &mut out);
            out
        })
        .collect()
}

/// Surjective assignments among `tuples`, in order, at most
/// `opts.max_survivors`; the flag reports an early stop.
fn first_surjective<'t>(
    gamma: &Gamma,
    opts: &SearchOptions,
    tuples: impl Iterator<Item = &'t [usize]>,
    assign: &(dyn Fn(&[usize]) -> GeneratorAssignment + Sync),
) -> (Vec<GeneratorAssignment>, bool) {
    let tuples: Vec<&[usize]> = tuples.collect();
    let mut out = Vec::new();
    for chunk in tuples.chunks(64) {
        let ok: Vec<bool> = chunk.par_iter().map(|t| surjectivity_check(gamma, &assign(t), opts.check_degree).equal).collect();
        for (t, good) in chunk.iter().zip(ok) {
            if good {
                if out.len() == opts.max_survivors {
                    return (out, true);
                }
                out.push(assign(t));
            }
        }
    }
    (out, false)
}

struct SearchCtx<'a> {
    pool: &'a [MatPoly],
    order: &'a [usize],
    stage: &'a [Vec<usize>],
    spec: &'a PresentationSpec,
    var: Var,
    n: usize,
    screen: &'a Screening,
}

/// Candidate pool evaluated modulo a prime, for quick rejection.
struct Screening {
    screen: Screen,
    pool: Vec<Option<Evaluated>>,
    relations: Vec<FreeElement>,
}

impl Screening {
    fn new(spec: &PresentationSpec, pool: &[MatPoly], n: usize) -> Self {
        let deg = pool.iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        let len = spec.relations.iter().flat_map(|(_, r)| r.terms().keys().map(|w| w.len())).max().unwrap_or(0);
        let screen = Screen::new(n, deg * len);
        let pool = pool.iter().map(|p| screen.evaluate(p)).collect();
        Self { screen, pool, relations: spec.relations.iter().map(|(_, r)| r.clone()).collect() }
    }

    /// False only when relation `r` is certainly nonzero at the candidates
    /// `idx` (one pool index per generator).
    fn may_vanish(&self, r: usize, idx: &[usize]) -> bool {
        let gens: Option<Vec<&Evaluated>> = idx.iter().map(|&c| self.pool[c].as_ref()).collect();
        match gens {
            Some(g) => self.screen.vanishes(&self.relations[r], &g).unwrap_or(true),
            None => true,
        }
    }
}

impl SearchCtx<'_> {
    /// Checks the relations completed by the last chosen candidate, then
    /// recurses over the next generator.
    fn extend(&self, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let i = chosen.len() - 1;
        let mut gens = vec![MatPoly::zero(self.var, self.n); self.spec.generators.len()];
        for (&g, &c) in self.order.iter().zip(chosen.iter()) {
            gens[g] = self.pool[c].clone();
        }
        let mut idx = vec![0; self.spec.generators.len()];
        for (&g, &c) in self.order.iter().zip(chosen.iter()) {
            idx[g] = c;
        }
        if !self.stage[i].iter().all(|&r| self.screen.may_vanish(r, &idx)) {
            return;
        }
        if !self.stage[i].iter().all(|&r| eval_ordered(&self.spec.relations[r].1, &gens, self.var, self.n).is_zero()) {
            return;
        }
        if chosen.len() == self.order.len() {
            out.push(chosen.clone());
            return;
        }
        for c in 0..self.pool.len() {
            chosen.push(c);
            self.extend(chosen, out);
            chosen.pop();
        }
    }
}

impl fmt::Display for FreeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (0..=self.max_generator().unwrap_or(0)).map(|g| format!("g{g}")).collect();
        f.write_str(&self.render(&names))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matpoly::ConstMat;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_and_render() {
        let n = names(&["a0", "a1"]);
        let e = parse_free("a1^3 + a0 a1 a0 - 3 a1 a0 a1", &n).unwrap();
        assert_eq!(e.terms().len(), 3);
        assert_eq!(e.terms()[&vec![1, 0, 1]], Gq::from_int(-3));
        assert_eq!(parse_free(&e.render(&n), &n).unwrap(), e);
        let p = parse_free("(a1 a0)^2 a1", &n).unwrap();
        assert_eq!(p, FreeElement::word(vec![1, 0, 1, 0, 1]));
        let h = parse_free("1/2 a0 - 3/2 a1", &n).unwrap();
        assert_eq!(h.terms()[&vec![0]], "1/2".parse().unwrap());
        assert!(matches!(parse_free("b0", &n), Err(PresentationError::UnknownGenerator(_))));
        assert!(matches!(parse_free("a0 +", &n), Err(PresentationError::Syntax { .. })));
    }

    #[test]
    fn catalog_parses() {
        assert_eq!(PresentationSpec::catalog(ExampleId::Ex1).relations.len(), 2);
        assert_eq!(PresentationSpec::catalog(ExampleId::Ex2).relations.len(), 3);
        assert_eq!(PresentationSpec::catalog(ExampleId::Ex3).relations.len(), 12);
    }

    #[test]
    fn evaluation_basics() {
        let n = names(&["g"]);
        let a = GeneratorAssignment::new(Var::X, 2).with("g", MatPoly::new(Var::X, 2, vec![ConstMat::unit(2, 0, 1)]));
        assert_eq!(eval_element(&FreeElement::one(), &n, &a).unwrap(), MatPoly::identity(Var::X, 2));
        assert!(eval_element(&parse_free("g^2", &n).unwrap(), &n, &a).unwrap().is_zero());
        let empty = GeneratorAssignment::new(Var::X, 2);
        assert_eq!(
            eval_element(&parse_free("g", &n).unwrap(), &n, &empty),
            Err(PresentationError::Unassigned("g".into()))
        );
    }

    #[test]
    fn generated_slices() {
        let one = MatPoly::identity(Var::X, 2);
        assert_eq!(generated_slice(&[one], Var::X, 2, 2).dim(), 1);
        let g = MatPoly::monomial(Var::X, ConstMat::unit(2, 0, 0), 1);
        let s = generated_slice(&[g], Var::X, 2, 2);
        assert_eq!(s.dim(), 3);
        assert!(s.contains(&MatPoly::monomial(Var::X, ConstMat::unit(2, 0, 0), 2)));
    }

    #[test]
    fn search_order_front_loads_relations() {
        let spec = PresentationSpec::catalog(ExampleId::Ex3);
        let order: Vec<&str> = search_order(&spec).iter().map(|&g| spec.generators[g].as_str()).collect();
        assert_eq!(order, ["t1", "t4", "t5", "t3"]);
    }
}
