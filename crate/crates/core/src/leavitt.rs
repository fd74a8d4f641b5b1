//! Leavitt path algebra generators inside the Steinberg algebra.
//!
//! Words over `p(v)`, `s(e)` and `st(e)` (the ghost edge `s_{e*}`) are
//! evaluated through the homomorphism
//! `p_v ↦ 1_{Z(v,v)}`, `s_e ↦ 1_{Z(e,s(e))}`, `s_{e*} ↦ 1_{Z(s(e),e)}`.
//!
//! Word syntax:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := '-' factor | INT | 'p(' id ')' | 's(' id ')' | 'st(' id ')' | '(' expr ')'
//! ```
//!
//! An integer `c` on its own denotes `c` times the unit `Σ_v p_v`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use thiserror::Error;

use crate::cylinder::{BasicBisection, PathPair};
use crate::graph::{EdgeId, Graph, Path, VertexId};
use crate::ring::CoefficientRing;
use crate::steinberg::SteinbergElement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("unknown vertex `{0}` in word")]
    UnknownVertex(String),
    #[error("unknown edge `{0}` in word")]
    UnknownEdge(String),
}

/// A formal expression in the Leavitt generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeavittWord {
    Scalar(BigInt),
    Vertex(String),
    Edge(String),
    Ghost(String),
    Sum(Vec<LeavittWord>),
    Product(Vec<LeavittWord>),
    Neg(Box<LeavittWord>),
}

/// A resolved generator symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Vertex(VertexId),
    Edge(EdgeId),
    Ghost(EdgeId),
}

impl LeavittWord {
    pub fn parse(text: &str) -> Result<Self, WordError> {
        let mut p = Parser { src: text, pos: 0 };
        let w = p.expr()?;
        p.skip_ws();
        if p.pos != text.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(w)
    }

    pub fn vertex(g: &Graph, v: VertexId) -> Self {
        Self::Vertex(g.vertex_name(v).to_string())
    }

    /// `t_μ`: `p_v` for a vertex, else the product of its edge generators.
    pub fn path(g: &Graph, mu: &Path) -> Self {
        if mu.is_vertex() {
            return Self::vertex(g, mu.range());
        }
        let factors: Vec<_> = mu
            .edges()
            .iter()
            .map(|&e| Self::Edge(g.edge_name(e).to_string()))
            .collect();
        Self::product(factors)
    }

    /// `t_{ν*}`: ghost edges in reverse order.
    pub fn ghost_path(g: &Graph, nu: &Path) -> Self {
        if nu.is_vertex() {
            return Self::vertex(g, nu.range());
        }
        let factors: Vec<_> = nu
            .edges()
            .iter()
            .rev()
            .map(|&e| Self::Ghost(g.edge_name(e).to_string()))
            .collect();
        Self::product(factors)
    }

    fn product(mut factors: Vec<LeavittWord>) -> Self {
        if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Self::Product(factors)
        }
    }

    /// Count of (edge, ghost) symbols; only meaningful for monomials.
    pub fn edge_counts(&self) -> (usize, usize) {
        match self {
            Self::Scalar(_) | Self::Vertex(_) => (0, 0),
            Self::Edge(_) => (1, 0),
            Self::Ghost(_) => (0, 1),
            Self::Neg(w) => w.edge_counts(),
            Self::Sum(ws) | Self::Product(ws) => ws.iter().fold((0, 0), |(a, b), w| {
                let (c, d) = w.edge_counts();
                (a + c, b + d)
            }),
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Self::Scalar(c) if c.sign() == num_bigint::Sign::Minus && prec > 0 => write!(f, "({c})"),
            Self::Scalar(c) => write!(f, "{c}"),
            Self::Vertex(v) => write!(f, "p({v})"),
            Self::Edge(e) => write!(f, "s({e})"),
            Self::Ghost(e) => write!(f, "st({e})"),
            Self::Neg(w) => {
                write!(f, "-")?;
                w.fmt_prec(f, 2)
            }
            Self::Sum(ws) => {
                if prec > 0 {
                    write!(f, "(")?;
                }
                for (i, w) in ws.iter().enumerate() {
                    match (i, w) {
                        (0, _) => w.fmt_prec(f, 0)?,
                        (_, Self::Neg(inner)) => {
                            write!(f, " - ")?;
                            inner.fmt_prec(f, 1)?;
                        }
                        _ => {
                            write!(f, " + ")?;
                            w.fmt_prec(f, 1)?;
                        }
                    }
                }
                if prec > 0 {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Self::Product(ws) => {
                for (i, w) in ws.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    w.fmt_prec(f, 2)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for LeavittWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> WordError {
        WordError::Syntax {
            pos: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.rest().starts_with(char::is_whitespace) {
            self.pos += self.rest().chars().next().unwrap().len_utf8();
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LeavittWord, WordError> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat("+") {
                terms.push(self.term()?);
            } else if self.eat("-") {
                terms.push(LeavittWord::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            LeavittWord::Sum(terms)
        })
    }

    fn term(&mut self) -> Result<LeavittWord, WordError> {
        let mut factors = vec![self.factor()?];
        while self.eat("*") {
            factors.push(self.factor()?);
        }
        Ok(LeavittWord::product(factors))
    }

    fn factor(&mut self) -> Result<LeavittWord, WordError> {
        self.skip_ws();
        if self.eat("-") {
            return Ok(LeavittWord::Neg(Box::new(self.factor()?)));
        }
        if self.eat("(") {
            let inner = self.expr()?;
            if !self.eat(")") {
                return Err(self.error("expected `)`"));
            }
            return Ok(inner);
        }
        let digits = self.rest().chars().take_while(char::is_ascii_digit).count();
        if digits > 0 {
            let n: BigInt = self.rest()[..digits].parse().expect("ascii digits");
            self.pos += digits;
            return Ok(LeavittWord::Scalar(n));
        }
        for (head, make) in [
            ("st(", LeavittWord::Ghost as fn(String) -> LeavittWord),
            ("s(", LeavittWord::Edge),
            ("p(", LeavittWord::Vertex),
        ] {
            if self.eat(head) {
                self.skip_ws();
                let len = self.rest().find(')').ok_or_else(|| self.error("expected `)`"))?;
                let id = self.rest()[..len].trim().to_string();
                if id.is_empty() {
                    return Err(self.error("empty symbol id"));
                }
                self.pos += len + 1;
                return Ok(make(id));
            }
        }
        Err(self.error("expected a scalar, p(..), s(..), st(..) or `(`"))
    }
}

/// The image of one generator.
pub fn generator<R: CoefficientRing>(graph: &Arc<Graph>, ring: &R, sym: Generator) -> SteinbergElement<R> {
    let g = graph.as_ref();
    let pair = match sym {
        Generator::Vertex(v) => PathPair::vertex(v),
        Generator::Edge(e) => edge_pair(g, e),
        Generator::Ghost(e) => edge_pair(g, e).inverse(),
    };
    SteinbergElement::pair_indicator(graph.clone(), ring.clone(), pair)
}

fn edge_pair(g: &Graph, e: EdgeId) -> PathPair {
    PathPair::new(g, Path::edge(g, e), Path::vertex(g.source(e))).expect("s(e) is shared")
}

/// Evaluates a word in the Steinberg algebra.
pub fn eval_word<R: CoefficientRing>(
    graph: &Arc<Graph>,
    ring: &R,
    word: &LeavittWord,
) -> Result<SteinbergElement<R>, WordError> {
    let g = graph.as_ref();
    let gen = |sym| generator(graph, ring, sym);
    let mismatch = "operands share the graph and ring";
    Ok(match word {
        LeavittWord::Scalar(c) => SteinbergElement::unit(graph.clone(), ring.clone()).scale(&ring.from_integer(c)),
        LeavittWord::Vertex(v) => gen(Generator::Vertex(
            g.vertex_id(v).map_err(|_| WordError::UnknownVertex(v.clone()))?,
        )),
        LeavittWord::Edge(e) => gen(Generator::Edge(
            g.edge_id(e).map_err(|_| WordError::UnknownEdge(e.clone()))?,
        )),
        LeavittWord::Ghost(e) => gen(Generator::Ghost(
            g.edge_id(e).map_err(|_| WordError::UnknownEdge(e.clone()))?,
        )),
        LeavittWord::Neg(w) => eval_word(graph, ring, w)?.neg(),
        LeavittWord::Sum(ws) => {
            let mut acc = SteinbergElement::zero(graph.clone(), ring.clone());
            for w in ws {
                acc = acc.add(&eval_word(graph, ring, w)?).expect(mismatch);
            }
            acc
        }
        LeavittWord::Product(ws) => {
            let mut acc = SteinbergElement::unit(graph.clone(), ring.clone());
            for w in ws {
                acc = acc.convolve(&eval_word(graph, ring, w)?).expect(mismatch);
            }
            acc
        }
    })
}

/// `t_μ t_{ν*} - Σ_{α∈F} t_{μα} t_{(να)*}`, or `p_v` when `μ = ν = v` and
/// nothing is excluded.
pub fn indicator_as_word(g: &Graph, b: &BasicBisection) -> LeavittWord {
    let monomial = |mu: &Path, nu: &Path| {
        if mu.is_vertex() && nu.is_vertex() {
            LeavittWord::vertex(g, mu.range())
        } else if nu.is_vertex() {
            LeavittWord::path(g, mu)
        } else if mu.is_vertex() {
            LeavittWord::ghost_path(g, nu)
        } else {
            let mut f = match LeavittWord::path(g, mu) {
                LeavittWord::Product(fs) => fs,
                single => vec![single],
            };
            match LeavittWord::ghost_path(g, nu) {
                LeavittWord::Product(fs) => f.extend(fs),
                single => f.push(single),
            }
            LeavittWord::Product(f)
        }
    };
    let (mu, nu) = (b.pair().mu(), b.pair().nu());
    let lead = monomial(mu, nu);
    if b.excluded().is_empty() {
        return lead;
    }
    let mut terms = vec![lead];
    for a in b.excluded() {
        let ma = mu.concat(a).expect("α starts at s(μ)");
        let na = nu.concat(a).expect("α starts at s(ν)");
        terms.push(LeavittWord::Neg(Box::new(monomial(&ma, &na))));
    }
    LeavittWord::Sum(terms)
}

/// Which Cuntz–Krieger family a relation instance belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum RelationFamily {
    /// `p_v p_w = δ_{v,w} p_v`
    Idempotents,
    /// `p_{r(e)} s_e = s_e = s_e p_{s(e)}` and adjoints
    EdgeEndpoints,
    /// `s_{e*} s_f = δ_{e,f} p_{s(e)}`
    GhostEdges,
    /// `p_v = Σ_{r(e)=v} s_e s_{e*}` at non-sources
    VertexSums,
}

impl RelationFamily {
    pub fn label(self) -> &'static str {
        match self {
            Self::Idempotents => "a",
            Self::EdgeEndpoints => "b",
            Self::GhostEdges => "c",
            Self::VertexSums => "d",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationCheck {
    pub family: RelationFamily,
    pub relation: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub checks: Vec<RelationCheck>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn count(&self, family: RelationFamily) -> usize {
        self.checks.iter().filter(|c| c.family == family).count()
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationCheck> {
        self.checks.iter().filter(|c| !c.holds)
    }
}

/// Verifies every instance of the four relation families with exact equality.
pub fn check_ck_relations<R: CoefficientRing>(graph: &Arc<Graph>, ring: &R) -> RelationReport {
    let g = graph.as_ref();
    let p = |v| generator(graph, ring, Generator::Vertex(v));
    let s = |e| generator(graph, ring, Generator::Edge(e));
    let st = |e| generator(graph, ring, Generator::Ghost(e));
    let mul = |a: &SteinbergElement<R>, b: &SteinbergElement<R>| a.convolve(b).expect("same graph and ring");
    let zero = SteinbergElement::zero(graph.clone(), ring.clone());
    let vn = |v| g.vertex_name(v);
    let en = |e| g.edge_name(e);
    let mut checks = Vec::new();
    let mut push = |family, relation: String, holds| {
        checks.push(RelationCheck {
            family,
            relation,
            holds,
        })
    };

    for v in g.vertices() {
        for w in g.vertices() {
            let expected = if v == w { p(v) } else { zero.clone() };
            let rhs = if v == w { format!("p({})", vn(v)) } else { "0".into() };
            push(
                RelationFamily::Idempotents,
                format!("p({})*p({}) = {rhs}", vn(v), vn(w)),
                mul(&p(v), &p(w)) == expected,
            );
        }
    }
    for e in g.edges() {
        let (r, src) = (g.range(e), g.source(e));
        let (se, ste) = (s(e), st(e));
        let rows = [
            (
                format!("p({})*s({}) = s({})", vn(r), en(e), en(e)),
                mul(&p(r), &se) == se,
            ),
            (
                format!("s({})*p({}) = s({})", en(e), vn(src), en(e)),
                mul(&se, &p(src)) == se,
            ),
            (
                format!("p({})*st({}) = st({})", vn(src), en(e), en(e)),
                mul(&p(src), &ste) == ste,
            ),
            (
                format!("st({})*p({}) = st({})", en(e), vn(r), en(e)),
                mul(&ste, &p(r)) == ste,
            ),
        ];
        for (rel, ok) in rows {
            push(RelationFamily::EdgeEndpoints, rel, ok);
        }
    }
    for e in g.edges() {
        for f in g.edges() {
            let expected = if e == f { p(g.source(e)) } else { zero.clone() };
            let rhs = if e == f {
                format!("p({})", vn(g.source(e)))
            } else {
                "0".into()
            };
            push(
                RelationFamily::GhostEdges,
                format!("st({})*s({}) = {rhs}", en(e), en(f)),
                mul(&st(e), &s(f)) == expected,
            );
        }
    }
    for v in g.vertices().filter(|&v| !g.is_source(v)) {
        let mut sum = zero.clone();
        let mut parts = Vec::new();
        for &e in g.edges_with_range(v) {
            sum = sum.add(&mul(&s(e), &st(e))).expect("same graph and ring");
            parts.push(format!("s({0})*st({0})", en(e)));
        }
        push(
            RelationFamily::VertexSums,
            format!("p({}) = {}", vn(v), parts.join(" + ")),
            sum == p(v),
        );
    }
    RelationReport { checks }
}
