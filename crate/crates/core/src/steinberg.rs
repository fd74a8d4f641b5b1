//! Steinberg algebra elements: finitely supported ring-valued functions on the
//! graph groupoid, written as combinations of indicators `1_{Z(μ,ν)}`.
//!
//! Every element is kept in a canonical form that depends only on the
//! function it denotes, so structural equality is function equality:
//!
//! 1. expand all terms to the largest min-depth `D` and sum coefficients;
//! 2. repeatedly replace a complete sibling set `{(μe,νe) : r(e) = s(μ)}`
//!    carrying one coefficient by its parent `(μ,ν)`;
//! 3. expand again to the largest surviving min-depth.
//!
//! Contractions act on disjoint sibling sets, so step 2 has a unique normal
//! form; the step 1 cell decomposition is unique too, which makes the whole
//! pipeline a function of the denoted function alone.

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::cylinder::{BasicBisection, GroupoidProbe, PathPair};
use crate::graph::Graph;
use crate::ring::CoefficientRing;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("operands live over different graphs")]
    GraphMismatch,
    #[error("operands use different coefficient rings ({0} vs {1})")]
    RingMismatch(String, String),
}

/// A finite `R`-combination of pair indicators in canonical form.
#[derive(Clone, Debug)]
pub struct SteinbergElement<R: CoefficientRing> {
    graph: Arc<Graph>,
    ring: R,
    terms: BTreeMap<PathPair, R::Elem>,
}

impl<R: CoefficientRing> PartialEq for SteinbergElement<R> {
    fn eq(&self, other: &Self) -> bool {
        same_graph(&self.graph, &other.graph) && self.ring == other.ring && self.terms == other.terms
    }
}

impl<R: CoefficientRing> Eq for SteinbergElement<R> {}

fn same_graph(a: &Arc<Graph>, b: &Arc<Graph>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// The degree-wise pieces of an element; they sum back to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedDecomposition<R: CoefficientRing> {
    pub components: BTreeMap<i64, SteinbergElement<R>>,
}

impl<R: CoefficientRing> SteinbergElement<R> {
    pub fn zero(graph: Arc<Graph>, ring: R) -> Self {
        Self {
            graph,
            ring,
            terms: BTreeMap::new(),
        }
    }

    /// `Σ_v 1_{Z(v,v)}`, the unit of the algebra of a finite graph.
    pub fn unit(graph: Arc<Graph>, ring: R) -> Self {
        let one = ring.one();
        let terms = graph.vertices().map(|v| (PathPair::vertex(v), one.clone())).collect();
        Self::from_terms(graph, ring, terms)
    }

    /// Canonical form of `Σ c_i 1_{Z(pair_i)}`.
    pub fn from_terms(graph: Arc<Graph>, ring: R, terms: Vec<(PathPair, R::Elem)>) -> Self {
        let terms = canonicalize(&graph, &ring, terms);
        Self { graph, ring, terms }
    }

    pub fn pair_indicator(graph: Arc<Graph>, ring: R, pair: PathPair) -> Self {
        let one = ring.one();
        Self::from_terms(graph, ring, vec![(pair, one)])
    }

    /// `1_{Z((μ,ν)∖F)} = 1_{Z(μ,ν)} - Σ_{α∈F} 1_{Z(μα,να)}`; prefix-reduced
    /// `F` keeps the subtracted pieces disjoint.
    pub fn indicator(graph: Arc<Graph>, ring: R, b: &BasicBisection) -> Self {
        let terms = indicator_terms(&ring, b);
        Self::from_terms(graph, ring, terms)
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<PathPair, R::Elem> {
        &self.terms
    }

    pub fn term_list(&self) -> Vec<(PathPair, R::Elem)> {
        self.terms.iter().map(|(p, c)| (p.clone(), c.clone())).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if !same_graph(&self.graph, &other.graph) {
            return Err(AlgebraError::GraphMismatch);
        }
        if self.ring != other.ring {
            return Err(AlgebraError::RingMismatch(self.ring.name(), other.ring.name()));
        }
        Ok(())
    }

    fn rebuild(&self, terms: Vec<(PathPair, R::Elem)>) -> Self {
        Self::from_terms(self.graph.clone(), self.ring.clone(), terms)
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut terms = self.term_list();
        terms.extend(other.term_list());
        Ok(self.rebuild(terms))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let terms = self.terms.iter().map(|(p, c)| (p.clone(), self.ring.neg(c))).collect();
        Self {
            graph: self.graph.clone(),
            ring: self.ring.clone(),
            terms,
        }
    }

    pub fn scale(&self, c: &R::Elem) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(p, a)| (p.clone(), self.ring.mul(c, a)))
            .collect();
        self.rebuild(terms)
    }

    /// The convolution product `(f*g)(γ) = Σ_{αβ=γ} f(α)g(β)`.
    pub fn convolve(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut terms = Vec::new();
        for (p, a) in &self.terms {
            for (q, b) in &other.terms {
                if let Some(pq) = p.compose(q) {
                    terms.push((pq, self.ring.mul(a, b)));
                }
            }
        }
        Ok(self.rebuild(terms))
    }

    /// The value at a groupoid point.
    pub fn evaluate(&self, probe: &GroupoidProbe) -> R::Elem {
        evaluate_terms(&self.graph, &self.ring, self.terms.iter(), probe)
    }

    pub fn graded_component(&self, k: i64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(p, _)| p.degree() == k)
            .map(|(p, c)| (p.clone(), c.clone()))
            .collect();
        self.rebuild(terms)
    }

    /// Splits by degree; expansion and contraction preserve degree, so the
    /// canonical terms of degree `k` denote the `k`-th component.
    pub fn grade(&self) -> GradedDecomposition<R> {
        let mut components = BTreeMap::new();
        for k in self.terms.keys().map(PathPair::degree) {
            components.entry(k).or_insert_with(|| self.graded_component(k));
        }
        GradedDecomposition { components }
    }

    /// Maximal min-depth of the canonical terms.
    pub fn depth(&self) -> usize {
        self.terms.keys().map(PathPair::min_depth).max().unwrap_or(0)
    }

    /// Maximal `|degree|` of the canonical terms.
    pub fn max_abs_degree(&self) -> usize {
        self.terms
            .keys()
            .map(|p| p.degree().unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// `c·Z(mu,nu) + ...`, or `0`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(p, c)| format!("{}*{}", self.ring.format(c), p.render(&self.graph)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl<R: CoefficientRing> GradedDecomposition<R> {
    pub fn degrees(&self) -> impl Iterator<Item = i64> + '_ {
        self.components.keys().copied()
    }
}

pub(crate) fn indicator_terms<R: CoefficientRing>(ring: &R, b: &BasicBisection) -> Vec<(PathPair, R::Elem)> {
    let p = b.pair();
    let mut terms = vec![(p.clone(), ring.one())];
    for a in b.excluded() {
        let hole = PathPair::new_unchecked(
            p.mu().concat(a).expect("α starts at s(μ)"),
            p.nu().concat(a).expect("α starts at s(ν)"),
        );
        terms.push((hole, ring.neg(&ring.one())));
    }
    terms
}

pub(crate) fn evaluate_terms<'a, R: CoefficientRing + 'a>(
    g: &Graph,
    ring: &R,
    terms: impl Iterator<Item = (&'a PathPair, &'a R::Elem)>,
    probe: &GroupoidProbe,
) -> R::Elem {
    let mut acc = ring.zero();
    for (p, c) in terms {
        if p.contains(g, probe) {
            acc = ring.add(&acc, c);
        }
    }
    acc
}

fn canonicalize<R: CoefficientRing>(
    g: &Graph,
    ring: &R,
    terms: Vec<(PathPair, R::Elem)>,
) -> BTreeMap<PathPair, R::Elem> {
    let depth = terms.iter().map(|(p, _)| p.min_depth()).max().unwrap_or(0);
    let mut cells = expand_sum(g, ring, terms, depth);
    contract(g, ring, &mut cells);
    let depth = cells.keys().map(PathPair::min_depth).max().unwrap_or(0);
    let terms = cells.into_iter().collect();
    expand_sum(g, ring, terms, depth)
}

fn expand_sum<R: CoefficientRing>(
    g: &Graph,
    ring: &R,
    terms: Vec<(PathPair, R::Elem)>,
    depth: usize,
) -> BTreeMap<PathPair, R::Elem> {
    let mut out: BTreeMap<PathPair, R::Elem> = BTreeMap::new();
    for (p, c) in terms {
        if ring.is_zero(&c) {
            continue;
        }
        for cell in p.expand(g, depth) {
            let slot = out.entry(cell).or_insert_with(|| ring.zero());
            *slot = ring.add(slot, &c);
        }
    }
    out.retain(|_, c| !ring.is_zero(c));
    out
}

fn contract<R: CoefficientRing>(g: &Graph, ring: &R, cells: &mut BTreeMap<PathPair, R::Elem>) {
    let Some(mut level) = cells.keys().map(PathPair::min_depth).max() else {
        return;
    };
    // A contraction at min-depth L produces a parent at L-1, so one sweep from
    // the deepest level upward reaches the normal form.
    while level > 0 {
        let parents: Vec<PathPair> = cells
            .keys()
            .filter(|p| p.min_depth() == level)
            .filter_map(|p| p.parent(g))
            .collect();
        for parent in parents {
            if cells.contains_key(&parent) {
                continue;
            }
            let children = parent.children(g);
            let Some(first) = children.first().and_then(|c| cells.get(c)).cloned() else {
                continue;
            };
            if children.iter().all(|c| cells.get(c) == Some(&first)) {
                for c in &children {
                    cells.remove(c);
                }
                debug_assert!(!ring.is_zero(&first));
                cells.insert(parent, first);
            }
        }
        level -= 1;
    }
}

/// The convolution `(f*h)(γ)` computed from the definition: enumerate the
/// decompositions `γ = αβ` with `f(α) ≠ 0` directly from point membership.
///
/// Deliberately independent of [`PathPair::compose`] and canonicalization, so
/// it can serve as a test oracle for [`SteinbergElement::convolve`].
pub fn oracle_convolve_at<R: CoefficientRing>(
    g: &Graph,
    ring: &R,
    f: &[(PathPair, R::Elem)],
    h: &[(PathPair, R::Elem)],
    gamma: &GroupoidProbe,
) -> R::Elem {
    // Every α with r(α) = r(γ) in the support of f lies in some term Z(μ,ν)
    // of f with μ a prefix of r(γ); such a term contains exactly one of them.
    let mut alphas: Vec<(GroupoidProbe, GroupoidProbe)> = Vec::new();
    for (pair, _) in f {
        let gp = gamma.unrolled(g, pair.mu().len());
        let Some(tau) = gp.mu_full().strip_prefix(pair.mu()) else {
            continue;
        };
        let y = pair.nu().concat(&tau).expect("τ starts at s(ν)");
        let alpha = GroupoidProbe::new(g, gp.mu_full().clone(), y.clone(), pair.degree(), gp.tail().clone())
            .expect("α is a point of Z(μ,ν)");
        if alphas.iter().any(|(a, _)| a.same_point(&alpha)) {
            continue;
        }
        let beta = GroupoidProbe::new(
            g,
            y,
            gp.nu_full().clone(),
            gamma.degree() - pair.degree(),
            gp.tail().clone(),
        )
        .expect("β = α⁻¹γ shares the tail of γ");
        alphas.push((alpha, beta));
    }
    let mut acc = ring.zero();
    for (alpha, beta) in &alphas {
        let fa = evaluate_terms(g, ring, f.iter().map(|(p, c)| (p, c)), alpha);
        let hb = evaluate_terms(g, ring, h.iter().map(|(p, c)| (p, c)), beta);
        acc = ring.add(&acc, &ring.mul(&fa, &hb));
    }
    acc
}
