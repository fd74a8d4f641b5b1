//! Symbolic calculus of basic compact open bisections `Z((μ,ν) ∖ F)` of the
//! graph groupoid.
//!
//! A [`PathPair`] `(μ, ν)` with `s(μ) = s(ν)` names the bisection
//! `Z(μ,ν) = {(μx, |μ|-|ν|, νx)}`; a [`BasicBisection`] additionally removes
//! the sub-bisections `Z(μα, να)` for `α` in a finite exclusion set `F`.
//!
//! Points of the groupoid are represented exactly by [`GroupoidProbe`]s: a
//! pair of finite heads sharing a tail that either stops at a source or repeats
//! a cycle forever. Every boundary path of a finite graph that we ever need to
//! name has such a form, so membership questions are decided without
//! truncation error.

use thiserror::Error;

use crate::graph::{EdgeId, Graph, Path, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CylinderError {
    #[error("paths `{mu}` and `{nu}` have different sources")]
    SourceMismatch { mu: String, nu: String },
    #[error("excluded path `{0}` must be nonempty and start at the shared source")]
    BadExclusion(String),
    #[error("probe is inconsistent with the graph: {0}")]
    InconsistentProbe(String),
}

/// `(μ, ν)` with a shared source; names `Z(μ,ν)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathPair {
    mu: Path,
    nu: Path,
}

impl PathPair {
    pub fn new(g: &Graph, mu: Path, nu: Path) -> Result<Self, CylinderError> {
        if mu.source() != nu.source() {
            return Err(CylinderError::SourceMismatch {
                mu: mu.render(g),
                nu: nu.render(g),
            });
        }
        Ok(Self { mu, nu })
    }

    /// For callers that already know `s(mu) = s(nu)`.
    pub(crate) fn new_unchecked(mu: Path, nu: Path) -> Self {
        debug_assert_eq!(mu.source(), nu.source());
        Self { mu, nu }
    }

    /// The unit-space cylinder `Z(μ) = Z(μ, μ)`.
    pub fn unit(path: Path) -> Self {
        Self {
            mu: path.clone(),
            nu: path,
        }
    }

    pub fn vertex(v: VertexId) -> Self {
        Self::unit(Path::vertex(v))
    }

    pub fn parse(g: &Graph, mu: &str, nu: &str) -> Result<Self, crate::Error> {
        Ok(Self::new(g, Path::parse(g, mu)?, Path::parse(g, nu)?)?)
    }

    pub fn mu(&self) -> &Path {
        &self.mu
    }

    pub fn nu(&self) -> &Path {
        &self.nu
    }

    pub fn source(&self) -> VertexId {
        self.mu.source()
    }

    pub fn degree(&self) -> i64 {
        self.mu.len() as i64 - self.nu.len() as i64
    }

    pub fn min_depth(&self) -> usize {
        self.mu.len().min(self.nu.len())
    }

    /// Source-terminated pairs are single points and cannot be expanded.
    pub fn is_source_terminated(&self, g: &Graph) -> bool {
        g.is_source(self.source())
    }

    /// The `τ` with `self = (other.μ τ, other.ν τ)`, when `Z(self) ⊆ Z(other)`.
    pub fn extension_of(&self, other: &PathPair) -> Option<Path> {
        let t1 = self.mu.strip_prefix(&other.mu)?;
        let t2 = self.nu.strip_prefix(&other.nu)?;
        (t1 == t2).then_some(t1)
    }

    /// `Z(μ,ν) ∩ Z(α,β)` by the three-case formula.
    pub fn intersect(&self, other: &PathPair) -> Option<PathPair> {
        if other.extension_of(self).is_some() {
            Some(other.clone())
        } else if self.extension_of(other).is_some() {
            Some(self.clone())
        } else {
            None
        }
    }

    /// `Z(μ,ν) ∖ Z(α,β)`.
    pub fn subtract(&self, g: &Graph, other: &PathPair) -> Subtraction {
        if let Some(tau) = other.extension_of(self) {
            if tau.is_vertex() {
                Subtraction::Empty
            } else {
                Subtraction::Remainder(
                    BasicBisection::new(g, self.clone(), vec![tau])
                        .expect("extension tail starts at the shared source"),
                )
            }
        } else if self.extension_of(other).is_some() {
            Subtraction::Empty
        } else {
            Subtraction::Unchanged(self.clone())
        }
    }

    /// The set product `Z(μ,ν) Z(α,β)`.
    pub fn compose(&self, other: &PathPair) -> Option<PathPair> {
        if let Some(tau) = other.mu.strip_prefix(&self.nu) {
            // α = ντ
            let mu = self.mu.concat(&tau).expect("τ starts at s(ν) = s(μ)");
            Some(PathPair {
                mu,
                nu: other.nu.clone(),
            })
        } else if let Some(tau) = self.nu.strip_prefix(&other.mu) {
            // ν = ατ
            let nu = other.nu.concat(&tau).expect("τ starts at s(α) = s(β)");
            Some(PathPair {
                mu: self.mu.clone(),
                nu,
            })
        } else {
            None
        }
    }

    pub fn inverse(&self) -> PathPair {
        PathPair {
            mu: self.nu.clone(),
            nu: self.mu.clone(),
        }
    }

    /// The range unit cylinder `r(Z(μ,ν)) = Z(μ)`.
    pub fn range_unit(&self) -> PathPair {
        PathPair::unit(self.mu.clone())
    }

    pub fn source_unit(&self) -> PathPair {
        PathPair::unit(self.nu.clone())
    }

    /// One-step refinement `Z(μ,ν) = ⊔_{r(e)=s(μ)} Z(μe, νe)`; empty at sources.
    pub fn children(&self, g: &Graph) -> Vec<PathPair> {
        g.edges_with_range(self.source())
            .iter()
            .map(|&e| PathPair {
                mu: self.mu.extended(g, e),
                nu: self.nu.extended(g, e),
            })
            .collect()
    }

    /// The pair this one was refined from, if its two paths end in the same edge.
    pub fn parent(&self, g: &Graph) -> Option<PathPair> {
        let (a, b) = (self.mu.edges().last()?, self.nu.edges().last()?);
        (a == b).then(|| PathPair {
            mu: self.mu.prefix(g, self.mu.len() - 1),
            nu: self.nu.prefix(g, self.nu.len() - 1),
        })
    }

    /// Disjoint refinement with every piece at min-depth `target_depth`, or
    /// shallower when it ends at a source.
    pub fn expand(&self, g: &Graph, target_depth: usize) -> Vec<PathPair> {
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(p) = stack.pop() {
            if p.min_depth() >= target_depth || p.is_source_terminated(g) {
                out.push(p);
            } else {
                stack.extend(p.children(g).into_iter().rev());
            }
        }
        out
    }

    /// Exact membership of a groupoid point.
    pub fn contains(&self, g: &Graph, probe: &GroupoidProbe) -> bool {
        self.tail_of(g, probe).is_some()
    }

    /// If the probe `(μτx, k, ντx)` lies in `Z(μ,ν)`, its tail `τx`.
    fn tail_of(&self, g: &Graph, probe: &GroupoidProbe) -> Option<BoundaryPath> {
        if probe.degree != self.degree() {
            return None;
        }
        let p = probe.unrolled(g, self.mu.len());
        let t1 = p.mu_full.strip_prefix(&self.mu)?;
        let t2 = p.nu_full.strip_prefix(&self.nu)?;
        (t1 == t2).then_some(BoundaryPath { head: t1, tail: p.tail })
    }

    /// `Z(mu,nu)`, with paths dot-separated.
    pub fn render(&self, g: &Graph) -> String {
        format!("Z({},{})", self.mu.render(g), self.nu.render(g))
    }
}

/// Outcome of [`PathPair::subtract`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subtraction {
    Empty,
    Unchanged(PathPair),
    Remainder(BasicBisection),
}

/// `Z((μ,ν) ∖ F)` with `F` prefix-reduced and sorted.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasicBisection {
    pair: PathPair,
    excluded: Vec<Path>,
}

impl From<PathPair> for BasicBisection {
    fn from(pair: PathPair) -> Self {
        Self {
            pair,
            excluded: Vec::new(),
        }
    }
}

fn prefix_reduce(mut paths: Vec<Path>) -> Vec<Path> {
    paths.sort();
    paths.dedup();
    // Sorted by length first, so any proper prefix precedes its extensions.
    let mut kept: Vec<Path> = Vec::with_capacity(paths.len());
    for p in paths {
        if !kept.iter().any(|k| p.has_prefix(k)) {
            kept.push(p);
        }
    }
    kept
}

impl BasicBisection {
    pub fn new(g: &Graph, pair: PathPair, excluded: Vec<Path>) -> Result<Self, CylinderError> {
        for a in &excluded {
            if a.is_vertex() || a.range() != pair.source() {
                return Err(CylinderError::BadExclusion(a.render(g)));
            }
        }
        Ok(Self {
            pair,
            excluded: prefix_reduce(excluded),
        })
    }

    pub fn pair(&self) -> &PathPair {
        &self.pair
    }

    pub fn excluded(&self) -> &[Path] {
        &self.excluded
    }

    pub fn degree(&self) -> i64 {
        self.pair.degree()
    }

    /// Decides `Z((μ,ν) ∖ F) = ∅` by searching the path tree below `s(μ)` to
    /// depth `max |α|`: the set is nonempty iff some branch survives to that
    /// depth or stops at a source without meeting `F`.
    pub fn is_empty(&self, g: &Graph) -> bool {
        let Some(depth) = self.excluded.iter().map(Path::len).max() else {
            return false;
        };
        let mut stack = vec![Path::vertex(self.pair.source())];
        while let Some(p) = stack.pop() {
            if self.excluded.contains(&p) {
                continue;
            }
            if p.len() == depth || g.is_source(p.source()) {
                return false;
            }
            for &e in g.edges_with_range(p.source()) {
                stack.push(p.extended(g, e));
            }
        }
        true
    }

    pub fn intersect(&self, other: &BasicBisection) -> Option<BasicBisection> {
        if let Some(tau) = other.pair.extension_of(&self.pair) {
            Self::narrowed(other, &self.excluded, &tau)
        } else if let Some(tau) = self.pair.extension_of(&other.pair) {
            Self::narrowed(self, &other.excluded, &tau)
        } else {
            None
        }
    }

    /// `inner ∖ ⋃_{γ ∈ outer_excl} Z(μγ, νγ)` where `inner.pair = (μτ, ντ)`.
    fn narrowed(inner: &BasicBisection, outer_excl: &[Path], tau: &Path) -> Option<BasicBisection> {
        let mut excluded = inner.excluded.clone();
        for gamma in outer_excl {
            if tau.has_prefix(gamma) {
                return None;
            }
            if let Some(rest) = gamma.strip_prefix(tau) {
                excluded.push(rest);
            }
        }
        Some(BasicBisection {
            pair: inner.pair.clone(),
            excluded: prefix_reduce(excluded),
        })
    }

    /// `self ∖ other` as pairwise-disjoint pieces (possibly empty sets).
    pub fn difference(&self, g: &Graph, other: &BasicBisection) -> Vec<BasicBisection> {
        let mut pieces = Vec::new();
        // self ∖ Z(α,β)
        if let Some(tau) = other.pair.extension_of(&self.pair) {
            if !tau.is_vertex() {
                let mut excluded = self.excluded.clone();
                excluded.push(tau);
                pieces.push(BasicBisection {
                    pair: self.pair.clone(),
                    excluded: prefix_reduce(excluded),
                });
            }
        } else if self.pair.extension_of(&other.pair).is_none() {
            return vec![self.clone()];
        }
        // self ∩ Z(αδ, βδ) for the holes δ of other
        for delta in &other.excluded {
            let hole = PathPair {
                mu: other.pair.mu.concat(delta).expect("δ starts at s(α)"),
                nu: other.pair.nu.concat(delta).expect("δ starts at s(β)"),
            };
            if let Some(piece) = self.intersect(&BasicBisection::from(hole)) {
                pieces.push(piece);
            }
        }
        pieces.retain(|p| !p.is_empty(g));
        pieces
    }

    pub fn invert(&self) -> BasicBisection {
        BasicBisection {
            pair: self.pair.inverse(),
            excluded: self.excluded.clone(),
        }
    }

    /// `r(U) = Z(μ ∖ F)` as a unit-space bisection.
    pub fn range_unit(&self) -> BasicBisection {
        BasicBisection {
            pair: self.pair.range_unit(),
            excluded: self.excluded.clone(),
        }
    }

    pub fn member(&self, g: &Graph, probe: &GroupoidProbe) -> bool {
        match self.pair.tail_of(g, probe) {
            Some(tail) => !self.excluded.iter().any(|a| tail.has_prefix(g, a)),
            None => false,
        }
    }

    /// `Z((mu,nu) \ {a1,...})`, or `Z(mu,nu)` when nothing is excluded.
    pub fn render(&self, g: &Graph) -> String {
        if self.excluded.is_empty() {
            return self.pair.render(g);
        }
        let holes: Vec<String> = self.excluded.iter().map(|a| a.render(g)).collect();
        format!(
            "Z(({},{}) \\ {{{}}})",
            self.pair.mu.render(g),
            self.pair.nu.render(g),
            holes.join(",")
        )
    }
}

/// Rewrites a finite union of basic bisections as a disjoint union of nonempty
/// ones.
///
/// The union is refined into its inclusion–exclusion atoms
/// `⋂_{b ∈ S} b ∖ ⋃_{b ∉ S} b`, built one input at a time with the pairwise
/// intersection and difference formulas; empty atoms are pruned. Output is
/// sorted by `(|μ|, μ, ν, F)`.
pub fn disjointify(g: &Graph, bisections: &[BasicBisection]) -> Vec<BasicBisection> {
    let mut atoms: Vec<BasicBisection> = Vec::new();
    for b in bisections {
        if b.is_empty(g) {
            continue;
        }
        let mut refined = Vec::with_capacity(atoms.len() * 2 + 1);
        let mut outside = vec![b.clone()];
        for a in &atoms {
            if let Some(both) = a.intersect(b) {
                if !both.is_empty(g) {
                    refined.push(both);
                }
            }
            refined.extend(a.difference(g, b));
            outside = outside.iter().flat_map(|o| o.difference(g, a)).collect();
        }
        refined.extend(outside);
        atoms = refined;
    }
    atoms.sort();
    atoms
}

/// What follows the finite heads of a boundary path.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Continuation {
    /// The heads end at a source.
    Source,
    /// A closed path at the heads' common source, repeated forever.
    Cycle(Path),
}

/// A boundary path written as a finite head followed by a [`Continuation`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoundaryPath {
    pub head: Path,
    pub tail: Continuation,
}

impl BoundaryPath {
    /// The `i`-th edge, or `None` past the end of a finite path.
    pub fn edge_at(&self, i: usize) -> Option<EdgeId> {
        let h = self.head.edges();
        if i < h.len() {
            return Some(h[i]);
        }
        match &self.tail {
            Continuation::Source => None,
            Continuation::Cycle(c) => Some(c.edges()[(i - h.len()) % c.len()]),
        }
    }

    pub fn has_prefix(&self, _g: &Graph, prefix: &Path) -> bool {
        prefix.range() == self.head.range()
            && prefix
                .edges()
                .iter()
                .enumerate()
                .all(|(i, &e)| self.edge_at(i) == Some(e))
    }

    /// Equality of the underlying (possibly infinite) edge sequences.
    pub fn same_as(&self, other: &BoundaryPath) -> bool {
        if self.head.range() != other.head.range() {
            return false;
        }
        match (&self.tail, &other.tail) {
            (Continuation::Source, Continuation::Source) => self.head == other.head,
            (Continuation::Cycle(a), Continuation::Cycle(b)) => {
                let n = self.head.len().max(other.head.len()) + lcm(a.len(), b.len());
                (0..n).all(|i| self.edge_at(i) == other.edge_at(i))
            }
            _ => false,
        }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// An exact groupoid element `(μw·x, |μw|-|νw|, νw·x)`, given by its two heads
/// `mu_full = μw`, `nu_full = νw` and the shared continuation `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupoidProbe {
    mu_full: Path,
    nu_full: Path,
    degree: i64,
    tail: Continuation,
}

impl GroupoidProbe {
    pub fn new(
        g: &Graph,
        mu_full: Path,
        nu_full: Path,
        degree: i64,
        tail: Continuation,
    ) -> Result<Self, CylinderError> {
        let bad = |m: &str| Err(CylinderError::InconsistentProbe(m.to_string()));
        if mu_full.source() != nu_full.source() {
            return bad("heads do not share a source");
        }
        if degree != mu_full.len() as i64 - nu_full.len() as i64 {
            return bad("degree differs from the head length difference");
        }
        match &tail {
            Continuation::Source if !g.is_source(mu_full.source()) => return bad("finite tail must stop at a source"),
            Continuation::Cycle(c) if c.is_vertex() || c.range() != c.source() || c.range() != mu_full.source() => {
                return bad("cycle must be a closed path at the shared source")
            }
            _ => {}
        }
        Ok(Self {
            mu_full,
            nu_full,
            degree,
            tail,
        })
    }

    /// The point of `Z(pair)` obtained by following `walk` from `s(pair)`.
    pub fn in_pair(pair: &PathPair, walk: &BoundaryPath) -> GroupoidProbe {
        assert_eq!(walk.head.range(), pair.source(), "walk must start at s(μ)");
        GroupoidProbe {
            mu_full: pair.mu.concat(&walk.head).expect("walk starts at s(μ)"),
            nu_full: pair.nu.concat(&walk.head).expect("walk starts at s(ν)"),
            degree: pair.degree(),
            tail: walk.tail.clone(),
        }
    }

    /// The canonical point of `Z(pair)`: the greedy boundary walk from `s(pair)`.
    pub fn canonical_in(g: &Graph, pair: &PathPair) -> GroupoidProbe {
        Self::in_pair(pair, &boundary_walk(g, pair.source(), |edges| edges[0]))
    }

    pub fn mu_full(&self) -> &Path {
        &self.mu_full
    }

    pub fn nu_full(&self) -> &Path {
        &self.nu_full
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn tail(&self) -> &Continuation {
        &self.tail
    }

    pub fn range_point(&self) -> BoundaryPath {
        BoundaryPath {
            head: self.mu_full.clone(),
            tail: self.tail.clone(),
        }
    }

    pub fn source_point(&self) -> BoundaryPath {
        BoundaryPath {
            head: self.nu_full.clone(),
            tail: self.tail.clone(),
        }
    }

    pub fn inverse(&self) -> GroupoidProbe {
        GroupoidProbe {
            mu_full: self.nu_full.clone(),
            nu_full: self.mu_full.clone(),
            degree: -self.degree,
            tail: self.tail.clone(),
        }
    }

    /// The same point with at least `min_len` edges in the range head, when
    /// the tail is infinite.
    pub fn unrolled(&self, _g: &Graph, min_len: usize) -> GroupoidProbe {
        let mut p = self.clone();
        if let Continuation::Cycle(c) = &self.tail {
            while p.mu_full.len() < min_len {
                p.mu_full = p.mu_full.concat(c).expect("cycle is closed at the source");
                p.nu_full = p.nu_full.concat(c).expect("cycle is closed at the source");
            }
        }
        p
    }

    /// Whether two probes name the same groupoid element.
    pub fn same_point(&self, other: &GroupoidProbe) -> bool {
        self.degree == other.degree
            && self.range_point().same_as(&other.range_point())
            && self.source_point().same_as(&other.source_point())
    }

    pub fn render(&self, g: &Graph) -> String {
        let tail = match &self.tail {
            Continuation::Source => String::new(),
            Continuation::Cycle(c) => format!("({})^inf", c.render(g)),
        };
        let head = |p: &Path| {
            if p.is_vertex() && !tail.is_empty() {
                String::new()
            } else {
                p.render(g)
            }
        };
        format!(
            "({}{tail}, {}, {}{tail})",
            head(&self.mu_full),
            self.degree,
            head(&self.nu_full)
        )
    }
}

/// Walks a boundary path from `start`, picking among `r^{-1}(current)` with
/// `choose`, until reaching a source or revisiting a vertex (which closes the
/// cycle that is then repeated).
pub fn boundary_walk(g: &Graph, start: VertexId, mut choose: impl FnMut(&[EdgeId]) -> EdgeId) -> BoundaryPath {
    let mut path = Path::vertex(start);
    let mut seen = vec![start];
    loop {
        let here = path.source();
        if g.is_source(here) {
            return BoundaryPath {
                head: path,
                tail: Continuation::Source,
            };
        }
        let e = choose(g.edges_with_range(here));
        path = path.extended(g, e);
        let next = path.source();
        if let Some(pos) = seen.iter().position(|&v| v == next) {
            return BoundaryPath {
                head: path.prefix(g, pos),
                tail: Continuation::Cycle(path.suffix(g, pos)),
            };
        }
        seen.push(next);
    }
}

/// One canonical point per cell of the groupoid at min-depth `depth`, for all
/// degrees in `-max_abs_degree..=max_abs_degree`. Functions whose terms all
/// have min-depth at most `depth` are constant on each cell.
pub fn probes_at_depth(g: &Graph, depth: usize, max_abs_degree: usize) -> Vec<GroupoidProbe> {
    let mut out = Vec::new();
    for u in g.vertices() {
        let paths = g.enumerate_paths(None, Some(u), depth + max_abs_degree);
        for p in &paths {
            for q in &paths {
                let (a, b) = (p.len(), q.len());
                let shallow = a.min(b) < depth;
                if a.abs_diff(b) > max_abs_degree || (shallow && !g.is_source(u)) {
                    continue;
                }
                if !shallow && a.min(b) != depth {
                    continue;
                }
                let pair = PathPair {
                    mu: p.clone(),
                    nu: q.clone(),
                };
                out.push(GroupoidProbe::canonical_in(g, &pair));
            }
        }
    }
    out
}

/// The canonical points of the cells of `Z(pair)` at min-depth `depth`.
pub fn probes_in_pair(g: &Graph, pair: &PathPair, depth: usize) -> Vec<GroupoidProbe> {
    pair.expand(g, depth)
        .iter()
        .map(|cell| GroupoidProbe::canonical_in(g, cell))
        .collect()
}

/// All pairs `(μ, ν)` with `|μ|, |ν| ≤ max_len` whose ranges pass `range_ok`,
/// sorted.
pub fn pairs_up_to(g: &Graph, max_len: usize, range_ok: impl Fn(VertexId) -> bool) -> Vec<PathPair> {
    let mut out = Vec::new();
    for u in g.vertices() {
        let paths: Vec<Path> = g
            .enumerate_paths(None, Some(u), max_len)
            .into_iter()
            .filter(|p| range_ok(p.range()))
            .collect();
        for mu in &paths {
            for nu in &paths {
                out.push(PathPair::new_unchecked(mu.clone(), nu.clone()));
            }
        }
    }
    out.sort();
    out
}
