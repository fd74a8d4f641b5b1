//! Finite directed graphs and their paths.
//!
//! Conventions follow the range/source picture used throughout the crate: an
//! edge `e` has a range `r(e)` and a source `s(e)`, and a path `x_1 x_2 … x_n`
//! is composable when `s(x_i) = r(x_{i+1})`. Paths are therefore read from
//! their range towards their source. A vertex is a *source* when no edge has
//! it as range; such vertices are where paths stop.
//!
//! Vertices and edges are identified by indices in file order, and every
//! enumeration in the crate uses that order for tie-breaks.
//!
//! # File format
//!
//! ```text
//! # comments start with '#'; blank lines are ignored
//! vertices: v, w
//! edge: e1 v <- w
//! edge: e2 w <- v
//! ```
//!
//! `edge: <id> <range> <- <source>` declares `r(id) = range`, `s(id) = source`.
//! The `vertices:` line must be the first non-comment line. Identifiers are
//! either plain (`[A-Za-z0-9_'-]+`) or bracketed path names such as
//! `[e1.e2]`, which the collapse construction uses for its edges. Vertex and
//! edge identifiers share one namespace.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl EdgeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}edge `{edge}` references unknown vertex `{vertex}`", line_prefix(*.line))]
    DanglingEndpoint {
        line: Option<usize>,
        edge: String,
        vertex: String,
    },
    #[error("{}duplicate identifier `{id}`", line_prefix(*.line))]
    DuplicateId { line: Option<usize>, id: String },
    #[error("{}invalid identifier `{id}`", line_prefix(*.line))]
    InvalidId { line: Option<usize>, id: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edges `{first}` and `{second}` are not composable")]
    NotComposable { first: String, second: String },
    #[error("cannot concatenate: source of the first path differs from range of the second")]
    EndpointMismatch,
}

fn line_prefix(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub id: String,
    pub range: VertexId,
    pub source: VertexId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symbol {
    Vertex(VertexId),
    Edge(EdgeId),
}

/// A finite directed graph `(E^0, E^1, r, s)`, immutable after construction.
#[derive(Clone, Debug)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
    symbols: HashMap<String, Symbol>,
    by_range: Vec<Vec<EdgeId>>,
    by_source: Vec<Vec<EdgeId>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Graph {}

pub(crate) fn is_valid_id(id: &str) -> bool {
    fn plain(s: &str) -> bool {
        !s.is_empty()
            && s.chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '\'' | '-'))
    }
    if plain(id) {
        return true;
    }
    match id.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        Some(inner) => split_top_level(inner).is_some_and(|parts| parts.iter().all(|p| is_valid_id(p))),
        None => false,
    }
}

/// Splits on `.` outside brackets; `None` on unbalanced brackets.
pub(crate) fn split_top_level(text: &str) -> Option<Vec<&str>> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in text.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.checked_sub(1)?,
            '.' if depth == 0 => {
                parts.push(&text[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    parts.push(&text[start..]);
    Some(parts)
}

struct EdgeDecl<'a> {
    line: Option<usize>,
    id: &'a str,
    range: &'a str,
    source: &'a str,
}

impl Graph {
    /// Builds a graph from vertex names and `(id, range, source)` edge triples.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S, S)]) -> Result<Graph, GraphError> {
        let decls: Vec<_> = edges
            .iter()
            .map(|(id, r, s)| EdgeDecl {
                line: None,
                id: id.as_ref(),
                range: r.as_ref(),
                source: s.as_ref(),
            })
            .collect();
        let names: Vec<(Option<usize>, &str)> = vertices.iter().map(|v| (None, v.as_ref())).collect();
        Self::build(&names, &decls)
    }

    fn build(vertices: &[(Option<usize>, &str)], edges: &[EdgeDecl<'_>]) -> Result<Graph, GraphError> {
        let mut symbols = HashMap::new();
        for (i, &(line, name)) in vertices.iter().enumerate() {
            if !is_valid_id(name) {
                return Err(GraphError::InvalidId {
                    line,
                    id: name.to_string(),
                });
            }
            if symbols
                .insert(name.to_string(), Symbol::Vertex(VertexId(i as u32)))
                .is_some()
            {
                return Err(GraphError::DuplicateId {
                    line,
                    id: name.to_string(),
                });
            }
        }
        let lookup = |symbols: &HashMap<String, Symbol>, decl: &EdgeDecl<'_>, name: &str| match symbols.get(name) {
            Some(Symbol::Vertex(v)) => Ok(*v),
            _ => Err(GraphError::DanglingEndpoint {
                line: decl.line,
                edge: decl.id.to_string(),
                vertex: name.to_string(),
            }),
        };
        let mut records = Vec::with_capacity(edges.len());
        for (i, decl) in edges.iter().enumerate() {
            if !is_valid_id(decl.id) {
                return Err(GraphError::InvalidId {
                    line: decl.line,
                    id: decl.id.to_string(),
                });
            }
            let range = lookup(&symbols, decl, decl.range)?;
            let source = lookup(&symbols, decl, decl.source)?;
            if symbols
                .insert(decl.id.to_string(), Symbol::Edge(EdgeId(i as u32)))
                .is_some()
            {
                return Err(GraphError::DuplicateId {
                    line: decl.line,
                    id: decl.id.to_string(),
                });
            }
            records.push(EdgeRecord {
                id: decl.id.to_string(),
                range,
                source,
            });
        }
        let mut by_range = vec![Vec::new(); vertices.len()];
        let mut by_source = vec![Vec::new(); vertices.len()];
        for (i, e) in records.iter().enumerate() {
            by_range[e.range.index()].push(EdgeId(i as u32));
            by_source[e.source.index()].push(EdgeId(i as u32));
        }
        Ok(Graph {
            vertices: vertices.iter().map(|(_, n)| n.to_string()).collect(),
            edges: records,
            symbols,
            by_range,
            by_source,
        })
    }

    /// Parses the graph file format described in the module docs.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut vertices: Option<Vec<(Option<usize>, &str)>> = None;
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.trim();
            if content.is_empty() || content.starts_with('#') {
                continue;
            }
            let parse_err = |message: &str| GraphError::Parse {
                line,
                message: message.to_string(),
            };
            if let Some(rest) = content.strip_prefix("vertices:") {
                if vertices.is_some() {
                    return Err(parse_err("second `vertices:` line"));
                }
                let names = rest.trim();
                let list = if names.is_empty() {
                    Vec::new()
                } else {
                    names
                        .split(',')
                        .map(|n| {
                            let n = n.trim();
                            if n.is_empty() {
                                Err(parse_err("empty vertex name"))
                            } else {
                                Ok((Some(line), n))
                            }
                        })
                        .collect::<Result<Vec<_>, _>>()?
                };
                vertices = Some(list);
            } else if let Some(rest) = content.strip_prefix("edge:") {
                if vertices.is_none() {
                    return Err(parse_err("`edge:` before the `vertices:` line"));
                }
                let tokens: Vec<&str> = rest.split_whitespace().collect();
                match tokens.as_slice() {
                    [id, range, "<-", source] => edges.push(EdgeDecl {
                        line: Some(line),
                        id,
                        range,
                        source,
                    }),
                    _ => return Err(parse_err("expected `edge: <id> <range> <- <source>`")),
                }
            } else {
                return Err(parse_err("expected `vertices:` or `edge:`"));
            }
        }
        let vertices = vertices.ok_or(GraphError::Parse {
            line: text.lines().count().max(1),
            message: "missing `vertices:` line".into(),
        })?;
        Self::build(&vertices, &edges)
    }

    /// Compact one-line notation used in tests: `"v;w | e1:w->v; e2:v->w"`,
    /// where `x->y` is an edge with source `x` and range `y`.
    pub fn from_compact(text: &str) -> Result<Graph, GraphError> {
        let (vs, es) = text.split_once('|').unwrap_or((text, ""));
        let vertices: Vec<&str> = vs.split(';').map(str::trim).filter(|s| !s.is_empty()).collect();
        let mut edges = Vec::new();
        for item in es.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let malformed = || GraphError::Parse {
                line: 1,
                message: format!("malformed compact edge `{item}`"),
            };
            let (id, arrow) = item.split_once(':').ok_or_else(malformed)?;
            let (source, range) = arrow.split_once("->").ok_or_else(malformed)?;
            edges.push((id.trim(), range.trim(), source.trim()));
        }
        Graph::new(&vertices, &edges)
    }

    /// Canonical serialization; `Graph::parse` of the output reproduces `self`.
    pub fn serialize(&self) -> String {
        let mut out = format!("vertices: {}\n", self.vertices.join(", "));
        for e in &self.edges {
            out.push_str(&format!(
                "edge: {} {} <- {}\n",
                e.id,
                self.vertex_name(e.range),
                self.vertex_name(e.source)
            ));
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.vertices.len() as u32).map(VertexId)
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = EdgeId> + '_ {
        (0..self.edges.len() as u32).map(EdgeId)
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v.index()]
    }

    pub fn edge_name(&self, e: EdgeId) -> &str {
        &self.edges[e.index()].id
    }

    pub fn edge_record(&self, e: EdgeId) -> &EdgeRecord {
        &self.edges[e.index()]
    }

    pub fn range(&self, e: EdgeId) -> VertexId {
        self.edges[e.index()].range
    }

    pub fn source(&self, e: EdgeId) -> VertexId {
        self.edges[e.index()].source
    }

    /// `r^{-1}(v)`, in file order. Paths ending at `v` continue along these.
    pub fn edges_with_range(&self, v: VertexId) -> &[EdgeId] {
        &self.by_range[v.index()]
    }

    /// `s^{-1}(v)`, in file order.
    pub fn edges_with_source(&self, v: VertexId) -> &[EdgeId] {
        &self.by_source[v.index()]
    }

    pub fn is_source(&self, v: VertexId) -> bool {
        self.by_range[v.index()].is_empty()
    }

    pub fn vertex_id(&self, name: &str) -> Result<VertexId, GraphError> {
        match self.symbols.get(name) {
            Some(Symbol::Vertex(v)) => Ok(*v),
            _ => Err(GraphError::UnknownVertex(name.to_string())),
        }
    }

    pub fn edge_id(&self, name: &str) -> Result<EdgeId, GraphError> {
        match self.symbols.get(name) {
            Some(Symbol::Edge(e)) => Ok(*e),
            _ => Err(GraphError::UnknownEdge(name.to_string())),
        }
    }

    /// Vertices receiving no edge. For finite graphs these are exactly the
    /// singular vertices.
    pub fn sources(&self) -> VertexSubset {
        VertexSubset::from_ids(self.vertices().filter(|&v| self.is_source(v)))
    }

    /// All paths of length at most `max_len` with the given optional range and
    /// source, sorted by [`Path`]'s order (length, then edge ids).
    pub fn enumerate_paths(
        &self,
        from_range: Option<VertexId>,
        to_source: Option<VertexId>,
        max_len: usize,
    ) -> Vec<Path> {
        let mut out = Vec::new();
        let mut frontier: Vec<Path> = match from_range {
            Some(v) => vec![Path::vertex(v)],
            None => self.vertices().map(Path::vertex).collect(),
        };
        for len in 0..=max_len {
            out.extend(
                frontier
                    .iter()
                    .filter(|p| to_source.is_none_or(|s| p.source() == s))
                    .cloned(),
            );
            if len == max_len {
                break;
            }
            frontier = frontier
                .iter()
                .flat_map(|p| {
                    self.edges_with_range(p.source())
                        .iter()
                        .map(move |&e| p.extended(self, e))
                })
                .collect();
        }
        out.sort();
        out
    }

    /// A closed path of length at least one, if the graph has a cycle.
    pub fn find_cycle(&self) -> Option<Path> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        fn visit(g: &Graph, v: VertexId, marks: &mut [Mark], stack: &mut Vec<EdgeId>) -> Option<Path> {
            marks[v.index()] = Mark::Active;
            for &e in g.edges_with_range(v) {
                let next = g.source(e);
                stack.push(e);
                match marks[next.index()] {
                    Mark::Active => {
                        let start = stack
                            .iter()
                            .position(|&x| g.range(x) == next)
                            .expect("active vertex lies on the stack");
                        return Some(Path::from_edges(g, &stack[start..]).expect("stack edges compose"));
                    }
                    Mark::New => {
                        if let Some(c) = visit(g, next, marks, stack) {
                            return Some(c);
                        }
                    }
                    Mark::Done => {}
                }
                stack.pop();
            }
            marks[v.index()] = Mark::Done;
            None
        }
        let mut marks = vec![Mark::New; self.vertex_count()];
        for v in self.vertices() {
            if marks[v.index()] == Mark::New {
                let mut stack = Vec::new();
                if let Some(c) = visit(self, v, &mut marks, &mut stack) {
                    return Some(c);
                }
            }
        }
        None
    }

    pub fn is_acyclic(&self) -> bool {
        self.find_cycle().is_none()
    }

    /// The subgraph on `t0` keeping exactly the edges with both endpoints in
    /// `t0`. Names and relative order are preserved.
    pub fn subgraph(&self, t0: &VertexSubset) -> Graph {
        let vertices: Vec<&str> = self
            .vertices()
            .filter(|v| t0.contains(*v))
            .map(|v| self.vertex_name(v))
            .collect();
        let edges: Vec<(&str, &str, &str)> = self
            .edges
            .iter()
            .filter(|e| t0.contains(e.range) && t0.contains(e.source))
            .map(|e| (e.id.as_str(), self.vertex_name(e.range), self.vertex_name(e.source)))
            .collect();
        Graph::new(&vertices, &edges).expect("subgraph of a valid graph is valid")
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// A finite path: a single vertex (length zero) or a composable edge sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    range: VertexId,
    source: VertexId,
    edges: Vec<EdgeId>,
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> Ordering {
        self.edges
            .len()
            .cmp(&other.edges.len())
            .then_with(|| self.edges.cmp(&other.edges))
            .then_with(|| self.range.cmp(&other.range))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// A vertex path has length zero but is not "empty".
#[allow(clippy::len_without_is_empty)]
impl Path {
    pub fn vertex(v: VertexId) -> Path {
        Path {
            range: v,
            source: v,
            edges: Vec::new(),
        }
    }

    pub fn edge(g: &Graph, e: EdgeId) -> Path {
        Path {
            range: g.range(e),
            source: g.source(e),
            edges: vec![e],
        }
    }

    /// A nonempty edge sequence, checked for composability.
    pub fn from_edges(g: &Graph, edges: &[EdgeId]) -> Result<Path, GraphError> {
        let (first, last) = match (edges.first(), edges.last()) {
            (Some(f), Some(l)) => (*f, *l),
            _ => {
                return Err(GraphError::Parse {
                    line: 1,
                    message: "empty edge sequence".into(),
                })
            }
        };
        for w in edges.windows(2) {
            if g.source(w[0]) != g.range(w[1]) {
                return Err(GraphError::NotComposable {
                    first: g.edge_name(w[0]).to_string(),
                    second: g.edge_name(w[1]).to_string(),
                });
            }
        }
        Ok(Path {
            range: g.range(first),
            source: g.source(last),
            edges: edges.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    /// `self · e`; the caller guarantees `r(e) = s(self)`.
    pub fn extended(&self, g: &Graph, e: EdgeId) -> Path {
        debug_assert_eq!(g.range(e), self.source);
        let mut edges = self.edges.clone();
        edges.push(e);
        Path {
            range: self.range,
            source: g.source(e),
            edges,
        }
    }

    /// The concatenation `self · other`; vertex paths act as identities.
    pub fn concat(&self, other: &Path) -> Result<Path, GraphError> {
        if self.source != other.range {
            return Err(GraphError::EndpointMismatch);
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Ok(Path {
            range: self.range,
            source: other.source,
            edges,
        })
    }

    /// The `τ` with `prefix · τ = self`, if `prefix` is a prefix of `self`.
    pub fn strip_prefix(&self, prefix: &Path) -> Option<Path> {
        if prefix.range != self.range || !self.edges.starts_with(&prefix.edges) {
            return None;
        }
        Some(Path {
            range: prefix.source,
            source: self.source,
            edges: self.edges[prefix.len()..].to_vec(),
        })
    }

    pub fn has_prefix(&self, prefix: &Path) -> bool {
        prefix.range == self.range && self.edges.starts_with(&prefix.edges)
    }

    /// The first `k` edges (a vertex path when `k = 0`).
    pub fn prefix(&self, g: &Graph, k: usize) -> Path {
        assert!(k <= self.len());
        if k == 0 {
            return Path::vertex(self.range);
        }
        Path {
            range: self.range,
            source: g.source(self.edges[k - 1]),
            edges: self.edges[..k].to_vec(),
        }
    }

    /// Drops the first `k` edges.
    pub fn suffix(&self, g: &Graph, k: usize) -> Path {
        assert!(k <= self.len());
        if k == self.len() {
            return Path::vertex(self.source);
        }
        Path {
            range: g.range(self.edges[k]),
            source: self.source,
            edges: self.edges[k..].to_vec(),
        }
    }

    /// Vertices visited, from the range onwards.
    pub fn vertices<'a>(&'a self, g: &'a Graph) -> impl Iterator<Item = VertexId> + 'a {
        std::iter::once(self.range).chain(self.edges.iter().map(move |&e| g.source(e)))
    }

    /// Dot-separated edge ids, or the vertex id for a vertex path.
    pub fn render(&self, g: &Graph) -> String {
        if self.is_vertex() {
            g.vertex_name(self.range).to_string()
        } else {
            self.edges.iter().map(|&e| g.edge_name(e)).collect::<Vec<_>>().join(".")
        }
    }

    /// Inverse of [`Path::render`].
    pub fn parse(g: &Graph, text: &str) -> Result<Path, GraphError> {
        let text = text.trim();
        if let Ok(v) = g.vertex_id(text) {
            return Ok(Path::vertex(v));
        }
        let parts = split_top_level(text).ok_or_else(|| GraphError::UnknownEdge(text.to_string()))?;
        let edges = parts.iter().map(|p| g.edge_id(p)).collect::<Result<Vec<_>, _>>()?;
        Path::from_edges(g, &edges)
    }
}

/// A subset of a graph's vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct VertexSubset {
    members: BTreeSet<VertexId>,
}

impl VertexSubset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_ids(ids: impl IntoIterator<Item = VertexId>) -> Self {
        Self {
            members: ids.into_iter().collect(),
        }
    }

    pub fn all(g: &Graph) -> Self {
        Self::from_ids(g.vertices())
    }

    /// Parses a comma-separated list of vertex names; empty text is `∅`.
    pub fn parse(g: &Graph, text: &str) -> Result<Self, GraphError> {
        let ids = text
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|name| g.vertex_id(name))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_ids(ids))
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.members.iter().copied()
    }

    pub fn complement(&self, g: &Graph) -> Self {
        Self::from_ids(g.vertices().filter(|v| !self.contains(*v)))
    }

    pub fn is_subset(&self, other: &VertexSubset) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn render(&self, g: &Graph) -> String {
        self.iter().map(|v| g.vertex_name(v)).collect::<Vec<_>>().join(",")
    }
}
