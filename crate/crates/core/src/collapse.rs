//! Collapsing an acyclic subgraph `T` of `E`.
//!
//! With `F^0 = E^0 ∖ T^0`, the collapsed graph `F` has one edge `e_β` for each
//! path `β` of `E` of positive length whose endpoints lie in `F^0` and whose
//! interior vertices lie in `T^0`. The groupoid of `F` is isomorphic to the
//! restriction of the groupoid of `E` to boundary paths with range in `F^0`,
//! via `Z(μ,ν) ↦ Z(φ(μ), φ(ν))` where `φ` replaces each `e_β` by `β`.
//!
//! Only finite graphs are handled, so the conditions about heads and infinite
//! receivers hold automatically; the validator reports them as vacuous.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::cylinder::{pairs_up_to, probes_in_pair, Continuation, GroupoidProbe, PathPair};
use crate::graph::{EdgeId, Graph, Path, VertexId, VertexSubset};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CollapseError {
    #[error("collapsing every vertex leaves nothing (F^0 is empty)")]
    EmptyF0,
    #[error("collapse hypotheses fail: {0}")]
    Hypotheses(String),
    #[error("path `{0}` is not a path of the collapsed graph")]
    NotAnFPath(String),
    #[error(
        "F-source `{0}` receives edges in E; mapping it needs the infinite-receiver branch, which finite graphs never reach"
    )]
    InfiniteReceiverBranch(String),
}

/// A graph together with the vertex set `T^0` to collapse.
#[derive(Clone, Debug)]
pub struct CollapseSpec {
    graph: Arc<Graph>,
    t0: VertexSubset,
}

impl CollapseSpec {
    pub fn new(graph: Arc<Graph>, t0: VertexSubset) -> Result<Self, CollapseError> {
        if t0.len() >= graph.vertex_count() {
            return Err(CollapseError::EmptyF0);
        }
        Ok(Self { graph, t0 })
    }

    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn t0(&self) -> &VertexSubset {
        &self.t0
    }

    pub fn f0(&self) -> VertexSubset {
        self.t0.complement(&self.graph)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    /// With the offending witness.
    Fail(String),
    /// Holds automatically for finite graphs; carries the reason.
    Vacuous(&'static str),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HypothesisCheck {
    pub name: &'static str,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub checks: Vec<HypothesisCheck>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        !self.checks.iter().any(|c| matches!(c.status, CheckStatus::Fail(_)))
    }

    pub fn violations(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter_map(|c| match &c.status {
                CheckStatus::Fail(w) => Some(format!("{}: {w}", c.name)),
                _ => None,
            })
            .collect()
    }
}

const FINITE_T: &str = "T is finite and acyclic, so it has no infinite paths";

/// Checks the collapse hypotheses in order; violations are data.
pub fn validate_collapsible(spec: &CollapseSpec) -> ValidationReport {
    let g = spec.graph.as_ref();
    let t = g.subgraph(&spec.t0);
    let acyclic = match t.find_cycle() {
        None => CheckStatus::Pass,
        Some(c) => CheckStatus::Fail(format!("cycle {}", c.render(&t))),
    };
    let stray: Vec<&str> = g
        .sources()
        .iter()
        .filter(|&v| spec.t0.contains(v))
        .map(|v| g.vertex_name(v))
        .collect();
    let sources = if stray.is_empty() {
        CheckStatus::Pass
    } else {
        CheckStatus::Fail(format!("source {} lies in T^0", stray.join(",")))
    };
    let mut checks = vec![
        HypothesisCheck {
            name: "T acyclic",
            status: acyclic,
        },
        HypothesisCheck {
            name: "sources in F^0",
            status: sources,
        },
        HypothesisCheck {
            name: "no heads",
            status: CheckStatus::Vacuous(FINITE_T),
        },
    ];
    for (name, reason) in [
        ("T1", FINITE_T),
        ("T2", FINITE_T),
        ("T3", FINITE_T),
        ("T4", "finite graphs have no infinite receivers"),
    ] {
        checks.push(HypothesisCheck {
            name,
            status: CheckStatus::Vacuous(reason),
        });
    }
    ValidationReport { checks }
}

/// The collapsed graph `F` with the edge map `e_β ↦ β`.
#[derive(Clone, Debug)]
pub struct CollapseCertificate {
    e: Arc<Graph>,
    f: Arc<Graph>,
    t0: VertexSubset,
    edge_map: Vec<Path>,
    f_to_e_vertex: Vec<VertexId>,
    e_to_f_vertex: HashMap<VertexId, VertexId>,
    by_image: HashMap<Path, EdgeId>,
}

/// Builds `F`. Edge ids are the rendered `β`, bracketed when `|β| > 1`, so
/// collapsing nothing reproduces `E` exactly.
pub fn collapse(spec: &CollapseSpec) -> Result<CollapseCertificate, CollapseError> {
    let report = validate_collapsible(spec);
    if !report.ok() {
        return Err(CollapseError::Hypotheses(report.violations().join("; ")));
    }
    let g = spec.graph.as_ref();
    let f0 = spec.f0();
    let mut betas = Vec::new();
    for u in f0.iter() {
        let mut stack = vec![Path::vertex(u)];
        while let Some(p) = stack.pop() {
            for &e in g.edges_with_range(p.source()) {
                let q = p.extended(g, e);
                if f0.contains(q.source()) {
                    betas.push(q);
                } else {
                    stack.push(q);
                }
            }
        }
    }
    betas.sort();
    let names: Vec<&str> = f0.iter().map(|v| g.vertex_name(v)).collect();
    let edges: Vec<(String, String, String)> = betas
        .iter()
        .map(|b| {
            let id = if b.len() == 1 {
                b.render(g)
            } else {
                format!("[{}]", b.render(g))
            };
            (
                id,
                g.vertex_name(b.range()).to_string(),
                g.vertex_name(b.source()).to_string(),
            )
        })
        .collect();
    let edge_refs: Vec<(&str, &str, &str)> = edges
        .iter()
        .map(|(a, b, c)| (a.as_str(), b.as_str(), c.as_str()))
        .collect();
    let f = Graph::new(&names, &edge_refs).expect("collapsed graph is well formed");
    Ok(CollapseCertificate::assemble(
        spec.graph.clone(),
        Arc::new(f),
        spec.t0.clone(),
        betas,
    ))
}

impl CollapseCertificate {
    fn assemble(e: Arc<Graph>, f: Arc<Graph>, t0: VertexSubset, edge_map: Vec<Path>) -> Self {
        let f_to_e_vertex: Vec<VertexId> = f
            .vertices()
            .map(|v| e.vertex_id(f.vertex_name(v)).expect("F^0 ⊆ E^0"))
            .collect();
        let e_to_f_vertex = f.vertices().map(|v| (f_to_e_vertex[v.index()], v)).collect();
        let by_image = edge_map
            .iter()
            .enumerate()
            .map(|(i, b)| (b.clone(), EdgeId(i as u32)))
            .collect();
        Self {
            e,
            f,
            t0,
            edge_map,
            f_to_e_vertex,
            e_to_f_vertex,
            by_image,
        }
    }

    pub fn source_graph(&self) -> &Arc<Graph> {
        &self.e
    }

    pub fn collapsed(&self) -> &Arc<Graph> {
        &self.f
    }

    pub fn t0(&self) -> &VertexSubset {
        &self.t0
    }

    /// `F^0` as a subset of `E^0`.
    pub fn f0_in_e(&self) -> VertexSubset {
        VertexSubset::from_ids(self.f_to_e_vertex.iter().copied())
    }

    pub fn edge_image(&self, e: EdgeId) -> &Path {
        &self.edge_map[e.index()]
    }

    pub fn e_vertex(&self, v: VertexId) -> VertexId {
        self.f_to_e_vertex[v.index()]
    }

    /// A copy with one edge image replaced; used to build negative controls.
    pub fn with_edge_image(&self, e: EdgeId, image: Path) -> Self {
        let mut map = self.edge_map.clone();
        map[e.index()] = image;
        Self::assemble(self.e.clone(), self.f.clone(), self.t0.clone(), map)
    }

    /// `(F edge id, E path)` rows in F-edge order.
    pub fn edge_table(&self) -> Vec<(String, String)> {
        self.f
            .edges()
            .map(|e| (self.f.edge_name(e).to_string(), self.edge_image(e).render(&self.e)))
            .collect()
    }

    /// `φ(μ) = φ(μ_1)φ(μ_2)…`, and `φ(v) = v` on vertices.
    pub fn phi_fin_extend(&self, p: &Path) -> Result<Path, CollapseError> {
        let bad = || CollapseError::NotAnFPath(format!("{p:?}"));
        if p.range().index() >= self.f.vertex_count() {
            return Err(bad());
        }
        let mut out = Path::vertex(self.e_vertex(p.range()));
        for &e in p.edges() {
            let img = self.edge_map.get(e.index()).ok_or_else(bad)?;
            out = out.concat(img).map_err(|_| bad())?;
        }
        Ok(out)
    }

    /// Splits an E-path with both endpoints in `F^0` at its `F^0` vertices
    /// and reads off the F-path, if every segment is an edge image.
    pub fn phi_fin_inverse(&self, p: &Path) -> Option<Path> {
        let g = self.e.as_ref();
        let start = *self.e_to_f_vertex.get(&p.range())?;
        let mut out = Path::vertex(start);
        let mut seg_start = 0;
        for (i, v) in p.vertices(g).enumerate().skip(1) {
            if self.e_to_f_vertex.contains_key(&v) {
                let seg = p.suffix(g, seg_start).prefix(g, i - seg_start);
                let fe = *self.by_image.get(&seg)?;
                out = out.concat(&Path::edge(&self.f, fe)).ok()?;
                seg_start = i;
            }
        }
        (seg_start == p.len()).then_some(out)
    }

    /// `Z(μ,ν) ↦ Z(φ(μ), φ(ν))`.
    pub fn map_pair(&self, p: &PathPair) -> Result<PathPair, CollapseError> {
        let mu = self.phi_fin_extend(p.mu())?;
        let nu = self.phi_fin_extend(p.nu())?;
        PathPair::new(&self.e, mu, nu).map_err(|_| CollapseError::NotAnFPath(p.render(&self.f)))
    }

    /// The image of an F-groupoid point.
    pub fn map_probe(&self, x: &GroupoidProbe) -> Result<GroupoidProbe, CollapseError> {
        let mu = self.phi_fin_extend(x.mu_full())?;
        let nu = self.phi_fin_extend(x.nu_full())?;
        let tail = match x.tail() {
            Continuation::Source => {
                if !self.e.is_source(mu.source()) {
                    return Err(CollapseError::InfiniteReceiverBranch(
                        self.e.vertex_name(mu.source()).to_string(),
                    ));
                }
                Continuation::Source
            }
            Continuation::Cycle(c) => Continuation::Cycle(self.phi_fin_extend(c)?),
        };
        let degree = mu.len() as i64 - nu.len() as i64;
        GroupoidProbe::new(&self.e, mu, nu, degree, tail).map_err(|err| CollapseError::NotAnFPath(err.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageCheck {
    pub max_len: usize,
    /// E-paths hit by two F-paths.
    pub collisions: Vec<String>,
    /// Pointed E-paths not hit.
    pub missing: Vec<String>,
    /// Images outside the pointed E-paths.
    pub extra: Vec<String>,
}

impl ImageCheck {
    pub fn ok(&self) -> bool {
        self.collisions.is_empty() && self.missing.is_empty() && self.extra.is_empty()
    }
}

/// `φ` is injective on F-paths with `|φ(p)| ≤ max_len`, and those images are
/// exactly the E-paths of length `≤ max_len` with both endpoints in `F^0`.
pub fn check_phi_fin_image(cert: &CollapseCertificate, max_len: usize) -> ImageCheck {
    let (e, f) = (cert.e.as_ref(), cert.f.as_ref());
    let f0 = cert.f0_in_e();
    let mut seen: HashMap<Path, Path> = HashMap::new();
    let mut collisions = Vec::new();
    let mut extra = Vec::new();
    for p in f.enumerate_paths(None, None, max_len) {
        let Ok(img) = cert.phi_fin_extend(&p) else {
            extra.push(format!("{} has no image", p.render(f)));
            continue;
        };
        if img.len() > max_len {
            continue;
        }
        if !(f0.contains(img.range()) && f0.contains(img.source())) {
            extra.push(img.render(e));
        }
        if let Some(prev) = seen.insert(img.clone(), p.clone()) {
            collisions.push(format!("{} and {} -> {}", prev.render(f), p.render(f), img.render(e)));
        }
    }
    let missing = e
        .enumerate_paths(None, None, max_len)
        .into_iter()
        .filter(|p| f0.contains(p.range()) && f0.contains(p.source()) && !seen.contains_key(p))
        .map(|p| p.render(e))
        .collect();
    ImageCheck {
        max_len,
        collisions,
        missing,
        extra,
    }
}

/// One part of the isomorphism check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoPart {
    pub name: &'static str,
    pub checked: usize,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoReport {
    pub depth: usize,
    pub parts: Vec<IsoPart>,
}

impl IsoReport {
    pub fn ok(&self) -> bool {
        self.parts.iter().all(|p| p.failure.is_none())
    }

    pub fn part(&self, name: &str) -> Option<&IsoPart> {
        self.parts.iter().find(|p| p.name == name)
    }
}

/// Checks, for F-pairs with both paths of length `≤ depth`:
/// (a) images are pointed; (b) the pair map is injective; (c) each pointed
/// E-pair of lengths `≤ depth` is a disjoint union of images; (d) composing
/// then mapping equals mapping then composing, with empty matching empty;
/// (e) the point map sends points of a pair into the image pair.
pub fn pointed_groupoid_iso_check(cert: &CollapseCertificate, depth: usize) -> IsoReport {
    let (e, f) = (cert.e.as_ref(), cert.f.as_ref());
    let f0 = cert.f0_in_e();
    let domain = pairs_up_to(f, depth, |_| true);
    let images: Vec<Option<PathPair>> = domain.iter().map(|p| cert.map_pair(p).ok()).collect();

    let mut pointed = IsoPart {
        name: "pointed",
        checked: 0,
        failure: None,
    };
    for (p, img) in domain.iter().zip(&images) {
        pointed.checked += 1;
        let ok = img
            .as_ref()
            .is_some_and(|q| f0.contains(q.mu().range()) && f0.contains(q.nu().range()));
        if !ok && pointed.failure.is_none() {
            pointed.failure = Some(p.render(f));
        }
    }

    let mut injective = IsoPart {
        name: "injective",
        checked: 0,
        failure: None,
    };
    let mut seen: HashMap<&PathPair, &PathPair> = HashMap::new();
    for (p, img) in domain.iter().zip(&images) {
        let Some(q) = img else { continue };
        injective.checked += 1;
        if let Some(prev) = seen.insert(q, p) {
            injective
                .failure
                .get_or_insert_with(|| format!("{} and {} -> {}", prev.render(f), p.render(f), q.render(e)));
        }
    }

    let mut surjective = IsoPart {
        name: "surjective",
        checked: 0,
        failure: None,
    };
    for target in pairs_up_to(e, depth, |v| f0.contains(v)) {
        surjective.checked += 1;
        if let Err(why) = covered_by_images(cert, &target, depth) {
            surjective.failure.get_or_insert(why);
        }
    }

    let mut multiplicative = IsoPart {
        name: "multiplicative",
        checked: 0,
        failure: None,
    };
    for (i, p) in domain.iter().enumerate() {
        for (j, q) in domain.iter().enumerate() {
            multiplicative.checked += 1;
            let (Some(ip), Some(iq)) = (&images[i], &images[j]) else {
                continue;
            };
            let left = p.compose(q).map(|pq| cert.map_pair(&pq));
            let right = ip.compose(iq);
            let agree = match (left, &right) {
                (None, None) => true,
                (Some(Ok(a)), Some(b)) => a == *b,
                _ => false,
            };
            if !agree && multiplicative.failure.is_none() {
                let shown = |x: Option<PathPair>| x.map_or("EMPTY".to_string(), |x| x.render(e));
                multiplicative.failure = Some(format!(
                    "{} * {}: image of product {}, product of images {}",
                    p.render(f),
                    q.render(f),
                    shown(p.compose(q).and_then(|pq| cert.map_pair(&pq).ok())),
                    shown(right),
                ));
            }
        }
    }

    let mut points = IsoPart {
        name: "points",
        checked: 0,
        failure: None,
    };
    for (p, img) in domain.iter().zip(&images) {
        let Some(q) = img else { continue };
        for x in probes_in_pair(f, p, depth + 1) {
            points.checked += 1;
            let ok = cert.map_probe(&x).is_ok_and(|y| q.contains(e, &y));
            if !ok && points.failure.is_none() {
                points.failure = Some(format!("{} in {}", x.render(f), p.render(f)));
            }
        }
    }

    IsoReport {
        depth,
        parts: vec![pointed, injective, surjective, multiplicative, points],
    }
}

/// Refines a pointed E-pair until its source lies in `F^0`, pulls each piece
/// back along `φ`, and probe-checks that the pieces tile the pair.
fn covered_by_images(cert: &CollapseCertificate, target: &PathPair, depth: usize) -> Result<(), String> {
    let e = cert.e.as_ref();
    let f0 = cert.f0_in_e();
    let mut pieces = Vec::new();
    let mut stack = vec![target.clone()];
    let mut guard = 0usize;
    while let Some(p) = stack.pop() {
        if f0.contains(p.source()) {
            pieces.push(p);
            continue;
        }
        guard += 1;
        if guard > 10_000 || p.children(e).is_empty() {
            return Err(format!("{} cannot be refined into F^0", target.render(e)));
        }
        stack.extend(p.children(e));
    }
    for piece in &pieces {
        let pre = cert
            .phi_fin_inverse(piece.mu())
            .zip(cert.phi_fin_inverse(piece.nu()))
            .ok_or_else(|| format!("{} has no preimage", piece.render(e)))?;
        let back = cert
            .map_pair(&PathPair::new(&cert.f, pre.0, pre.1).map_err(|err| err.to_string())?)
            .map_err(|err| err.to_string())?;
        if back != *piece {
            return Err(format!("{} maps back to {}", piece.render(e), back.render(e)));
        }
    }
    let probe_depth = depth + 1 + pieces.iter().map(PathPair::min_depth).max().unwrap_or(0);
    for x in probes_in_pair(e, target, probe_depth) {
        let hits = pieces.iter().filter(|p| p.contains(e, &x)).count();
        if hits != 1 {
            return Err(format!("{} lies in {hits} pieces of {}", x.render(e), target.render(e)));
        }
    }
    Ok(())
}
