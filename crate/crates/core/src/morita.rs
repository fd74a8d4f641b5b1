//! The Morita context between the groupoid of a graph `E` and its restriction
//! to boundary paths with range in a vertex set `F^0`.
//!
//! `X` is the set of boundary paths with range in `F^0`. Inside the groupoid
//! `H = G_E`, the restriction `G = XHX`, the module `Z = XH` and its opposite
//! `Z^op = HX` are unions of basic pairs, sorted by whether `r(μ)` and
//! `r(ν)` lie in `F^0`. The linking algebra is modelled by 2×2 matrices
//! whose entries are Steinberg elements supported in the matching piece,
//! multiplied by ordinary matrix multiplication with convolution.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::collapse::{
    check_phi_fin_image, collapse, pointed_groupoid_iso_check, validate_collapsible, CollapseSpec, ImageCheck,
    IsoReport, ValidationReport,
};
use crate::cylinder::{boundary_walk, pairs_up_to, probes_in_pair, BoundaryPath, PathPair};
use crate::graph::{Graph, Path, VertexId, VertexSubset};
use crate::ring::CoefficientRing;
use crate::sample::{self, Sampleable};
use crate::steinberg::SteinbergElement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoritaError {
    #[error("{pair} (pattern {pattern}) is not allowed in position {position}")]
    CornerViolation {
        position: Corner,
        pattern: Corner,
        pair: String,
    },
    #[error("F^0 does not meet every orbit: {0}")]
    NotTransversal(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
    #[error("collapse hypotheses fail: {0}")]
    Hypotheses(String),
    #[error("operands use different transversals")]
    TransversalMismatch,
}

/// A vertex set `F^0` whose boundary paths meet every orbit, with the data
/// needed to build witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transversal {
    graph: Arc<Graph>,
    f0: VertexSubset,
    /// Per vertex `u`, the least `β` with `r(β) ∈ F^0` and `s(β) = u`.
    connecting: Vec<Option<Path>>,
}

/// Decides whether the boundary paths with range in `f0` meet every orbit.
///
/// An orbit misses `X` exactly when one of its boundary paths never visits a
/// vertex from which some path reaches `F^0`. The vertices that start such a
/// path form the greatest set `B` outside the reachable set in which every
/// vertex is a source or receives an edge from `B`; the check fails iff `B`
/// is nonempty, and reports a vertex of `B` with an avoiding boundary path.
pub fn check_transversal(graph: &Arc<Graph>, f0: &VertexSubset) -> Result<Transversal, MoritaError> {
    let g = graph.as_ref();
    let connecting = least_connecting_paths(g, f0);
    let mut bad: Vec<bool> = g.vertices().map(|v| connecting[v.index()].is_none()).collect();
    loop {
        let mut changed = false;
        for v in g.vertices() {
            if bad[v.index()] && !g.is_source(v) && g.edges_with_range(v).iter().all(|&e| !bad[g.source(e).index()]) {
                bad[v.index()] = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    if let Some(v) = g.vertices().find(|v| bad[v.index()]) {
        let walk = boundary_walk(g, v, |edges| {
            *edges
                .iter()
                .find(|&&e| bad[g.source(e).index()])
                .expect("bad vertices keep a bad predecessor")
        });
        return Err(MoritaError::NotTransversal(format!(
            "the boundary path {} from {} never meets a vertex reachable from F^0",
            render_boundary(g, &walk),
            g.vertex_name(v)
        )));
    }
    Ok(Transversal {
        graph: graph.clone(),
        f0: f0.clone(),
        connecting,
    })
}

fn render_boundary(g: &Graph, b: &BoundaryPath) -> String {
    match &b.tail {
        crate::cylinder::Continuation::Source => b.head.render(g),
        crate::cylinder::Continuation::Cycle(c) if b.head.is_vertex() => format!("({})^inf", c.render(g)),
        crate::cylinder::Continuation::Cycle(c) => format!("{}.({})^inf", b.head.render(g), c.render(g)),
    }
}

/// Shortest, then lexicographically least, path from each vertex back to
/// `F^0`. Layer `L` holds the least length-`L` path ending (as a source) at
/// each vertex; extending by an edge appends it on the source side.
fn least_connecting_paths(g: &Graph, f0: &VertexSubset) -> Vec<Option<Path>> {
    let n = g.vertex_count();
    let mut best: Vec<Option<Path>> = vec![None; n];
    let mut layer: Vec<Option<Path>> = g.vertices().map(|v| f0.contains(v).then(|| Path::vertex(v))).collect();
    for _ in 0..=n {
        for v in g.vertices() {
            if best[v.index()].is_none() {
                best[v.index()] = layer[v.index()].clone();
            }
        }
        let next: Vec<Option<Path>> = g
            .vertices()
            .map(|u| {
                g.edges_with_source(u)
                    .iter()
                    .filter_map(|&e| layer[g.range(e).index()].as_ref().map(|b| b.extended(g, e)))
                    .min()
            })
            .collect();
        layer = next;
    }
    best
}

impl Transversal {
    pub fn graph(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn f0(&self) -> &VertexSubset {
        &self.f0
    }

    pub fn in_x(&self, v: VertexId) -> bool {
        self.f0.contains(v)
    }

    /// `β_u`, when `u` reaches `F^0` by a path.
    pub fn connecting_path(&self, u: VertexId) -> Option<&Path> {
        self.connecting[u.index()].as_ref()
    }

    pub fn corner_of(&self, p: &PathPair) -> Corner {
        corner_of(p, &self.f0)
    }
}

/// The four pieces of the linking groupoid, used both for the membership
/// pattern of a pair and for matrix positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Corner {
    /// `G = XHX`, position (1,1)
    GG,
    /// `Z = XH`, position (1,2)
    GZ,
    /// `Z^op = HX`, position (2,1)
    ZG,
    /// `H`, position (2,2)
    HH,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::GG, Corner::GZ, Corner::ZG, Corner::HH];

    fn index(self) -> usize {
        self as usize
    }

    fn from_rc(row: usize, col: usize) -> Corner {
        Self::ALL[row * 2 + col]
    }

    fn row(self) -> usize {
        self.index() / 2
    }

    fn col(self) -> usize {
        self.index() % 2
    }

    /// Whether a pair with membership `pattern` may sit in this position.
    /// Row 1 needs `r(μ) ∈ F^0` and column 1 needs `r(ν) ∈ F^0`; row and
    /// column 2 accept anything, since `H` is the whole groupoid.
    pub fn admits(self, pattern: Corner) -> bool {
        (self.row() == 1 || pattern.row() == 0) && (self.col() == 1 || pattern.col() == 0)
    }
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Corner::GG => "GG",
            Corner::GZ => "GZ",
            Corner::ZG => "ZG",
            Corner::HH => "HH",
        };
        f.write_str(s)
    }
}

/// The pattern `(r(μ) ∈ F^0?, r(ν) ∈ F^0?)` of a pair.
pub fn corner_of(p: &PathPair, f0: &VertexSubset) -> Corner {
    let row = usize::from(!f0.contains(p.mu().range()));
    let col = usize::from(!f0.contains(p.nu().range()));
    Corner::from_rc(row, col)
}

/// A 2×2 matrix of Steinberg elements, entry `(i,j)` supported in position
/// `(i,j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkingElement<R: CoefficientRing> {
    f0: VertexSubset,
    entries: [SteinbergElement<R>; 4],
}

fn check_support<R: CoefficientRing>(
    f0: &VertexSubset,
    position: Corner,
    f: &SteinbergElement<R>,
) -> Result<(), MoritaError> {
    for p in f.terms().keys() {
        let pattern = corner_of(p, f0);
        if !position.admits(pattern) {
            return Err(MoritaError::CornerViolation {
                position,
                pattern,
                pair: p.render(f.graph()),
            });
        }
    }
    Ok(())
}

impl<R: CoefficientRing> LinkingElement<R> {
    pub fn new(t: &Transversal, entries: [SteinbergElement<R>; 4]) -> Result<Self, MoritaError> {
        for (pos, f) in Corner::ALL.iter().zip(&entries) {
            check_support(&t.f0, *pos, f)?;
        }
        Ok(Self {
            f0: t.f0.clone(),
            entries,
        })
    }

    pub fn zero(t: &Transversal, ring: &R) -> Self {
        let z = SteinbergElement::zero(t.graph.clone(), ring.clone());
        Self {
            f0: t.f0.clone(),
            entries: [z.clone(), z.clone(), z.clone(), z],
        }
    }

    /// `f` in one position, zeros elsewhere.
    pub fn place(t: &Transversal, f: SteinbergElement<R>, position: Corner) -> Result<Self, MoritaError> {
        check_support(&t.f0, position, &f)?;
        let mut m = Self::zero(t, f.ring());
        m.entries[position.index()] = f;
        Ok(m)
    }

    pub fn entry(&self, position: Corner) -> &SteinbergElement<R> {
        &self.entries[position.index()]
    }

    pub fn add(&self, other: &Self) -> Result<Self, MoritaError> {
        if self.f0 != other.f0 {
            return Err(MoritaError::TransversalMismatch);
        }
        let mut entries = self.entries.clone();
        for (a, b) in entries.iter_mut().zip(&other.entries) {
            *a = a.add(b).map_err(|e| MoritaError::Invariant(e.to_string()))?;
        }
        Ok(Self {
            f0: self.f0.clone(),
            entries,
        })
    }
}

/// `f ↦ (f 0; 0 0)` for `f` supported in `G`, or `(0 0; 0 f)` for the `H`
/// corner.
pub fn embed<R: CoefficientRing>(
    t: &Transversal,
    f: SteinbergElement<R>,
    which: Corner,
) -> Result<LinkingElement<R>, MoritaError> {
    if !matches!(which, Corner::GG | Corner::HH) {
        return Err(MoritaError::Invariant(format!("embed targets GG or HH, not {which}")));
    }
    LinkingElement::place(t, f, which)
}

/// Matrix product with convolution; the support of every result entry is
/// re-checked and a violation is an internal invariant failure.
pub fn linking_convolve<R: CoefficientRing>(
    a: &LinkingElement<R>,
    b: &LinkingElement<R>,
) -> Result<LinkingElement<R>, MoritaError> {
    if a.f0 != b.f0 {
        return Err(MoritaError::TransversalMismatch);
    }
    let alg = |e: crate::steinberg::AlgebraError| MoritaError::Invariant(e.to_string());
    let mut entries = a.entries.clone();
    for pos in Corner::ALL {
        let (i, j) = (pos.row(), pos.col());
        let left = a.entries[Corner::from_rc(i, 0).index()]
            .convolve(&b.entries[Corner::from_rc(0, j).index()])
            .map_err(alg)?;
        let right = a.entries[Corner::from_rc(i, 1).index()]
            .convolve(&b.entries[Corner::from_rc(1, j).index()])
            .map_err(alg)?;
        let sum = left.add(&right).map_err(alg)?;
        check_support(&a.f0, pos, &sum).map_err(|e| MoritaError::Invariant(e.to_string()))?;
        entries[pos.index()] = sum;
    }
    Ok(LinkingElement {
        f0: a.f0.clone(),
        entries,
    })
}

/// `ψ(m ⊗ n) = m * n` for `m` on `Z` and `n` on `Z^op`; lands in `G`.
pub fn psi<R: CoefficientRing>(
    t: &Transversal,
    m: &SteinbergElement<R>,
    n: &SteinbergElement<R>,
) -> Result<SteinbergElement<R>, MoritaError> {
    corner_product(t, m, Corner::GZ, n, Corner::ZG, Corner::GG)
}

/// `φ(n ⊗ m) = n * m` for `n` on `Z^op` and `m` on `Z`; lands in `H`.
pub fn phi<R: CoefficientRing>(
    t: &Transversal,
    n: &SteinbergElement<R>,
    m: &SteinbergElement<R>,
) -> Result<SteinbergElement<R>, MoritaError> {
    corner_product(t, n, Corner::ZG, m, Corner::GZ, Corner::HH)
}

fn corner_product<R: CoefficientRing>(
    t: &Transversal,
    a: &SteinbergElement<R>,
    pa: Corner,
    b: &SteinbergElement<R>,
    pb: Corner,
    out: Corner,
) -> Result<SteinbergElement<R>, MoritaError> {
    let la = LinkingElement::place(t, a.clone(), pa)?;
    let lb = LinkingElement::place(t, b.clone(), pb)?;
    Ok(linking_convolve(&la, &lb)?.entry(out).clone())
}

/// Checks `n'·ψ(m ⊗ n) = φ(n' ⊗ m)·n` and `m'·φ(n ⊗ m) = ψ(m' ⊗ n)·m`.
/// Inputs outside their corners are rejected.
pub fn eq_ops_check<R: CoefficientRing>(
    t: &Transversal,
    m: &SteinbergElement<R>,
    m2: &SteinbergElement<R>,
    n: &SteinbergElement<R>,
    n2: &SteinbergElement<R>,
) -> Result<bool, MoritaError> {
    let n2_l = LinkingElement::place(t, n2.clone(), Corner::ZG)?;
    let n_l = LinkingElement::place(t, n.clone(), Corner::ZG)?;
    let m2_l = LinkingElement::place(t, m2.clone(), Corner::GZ)?;
    let m_l = LinkingElement::place(t, m.clone(), Corner::GZ)?;

    let psi_mn = LinkingElement::place(t, psi(t, m, n)?, Corner::GG)?;
    let phi_n2m = LinkingElement::place(t, phi(t, n2, m)?, Corner::HH)?;
    let first = linking_convolve(&n2_l, &psi_mn)? == linking_convolve(&phi_n2m, &n_l)?;

    let phi_nm = LinkingElement::place(t, phi(t, n, m)?, Corner::HH)?;
    let psi_m2n = LinkingElement::place(t, psi(t, m2, n)?, Corner::GG)?;
    let second = linking_convolve(&m2_l, &phi_nm)? == linking_convolve(&psi_m2n, &m_l)?;
    Ok(first && second)
}

/// `f * (a·g) = (f·a) * g` for `f` on `Z`, `a` on `H`, `g` on `Z^op`.
pub fn balancedness_check<R: CoefficientRing>(
    t: &Transversal,
    f: &SteinbergElement<R>,
    a: &SteinbergElement<R>,
    g: &SteinbergElement<R>,
) -> Result<bool, MoritaError> {
    let f_l = LinkingElement::place(t, f.clone(), Corner::GZ)?;
    let a_l = LinkingElement::place(t, a.clone(), Corner::HH)?;
    let g_l = LinkingElement::place(t, g.clone(), Corner::ZG)?;
    let left = linking_convolve(&f_l, &linking_convolve(&a_l, &g_l)?)?;
    let right = linking_convolve(&linking_convolve(&f_l, &a_l)?, &g_l)?;
    Ok(left == right)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Target in `G`, factors in `Z × Z^op`.
    Psi,
    /// Target in `H`, factors in `Z^op × Z`.
    Phi,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Psi => "psi",
            Side::Phi => "phi",
        })
    }
}

/// Factors `(V_i, W_i)` with `Σ_i 1_{V_i} * 1_{W_i} = 1_U`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurjectivityWitness {
    pub side: Side,
    pub target: PathPair,
    pub factors: Vec<(PathPair, PathPair)>,
    /// The matrix sum reproduces `1_U` exactly.
    pub sum_matches: bool,
    /// The `r(V_i)` are disjoint and cover `r(U)` on probes.
    pub ranges_tile: bool,
}

impl SurjectivityWitness {
    pub fn ok(&self) -> bool {
        self.sum_matches && self.ranges_tile
    }
}

/// Builds and verifies a witness that `1_U` lies in the image of `ψ` (for
/// `U` in `G`) or `φ` (for any `U`).
///
/// For `ψ` one factor suffices: `Z(μ,μ) · Z(μ,ν) = Z(μ,ν)`. For `φ`, `Z(μ)` is
/// cut into cylinders `Z(μτ)` with `s(τ)` able to reach `F^0`; with
/// `β = β_{s(τ)}` each piece contributes `Z(μτ, β) · Z(β, ντ)`. The pieces
/// are disjoint by construction.
pub fn surjectivity_witness<R: CoefficientRing>(
    t: &Transversal,
    ring: &R,
    target: &PathPair,
    side: Side,
) -> Result<SurjectivityWitness, MoritaError> {
    let g = t.graph.as_ref();
    let pattern = t.corner_of(target);
    let (out, left_pos, right_pos) = match side {
        Side::Psi => (Corner::GG, Corner::GZ, Corner::ZG),
        Side::Phi => (Corner::HH, Corner::ZG, Corner::GZ),
    };
    if !out.admits(pattern) {
        return Err(MoritaError::CornerViolation {
            position: out,
            pattern,
            pair: target.render(g),
        });
    }
    let factors = match side {
        Side::Psi => vec![(target.range_unit(), target.clone())],
        Side::Phi => {
            let mut factors = Vec::new();
            let mut stack = vec![Path::vertex(target.source())];
            while let Some(tau) = stack.pop() {
                if let Some(beta) = t.connecting_path(tau.source()) {
                    let mu = target.mu().concat(&tau).expect("τ starts at s(μ)");
                    let nu = target.nu().concat(&tau).expect("τ starts at s(ν)");
                    let v = PathPair::new(g, mu, beta.clone()).expect("s(β) = s(τ)");
                    let w = PathPair::new(g, beta.clone(), nu).expect("s(β) = s(τ)");
                    factors.push((v, w));
                    continue;
                }
                if tau.len() >= g.vertex_count() || g.is_source(tau.source()) {
                    return Err(MoritaError::NotTransversal(format!(
                        "no connecting path below {}",
                        target.render(g)
                    )));
                }
                for &e in g.edges_with_range(tau.source()).iter().rev() {
                    stack.push(tau.extended(g, e));
                }
            }
            factors
        }
    };

    let one = |p: &PathPair| SteinbergElement::pair_indicator(t.graph.clone(), ring.clone(), p.clone());
    let mut sum = LinkingElement::zero(t, ring);
    for (v, w) in &factors {
        let lv = LinkingElement::place(t, one(v), left_pos)?;
        let lw = LinkingElement::place(t, one(w), right_pos)?;
        sum = sum.add(&linking_convolve(&lv, &lw)?)?;
    }
    let expected = embed(t, one(target), out)?;
    let sum_matches = sum == expected;

    let range = target.range_unit();
    let depth = factors.iter().map(|(v, _)| v.mu().len()).max().unwrap_or(0) + 1;
    let ranges_tile = probes_in_pair(g, &range, depth)
        .iter()
        .all(|x| factors.iter().filter(|(v, _)| v.range_unit().contains(g, x)).count() == 1);
    Ok(SurjectivityWitness {
        side,
        target: target.clone(),
        factors,
        sum_matches,
        ranges_tile,
    })
}

/// Knobs for [`morita_report`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MoritaConfig {
    /// Path-length bound for the witness targets.
    pub depth: usize,
    /// Depth for the collapse isomorphism check.
    pub iso_depth: usize,
    /// Length bound for the path image check.
    pub image_len: usize,
    /// Sampled tuples for eq-ops and balancedness.
    pub samples: usize,
    pub seed: u64,
}

impl Default for MoritaConfig {
    fn default() -> Self {
        Self {
            depth: 2,
            iso_depth: 3,
            image_len: 5,
            samples: 25,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MoritaReport {
    pub ring: String,
    pub validation: ValidationReport,
    pub transversal: Result<(), String>,
    pub witnesses: Vec<SurjectivityWitness>,
    pub eq_ops_checked: usize,
    pub eq_ops_failures: usize,
    pub balanced_checked: usize,
    pub balanced_failures: usize,
    pub collapsed: Option<Arc<Graph>>,
    pub image: Option<ImageCheck>,
    pub iso: Option<IsoReport>,
}

impl MoritaReport {
    pub fn witnesses_ok(&self) -> bool {
        self.witnesses.iter().all(SurjectivityWitness::ok)
    }

    pub fn ok(&self) -> bool {
        self.validation.ok()
            && self.transversal.is_ok()
            && self.witnesses_ok()
            && self.eq_ops_failures == 0
            && self.balanced_failures == 0
            && self.image.as_ref().is_some_and(ImageCheck::ok)
            && self.iso.as_ref().is_some_and(IsoReport::ok)
    }
}

/// Runs the whole pipeline for collapsing `T^0` in `E`: hypotheses,
/// transversal, witnesses for every pair of lengths `≤ depth` on both sides,
/// sampled eq-ops and balancedness, and the collapse isomorphism checks.
pub fn morita_report<R: Sampleable>(
    spec: &CollapseSpec,
    ring: &R,
    config: &MoritaConfig,
) -> Result<MoritaReport, MoritaError> {
    let validation = validate_collapsible(spec);
    if !validation.ok() {
        return Err(MoritaError::Hypotheses(validation.violations().join("; ")));
    }
    let graph = spec.graph();
    let f0 = spec.f0();
    let mut report = MoritaReport {
        ring: ring.name(),
        validation,
        transversal: Ok(()),
        witnesses: Vec::new(),
        eq_ops_checked: 0,
        eq_ops_failures: 0,
        balanced_checked: 0,
        balanced_failures: 0,
        collapsed: None,
        image: None,
        iso: None,
    };
    let t = match check_transversal(graph, &f0) {
        Ok(t) => t,
        Err(e) => {
            report.transversal = Err(e.to_string());
            return Ok(report);
        }
    };

    let g = graph.as_ref();
    let mut jobs: Vec<(PathPair, Side)> = pairs_up_to(g, config.depth, |v| f0.contains(v))
        .into_iter()
        .map(|p| (p, Side::Psi))
        .collect();
    jobs.extend(
        pairs_up_to(g, config.depth, |_| true)
            .into_iter()
            .map(|p| (p, Side::Phi)),
    );
    report.witnesses = jobs
        .par_iter()
        .map(|(p, side)| surjectivity_witness(&t, ring, p, *side))
        .collect::<Result<Vec<_>, _>>()?;

    let mut rng = sample::rng(config.seed);
    let corner = |rng: &mut sample::SampleRng, pos: Corner| {
        sample::random_element_where(rng, graph, ring, 3, config.depth, |p| pos.admits(t.corner_of(p)))
    };
    for _ in 0..config.samples {
        let m = corner(&mut rng, Corner::GZ);
        let m2 = corner(&mut rng, Corner::GZ);
        let n = corner(&mut rng, Corner::ZG);
        let n2 = corner(&mut rng, Corner::ZG);
        report.eq_ops_checked += 1;
        if !eq_ops_check(&t, &m, &m2, &n, &n2)? {
            report.eq_ops_failures += 1;
        }
        let a = corner(&mut rng, Corner::HH);
        report.balanced_checked += 1;
        if !balancedness_check(&t, &m, &a, &n)? {
            report.balanced_failures += 1;
        }
    }

    let cert = collapse(spec).map_err(|e| MoritaError::Hypotheses(e.to_string()))?;
    report.image = Some(check_phi_fin_image(&cert, config.image_len));
    report.iso = Some(pointed_groupoid_iso_check(&cert, config.iso_depth));
    report.collapsed = Some(cert.collapsed().clone());
    Ok(report)
}
