//! Seeded random generators for graphs, elements, probes and collapse
//! instances. Everything is driven by a `ChaCha8Rng`, so a seed fixes the
//! whole sample.

use std::sync::Arc;

use num_bigint::BigInt;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collapse::{collapse, validate_collapsible, CollapseSpec};
use crate::cylinder::{boundary_walk, GroupoidProbe, PathPair};
use crate::graph::{Graph, Path, VertexId, VertexSubset};
use crate::ring::{CoefficientRing, Integers, IntegersMod, Rationals};
use crate::steinberg::SteinbergElement;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rings that can produce small random coefficients.
pub trait Sampleable: CoefficientRing {
    fn sample(&self, rng: &mut SampleRng) -> Self::Elem;
}

impl Sampleable for Integers {
    fn sample(&self, rng: &mut SampleRng) -> BigInt {
        BigInt::from(rng.random_range(-3i64..=3))
    }
}

impl Sampleable for Rationals {
    fn sample(&self, rng: &mut SampleRng) -> num_rational::BigRational {
        self.fraction(rng.random_range(-3i64..=3), rng.random_range(1i64..=3))
    }
}

impl Sampleable for IntegersMod {
    fn sample(&self, rng: &mut SampleRng) -> u64 {
        rng.random_range(0..self.modulus())
    }
}

/// A random graph with `1..=max_vertices` vertices and `0..=max_edges` edges.
pub fn random_graph(rng: &mut SampleRng, max_vertices: usize, max_edges: usize) -> Graph {
    let n = rng.random_range(1..=max_vertices);
    let m = rng.random_range(0..=max_edges);
    let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges: Vec<(String, String, String)> = (0..m)
        .map(|i| {
            (
                format!("e{i}"),
                names[rng.random_range(0..n)].clone(),
                names[rng.random_range(0..n)].clone(),
            )
        })
        .collect();
    Graph::new(&names, &edges).expect("generated graph is well formed")
}

/// A random path of length `≤ max_len` with the given source.
pub fn random_path_to(rng: &mut SampleRng, g: &Graph, source: VertexId, max_len: usize) -> Path {
    let len = rng.random_range(0..=max_len);
    let mut p = Path::vertex(source);
    for _ in 0..len {
        let Some(&e) = g.edges_with_source(p.range()).choose(rng) else {
            break;
        };
        p = Path::edge(g, e).concat(&p).expect("s(e) = r(p)");
    }
    p
}

pub fn random_pair(rng: &mut SampleRng, g: &Graph, max_len: usize) -> PathPair {
    let u = VertexId(rng.random_range(0..g.vertex_count() as u32));
    let mu = random_path_to(rng, g, u, max_len);
    let nu = random_path_to(rng, g, u, max_len);
    PathPair::new(g, mu, nu).expect("shared source")
}

/// A random pair passing `accept`, if one turns up within a bounded number
/// of draws.
pub fn random_pair_where(
    rng: &mut SampleRng,
    g: &Graph,
    max_len: usize,
    accept: impl Fn(&PathPair) -> bool,
) -> Option<PathPair> {
    (0..200).map(|_| random_pair(rng, g, max_len)).find(|p| accept(p))
}

pub fn random_element<R: Sampleable>(
    rng: &mut SampleRng,
    graph: &Arc<Graph>,
    ring: &R,
    max_terms: usize,
    max_len: usize,
) -> SteinbergElement<R> {
    random_element_where(rng, graph, ring, max_terms, max_len, |_| true)
}

pub fn random_element_where<R: Sampleable>(
    rng: &mut SampleRng,
    graph: &Arc<Graph>,
    ring: &R,
    max_terms: usize,
    max_len: usize,
    accept: impl Fn(&PathPair) -> bool,
) -> SteinbergElement<R> {
    let count = rng.random_range(1..=max_terms);
    let terms = (0..count)
        .filter_map(|_| {
            let p = random_pair_where(rng, graph, max_len, &accept)?;
            Some((p, ring.sample(rng)))
        })
        .collect();
    SteinbergElement::from_terms(graph.clone(), ring.clone(), terms)
}

/// A homogeneous element of the given degree (possibly zero).
pub fn random_homogeneous<R: Sampleable>(
    rng: &mut SampleRng,
    graph: &Arc<Graph>,
    ring: &R,
    degree: i64,
    max_terms: usize,
    max_len: usize,
) -> SteinbergElement<R> {
    random_element_where(rng, graph, ring, max_terms, max_len, |p| p.degree() == degree)
}

/// A random point inside `Z(pair)`.
pub fn random_point_in(rng: &mut SampleRng, g: &Graph, pair: &PathPair) -> GroupoidProbe {
    let walk = boundary_walk(g, pair.source(), |edges| *edges.choose(rng).expect("nonempty"));
    GroupoidProbe::in_pair(pair, &walk)
}

/// Probes for testing functions supported on `support`: half are points of
/// the support pairs, the rest points of random pairs of length `≤ max_len`.
pub fn random_probes(
    rng: &mut SampleRng,
    g: &Graph,
    support: &[PathPair],
    max_len: usize,
    count: usize,
) -> Vec<GroupoidProbe> {
    (0..count)
        .map(|i| {
            let pair = match support.choose(rng) {
                Some(p) if i % 2 == 0 => {
                    // Refine a little so different cells of a support pair get hit.
                    let depth = p.min_depth() + rng.random_range(0..=1);
                    let cells = p.expand(g, depth);
                    cells.choose(rng).expect("expansion is nonempty").clone()
                }
                _ => random_pair(rng, g, max_len),
            };
            random_point_in(rng, g, &pair)
        })
        .collect()
}

/// A random collapse instance passing the hypotheses whose collapsed graph
/// has at most `max_f_edges` edges, with `T^0` nonempty when possible.
pub fn random_collapse_instance(
    rng: &mut SampleRng,
    max_vertices: usize,
    max_edges: usize,
    max_f_edges: usize,
) -> (Arc<Graph>, VertexSubset) {
    loop {
        let g = Arc::new(random_graph(rng, max_vertices, max_edges));
        if g.vertex_count() < 2 {
            continue;
        }
        let t0 = VertexSubset::from_ids(g.vertices().filter(|_| rng.random_bool(0.4)));
        if t0.is_empty() {
            continue;
        }
        let Ok(spec) = CollapseSpec::new(g.clone(), t0.clone()) else {
            continue;
        };
        if !validate_collapsible(&spec).ok() {
            continue;
        }
        let cert = collapse(&spec).expect("validated");
        if cert.collapsed().edge_count() <= max_f_edges {
            return (g, t0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sample() {
        let a = random_graph(&mut rng(7), 6, 10);
        let b = random_graph(&mut rng(7), 6, 10);
        assert_eq!(a.serialize(), b.serialize());
    }

    #[test]
    fn probes_are_points_of_their_pairs() {
        let mut r = rng(3);
        for _ in 0..20 {
            let g = random_graph(&mut r, 5, 8);
            let p = random_pair(&mut r, &g, 3);
            let x = random_point_in(&mut r, &g, &p);
            assert!(p.contains(&g, &x));
        }
    }

    #[test]
    fn collapse_instances_validate() {
        let mut r = rng(11);
        for _ in 0..5 {
            let (g, t0) = random_collapse_instance(&mut r, 5, 8, 8);
            let spec = CollapseSpec::new(g, t0.clone()).unwrap();
            assert!(validate_collapsible(&spec).ok());
            assert!(!t0.is_empty());
        }
    }
}
