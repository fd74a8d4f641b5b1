#![allow(dead_code)]

use std::sync::Arc;

use leavitt_core::cylinder::{BasicBisection, Continuation, GroupoidProbe, PathPair};
use leavitt_core::graph::{EdgeId, Graph, Path};
use leavitt_core::sample::{random_graph, random_pair, random_point_in, SampleRng};
use rand::seq::IndexedRandom;
use rand::Rng;

/// The first `n` edges of `head · tail^∞`, fewer if the path is finite.
pub fn sequence(head: &Path, tail: &Continuation, n: usize) -> Vec<EdgeId> {
    let mut out = head.edges().to_vec();
    if let Continuation::Cycle(c) = tail {
        while out.len() < n {
            out.extend_from_slice(c.edges());
        }
    }
    out
}

/// Membership of a probe in `Z((μ,ν) ∖ F)` straight from the definition:
/// `x = μz`, `y = νz`, degree `|μ|-|ν|`, and `z` avoids every prefix in `F`.
pub fn brute_member(pair: &PathPair, excluded: &[Path], x: &GroupoidProbe) -> bool {
    let (mu, nu) = (pair.mu(), pair.nu());
    if x.degree() != mu.len() as i64 - nu.len() as i64
        || x.mu_full().range() != mu.range()
        || x.nu_full().range() != nu.range()
    {
        return false;
    }
    let deepest = excluded.iter().map(Path::len).max().unwrap_or(0);
    // Compare both sides far enough to cover the heads and any exclusion.
    let n = x.mu_full().len().max(x.nu_full().len()) + mu.len() + nu.len() + deepest + 1;
    let xs = sequence(x.mu_full(), x.tail(), n + x.degree().unsigned_abs() as usize);
    let ys = sequence(x.nu_full(), x.tail(), n + x.degree().unsigned_abs() as usize);
    if !xs.starts_with(mu.edges()) || !ys.starts_with(nu.edges()) {
        return false;
    }
    let (zx, zy) = (&xs[mu.len()..], &ys[nu.len()..]);
    let finite = matches!(x.tail(), Continuation::Source);
    let k = if finite {
        zx.len().max(zy.len())
    } else {
        zx.len().min(zy.len())
    };
    if finite && zx.len() != zy.len() {
        return false;
    }
    if zx[..k.min(zx.len())] != zy[..k.min(zy.len())] {
        return false;
    }
    // z must also start at s(μ); a vertex-length z is checked by the ranges.
    if zx.is_empty() && x.mu_full().source() != pair.source() {
        return false;
    }
    !excluded.iter().any(|a| zx.starts_with(a.edges()))
}

pub fn brute_member_pair(pair: &PathPair, x: &GroupoidProbe) -> bool {
    brute_member(pair, &[], x)
}

/// A random graph with at least one edge.
pub fn graph_with_edges(rng: &mut SampleRng, max_v: usize, max_e: usize) -> Arc<Graph> {
    loop {
        let g = random_graph(rng, max_v, max_e);
        if g.edge_count() > 0 {
            return Arc::new(g);
        }
    }
}

/// A random basic bisection with up to two exclusions of length `≤ 2`.
pub fn random_bisection(rng: &mut SampleRng, g: &Graph, max_len: usize) -> BasicBisection {
    let pair = random_pair(rng, g, max_len);
    let holes: Vec<Path> = g
        .enumerate_paths(Some(pair.source()), None, 2)
        .into_iter()
        .filter(|p| !p.is_vertex())
        .collect();
    let count = rng.random_range(0..=2usize);
    let excluded = (0..count).filter_map(|_| holes.choose(rng).cloned()).collect();
    BasicBisection::new(g, pair, excluded).expect("holes start at s(μ)")
}

/// `count` probes drawn from cells of min-depth `depth`: even draws refine a
/// support pair, odd draws refine a random pair.
pub fn deep_probes(
    rng: &mut SampleRng,
    g: &Graph,
    support: &[PathPair],
    depth: usize,
    count: usize,
) -> Vec<GroupoidProbe> {
    (0..count)
        .map(|i| {
            let pair = match support.choose(rng) {
                Some(p) if i % 2 == 0 => p.clone(),
                _ => random_pair(rng, g, depth),
            };
            let cells = pair.expand(g, depth.max(pair.min_depth()));
            let cell = cells.choose(rng).expect("expansion is nonempty");
            random_point_in(rng, g, cell)
        })
        .collect()
}

/// Support pairs of all the given term lists.
pub fn supports<E>(lists: &[&[(PathPair, E)]]) -> Vec<PathPair> {
    lists.iter().flat_map(|l| l.iter().map(|(p, _)| p.clone())).collect()
}
