mod common;

use common::{brute_member, brute_member_pair, graph_with_edges, random_bisection};
use leavitt_core::cylinder::{disjointify, probes_in_pair, BasicBisection, GroupoidProbe, PathPair, Subtraction};
use leavitt_core::graph::Graph;
use leavitt_core::sample::{random_pair, random_probes, rng};
use proptest::prelude::*;

fn probes_for(rng: &mut leavitt_core::sample::SampleRng, g: &Graph, pairs: &[&PathPair]) -> Vec<GroupoidProbe> {
    let support: Vec<PathPair> = pairs.iter().map(|p| (*p).clone()).collect();
    random_probes(rng, g, &support, 3, 40)
}

fn member(b: &BasicBisection, x: &GroupoidProbe) -> bool {
    brute_member(b.pair(), b.excluded(), x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_membership_matches_definition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = graph_with_edges(&mut r, 4, 7);
        let p = random_pair(&mut r, &g, 3);
        let probes = probes_for(&mut r, &g, &[&p]);
        prop_assert!(probes.iter().any(|x| brute_member_pair(&p, x)));
        for x in probes {
            prop_assert_eq!(p.contains(&g, &x), brute_member_pair(&p, &x));
        }
    }

    #[test]
    fn bisection_membership_matches_definition(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = graph_with_edges(&mut r, 4, 7);
        let b = random_bisection(&mut r, &g, 2);
        for x in probes_for(&mut r, &g, &[b.pair()]) {
            prop_assert_eq!(b.member(&g, &x), member(&b, &x));
        }
    }

    #[test]
    fn intersection_and_subtraction_of_pairs(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = graph_with_edges(&mut r, 4, 7);
        let p = random_pair(&mut r, &g, 3);
        let q = random_pair(&mut r, &g, 3);
        let meet = p.intersect(&q);
        let rest = p.subtract(&g, &q);
        for x in probes_for(&mut r, &g, &[&p, &q]) {
            let (in_p, in_q) = (brute_member_pair(&p, &x), brute_member_pair(&q, &x));
            let in_meet = meet.as_ref().is_some_and(|m| brute_member_pair(m, &x));
            prop_assert_eq!(in_meet, in_p && in_q);
            let in_rest = match &rest {
                Subtraction::Empty => false,
                Subtraction::Unchanged(u) => brute_member_pair(u, &x),
                Subtraction::Remainder(b) => member(b, &x),
            };
            prop_assert_eq!(in_rest, in_p && !in_q);
        }
    }

    #[test]
    fn bisection_intersection_and_difference(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = graph_with_edges(&mut r, 4, 7);
        let a = random_bisection(&mut r, &g, 2);
        let b = random_bisection(&mut r, &g, 2);
        let meet = a.intersect(&b);
        let pieces = a.difference(&g, &b);
        for x in probes_for(&mut r, &g, &[a.pair(), b.pair()]) {
            let (in_a, in_b) = (member(&a, &x), member(&b, &x));
            prop_assert_eq!(meet.as_ref().is_some_and(|m| member(m, &x)), in_a && in_b);
            let hits = pieces.iter().filter(|p| member(p, &x)).count();
            prop_assert!(hits <= 1, "pieces overlap");
            prop_assert_eq!(hits == 1, in_a && !in_b);
        }
    }

    #[test]
    fn disjointify_partitions_the_union(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = graph_with_edges(&mut r, 4, 6);
        let inputs: Vec<BasicBisection> = (0..3).map(|_| random_bisection(&mut r, &g, 2)).collect();
        let atoms = disjointify(&g, &inputs);
        for a in &atoms {
            prop_assert!(!a.is_empty(&g));
        }
        let pairs: Vec<&PathPair> = inputs.iter().map(BasicBisection::pair).collect();
        for x in probes_for(&mut r, &g, &pairs) {
            let in_union = inputs.iter().any(|b| member(b, &x));
            let hits = atoms.iter().filter(|a| member(a, &x)).count();
            prop_assert!(hits <= 1);
            prop_assert_eq!(hits == 1, in_union);
        }
    }

    #[test]
    fn emptiness_matches_deep_cells(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = graph_with_edges(&mut r, 4, 6);
        let b = random_bisection(&mut r, &g, 2);
        let deepest = b.excluded().iter().map(|a| a.len()).max().unwrap_or(0);
        // Cells this deep lie wholly inside or wholly outside b.
        let cells = probes_in_pair(&g, b.pair(), b.pair().min_depth() + deepest);
        let seen = cells.iter().any(|x| member(&b, x));
        prop_assert_eq!(b.is_empty(&g), !seen);
    }

    #[test]
    fn expansion_partitions_the_cylinder(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = graph_with_edges(&mut r, 4, 7);
        let p = random_pair(&mut r, &g, 2);
        let cells = p.expand(&g, p.min_depth() + 2);
        for x in probes_for(&mut r, &g, &[&p]) {
            let hits = cells.iter().filter(|c| brute_member_pair(c, &x)).count();
            prop_assert_eq!(hits, usize::from(brute_member_pair(&p, &x)));
        }
    }

    #[test]
    fn inverse_swaps_the_heads(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = graph_with_edges(&mut r, 4, 7);
        let b = random_bisection(&mut r, &g, 2);
        let inv = b.invert();
        for x in probes_for(&mut r, &g, &[b.pair()]) {
            prop_assert_eq!(member(&b, &x), member(&inv, &x.inverse()));
        }
    }
}

#[test]
fn cylinder_of_a_loop() {
    let g = Graph::from_compact("v | e:v->v").unwrap();
    let vv = PathPair::parse(&g, "v", "v").unwrap();
    let ee = PathPair::parse(&g, "e", "e").unwrap();
    // Z(e,e) is all of Z(v,v) in a single loop.
    match vv.subtract(&g, &ee) {
        Subtraction::Remainder(rest) => assert!(rest.is_empty(&g)),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(vv.intersect(&ee), Some(ee.clone()));
}
