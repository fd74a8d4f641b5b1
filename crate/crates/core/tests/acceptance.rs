//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::sync::Arc;
use std::time::Instant;

use common::{deep_probes, supports};
use leavitt_core::collapse::{check_phi_fin_image, collapse, pointed_groupoid_iso_check, CollapseSpec};
use leavitt_core::cylinder::{pairs_up_to, BasicBisection, GroupoidProbe, PathPair};
use leavitt_core::graph::{Graph, VertexSubset};
use leavitt_core::leavitt::{check_ck_relations, eval_word, indicator_as_word, LeavittWord};
use leavitt_core::morita::{
    check_transversal, eq_ops_check, morita_report, surjectivity_witness, Corner, MoritaConfig, Side, Transversal,
};
use leavitt_core::report::{self, Format, Report};
use leavitt_core::ring::{Integers, IntegersMod, Rationals};
use leavitt_core::sample::{
    random_collapse_instance, random_element, random_element_where, random_graph, random_homogeneous, random_point_in,
    rng, SampleRng, Sampleable,
};
use leavitt_core::steinberg::{oracle_convolve_at, SteinbergElement};
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

const CORPUS_GRAPHS: usize = 20;
const ORACLE_PAIRS: usize = 500;
const ORACLE_PROBES: usize = 50;
const LAW_TRIPLES: usize = 200;
const GRADING_SAMPLES: usize = 200;
const COLLAPSE_INSTANCES: usize = 20;
const EQ_OPS_TUPLES: usize = 200;

fn corpus() -> Vec<Arc<Graph>> {
    let mut r = rng(0x6c65_6176);
    let mut out = Vec::new();
    while out.len() < CORPUS_GRAPHS {
        let g = random_graph(&mut r, 6, 10);
        if g.edge_count() > 0 {
            out.push(Arc::new(g));
        }
    }
    out
}

fn collapse_corpus() -> Vec<(Arc<Graph>, VertexSubset)> {
    let mut r = rng(0x636f_6c6c);
    (0..COLLAPSE_INSTANCES)
        .map(|_| random_collapse_instance(&mut r, 6, 10, 6))
        .collect()
}

fn fixture(compact: &str) -> Arc<Graph> {
    Arc::new(Graph::from_compact(compact).expect("fixture parses"))
}

fn loop_collapse() -> (Arc<Graph>, VertexSubset) {
    let g = fixture("v;w | e1:w->v; e2:v->w");
    let t0 = VertexSubset::parse(&g, "w").unwrap();
    (g, t0)
}

fn outsplitting() -> (Arc<Graph>, VertexSubset) {
    let g = fixture("v1;v2;t | x1:t->v1; x2:t->v2; a:v1->t; b:v2->t");
    let t0 = VertexSubset::parse(&g, "t").unwrap();
    (g, t0)
}

/// Returns the number of probes and how many had a nonzero value.
fn oracle_for_ring<R: Sampleable>(graphs: &[Arc<Graph>], ring: &R, seed: u64) -> Result<(usize, usize), String> {
    let mut r = rng(seed);
    let (mut probes, mut nonzero) = (0, 0);
    for i in 0..ORACLE_PAIRS {
        let g = &graphs[i % graphs.len()];
        let f = random_element(&mut r, g, ring, 3, 2);
        let h = random_element(&mut r, g, ring, 3, 2);
        let fh = f.convolve(&h).map_err(|e| e.to_string())?;
        let (ft, ht) = (f.term_list(), h.term_list());
        let depth = f.depth().max(h.depth()) + 1;
        let support = supports(&[&ft, &ht, &fh.term_list()]);
        for x in deep_probes(&mut r, g, &support, depth, ORACLE_PROBES) {
            let (got, want) = (fh.evaluate(&x), oracle_convolve_at(g, ring, &ft, &ht, &x));
            if got != want {
                return Err(format!(
                    "{}: ({}) * ({}) at {}: {} vs oracle {}",
                    ring.name(),
                    f.render(),
                    h.render(),
                    x.render(g),
                    ring.format(&got),
                    ring.format(&want)
                ));
            }
            probes += 1;
            nonzero += usize::from(!ring.is_zero(&want));
        }
    }
    Ok((probes, nonzero))
}

fn c1_oracle(graphs: &[Arc<Graph>]) -> Outcome {
    let (mut probes, mut nonzero) = (0, 0);
    for (p, n) in [
        oracle_for_ring(graphs, &Integers, 1)?,
        oracle_for_ring(graphs, &Rationals, 2)?,
        oracle_for_ring(graphs, &IntegersMod::new(4).unwrap(), 3)?,
    ] {
        probes += p;
        nonzero += n;
    }
    Ok(format!(
        "{} graphs, {} pairs per ring over z, q, zmod:4, {probes} probes, {nonzero} nonzero",
        graphs.len(),
        ORACLE_PAIRS
    ))
}

fn laws_for_ring<R: Sampleable>(graphs: &[Arc<Graph>], ring: &R, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    let fail = |what: &str, i: usize| format!("{} {what} fails on triple {i}", ring.name());
    for i in 0..LAW_TRIPLES {
        let g = &graphs[i % graphs.len()];
        let f = random_element(&mut r, g, ring, 2, 2);
        let h = random_element(&mut r, g, ring, 2, 2);
        let k = random_element(&mut r, g, ring, 2, 2);
        let m = |a: &SteinbergElement<R>, b: &SteinbergElement<R>| a.convolve(b).unwrap();
        let s = |a: &SteinbergElement<R>, b: &SteinbergElement<R>| a.add(b).unwrap();
        if m(&m(&f, &h), &k) != m(&f, &m(&h, &k)) {
            return Err(fail("associativity", i));
        }
        if m(&f, &s(&h, &k)) != s(&m(&f, &h), &m(&f, &k)) {
            return Err(fail("left distributivity", i));
        }
        if m(&s(&f, &h), &k) != s(&m(&f, &k), &m(&h, &k)) {
            return Err(fail("right distributivity", i));
        }
    }
    Ok(())
}

fn c2_laws(graphs: &[Arc<Graph>]) -> Outcome {
    laws_for_ring(graphs, &Integers, 11)?;
    laws_for_ring(graphs, &Rationals, 12)?;
    laws_for_ring(graphs, &IntegersMod::new(4).unwrap(), 13)?;
    Ok(format!(
        "{LAW_TRIPLES} triples per ring, associativity and both distributive laws"
    ))
}

fn grading_for_ring<R: Sampleable>(graphs: &[Arc<Graph>], ring: &R, seed: u64) -> Result<(), String> {
    let mut r = rng(seed);
    for i in 0..GRADING_SAMPLES {
        let g = &graphs[i % graphs.len()];
        let f = random_element(&mut r, g, ring, 4, 3);
        let parts = f.grade();
        let mut total = SteinbergElement::zero(g.clone(), ring.clone());
        for (k, part) in &parts.components {
            if part.terms().keys().any(|p| p.degree() != *k) {
                return Err(format!(
                    "{}: component {k} of {} is not homogeneous",
                    ring.name(),
                    f.render()
                ));
            }
            total = total.add(part).unwrap();
        }
        if total != f {
            return Err(format!("{}: components of {} do not sum back", ring.name(), f.render()));
        }
        let (n, m) = (r.random_range(-2i64..=2), r.random_range(-2i64..=2));
        let a = random_homogeneous(&mut r, g, ring, n, 3, 3);
        let b = random_homogeneous(&mut r, g, ring, m, 3, 3);
        let ab = a.convolve(&b).unwrap();
        if ab.terms().keys().any(|p| p.degree() != n + m) {
            return Err(format!(
                "{}: degree {n} times degree {m} leaves degree {}",
                ring.name(),
                n + m
            ));
        }
    }
    Ok(())
}

fn c3_grading(graphs: &[Arc<Graph>]) -> Outcome {
    grading_for_ring(graphs, &Integers, 21)?;
    grading_for_ring(graphs, &Rationals, 22)?;
    grading_for_ring(graphs, &IntegersMod::new(4).unwrap(), 23)?;
    Ok(format!(
        "{GRADING_SAMPLES} decompositions and {GRADING_SAMPLES} homogeneous products per ring"
    ))
}

fn c4_leavitt(graphs: &[Arc<Graph>]) -> Outcome {
    let mut relations = 0;
    let mut bisections = 0;
    for (i, g) in graphs.iter().enumerate() {
        for rep in [
            check_ck_relations(g, &Integers),
            check_ck_relations(g, &Rationals),
            check_ck_relations(g, &IntegersMod::new(4).unwrap()),
        ] {
            if let Some(bad) = rep.failures().next() {
                return Err(format!("graph {i}: relation {} fails", bad.relation));
            }
            relations += rep.checks.len();
        }
        // Every Z(μ,ν) with |μ|,|ν| ≤ 3, and every Z((μ,ν) ∖ {α}) whose paths
        // μα, να also have length ≤ 3.
        for pair in pairs_up_to(g, 3, |_| true) {
            let room = 3 - pair.mu().len().max(pair.nu().len());
            let holes = g
                .enumerate_paths(Some(pair.source()), None, room)
                .into_iter()
                .filter(|p| !p.is_vertex());
            let mut family = vec![BasicBisection::from(pair.clone())];
            family.extend(holes.map(|h| BasicBisection::new(g, pair.clone(), vec![h]).unwrap()));
            for b in family {
                let word = indicator_as_word(g, &b);
                let got = eval_word(g, &Integers, &word).map_err(|e| e.to_string())?;
                if got != SteinbergElement::indicator(g.clone(), Integers, &b) {
                    return Err(format!("graph {i}: word {word} does not evaluate to {}", b.render(g)));
                }
                bisections += 1;
            }
        }
    }
    Ok(format!(
        "{relations} relation instances, {bisections} bisections rebuilt from words"
    ))
}

fn c5_single_loop() -> Outcome {
    let g = fixture("v | e:v->v");
    let eval = |w: &str| eval_word(&g, &Integers, &LeavittWord::parse(w).unwrap()).unwrap();
    let p = eval("p(v)");
    if eval("st(e)*s(e)") != p || eval("s(e)*st(e)") != p {
        return Err("s_{e*} s_e = s_e s_{e*} = p_v fails".into());
    }
    let x = eval("s(e) + st(e)");
    let sq = x.convolve(&x).unwrap();
    // (s_e + s_{e*})^2 = s_e s_e + s_e s_{e*} + s_{e*} s_e + s_{e*} s_{e*},
    // expanded with s_e s_e = 1_{Z(ee,v)} and the two relations above.
    let pair = |m: &str, n: &str| PathPair::parse(&g, m, n).unwrap();
    let expected: [(i64, Vec<(PathPair, i64)>); 3] = [
        (2, vec![(pair("e.e", "v"), 1)]),
        (0, vec![(pair("v", "v"), 2)]),
        (-2, vec![(pair("v", "e.e"), 1)]),
    ];
    let parts = sq.grade();
    if parts.components.len() != 3 {
        return Err(format!("square has degrees {:?}", parts.degrees().collect::<Vec<_>>()));
    }
    for (n, terms) in expected {
        let want = SteinbergElement::from_terms(
            g.clone(),
            Integers,
            terms.into_iter().map(|(p, c)| (p, c.into())).collect(),
        );
        if sq.graded_component(n) != want {
            return Err(format!(
                "degree {n}: {} vs {}",
                sq.graded_component(n).render(),
                want.render()
            ));
        }
    }
    let mut r = rng(5);
    let xt = x.term_list();
    let mut probes: Vec<GroupoidProbe> = deep_probes(&mut r, &g, &supports(&[&sq.term_list()]), 3, 60);
    for d in -3i64..=3 {
        let mu = if d > 0 {
            "e.".repeat(d as usize) + "v"
        } else {
            "v".to_string()
        };
        let nu = if d < 0 {
            "e.".repeat((-d) as usize) + "v"
        } else {
            "v".to_string()
        };
        let (mu, nu) = (
            mu.trim_end_matches(".v").to_string(),
            nu.trim_end_matches(".v").to_string(),
        );
        probes.push(random_point_in(&mut r, &g, &pair(&mu, &nu)));
    }
    for x in &probes {
        let want = oracle_convolve_at(&g, &Integers, &xt, &xt, x);
        if sq.evaluate(x) != want {
            return Err(format!(
                "square disagrees with the pointwise oracle at {}",
                x.render(&g)
            ));
        }
    }
    Ok(format!(
        "relations, 3 graded components, {} oracle probes",
        probes.len()
    ))
}

fn c6_collapse(instances: &[(Arc<Graph>, VertexSubset)]) -> Outcome {
    let mut checked = 0;
    for (i, (g, t0)) in instances.iter().enumerate() {
        let spec = CollapseSpec::new(g.clone(), t0.clone()).map_err(|e| e.to_string())?;
        let cert = collapse(&spec).map_err(|e| format!("instance {i}: {e}"))?;
        let image = check_phi_fin_image(&cert, 5);
        if !image.ok() {
            return Err(format!("instance {i}: path image {image:?}"));
        }
        let iso = pointed_groupoid_iso_check(&cert, 3);
        if !iso.ok() {
            return Err(format!("instance {i}: {iso:?}"));
        }
        checked += iso.part("multiplicative").map_or(0, |p| p.checked);
    }
    let (g, t0) = loop_collapse();
    let cert = collapse(&CollapseSpec::new(g, t0).unwrap()).map_err(|e| e.to_string())?;
    let f = cert.collapsed();
    let is_loop = f.vertex_count() == 1 && f.edge_count() == 1 && !f.is_acyclic();
    if !is_loop || !check_phi_fin_image(&cert, 5).ok() || !pointed_groupoid_iso_check(&cert, 3).ok() {
        return Err(format!("loop fixture collapses to\n{}", f.serialize()));
    }
    Ok(format!(
        "{} instances, {checked} composable pairs, loop fixture gives {}",
        instances.len(),
        f.serialize().lines().last().unwrap_or("")
    ))
}

fn eq_ops_tuple<R: Sampleable>(r: &mut SampleRng, t: &Transversal, ring: &R) -> bool {
    let mut draw = |pos: Corner| random_element_where(r, t.graph(), ring, 3, 2, |p| pos.admits(t.corner_of(p)));
    let (m, m2) = (draw(Corner::GZ), draw(Corner::GZ));
    let (n, n2) = (draw(Corner::ZG), draw(Corner::ZG));
    eq_ops_check(t, &m, &m2, &n, &n2).unwrap_or(false)
}

fn c7_morita_context(instances: &[(Arc<Graph>, VertexSubset)]) -> Outcome {
    let mut witnesses = 0;
    let mut tuples = 0;
    let mut r = rng(71);
    let per_instance = EQ_OPS_TUPLES.div_ceil(instances.len());
    for (i, (g, t0)) in instances.iter().enumerate() {
        let f0 = t0.complement(g);
        let t = check_transversal(g, &f0).map_err(|e| format!("instance {i}: {e}"))?;
        for pair in pairs_up_to(g, 2, |_| true) {
            let mut sides = vec![Side::Phi];
            if f0.contains(pair.mu().range()) && f0.contains(pair.nu().range()) {
                sides.push(Side::Psi);
            }
            for side in sides {
                let w = surjectivity_witness(&t, &Integers, &pair, side).map_err(|e| e.to_string())?;
                if !w.ok() {
                    return Err(format!("instance {i}: {side} witness for {} fails", pair.render(g)));
                }
                witnesses += 1;
            }
        }
        for _ in 0..per_instance {
            let ok = eq_ops_tuple(&mut r, &t, &Integers)
                && eq_ops_tuple(&mut r, &t, &Rationals)
                && eq_ops_tuple(&mut r, &t, &IntegersMod::new(4).unwrap());
            if !ok {
                return Err(format!("instance {i}: eq-ops fails"));
            }
            tuples += 1;
        }
    }
    Ok(format!("{witnesses} witnesses, {tuples} eq-ops tuples per ring"))
}

fn report_ok<R: Sampleable>(g: &Arc<Graph>, t0: &VertexSubset, ring: &R) -> Result<(), String> {
    let spec = CollapseSpec::new(g.clone(), t0.clone()).map_err(|e| e.to_string())?;
    let rep = morita_report(&spec, ring, &MoritaConfig::default()).map_err(|e| e.to_string())?;
    if rep.ok() {
        Ok(())
    } else {
        let mut text = Report::new();
        report::morita_sections(&mut text, &rep);
        Err(text.render(Format::Text))
    }
}

fn c8_pipeline() -> Outcome {
    for (name, (g, t0)) in [("loop collapse", loop_collapse()), ("outsplitting", outsplitting())] {
        report_ok(&g, &t0, &Integers).map_err(|e| format!("{name} over z:\n{e}"))?;
        report_ok(&g, &t0, &Rationals).map_err(|e| format!("{name} over q:\n{e}"))?;
        report_ok(&g, &t0, &IntegersMod::new(4).unwrap()).map_err(|e| format!("{name} over zmod:4:\n{e}"))?;
    }
    Ok("loop collapse and outsplitting over z, q, zmod:4".into())
}

fn rendered(seed: u64, format: Format) -> String {
    let (g, t0) = outsplitting();
    let spec = CollapseSpec::new(g.clone(), t0).unwrap();
    let config = MoritaConfig {
        seed,
        ..MoritaConfig::default()
    };
    let m = morita_report(&spec, &IntegersMod::new(4).unwrap(), &config).unwrap();
    let mut rep = Report::new();
    report::morita_sections(&mut rep, &m);
    let mut r = rng(seed);
    let f = random_element(&mut r, &g, &Rationals, 4, 3);
    let h = random_element(&mut r, &g, &Rationals, 4, 3);
    let fh = f.convolve(&h).unwrap();
    report::element_section(&mut rep, "product", &fh);
    report::graded_section(&mut rep, "graded", &fh);
    rep.render(format)
}

fn c9_determinism() -> Outcome {
    for format in [Format::Text, Format::Kv] {
        for seed in [0, 9, 12345] {
            let (a, b) = (rendered(seed, format), rendered(seed, format));
            if a != b {
                return Err(format!("seed {seed} gives different {format:?} reports"));
            }
        }
    }
    Ok("3 seeds, text and kv, byte-identical".into())
}

fn main() {
    let graphs = corpus();
    let instances = collapse_corpus();
    let criteria: Vec<Criterion> = vec![
        ("convolution oracle equivalence", Box::new(|| c1_oracle(&graphs))),
        ("associativity and distributivity", Box::new(|| c2_laws(&graphs))),
        ("grading", Box::new(|| c3_grading(&graphs))),
        (
            "Leavitt family and words for bisections",
            Box::new(|| c4_leavitt(&graphs)),
        ),
        ("single-loop model", Box::new(c5_single_loop)),
        ("collapse", Box::new(|| c6_collapse(&instances))),
        ("Morita context", Box::new(|| c7_morita_context(&instances))),
        ("Morita pipeline on the fixtures", Box::new(c8_pipeline)),
        ("determinism", Box::new(c9_determinism)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!(
                    "FAIL criterion {}: {name} ({secs:.1}s)\n    {}",
                    i + 1,
                    why.replace('\n', "\n    ")
                );
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
