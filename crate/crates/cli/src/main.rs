//! `leavitt`: command-line front end for the leavitt-core library.
//!
//! Exit codes: 0 pass, 1 usage, 2 parse or validation error, 3 hypothesis
//! violation, 4 internal invariant failure.

use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use leavitt_core::collapse::{
    check_phi_fin_image, collapse, pointed_groupoid_iso_check, validate_collapsible, CollapseSpec,
};
use leavitt_core::graph::{Graph, VertexSubset};
use leavitt_core::leavitt::{check_ck_relations, eval_word, LeavittWord};
use leavitt_core::morita::{morita_report, MoritaConfig, MoritaError};
use leavitt_core::report::{self, Format, Report};
use leavitt_core::ring::{Integers, IntegersMod, Rationals, RingSelector};
use leavitt_core::sample::Sampleable;

#[derive(Parser)]
#[command(
    name = "leavitt",
    version,
    about = "Leavitt path algebras as Steinberg algebras of graph groupoids"
)]
struct Cli {
    /// Output format: text or kv.
    #[arg(long, global = true, default_value = "text", value_parser = parse_format)]
    format: Format,
    /// Seed for every randomized sample.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArg {
    /// Graph file.
    #[arg(long)]
    graph: std::path::PathBuf,
}

#[derive(Args)]
struct RingArg {
    /// Coefficient ring: z, q or zmod:N.
    #[arg(long, default_value = "z", value_parser = parse_ring)]
    ring: RingSelector,
}

#[derive(Subcommand)]
enum Command {
    /// Check a graph file, and the collapse hypotheses when --t0 is given.
    Validate {
        #[command(flatten)]
        graph: GraphArg,
        /// Comma-separated vertices to collapse.
        #[arg(long)]
        t0: Option<String>,
    },
    /// Multiply two Leavitt words and print the canonical product.
    Mul {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        ring: RingArg,
        left: String,
        right: String,
    },
    /// Print the graded components of a Leavitt word.
    Grade {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        ring: RingArg,
        word: String,
    },
    /// Verify every Cuntz-Krieger relation instance.
    Relations {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        ring: RingArg,
    },
    /// Collapse T^0 and check the groupoid isomorphism.
    Collapse {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        t0: String,
        /// Pair length bound for the isomorphism check.
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Run the Morita-context pipeline for collapsing T^0.
    MoritaCheck {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        ring: RingArg,
        #[arg(long)]
        t0: String,
        /// Pair length bound for the surjectivity witnesses.
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    Format::parse(s).ok_or_else(|| format!("unknown format `{s}` (expected text or kv)"))
}

fn parse_ring(s: &str) -> Result<RingSelector, String> {
    RingSelector::parse(s).map_err(|e| e.to_string())
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

/// The report so far plus the exit code it implies.
type Outcome = Result<(Report, u8), Failure>;

fn load_graph(arg: &GraphArg) -> Result<Arc<Graph>, Failure> {
    let text = std::fs::read_to_string(&arg.graph)
        .map_err(|e| fail(2, format!("cannot read {}: {e}", arg.graph.display())))?;
    Graph::parse(&text)
        .map(Arc::new)
        .map_err(|e| fail(2, format!("{}: {e}", arg.graph.display())))
}

fn collapse_spec(g: &Arc<Graph>, t0: &str) -> Result<CollapseSpec, Failure> {
    let t0 = VertexSubset::parse(g, t0).map_err(|e| fail(2, e))?;
    CollapseSpec::new(g.clone(), t0).map_err(|e| fail(3, e))
}

fn graph_section(report: &mut Report, g: &Graph) {
    let s = report.section("graph");
    s.put("vertices", g.vertex_count());
    s.put("edges", g.edge_count());
    s.put("sources", g.sources().render(g));
    s.put("acyclic", g.is_acyclic());
}

fn validate(graph: &GraphArg, t0: Option<&str>) -> Outcome {
    let g = load_graph(graph)?;
    let mut rep = Report::new();
    graph_section(&mut rep, &g);
    let mut code = 0;
    if let Some(t0) = t0 {
        let spec = collapse_spec(&g, t0)?;
        let v = validate_collapsible(&spec);
        report::validation_section(&mut rep, &v);
        if !v.ok() {
            code = 3;
        }
    }
    Ok((rep, code))
}

fn eval<R: Sampleable>(
    g: &Arc<Graph>,
    ring: &R,
    text: &str,
) -> Result<leavitt_core::steinberg::SteinbergElement<R>, Failure> {
    let w = LeavittWord::parse(text).map_err(|e| fail(2, e))?;
    eval_word(g, ring, &w).map_err(|e| fail(2, e))
}

fn mul<R: Sampleable>(g: &Arc<Graph>, ring: &R, left: &str, right: &str) -> Outcome {
    let a = eval(g, ring, left)?;
    let b = eval(g, ring, right)?;
    let p = a.convolve(&b).map_err(|e| fail(4, e))?;
    let mut rep = Report::new();
    report::element_section(&mut rep, "product", &p);
    report::graded_section(&mut rep, "graded", &p);
    Ok((rep, 0))
}

fn grade<R: Sampleable>(g: &Arc<Graph>, ring: &R, word: &str) -> Outcome {
    let f = eval(g, ring, word)?;
    let mut rep = Report::new();
    report::element_section(&mut rep, "element", &f);
    report::graded_section(&mut rep, "graded", &f);
    Ok((rep, 0))
}

fn relations<R: Sampleable>(g: &Arc<Graph>, ring: &R) -> Outcome {
    let r = check_ck_relations(g, ring);
    let mut rep = Report::new();
    report::relations_section(&mut rep, &r);
    Ok((rep, if r.all_hold() { 0 } else { 4 }))
}

fn collapse_cmd(graph: &GraphArg, t0: &str, depth: usize) -> Outcome {
    let g = load_graph(graph)?;
    let spec = collapse_spec(&g, t0)?;
    let mut rep = Report::new();
    let v = validate_collapsible(&spec);
    report::validation_section(&mut rep, &v);
    if !v.ok() {
        return Ok((rep, 3));
    }
    let cert = collapse(&spec).map_err(|e| fail(4, e))?;
    report::collapse_sections(&mut rep, &cert);
    let image = check_phi_fin_image(&cert, 5);
    report::image_section(&mut rep, &image);
    let iso = pointed_groupoid_iso_check(&cert, depth);
    report::iso_section(&mut rep, &iso);
    Ok((rep, if image.ok() && iso.ok() { 0 } else { 4 }))
}

fn morita<R: Sampleable>(g: &Arc<Graph>, ring: &R, t0: &str, depth: usize, seed: u64) -> Outcome {
    let spec = collapse_spec(g, t0)?;
    let config = MoritaConfig {
        depth,
        seed,
        ..MoritaConfig::default()
    };
    let mut rep = Report::new();
    let m = match morita_report(&spec, ring, &config) {
        Ok(m) => m,
        Err(MoritaError::Hypotheses(_)) => {
            report::validation_section(&mut rep, &validate_collapsible(&spec));
            return Ok((rep, 3));
        }
        Err(e) => return Err(fail(4, e)),
    };
    report::morita_sections(&mut rep, &m);
    let code = if m.ok() {
        0
    } else if !m.validation.ok() || m.transversal.is_err() {
        3
    } else {
        4
    };
    Ok((rep, code))
}

macro_rules! with_ring {
    ($sel:expr, |$r:ident| $body:expr) => {
        match $sel {
            RingSelector::Integers => {
                let $r = Integers;
                $body
            }
            RingSelector::Rationals => {
                let $r = Rationals;
                $body
            }
            RingSelector::IntegersMod(n) => {
                let $r = IntegersMod::new(n).expect("selector validated the modulus");
                $body
            }
        }
    };
}

fn run(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate { graph, t0 } => validate(graph, t0.as_deref()),
        Command::Mul {
            graph,
            ring,
            left,
            right,
        } => {
            let g = load_graph(graph)?;
            with_ring!(ring.ring, |r| mul(&g, &r, left, right))
        }
        Command::Grade { graph, ring, word } => {
            let g = load_graph(graph)?;
            with_ring!(ring.ring, |r| grade(&g, &r, word))
        }
        Command::Relations { graph, ring } => {
            let g = load_graph(graph)?;
            with_ring!(ring.ring, |r| relations(&g, &r))
        }
        Command::Collapse { graph, t0, depth } => collapse_cmd(graph, t0, *depth),
        Command::MoritaCheck { graph, ring, t0, depth } => {
            let g = load_graph(graph)?;
            with_ring!(ring.ring, |r| morita(&g, &r, t0, *depth, cli.seed))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok((rep, code)) => {
            print!("{}", rep.render(cli.format));
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
