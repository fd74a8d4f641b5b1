//! Deterministic reports: named sections of ordered key/value entries,
//! rendered as indented text or as flat `[section]` / `key = value` lines.

use std::fmt::Display;

use crate::collapse::{CheckStatus, CollapseCertificate, ImageCheck, IsoReport, ValidationReport};
use crate::cylinder::BasicBisection;
use crate::leavitt::{indicator_as_word, RelationReport};
use crate::morita::{MoritaReport, Side};
use crate::ring::CoefficientRing;
use crate::steinberg::SteinbergElement;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Kv,
}

impl Format {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "text" => Some(Self::Text),
            "kv" => Some(Self::Kv),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn put(&mut self, key: impl Into<String>, value: impl Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn section(&mut self, name: impl Into<String>) -> &mut Section {
        self.sections.push(Section {
            name: name.into(),
            entries: Vec::new(),
        });
        self.sections.last_mut().unwrap()
    }

    pub fn find(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn extend(&mut self, other: Report) {
        self.sections.extend(other.sections);
    }

    /// Multi-line values become `key.1`, `key.2`, ... in kv form and an
    /// indented block in text form.
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            match format {
                Format::Kv => {
                    out.push_str(&format!("[{}]\n", s.name));
                    for (k, v) in &s.entries {
                        if v.contains('\n') {
                            for (j, line) in v.lines().enumerate() {
                                out.push_str(&format!("{k}.{} = {line}\n", j + 1));
                            }
                        } else {
                            out.push_str(&format!("{k} = {v}\n"));
                        }
                    }
                }
                Format::Text => {
                    if i > 0 {
                        out.push('\n');
                    }
                    out.push_str(&format!("== {} ==\n", s.name));
                    for (k, v) in &s.entries {
                        if v.contains('\n') {
                            out.push_str(&format!("{k}:\n"));
                            for line in v.lines() {
                                out.push_str(&format!("    {line}\n"));
                            }
                        } else {
                            out.push_str(&format!("{k}: {v}\n"));
                        }
                    }
                }
            }
        }
        out
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// `c*word + ...` with the words from [`indicator_as_word`].
pub fn element_word<R: CoefficientRing>(f: &SteinbergElement<R>) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let g = f.graph();
    let ring = f.ring();
    f.terms()
        .iter()
        .map(|(p, c)| {
            let w = indicator_as_word(g, &BasicBisection::from(p.clone()));
            if *c == ring.one() {
                w.to_string()
            } else {
                format!("{}*{w}", ring.format(c))
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// Term records `(mu, nu, F, coefficient)` in canonical order.
pub fn element_section<R: CoefficientRing>(report: &mut Report, name: &str, f: &SteinbergElement<R>) {
    let g = f.graph().clone();
    let s = report.section(name);
    s.put("ring", f.ring().name());
    s.put("terms", f.terms().len());
    for (i, (p, c)) in f.terms().iter().enumerate() {
        s.put(
            format!("term.{}", i + 1),
            format!(
                "({}, {}, {{}}, {})",
                p.mu().render(&g),
                p.nu().render(&g),
                f.ring().format(c)
            ),
        );
    }
    s.put("word", element_word(f));
}

pub fn graded_section<R: CoefficientRing>(report: &mut Report, name: &str, f: &SteinbergElement<R>) {
    let parts = f.grade();
    let s = report.section(name);
    s.put("degrees", parts.components.len());
    for (k, part) in &parts.components {
        s.put(format!("degree.{k}"), part.render());
    }
}

pub fn validation_section(report: &mut Report, v: &ValidationReport) {
    let s = report.section("hypotheses");
    for c in &v.checks {
        let value = match &c.status {
            CheckStatus::Pass => "pass".to_string(),
            CheckStatus::Fail(w) => format!("fail ({w})"),
            CheckStatus::Vacuous(why) => format!("vacuous ({why})"),
        };
        s.put(c.name, value);
    }
    s.put("result", verdict(v.ok()));
}

pub fn relations_section(report: &mut Report, r: &RelationReport) {
    let s = report.section("relations");
    for c in &r.checks {
        s.put(format!("{}.{}", c.family.label(), c.relation), verdict(c.holds));
    }
    s.put("result", verdict(r.all_hold()));
}

pub fn collapse_sections(report: &mut Report, cert: &CollapseCertificate) {
    let f = cert.collapsed();
    let s = report.section("collapsed-graph");
    s.put("vertices", f.vertex_count());
    s.put("edges", f.edge_count());
    s.put("file", f.serialize().trim_end());
    let s = report.section("edge-map");
    for (id, beta) in cert.edge_table() {
        s.put(id, beta);
    }
}

pub fn image_section(report: &mut Report, c: &ImageCheck) {
    let s = report.section("path-image");
    s.put("max_len", c.max_len);
    s.put("collisions", c.collisions.len());
    s.put("missing", c.missing.len());
    s.put("extra", c.extra.len());
    for (label, list) in [
        ("collision", &c.collisions),
        ("missing", &c.missing),
        ("extra", &c.extra),
    ] {
        if let Some(first) = list.first() {
            s.put(format!("first_{label}"), first);
        }
    }
    s.put("result", verdict(c.ok()));
}

pub fn iso_section(report: &mut Report, r: &IsoReport) {
    let s = report.section("groupoid-iso");
    s.put("depth", r.depth);
    for p in &r.parts {
        s.put(format!("{}.checked", p.name), p.checked);
        s.put(
            format!("{}.result", p.name),
            match &p.failure {
                None => "pass".to_string(),
                Some(w) => format!("fail ({w})"),
            },
        );
    }
    s.put("result", verdict(r.ok()));
}

pub fn morita_sections(report: &mut Report, m: &MoritaReport) {
    validation_section(report, &m.validation);
    let s = report.section("transversal");
    match &m.transversal {
        Ok(()) => s.put("result", "pass"),
        Err(why) => s.put("result", format!("fail ({why})")),
    };
    let s = report.section("witnesses");
    for side in [Side::Psi, Side::Phi] {
        let of_side: Vec<_> = m.witnesses.iter().filter(|w| w.side == side).collect();
        let failed = of_side.iter().filter(|w| !w.ok()).count();
        let factors: usize = of_side.iter().map(|w| w.factors.len()).sum();
        s.put(format!("{side}.targets"), of_side.len());
        s.put(format!("{side}.factors"), factors);
        s.put(format!("{side}.failures"), failed);
    }
    s.put("result", verdict(m.witnesses_ok()));
    let s = report.section("eq-ops");
    s.put("checked", m.eq_ops_checked);
    s.put("failures", m.eq_ops_failures);
    s.put("balanced.checked", m.balanced_checked);
    s.put("balanced.failures", m.balanced_failures);
    s.put("result", verdict(m.eq_ops_failures == 0 && m.balanced_failures == 0));
    if let Some(f) = &m.collapsed {
        let s = report.section("collapsed-graph");
        s.put("vertices", f.vertex_count());
        s.put("edges", f.edge_count());
        s.put("file", f.serialize().trim_end());
    }
    if let Some(c) = &m.image {
        image_section(report, c);
    }
    if let Some(r) = &m.iso {
        iso_section(report, r);
    }
    let s = report.section("morita");
    s.put("ring", &m.ring);
    s.put("result", verdict(m.ok()));
}
