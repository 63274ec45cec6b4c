//! Line-oriented report documents.
//!
//! Every line is `key: value` with a fixed key order, so reports diff
//! byte for byte. Matrices print as 0/1 row arrays and dyadic values as a
//! binary string followed by the reduced fraction.

use std::fmt::Write as _;

use crate::boolmat::{BoolArray, BoolMatrix, BoolVector, Digraph, NodeUniverse};
use crate::derivation::{find_matches, Derivation, Match};
use crate::encoding::{ell_complex, norm, Dyadic};
use crate::mcl::ComplexTerm;
use crate::oracle::OracleReport;
use crate::production::{p_operator, production_compatible, Production, SwapCensus};
use crate::sequence::{AnalysisReport, Cell, Part, RuleSequence};

#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Report {
    text: String,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        let value = value.to_string();
        if value.is_empty() {
            let _ = writeln!(self.text, "{key}:");
        } else {
            let _ = writeln!(self.text, "{key}: {value}");
        }
        self
    }

    pub fn matrix(&mut self, key: &str, m: &BoolMatrix) -> &mut Self {
        self.field(key, rows(m))
    }

    pub fn vector(&mut self, key: &str, v: &BoolVector) -> &mut Self {
        self.field(key, format!("{:?}", v.to_vec()).replace(' ', ""))
    }

    pub fn dyadic(&mut self, key: &str, d: &Dyadic) -> &mut Self {
        self.field(key, d)
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.field(key, value)
    }

    /// `C ∨ iN` as four lines: certainty and nihil, edges and nodes.
    pub fn term(&mut self, key: &str, z: &ComplexTerm) -> &mut Self {
        self.matrix(&format!("{key} certainty edges"), &z.cert_edges)
            .vector(&format!("{key} certainty nodes"), &z.cert_nodes)
            .matrix(&format!("{key} nihil edges"), &z.nihil_edges)
            .vector(&format!("{key} nihil nodes"), &z.nihil_nodes)
    }

    pub fn digraph(&mut self, key: &str, g: &Digraph) -> &mut Self {
        self.field(&format!("{key} nodes"), node_list(g))
            .field(&format!("{key} edges"), edge_list(g))
    }

    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

impl std::fmt::Display for Report {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

pub fn rows(m: &BoolMatrix) -> String {
    format!("{:?}", m.rows()).replace(' ', "")
}

fn node_list(g: &Digraph) -> String {
    let u = g.universe();
    g.nodes.iter_ones().map(|i| u.label(i)).collect::<Vec<_>>().join(" ")
}

fn edge_list(g: &Digraph) -> String {
    let u = g.universe();
    g.edges
        .iter_ones()
        .map(|(i, j)| format!("{}->{}", u.label(i), u.label(j)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cell(u: &NodeUniverse, c: Cell) -> String {
    match c {
        Cell::Edge(i, j) => format!("edge {}->{}", u.label(i), u.label(j)),
        Cell::Node(i) => format!("node {}", u.label(i)),
    }
}

fn sequence_header(r: &mut Report, s: &RuleSequence) {
    r.field("sequence", &s.name)
        .field("application order", s.application_order())
        .field("display order", s.display_order())
        .field("nodes", s.universe().labels().join(" "));
}

pub fn render_analysis(s: &RuleSequence, a: &AnalysisReport) -> Report {
    let mut r = Report::new();
    r.field("command", "analyze").field("check", a.kind.as_str());
    sequence_header(&mut r, s);
    r.flag("ok", a.ok).term("result", &a.result);
    for (name, z) in &a.extra {
        r.term(name, z);
    }
    let u = s.universe();
    r.field("witnesses", a.witnesses.len());
    for w in &a.witnesses {
        let part = match w.part {
            Part::Certainty => "certainty",
            Part::Nihil => "nihil",
        };
        r.field(
            "witness",
            format!("{part} {} rule {} ({}): {}", cell(u, w.cell), w.rule, s.rule(w.rule).name, w.reason),
        );
    }
    for note in &a.notes {
        r.field("note", note);
    }
    r
}

fn mapping(m: &Match, p: &Production, host: &Digraph) -> String {
    let pairs = m.labelled(p.universe(), host.universe());
    if pairs.is_empty() {
        return "(empty)".to_string();
    }
    pairs.iter().map(|(a, b)| format!("{a}={b}")).collect::<Vec<_>>().join(" ")
}

/// `list_all` adds every valid match at each step.
pub fn render_derivation(host_name: &str, host: &Digraph, s: &RuleSequence, d: &Derivation, list_all: bool) -> Report {
    let mut r = Report::new();
    r.field("command", "derive").field("host", host_name);
    sequence_header(&mut r, s);
    r.digraph("input", host);
    for step in &d.steps {
        let p = s.rule(step.step);
        let key = format!("step {}", step.step);
        r.field(&key, &step.rule)
            .field(&format!("{key} available"), step.available)
            .field(&format!("{key} match"), mapping(&step.matched, p, &step.input));
        if list_all {
            for (k, m) in find_matches(p, &step.input).iter().enumerate() {
                r.field(&format!("{key} candidate {k}"), mapping(m, p, &step.input));
            }
        }
        r.digraph(&format!("{key} output"), &step.output);
    }
    r.flag("completed", d.completed());
    if let Some(err) = &d.failure {
        r.field("failure", err);
    }
    r.digraph("result", &d.result);
    r
}

pub fn render_graph_encoding(name: &str, g: &Digraph) -> Report {
    let z = ComplexTerm::from_matrices(g.edges.clone(), BoolMatrix::zeros(g.universe())).expect("same universe");
    let mut r = Report::new();
    r.field("command", "encode")
        .field("graph", name)
        .field("nodes", g.universe().labels().join(" "))
        .matrix("edges", &g.edges)
        .vector("present", &g.nodes)
        .field("ell", ell_complex(&z))
        .dyadic("norm", &norm(&z));
    r
}

pub fn render_production_encoding(p: &Production) -> Report {
    let w = p_operator(p);
    let lhs = p.lhs_term();
    let rhs = p.rhs_term();
    let mut r = Report::new();
    r.field("command", "encode")
        .field("production", &p.name)
        .field("nodes", p.universe().labels().join(" "))
        .flag("compatible", production_compatible(p))
        .matrix("e", &p.e_edges)
        .matrix("r", &p.r_edges)
        .matrix("K", &p.k)
        .matrix("Q", &p.q)
        .matrix("swap certainty", &w.term.cert_edges)
        .matrix("swap nihil", &w.term.nihil_edges)
        .field("swap arity", w.arity())
        .field("lhs term", ell_complex(&lhs))
        .dyadic("lhs norm", &norm(&lhs))
        .field("rhs term", ell_complex(&rhs))
        .dyadic("rhs norm", &norm(&rhs))
        .field("swap", ell_complex(&w.term));
    r
}

pub fn render_census(c: &SwapCensus) -> Report {
    let mut r = Report::new();
    r.field("command", "census")
        .field("node count", c.node_count)
        .field("productions", c.productions)
        .field("classes", c.classes.len())
        .field(
            "histogram",
            c.histogram.iter().map(usize::to_string).collect::<Vec<_>>().join(" "),
        );
    for (k, (acted, size)) in c.classes.iter().enumerate() {
        r.field(&format!("class {k}"), format!("{} size {size}", rows(acted)));
    }
    r
}

pub fn render_oracle(o: &OracleReport) -> Report {
    let mut r = Report::new();
    r.field("oracle", &o.name);
    if let Some(seed) = o.seed {
        r.field("seed", seed);
    }
    r.field("checked", o.checked).field("violations", o.violations.len()).flag("ok", o.passed());
    for v in &o.violations {
        r.field("violation", format!("input {} expected {} got {}", v.input, v.expected, v.got));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequence::coherence;

    #[test]
    fn matrix_and_dyadic_format() {
        let u = NodeUniverse::numbered(2);
        let m = BoolMatrix::from_rows(&u, &[&[0, 1], &[1, 0]]).unwrap();
        let mut r = Report::new();
        r.matrix("m", &m).dyadic("d", &Dyadic::parse_binary("0.011b").unwrap());
        assert_eq!(r.as_str(), "m: [[0,1],[1,0]]\nd: 0.011b (3/8)\n");
    }

    #[test]
    fn production_encoding_example() {
        let u = NodeUniverse::numbered(2);
        let lhs = Digraph::from_labels(&u, &["1", "2"], &[("1", "2"), ("2", "1")]).unwrap();
        let rhs = Digraph::from_labels(&u, &["1", "2"], &[("1", "1"), ("1", "2"), ("2", "1")]).unwrap();
        let p = Production::from_static("x", lhs, rhs).unwrap();
        let text = render_production_encoding(&p).into_string();
        assert!(text.contains("lhs term: re=0.011b (3/8), im=0.1b (1/2)\n"), "{text}");
    }

    #[test]
    fn oracle_report_lines() {
        let mut o = OracleReport::new("matches", Some(7));
        o.record(true, String::new, String::new, String::new);
        o.record(false, || "x".into(), || "1".into(), || "2".into());
        let text = render_oracle(&o).into_string();
        assert_eq!(
            text,
            "oracle: matches\nseed: 7\nchecked: 2\nviolations: 1\nok: false\nviolation: input x expected 1 got 2\n"
        );
    }

    #[test]
    fn analysis_is_deterministic() {
        let u = NodeUniverse::numbered(2);
        let del = Production::from_static(
            "del",
            Digraph::from_labels(&u, &["1", "2"], &[("1", "2")]).unwrap(),
            Digraph::from_labels(&u, &["1", "2"], &[]).unwrap(),
        )
        .unwrap();
        let s = RuleSequence::new("s", &u, vec![del.clone(), del]).unwrap();
        let a = render_analysis(&s, &coherence(&s)).into_string();
        assert_eq!(a, render_analysis(&s, &coherence(&s)).into_string());
        assert!(a.contains("ok: false\n"));
        assert!(a.contains("display order: del;del\n"));
        assert!(a.contains("witness: certainty edge 1->2 rule 2 (del): needed but deleted by an earlier rule\n"), "{a}");
    }
}
