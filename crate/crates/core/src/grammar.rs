//! Text format for universes, productions, sequences and hosts.
//!
//! ```text
//! # comments run to the end of the line
//! universe: 1 2 3
//! production p4
//!   lhs: nodes 1 2 3; edges 3->3
//!   rhs: nodes 1 2 3; edges 1->2 1->3 2->3
//! sequence s: p4 p5
//! host G: nodes a b; edges a->b
//! ```
//!
//! Sequences list rules in application order. Hosts carry their own node
//! universe, made of the nodes they list.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::boolmat::{Digraph, NodeUniverse};
use crate::error::{MggError, Result};
use crate::production::Production;
use crate::sequence::RuleSequence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarFile {
    pub universe: Arc<NodeUniverse>,
    pub productions: Vec<Production>,
    /// Named lists of production names, in application order.
    pub sequences: Vec<(String, Vec<String>)>,
    pub hosts: Vec<(String, Digraph)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> MggError {
    MggError::Parse {
        line,
        message: message.into(),
    }
}

fn is_label(token: &str) -> bool {
    !token.is_empty() && !token.contains("->") && !token.contains([';', ':', '#'])
}

fn is_name(token: &str) -> bool {
    is_label(token)
}

/// `nodes a b; edges a->b` as label lists.
type RawGraph = (Vec<String>, Vec<(String, String)>);

fn parse_graph(text: &str, line: usize) -> Result<RawGraph> {
    let mut nodes = None;
    let mut edges = None;
    for part in text.split(';') {
        let mut tokens = part.split_whitespace();
        let Some(keyword) = tokens.next() else {
            continue;
        };
        match keyword {
            "nodes" if nodes.is_none() => {
                let mut list = Vec::new();
                for t in tokens {
                    if !is_label(t) {
                        return Err(parse_err(line, format!("malformed node label `{t}`")));
                    }
                    if list.iter().any(|l| l == t) {
                        return Err(parse_err(line, format!("node `{t}` listed twice")));
                    }
                    list.push(t.to_string());
                }
                nodes = Some(list);
            }
            "edges" if edges.is_none() => {
                let mut list = Vec::new();
                for t in tokens {
                    let pair = t
                        .split_once("->")
                        .filter(|(a, b)| is_label(a) && is_label(b))
                        .ok_or_else(|| parse_err(line, format!("malformed edge `{t}`, expected a->b")))?;
                    list.push((pair.0.to_string(), pair.1.to_string()));
                }
                edges = Some(list);
            }
            "nodes" | "edges" => return Err(parse_err(line, format!("`{keyword}` given twice"))),
            other => return Err(parse_err(line, format!("expected `nodes` or `edges`, found `{other}`"))),
        }
    }
    let nodes = nodes.ok_or_else(|| parse_err(line, "missing `nodes` list"))?;
    let edges = edges.unwrap_or_default();
    for (a, b) in &edges {
        for end in [a, b] {
            if !nodes.contains(end) {
                return Err(parse_err(line, format!("edge {a}->{b} names node `{end}` not listed in `nodes`")));
            }
        }
    }
    Ok((nodes, edges))
}

fn build_graph(u: &Arc<NodeUniverse>, raw: &RawGraph, line: usize) -> Result<Digraph> {
    for label in &raw.0 {
        if u.position(label).is_none() {
            return Err(parse_err(line, format!("unknown node label `{label}`")));
        }
    }
    Digraph::from_labels(u, &raw.0, &raw.1).map_err(|e| parse_err(line, e.to_string()))
}

struct PendingRule {
    name: String,
    line: usize,
    lhs: Option<Digraph>,
    rhs: Option<Digraph>,
}

fn finish_rule(rule: PendingRule, out: &mut Vec<Production>) -> Result<()> {
    let lhs = rule.lhs.ok_or_else(|| parse_err(rule.line, format!("production `{}` has no lhs", rule.name)))?;
    let rhs = rule.rhs.ok_or_else(|| parse_err(rule.line, format!("production `{}` has no rhs", rule.name)))?;
    out.push(Production::from_static(rule.name, lhs, rhs)?);
    Ok(())
}

/// Parses and validates a grammar file. Every production is built over the
/// declared universe.
pub fn parse_grammar(text: &str) -> Result<GrammarFile> {
    let mut universe: Option<Arc<NodeUniverse>> = None;
    let mut productions = Vec::new();
    let mut sequences: Vec<(String, Vec<String>)> = Vec::new();
    let mut sequence_lines = Vec::new();
    let mut hosts = Vec::new();
    let mut names: HashSet<(&'static str, String)> = HashSet::new();
    let mut pending: Option<PendingRule> = None;

    for (index, raw) in text.lines().enumerate() {
        let line = index + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (head, rest) = match content.split_once(':') {
            Some((h, r)) => (h.trim(), Some(r.trim())),
            None => (content, None),
        };
        let mut words = head.split_whitespace();
        let keyword = words.next().unwrap_or("");
        let name = words.next();
        if words.next().is_some() {
            return Err(parse_err(line, format!("unexpected text in `{head}`")));
        }

        if matches!(keyword, "lhs" | "rhs") {
            let rule = pending
                .as_mut()
                .ok_or_else(|| parse_err(line, format!("`{keyword}` outside a production")))?;
            if name.is_some() {
                return Err(parse_err(line, format!("unexpected text after `{keyword}`")));
            }
            let body = rest.ok_or_else(|| parse_err(line, format!("expected `{keyword}:`")))?;
            let u = universe.as_ref().expect("checked when the production opened");
            let graph = build_graph(u, &parse_graph(body, line)?, line)?;
            let slot = if keyword == "lhs" { &mut rule.lhs } else { &mut rule.rhs };
            if slot.replace(graph).is_some() {
                return Err(parse_err(line, format!("`{keyword}` given twice")));
            }
            continue;
        }
        if let Some(rule) = pending.take() {
            finish_rule(rule, &mut productions)?;
        }

        let mut claim = |kind: &'static str| -> Result<String> {
            let name = name.ok_or_else(|| parse_err(line, format!("{kind} needs a name")))?;
            if !is_name(name) {
                return Err(parse_err(line, format!("malformed {kind} name `{name}`")));
            }
            if !names.insert((kind, name.to_string())) {
                return Err(parse_err(line, format!("duplicate {kind} name `{name}`")));
            }
            Ok(name.to_string())
        };
        match keyword {
            "universe" => {
                if universe.is_some() {
                    return Err(parse_err(line, "universe declared twice"));
                }
                if name.is_some() {
                    return Err(parse_err(line, "expected `universe: <labels>`"));
                }
                let labels: Vec<&str> = rest
                    .ok_or_else(|| parse_err(line, "expected `universe: <labels>`"))?
                    .split_whitespace()
                    .collect();
                if let Some(bad) = labels.iter().find(|l| !is_label(l)) {
                    return Err(parse_err(line, format!("malformed node label `{bad}`")));
                }
                universe = Some(NodeUniverse::new(labels).map_err(|e| parse_err(line, e.to_string()))?);
            }
            "production" => {
                if rest.is_some_and(|r| !r.is_empty()) {
                    return Err(parse_err(line, "expected `production <name>` followed by lhs/rhs lines"));
                }
                if universe.is_none() {
                    return Err(parse_err(line, "production before the universe declaration"));
                }
                pending = Some(PendingRule {
                    name: claim("production")?,
                    line,
                    lhs: None,
                    rhs: None,
                });
            }
            "sequence" => {
                let name = claim("sequence")?;
                let rules = rest
                    .ok_or_else(|| parse_err(line, "expected `sequence <name>: <productions>`"))?
                    .split_whitespace()
                    .map(str::to_string)
                    .collect();
                sequences.push((name, rules));
                sequence_lines.push(line);
            }
            "host" => {
                let name = claim("host")?;
                let body = rest.ok_or_else(|| parse_err(line, "expected `host <name>: nodes ...`"))?;
                let raw = parse_graph(body, line)?;
                let u = NodeUniverse::new(&raw.0).map_err(|e| parse_err(line, e.to_string()))?;
                hosts.push((name, build_graph(&u, &raw, line)?));
            }
            other => return Err(parse_err(line, format!("unknown directive `{other}`"))),
        }
    }
    if let Some(rule) = pending.take() {
        finish_rule(rule, &mut productions)?;
    }
    let universe = universe.ok_or_else(|| parse_err(text.lines().count().max(1), "missing universe declaration"))?;
    for ((_, rules), line) in sequences.iter().zip(&sequence_lines) {
        if let Some(bad) = rules.iter().find(|r| !productions.iter().any(|p| &p.name == *r)) {
            return Err(parse_err(*line, format!("unknown production `{bad}`")));
        }
    }
    Ok(GrammarFile {
        universe,
        productions,
        sequences,
        hosts,
    })
}

fn write_graph(out: &mut String, g: &Digraph) {
    let u = g.universe();
    out.push_str("nodes");
    for i in g.nodes.iter_ones() {
        let _ = write!(out, " {}", u.label(i));
    }
    let edges: Vec<(usize, usize)> = g.edges.iter_ones().collect();
    if !edges.is_empty() {
        out.push_str("; edges");
        for (i, j) in edges {
            let _ = write!(out, " {}->{}", u.label(i), u.label(j));
        }
    }
}

impl GrammarFile {
    /// Canonical text form; parsing it gives back an equal model.
    pub fn to_text(&self) -> String {
        let mut out = String::from("universe:");
        for label in self.universe.labels() {
            let _ = write!(out, " {label}");
        }
        out.push('\n');
        for p in &self.productions {
            let _ = writeln!(out, "production {}", p.name);
            out.push_str("  lhs: ");
            write_graph(&mut out, &p.lhs);
            out.push_str("\n  rhs: ");
            write_graph(&mut out, &p.rhs);
            out.push('\n');
        }
        for (name, rules) in &self.sequences {
            let _ = write!(out, "sequence {name}:");
            for r in rules {
                let _ = write!(out, " {r}");
            }
            out.push('\n');
        }
        for (name, g) in &self.hosts {
            let _ = write!(out, "host {name}: ");
            write_graph(&mut out, g);
            out.push('\n');
        }
        out
    }

    pub fn production(&self, name: &str) -> Result<&Production> {
        self.productions
            .iter()
            .find(|p| p.name == name)
            .ok_or_else(|| MggError::UnknownName {
                kind: "production",
                name: name.to_string(),
            })
    }

    pub fn sequence(&self, name: &str) -> Result<RuleSequence> {
        let (_, rules) = self
            .sequences
            .iter()
            .find(|(n, _)| n == name)
            .ok_or_else(|| MggError::UnknownName {
                kind: "sequence",
                name: name.to_string(),
            })?;
        let rules = rules
            .iter()
            .map(|r| self.production(r).cloned())
            .collect::<Result<Vec<_>>>()?;
        RuleSequence::new(name, &self.universe, rules)
    }

    pub fn host(&self, name: &str) -> Result<&Digraph> {
        self.hosts
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, g)| g)
            .ok_or_else(|| MggError::UnknownName {
                kind: "host",
                name: name.to_string(),
            })
    }
}
