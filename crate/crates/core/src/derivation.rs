//! Matching a rule into a host digraph and rewriting it.
//!
//! A match sends every left-hand-side node injectively to a present host
//! node. It is valid when every `L` edge is present in the host and no
//! edge forbidden by the nihilation matrix is. The nihilation matrix is
//! evaluated over the whole host: an edge from a deleted node to any node
//! outside the match is forbidden unless the rule deletes it, so rewriting
//! never leaves dangling edges behind.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::boolmat::{bounded_one, complement, BoolArray, BoolMatrix, BoolVector, Complete, Digraph, NodeUniverse};
use crate::error::{MggError, Morphism, Result};
use crate::par::{map_slice, Exec};
use crate::production::Production;

/// `Ḡ = 1_G ∧ ¬G^E`: edges that may be added between present host nodes.
pub fn host_complement(g: &Digraph) -> BoolMatrix {
    complement(&g.edges, &bounded_one(&g.nodes)).expect("same universe")
}

/// Injective node map from rule positions to host positions. Only nodes of
/// the left-hand side are mapped.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    images: Vec<Option<usize>>,
}

impl Match {
    pub fn new(images: Vec<Option<usize>>) -> Self {
        Match { images }
    }

    /// Builds a match from `rule label → host label` pairs.
    pub fn from_labels(p: &Production, g: &Digraph, mapping: &HashMap<String, String>) -> Result<Self> {
        let mut images = vec![None; p.universe().len()];
        for (from, to) in mapping {
            let i = p.universe().require(from)?;
            images[i] = Some(g.universe().require(to)?);
        }
        Ok(Match { images })
    }

    pub fn images(&self) -> &[Option<usize>] {
        &self.images
    }

    pub fn image(&self, rule_position: usize) -> Option<usize> {
        self.images.get(rule_position).copied().flatten()
    }

    /// `(rule label, host label)` pairs in rule order.
    pub fn labelled(&self, rule: &NodeUniverse, host: &NodeUniverse) -> Vec<(String, String)> {
        self.images
            .iter()
            .enumerate()
            .filter_map(|(i, h)| h.map(|h| (rule.label(i).to_string(), host.label(h).to_string())))
            .collect()
    }
}

/// Why a candidate map is not a match.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Unmapped(String),
    Spurious(String),
    NotInjective(String),
    AbsentNode(String),
    MissingEdge(String, String),
    ForbiddenEdge(String, String),
}

impl Violation {
    pub fn morphism(&self) -> Morphism {
        match self {
            Violation::ForbiddenEdge(..) => Morphism::Nihil,
            _ => Morphism::Lhs,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Unmapped(n) => write!(f, "left-hand node {n} is not mapped"),
            Violation::Spurious(n) => write!(f, "node {n} is not on the left-hand side"),
            Violation::NotInjective(h) => write!(f, "host node {h} is hit twice"),
            Violation::AbsentNode(h) => write!(f, "host node {h} is not present"),
            Violation::MissingEdge(a, b) => write!(f, "m_L: host edge {a}->{b} is missing"),
            Violation::ForbiddenEdge(a, b) => write!(f, "m_K: host edge {a}->{b} is forbidden"),
        }
    }
}

/// Precomputed rule data for the search.
struct Pattern<'a> {
    p: &'a Production,
    g: &'a Digraph,
    order: Vec<usize>,
    candidates: Vec<usize>,
    l_edges: Vec<(usize, usize)>,
    r_edges: Vec<(usize, usize)>,
    check_nihil: bool,
}

impl<'a> Pattern<'a> {
    fn new(p: &'a Production, g: &'a Digraph, check_nihil: bool) -> Self {
        let l_edges: Vec<_> = p.lhs.edges.iter_ones().collect();
        let r_edges: Vec<_> = p
            .r_edges
            .iter_ones()
            .filter(|&(i, j)| p.lhs.nodes.get(i) && p.lhs.nodes.get(j))
            .collect();
        let degree = |i: usize| l_edges.iter().filter(|&&(a, b)| a == i || b == i).count();
        let mut order: Vec<usize> = p.lhs.nodes.iter_ones().collect();
        order.sort_by_key(|&i| (std::cmp::Reverse(degree(i)), i));
        Pattern {
            p,
            g,
            order,
            candidates: g.nodes.iter_ones().collect(),
            l_edges,
            r_edges,
            check_nihil,
        }
    }

    fn degree_ok(&self, i: usize, h: usize) -> bool {
        let out_l = self.l_edges.iter().filter(|e| e.0 == i).count();
        let in_l = self.l_edges.iter().filter(|e| e.1 == i).count();
        let n = self.g.edges.dim();
        let out_g = (0..n).filter(|&x| self.g.edges.get(h, x)).count();
        let in_g = (0..n).filter(|&x| self.g.edges.get(x, h)).count();
        out_g >= out_l && in_g >= in_l
    }

    /// Edge constraints between `i` (just assigned) and already assigned nodes.
    fn consistent(&self, images: &[Option<usize>], i: usize) -> bool {
        let edges = &self.g.edges;
        let lhs_ok = self.l_edges.iter().all(|&(a, b)| {
            if a != i && b != i {
                return true;
            }
            match (images[a], images[b]) {
                (Some(x), Some(y)) => edges.get(x, y),
                _ => true,
            }
        });
        if !lhs_ok || !self.check_nihil {
            return lhs_ok;
        }
        self.r_edges.iter().all(|&(a, b)| {
            if a != i && b != i {
                return true;
            }
            match (images[a], images[b]) {
                (Some(x), Some(y)) => !edges.get(x, y),
                _ => true,
            }
        })
    }

    /// Host edges at images of deleted nodes must all be images of deleted edges.
    fn dangling_ok(&self, images: &[Option<usize>]) -> bool {
        if !self.check_nihil {
            return true;
        }
        let n = self.g.edges.dim();
        let mut preimage = vec![None; n];
        for (i, h) in images.iter().enumerate() {
            if let Some(h) = h {
                preimage[*h] = Some(i);
            }
        }
        let deleted_edge = |x: usize, y: usize| match (preimage[x], preimage[y]) {
            (Some(a), Some(b)) => self.p.e_edges.get(a, b),
            _ => false,
        };
        for i in self.p.e_nodes.iter_ones() {
            let Some(h) = images[i] else { continue };
            for x in 0..n {
                if self.g.edges.get(h, x) && !deleted_edge(h, x) {
                    return false;
                }
                if self.g.edges.get(x, h) && !deleted_edge(x, h) {
                    return false;
                }
            }
        }
        true
    }

    fn extend(&self, depth: usize, images: &mut Vec<Option<usize>>, used: &mut [bool], out: &mut Vec<Match>) {
        if depth == self.order.len() {
            if self.dangling_ok(images) {
                out.push(Match { images: images.clone() });
            }
            return;
        }
        let i = self.order[depth];
        for &h in &self.candidates {
            if used[h] || !self.degree_ok(i, h) {
                continue;
            }
            images[i] = Some(h);
            used[h] = true;
            if self.consistent(images, i) {
                self.extend(depth + 1, images, used, out);
            }
            used[h] = false;
            images[i] = None;
        }
    }

    fn run(&self, exec: Exec) -> Vec<Match> {
        let size = self.p.universe().len();
        let hosts = self.g.universe().len();
        let mut matches = if self.order.is_empty() {
            let images = vec![None; size];
            if self.dangling_ok(&images) {
                vec![Match { images }]
            } else {
                vec![]
            }
        } else {
            let first = self.order[0];
            map_slice(exec, &self.candidates, |&h| {
                let mut out = Vec::new();
                if !self.degree_ok(first, h) {
                    return out;
                }
                let mut images = vec![None; size];
                let mut used = vec![false; hosts];
                images[first] = Some(h);
                used[h] = true;
                if self.consistent(&images, first) {
                    self.extend(1, &mut images, &mut used, &mut out);
                }
                out
            })
            .into_iter()
            .flatten()
            .collect()
        };
        // lexicographic by host image in rule order
        matches.sort();
        matches
    }
}

/// Every valid match of `p` into `g`, in lexicographic order of the host
/// images listed by rule position.
pub fn find_matches(p: &Production, g: &Digraph) -> Vec<Match> {
    find_matches_with(p, g, Exec::default())
}

pub fn find_matches_with(p: &Production, g: &Digraph, exec: Exec) -> Vec<Match> {
    Pattern::new(p, g, true).run(exec)
}

/// Maps that embed `L` regardless of forbidden edges.
pub fn find_lhs_embeddings(p: &Production, g: &Digraph) -> Vec<Match> {
    Pattern::new(p, g, false).run(Exec::default())
}

/// Checks a candidate map from scratch and reports the first violated
/// condition.
pub fn check_match(p: &Production, g: &Digraph, m: &Match) -> std::result::Result<(), Violation> {
    let rule = p.universe();
    let host = g.universe();
    if m.images.len() != rule.len() {
        return Err(Violation::Unmapped(String::from("<size mismatch>")));
    }
    let mut seen = vec![false; host.len()];
    for (i, image) in m.images.iter().enumerate() {
        match (p.lhs.nodes.get(i), image) {
            (true, None) => return Err(Violation::Unmapped(rule.label(i).into())),
            (false, Some(_)) => return Err(Violation::Spurious(rule.label(i).into())),
            (true, Some(h)) => {
                if seen[*h] {
                    return Err(Violation::NotInjective(host.label(*h).into()));
                }
                seen[*h] = true;
                if !g.nodes.get(*h) {
                    return Err(Violation::AbsentNode(host.label(*h).into()));
                }
            }
            (false, None) => {}
        }
    }
    for (a, b) in p.lhs.edges.iter_ones() {
        let (x, y) = (m.images[a].unwrap(), m.images[b].unwrap());
        if !g.edges.get(x, y) {
            return Err(Violation::MissingEdge(host.label(x).into(), host.label(y).into()));
        }
    }
    let k_star = completed_nihilation(p, g, m);
    if let Some((x, y)) = (&k_star & &g.edges).iter_ones().next() {
        return Err(Violation::ForbiddenEdge(host.label(x).into(), host.label(y).into()));
    }
    Ok(())
}

/// The nihilation matrix of the rule transported into the host universe.
fn completed_nihilation(p: &Production, g: &Digraph, m: &Match) -> BoolMatrix {
    let hosts = g.universe();
    let mut e_star = BoolMatrix::zeros(hosts);
    let mut r_star = BoolMatrix::zeros(hosts);
    let mut deleted = BoolVector::zeros(hosts);
    for (a, b) in p.e_edges.iter_ones() {
        if let (Some(x), Some(y)) = (m.image(a), m.image(b)) {
            e_star.set(x, y, true);
        }
    }
    for (a, b) in p.r_edges.iter_ones() {
        if let (Some(x), Some(y)) = (m.image(a), m.image(b)) {
            r_star.set(x, y, true);
        }
    }
    for i in p.e_nodes.iter_ones() {
        if let Some(h) = m.image(i) {
            deleted.set(h, true);
        }
    }
    let keep = !&deleted;
    let d = crate::boolmat::tensor(&keep, &keep).expect("same universe");
    &r_star | &(&!&e_star & &!&d)
}

/// `H = r* ∨ ē* G` at match `m`. Nodes added by the rule get fresh host
/// labels `<rule>.<node>#<step>`.
pub fn apply_at(p: &Production, g: &Digraph, m: &Match, step: usize) -> Result<Digraph> {
    check_match(p, g, m).map_err(|v| MggError::InvalidMatch(v.to_string()))?;
    let rule = p.universe();
    let added: Vec<usize> = p.r_nodes.iter_ones().collect();
    let universe: Arc<NodeUniverse> = if added.is_empty() {
        g.universe().clone()
    } else {
        let mut labels = g.universe().labels().to_vec();
        labels.extend(added.iter().map(|&i| format!("{}.{}#{}", p.name, rule.label(i), step)));
        NodeUniverse::new(labels)?
    };
    let base = g.universe().len();
    let mut position: Vec<Option<usize>> = m.images.clone();
    for (k, &i) in added.iter().enumerate() {
        position[i] = Some(base + k);
    }
    let place = |i: usize| {
        position[i].ok_or_else(|| {
            MggError::InvalidMatch(format!("rule node {} is on neither side", rule.label(i)))
        })
    };

    let mut e_edges = BoolMatrix::zeros(&universe);
    let mut r_edges = BoolMatrix::zeros(&universe);
    let mut e_nodes = BoolVector::zeros(&universe);
    let mut r_nodes = BoolVector::zeros(&universe);
    for (a, b) in p.e_edges.iter_ones() {
        e_edges.set(place(a)?, place(b)?, true);
    }
    for (a, b) in p.r_edges.iter_ones() {
        r_edges.set(place(a)?, place(b)?, true);
    }
    for i in p.e_nodes.iter_ones() {
        e_nodes.set(place(i)?, true);
    }
    for i in p.r_nodes.iter_ones() {
        r_nodes.set(place(i)?, true);
    }
    let host = g.complete_identity(&universe)?;
    Ok(Digraph {
        edges: &r_edges | &(&!&e_edges & &host.edges),
        nodes: &r_nodes | &(&!&e_nodes & &host.nodes),
    })
}

/// How to pick the match at each derivation step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Selector {
    First,
    Index(usize),
    /// Rule label to host label.
    Explicit(HashMap<String, String>),
}

#[derive(Debug, Clone)]
pub struct DerivationStep {
    /// 1-based position in application order.
    pub step: usize,
    pub rule: String,
    pub matched: Match,
    /// `(rule label, host label)` pairs.
    pub mapping: Vec<(String, String)>,
    /// Number of valid matches available at this step.
    pub available: usize,
    pub input: Digraph,
    pub output: Digraph,
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub steps: Vec<DerivationStep>,
    pub result: Digraph,
    /// Set when a step could not be applied; later steps are not attempted.
    pub failure: Option<MggError>,
}

impl Derivation {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Applies the rules left to right, stopping at the first step that
/// cannot be applied.
pub fn derive(g: &Digraph, steps: &[(&Production, Selector)]) -> Derivation {
    let mut current = g.clone();
    let mut trace = Vec::new();
    for (k, (p, selector)) in steps.iter().enumerate() {
        let step = k + 1;
        match derive_step(&current, p, selector, step) {
            Ok((matched, available, output)) => {
                trace.push(DerivationStep {
                    step,
                    rule: p.name.clone(),
                    mapping: matched.labelled(p.universe(), current.universe()),
                    matched,
                    available,
                    input: current.clone(),
                    output: output.clone(),
                });
                current = output;
            }
            Err(err) => {
                return Derivation {
                    steps: trace,
                    result: current,
                    failure: Some(err),
                }
            }
        }
    }
    Derivation {
        steps: trace,
        result: current,
        failure: None,
    }
}

fn derive_step(g: &Digraph, p: &Production, selector: &Selector, step: usize) -> Result<(Match, usize, Digraph)> {
    let matches = find_matches(p, g);
    let available = matches.len();
    let chosen = match selector {
        Selector::Explicit(mapping) => {
            let m = Match::from_labels(p, g, mapping)?;
            check_match(p, g, &m).map_err(|v| MggError::InvalidMatch(v.to_string()))?;
            m
        }
        _ if matches.is_empty() => {
            let morphism = if find_lhs_embeddings(p, g).is_empty() {
                Morphism::Lhs
            } else {
                Morphism::Nihil
            };
            return Err(MggError::NoMatch {
                step,
                rule: p.name.clone(),
                morphism,
            });
        }
        Selector::First => matches[0].clone(),
        Selector::Index(i) => matches
            .get(*i)
            .cloned()
            .ok_or_else(|| MggError::SelectorOutOfRange {
                step,
                rule: p.name.clone(),
                index: *i,
                available,
            })?,
    };
    let output = apply_at(p, g, &chosen, step)?;
    Ok((chosen, available, output))
}
