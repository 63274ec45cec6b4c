//! Analysis of rule sequences: coherence, initial digraph, image,
//! compatibility and congruence.
//!
//! Rules are stored in application order and indexed from 1, so rule 1 is
//! applied first. The conventional right-to-left rendering `p2;p1` is
//! available through [`RuleSequence::display_order`].

use std::sync::Arc;

use crate::boolmat::{elementwise, tensor, BoolArray, BoolMatrix, BoolOp, BoolVector, Digraph, NodeUniverse};
use crate::error::{MggError, Result};
use crate::mcl::ComplexTerm;
use crate::par::{map_range, Exec};
use crate::production::{apply_production, production_compatible, Production};

/// Rules over one completed universe, in application order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSequence {
    pub name: String,
    pub rules: Vec<Production>,
    universe: Arc<NodeUniverse>,
}

impl RuleSequence {
    pub fn new(name: impl Into<String>, universe: &Arc<NodeUniverse>, rules: Vec<Production>) -> Result<Self> {
        if rules.iter().any(|p| p.universe() != universe) {
            return Err(MggError::UniverseMismatch);
        }
        Ok(RuleSequence {
            name: name.into(),
            rules,
            universe: universe.clone(),
        })
    }

    pub fn universe(&self) -> &Arc<NodeUniverse> {
        &self.universe
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Rule at 1-based position `j`.
    pub fn rule(&self, j: usize) -> &Production {
        &self.rules[j - 1]
    }

    /// The first `m` rules.
    pub fn prefix(&self, m: usize) -> RuleSequence {
        RuleSequence {
            name: format!("{}[..{}]", self.name, m),
            rules: self.rules[..m].to_vec(),
            universe: self.universe.clone(),
        }
    }

    /// Same rules reordered; `order[k]` is the old 1-based position of the
    /// rule applied at step `k + 1`.
    pub fn reordered(&self, order: &[usize]) -> RuleSequence {
        RuleSequence {
            name: self.name.clone(),
            rules: order.iter().map(|&j| self.rule(j).clone()).collect(),
            universe: self.universe.clone(),
        }
    }

    /// Application order, comma separated: `p1, p2`.
    pub fn application_order(&self) -> String {
        self.rules.iter().map(|p| p.name.as_str()).collect::<Vec<_>>().join(", ")
    }

    /// Composition order, last applied first: `p2;p1`.
    pub fn display_order(&self) -> String {
        self.rules.iter().rev().map(|p| p.name.as_str()).collect::<Vec<_>>().join(";")
    }
}

fn and<T: BoolArray>(a: &T, b: &T) -> T {
    elementwise(BoolOp::And, a, b).expect("same universe")
}

fn or<T: BoolArray>(a: &T, b: &T) -> T {
    elementwise(BoolOp::Or, a, b).expect("same universe")
}

fn not<T: BoolArray>(a: &T) -> T {
    crate::boolmat::complement(a, &T::ones(a.universe())).expect("same universe")
}

fn check_range(t0: usize, t1: usize, len: usize) -> Result<bool> {
    if t0 > t1 {
        return Ok(false);
    }
    if t0 == 0 || t1 > len {
        return Err(MggError::InvalidRange { t0, t1, len });
    }
    Ok(true)
}

/// `△(t0, t1, F) = ⋁_{y=t0}^{t1} ⋀_{x=y}^{t1} F(x, y)`; empty range gives 0.
pub fn delta<T: BoolArray>(
    universe: &Arc<NodeUniverse>,
    len: usize,
    t0: usize,
    t1: usize,
    f: impl Fn(usize, usize) -> T,
) -> Result<T> {
    let mut acc = T::zeros(universe);
    if !check_range(t0, t1, len)? {
        return Ok(acc);
    }
    for y in t0..=t1 {
        let mut inner = f(y, y);
        for x in y + 1..=t1 {
            inner = and(&inner, &f(x, y));
        }
        acc = or(&acc, &inner);
    }
    Ok(acc)
}

/// `▽(t0, t1, F) = ⋁_{y=t0}^{t1} ⋀_{x=t0}^{y} F(x, y)`; empty range gives 0.
pub fn nabla<T: BoolArray>(
    universe: &Arc<NodeUniverse>,
    len: usize,
    t0: usize,
    t1: usize,
    f: impl Fn(usize, usize) -> T,
) -> Result<T> {
    let mut acc = T::zeros(universe);
    if !check_range(t0, t1, len)? {
        return Ok(acc);
    }
    for y in t0..=t1 {
        let mut inner = f(t0, y);
        for x in t0 + 1..=y {
            inner = and(&inner, &f(x, y));
        }
        acc = or(&acc, &inner);
    }
    Ok(acc)
}

/// Which kind of analysis produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisKind {
    Coherence,
    Initial,
    Image,
    Compatibility,
    Congruence,
}

impl AnalysisKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AnalysisKind::Coherence => "coherence",
            AnalysisKind::Initial => "initial",
            AnalysisKind::Image => "image",
            AnalysisKind::Compatibility => "compatibility",
            AnalysisKind::Congruence => "congruence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Part {
    Certainty,
    Nihil,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Cell {
    Edge(usize, usize),
    Node(usize),
}

/// One set cell of an analysis result and the rule term responsible.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Witness {
    pub part: Part,
    pub cell: Cell,
    /// 1-based rule position.
    pub rule: usize,
    pub reason: &'static str,
}

#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub kind: AnalysisKind,
    pub result: ComplexTerm,
    pub ok: bool,
    pub witnesses: Vec<Witness>,
    /// Further named values computed alongside the main result.
    pub extra: Vec<(String, ComplexTerm)>,
    pub notes: Vec<String>,
}

fn term(
    universe: &Arc<NodeUniverse>,
    cert_edges: BoolMatrix,
    cert_nodes: BoolVector,
    nihil_edges: BoolMatrix,
    nihil_nodes: BoolVector,
) -> ComplexTerm {
    ComplexTerm::new(cert_edges, cert_nodes, nihil_edges, nihil_nodes, BoolVector::ones(universe))
        .expect("same universe")
}

fn edge_witnesses(m: &BoolMatrix, part: Part, rule: usize, reason: &'static str) -> Vec<Witness> {
    m.iter_ones()
        .map(|(i, j)| Witness {
            part,
            cell: Cell::Edge(i, j),
            rule,
            reason,
        })
        .collect()
}

fn node_witnesses(v: &BoolVector, part: Part, rule: usize, reason: &'static str) -> Vec<Witness> {
    v.iter_ones()
        .map(|i| Witness {
            part,
            cell: Cell::Node(i),
            rule,
            reason,
        })
        .collect()
}

struct CoherenceTerms {
    cert_edges: BoolMatrix,
    cert_nodes: BoolVector,
    nihil_edges: BoolMatrix,
    witnesses: Vec<Witness>,
}

fn coherence_at(s: &RuleSequence, j: usize) -> CoherenceTerms {
    let u = s.universe();
    let n = s.len();
    let p = s.rule(j);
    let ex = |x: usize| &s.rule(x).e_edges;
    let rx = |x: usize| &s.rule(x).r_edges;
    let evx = |x: usize| &s.rule(x).e_nodes;
    let rvx = |x: usize| &s.rule(x).r_nodes;

    // added again later while already present
    let readd = and(&p.rhs.edges, &nabla(u, n, j + 1, n, |x, y| and(&not(ex(x)), rx(y))).unwrap());
    let readd_v = and(&p.rhs.nodes, &nabla(u, n, j + 1, n, |x, y| and(&not(evx(x)), rvx(y))).unwrap());
    // needed but deleted earlier
    let lost = and(&p.lhs.edges, &delta(u, n, 1, j - 1, |x, y| and(ex(y), &not(rx(x)))).unwrap());
    let lost_v = and(&p.lhs.nodes, &delta(u, n, 1, j - 1, |x, y| and(evx(y), &not(rvx(x)))).unwrap());
    // deleted later while already absent
    let redel = and(&p.q, &nabla(u, n, j + 1, n, |x, y| and(ex(y), &not(rx(x)))).unwrap());
    // forbidden but added earlier
    let blocked = and(&p.k, &delta(u, n, 1, j - 1, |x, y| and(rx(y), &not(ex(x)))).unwrap());

    let mut witnesses = Vec::new();
    witnesses.extend(edge_witnesses(&readd, Part::Certainty, j, "added again by a later rule"));
    witnesses.extend(node_witnesses(&readd_v, Part::Certainty, j, "added again by a later rule"));
    witnesses.extend(edge_witnesses(&lost, Part::Certainty, j, "needed but deleted by an earlier rule"));
    witnesses.extend(node_witnesses(&lost_v, Part::Certainty, j, "needed but deleted by an earlier rule"));
    witnesses.extend(edge_witnesses(&redel, Part::Nihil, j, "deleted by a later rule while absent"));
    witnesses.extend(edge_witnesses(&blocked, Part::Nihil, j, "forbidden but added by an earlier rule"));
    CoherenceTerms {
        cert_edges: or(&readd, &lost),
        cert_nodes: or(&readd_v, &lost_v),
        nihil_edges: or(&redel, &blocked),
        witnesses,
    }
}

/// `C = C⁺ ∨ iC⁻`; the sequence is coherent iff `C = 0`.
pub fn coherence(s: &RuleSequence) -> AnalysisReport {
    coherence_with(s, Exec::default())
}

pub fn coherence_with(s: &RuleSequence, exec: Exec) -> AnalysisReport {
    let u = s.universe();
    let parts = map_range(exec, 1..s.len() + 1, |j| coherence_at(s, j));
    let mut cert_edges = BoolMatrix::zeros(u);
    let mut cert_nodes = BoolVector::zeros(u);
    let mut nihil_edges = BoolMatrix::zeros(u);
    let mut witnesses = Vec::new();
    for t in parts {
        cert_edges = or(&cert_edges, &t.cert_edges);
        cert_nodes = or(&cert_nodes, &t.cert_nodes);
        nihil_edges = or(&nihil_edges, &t.nihil_edges);
        witnesses.extend(t.witnesses);
    }
    witnesses.sort();
    let result = term(u, cert_edges, cert_nodes, nihil_edges, BoolVector::zeros(u));
    AnalysisReport {
        kind: AnalysisKind::Coherence,
        ok: result.is_zero(),
        result,
        witnesses,
        extra: Vec::new(),
        notes: Vec::new(),
    }
}

/// `T = ¬(r̄^V ⊗ r̄^V) ∧ (ē^V ⊗ ē^V)`: edges incident to an added node and
/// to no deleted node.
pub fn t_matrix(p: &Production) -> BoolMatrix {
    let nr = !&p.r_nodes;
    let ne = !&p.e_nodes;
    let touches_added = !&tensor(&nr, &nr).expect("same universe");
    &touches_added & &tensor(&ne, &ne).expect("same universe")
}

/// `M(s) = ▽(r̄_x L_y) ∨ i ▽(ē_x T̄_x K_y)` over the whole sequence.
pub fn initial_digraph(s: &RuleSequence) -> ComplexTerm {
    let u = s.universe();
    let n = s.len();
    let ts: Vec<BoolMatrix> = s.rules.iter().map(t_matrix).collect();
    let cert = nabla(u, n, 1, n, |x, y| and(&not(&s.rule(x).r_edges), &s.rule(y).lhs.edges)).unwrap();
    let cert_v = nabla(u, n, 1, n, |x, y| and(&not(&s.rule(x).r_nodes), &s.rule(y).lhs.nodes)).unwrap();
    let nihil = nabla(u, n, 1, n, |x, y| {
        let avail = and(&not(&s.rule(x).e_edges), &not(&ts[x - 1]));
        and(&avail, &s.rule(y).k)
    })
    .unwrap();
    term(u, cert, cert_v, nihil, BoolVector::zeros(u))
}

/// The minimal host `(M_C edges, M_C nodes)` as a digraph.
pub fn initial_host(s: &RuleSequence) -> Digraph {
    let m = initial_digraph(s);
    Digraph::new(m.cert_edges, m.cert_nodes).expect("same universe")
}

pub fn initial_digraph_report(s: &RuleSequence) -> AnalysisReport {
    let coherent = coherence(s).ok;
    let mut notes = Vec::new();
    if !coherent {
        notes.push("warning: sequence is not coherent; the initial digraph may not enable it".to_string());
    }
    AnalysisReport {
        kind: AnalysisKind::Initial,
        result: initial_digraph(s),
        ok: coherent,
        witnesses: Vec::new(),
        extra: Vec::new(),
        notes,
    }
}

/// Closed form of the result of applying `s` to its initial digraph.
pub fn image_of_sequence(s: &RuleSequence) -> ComplexTerm {
    let u = s.universe();
    let n = s.len();
    let m = initial_digraph(s);
    let mut kept = BoolMatrix::ones(u);
    let mut kept_v = BoolVector::ones(u);
    let mut unadded = BoolMatrix::ones(u);
    for p in &s.rules {
        kept = and(&kept, &not(&p.e_edges));
        kept_v = and(&kept_v, &not(&p.e_nodes));
        unadded = and(&unadded, &not(&p.r_edges));
    }
    let added = delta(u, n, 1, n, |x, y| and(&not(&s.rule(x).e_edges), &s.rule(y).r_edges)).unwrap();
    let added_v = delta(u, n, 1, n, |x, y| and(&not(&s.rule(x).e_nodes), &s.rule(y).r_nodes)).unwrap();
    let removed = delta(u, n, 1, n, |x, y| and(&not(&s.rule(x).r_edges), &s.rule(y).e_edges)).unwrap();
    term(
        u,
        or(&added, &and(&kept, &m.cert_edges)),
        or(&added_v, &and(&kept_v, &m.cert_nodes)),
        or(&removed, &and(&unadded, &m.nihil_edges)),
        BoolVector::zeros(u),
    )
}

/// Applies every rule of `s` in turn: certainty by `r ∨ ē x`, nihil by
/// `e ∨ r̄ x`.
pub fn fold_sequence(s: &RuleSequence, start: &ComplexTerm) -> ComplexTerm {
    let mut z = start.clone();
    for p in &s.rules {
        let g = Digraph::new(z.cert_edges.clone(), z.cert_nodes.clone()).expect("same universe");
        let h = apply_production(p, &g).expect("same universe");
        z.cert_edges = h.edges;
        z.cert_nodes = h.nodes;
        z.nihil_edges = or(&p.e_edges, &and(&not(&p.r_edges), &z.nihil_edges));
    }
    z
}

pub fn image_report(s: &RuleSequence) -> AnalysisReport {
    let coherent = coherence(s).ok;
    let mut notes = Vec::new();
    if !coherent {
        notes.push("warning: sequence is not coherent".to_string());
    }
    AnalysisReport {
        kind: AnalysisKind::Image,
        result: image_of_sequence(s),
        ok: coherent,
        witnesses: Vec::new(),
        extra: vec![("initial".to_string(), initial_digraph(s))],
        notes,
    }
}

/// Per-prefix check `⋁_m ē_m r̄_m M_C(s_m) M_N(s_m) = 0`.
///
/// The report also carries the single-range form (`literal`), which only
/// retains its first term, and `dangling`, the edges left dangling when
/// each prefix is applied to its own initial digraph. The sequence is
/// compatible when both are empty.
pub fn sequence_compatibility(s: &RuleSequence) -> AnalysisReport {
    let u = s.universe();
    let n = s.len();
    let mut acc = BoolMatrix::zeros(u);
    let mut witnesses = Vec::new();
    let mut literal = BoolMatrix::zeros(u);
    let mut dangling = BoolMatrix::zeros(u);
    let mut notes = Vec::new();
    for m in 1..=n {
        let prefix = s.prefix(m);
        let mm = initial_digraph(&prefix);
        let p = s.rule(m);
        let outside = and(&not(&p.e_edges), &not(&p.r_edges));
        let common = and(&outside, &and(&mm.cert_edges, &mm.nihil_edges));
        witnesses.extend(edge_witnesses(&common, Part::Certainty, m, "required and forbidden by the prefix"));
        if m == 1 {
            literal = common.clone();
        }
        acc = or(&acc, &common);

        let host = Digraph::new(mm.cert_edges.clone(), mm.cert_nodes.clone()).expect("same universe");
        let image = prefix
            .rules
            .iter()
            .fold(host.clone(), |g, q| apply_production(q, &g).expect("same universe"));
        for g in [host, image] {
            dangling = or(&dangling, &g.dangling_edges());
        }
    }
    let individually = s.rules.iter().all(production_compatible);
    if !individually {
        notes.push("warning: some rules are not compatible on their own".to_string());
    }
    if !dangling.is_zero() {
        witnesses.extend(edge_witnesses(&dangling, Part::Nihil, n, "left dangling"));
    }
    let zero_v = BoolVector::zeros(u);
    let result = term(u, acc, zero_v.clone(), BoolMatrix::zeros(u), zero_v.clone());
    witnesses.sort();
    AnalysisReport {
        kind: AnalysisKind::Compatibility,
        ok: result.is_zero() && dangling.is_zero(),
        result,
        witnesses,
        extra: vec![
            ("literal".to_string(), term(u, literal, zero_v.clone(), BoolMatrix::zeros(u), zero_v.clone())),
            ("dangling".to_string(), term(u, dangling, zero_v.clone(), BoolMatrix::zeros(u), zero_v)),
        ],
        notes,
    }
}

/// Moving one rule to the other end of the sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Permutation {
    /// The last rule is applied first.
    Advance,
    /// The first rule is applied last.
    Delay,
}

impl Permutation {
    /// New application order as old 1-based positions.
    pub fn order(&self, n: usize) -> Vec<usize> {
        match self {
            Permutation::Advance => std::iter::once(n).chain(1..n).collect(),
            Permutation::Delay => (2..=n).chain(std::iter::once(1)).collect(),
        }
    }

    /// Recognises an application order as an advancement or a delaying.
    pub fn from_order(order: &[usize]) -> Result<Self> {
        let n = order.len();
        if n >= 2 && order == Permutation::Advance.order(n).as_slice() {
            Ok(Permutation::Advance)
        } else if n >= 2 && order == Permutation::Delay.order(n).as_slice() {
            Ok(Permutation::Delay)
        } else {
            Err(MggError::UnsupportedPermutation)
        }
    }

    pub fn apply(&self, s: &RuleSequence) -> RuleSequence {
        s.reordered(&self.order(s.len()))
    }
}

/// `F = F⁺ ∨ iF⁻` for advancement, `D = D⁺ ∨ iD⁻` for delaying; zero
/// guarantees equal initial digraphs.
pub fn g_congruence(s: &RuleSequence, mode: Permutation) -> Result<AnalysisReport> {
    let n = s.len();
    if n < 2 {
        return Err(MggError::SequenceTooShort(n));
    }
    let u = s.universe();
    let (moved, t0, t1) = match mode {
        Permutation::Advance => (n, 1, n - 1),
        Permutation::Delay => (1, 2, n),
    };
    let pm = s.rule(moved);
    let cert_f = |x: usize, y: usize| {
        let (px, py) = (s.rule(x), s.rule(y));
        and(&and(&not(&px.e_edges), &py.k), &or(&py.r_edges, &pm.e_edges))
    };
    let nihil_f = |x: usize, y: usize| {
        let (px, py) = (s.rule(x), s.rule(y));
        and(&and(&not(&px.r_edges), &py.lhs.edges), &or(&py.e_edges, &pm.r_edges))
    };
    let plus = and(&pm.lhs.edges, &nabla(u, n, t0, t1, cert_f)?);
    // forbidden edges at nodes added by the other party drop out of M_N,
    // in one order only
    let ts: Vec<BoolMatrix> = s.rules.iter().map(t_matrix).collect();
    let shadow = nabla(u, n, t0, t1, |x, y| and(&not(&s.rule(x).e_edges), &ts[y - 1]))?;
    let shadowed = nabla(u, n, t0, t1, |x, y| and(&not(&s.rule(x).e_edges), &s.rule(y).k))?;
    let minus = or(
        &and(&pm.k, &or(&nabla(u, n, t0, t1, nihil_f)?, &shadow)),
        &and(&ts[moved - 1], &shadowed),
    );
    // same shape on nodes, with the added nodes as the forbidden set
    let plus_v = and(
        &pm.lhs.nodes,
        &nabla(u, n, t0, t1, |x, y| and(&not(&s.rule(x).e_nodes), &s.rule(y).r_nodes))?,
    );
    let minus_v = and(
        &pm.r_nodes,
        &nabla(u, n, t0, t1, |x, y| and(&not(&s.rule(x).r_nodes), &s.rule(y).lhs.nodes))?,
    );
    let mut witnesses = edge_witnesses(&plus, Part::Certainty, moved, "needed by the moved rule");
    witnesses.extend(node_witnesses(&plus_v, Part::Certainty, moved, "needed by the moved rule"));
    witnesses.extend(edge_witnesses(&minus, Part::Nihil, moved, "forbidden by the moved rule"));
    witnesses.extend(node_witnesses(&minus_v, Part::Nihil, moved, "added by the moved rule"));
    let result = term(u, plus, plus_v, minus, minus_v);
    Ok(AnalysisReport {
        kind: AnalysisKind::Congruence,
        ok: result.is_zero(),
        result,
        witnesses,
        extra: Vec::new(),
        notes: vec![format!(
            "permuted order: {}",
            mode.apply(s).display_order()
        )],
    })
}

/// Outcome of a sequential independence check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Independence {
    pub coherent: (bool, bool),
    pub compatible: (bool, bool),
    pub congruent: bool,
    /// Images of both orders over the initial digraph of `s`, compared when
    /// every other condition holds.
    pub images_agree: Option<bool>,
}

impl Independence {
    pub fn independent(&self) -> bool {
        self.coherent.0
            && self.coherent.1
            && self.compatible.0
            && self.compatible.1
            && self.congruent
            && self.images_agree != Some(false)
    }
}

pub fn sequential_independence(s: &RuleSequence, perm: Permutation) -> Result<Independence> {
    let congruent = g_congruence(s, perm)?.ok;
    let t = perm.apply(s);
    let coherent = (coherence(s).ok, coherence(&t).ok);
    let compatible = (sequence_compatibility(s).ok, sequence_compatibility(&t).ok);
    let images_agree = if coherent.0 && coherent.1 && compatible.0 && compatible.1 && congruent {
        let m = initial_digraph(s);
        let a = fold_sequence(s, &m);
        let b = fold_sequence(&t, &m);
        Some(a.cert_edges == b.cert_edges && a.cert_nodes == b.cert_nodes && a.nihil_edges == b.nihil_edges)
    } else {
        None
    };
    Ok(Independence {
        coherent,
        compatible,
        congruent,
        images_agree,
    })
}
