//! Brute-force validators.
//!
//! Each oracle works from the raw rule data with integer bit masks and
//! never calls the code it audits. Random instances come from a seeded
//! ChaCha generator, so every run is reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolmat::{BoolArray, BoolMatrix, BoolVector, Digraph, NodeUniverse};
use crate::derivation::{find_matches_with, Match};
use crate::encoding::{gasket_raster_with, Bitmap};
use crate::error::{MggError, Result};
use crate::par::Exec;
use crate::production::{swap_census, Production};
use crate::sequence::RuleSequence;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleViolation {
    pub input: String,
    pub expected: String,
    pub got: String,
}

/// Outcome of an oracle run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OracleReport {
    pub name: String,
    pub seed: Option<u64>,
    pub checked: usize,
    pub violations: Vec<OracleViolation>,
}

impl OracleReport {
    pub fn new(name: impl Into<String>, seed: Option<u64>) -> Self {
        OracleReport {
            name: name.into(),
            seed,
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn record(&mut self, ok: bool, input: impl FnOnce() -> String, expected: impl FnOnce() -> String, got: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.violations.push(OracleViolation {
                input: input(),
                expected: expected(),
                got: got(),
            });
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: checked={} violations={}", self.name, self.checked, self.violations.len())?;
        if let Some(seed) = self.seed {
            write!(f, " seed={seed}")?;
        }
        Ok(())
    }
}

fn edge_mask(m: &BoolMatrix) -> u64 {
    let n = m.dim();
    m.iter_ones().fold(0, |acc, (i, j)| acc | 1 << (i * n + j))
}

fn node_mask(v: &BoolVector) -> u64 {
    v.iter_ones().fold(0, |acc, i| acc | 1 << i)
}

/// Every injective map from left-hand nodes to present host nodes that
/// carries `L` into the host and meets no forbidden edge, in lexicographic
/// order.
pub fn brute_matches(p: &Production, g: &Digraph) -> Result<Vec<Match>> {
    let hosts = g.universe().len();
    if hosts > 7 {
        return Err(MggError::OutOfRange {
            what: "host nodes",
            value: hosts,
            min: 0,
            max: 7,
        });
    }
    let rule_nodes: Vec<usize> = p.lhs.nodes.iter_ones().collect();
    let l_edges: Vec<(usize, usize)> = p.lhs.edges.iter_ones().collect();
    let mut out = Vec::new();
    let mut images = vec![None; p.universe().len()];
    enumerate_injections(&rule_nodes, hosts, 0, 0, &mut images, &mut |images| {
        if accepts(p, g, &l_edges, images) {
            out.push(Match::new(images.to_vec()));
        }
    });
    out.sort();
    Ok(out)
}

fn enumerate_injections(
    nodes: &[usize],
    hosts: usize,
    depth: usize,
    used: u64,
    images: &mut Vec<Option<usize>>,
    visit: &mut dyn FnMut(&[Option<usize>]),
) {
    if depth == nodes.len() {
        visit(images);
        return;
    }
    for h in 0..hosts {
        if used >> h & 1 == 1 {
            continue;
        }
        images[nodes[depth]] = Some(h);
        enumerate_injections(nodes, hosts, depth + 1, used | 1 << h, images, visit);
    }
    images[nodes[depth]] = None;
}

fn accepts(p: &Production, g: &Digraph, l_edges: &[(usize, usize)], images: &[Option<usize>]) -> bool {
    let mapped = |i: usize| images[i].expect("left-hand node");
    if images.iter().flatten().any(|&h| !g.nodes.get(h)) {
        return false;
    }
    if l_edges.iter().any(|&(a, b)| !g.edges.get(mapped(a), mapped(b))) {
        return false;
    }
    // an added edge between matched nodes must not exist yet
    for (a, b) in p.r_edges.iter_ones() {
        if let (Some(x), Some(y)) = (images[a], images[b]) {
            if g.edges.get(x, y) {
                return false;
            }
        }
    }
    // every host edge at an image of a deleted node must be deleted too
    let n = g.universe().len();
    let mut preimage = vec![None; n];
    for (i, h) in images.iter().enumerate() {
        if let Some(h) = h {
            preimage[*h] = Some(i);
        }
    }
    let deleted_host: Vec<bool> = (0..n)
        .map(|h| preimage[h].is_some_and(|i| p.e_nodes.get(i)))
        .collect();
    for x in 0..n {
        for y in 0..n {
            if !g.edges.get(x, y) || !(deleted_host[x] || deleted_host[y]) {
                continue;
            }
            let removed = match (preimage[x], preimage[y]) {
                (Some(a), Some(b)) => p.lhs.edges.get(a, b) && !p.rhs.edges.get(a, b),
                _ => false,
            };
            if !removed {
                return false;
            }
        }
    }
    true
}

/// A rule as bit masks over a universe of at most 8 nodes.
#[derive(Debug, Clone, Copy)]
struct RuleMasks {
    l_nodes: u64,
    l_edges: u64,
    e_nodes: u64,
    e_edges: u64,
    r_nodes: u64,
    r_edges: u64,
}

impl RuleMasks {
    fn of(p: &Production) -> Self {
        let (ln, le) = (node_mask(&p.lhs.nodes), edge_mask(&p.lhs.edges));
        let (rn, re) = (node_mask(&p.rhs.nodes), edge_mask(&p.rhs.edges));
        RuleMasks {
            l_nodes: ln,
            l_edges: le,
            e_nodes: ln & !rn,
            e_edges: le & !re,
            r_nodes: rn & !ln,
            r_edges: re & !le,
        }
    }
}

fn incident_mask(nodes: u64, n: usize) -> u64 {
    let mut mask = 0;
    for i in 0..n {
        for j in 0..n {
            if nodes >> i & 1 == 1 || nodes >> j & 1 == 1 {
                mask |= 1 << (i * n + j);
            }
        }
    }
    mask
}

/// Applies every rule at the identity completion; `None` when a step is
/// not applicable.
fn run_identity(rules: &[RuleMasks], n: usize, nodes: u64, edges: u64) -> Option<(u64, u64)> {
    let (mut xn, mut xe) = (nodes, edges);
    for r in rules {
        let needed = r.l_nodes & !xn == 0 && r.l_edges & !xe == 0;
        let fresh = r.r_nodes & xn == 0 && r.r_edges & xe == 0;
        let no_dangling = xe & incident_mask(r.e_nodes, n) & !r.e_edges == 0;
        if !(needed && fresh && no_dangling) {
            return None;
        }
        xn = (xn & !r.e_nodes) | r.r_nodes;
        xe = (xe & !r.e_edges) | r.r_edges;
    }
    Some((xn, xe))
}

/// Whether `s` applies to `host` at the identity completion, checked from
/// the raw rule masks.
pub fn applies_at_identity(s: &RuleSequence, host: &Digraph) -> bool {
    let rules: Vec<RuleMasks> = s.rules.iter().map(RuleMasks::of).collect();
    let n = s.universe().len();
    run_identity(&rules, n, node_mask(&host.nodes), edge_mask(&host.edges)).is_some()
}

fn digraph_of(u: &Arc<NodeUniverse>, nodes: u64, edges: u64) -> Digraph {
    let n = u.len();
    let mut e = BoolMatrix::zeros(u);
    let mut v = BoolVector::zeros(u);
    for i in 0..n {
        v.set(i, nodes >> i & 1 == 1);
        for j in 0..n {
            e.set(i, j, edges >> (i * n + j) & 1 == 1);
        }
    }
    Digraph::new(e, v).expect("same universe")
}

/// All hosts over the sequence universe on which `s` applies at the
/// identity completion and that have no applicable proper sub-host
/// (fewer nodes or edges).
pub fn minimal_hosts(s: &RuleSequence, bound: usize) -> Result<Vec<Digraph>> {
    let n = s.universe().len();
    if bound > 4 || n > bound {
        return Err(MggError::OutOfRange {
            what: "universe size",
            value: n.max(bound),
            min: 0,
            max: 4,
        });
    }
    if s.len() > 3 {
        return Err(MggError::OutOfRange {
            what: "sequence length",
            value: s.len(),
            min: 0,
            max: 3,
        });
    }
    let rules: Vec<RuleMasks> = s.rules.iter().map(RuleMasks::of).collect();
    let cells = n * n;
    let width = n + cells;
    let states = 1usize << width;
    // state bits: nodes in the low n bits, edges above
    let mut applicable = vec![false; states];
    for (state, slot) in applicable.iter_mut().enumerate() {
        let nodes = (state & ((1 << n) - 1)) as u64;
        let edges = (state >> n) as u64;
        if edges & !allowed_edges(nodes, n) != 0 {
            continue;
        }
        *slot = run_identity(&rules, n, nodes, edges).is_some();
    }
    // below[s] = some applicable host is contained in s
    let mut below = applicable.clone();
    for b in 0..width {
        for state in 0..states {
            if state >> b & 1 == 1 && below[state ^ (1 << b)] {
                below[state] = true;
            }
        }
    }
    let mut out = Vec::new();
    for state in 0..states {
        if !applicable[state] {
            continue;
        }
        let minimal = (0..width).all(|b| state >> b & 1 == 0 || !below[state ^ (1 << b)]);
        if minimal {
            let nodes = (state & ((1 << n) - 1)) as u64;
            out.push(digraph_of(s.universe(), nodes, (state >> n) as u64));
        }
    }
    Ok(out)
}

fn allowed_edges(nodes: u64, n: usize) -> u64 {
    let mut mask = 0;
    for i in 0..n {
        for j in 0..n {
            if nodes >> i & 1 == 1 && nodes >> j & 1 == 1 {
                mask |= 1 << (i * n + j);
            }
        }
    }
    mask
}

/// Pascal's triangle mod 2 by the additive recurrence: pixel `(x, y)` is
/// `C(x + y, x) mod 2`.
pub fn pascal_mod2(bits: u32) -> Result<Bitmap> {
    if bits > 12 {
        return Err(MggError::OutOfRange {
            what: "bits",
            value: bits as usize,
            min: 0,
            max: 12,
        });
    }
    let side = 1usize << bits;
    let mut bitmap = Bitmap::new(side, side);
    let mut prev = vec![true; side];
    for y in 0..side {
        let mut row = vec![true; side];
        if y > 0 {
            for x in 1..side {
                row[x] = row[x - 1] ^ prev[x];
            }
        }
        for (x, &b) in row.iter().enumerate() {
            bitmap.set(x, y, b);
        }
        prev = row;
    }
    Ok(bitmap)
}

/// Swap classes computed with plain integer operations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusTable {
    pub productions: usize,
    /// `((kept cells, acted cells), class size)`, cells as row-major masks.
    pub classes: Vec<((u32, u32), usize)>,
    pub histogram: Vec<usize>,
}

pub fn census_bruteforce(node_count: usize) -> Result<CensusTable> {
    if node_count > 2 {
        return Err(MggError::OutOfRange {
            what: "node_count",
            value: node_count,
            min: 0,
            max: 2,
        });
    }
    let cells = node_count * node_count;
    let all = (1u32 << cells) - 1;
    let mut groups: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    let mut productions = 0;
    for l in 0..=all {
        for r in 0..=all {
            let e = l & !r;
            let a = r & !l;
            *groups.entry((!e & !a & all, e | a)).or_default() += 1;
            productions += 1;
        }
    }
    let mut histogram = vec![0; cells + 1];
    for (_, acted) in groups.keys() {
        histogram[acted.count_ones() as usize] += 1;
    }
    Ok(CensusTable {
        productions,
        classes: groups.into_iter().collect(),
        histogram,
    })
}

/// Seeded generator of rules, hosts and sequences.
pub struct Generator {
    rng: ChaCha8Rng,
    seed: u64,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Compatible digraph: nodes present with probability 3/4, edges
    /// between present nodes with probability 1/2.
    pub fn digraph(&mut self, u: &Arc<NodeUniverse>) -> Digraph {
        let n = u.len();
        let mut nodes = BoolVector::zeros(u);
        for i in 0..n {
            nodes.set(i, self.rng.gen_bool(0.75));
        }
        let mut edges = BoolMatrix::zeros(u);
        for i in 0..n {
            for j in 0..n {
                edges.set(i, j, nodes.get(i) && nodes.get(j) && self.rng.gen_bool(0.5));
            }
        }
        Digraph::new(edges, nodes).expect("same universe")
    }

    /// Random rule: `L` as in [`Generator::digraph`], then every cell is
    /// changed with probability 1/2 (deleted if present, added if absent).
    /// With `compatible`, right-hand edges at missing nodes are dropped.
    pub fn production(&mut self, name: &str, u: &Arc<NodeUniverse>, compatible: bool) -> Production {
        let lhs = self.digraph(u);
        let n = u.len();
        let mut nodes = lhs.nodes.clone();
        for i in 0..n {
            if self.rng.gen_bool(0.5) {
                nodes.set(i, !nodes.get(i));
            }
        }
        let mut edges = lhs.edges.clone();
        for i in 0..n {
            for j in 0..n {
                if self.rng.gen_bool(0.5) {
                    edges.set(i, j, !edges.get(i, j));
                }
                if compatible && !(nodes.get(i) && nodes.get(j)) {
                    edges.set(i, j, false);
                }
            }
        }
        let rhs = Digraph::new(edges, nodes).expect("same universe");
        Production::from_static(name, lhs, rhs).expect("same universe")
    }

    pub fn sequence(&mut self, u: &Arc<NodeUniverse>, len: usize, compatible: bool) -> RuleSequence {
        let rules = (1..=len)
            .map(|k| self.production(&format!("p{k}"), u, compatible))
            .collect();
        RuleSequence::new("s", u, rules).expect("same universe")
    }
}

/// Every compatible digraph over `u`.
pub fn all_digraphs(u: &Arc<NodeUniverse>) -> Vec<Digraph> {
    let n = u.len();
    let mut out = Vec::new();
    for nodes in 0..1u64 << n {
        let allowed = allowed_edges(nodes, n);
        let mut sub = allowed;
        loop {
            out.push(digraph_of(u, nodes, sub));
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & allowed;
        }
    }
    out
}

/// `find_matches` against [`brute_matches`] on random instances.
pub fn audit_matches(seed: u64, instances: usize, max_host: usize, exec: Exec) -> OracleReport {
    let mut gen = Generator::new(seed);
    let mut report = OracleReport::new("matches", Some(seed));
    for _ in 0..instances {
        let rule_size = gen.rng().gen_range(1..=3);
        let host_size = gen.rng().gen_range(1..=max_host);
        let ru = NodeUniverse::numbered(rule_size);
        let hu = NodeUniverse::new((0..host_size).map(|i| format!("h{i}"))).expect("distinct labels");
        let p = gen.production("p", &ru, false);
        let g = gen.digraph(&hu);
        let fast = find_matches_with(&p, &g, exec);
        let slow = brute_matches(&p, &g).expect("host within bound");
        report.record(
            fast == slow,
            || format!("{p:?} into {g:?}"),
            || format!("{slow:?}"),
            || format!("{fast:?}"),
        );
    }
    report
}

/// `gasket_raster` against [`pascal_mod2`], byte for byte.
pub fn audit_gasket(max_bits: u32, exec: Exec) -> OracleReport {
    let mut report = OracleReport::new("gasket", None);
    for bits in 1..=max_bits {
        let fast = gasket_raster_with(bits, exec).expect("bits in range").to_pbm();
        let slow = pascal_mod2(bits).expect("bits in range").to_pbm();
        report.record(
            fast == slow,
            || format!("bits={bits}"),
            || format!("{} bytes", slow.len()),
            || format!("{} bytes", fast.len()),
        );
    }
    report
}

/// `swap_census` against [`census_bruteforce`].
pub fn audit_census(node_count: usize) -> Result<OracleReport> {
    let mut report = OracleReport::new("census", None);
    let fast = swap_census(node_count)?;
    let slow = census_bruteforce(node_count)?;
    let all = (1u32 << (node_count * node_count)) - 1;
    let mut converted: Vec<((u32, u32), usize)> = fast
        .classes
        .iter()
        .map(|(acted, size)| {
            let mask = edge_mask(acted) as u32;
            ((!mask & all, mask), *size)
        })
        .collect();
    converted.sort();
    report.record(
        converted == slow.classes && fast.histogram == slow.histogram && fast.productions == slow.productions,
        || format!("node_count={node_count}"),
        || format!("{slow:?}"),
        || format!("{converted:?}"),
    );
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::gasket_raster;

    #[test]
    fn pascal_basics() {
        let b = pascal_mod2(3).unwrap();
        for x in 0..8 {
            assert!(b.get(x, 0));
            assert!(b.get(0, x));
        }
        assert!(!b.get(1, 1));
        assert!(pascal_mod2(13).is_err());
        for bits in 1..=8 {
            assert_eq!(pascal_mod2(bits).unwrap(), gasket_raster(bits).unwrap());
        }
    }

    #[test]
    fn census_table() {
        let t = census_bruteforce(2).unwrap();
        assert_eq!(t.productions, 256);
        assert_eq!(t.classes.len(), 16);
        assert!(t.classes.iter().all(|(_, size)| *size == 16));
        assert_eq!(t.histogram, vec![1, 4, 6, 4, 1]);
        assert!(audit_census(2).unwrap().passed());
        assert!(audit_census(1).unwrap().passed());
    }

    #[test]
    fn brute_matches_basics() {
        let ru = NodeUniverse::numbered(2);
        let hu = NodeUniverse::new(["a", "b", "c"]).unwrap();
        let cycle = Digraph::from_labels(&hu, &["a", "b", "c"], &[("a", "b"), ("b", "c"), ("c", "a")]).unwrap();
        let edge = Digraph::from_labels(&ru, &["1", "2"], &[("1", "2")]).unwrap();
        let p = Production::identity("e", edge);
        let ms = brute_matches(&p, &cycle).unwrap();
        assert_eq!(ms.len(), 3);
        assert!(!ms.contains(&Match::new(vec![Some(1), Some(0)])));
        let empty = Production::identity("0", Digraph::empty(&ru));
        assert_eq!(brute_matches(&empty, &cycle).unwrap().len(), 1);
    }

    #[test]
    fn matcher_agrees_with_brute_force() {
        let report = audit_matches(5, 300, 5, Exec::default());
        assert!(report.passed(), "{:?}", report.violations.first());
        assert_eq!(report.checked, 300);
    }

    #[test]
    fn all_digraphs_counts() {
        // 1 + 2 + 2 + 16 compatible digraphs on two labelled nodes
        assert_eq!(all_digraphs(&NodeUniverse::numbered(2)).len(), 21);
        assert_eq!(all_digraphs(&NodeUniverse::numbered(1)).len(), 3);
    }

    #[test]
    fn minimal_hosts_of_single_rule() {
        let u = NodeUniverse::numbered(2);
        let mut gen = Generator::new(1);
        for _ in 0..50 {
            let p = gen.production("p", &u, true);
            let s = RuleSequence::new("s", &u, vec![p.clone()]).unwrap();
            let hosts = minimal_hosts(&s, 4).unwrap();
            assert_eq!(hosts, vec![p.lhs.clone()]);
        }
    }

    #[test]
    fn minimal_host_of_two_rule_example() {
        let u = NodeUniverse::numbered(3);
        let g = |nodes: &[&str], edges: &[(&str, &str)]| Digraph::from_labels(&u, nodes, edges).unwrap();
        let q1 = Production::from_static(
            "q1",
            g(&["1", "2", "3"], &[("1", "1"), ("1", "2"), ("3", "1"), ("3", "2")]),
            g(&["1", "2"], &[("1", "1"), ("2", "1")]),
        )
        .unwrap();
        let q2 = Production::from_static(
            "q2",
            g(&["1", "2"], &[("2", "1"), ("2", "2")]),
            g(&["1", "2", "3"], &[("2", "1"), ("2", "2"), ("1", "2"), ("1", "3"), ("2", "3")]),
        )
        .unwrap();
        let s = RuleSequence::new("s", &u, vec![q1, q2]).unwrap();
        let expected = g(&["1", "2", "3"], &[("1", "1"), ("1", "2"), ("2", "2"), ("3", "1"), ("3", "2")]);
        let hosts = minimal_hosts(&s, 3).unwrap();
        assert_eq!(hosts, vec![expected.clone()]);
        for (i, j) in expected.edges.iter_ones() {
            let mut smaller = expected.clone();
            smaller.edges.set(i, j, false);
            assert!(!applies_at_identity(&s, &smaller));
        }
        assert!(minimal_hosts(&s, 5).is_err());
    }

    #[test]
    fn generator_is_reproducible() {
        let u = NodeUniverse::numbered(3);
        let a = Generator::new(9).sequence(&u, 2, true);
        let b = Generator::new(9).sequence(&u, 2, true);
        assert_eq!(a, b);
    }
}
