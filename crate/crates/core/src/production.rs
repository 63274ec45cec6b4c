//! Productions in static `(L, R)` form and their dynamic quantities.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::boolmat::{bounded_one, tensor, BoolArray, BoolMatrix, BoolVector, Digraph, NodeUniverse};
use crate::encoding::ell;
use crate::error::{MggError, Result};
use crate::mcl::ComplexTerm;
use crate::par::{map_range, Exec};

/// A rule `L → R` over one node universe. Deletion `e` and addition `r`
/// are derived, never supplied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub name: String,
    pub lhs: Digraph,
    pub rhs: Digraph,
    pub e_edges: BoolMatrix,
    pub r_edges: BoolMatrix,
    pub e_nodes: BoolVector,
    pub r_nodes: BoolVector,
    /// Nihilation matrix of the left-hand side.
    pub k: BoolMatrix,
    /// Nihilation matrix of the right-hand side.
    pub q: BoolMatrix,
}

impl Production {
    pub fn from_static(name: impl Into<String>, lhs: Digraph, rhs: Digraph) -> Result<Self> {
        if lhs.universe() != rhs.universe() {
            return Err(MggError::UniverseMismatch);
        }
        let e_edges = &lhs.edges & &!&rhs.edges;
        let r_edges = &rhs.edges & &!&lhs.edges;
        let e_nodes = &lhs.nodes & &!&rhs.nodes;
        let r_nodes = &rhs.nodes & &!&lhs.nodes;
        let k = nihilation_of(&e_edges, &r_edges, &e_nodes);
        let q = &e_edges | &(&!&r_edges & &k);
        Ok(Production {
            name: name.into(),
            lhs,
            rhs,
            e_edges,
            r_edges,
            e_nodes,
            r_nodes,
            k,
            q,
        })
    }

    /// The rule that changes nothing.
    pub fn identity(name: impl Into<String>, g: Digraph) -> Self {
        Self::from_static(name, g.clone(), g).expect("same universe")
    }

    pub fn universe(&self) -> &Arc<NodeUniverse> {
        self.lhs.universe()
    }

    /// `L ∨ iK`.
    pub fn lhs_term(&self) -> ComplexTerm {
        ComplexTerm::with_nihil(&self.lhs, self.k.clone()).expect("same universe")
    }

    /// `R ∨ iQ`.
    pub fn rhs_term(&self) -> ComplexTerm {
        ComplexTerm::with_nihil(&self.rhs, self.q.clone()).expect("same universe")
    }

    /// Same rule with its matrices re-expressed over `target` (labels
    /// identified by name).
    pub fn complete_identity(&self, target: &Arc<NodeUniverse>) -> Result<Self> {
        use crate::boolmat::Complete;
        Self::from_static(
            self.name.clone(),
            self.lhs.complete_identity(target)?,
            self.rhs.complete_identity(target)?,
        )
    }
}

fn nihilation_of(e_edges: &BoolMatrix, r_edges: &BoolMatrix, e_nodes: &BoolVector) -> BoolMatrix {
    let keep = !e_nodes;
    let d = tensor(&keep, &keep).expect("same universe");
    r_edges | &(&!e_edges & &!&d)
}

/// `K = r ∨ (ē ∧ D̄)` with `D = ē^V ⊗ ē^V`: edges that must be absent for
/// the rule to apply.
pub fn nihilation(p: &Production) -> BoolMatrix {
    nihilation_of(&p.e_edges, &p.r_edges, &p.e_nodes)
}

/// `Q = e ∨ (r̄ ∧ K)`: edges guaranteed absent after application.
pub fn evolve_nihil(p: &Production) -> BoolMatrix {
    &p.e_edges | &(&!&p.r_edges & &nihilation(p))
}

/// `r ∨ (ē ∧ x)` on edges and nodes.
pub fn apply_production(p: &Production, x: &Digraph) -> Result<Digraph> {
    if x.universe() != p.universe() {
        return Err(MggError::UniverseMismatch);
    }
    Ok(Digraph {
        edges: &p.r_edges | &(&!&p.e_edges & &x.edges),
        nodes: &p.r_nodes | &(&!&p.e_nodes & &x.nodes),
    })
}

/// A self-adjoint term `ē r̄ ∨ i(e ∨ r)`: positions in the nihil part are
/// the ones a rule acts on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Swap {
    pub term: ComplexTerm,
}

impl Swap {
    /// Edge positions acted upon.
    pub fn acted(&self) -> &BoolMatrix {
        &self.term.nihil_edges
    }

    /// Number of edge positions acted upon.
    pub fn arity(&self) -> usize {
        self.term.nihil_edges.count_ones()
    }
}

/// `P(p) = ē r̄ ∨ i(e ∨ r)` over the full universe.
pub fn p_operator(p: &Production) -> Swap {
    let u = p.universe();
    let touched_edges = &p.e_edges | &p.r_edges;
    let touched_nodes = &p.e_nodes | &p.r_nodes;
    let term = ComplexTerm::new(
        !&touched_edges,
        !&touched_nodes,
        touched_edges,
        touched_nodes,
        BoolVector::ones(u),
    )
    .expect("same universe");
    Swap { term }
}

/// `⟨z, w⟩` on edges: positions in `w`'s nihil part exchange certainty and
/// nihil, the rest are kept. Node components of `z` pass through.
pub fn apply_swap(w: &Swap, z: &ComplexTerm) -> Result<ComplexTerm> {
    if !z.cert_edges.shares_universe(&w.term.cert_edges) {
        return Err(MggError::UniverseMismatch);
    }
    let wc = &w.term.cert_edges;
    let wn = &w.term.nihil_edges;
    let (a, b) = (&z.cert_edges, &z.nihil_edges);
    Ok(ComplexTerm {
        cert_edges: &(a & wc) | &(b & wn),
        nihil_edges: &(a & wn) | &(b & wc),
        ..z.clone()
    })
}

/// Both sides free of dangling edges and `R ∧ Q = 0`.
///
/// The last condition alone does not see an added edge at a deleted node,
/// since `Q` never contains added edges; the digraph checks cover that case.
pub fn production_compatible(p: &Production) -> bool {
    p.lhs.is_compatible() && p.rhs.is_compatible() && (&p.rhs.edges & &p.q).is_zero()
}

/// Grouping of every production over a fixed node set by its swap.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwapCensus {
    pub node_count: usize,
    pub productions: usize,
    /// Acted-upon edge set of each class with its size, ordered by the
    /// encoding of the acted-upon set.
    pub classes: Vec<(BoolMatrix, usize)>,
    /// `histogram[k]` = number of classes acting on exactly `k` edges.
    pub histogram: Vec<usize>,
}

/// Enumerates all `(L, R)` edge pairs with every node present.
pub fn swap_census(node_count: usize) -> Result<SwapCensus> {
    swap_census_with(node_count, Exec::default())
}

pub fn swap_census_with(node_count: usize, exec: Exec) -> Result<SwapCensus> {
    if node_count > 2 {
        return Err(MggError::OutOfRange {
            what: "node_count",
            value: node_count,
            min: 0,
            max: 2,
        });
    }
    let u = NodeUniverse::numbered(node_count);
    let cells = node_count * node_count;
    let graphs: Vec<Digraph> = (0..1usize << cells)
        .map(|mask| {
            let mut edges = BoolMatrix::zeros(&u);
            for k in 0..cells {
                edges.set(k / node_count, k % node_count, mask >> k & 1 == 1);
            }
            Digraph::new(edges, BoolVector::ones(&u)).expect("same universe")
        })
        .collect();
    let per_lhs = map_range(exec, 0..graphs.len(), |li| {
        graphs
            .iter()
            .map(|rhs| {
                let p = Production::from_static("", graphs[li].clone(), rhs.clone())
                    .expect("same universe");
                p_operator(&p).acted().clone()
            })
            .collect::<Vec<_>>()
    });
    let mut groups: BTreeMap<_, (BoolMatrix, usize)> = BTreeMap::new();
    let mut productions = 0;
    for acted in per_lhs.into_iter().flatten() {
        productions += 1;
        groups
            .entry(ell(&acted))
            .or_insert_with(|| (acted, 0))
            .1 += 1;
    }
    let mut histogram = vec![0; cells + 1];
    for (acted, _) in groups.values() {
        histogram[acted.count_ones()] += 1;
    }
    Ok(SwapCensus {
        node_count,
        productions,
        classes: groups.into_values().collect(),
        histogram,
    })
}

/// `1_z` of a swap: `⟨w, w⟩` must equal it.
pub fn swap_unit(w: &Swap) -> BoolMatrix {
    bounded_one(&w.term.ambient)
}
