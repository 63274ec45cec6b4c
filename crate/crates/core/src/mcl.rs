//! Complex terms `a ∨ i b` and their monotone algebra.
//!
//! A term carries an edge component and a node component. The operations
//! act on both uniformly; the metric notions (orthogonality,
//! self-adjointness, norms and the rational encoding) are statements about
//! the edge component, which is where nihil information lives for grammar
//! derived terms.

use std::fmt;
use std::sync::Arc;

use crate::boolmat::{
    bounded_one, complement, contains, same_universe, BoolArray, BoolMatrix, BoolVector, Digraph,
    NodeUniverse,
};
use crate::error::{MggError, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComplexTerm {
    pub cert_edges: BoolMatrix,
    pub cert_nodes: BoolVector,
    pub nihil_edges: BoolMatrix,
    pub nihil_nodes: BoolVector,
    /// Node set defining `1_z`, the bound for every complement.
    pub ambient: BoolVector,
}

impl ComplexTerm {
    pub fn new(
        cert_edges: BoolMatrix,
        cert_nodes: BoolVector,
        nihil_edges: BoolMatrix,
        nihil_nodes: BoolVector,
        ambient: BoolVector,
    ) -> Result<Self> {
        let u = cert_edges.universe();
        let ok = [
            nihil_edges.universe(),
            cert_nodes.universe(),
            nihil_nodes.universe(),
            ambient.universe(),
        ]
        .into_iter()
        .all(|other| same_universe(u, other));
        if !ok {
            return Err(MggError::UniverseMismatch);
        }
        Ok(ComplexTerm {
            cert_edges,
            cert_nodes,
            nihil_edges,
            nihil_nodes,
            ambient,
        })
    }

    /// The zero term over the whole universe.
    pub fn zero(universe: &Arc<NodeUniverse>) -> Self {
        ComplexTerm {
            cert_edges: BoolMatrix::zeros(universe),
            cert_nodes: BoolVector::zeros(universe),
            nihil_edges: BoolMatrix::zeros(universe),
            nihil_nodes: BoolVector::zeros(universe),
            ambient: BoolVector::ones(universe),
        }
    }

    /// The nil term `i`: everything in the nihil part.
    pub fn nil(universe: &Arc<NodeUniverse>) -> Self {
        ComplexTerm {
            nihil_edges: BoolMatrix::ones(universe),
            nihil_nodes: BoolVector::ones(universe),
            ..Self::zero(universe)
        }
    }

    /// Edge-only term `cert ∨ i nihil`, node parts empty, full ambient.
    pub fn from_matrices(cert: BoolMatrix, nihil: BoolMatrix) -> Result<Self> {
        if !cert.shares_universe(&nihil) {
            return Err(MggError::UniverseMismatch);
        }
        let u = cert.universe().clone();
        Ok(ComplexTerm {
            cert_edges: cert,
            nihil_edges: nihil,
            ..Self::zero(&u)
        })
    }

    /// `g ∨ i nihil`: a digraph in the certainty part plus forbidden edges.
    pub fn with_nihil(g: &Digraph, nihil: BoolMatrix) -> Result<Self> {
        Self::new(
            g.edges.clone(),
            g.nodes.clone(),
            nihil,
            BoolVector::zeros(g.universe()),
            BoolVector::ones(g.universe()),
        )
    }

    pub fn universe(&self) -> &Arc<NodeUniverse> {
        self.cert_edges.universe()
    }

    /// `1_z` for edges.
    pub fn one_edges(&self) -> BoolMatrix {
        bounded_one(&self.ambient)
    }

    pub fn is_zero(&self) -> bool {
        self.cert_edges.is_zero()
            && self.cert_nodes.is_zero()
            && self.nihil_edges.is_zero()
            && self.nihil_nodes.is_zero()
    }

    /// Membership in the matrix algebra: certainty and nihil parts disjoint.
    pub fn is_disjoint(&self) -> bool {
        (&self.cert_edges & &self.nihil_edges).is_zero()
            && (&self.cert_nodes & &self.nihil_nodes).is_zero()
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.cert_edges.shares_universe(&other.cert_edges) {
            Ok(())
        } else {
            Err(MggError::UniverseMismatch)
        }
    }

    /// Equality up to the common-part equivalence.
    pub fn eq_normalized(&self, other: &Self) -> bool {
        let a = pmma_normalize(self);
        let b = pmma_normalize(other);
        a.cert_edges == b.cert_edges
            && a.cert_nodes == b.cert_nodes
            && a.nihil_edges == b.nihil_edges
            && a.nihil_nodes == b.nihil_nodes
    }
}

impl fmt::Debug for ComplexTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({:?}, {:?}) ∨ i({:?}, {:?})",
            self.cert_edges, self.cert_nodes, self.nihil_edges, self.nihil_nodes
        )
    }
}

/// `(a1 ∨ a2) ∨ i(b1 ∨ b2)`.
pub fn cadd(z1: &ComplexTerm, z2: &ComplexTerm) -> Result<ComplexTerm> {
    z1.check(z2)?;
    Ok(ComplexTerm {
        cert_edges: &z1.cert_edges | &z2.cert_edges,
        cert_nodes: &z1.cert_nodes | &z2.cert_nodes,
        nihil_edges: &z1.nihil_edges | &z2.nihil_edges,
        nihil_nodes: &z1.nihil_nodes | &z2.nihil_nodes,
        ambient: &z1.ambient | &z2.ambient,
    })
}

fn mul_parts<T: BoolArray>(a1: &T, b1: &T, a2: &T, b2: &T) -> (T, T)
where
    for<'a> &'a T: std::ops::BitAnd<Output = T> + std::ops::BitOr<Output = T>,
{
    let cert = &(a1 & a2) | &(b1 & b2);
    let nihil = &(a1 & b2) | &(a2 & b1);
    (cert, nihil)
}

/// `(a1a2 ∨ b1b2) ∨ i(a1b2 ∨ a2b1)`.
pub fn cmul(z1: &ComplexTerm, z2: &ComplexTerm) -> Result<ComplexTerm> {
    z1.check(z2)?;
    let (cert_edges, nihil_edges) =
        mul_parts(&z1.cert_edges, &z1.nihil_edges, &z2.cert_edges, &z2.nihil_edges);
    let (cert_nodes, nihil_nodes) =
        mul_parts(&z1.cert_nodes, &z1.nihil_nodes, &z2.cert_nodes, &z2.nihil_nodes);
    Ok(ComplexTerm {
        cert_edges,
        cert_nodes,
        nihil_edges,
        nihil_nodes,
        ambient: &z1.ambient | &z2.ambient,
    })
}

/// `z* = b̄ ∨ i ā`, complements bounded by the term's ambient.
pub fn conj(z: &ComplexTerm) -> ComplexTerm {
    let one = z.one_edges();
    ComplexTerm {
        cert_edges: complement(&z.nihil_edges, &one).expect("same universe"),
        cert_nodes: complement(&z.nihil_nodes, &z.ambient).expect("same universe"),
        nihil_edges: complement(&z.cert_edges, &one).expect("same universe"),
        nihil_nodes: complement(&z.cert_nodes, &z.ambient).expect("same universe"),
        ambient: z.ambient.clone(),
    }
}

/// `⟨z1, z2⟩ = z1 z2*`.
pub fn dot(z1: &ComplexTerm, z2: &ComplexTerm) -> Result<ComplexTerm> {
    z1.check(z2)?;
    cmul(z1, &conj(z2))
}

/// Canonical representative: the common part of certainty and nihil is
/// dropped from both.
pub fn pmma_normalize(z: &ComplexTerm) -> ComplexTerm {
    let common_edges = &z.cert_edges & &z.nihil_edges;
    let common_nodes = &z.cert_nodes & &z.nihil_nodes;
    ComplexTerm {
        cert_edges: complement(&common_edges, &z.cert_edges).expect("same universe"),
        cert_nodes: complement(&common_nodes, &z.cert_nodes).expect("same universe"),
        nihil_edges: complement(&common_edges, &z.nihil_edges).expect("same universe"),
        nihil_nodes: complement(&common_nodes, &z.nihil_nodes).expect("same universe"),
        ambient: z.ambient.clone(),
    }
}

/// `⟨z1, z2⟩ = 0` on the edge component.
pub fn is_orthogonal(z1: &ComplexTerm, z2: &ComplexTerm) -> Result<bool> {
    let d = dot(z1, z2)?;
    Ok(d.cert_edges.is_zero() && d.nihil_edges.is_zero())
}

/// Containment form of orthogonality: `(a1 ∨ b1) ≺ a2 b2`.
pub fn is_orthogonal_by_containment(z1: &ComplexTerm, z2: &ComplexTerm) -> Result<bool> {
    z1.check(z2)?;
    let support = &z1.cert_edges | &z1.nihil_edges;
    // Cells outside the ambient of z2 are complemented to 0 by conjugation.
    let both = &(&z2.cert_edges & &z2.nihil_edges) | &complement(&z2.one_edges(), &BoolMatrix::ones(z2.universe()))?;
    contains(&support, &both)
}

/// `z* = z` on the edge component, i.e. `a ⊕ b = 1_z`.
pub fn is_self_adjoint(z: &ComplexTerm) -> bool {
    let c = conj(z);
    c.cert_edges == z.cert_edges && c.nihil_edges == z.nihil_edges
}
