//! Boolean matrices and vectors over an ordered node universe.
//!
//! Every "product" appearing in grammar formulas is the elementwise `and`
//! implemented here; there is no row-by-column matrix product anywhere in
//! the crate.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{BitAnd, BitOr, BitXor, Not};
use std::sync::Arc;

use crate::error::{MggError, Result};

/// Ordered set of node labels. Position in the list fixes the row/column
/// order of every matrix and the bit order of the rational encoding.
#[derive(Debug, Clone)]
pub struct NodeUniverse {
    ids: Vec<String>,
    index: HashMap<String, usize>,
}

impl NodeUniverse {
    pub fn new<I, S>(labels: I) -> Result<Arc<Self>>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ids = Vec::new();
        let mut index = HashMap::new();
        for label in labels {
            let label = label.into();
            if index.insert(label.clone(), ids.len()).is_some() {
                return Err(MggError::DuplicateLabel(label));
            }
            ids.push(label);
        }
        Ok(Arc::new(NodeUniverse { ids, index }))
    }

    /// Universe labelled `1..=n`, the convention used throughout the examples.
    pub fn numbered(n: usize) -> Arc<Self> {
        Self::new((1..=n).map(|i| i.to_string())).expect("numeric labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.ids
    }

    pub fn label(&self, position: usize) -> &str {
        &self.ids[position]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn require(&self, label: &str) -> Result<usize> {
        self.position(label)
            .ok_or_else(|| MggError::UnknownLabel(label.to_string()))
    }
}

impl PartialEq for NodeUniverse {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids
    }
}

impl Eq for NodeUniverse {}

pub(crate) fn same_universe(a: &Arc<NodeUniverse>, b: &Arc<NodeUniverse>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Packed bit buffer backing both matrices and vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut bits = Bits {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        bits.mask_tail();
        bits
    }

    fn mask_tail(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    fn zip(&self, other: &Bits, f: impl Fn(u64, u64) -> u64) -> Bits {
        debug_assert_eq!(self.len, other.len);
        let mut out = Bits {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            len: self.len,
        };
        out.mask_tail();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let tz = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(wi * 64 + tz)
            })
        })
    }
}

/// The three binary connectives available elementwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolOp {
    And,
    Or,
    Xor,
}

/// Shared behaviour of [`BoolMatrix`] and [`BoolVector`].
pub trait BoolArray: Clone + PartialEq + fmt::Debug + Sized {
    /// Number of cells for a universe of `n` nodes.
    fn cell_count(n: usize) -> usize;
    fn universe(&self) -> &Arc<NodeUniverse>;
    fn bits(&self) -> &Bits;
    fn from_bits(universe: Arc<NodeUniverse>, bits: Bits) -> Self;

    fn zeros(universe: &Arc<NodeUniverse>) -> Self {
        Self::from_bits(universe.clone(), Bits::zeros(Self::cell_count(universe.len())))
    }

    fn ones(universe: &Arc<NodeUniverse>) -> Self {
        Self::from_bits(universe.clone(), Bits::ones(Self::cell_count(universe.len())))
    }

    fn is_zero(&self) -> bool {
        self.bits().is_zero()
    }

    fn count_ones(&self) -> usize {
        self.bits().count_ones()
    }

    fn shares_universe(&self, other: &Self) -> bool {
        same_universe(self.universe(), other.universe())
    }
}

fn check<T: BoolArray>(a: &T, b: &T) -> Result<()> {
    if a.shares_universe(b) {
        Ok(())
    } else {
        Err(MggError::UniverseMismatch)
    }
}

/// Componentwise `and`, `or` or `xor`.
pub fn elementwise<T: BoolArray>(op: BoolOp, a: &T, b: &T) -> Result<T> {
    check(a, b)?;
    let bits = match op {
        BoolOp::And => a.bits().zip(b.bits(), |x, y| x & y),
        BoolOp::Or => a.bits().zip(b.bits(), |x, y| x | y),
        BoolOp::Xor => a.bits().zip(b.bits(), |x, y| x ^ y),
    };
    Ok(T::from_bits(a.universe().clone(), bits))
}

/// `ambient ∧ ¬a`: complements are always relative to an explicit ambient.
pub fn complement<T: BoolArray>(a: &T, ambient: &T) -> Result<T> {
    check(a, ambient)?;
    let bits = ambient.bits().zip(a.bits(), |amb, x| amb & !x);
    Ok(T::from_bits(a.universe().clone(), bits))
}

/// `a ≺ b`, i.e. `a ∧ b = a`.
pub fn contains<T: BoolArray>(a: &T, b: &T) -> Result<bool> {
    check(a, b)?;
    Ok(a.bits()
        .words
        .iter()
        .zip(&b.bits().words)
        .all(|(&x, &y)| x & !y == 0))
}

/// Node indicator vector.
#[derive(Clone, PartialEq, Eq)]
pub struct BoolVector {
    universe: Arc<NodeUniverse>,
    bits: Bits,
}

/// Square edge matrix; row = source node, column = target node.
#[derive(Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    universe: Arc<NodeUniverse>,
    bits: Bits,
}

impl BoolArray for BoolVector {
    fn cell_count(n: usize) -> usize {
        n
    }
    fn universe(&self) -> &Arc<NodeUniverse> {
        &self.universe
    }
    fn bits(&self) -> &Bits {
        &self.bits
    }
    fn from_bits(universe: Arc<NodeUniverse>, bits: Bits) -> Self {
        debug_assert_eq!(bits.len(), universe.len());
        BoolVector { universe, bits }
    }
}

impl BoolArray for BoolMatrix {
    fn cell_count(n: usize) -> usize {
        n * n
    }
    fn universe(&self) -> &Arc<NodeUniverse> {
        &self.universe
    }
    fn bits(&self) -> &Bits {
        &self.bits
    }
    fn from_bits(universe: Arc<NodeUniverse>, bits: Bits) -> Self {
        debug_assert_eq!(bits.len(), universe.len() * universe.len());
        BoolMatrix { universe, bits }
    }
}

impl Hash for BoolVector {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl Hash for BoolMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.bits.hash(state);
    }
}

impl BoolVector {
    pub fn from_slice(universe: &Arc<NodeUniverse>, values: &[u8]) -> Result<Self> {
        if values.len() != universe.len() {
            return Err(MggError::UniverseMismatch);
        }
        let mut v = Self::zeros(universe);
        for (i, &x) in values.iter().enumerate() {
            v.bits.set(i, x != 0);
        }
        Ok(v)
    }

    pub fn from_labels<S: AsRef<str>>(universe: &Arc<NodeUniverse>, labels: &[S]) -> Result<Self> {
        let mut v = Self::zeros(universe);
        for label in labels {
            v.bits.set(universe.require(label.as_ref())?, true);
        }
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        self.bits.set(i, value);
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.len()).map(|i| self.get(i) as u8).collect()
    }
}

impl BoolMatrix {
    pub fn from_rows<R: AsRef<[u8]>>(universe: &Arc<NodeUniverse>, rows: &[R]) -> Result<Self> {
        let n = universe.len();
        if rows.len() != n || rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(MggError::UniverseMismatch);
        }
        let mut m = Self::zeros(universe);
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.as_ref().iter().enumerate() {
                m.set(i, j, x != 0);
            }
        }
        Ok(m)
    }

    pub fn from_edges<S: AsRef<str>>(universe: &Arc<NodeUniverse>, edges: &[(S, S)]) -> Result<Self> {
        let mut m = Self::zeros(universe);
        for (s, t) in edges {
            let i = universe.require(s.as_ref())?;
            let j = universe.require(t.as_ref())?;
            m.set(i, j, true);
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.universe.len()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits.get(i * self.dim() + j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let n = self.dim();
        self.bits.set(i * n + j, value);
    }

    /// `(row, column)` of every set cell, row-major.
    pub fn iter_ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.dim();
        self.bits.iter_ones().map(move |k| (k / n, k % n))
    }

    pub fn rows(&self) -> Vec<Vec<u8>> {
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j) as u8).collect())
            .collect()
    }
}

impl fmt::Debug for BoolVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_vec())
    }
}

impl fmt::Debug for BoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows())
    }
}

macro_rules! bool_ops {
    ($ty:ty) => {
        impl BitAnd for &$ty {
            type Output = $ty;
            fn bitand(self, rhs: Self) -> $ty {
                elementwise(BoolOp::And, self, rhs).expect("operands share a universe")
            }
        }
        impl BitOr for &$ty {
            type Output = $ty;
            fn bitor(self, rhs: Self) -> $ty {
                elementwise(BoolOp::Or, self, rhs).expect("operands share a universe")
            }
        }
        impl BitXor for &$ty {
            type Output = $ty;
            fn bitxor(self, rhs: Self) -> $ty {
                elementwise(BoolOp::Xor, self, rhs).expect("operands share a universe")
            }
        }
        /// Complement relative to the whole universe (the default ambient).
        impl Not for &$ty {
            type Output = $ty;
            fn not(self) -> $ty {
                complement(self, &<$ty>::ones(self.universe())).expect("same universe")
            }
        }
    };
}

bool_ops!(BoolVector);
bool_ops!(BoolMatrix);

/// `result[i][j] = u[i] ∧ v[j]`.
pub fn tensor(u: &BoolVector, v: &BoolVector) -> Result<BoolMatrix> {
    check(u, v)?;
    let mut m = BoolMatrix::zeros(&u.universe);
    for i in u.iter_ones() {
        for j in v.iter_ones() {
            m.set(i, j, true);
        }
    }
    Ok(m)
}

/// `1_A = A^V ⊗ A^V`: every edge that may exist between nodes of `v`.
pub fn bounded_one(v: &BoolVector) -> BoolMatrix {
    tensor(v, v).expect("a vector shares its own universe")
}

/// A node-simple digraph: edges plus node indicator.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Digraph {
    pub edges: BoolMatrix,
    pub nodes: BoolVector,
}

impl Digraph {
    pub fn new(edges: BoolMatrix, nodes: BoolVector) -> Result<Self> {
        if !same_universe(edges.universe(), nodes.universe()) {
            return Err(MggError::UniverseMismatch);
        }
        Ok(Digraph { edges, nodes })
    }

    pub fn empty(universe: &Arc<NodeUniverse>) -> Self {
        Digraph {
            edges: BoolMatrix::zeros(universe),
            nodes: BoolVector::zeros(universe),
        }
    }

    /// Digraph over `universe` with the listed nodes and edges.
    pub fn from_labels<S: AsRef<str>>(
        universe: &Arc<NodeUniverse>,
        nodes: &[S],
        edges: &[(S, S)],
    ) -> Result<Self> {
        Ok(Digraph {
            edges: BoolMatrix::from_edges(universe, edges)?,
            nodes: BoolVector::from_labels(universe, nodes)?,
        })
    }

    pub fn universe(&self) -> &Arc<NodeUniverse> {
        self.edges.universe()
    }

    /// No dangling edges: every edge joins two present nodes.
    pub fn is_compatible(&self) -> bool {
        let allowed = bounded_one(&self.nodes);
        contains(&self.edges, &allowed).expect("same universe")
    }

    /// Edges whose source or target node is missing.
    pub fn dangling_edges(&self) -> BoolMatrix {
        complement(&bounded_one(&self.nodes), &self.edges).expect("same universe")
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Digraph")
            .field("edges", &self.edges)
            .field("nodes", &self.nodes)
            .finish()
    }
}

/// Re-expressing a value over a larger (or permuted) node universe.
pub trait Complete: Sized {
    /// Rows and columns are moved according to `mapping` (source label to
    /// target label); target positions without a preimage are filled with 0.
    fn complete_to(&self, target: &Arc<NodeUniverse>, mapping: &HashMap<String, String>) -> Result<Self>;

    /// Completion that identifies equal labels.
    fn complete_identity(&self, target: &Arc<NodeUniverse>) -> Result<Self>;
}

fn position_map(
    source: &NodeUniverse,
    target: &NodeUniverse,
    mapping: &HashMap<String, String>,
) -> Result<Vec<usize>> {
    for key in mapping.keys() {
        source.require(key)?;
    }
    let mut seen = HashSet::new();
    source
        .labels()
        .iter()
        .map(|label| {
            let image = mapping
                .get(label)
                .ok_or_else(|| MggError::UnmappedLabel(label.clone()))?;
            let pos = target.require(image)?;
            if !seen.insert(pos) {
                return Err(MggError::NonInjectiveMapping(image.clone()));
            }
            Ok(pos)
        })
        .collect()
}

fn identity_mapping(source: &NodeUniverse) -> HashMap<String, String> {
    source
        .labels()
        .iter()
        .map(|l| (l.clone(), l.clone()))
        .collect()
}

impl Complete for BoolVector {
    fn complete_to(&self, target: &Arc<NodeUniverse>, mapping: &HashMap<String, String>) -> Result<Self> {
        let pos = position_map(&self.universe, target, mapping)?;
        let mut out = BoolVector::zeros(target);
        for i in self.iter_ones() {
            out.set(pos[i], true);
        }
        Ok(out)
    }

    fn complete_identity(&self, target: &Arc<NodeUniverse>) -> Result<Self> {
        self.complete_to(target, &identity_mapping(&self.universe))
    }
}

impl Complete for BoolMatrix {
    fn complete_to(&self, target: &Arc<NodeUniverse>, mapping: &HashMap<String, String>) -> Result<Self> {
        let pos = position_map(&self.universe, target, mapping)?;
        let mut out = BoolMatrix::zeros(target);
        for (i, j) in self.iter_ones() {
            out.set(pos[i], pos[j], true);
        }
        Ok(out)
    }

    fn complete_identity(&self, target: &Arc<NodeUniverse>) -> Result<Self> {
        self.complete_to(target, &identity_mapping(&self.universe))
    }
}

impl Complete for Digraph {
    fn complete_to(&self, target: &Arc<NodeUniverse>, mapping: &HashMap<String, String>) -> Result<Self> {
        Ok(Digraph {
            edges: self.edges.complete_to(target, mapping)?,
            nodes: self.nodes.complete_to(target, mapping)?,
        })
    }

    fn complete_identity(&self, target: &Arc<NodeUniverse>) -> Result<Self> {
        self.complete_to(target, &identity_mapping(self.universe()))
    }
}
