//! Matrix graph grammars over Boolean adjacency matrices, with a monotone
//! complex logic layer for nihil (forbidden) elements.
//!
//! Rules and hosts are simple digraphs over an ordered node universe.
//! Every formula is evaluated with elementwise Boolean operations.

pub mod boolmat;
pub mod derivation;
pub mod encoding;
pub mod error;
pub mod grammar;
pub mod mcl;
pub mod oracle;
pub mod par;
pub mod production;
pub mod report;
pub mod sequence;

pub use error::{MggError, Morphism, Result};
