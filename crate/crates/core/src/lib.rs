//! Self-similar ℤ-actions on single-vertex k-graphs, the semigroups
//! `⟨a, edges⟩` they generate, and exact symbolic computation in the
//! associated C*-algebras.

pub mod kgraph;
pub mod selfsim;
pub mod semigroup;
pub mod periodicity;
pub mod staralg;
pub mod config;
