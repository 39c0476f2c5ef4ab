//! Wedge decompositions of suspended Poincare duality 5-complexes.
//!
//! Given the homology table `(m, n, T)` of a connected orientable
//! Poincare duality 5-complex with torsion-free `H_1`, together with the
//! attaching-coefficient data of its 5-cells and top cell, [`splitter`]
//! computes the canonical wedge decomposition of the suspension and
//! classifies the exceptional attaching map `f`. [`oracle`] re-derives
//! homology from cellular boundary matrices, and [`invariants`] evaluates
//! cohomology and cohomotopy on the result.

pub mod abgroup;
pub mod blocks;
pub mod splitter;
pub mod oracle;
pub mod invariants;
pub mod manifolds;
pub mod cli;
