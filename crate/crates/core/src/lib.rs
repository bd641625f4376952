//! Exact computation in the Zariski-Riemann space of preorders on `Q^n`.
//!
//! Preorders are represented by canonical matrices over a real number field
//! (see [`preorder`]). On top of that representation the crate provides the
//! refinement order and its meets ([`lattice`]), the ultrametric and
//! neighbourhood witnesses of the patch topology ([`topology`]), the action of
//! `GL_n(Q)` ([`action`]) and the induced monomial valuations on Laurent
//! polynomials ([`valuation`]).

pub mod action;
pub mod checks;
pub mod error;
pub mod json;
pub mod lattice;
pub mod linalg;
pub mod preorder;
#[cfg(test)]
mod proptests;
pub mod rational;
pub mod realfield;
pub mod topology;
pub mod valuation;

pub use error::{Error, Result};
pub use linalg::{FieldVector, RationalSubspace};
pub use preorder::{Preorder, SignClass};
pub use realfield::{FieldElement, NumberField};
