//! Combinatorial specifications for permutation classes with finitely many
//! simple permutations.
//!
//! Starting from a basis `B` and the simple permutations of `Av(B)`, the
//! crate builds a system of equations over restriction terms, disambiguates
//! it into a specification, counts the class and samples it uniformly.
//! The [`oracle`] module gives brute force ground truth for small sizes.

pub mod disambiguate;
pub mod embeddings;
pub mod enumeration;
pub mod error;
pub mod io;
pub mod oracle;
pub mod par;
pub mod perm;
pub mod restriction;
pub mod sampler;
pub mod system;

pub use error::{Error, Result};
pub use perm::{p, Perm, Root};
pub use restriction::{Delta, Equation, Restriction, Term};
pub use system::{Basis, EquationSystem};
