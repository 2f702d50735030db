//! Which complete graphs `K_m` embed in the 3-sphere with orientation-preserving
//! topological symmetry group A4, S4 or A5.
//!
//! The crate is split along the pipeline:
//!
//! - [`perm`]: enumerated permutation groups, coset actions, Burnside counts.
//! - [`profile`]: fixed-vertex constraints, profile tables and the necessity verdicts.
//! - [`oracle`]: brute-force orbit-decomposition check of the admissible residues.
//! - [`builder`]: explicit vertex actions for every admissible `m`.
//! - [`geom`]: SO(4) representations, fixed circles and vertex coordinates on S³.
//! - [`edges`]: the five edge-embedding hypotheses and the arc certificates.

pub mod builder;
pub mod edges;
pub mod geom;
pub mod oracle;
pub mod perm;
pub mod profile;

pub use perm::{GroupName, PermGroup, Permutation};
