//! Exact bookkeeping for rational blow-down constructions: intersection
//! lattices of iterated blow-ups of the plane, class-T chains, contraction
//! checks and invariants of the blown-down manifold.

pub mod cli;
pub mod constructions;
pub mod contraction;
pub mod lattice;
pub mod linalg;
pub mod rational;
pub mod tchains;
pub mod topology;
