//! Certificates of non-preparability for qudit graph states in quantum
//! networks with bipartite sources and shared randomness.
//!
//! Given a weighted multigraph of prime local dimension, this crate
//! constructs a machine-checkable derivation showing that the associated
//! graph state cannot be produced by any network in which every source
//! distributes states to at most two parties and the parties coordinate
//! only through pre-shared randomness. The derivation is re-verified by an
//! independent checker, and a fidelity radius is computed within which all
//! nearby states are excluded as well.
//!
//! The main entry points are [`analysis::analyze`], which runs the whole
//! pipeline, [`certificate::build_certificate`] /
//! [`certificate::verify_certificate`] for the proof objects themselves,
//! and [`bounds`] for the closed-form thresholds.

pub mod analysis;
pub mod bounds;
pub mod certificate;
pub mod dense;
pub mod graph;
pub mod inflation;
pub mod modular;
pub mod normalize;
pub mod pauli;
pub mod selftest;
pub mod stabilizer;

/// Dense matrices and state vectors are refused above this dimension
/// unless the caller passes an explicit limit.
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

/// Default absolute tolerance for unit-scale numeric self-checks.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
