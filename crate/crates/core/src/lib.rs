//! Hybrid small-world/scale-free networks and mixed-model information
//! spreading.
//!
//! * [`graph`]: simple undirected graph with node provenance and
//!   dominant/implicit edge labels.
//! * [`generators`]: Networks I, II and III plus their WS and BA building
//!   blocks.
//! * [`propagation`]: discrete-round SIS/SIR/SIRS mixture dynamics with the
//!   blockbuster trigger.
//! * [`meanfield`]: degree-class mean-field equations, steady state and
//!   propagation threshold.
//! * [`analysis`]: analytic degree distributions, histograms and the curve
//!   similarity score.

pub mod analysis;
pub mod error;
pub mod generators;
pub mod graph;
pub mod meanfield;
pub mod propagation;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{DegreeMode, GeneratorTag, HybridGraph, NodeId, NodeMeta, Origin, Visibility};
pub use propagation::Mixture;
