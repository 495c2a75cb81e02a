//! Noise simulation for a chiral quantum-walk router on the Lily graph.
//!
//! The router sends an arbitrary qubit encoded on two input nodes to one of `n`
//! outputs by a continuous-time quantum walk. This crate builds the walk
//! Hamiltonian, evolves it (exactly or by Trotter products along noisy parameter
//! paths), evaluates the Bloch-averaged routing fidelity, and averages it over
//! static and Ornstein-Uhlenbeck noise on the coupling phases and weights.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod fidelity;
pub mod graph;
pub mod noise;
pub mod operator;

pub use error::{Error, Result};
pub use graph::{LilyParams, ReducedParams};
pub use noise::{EnsembleEstimate, NoiseSpec};
pub use operator::{HermitianOperator, UnitaryOperator, C64};
