//! Simulation of qubit+ancilla open-system dynamics under Kraus-operator
//! channels, with correlation-based quantifiers of memory effects.
//!
//! The library evolves an initially pure two-qubit system+ancilla state
//! under a time-indexed family of Kraus sets (in particular a generalized
//! amplitude damping channel whose decoherence is frozen after a critical
//! time), tracks entanglement of formation, quantum mutual information and
//! the accessible/inaccessible split of the ancilla-environment
//! information, and integrates temporary revivals of those functionals
//! into two positive-variation measures of non-Markovianity.

pub mod channels;
pub mod cli;
pub mod correlations;
pub mod error;
pub mod nonmarkov;
pub mod qlinalg;

pub use error::{QError, Result};
