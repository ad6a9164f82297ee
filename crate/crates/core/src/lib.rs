//! Polyhedral classical simulators for qubit circuits.
//!
//! The fast path is a bit-packed Gottesman-Knill tableau ([`tableau`]).
//! Beyond stabilizer circuits, [`geometry`] decides by linear programming
//! whether an instrument maps one operator polytope into another, and turns
//! that into stochastic update maps that [`engine`] samples from. Circuits
//! are written as adaptive instruments ([`adaptive`]); the dense
//! [`oracle`] is the reference everything is tested against at small sizes.
//!
//! ```
//! use polysim::tableau::StabilizerTableau;
//! use polysim::pauli::CliffordGate;
//!
//! let mut t = StabilizerTableau::init_zero(2).unwrap();
//! t.apply_gate(CliffordGate::H(0)).unwrap();
//! t.apply_gate(CliffordGate::Cnot(0, 1)).unwrap();
//! assert_eq!(t.stabilizer_strings(), vec!["+XX", "+ZZ"]);
//! ```

pub mod adaptive;
pub mod cli;
pub mod cnc;
pub mod engine;
mod error;
pub mod geometry;
pub mod lp;
pub mod oracle;
pub mod pauli;
pub mod tableau;

pub use error::{Error, Result};

/// Crate version embedded in every CLI report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
