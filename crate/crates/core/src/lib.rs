//! Approximate reflection operators over eigenvectors of unitaries.
//!
//! Two constructions are provided: the phase-estimation reflector ([`pea`]) and the
//! Gaussian linear-combination-of-unitaries reflector with two rounds of oblivious
//! amplitude amplification ([`lcu`]). Both run on a small dense statevector
//! simulator ([`sim`]) and are checked against the exact reflection obtained by
//! diagonalization ([`verify`]).
//!
//! The simulator, the Gaussian kernel and the state-preparation builders are generic
//! over the real scalar ([`Real`], `f32` or `f64`); the aliases below fix `f64`,
//! which is what the reflector layers use.

pub mod accounting;
pub mod error;
pub mod grover;
pub mod kernel;
pub mod lcu;
pub mod pea;
pub mod prep;
pub mod scalar;
pub mod sim;
pub mod spectral;
pub mod suite;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

pub type C64 = num_complex::Complex<f64>;
pub type StateVector = sim::StateVec<f64>;
pub type Op = sim::CircuitOp<f64>;
