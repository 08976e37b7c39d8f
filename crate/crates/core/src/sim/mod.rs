//! Dense statevector substrate.
//!
//! Qubit `q` is bit `q` of a basis index. Operators bind their local bit `i` to the
//! `i`-th entry of a target list. In ancilla/system layouts the ancilla takes the
//! high bits.

mod apply;
mod op;
mod state;

pub use apply::{apply, apply_counted};
pub use op::{gates, CircuitOp, DenseMatrix, OpKind, ResourceFootprint, Step};
pub use state::{RegisterLayout, StateVec};
