//! Exact dense simulation of bi-directional teleportation of GHZ-like states.
//!
//! The crate is organized around a small dense linear-algebra kernel
//! ([`state`], [`gate`], [`dm`], [`measure`]) and three layers built on it:
//!
//! - [`protocol`] — the full bi-directional teleportation run over a
//!   four-qubit cluster channel, including exhaustive branch enumeration.
//! - [`noise`] — six single-qubit Kraus channels applied i.i.d. to the
//!   channel qubits, with exact fidelity curves and the truncated closed
//!   forms commonly quoted for them.
//! - [`qec`] — the twelve-qubit bit-flip repetition code protecting the
//!   channel, with syndrome measurement and success-probability analysis.
//!
//! # Basis convention
//!
//! Qubit 0 is the **most significant bit** of the basis index, so a ket reads
//! left to right: `|q0 q1 ... q(n-1)⟩` has index `q0·2^(n-1) + ... + q(n-1)`.
//! Every state comparison in the protocol layer depends on this ordering.

pub mod dm;
pub mod error;
pub mod gate;
pub mod measure;
pub mod noise;
pub mod protocol;
pub mod qec;
pub mod rng;
pub mod state;

pub use dm::DensityMatrix;
pub use error::{Result, SimError};
pub use gate::Gate;
pub use measure::Projector;
pub use rng::SimRng;
pub use state::PureState;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
