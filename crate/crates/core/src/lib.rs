//! Neutrino flavor oscillations as the reduced coin dynamics of a
//! discrete-time quantum walk.
//!
//! The walker's position is treated as an environment and traced out. What
//! remains is a quantum channel on the coin, given by Kraus operators that
//! are built step by step from a recurrence. With one 2-dimensional coin
//! sector per neutrino mass eigenstate and the walker prepared in a lattice
//! momentum eigenstate, the coin channel reproduces flavor oscillation
//! probabilities.
//!
//! Modules:
//!
//! * [`walk`]: coin and shift operators, state-vector evolution, dispersion.
//! * [`kraus`]: Kraus recurrence, extended and block families, channel application.
//! * [`neutrino`]: mixing matrices, flavor states in coin space, transition series.
//! * [`entanglement`]: linear entropies of the flavor-mode occupation state.
//! * [`embedding`]: one-hot three-qubit encoding of the mixing matrix.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod density;
pub mod embedding;
pub mod entanglement;
pub mod error;
pub mod kraus;
pub mod linalg;
pub mod neutrino;
pub mod tol;
pub mod walk;

pub use density::DensityMatrix;
pub use error::{Error, Result};
pub use kraus::{
    apply_channel, block_kraus, extend_kraus, initial_kraus, kraus_at, kraus_step,
    ExtendedKrausFamily, KrausFamily,
};
pub use linalg::{CMatrix, C64};
pub use walk::{Boundary, CoinParams, LatticeSpec, MomentumSpec, WalkState};
