//! Deterministic statevector simulation of bidirectional quantum
//! teleportation: channel construction, protocol execution with derived
//! Pauli corrections, resource accounting and decoy-qubit eavesdropping
//! simulation.

pub mod channels;
pub mod error;
pub mod gates;
pub mod statevector;

pub use channels::Party;
pub use error::{Error, Result};
pub use gates::Gate;
pub use statevector::{labels, Amplitude, MixedState, PureState, QubitLabel};
