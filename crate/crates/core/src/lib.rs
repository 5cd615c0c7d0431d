//! Simulator of a hybrid diamond NV-center quantum network node.
//!
//! The node register holds an electron-spin interface qubit, three carbon-13
//! nuclear-spin memory qubits and a time-bin photonic qubit. On top of an
//! exact small-register state engine ([`state`]) with interchangeable
//! pure-trajectory and density-matrix backends, the crate implements:
//!
//! * the calibrated node gate set ([`node`]) driven by a [`noise::NoiseModel`],
//! * hybrid GHZ entanglement generation with a stabilizer-witness fidelity
//!   bound ([`ghz`]),
//! * repeated three-qubit repetition-code error correction with real-time
//!   syndrome feedback and error-detection post-selection ([`qec`]),
//! * readout mitigation, exponential lifetime fitting and bootstrap
//!   uncertainties ([`analysis`]),
//! * calibration of microscopic error rates against target observables
//!   ([`calibrate`]) and the on-disk formats ([`records`], [`tables`]).

pub mod analysis;
pub mod calibrate;
pub mod channel;
pub mod error;
pub mod ghz;
pub mod linalg;
pub mod node;
pub mod noise;
pub mod pauli;
pub mod qec;
pub mod records;
pub mod register;
pub mod rng;
pub mod state;
pub mod tables;

pub use error::{Error, Result};
pub use noise::{ConfusionMatrix, NoiseModel};
pub use rng::ShotSeeder;
pub use state::{QuantumState, StateBackend};
