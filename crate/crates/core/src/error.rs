use thiserror::Error;

/// Errors produced by the simulator core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not unitary (max deviation {deviation:.3e} > {tolerance:.3e})")]
    NonUnitary { deviation: f64, tolerance: f64 },

    #[error("qubit index {index} out of range for {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),

    #[error("Kraus channel incomplete: sum K†K deviates from identity by {deviation:.3e}")]
    IncompleteChannel { deviation: f64 },

    #[error("Pauli string acts as identity on every qubit")]
    AllIdentityPauli,

    #[error("partial trace requires a non-empty keep list")]
    EmptyKeepList,

    #[error("operation requires the density-matrix backend")]
    DensityBackendRequired,

    #[error("photon qubit already emitted in this shot")]
    PhotonAlreadyEmitted,

    #[error("qubit {0} is not a memory qubit")]
    NotMemoryQubit(usize),

    #[error("invalid register: {0}")]
    InvalidRegister(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid noise model: {0}")]
    InvalidNoiseModel(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("missing basis {0} in witness estimation")]
    MissingBasis(&'static str),

    #[error("no heralded coincidences for basis {0}")]
    NoCoincidences(&'static str),

    #[error("empty record set")]
    EmptyRecords,

    #[error("post-selection rejected every record")]
    EmptyPostSelection,

    #[error("fit failed: {0}")]
    FitFailed(String),

    #[error("calibration failed: {0}")]
    CalibrationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
