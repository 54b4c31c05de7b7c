use thiserror::Error;

use super::Mode;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StateError {
    #[error("all amplitudes vanish, cannot normalize the zero state")]
    ZeroState,
    #[error("non-finite amplitude component in state construction")]
    NonFinite,
    #[error("photon number {found} exceeds configured cutoff {cutoff}")]
    CutoffExceeded { found: u32, cutoff: u32 },
    #[error("spatial label {0} appears in both tensor factors")]
    ModeCollision(String),
    #[error("populated mode {0} is an output of the transform but not among its inputs")]
    UncoveredMode(Mode),
    #[error("transform matrix is not an isometry within tolerance (max deviation {0:.3e})")]
    NotIsometry(f64),
    #[error("unitary transform must be square, got {outputs} outputs for {inputs} inputs")]
    NotSquare { inputs: usize, outputs: usize },
    #[error("detection pattern has no clicked modes")]
    EmptyPattern,
    #[error("keep set selects no populated modes")]
    EmptyKeepSet,
    #[error("target state contains occupations outside the density operator basis")]
    BasisMismatch,
    #[error("density operator failed validation: {0}")]
    InvalidDensity(String),
    #[error("parse error: {0}")]
    Parse(String),
}
