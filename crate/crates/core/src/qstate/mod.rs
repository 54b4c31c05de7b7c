//! Exact amplitude-level algebra for few-photon states over labeled
//! optical modes: construction, linear-optics evolution, detection
//! conditioning, density operators and fidelity.

mod density;
mod error;
mod mode;
mod pattern;
mod state;
mod transform;

pub use density::{fidelity, hermitian_eigenvalues, trace_to_density, DensityOperator};
pub use error::StateError;
pub use mode::{Mode, Spatial};
pub use pattern::{condition_on_pattern, Conditioned, DetectionPattern, SlotKey};
pub use state::{FockTerm, PhotonicState, CREATION_MONOMIAL_LIMIT};
pub use transform::ModeTransform;

/// Number of internal distinguishability tags carried through every
/// transform. Tag 0 is the reference wavepacket; tag 1 absorbs every
/// orthogonal component (arrival-time/spectral mismatch, source dephasing).
pub const TAG_COUNT: u8 = 2;
