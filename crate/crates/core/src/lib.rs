//! Amplitude-exact simulator for long-distance teleportation of time-bin qubits.
//!
//! The crate models the full experiment chain: qubit preparation in an
//! unbalanced interferometer, entangled-pair emission from down-conversion
//! crystals with realistic multi-pair statistics, a partial Bell-state
//! measurement on a 50/50 splitter with post-selection, threshold detectors
//! with dark counts and a trigger cascade, and the resulting fidelity
//! estimates. A closed-form link-budget model for teleportation-based
//! quantum relays rounds out the picture.
//!
//! Two redundant computation paths are provided on purpose: exact
//! amplitude-level conditional states ([`experiment::analytic_bob_state`])
//! and a frame-by-frame Monte Carlo ([`experiment::run_phase_scan`]).
//! Agreement between the two is the main self-check of the crate.
//!
//! All state algebra is generic over the floating-point scalar via
//! [`Scalar`]; the type aliases at the crate root pin the `f64`
//! instantiation used by the CLI and the test suite.

pub mod detection;
pub mod experiment;
pub mod optics;
pub mod qstate;
pub mod relay;
pub mod sources;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating-point scalar the state algebra is generic over.
///
/// `f32` works for quick exploration; the default tolerances of the
/// invariant checks (1e-9 on norms, Hermiticity, unitarity) assume `f64`,
/// so the per-type defaults below widen for `f32`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + std::iter::Sum
    + std::fmt::Debug
    + Send
    + Sync
    + 'static
{
    /// Default tolerance for norm and unitarity checks.
    fn tol() -> Self;
    /// Amplitudes with squared modulus below this are dropped from states.
    fn drop_eps() -> Self;
    /// Norms below this count as the zero state.
    fn zero_state_eps() -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("f64 conversion")
    }
}

impl Scalar for f64 {
    fn tol() -> Self {
        1e-9
    }
    fn drop_eps() -> Self {
        1e-24
    }
    fn zero_state_eps() -> Self {
        1e-15
    }
}

impl Scalar for f32 {
    fn tol() -> Self {
        1e-4
    }
    fn drop_eps() -> Self {
        1e-12
    }
    fn zero_state_eps() -> Self {
        1e-7
    }
}

/// Default `f64` instantiations used throughout the CLI and tests.
pub type Real = f64;
pub type Amp = num_complex::Complex<f64>;
pub type State = qstate::PhotonicState<f64>;
pub type Transform = qstate::ModeTransform<f64>;
pub type Density = qstate::DensityOperator<f64>;
pub type Pattern = qstate::DetectionPattern;
