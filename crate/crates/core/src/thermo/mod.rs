//! Canonical ensembles on a bath spectrum and the entropy bookkeeping built on them.
//!
//! The bath is only ever described by its mean energy: at each time the effective inverse
//! temperature `β(t)` is the one whose canonical state has the same mean energy as the
//! actual reduced bath state. All internal work is done in `β`; a temperature is only
//! produced for output, since `T = 1/β` jumps through infinity when the bath becomes
//! population inverted while `β` stays continuous.

mod observational;
mod root;
pub(crate) use root::bracketed_root;
mod spectrum;
mod trajectory;

pub use observational::{default_bin_count, observational_entropy, sigma_tilde, EnergyBin, EnergyCoarseGraining};
pub use spectrum::{temperature_of, BathSpectrum, EffectiveBeta};
pub use trajectory::{
    build_trajectory, entropy_ledger, entropy_ledger_at, quadrature_cross_check, sample_trajectory, EntropyLedger,
    ThermoTrajectory,
};

use thiserror::Error;

use crate::qdyn::QdynError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermoError {
    #[error(transparent)]
    Qdyn(#[from] QdynError),
    #[error("bath spectrum needs at least two distinct energies")]
    DegenerateSpectrum,
    #[error("inverse temperature must be finite, got {0}")]
    NonFiniteBeta(f64),
    #[error("energy {target} lies outside the reachable band ({e_min}, {e_max})")]
    UnreachableEnergy { target: f64, e_min: f64, e_max: f64 },
    #[error("energy {0} sits at a spectral extreme: |beta| would be infinite")]
    InfiniteBeta(f64),
    #[error("root finder stalled with residual {0:e}")]
    SolverStalled(f64),
    #[error("trajectory needs at least {needed} points, got {found}")]
    TooShort { needed: usize, found: usize },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("coarse graining does not match the bath spectrum")]
    CoarseGrainingMismatch,
    #[error("final bath state has energy {state}, trajectory ends at {trajectory}")]
    InconsistentFinalState { state: f64, trajectory: f64 },
    #[error("beta0 = {beta0} gives bath energy {energy}, trajectory starts at {trajectory}")]
    InconsistentInitialBeta { beta0: f64, energy: f64, trajectory: f64 },
    #[error("bin count must be at least one")]
    NoBins,
}
