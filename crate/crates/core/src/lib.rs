//! Finite-bath quantum thermodynamics on exactly evolved system-bath models.
//!
//! The crate is organised bottom-up:
//!
//! * [`qdyn`]: dense Hermitian algebra, density matrices, exact unitary propagation,
//!   partial traces and entropy functionals.
//! * [`thermo`]: canonical ensembles over a bath spectrum, the effective inverse
//!   temperature of a nonequilibrium bath, entropy productions and observational entropy.
//! * [`models`]: the XY spin chain and the two-band random-matrix bath.
//! * [`bounds`]: lower bounds on the heat dissipated into the bath.
//! * [`engine`]: the closed-form swap engine with a finite hot bath.
//!
//! Units are `hbar = k_B = 1` throughout.

pub mod bounds;
pub mod engine;
pub mod models;
pub mod qdyn;
pub mod rng;
pub mod thermo;

pub use bounds::{BoundKind, BoundSeries, KrausSet};
pub use engine::{EngineTrajectory, SwapEngineParams};
pub use models::{InitialCondition, ModelHamiltonians, RandomMatrixModel, SpinChainModel, SystemState};
pub use qdyn::{CompositeSpace, DensityMatrix, HermitianOperator, Propagator, SpectralDecomposition};
pub use thermo::{BathSpectrum, EffectiveBeta, EnergyCoarseGraining, EntropyLedger, ThermoTrajectory};

