//! Exactly solvable system–bath models and product initial states.
//!
//! Every builder returns a [`ModelHamiltonians`] whose joint space lists the system factor
//! first, followed by the bath factors.

use thiserror::Error;

use crate::qdyn::{pauli, CMatrix, CompositeSpace, DensityMatrix, HermitianOperator, Pauli, QdynError, C64};
use crate::rng::SeededRng;
use crate::thermo::{BathSpectrum, ThermoError};

pub const DEFAULT_MAX_DIM: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Qdyn(#[from] QdynError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error("joint dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("invalid count: {0}")]
    InvalidCount(String),
    #[error("bands overlap: eps1 - eps0 = {gap} is smaller than the width {width}")]
    BandOverlap { gap: f64, width: f64 },
    #[error("parameter {0} must be finite")]
    NonFinite(&'static str),
    #[error("invalid initial state: {0}")]
    InvalidState(String),
}

/// XY chain bath coupled at its first site to a single system spin.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinChainModel {
    pub n_bath_spins: usize,
    pub field_system: f64,
    pub field_bath: f64,
    pub coupling_chain: f64,
    pub coupling_sb: f64,
    pub max_dim: usize,
}

impl SpinChainModel {
    pub fn new(n_bath_spins: usize, field_system: f64, field_bath: f64, coupling_chain: f64, coupling_sb: f64) -> Self {
        Self { n_bath_spins, field_system, field_bath, coupling_chain, coupling_sb, max_dim: DEFAULT_MAX_DIM }
    }

    /// All fields and couplings equal to one.
    pub fn uniform(n_bath_spins: usize) -> Self {
        Self::new(n_bath_spins, 1.0, 1.0, 1.0, 1.0)
    }
}

/// Two-level system coupled through `σ_x` to a bath with two bands of random levels.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomMatrixModel {
    pub eps0: f64,
    pub eps1: f64,
    pub width: f64,
    pub v0: usize,
    pub v1: usize,
    pub coupling: f64,
    pub coupling_variance: f64,
    pub seed: u64,
}

impl Default for RandomMatrixModel {
    fn default() -> Self {
        Self { eps0: 0.0, eps1: 1.0, width: 1.0, v0: 10, v1: 100, coupling: 0.3, coupling_variance: 1.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelHamiltonians {
    pub space: CompositeSpace,
    pub system_space: CompositeSpace,
    pub bath_space: CompositeSpace,
    pub h_system: HermitianOperator,
    pub h_bath: HermitianOperator,
    /// Acts on the joint space.
    pub interaction: HermitianOperator,
    /// Number of declared energy bands in the bath, if the model has them.
    pub bands: Option<usize>,
}

impl ModelHamiltonians {
    pub fn total(&self) -> Result<HermitianOperator, QdynError> {
        Ok(self.h_system.embed(&self.space)? + self.h_bath.embed(&self.space)? + self.interaction.clone())
    }

    pub fn system_labels(&self) -> Vec<&str> {
        self.system_space.labels().collect()
    }

    pub fn bath_spectrum(&self) -> Result<BathSpectrum, ThermoError> {
        BathSpectrum::from_hamiltonian(&self.h_bath)
    }
}

fn check_finite(values: &[(&'static str, f64)]) -> Result<(), ModelError> {
    match values.iter().find(|(_, v)| !v.is_finite()) {
        Some((name, _)) => Err(ModelError::NonFinite(name)),
        None => Ok(()),
    }
}

pub fn build_spin_chain(m: &SpinChainModel) -> Result<ModelHamiltonians, ModelError> {
    check_finite(&[
        ("field_system", m.field_system),
        ("field_bath", m.field_bath),
        ("coupling_chain", m.coupling_chain),
        ("coupling_sb", m.coupling_sb),
    ])?;
    let n = m.n_bath_spins;
    if n == 0 {
        return Err(ModelError::InvalidCount("n_bath_spins must be at least 1".into()));
    }
    let dim = u32::try_from(n + 1).ok().and_then(|k| 2usize.checked_pow(k)).unwrap_or(usize::MAX);
    if dim > m.max_dim {
        return Err(ModelError::DimensionCap { dim, cap: m.max_dim });
    }

    let bath_labels: Vec<String> = (1..=n).map(|j| format!("B{j}")).collect();
    let system_space = CompositeSpace::qubits(["S"])?;
    let bath_space = CompositeSpace::qubits(bath_labels.iter().cloned())?;
    let space = system_space.join(&bath_space)?;

    let h_system = pauli(Pauli::Z, "S", &system_space)? * m.field_system;

    let mut h_bath = HermitianOperator::zeros(bath_space.clone());
    for l in &bath_labels {
        h_bath = h_bath + pauli(Pauli::Z, l, &bath_space)? * m.field_bath;
    }
    for pair in bath_labels.windows(2) {
        h_bath = h_bath + xy_bond(&pair[0], &pair[1], &bath_space)? * m.coupling_chain;
    }

    let interaction = xy_bond("S", &bath_labels[0], &space)? * m.coupling_sb;
    Ok(ModelHamiltonians { space, system_space, bath_space, h_system, h_bath, interaction, bands: None })
}

/// `σ_x σ_x + σ_y σ_y` on two sites.
fn xy_bond(a: &str, b: &str, space: &CompositeSpace) -> Result<HermitianOperator, QdynError> {
    let xx = pauli(Pauli::X, a, space)?.matrix() * pauli(Pauli::X, b, space)?.matrix();
    let yy = pauli(Pauli::Y, a, space)?.matrix() * pauli(Pauli::Y, b, space)?.matrix();
    HermitianOperator::new(space.clone(), xx + yy)
}

/// Band energies and coupling matrix are drawn in a fixed order from one generator:
/// `v0` lower-band energies, `v1` upper-band energies, then the `v0 × v1` inter-band
/// block row-major, one normal pair per entry for the real and imaginary parts.
pub fn build_random_matrix(m: &RandomMatrixModel) -> Result<ModelHamiltonians, ModelError> {
    check_finite(&[
        ("eps0", m.eps0),
        ("eps1", m.eps1),
        ("width", m.width),
        ("coupling", m.coupling),
        ("coupling_variance", m.coupling_variance),
    ])?;
    if m.v0 == 0 || m.v1 == 0 {
        return Err(ModelError::InvalidCount(format!("band level counts must be at least 1, got v0={}, v1={}", m.v0, m.v1)));
    }
    if m.width < 0.0 {
        return Err(ModelError::InvalidCount(format!("band width must be non-negative, got {}", m.width)));
    }
    if m.coupling_variance < 0.0 {
        return Err(ModelError::InvalidCount(format!("coupling variance must be non-negative, got {}", m.coupling_variance)));
    }
    let gap = m.eps1 - m.eps0;
    if gap < m.width {
        return Err(ModelError::BandOverlap { gap, width: m.width });
    }

    let mut rng = SeededRng::new(m.seed);
    let mut band = |center: f64, count: usize| {
        let mut e: Vec<f64> =
            (0..count).map(|_| rng.uniform_in(center - 0.5 * m.width, center + 0.5 * m.width)).collect();
        e.sort_by(f64::total_cmp);
        e
    };
    let mut energies = band(m.eps0, m.v0);
    energies.extend(band(m.eps1, m.v1));

    let d = m.v0 + m.v1;
    let scale = (0.5 * m.coupling_variance).sqrt();
    let mut b_hat = CMatrix::zeros(d, d);
    for j in 0..m.v0 {
        for k in m.v0..d {
            let (re, im) = rng.normal_pair();
            let c = C64::new(scale * re, scale * im);
            b_hat[(j, k)] = c;
            b_hat[(k, j)] = c.conj();
        }
    }

    let system_space = CompositeSpace::new([("S", 2)])?;
    let bath_space = CompositeSpace::new([("B", d)])?;
    let space = system_space.join(&bath_space)?;
    let h_system = HermitianOperator::diagonal(system_space.clone(), &[m.eps0, m.eps1])?;
    let h_bath = HermitianOperator::diagonal(bath_space.clone(), &energies)?;
    let sx = HermitianOperator::new(system_space.clone(), Pauli::X.matrix())?;
    let interaction = sx.tensor(&HermitianOperator::new(bath_space.clone(), b_hat)?)? * m.coupling;
    Ok(ModelHamiltonians { space, system_space, bath_space, h_system, h_bath, interaction, bands: Some(2) })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SystemState {
    MaximallyMixed,
    /// Highest-energy eigenstate of `H_S`.
    Excited,
    /// Lowest-energy eigenstate of `H_S`.
    Ground,
    Custom(CMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct InitialCondition {
    pub system_state: SystemState,
    pub bath_beta0: f64,
}

/// `ρ_S(0) ⊗ π_B(β₀)`.
pub fn prepare_initial(
    ic: &InitialCondition,
    h_system: &HermitianOperator,
    spec: &BathSpectrum,
) -> Result<DensityMatrix, ModelError> {
    let rho_s = system_state(&ic.system_state, h_system)?;
    let rho_b = spec.gibbs_state(ic.bath_beta0)?;
    Ok(rho_s.tensor(&rho_b)?)
}

fn system_state(s: &SystemState, h_system: &HermitianOperator) -> Result<DensityMatrix, ModelError> {
    let space = h_system.space().clone();
    let eigen_projector = |col: usize| -> Result<DensityMatrix, ModelError> {
        let eig = h_system.eigen()?;
        let v: Vec<C64> = eig.eigenvectors.column(col).iter().copied().collect();
        Ok(DensityMatrix::pure(space.clone(), &v)?)
    };
    match s {
        SystemState::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(space)),
        SystemState::Ground => eigen_projector(0),
        SystemState::Excited => eigen_projector(space.total_dim() - 1),
        SystemState::Custom(m) => {
            DensityMatrix::new(space, m.clone()).map_err(|e| ModelError::InvalidState(e.to_string()))
        }
    }
}
