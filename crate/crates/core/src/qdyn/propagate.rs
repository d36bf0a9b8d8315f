use super::operator::SpectralDecomposition;
use super::{CMatrix, CompositeSpace, DensityMatrix, HermitianOperator, QdynError, C64};

/// `U(t) = exp(-iHt)` for a static Hamiltonian, built from one eigendecomposition of `H`.
///
/// Matrices can be moved into the eigenbasis of `H` once; there a state evolves by a
/// pure phase on each matrix element, `ρ̃_ij(t) = ρ̃_ij e^{-i(λ_i - λ_j)t}`.
#[derive(Debug, Clone)]
pub struct Propagator {
    space: CompositeSpace,
    eig: SpectralDecomposition,
}

impl Propagator {
    pub fn new(h: &HermitianOperator) -> Result<Self, QdynError> {
        Ok(Self { space: h.space().clone(), eig: h.eigen()? })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.eig
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        self.eig.eigenvalues.iter().map(|&l| C64::from_polar(1.0, -l * t)).collect()
    }

    pub fn unitary(&self, t: f64) -> CMatrix {
        let n = self.eig.dim();
        if t == 0.0 {
            return CMatrix::identity(n, n);
        }
        let ph = self.phases(t);
        let mut scaled = self.eig.eigenvectors.clone();
        for (j, p) in ph.iter().enumerate() {
            for i in 0..n {
                scaled[(i, j)] *= p;
            }
        }
        scaled * self.eig.eigenvectors.adjoint()
    }

    /// `V^dag M V`.
    pub fn to_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        self.eig.eigenvectors.adjoint() * m * &self.eig.eigenvectors
    }

    /// `V M V^dag`.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        &self.eig.eigenvectors * m * self.eig.eigenvectors.adjoint()
    }

    pub fn prepare(&self, rho0: &DensityMatrix) -> Result<EvolvingState<'_>, QdynError> {
        if rho0.space() != &self.space {
            return Err(QdynError::SpaceMismatch("initial state and Hamiltonian".into()));
        }
        Ok(self.prepare_matrix(rho0.matrix()))
    }

    /// Evolve an arbitrary matrix `X -> U X U^dag` (not necessarily a state).
    pub fn prepare_matrix(&self, m: &CMatrix) -> EvolvingState<'_> {
        EvolvingState { prop: self, initial: m.clone(), tilde: self.to_eigenbasis(m) }
    }

    pub fn observable(&self, op: &CMatrix) -> Observable {
        Observable { tilde_t: self.to_eigenbasis(op).transpose() }
    }
}

/// An operator given in the eigenbasis of `H`, stored transposed for the trace loop.
#[derive(Debug, Clone)]
pub struct Observable {
    tilde_t: CMatrix,
}

#[derive(Debug, Clone)]
pub struct EvolvingState<'a> {
    prop: &'a Propagator,
    initial: CMatrix,
    tilde: CMatrix,
}

impl EvolvingState<'_> {
    /// `tr{U X U^dag O}` in `O(d^2)`.
    pub fn expectation(&self, obs: &Observable, t: f64) -> C64 {
        let ph = self.prop.phases(t);
        let n = ph.len();
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..n {
            let pj = ph[j].conj();
            let mut col = C64::new(0.0, 0.0);
            for i in 0..n {
                col += self.tilde[(i, j)] * obs.tilde_t[(i, j)] * ph[i];
            }
            acc += col * pj;
        }
        acc
    }

    pub fn matrix_at(&self, t: f64) -> CMatrix {
        if t == 0.0 {
            return self.initial.clone();
        }
        let ph = self.prop.phases(t);
        let n = ph.len();
        let mut rotated = self.tilde.clone();
        for j in 0..n {
            let pj = ph[j].conj();
            for i in 0..n {
                rotated[(i, j)] *= ph[i] * pj;
            }
        }
        self.prop.from_eigenbasis(&rotated)
    }

    /// The evolved state; valid only if the prepared matrix was a density matrix.
    pub fn state_at(&self, t: f64) -> DensityMatrix {
        DensityMatrix::from_trusted(self.prop.space.clone(), self.matrix_at(t))
    }
}

fn check_grid(times: &[f64]) -> Result<(), QdynError> {
    let ascending = times.windows(2).all(|w| w[0] <= w[1]);
    let start_ok = times.first().map_or(true, |&t| t >= 0.0);
    if ascending && start_ok && times.iter().all(|t| t.is_finite()) {
        Ok(())
    } else {
        Err(QdynError::InvalidTimeGrid)
    }
}

/// `ρ(t) = U(t) ρ(0) U^dag(t)` on every point of an ascending time grid.
pub fn evolve(rho0: &DensityMatrix, h: &HermitianOperator, times: &[f64]) -> Result<Vec<DensityMatrix>, QdynError> {
    if rho0.space() != h.space() {
        return Err(QdynError::DimensionMismatch {
            expected: h.space().total_dim(),
            found: rho0.space().total_dim(),
        });
    }
    check_grid(times)?;
    let prop = Propagator::new(h)?;
    let state = prop.prepare(rho0)?;
    Ok(times.iter().map(|&t| state.state_at(t)).collect())
}
