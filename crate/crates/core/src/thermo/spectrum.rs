use crate::qdyn::{CMatrix, CompositeSpace, DensityMatrix, HermitianOperator, C64};

use super::root::bracketed_root;
use super::ThermoError;

/// Largest `|β| * span` used for the initial solver bracket; `exp(-700)` is still a normal f64.
const BETA_CAP_SPAN: f64 = 700.0;
/// Bracket doublings allowed beyond the cap before declaring `|β|` infinite.
const MAX_EXPANSIONS: usize = 60;
/// Tolerance on `ln` of the distance to the spectral edge in [`BathSpectrum::solve_beta`].
const SOLVE_TOL: f64 = 1e-15;
/// Relative residual guaranteed by [`EffectiveBeta`].
pub const BETA_RESIDUAL_TOL: f64 = 1e-12;

/// Eigen-decomposed bath Hamiltonian together with its canonical family `π_B(β)`.
#[derive(Debug, Clone)]
pub struct BathSpectrum {
    space: CompositeSpace,
    energies: Vec<f64>,
    basis: CMatrix,
    hamiltonian: CMatrix,
    e_min: f64,
    e_max: f64,
    mean_at_beta0: f64,
}

/// Solution of `tr{H_B π_B(β)} = E` for one target energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveBeta {
    pub beta: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
}

impl EffectiveBeta {
    /// `1/β`, signed infinity at `β = 0`.
    pub fn temperature(&self) -> f64 {
        temperature_of(self.beta)
    }
}

/// `1/β`, reported as `+inf` (resp. `-inf`) at `β = +0` (resp. `-0`).
pub fn temperature_of(beta: f64) -> f64 {
    1.0 / beta
}

struct Ensemble {
    pop: Vec<f64>,
    log_pop: Vec<f64>,
    /// `ln Σ exp(-β(e_i - shift))`
    log_z_shifted: f64,
    shift: f64,
}

impl BathSpectrum {
    pub fn from_hamiltonian(h: &HermitianOperator) -> Result<Self, ThermoError> {
        let eig = h.eigen()?;
        Self::assemble(h.space().clone(), eig.eigenvalues, eig.eigenvectors, h.matrix().clone())
    }

    /// A bath whose Hamiltonian is diagonal in the computational basis.
    pub fn from_diagonal(space: CompositeSpace, energies: &[f64]) -> Result<Self, ThermoError> {
        let h = HermitianOperator::diagonal(space, energies)?;
        let d = energies.len();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
        let mut basis = CMatrix::zeros(d, d);
        for (col, &k) in order.iter().enumerate() {
            basis[(k, col)] = C64::new(1.0, 0.0);
        }
        let sorted = order.iter().map(|&k| energies[k]).collect();
        Self::assemble(h.space().clone(), sorted, basis, h.into_matrix())
    }

    fn assemble(space: CompositeSpace, energies: Vec<f64>, basis: CMatrix, hamiltonian: CMatrix) -> Result<Self, ThermoError> {
        let e_min = energies[0];
        let e_max = *energies.last().unwrap();
        let scale = e_min.abs().max(e_max.abs()).max(1.0);
        if e_max - e_min <= 1e-12 * scale {
            return Err(ThermoError::DegenerateSpectrum);
        }
        let mean_at_beta0 = energies.iter().sum::<f64>() / energies.len() as f64;
        Ok(Self { space, energies, basis, hamiltonian, e_min, e_max, mean_at_beta0 })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Eigenvectors of `H_B` as columns, matching [`Self::energies`].
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.hamiltonian
    }

    pub fn e_min(&self) -> f64 {
        self.e_min
    }

    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn mean_at_beta0(&self) -> f64 {
        self.mean_at_beta0
    }

    pub fn span(&self) -> f64 {
        self.e_max - self.e_min
    }

    fn ensemble(&self, beta: f64) -> Ensemble {
        let shift = if beta >= 0.0 { self.e_min } else { self.e_max };
        let exponents: Vec<f64> = self.energies.iter().map(|&e| -beta * (e - shift)).collect();
        let log_z_shifted = exponents.iter().map(|x| x.exp()).sum::<f64>().ln();
        let log_pop: Vec<f64> = exponents.iter().map(|x| x - log_z_shifted).collect();
        let pop = log_pop.iter().map(|l| l.exp()).collect();
        Ensemble { pop, log_pop, log_z_shifted, shift }
    }

    /// Populations of `π_B(β)` in the energy eigenbasis.
    pub fn canonical_populations(&self, beta: f64) -> Vec<f64> {
        self.ensemble(beta).pop
    }

    pub fn canonical_energy(&self, beta: f64) -> f64 {
        let ens = self.ensemble(beta);
        ens.pop.iter().zip(&self.energies).map(|(p, e)| p * e).sum()
    }

    /// `S_B(β) = βE + ln Z`, evaluated with the energies shifted by the dominant extreme.
    pub fn canonical_entropy(&self, beta: f64) -> f64 {
        let ens = self.ensemble(beta);
        let shifted_mean: f64 = ens.pop.iter().zip(&self.energies).map(|(p, e)| p * (e - ens.shift)).sum();
        (beta * shifted_mean + ens.log_z_shifted).max(0.0)
    }

    pub fn canonical_variance(&self, beta: f64) -> f64 {
        let ens = self.ensemble(beta);
        let mean: f64 = ens.pop.iter().zip(&self.energies).map(|(p, e)| p * e).sum();
        ens.pop.iter().zip(&self.energies).map(|(p, e)| p * (e - mean).powi(2)).sum()
    }

    /// `|E(β) - edge|` without cancellation, for `edge` either spectral extreme.
    fn edge_distance(&self, beta: f64, edge: f64) -> f64 {
        let ens = self.ensemble(beta);
        ens.pop.iter().zip(&self.energies).map(|(p, e)| p * (e - edge).abs()).sum()
    }

    /// `D(π_B(β₁) ‖ π_B(β₀))` evaluated in the shared energy eigenbasis.
    pub fn canonical_divergence(&self, beta1: f64, beta0: f64) -> f64 {
        let a = self.ensemble(beta1);
        let b = self.ensemble(beta0);
        let d: f64 = a
            .pop
            .iter()
            .zip(a.log_pop.iter().zip(&b.log_pop))
            .map(|(p, (la, lb))| if *p > 0.0 { p * (la - lb) } else { 0.0 })
            .sum();
        d.max(0.0)
    }

    pub fn gibbs_state(&self, beta: f64) -> Result<DensityMatrix, ThermoError> {
        if !beta.is_finite() {
            return Err(ThermoError::NonFiniteBeta(beta));
        }
        let pop = self.canonical_populations(beta);
        let d = self.dim();
        let mut scaled = self.basis.clone();
        for (j, &p) in pop.iter().enumerate() {
            for i in 0..d {
                scaled[(i, j)] *= C64::new(p, 0.0);
            }
        }
        let m = scaled * self.basis.adjoint();
        Ok(DensityMatrix::from_trusted(self.space.clone(), m))
    }

    /// `tr{H_B ρ}` for a state on the bath space.
    pub fn mean_energy(&self, rho: &DensityMatrix) -> Result<f64, ThermoError> {
        if rho.space() != &self.space {
            return Err(crate::qdyn::QdynError::SpaceMismatch("bath state".into()).into());
        }
        Ok(crate::qdyn::trace_of_product(rho.matrix(), &self.hamiltonian).re)
    }

    /// Effective inverse temperature: the unique `β` with `canonical_energy(β) = target`.
    ///
    /// `E(β)` is strictly decreasing (`dE/dβ = -Var`), so a sign-changing bracket always
    /// exists for `e_min < target < e_max`. The bracket runs from `β = 0` to `±700/span`
    /// on the side selected by the sign of `target - mean_at_beta0`, doubled as needed.
    pub fn solve_beta(&self, target: f64) -> Result<EffectiveBeta, ThermoError> {
        let scale = target.abs().max(1.0);
        if !target.is_finite()
            || target < self.e_min - BETA_RESIDUAL_TOL * scale
            || target > self.e_max + BETA_RESIDUAL_TOL * scale
        {
            return Err(ThermoError::UnreachableEnergy { target, e_min: self.e_min, e_max: self.e_max });
        }
        if target <= self.e_min || target >= self.e_max {
            return Err(ThermoError::InfiniteBeta(target));
        }
        if target == self.mean_at_beta0 {
            return Ok(EffectiveBeta { beta: 0.0, residual: self.canonical_energy(0.0) - target, bracket: (0.0, 0.0) });
        }
        // Solve for the distance to the nearer spectral edge on a log scale. The shifted
        // ensemble keeps that distance to relative precision, so β stays resolved deep into
        // the cold (or inverted) regime where E(β) itself is flat.
        let cold = target < self.mean_at_beta0;
        let edge = if cold { self.e_min } else { self.e_max };
        let log_target = (target - edge).abs().ln();
        let f = |b: f64| self.edge_distance(b, edge).ln() - log_target;
        let cap = BETA_CAP_SPAN / self.span();
        let mut far = if cold { cap } else { -cap };
        let mut expansions = 0;
        while f(far) > 0.0 {
            far *= 2.0;
            expansions += 1;
            if expansions > MAX_EXPANSIONS {
                return Err(ThermoError::InfiniteBeta(target));
            }
        }
        let root = bracketed_root(f, 0.0, far, SOLVE_TOL);
        let residual = self.canonical_energy(root.x) - target;
        if residual.abs() > BETA_RESIDUAL_TOL * scale {
            return Err(ThermoError::SolverStalled(residual));
        }
        Ok(EffectiveBeta { beta: root.x, residual, bracket: root.bracket })
    }
}
