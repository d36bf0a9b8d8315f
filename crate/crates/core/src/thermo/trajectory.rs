use rayon::prelude::*;

use crate::qdyn::{embed_matrix, von_neumann_entropy, CMatrix, DensityMatrix, Propagator, QdynError, C64};

use super::{BathSpectrum, ThermoError};

const INITIAL_ENERGY_TOL: f64 = 1e-10;

/// Time series of the bath energy and everything derived from it.
///
/// `heat[i] = E_B[0] - E_B[i]` is the heat that has flowed into the system.
#[derive(Debug, Clone)]
pub struct ThermoTrajectory {
    times: Vec<f64>,
    bath_energy: Vec<f64>,
    beta: Vec<f64>,
    heat: Vec<f64>,
    system_entropy: Vec<f64>,
    bath_entropy: Vec<f64>,
}

impl ThermoTrajectory {
    /// Solve for `β(t)` at every sampled bath energy.
    pub fn from_series(
        times: Vec<f64>,
        bath_energy: Vec<f64>,
        system_entropy: Vec<f64>,
        spec: &BathSpectrum,
    ) -> Result<Self, ThermoError> {
        if times.len() != bath_energy.len() || times.len() != system_entropy.len() {
            return Err(ThermoError::LengthMismatch(format!(
                "{} times, {} energies, {} entropies",
                times.len(),
                bath_energy.len(),
                system_entropy.len()
            )));
        }
        if times.is_empty() {
            return Err(ThermoError::TooShort { needed: 1, found: 0 });
        }
        let beta = bath_energy
            .iter()
            .map(|&e| spec.solve_beta(e).map(|b| b.beta))
            .collect::<Result<Vec<_>, _>>()?;
        let e0 = bath_energy[0];
        let heat = bath_energy.iter().map(|&e| -(e - e0)).collect();
        let bath_entropy = beta.iter().map(|&b| spec.canonical_entropy(b)).collect();
        Ok(Self { times, bath_energy, beta, heat, system_entropy, bath_entropy })
    }

    /// Replace the solved `β(0)` by the known preparation value.
    ///
    /// `β` is only resolved to `residual / Var_β(H_B)`, which is poor for a cold bath; the
    /// prepared value is exact. Fails if `β0` does not reproduce the initial bath energy.
    pub fn with_initial_beta(mut self, beta0: f64, spec: &BathSpectrum) -> Result<Self, ThermoError> {
        if !beta0.is_finite() {
            return Err(ThermoError::NonFiniteBeta(beta0));
        }
        let e = spec.canonical_energy(beta0);
        let e0 = self.bath_energy[0];
        if (e - e0).abs() > INITIAL_ENERGY_TOL * e0.abs().max(1.0) {
            return Err(ThermoError::InconsistentInitialBeta { beta0, energy: e, trajectory: e0 });
        }
        self.beta[0] = beta0;
        self.bath_entropy[0] = spec.canonical_entropy(beta0);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn bath_energy(&self) -> &[f64] {
        &self.bath_energy
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn beta0(&self) -> f64 {
        self.beta[0]
    }

    pub fn heat(&self) -> &[f64] {
        &self.heat
    }

    pub fn system_entropy(&self) -> &[f64] {
        &self.system_entropy
    }

    /// `S_B[β(t)]`, the entropy of the canonical state matching the bath energy.
    pub fn bath_entropy(&self) -> &[f64] {
        &self.bath_entropy
    }

    /// `S_S(t) - S_S(0)`.
    pub fn delta_system_entropy(&self, i: usize) -> f64 {
        self.system_entropy[i] - self.system_entropy[0]
    }
}

fn bath_labels<'a>(joint: &'a crate::qdyn::CompositeSpace, spec: &BathSpectrum, keep_system: &[&str]) -> Result<Vec<&'a str>, ThermoError> {
    let bath: Vec<&str> = joint.labels().filter(|l| !keep_system.contains(l)).collect();
    let expected: Vec<&str> = spec.space().labels().collect();
    if bath != expected {
        return Err(QdynError::SpaceMismatch(format!("bath factors {bath:?} vs spectrum factors {expected:?}")).into());
    }
    Ok(bath)
}

/// Thermodynamic trajectory from a list of joint states.
pub fn build_trajectory(
    states: &[DensityMatrix],
    times: &[f64],
    spec: &BathSpectrum,
    keep_system: &[&str],
) -> Result<ThermoTrajectory, ThermoError> {
    if states.len() != times.len() {
        return Err(ThermoError::LengthMismatch(format!("{} states for {} times", states.len(), times.len())));
    }
    let Some(first) = states.first() else {
        return Err(ThermoError::TooShort { needed: 1, found: 0 });
    };
    let bath = bath_labels(first.space(), spec, keep_system)?;
    let mut energy = Vec::with_capacity(states.len());
    let mut entropy = Vec::with_capacity(states.len());
    for rho in states {
        let rho_s = rho.partial_trace(keep_system)?;
        let rho_b = rho.partial_trace(&bath)?;
        energy.push(spec.mean_energy(&rho_b)?);
        entropy.push(von_neumann_entropy(&rho_s));
    }
    ThermoTrajectory::from_series(times.to_vec(), energy, entropy, spec)
}

/// Same result as [`build_trajectory`] on `evolve(rho0, H, times)`, without forming the
/// joint state at each time.
///
/// The bath energy and the reduced system state are evaluated as expectation values in
/// the eigenbasis of the total Hamiltonian, `O(d^2)` per observable and time point.
pub fn sample_trajectory(
    prop: &Propagator,
    rho0: &DensityMatrix,
    times: &[f64],
    spec: &BathSpectrum,
    keep_system: &[&str],
) -> Result<ThermoTrajectory, ThermoError> {
    let joint = prop.space();
    bath_labels(joint, spec, keep_system)?;
    let state = prop.prepare(rho0)?;
    let h_bath = prop.observable(&embed_matrix(spec.hamiltonian(), spec.space(), joint)?);

    let kept = joint.positions_of(keep_system)?;
    let system_space = joint.restrict(&kept);
    let ds = system_space.total_dim();
    let mut units = Vec::with_capacity(ds * ds);
    for a in 0..ds {
        for b in 0..ds {
            // ⟨a|ρ_S|b⟩ = tr{ρ (|b⟩⟨a| ⊗ 1)}
            let mut unit = CMatrix::zeros(ds, ds);
            unit[(b, a)] = C64::new(1.0, 0.0);
            units.push(((a, b), prop.observable(&embed_matrix(&unit, &system_space, joint)?)));
        }
    }

    let samples: Vec<(f64, f64)> = times
        .par_iter()
        .map(|&t| {
            let e = state.expectation(&h_bath, t).re;
            let mut rho_s = CMatrix::zeros(ds, ds);
            for ((a, b), obs) in &units {
                rho_s[(*a, *b)] = state.expectation(obs, t);
            }
            let rho_s = DensityMatrix::from_trusted(system_space.clone(), rho_s);
            (e, von_neumann_entropy(&rho_s))
        })
        .collect();
    let (energy, entropy) = samples.into_iter().unzip();
    ThermoTrajectory::from_series(times.to_vec(), energy, entropy, spec)
}

/// Entropy productions at one time point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyLedger {
    /// `ΔS_S - ∫ đQ/T`, with the integral evaluated as `S_B[β(0)] - S_B[β(t)]`.
    pub sigma: f64,
    /// `ΔS_S - β(0) Q`.
    pub sigma_prime: f64,
    /// `D(π_B[β(t)] ‖ π_B[β(0)])`.
    pub divergence: f64,
    /// `F_B[β(t)] - F_B[β(0)]` with `F_B = E_B - T(0) S_B`; `None` for `β(0) = 0`.
    pub w_ext_max: Option<f64>,
    pub sigma_tilde: Option<f64>,
}

pub fn entropy_ledger_at(traj: &ThermoTrajectory, spec: &BathSpectrum, i: usize) -> EntropyLedger {
    let ds = traj.delta_system_entropy(i);
    let b0 = traj.beta0();
    let bt = traj.beta[i];
    let sigma = ds + traj.bath_entropy[i] - traj.bath_entropy[0];
    let sigma_prime = ds - b0 * traj.heat[i];
    let divergence = spec.canonical_divergence(bt, b0);
    let w_ext_max = (b0 != 0.0).then(|| {
        let de = spec.canonical_energy(bt) - spec.canonical_energy(b0);
        de - (traj.bath_entropy[i] - traj.bath_entropy[0]) / b0
    });
    EntropyLedger { sigma, sigma_prime, divergence, w_ext_max, sigma_tilde: None }
}

/// Ledger at the final time of the trajectory.
pub fn entropy_ledger(traj: &ThermoTrajectory, spec: &BathSpectrum) -> Result<EntropyLedger, ThermoError> {
    if traj.len() < 2 {
        return Err(ThermoError::TooShort { needed: 2, found: traj.len() });
    }
    Ok(entropy_ledger_at(traj, spec, traj.len() - 1))
}

/// `|∫β dE_B - (S_B[β(τ)] - S_B[β(0)])|` with the integral done by the trapezoidal rule
/// on the sampled points.
pub fn quadrature_cross_check(traj: &ThermoTrajectory, _spec: &BathSpectrum) -> Result<f64, ThermoError> {
    if traj.len() < 3 {
        return Err(ThermoError::TooShort { needed: 3, found: traj.len() });
    }
    let integral: f64 = traj
        .beta
        .windows(2)
        .zip(traj.bath_energy.windows(2))
        .map(|(b, e)| 0.5 * (b[0] + b[1]) * (e[1] - e[0]))
        .sum();
    let n = traj.len() - 1;
    Ok((integral - (traj.bath_entropy[n] - traj.bath_entropy[0])).abs())
}
