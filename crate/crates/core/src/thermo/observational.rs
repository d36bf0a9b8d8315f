use crate::qdyn::DensityMatrix;

use super::{BathSpectrum, ThermoError, ThermoTrajectory};

/// Probabilities below this contribute nothing to the observational entropy.
const PROBABILITY_FLOOR: f64 = 1e-15;
/// Tolerated mismatch between the final bath state's energy and the trajectory endpoint.
const FINAL_ENERGY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyBin {
    pub lower: f64,
    pub upper: f64,
    /// Indices into [`BathSpectrum::energies`].
    pub members: Vec<usize>,
    pub representative_energy: f64,
}

impl EnergyBin {
    pub fn volume(&self) -> usize {
        self.members.len()
    }
}

/// A partition of the bath eigenstates into nonempty energy windows.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCoarseGraining {
    bins: Vec<EnergyBin>,
    dim: usize,
}

/// Default bin count: twice the number of declared energy bands, else `⌈√dim⌉`.
pub fn default_bin_count(dim: usize, bands: Option<usize>) -> usize {
    match bands {
        Some(b) if b > 0 => 2 * b,
        _ => (dim as f64).sqrt().ceil() as usize,
    }
}

impl EnergyCoarseGraining {
    /// `n_bins` contiguous equal-width windows over `[e_min, e_max]`; windows that contain
    /// no eigenvalue are dropped.
    pub fn equal_width(spec: &BathSpectrum, n_bins: usize) -> Result<Self, ThermoError> {
        if n_bins == 0 {
            return Err(ThermoError::NoBins);
        }
        let (lo, hi) = (spec.e_min(), spec.e_max());
        let width = (hi - lo) / n_bins as f64;
        let mut members = vec![Vec::new(); n_bins];
        for (i, &e) in spec.energies().iter().enumerate() {
            let k = (((e - lo) / width).floor() as usize).min(n_bins - 1);
            members[k].push(i);
        }
        let bins = members
            .into_iter()
            .enumerate()
            .filter(|(_, m)| !m.is_empty())
            .map(|(k, m)| {
                let lower = lo + k as f64 * width;
                let upper = if k + 1 == n_bins { hi } else { lo + (k + 1) as f64 * width };
                Self::bin(spec, lower, upper, m)
            })
            .collect();
        Ok(Self { bins, dim: spec.dim() })
    }

    /// One eigenstate per bin.
    pub fn finest(spec: &BathSpectrum) -> Self {
        let bins = spec
            .energies()
            .iter()
            .enumerate()
            .map(|(i, &e)| Self::bin(spec, e, e, vec![i]))
            .collect();
        Self { bins, dim: spec.dim() }
    }

    /// Everything in one bin.
    pub fn single(spec: &BathSpectrum) -> Self {
        let bin = Self::bin(spec, spec.e_min(), spec.e_max(), (0..spec.dim()).collect());
        Self { bins: vec![bin], dim: spec.dim() }
    }

    fn bin(spec: &BathSpectrum, lower: f64, upper: f64, members: Vec<usize>) -> EnergyBin {
        let representative_energy =
            members.iter().map(|&i| spec.energies()[i]).sum::<f64>() / members.len() as f64;
        EnergyBin { lower, upper, members, representative_energy }
    }

    pub fn bins(&self) -> &[EnergyBin] {
        &self.bins
    }

    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn volumes(&self) -> Vec<usize> {
        self.bins.iter().map(EnergyBin::volume).collect()
    }

    /// Lower edge of every bin followed by the upper edge of the last one.
    pub fn bin_edges(&self) -> Vec<f64> {
        let mut edges: Vec<f64> = self.bins.iter().map(|b| b.lower).collect();
        if let Some(last) = self.bins.last() {
            edges.push(last.upper);
        }
        edges
    }

    /// Coarse-grained energy distribution `p(e_B)` of a bath state.
    pub fn probabilities(&self, rho_b: &DensityMatrix, spec: &BathSpectrum) -> Result<Vec<f64>, ThermoError> {
        if self.dim != spec.dim() {
            return Err(ThermoError::CoarseGrainingMismatch);
        }
        if rho_b.space() != spec.space() {
            return Err(crate::qdyn::QdynError::SpaceMismatch("bath state and spectrum".into()).into());
        }
        // ⟨E_i|ρ|E_i⟩
        let rotated = rho_b.matrix() * spec.basis();
        let d = spec.dim();
        let diag: Vec<f64> = (0..d)
            .map(|i| {
                (0..d).map(|a| (spec.basis()[(a, i)].conj() * rotated[(a, i)]).re).sum::<f64>()
            })
            .collect();
        Ok(self.bins.iter().map(|b| b.members.iter().map(|&i| diag[i]).sum()).collect())
    }
}

/// `S_obs = Σ p(e_B) [-ln p(e_B) + ln V(e_B)]` for a projective measurement of binned `H_B`.
pub fn observational_entropy(
    rho_b: &DensityMatrix,
    cg: &EnergyCoarseGraining,
    spec: &BathSpectrum,
) -> Result<f64, ThermoError> {
    let p = cg.probabilities(rho_b, spec)?;
    Ok(p.iter()
        .zip(cg.bins())
        .filter(|(&p, _)| p >= PROBABILITY_FLOOR)
        .map(|(&p, b)| p * (-p.ln() + (b.volume() as f64).ln()))
        .sum())
}

/// `ΔS_S(τ) + S_obs(τ) - S_B[β(τ)] - ∫ đQ/T`, the integral again taken as an entropy
/// difference of canonical states.
pub fn sigma_tilde(
    traj: &ThermoTrajectory,
    rho_b_final: &DensityMatrix,
    cg: &EnergyCoarseGraining,
    spec: &BathSpectrum,
) -> Result<f64, ThermoError> {
    if traj.len() < 2 {
        return Err(ThermoError::TooShort { needed: 2, found: traj.len() });
    }
    let n = traj.len() - 1;
    let e_state = spec.mean_energy(rho_b_final)?;
    let e_traj = traj.bath_energy()[n];
    if (e_state - e_traj).abs() > FINAL_ENERGY_TOL * e_traj.abs().max(1.0) {
        return Err(ThermoError::InconsistentFinalState { state: e_state, trajectory: e_traj });
    }
    let s_obs = observational_entropy(rho_b_final, cg, spec)?;
    let s_b = traj.bath_entropy();
    let minus_integral = s_b[n] - s_b[0];
    Ok(traj.delta_system_entropy(n) + s_obs - s_b[n] + minus_integral)
}
