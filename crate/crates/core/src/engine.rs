//! Swap engine between an ideal cold bath and a finite hot bath of `N` qubits.
//!
//! Each cycle the system qubit (gap `Δ_S`, thermal at `T_C`) is swapped with a fresh hot
//! qubit (gap `Δ_H`) and then re-thermalized by the cold bath. Every quantity here is a
//! closed-form expression in the excited-state populations; no state is evolved.
//!
//! Sign convention: heats are positive when they flow out of a bath into the system, work
//! is positive when done on the system.

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("invalid engine parameter: {0}")]
    InvalidParams(String),
    #[error("cycle {k} is outside 0..={n}")]
    CycleOutOfRange { k: usize, n: usize },
    #[error("inconsistent entropy split: B + Sigma - Sigma' = {0} is not positive")]
    InconsistentSplit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwapEngineParams {
    pub gap_system: f64,
    pub gap_hot: f64,
    pub t_cold: f64,
    pub t_hot0: f64,
    pub n_qubits: usize,
}

impl Default for SwapEngineParams {
    fn default() -> Self {
        Self { gap_system: 1.0, gap_hot: 1.5, t_cold: 1.0 / 3.0, t_hot0: 1.0, n_qubits: 100 }
    }
}

impl SwapEngineParams {
    pub fn validate(&self) -> Result<(), EngineError> {
        for (name, v) in [
            ("gap_system", self.gap_system),
            ("gap_hot", self.gap_hot),
            ("t_cold", self.t_cold),
            ("t_hot0", self.t_hot0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(EngineError::InvalidParams(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.n_qubits == 0 {
            return Err(EngineError::InvalidParams("n_qubits must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_qubits(self, n_qubits: usize) -> Self {
        Self { n_qubits, ..self }
    }

    fn p_cold(&self) -> f64 {
        excited_population(self.gap_system, self.t_cold)
    }

    fn p_hot(&self) -> f64 {
        excited_population(self.gap_hot, self.t_hot0)
    }
}

/// Excited-state population of a thermal qubit, `1/(e^{Δ/T} + 1)`.
pub fn excited_population(gap: f64, temperature: f64) -> f64 {
    1.0 / ((gap / temperature).exp() + 1.0)
}

/// `1 - T_C/T_H`; exactly zero for equal temperatures.
pub fn carnot(t_cold: f64, t_hot: f64) -> f64 {
    if t_cold == t_hot {
        0.0
    } else {
        1.0 - t_cold / t_hot
    }
}

/// `D(π(p) ‖ π(q))` for two thermal states of one qubit given by excited populations.
pub fn qubit_divergence(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| if a > 0.0 { a * (a / b).ln() } else { 0.0 };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// Per-cycle energetics; identical for every cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleQuantities {
    pub work: f64,
    pub q_hot: f64,
    pub q_cold: f64,
    pub delta_e_system: f64,
}

pub fn cycle_quantities(p: &SwapEngineParams) -> CycleQuantities {
    let dp = p.p_hot() - p.p_cold();
    let delta_e_system = p.gap_system * dp;
    CycleQuantities {
        work: (p.gap_system - p.gap_hot) * dp,
        q_hot: p.gap_hot * dp,
        q_cold: -delta_e_system,
        delta_e_system,
    }
}

/// `T_H(0)/T_C > Δ_H/Δ_S > 1`.
pub fn extraction_condition(p: &SwapEngineParams) -> bool {
    let ratio = p.gap_hot / p.gap_system;
    p.t_hot0 / p.t_cold > ratio && ratio > 1.0
}

/// Hot-bath temperature after `k` swaps, from energy conservation of the bath:
/// the excited population is the mean of `k` swapped-in and `N - k` untouched qubits.
pub fn hot_temperature_after(p: &SwapEngineParams, k: usize) -> Result<f64, EngineError> {
    let n = p.n_qubits;
    if k > n {
        return Err(EngineError::CycleOutOfRange { k, n });
    }
    if k == 0 {
        return Ok(p.t_hot0);
    }
    let pop = (k as f64 * p.p_cold() + (n - k) as f64 * p.p_hot()) / n as f64;
    Ok(p.gap_hot / (1.0 / pop - 1.0).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRecord {
    pub index: usize,
    pub work: f64,
    pub q_hot: f64,
    pub q_cold: f64,
    pub t_hot_after: f64,
}

/// Cumulative quantities after each of the first `n` cycles; entry `i` is cycle `i + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct EngineTrajectory {
    pub params: SwapEngineParams,
    pub cycles: Vec<CycleRecord>,
    pub sigma: Vec<f64>,
    pub sigma_prime: Vec<f64>,
    /// `W_tot / T_C`.
    pub a: Vec<f64>,
    /// `Σ_k (Q_H/T_C) η_C(T_C, T_H(k))`.
    pub b: Vec<f64>,
    /// `η_C(T_C, T_H(0)) Q_H_tot / T_C`.
    pub b_prime: Vec<f64>,
    pub eta: Vec<f64>,
    pub eta_prime: Vec<f64>,
}

impl EngineTrajectory {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Totals `(W, Q_H, Q_C)` after `n` cycles.
    pub fn totals(&self, n: usize) -> (f64, f64, f64) {
        let c = &self.cycles[0];
        let n = n as f64;
        (n * c.work, n * c.q_hot, n * c.q_cold)
    }
}

pub fn run_engine(p: &SwapEngineParams, n_cycles: usize) -> Result<EngineTrajectory, EngineError> {
    p.validate()?;
    if n_cycles == 0 || n_cycles > p.n_qubits {
        return Err(EngineError::CycleOutOfRange { k: n_cycles, n: p.n_qubits });
    }
    let q = cycle_quantities(p);
    let tc = p.t_cold;
    let mut traj = EngineTrajectory {
        params: *p,
        cycles: Vec::with_capacity(n_cycles),
        sigma: Vec::with_capacity(n_cycles),
        sigma_prime: Vec::with_capacity(n_cycles),
        a: Vec::with_capacity(n_cycles),
        b: Vec::with_capacity(n_cycles),
        b_prime: Vec::with_capacity(n_cycles),
        eta: Vec::with_capacity(n_cycles),
        eta_prime: Vec::with_capacity(n_cycles),
    };
    let (mut hot_sum, mut b) = (0.0, 0.0);
    for k in 1..=n_cycles {
        let th = hot_temperature_after(p, k)?;
        traj.cycles.push(CycleRecord { index: k, work: q.work, q_hot: q.q_hot, q_cold: q.q_cold, t_hot_after: th });
        let n = k as f64;
        hot_sum += q.q_hot / th;
        b += q.q_hot / tc * carnot(tc, th);
        let a = n * q.work / tc;
        let b_prime = carnot(tc, p.t_hot0) * n * q.q_hot / tc;
        traj.sigma.push(-n * q.q_cold / tc - hot_sum);
        traj.sigma_prime.push(-n * q.q_cold / tc - n * q.q_hot / p.t_hot0);
        traj.a.push(a);
        traj.b.push(b);
        traj.b_prime.push(b_prime);
        traj.eta.push(-a / b);
        traj.eta_prime.push(-a / b_prime);
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorScalingPoint {
    pub n: usize,
    pub e_abs: f64,
    /// `None` when `Σ' = Σ`.
    pub e_rel: Option<f64>,
}

/// `e_abs(N) = Σ'(N) - Σ(N) - N D(π(T_H(N)) ‖ π(T_H(0)))` and `e_rel = e_abs / (Σ' - Σ)`,
/// each from a full run of `N` cycles on an `N`-qubit bath.
pub fn discontinuity_errors(p: &SwapEngineParams, sizes: &[usize]) -> Result<Vec<ErrorScalingPoint>, EngineError> {
    sizes
        .par_iter()
        .map(|&n| {
            if n < 2 {
                return Err(EngineError::InvalidParams(format!("bath size must be at least 2, got {n}")));
            }
            let q = p.with_qubits(n);
            let traj = run_engine(&q, n)?;
            let gap = traj.sigma_prime[n - 1] - traj.sigma[n - 1];
            let t_end = traj.cycles[n - 1].t_hot_after;
            let d = qubit_divergence(excited_population(q.gap_hot, t_end), q.p_hot());
            let e_abs = gap - n as f64 * d;
            Ok(ErrorScalingPoint { n, e_abs, e_rel: (gap != 0.0).then(|| e_abs / gap) })
        })
        .collect()
}

/// `(η', η) = (-A/B, -A/(B + Σ - Σ'))` for a split `Σ' = A + B` of the infinite-bath
/// entropy production.
pub fn efficiency_pair(a: f64, b: f64, sigma: f64, sigma_prime: f64) -> Result<(f64, f64), EngineError> {
    let denom = b + sigma - sigma_prime;
    if !(denom > 0.0) {
        return Err(EngineError::InconsistentSplit(denom));
    }
    Ok((-a / b, -a / denom))
}
