//! Scenario execution: a resolved config in, a set of named tables out.

use finbath::bounds::{
    bound_clausius_1865, bound_landauer_1961, bound_reebwolf_2014, bound_timpanaro_2020, goold_series, BoundError,
    BoundKind, BoundSeries,
};
use finbath::engine::{cycle_quantities, discontinuity_errors, extraction_condition, run_engine, EngineError, SwapEngineParams};
use finbath::models::{
    build_random_matrix, build_spin_chain, prepare_initial, InitialCondition, ModelError, ModelHamiltonians,
    RandomMatrixModel, SpinChainModel, SystemState,
};
use finbath::qdyn::{Propagator, QdynError};
use finbath::thermo::{
    entropy_ledger_at, observational_entropy, quadrature_cross_check, sample_trajectory, sigma_tilde, temperature_of,
    EnergyCoarseGraining, ThermoError,
};
use thiserror::Error;

use crate::config::{ExperimentConfig, Scenario, SystemStateName};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Thermo(#[from] ThermoError),
    #[error(transparent)]
    Qdyn(#[from] QdynError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("config is not resolved: {0}")]
    Unresolved(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Label(&'static str),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new(name: &str, columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self { name: name.to_owned(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub scenario: Scenario,
    pub tables: Vec<Table>,
    pub notes: Vec<String>,
}

impl RunOutput {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

/// Run a resolved config (see [`ExperimentConfig::resolve`]).
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    match cfg.scenario {
        Scenario::LandauerSpinChain | Scenario::LandauerRandomMatrix => run_landauer(cfg),
        Scenario::SwapEngine => run_swap_engine(cfg),
        Scenario::EngineErrorScaling => run_error_scaling(cfg),
    }
}

fn build_model(cfg: &ExperimentConfig) -> Result<ModelHamiltonians, RunError> {
    Ok(match cfg.scenario {
        Scenario::LandauerSpinChain => {
            let c = cfg.spin_chain.as_ref().ok_or(RunError::Unresolved("spin_chain"))?;
            let mut m = SpinChainModel::new(c.n_bath_spins, c.field_system, c.field_bath, c.coupling_chain, c.coupling_sb);
            m.max_dim = c.max_dim;
            build_spin_chain(&m)?
        }
        _ => {
            let c = cfg.random_matrix.as_ref().ok_or(RunError::Unresolved("random_matrix"))?;
            build_random_matrix(&RandomMatrixModel {
                eps0: c.eps0,
                eps1: c.eps1,
                width: c.width,
                v0: c.v0,
                v1: c.v1,
                coupling: c.coupling,
                coupling_variance: c.coupling_variance,
                seed: cfg.seed.unwrap_or(0),
            })?
        }
    })
}

fn run_landauer(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let ic_cfg = cfg.initial_condition.as_ref().ok_or(RunError::Unresolved("initial_condition"))?;
    let grid = cfg.time_grid.as_ref().ok_or(RunError::Unresolved("time_grid"))?;
    let h = build_model(cfg)?;
    let spec = h.bath_spectrum()?;
    let beta0 = ic_cfg.beta0();
    let system_state = match ic_cfg.system_state {
        SystemStateName::MaximallyMixed => SystemState::MaximallyMixed,
        SystemStateName::Excited => SystemState::Excited,
        SystemStateName::Ground => SystemState::Ground,
        SystemStateName::Custom => SystemState::Custom(ic_cfg.custom_state().ok_or(RunError::Unresolved("custom_matrix"))?),
    };
    let rho0 = prepare_initial(&InitialCondition { system_state, bath_beta0: beta0 }, &h.h_system, &spec)?;
    let prop = Propagator::new(&h.total()?)?;
    let times = grid.times();
    let system_labels = h.system_labels();
    let traj = sample_trajectory(&prop, &rho0, &times, &spec, &system_labels)?.with_initial_beta(beta0, &spec)?;

    let bath_labels: Vec<&str> = h.bath_space.labels().collect();
    let rho_s0 = rho0.partial_trace(&system_labels)?;
    let rho_b0 = rho0.partial_trace(&bath_labels)?;
    let mut bounds: Vec<BoundSeries> = Vec::new();
    for kind in cfg.bound_kinds() {
        bounds.push(match kind {
            BoundKind::Landauer1961 => bound_landauer_1961(&traj),
            BoundKind::Clausius1865 => bound_clausius_1865(&traj),
            BoundKind::ReebWolf2014 => bound_reebwolf_2014(&traj, spec.dim())?,
            BoundKind::Goold2015 => goold_series(&prop, &rho_s0, &rho_b0, &times, beta0)?,
            BoundKind::Timpanaro2020 => bound_timpanaro_2020(&traj, &spec),
        });
    }

    let mut columns: Vec<String> =
        ["t", "E_B", "beta", "T", "Q", "S_S", "Sigma", "Sigma_prime", "divergence", "W_ext_max"]
            .map(String::from)
            .to_vec();
    columns.extend(bounds.iter().map(|b| b.kind.name().to_owned()));
    let mut trajectory = Table::new("trajectory", columns);
    for i in 0..traj.len() {
        let l = entropy_ledger_at(&traj, &spec, i);
        let mut row: Vec<Cell> = vec![
            traj.times()[i].into(),
            traj.bath_energy()[i].into(),
            traj.beta()[i].into(),
            temperature_of(traj.beta()[i]).into(),
            traj.heat()[i].into(),
            traj.system_entropy()[i].into(),
            l.sigma.into(),
            l.sigma_prime.into(),
            l.divergence.into(),
            l.w_ext_max.into(),
        ];
        row.extend(bounds.iter().map(|b| Cell::from(b.values[i])));
        trajectory.push(row);
    }

    let mut long = Table::new("bounds_long", ["series", "t", "value"]);
    for b in &bounds {
        for (t, v) in b.times.iter().zip(&b.values) {
            long.push(vec![Cell::Label(b.kind.name()), (*t).into(), (*v).into()]);
        }
    }

    let n = traj.len() - 1;
    let tau = times[n];
    let rho_b_final = prop.prepare(&rho0)?.state_at(tau).partial_trace(&bath_labels)?;
    let bins = cfg.coarse_graining.as_ref().and_then(|c| c.bins).ok_or(RunError::Unresolved("coarse_graining.bins"))?;
    let cg = EnergyCoarseGraining::equal_width(&spec, bins)?;
    let s_obs = observational_entropy(&rho_b_final, &cg, &spec)?;
    let s_tilde = sigma_tilde(&traj, &rho_b_final, &cg, &spec)?;
    let quad = if traj.len() >= 3 { Some(quadrature_cross_check(&traj, &spec)?) } else { None };
    let fin = entropy_ledger_at(&traj, &spec, n);
    let mut summary = Table::new(
        "summary",
        ["t_final", "Sigma", "Sigma_prime", "divergence", "W_ext_max", "S_obs", "Sigma_tilde", "bins", "quadrature_discrepancy"],
    );
    summary.push(vec![
        tau.into(),
        fin.sigma.into(),
        fin.sigma_prime.into(),
        fin.divergence.into(),
        fin.w_ext_max.into(),
        s_obs.into(),
        s_tilde.into(),
        cg.len().into(),
        quad.into(),
    ]);

    let mut notes = vec![
        "Q is the heat that has flowed from the bath into the system; -Q is the bath energy change".to_owned(),
        "beta(t) is the inverse temperature of the canonical bath state with the same mean energy".to_owned(),
        "timpanaro2020 inverts the canonical entropy on beta >= 0; points outside the image of that branch are left empty".to_owned(),
        "all bounds are left empty when the initial bath temperature is not positive".to_owned(),
        format!("Sigma_tilde uses {} equal-width bath energy bins (empty bins dropped)", cg.len()),
    ];
    if cfg.scenario == Scenario::LandauerRandomMatrix {
        notes.push("random-matrix coupling entries are complex Gaussian with E|c|^2 = coupling_variance".to_owned());
    }
    Ok(RunOutput { scenario: cfg.scenario, tables: vec![trajectory, summary, long], notes })
}

fn engine_params(cfg: &ExperimentConfig) -> Result<SwapEngineParams, RunError> {
    let e = cfg.engine.as_ref().ok_or(RunError::Unresolved("engine"))?;
    Ok(SwapEngineParams {
        gap_system: e.gap_system,
        gap_hot: e.gap_hot,
        t_cold: e.t_cold,
        t_hot0: e.t_hot0,
        n_qubits: e.n_qubits,
    })
}

fn run_swap_engine(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let p = engine_params(cfg)?;
    let n_cycles = cfg.cycles.unwrap_or(p.n_qubits);
    let traj = run_engine(&p, n_cycles)?;
    let mut table = Table::new(
        "cycles",
        ["n", "W_tot", "Q_H_tot", "Q_C_tot", "T_H", "Sigma", "Sigma_prime", "A", "B", "B_prime", "eta", "eta_prime"],
    );
    for i in 0..traj.len() {
        let (w, qh, qc) = traj.totals(i + 1);
        table.push(vec![
            (i + 1).into(),
            w.into(),
            qh.into(),
            qc.into(),
            traj.cycles[i].t_hot_after.into(),
            traj.sigma[i].into(),
            traj.sigma_prime[i].into(),
            traj.a[i].into(),
            traj.b[i].into(),
            traj.b_prime[i].into(),
            traj.eta[i].into(),
            traj.eta_prime[i].into(),
        ]);
    }
    let q = cycle_quantities(&p);
    let mut notes = vec![
        format!("per-cycle work {} (negative means work is extracted)", q.work),
        "T_H is the hot-bath temperature after cycle n; cycle n swaps the system with the n-th fresh hot qubit".to_owned(),
        "eta uses the finite-bath split B = sum_k (Q_H/T_C) eta_C(T_C, T_H(k)); eta_prime uses the initial hot temperature".to_owned(),
    ];
    if !extraction_condition(&p) {
        notes.push("extraction condition fails: the cycle consumes work for these parameters".to_owned());
    }
    Ok(RunOutput { scenario: cfg.scenario, tables: vec![table], notes })
}

fn run_error_scaling(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    let p = engine_params(cfg)?;
    let sizes = cfg.bath_sizes.as_ref().ok_or(RunError::Unresolved("bath_sizes"))?;
    let points = discontinuity_errors(&p, sizes)?;
    let mut table = Table::new("error_scaling", ["N", "e_abs", "e_rel"]);
    for pt in &points {
        table.push(vec![pt.n.into(), pt.e_abs.into(), pt.e_rel.into()]);
    }
    let notes = vec![
        "each N is a full run of N cycles on a bath of N hot qubits; engine.n_qubits is not used".to_owned(),
        "e_abs = Sigma' - Sigma - N D(hot qubit after N cycles || initial hot qubit); e_rel = e_abs / (Sigma' - Sigma)".to_owned(),
    ];
    Ok(RunOutput { scenario: cfg.scenario, tables: vec![table], notes })
}
