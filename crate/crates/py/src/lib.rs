//! Python bindings: bath spectra, the two exact-dynamics models, the swap engine and the
//! config-driven runner.

use finbath::bounds::{
    bound_clausius_1865, bound_landauer_1961, bound_reebwolf_2014, bound_timpanaro_2020, goold_series, BoundKind,
};
use finbath::engine::{self, SwapEngineParams};
use finbath::models::{
    build_random_matrix, build_spin_chain, prepare_initial, InitialCondition, ModelHamiltonians, RandomMatrixModel,
    SpinChainModel, SystemState,
};
use finbath::qdyn::{CompositeSpace, Propagator};
use finbath::thermo::{self, entropy_ledger_at, sample_trajectory, temperature_of};
use finbath_cli::{parse_config, run_scenario, Cell};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

fn runtime<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn value<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Spectrum of a bath Hamiltonian and its canonical ensemble.
#[pyclass(module = "finbath", frozen)]
struct BathSpectrum {
    inner: thermo::BathSpectrum,
}

#[pymethods]
impl BathSpectrum {
    #[new]
    fn new(energies: Vec<f64>) -> PyResult<Self> {
        let space = CompositeSpace::new([("B", energies.len())]).map_err(value)?;
        let inner = thermo::BathSpectrum::from_diagonal(space, &energies).map_err(value)?;
        Ok(Self { inner })
    }

    #[getter]
    fn energies(&self) -> Vec<f64> {
        self.inner.energies().to_vec()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn canonical_energy(&self, beta: f64) -> f64 {
        self.inner.canonical_energy(beta)
    }

    fn canonical_entropy(&self, beta: f64) -> f64 {
        self.inner.canonical_entropy(beta)
    }

    fn canonical_variance(&self, beta: f64) -> f64 {
        self.inner.canonical_variance(beta)
    }

    /// `D(π(beta1) ‖ π(beta0))`.
    fn canonical_divergence(&self, beta1: f64, beta0: f64) -> f64 {
        self.inner.canonical_divergence(beta1, beta0)
    }

    /// Inverse temperature whose canonical state has mean energy `energy`.
    fn solve_beta(&self, energy: f64) -> PyResult<f64> {
        self.inner.solve_beta(energy).map(|b| b.beta).map_err(runtime)
    }

    fn __repr__(&self) -> String {
        format!("BathSpectrum(dim={}, e_min={}, e_max={})", self.inner.dim(), self.inner.e_min(), self.inner.e_max())
    }
}

fn parse_state(name: &str) -> PyResult<SystemState> {
    match name {
        "maximally_mixed" => Ok(SystemState::MaximallyMixed),
        "excited" => Ok(SystemState::Excited),
        "ground" => Ok(SystemState::Ground),
        other => Err(PyValueError::new_err(format!(
            "unknown system state '{other}' (expected maximally_mixed, excited or ground)"
        ))),
    }
}

/// Columns of the entropy ledger and all bounds on `times`.
fn simulate<'py>(
    py: Python<'py>,
    h: &ModelHamiltonians,
    system_state: &str,
    beta0: f64,
    times: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let state = parse_state(system_state)?;
    let spec = h.bath_spectrum().map_err(runtime)?;
    let rho0 =
        prepare_initial(&InitialCondition { system_state: state, bath_beta0: beta0 }, &h.h_system, &spec).map_err(runtime)?;
    let prop = Propagator::new(&h.total().map_err(runtime)?).map_err(runtime)?;
    let labels = h.system_labels();
    let traj = py
        .detach(|| sample_trajectory(&prop, &rho0, &times, &spec, &labels))
        .map_err(runtime)?
        .with_initial_beta(beta0, &spec)
        .map_err(runtime)?;
    let ledgers: Vec<_> = (0..traj.len()).map(|i| entropy_ledger_at(&traj, &spec, i)).collect();

    let out = PyDict::new(py);
    out.set_item("t", traj.times())?;
    out.set_item("E_B", traj.bath_energy())?;
    out.set_item("beta", traj.beta())?;
    out.set_item("T", traj.beta().iter().map(|&b| temperature_of(b)).collect::<Vec<_>>())?;
    out.set_item("Q", traj.heat())?;
    out.set_item("S_S", traj.system_entropy())?;
    out.set_item("Sigma", ledgers.iter().map(|l| l.sigma).collect::<Vec<_>>())?;
    out.set_item("Sigma_prime", ledgers.iter().map(|l| l.sigma_prime).collect::<Vec<_>>())?;
    out.set_item("divergence", ledgers.iter().map(|l| l.divergence).collect::<Vec<_>>())?;
    out.set_item("W_ext_max", ledgers.iter().map(|l| l.w_ext_max).collect::<Vec<_>>())?;

    let bath_labels: Vec<&str> = h.bath_space.labels().collect();
    let rho_s0 = rho0.partial_trace(&labels).map_err(runtime)?;
    let rho_b0 = rho0.partial_trace(&bath_labels).map_err(runtime)?;
    for kind in BoundKind::ALL {
        let series = match kind {
            BoundKind::Landauer1961 => bound_landauer_1961(&traj),
            BoundKind::Clausius1865 => bound_clausius_1865(&traj),
            BoundKind::ReebWolf2014 => bound_reebwolf_2014(&traj, spec.dim()).map_err(runtime)?,
            BoundKind::Goold2015 => goold_series(&prop, &rho_s0, &rho_b0, &times, beta0).map_err(runtime)?,
            BoundKind::Timpanaro2020 => bound_timpanaro_2020(&traj, &spec),
        };
        out.set_item(kind.name(), series.values)?;
    }
    Ok(out)
}

/// System spin coupled to the first site of an XY chain bath.
#[pyclass(module = "finbath", frozen)]
struct SpinChain {
    hamiltonians: ModelHamiltonians,
}

#[pymethods]
impl SpinChain {
    #[new]
    #[pyo3(signature = (n_bath_spins, field_system = 1.0, field_bath = 1.0, coupling_chain = 1.0, coupling_sb = 1.0))]
    fn new(n_bath_spins: usize, field_system: f64, field_bath: f64, coupling_chain: f64, coupling_sb: f64) -> PyResult<Self> {
        let m = SpinChainModel::new(n_bath_spins, field_system, field_bath, coupling_chain, coupling_sb);
        Ok(Self { hamiltonians: build_spin_chain(&m).map_err(value)? })
    }

    fn bath_spectrum(&self) -> PyResult<BathSpectrum> {
        Ok(BathSpectrum { inner: self.hamiltonians.bath_spectrum().map_err(runtime)? })
    }

    /// Trajectory columns and bound series for `ρ_S(0) ⊗ π_B(beta0)`.
    fn simulate<'py>(&self, py: Python<'py>, system_state: &str, beta0: f64, times: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        simulate(py, &self.hamiltonians, system_state, beta0, times)
    }
}

/// Two-level system coupled to a two-band random-matrix bath.
#[pyclass(module = "finbath", frozen)]
struct RandomMatrix {
    hamiltonians: ModelHamiltonians,
}

#[pymethods]
impl RandomMatrix {
    #[new]
    #[pyo3(signature = (v1, seed = 0, v0 = 10, eps0 = 0.0, eps1 = 1.0, width = 1.0, coupling = 0.3, coupling_variance = 1.0))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        v1: usize,
        seed: u64,
        v0: usize,
        eps0: f64,
        eps1: f64,
        width: f64,
        coupling: f64,
        coupling_variance: f64,
    ) -> PyResult<Self> {
        let m = RandomMatrixModel { eps0, eps1, width, v0, v1, coupling, coupling_variance, seed };
        Ok(Self { hamiltonians: build_random_matrix(&m).map_err(value)? })
    }

    fn bath_spectrum(&self) -> PyResult<BathSpectrum> {
        Ok(BathSpectrum { inner: self.hamiltonians.bath_spectrum().map_err(runtime)? })
    }

    fn simulate<'py>(&self, py: Python<'py>, system_state: &str, beta0: f64, times: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
        simulate(py, &self.hamiltonians, system_state, beta0, times)
    }
}

/// Swap engine between a cold bath and a finite bath of hot qubits.
#[pyclass(module = "finbath", frozen)]
struct SwapEngine {
    params: SwapEngineParams,
}

#[pymethods]
impl SwapEngine {
    #[new]
    #[pyo3(signature = (gap_system = 1.0, gap_hot = 1.5, t_cold = 1.0 / 3.0, t_hot0 = 1.0, n_qubits = 100))]
    fn new(gap_system: f64, gap_hot: f64, t_cold: f64, t_hot0: f64, n_qubits: usize) -> PyResult<Self> {
        let params = SwapEngineParams { gap_system, gap_hot, t_cold, t_hot0, n_qubits };
        params.validate().map_err(value)?;
        Ok(Self { params })
    }

    /// Per-cycle `(W, Q_H, Q_C)`.
    fn cycle_quantities(&self) -> (f64, f64, f64) {
        let q = engine::cycle_quantities(&self.params);
        (q.work, q.q_hot, q.q_cold)
    }

    fn hot_temperature_after(&self, k: usize) -> PyResult<f64> {
        engine::hot_temperature_after(&self.params, k).map_err(value)
    }

    /// Cumulative quantities after each cycle; defaults to one cycle per hot qubit.
    #[pyo3(signature = (n_cycles = None))]
    fn run<'py>(&self, py: Python<'py>, n_cycles: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
        let traj = engine::run_engine(&self.params, n_cycles.unwrap_or(self.params.n_qubits)).map_err(value)?;
        let out = PyDict::new(py);
        out.set_item("n", (1..=traj.len()).collect::<Vec<_>>())?;
        out.set_item("T_H", traj.cycles.iter().map(|c| c.t_hot_after).collect::<Vec<_>>())?;
        out.set_item("Sigma", &traj.sigma)?;
        out.set_item("Sigma_prime", &traj.sigma_prime)?;
        out.set_item("A", &traj.a)?;
        out.set_item("B", &traj.b)?;
        out.set_item("B_prime", &traj.b_prime)?;
        out.set_item("eta", &traj.eta)?;
        out.set_item("eta_prime", &traj.eta_prime)?;
        Ok(out)
    }

    /// `(N, e_abs, e_rel)` for each bath size.
    fn error_scaling(&self, py: Python<'_>, sizes: Vec<usize>) -> PyResult<Vec<(usize, f64, Option<f64>)>> {
        let points = py.detach(|| engine::discontinuity_errors(&self.params, &sizes)).map_err(value)?;
        Ok(points.into_iter().map(|p| (p.n, p.e_abs, p.e_rel)).collect())
    }
}

#[pyfunction]
fn carnot(t_cold: f64, t_hot: f64) -> f64 {
    engine::carnot(t_cold, t_hot)
}

/// `(η', η)` from a split `Σ' = A + B`.
#[pyfunction]
fn efficiency_pair(a: f64, b: f64, sigma: f64, sigma_prime: f64) -> PyResult<(f64, f64)> {
    engine::efficiency_pair(a, b, sigma, sigma_prime).map_err(value)
}

/// Validate a JSON config and return it with all defaults filled in.
#[pyfunction]
fn validate_config(text: &str) -> PyResult<String> {
    let cfg = parse_config(text).and_then(|c| c.resolve()).map_err(value)?;
    Ok(cfg.to_json().to_string())
}

/// Run a JSON config and return `{table: {column: [values]}}`; undefined values are `None`.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyDict>> {
    let cfg = parse_config(text).and_then(|c| c.resolve()).map_err(value)?;
    let out = py.detach(|| run_scenario(&cfg)).map_err(runtime)?;
    let tables = PyDict::new(py);
    for t in &out.tables {
        let cols = PyDict::new(py);
        for (j, name) in t.columns.iter().enumerate() {
            let list = PyList::empty(py);
            for row in &t.rows {
                match row[j] {
                    Cell::Num(v) => list.append(v)?,
                    Cell::Int(n) => list.append(n)?,
                    Cell::Label(s) => list.append(s)?,
                    Cell::Missing => list.append(py.None())?,
                }
            }
            cols.set_item(name, list)?;
        }
        tables.set_item(&t.name, cols)?;
    }
    Ok(tables)
}

#[pymodule(name = "finbath")]
fn finbath_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<BathSpectrum>()?;
    m.add_class::<SpinChain>()?;
    m.add_class::<RandomMatrix>()?;
    m.add_class::<SwapEngine>()?;
    m.add_function(wrap_pyfunction!(carnot, m)?)?;
    m.add_function(wrap_pyfunction!(efficiency_pair, m)?)?;
    m.add_function(wrap_pyfunction!(validate_config, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add("BOUNDS", BoundKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>())?;
    Ok(())
}
