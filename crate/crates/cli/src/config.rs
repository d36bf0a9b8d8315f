//! Strict JSON experiment configuration.
//!
//! Parsing runs in three passes so that every problem is reported with its key path:
//! required fields are checked on the raw tree (all missing ones are listed at once),
//! the tree is then deserialized with unknown keys rejected, and finally values are
//! range-checked. [`ExperimentConfig::resolve`] fills in defaults; the resolved config is
//! itself a valid config and is echoed into every output's metadata.

use std::fmt;

use finbath::bounds::BoundKind;
use finbath::qdyn::{CMatrix, CompositeSpace, DensityMatrix, C64};
use finbath::thermo::default_bin_count;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const DEFAULT_N_POINTS: usize = 400;
pub const DEFAULT_ENGINE_QUBITS: usize = 100;
pub const DEFAULT_V0: usize = 10;
pub const DEFAULT_COUPLING_VARIANCE: f64 = 1.0;
pub const DEFAULT_BATH_SIZES: [usize; 4] = [25, 50, 100, 200];
pub const DEFAULT_OUTPUT_DIR: &str = "output";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    LandauerSpinChain,
    LandauerRandomMatrix,
    SwapEngine,
    EngineErrorScaling,
}

impl Scenario {
    pub const ALL: [Scenario; 4] =
        [Self::LandauerSpinChain, Self::LandauerRandomMatrix, Self::SwapEngine, Self::EngineErrorScaling];

    pub fn name(self) -> &'static str {
        match self {
            Self::LandauerSpinChain => "landauer-spin-chain",
            Self::LandauerRandomMatrix => "landauer-random-matrix",
            Self::SwapEngine => "swap-engine",
            Self::EngineErrorScaling => "engine-error-scaling",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::LandauerSpinChain => "system spin coupled to an XY chain bath; entropy productions and heat bounds",
            Self::LandauerRandomMatrix => "two-level system coupled to a two-band random-matrix bath",
            Self::SwapEngine => "swap engine with a finite hot bath: per-cycle table and efficiencies",
            Self::EngineErrorScaling => "swap engine: cost of the instantaneous-swap idealization versus bath size",
        }
    }

    pub fn is_landauer(self) -> bool {
        matches!(self, Self::LandauerSpinChain | Self::LandauerRandomMatrix)
    }

    /// Top-level blocks that this scenario reads; any other optional block is rejected.
    fn allowed_blocks(self) -> &'static [&'static str] {
        const COMMON: [&str; 2] = ["seed", "output"];
        match self {
            Self::LandauerSpinChain => {
                &["spin_chain", "time_grid", "initial_condition", "coarse_graining", "bounds", COMMON[0], COMMON[1]]
            }
            Self::LandauerRandomMatrix => {
                &["random_matrix", "time_grid", "initial_condition", "coarse_graining", "bounds", COMMON[0], COMMON[1]]
            }
            Self::SwapEngine => &["engine", "cycles", COMMON[0], COMMON[1]],
            Self::EngineErrorScaling => &["engine", "bath_sizes", COMMON[0], COMMON[1]],
        }
    }

    fn required_fields(self) -> &'static [&'static str] {
        match self {
            Self::LandauerSpinChain => &[
                "spin_chain.n_bath_spins",
                "spin_chain.field_system",
                "spin_chain.field_bath",
                "spin_chain.coupling_chain",
                "spin_chain.coupling_sb",
                "time_grid.t_max",
                "initial_condition.system_state",
            ],
            Self::LandauerRandomMatrix => &[
                "random_matrix.eps0",
                "random_matrix.eps1",
                "random_matrix.width",
                "random_matrix.v1",
                "random_matrix.coupling",
                "time_grid.t_max",
                "initial_condition.system_state",
            ],
            Self::SwapEngine | Self::EngineErrorScaling => {
                &["engine.gap_system", "engine.gap_hot", "engine.t_cold", "engine.t_hot0"]
            }
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinChainConfig {
    pub n_bath_spins: usize,
    pub field_system: f64,
    pub field_bath: f64,
    pub coupling_chain: f64,
    pub coupling_sb: f64,
    #[serde(default = "default_max_dim")]
    pub max_dim: usize,
}

fn default_max_dim() -> usize {
    finbath::models::DEFAULT_MAX_DIM
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomMatrixConfig {
    pub eps0: f64,
    pub eps1: f64,
    pub width: f64,
    #[serde(default = "default_v0")]
    pub v0: usize,
    pub v1: usize,
    pub coupling: f64,
    #[serde(default = "default_coupling_variance")]
    pub coupling_variance: f64,
}

fn default_v0() -> usize {
    DEFAULT_V0
}

fn default_coupling_variance() -> f64 {
    DEFAULT_COUPLING_VARIANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    pub gap_system: f64,
    pub gap_hot: f64,
    pub t_cold: f64,
    pub t_hot0: f64,
    #[serde(default = "default_engine_qubits")]
    pub n_qubits: usize,
}

fn default_engine_qubits() -> usize {
    DEFAULT_ENGINE_QUBITS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
}

fn default_n_points() -> usize {
    DEFAULT_N_POINTS
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        let n = self.n_points;
        (0..n).map(|i| self.t_max * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemStateName {
    MaximallyMixed,
    Excited,
    Ground,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConditionConfig {
    pub system_state: SystemStateName,
    /// Rows of `[re, im]` pairs; only with `system_state = "custom"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub custom_matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath_temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath_beta0: Option<f64>,
}

impl InitialConditionConfig {
    pub fn beta0(&self) -> f64 {
        match (self.bath_beta0, self.bath_temperature) {
            (Some(b), _) => b,
            (None, Some(t)) => 1.0 / t,
            (None, None) => unreachable!("validated config has a bath temperature"),
        }
    }

    pub fn custom_state(&self) -> Option<CMatrix> {
        let rows = self.custom_matrix.as_ref()?;
        let d = rows.len();
        Some(CMatrix::from_fn(d, d, |i, j| {
            let [re, im] = rows[i].get(j).copied().unwrap_or([f64::NAN, f64::NAN]);
            C64::new(re, im)
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoarseGrainingConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formats: Option<Vec<Format>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spin_chain: Option<SpinChainConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_matrix: Option<RandomMatrixConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub engine: Option<EngineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_grid: Option<TimeGrid>,
    /// Swap-engine cycle count; defaults to the number of hot qubits.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycles: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bath_sizes: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_condition: Option<InitialConditionConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coarse_graining: Option<CoarseGrainingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

/// One or more path-qualified problems with a config document.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub messages: Vec<String>,
}

impl ConfigError {
    fn one(msg: impl Into<String>) -> Self {
        Self { messages: vec![msg.into()] }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.messages.join("\n"))
    }
}

impl std::error::Error for ConfigError {}

/// Parse and validate a config document; defaults are not yet applied.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let tree: Value = serde_json::from_str(text).map_err(|e| ConfigError::one(format!("invalid JSON: {e}")))?;
    check_required(&tree)?;
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(&tree).map_err(|e| {
        let path = e.path().to_string();
        ConfigError::one(format!("{path}: {}", e.into_inner()))
    })?;
    cfg.validate()?;
    Ok(cfg)
}

fn check_required(tree: &Value) -> Result<(), ConfigError> {
    let Some(root) = tree.as_object() else {
        return Err(ConfigError::one("config must be a JSON object"));
    };
    let names: Vec<&str> = Scenario::ALL.iter().map(|s| s.name()).collect();
    let scenario = match root.get("scenario") {
        None => {
            return Err(ConfigError::one(format!(
                "missing required field `scenario` (one of: {}); each scenario then requires its own model fields",
                names.join(", ")
            )))
        }
        Some(v) => match v.as_str().and_then(|s| Scenario::ALL.into_iter().find(|x| x.name() == s)) {
            Some(s) => s,
            None => return Err(ConfigError::one(format!("scenario: expected one of {}, got {v}", names.join(", ")))),
        },
    };
    let mut messages = Vec::new();
    for key in root.keys() {
        let known = key == "scenario" || scenario.allowed_blocks().contains(&key.as_str());
        let elsewhere = Scenario::ALL.iter().any(|s| s.allowed_blocks().contains(&key.as_str()));
        if !known && elsewhere {
            messages.push(format!("{key}: not used by scenario `{scenario}`"));
        }
    }
    for path in scenario.required_fields() {
        if lookup(tree, path).is_none() {
            messages.push(format!("missing required field `{path}`"));
        }
    }
    if scenario.is_landauer() {
        if let Some(ic) = root.get("initial_condition").and_then(Value::as_object) {
            if !ic.contains_key("bath_temperature") && !ic.contains_key("bath_beta0") {
                messages.push(
                    "missing required field `initial_condition.bath_temperature` (or `initial_condition.bath_beta0`)"
                        .into(),
                );
            }
        }
    }
    if messages.is_empty() {
        Ok(())
    } else {
        Err(ConfigError { messages })
    }
}

fn lookup<'a>(tree: &'a Value, path: &str) -> Option<&'a Value> {
    path.split('.').try_fold(tree, |node, key| node.get(key))
}

/// Pass/fail accumulator for range checks.
struct Checks(Vec<String>);

impl Checks {
    fn require(&mut self, ok: bool, path: &str, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(format!("{path}: {}", msg()));
        }
    }

    fn finite(&mut self, path: &str, v: f64) {
        self.require(v.is_finite(), path, || format!("must be finite, got {v}"));
    }

    fn positive(&mut self, path: &str, v: f64) {
        self.require(v.is_finite() && v > 0.0, path, || format!("must be positive and finite, got {v}"));
    }
}

impl ExperimentConfig {
    /// Range checks on a parsed config; all failures are reported together.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut c = Checks(Vec::new());
        if let Some(m) = &self.spin_chain {
            c.require(m.n_bath_spins >= 1, "spin_chain.n_bath_spins", || "must be at least 1".into());
            for (k, v) in [
                ("field_system", m.field_system),
                ("field_bath", m.field_bath),
                ("coupling_chain", m.coupling_chain),
                ("coupling_sb", m.coupling_sb),
            ] {
                c.finite(&format!("spin_chain.{k}"), v);
            }
            let dim = u32::try_from(m.n_bath_spins + 1).ok().and_then(|k| 2usize.checked_pow(k));
            c.require(dim.is_some_and(|d| d <= m.max_dim), "spin_chain.n_bath_spins", || {
                format!("joint dimension 2^{} exceeds max_dim = {}", m.n_bath_spins + 1, m.max_dim)
            });
        }
        if let Some(m) = &self.random_matrix {
            for (k, v) in [("eps0", m.eps0), ("eps1", m.eps1), ("coupling", m.coupling)] {
                c.finite(&format!("random_matrix.{k}"), v);
            }
            c.require(m.width.is_finite() && m.width >= 0.0, "random_matrix.width", || {
                format!("must be non-negative and finite, got {}", m.width)
            });
            c.require(m.coupling_variance.is_finite() && m.coupling_variance >= 0.0, "random_matrix.coupling_variance", || {
                format!("must be non-negative and finite, got {}", m.coupling_variance)
            });
            c.require(m.v0 >= 1, "random_matrix.v0", || "must be at least 1".into());
            c.require(m.v1 >= 1, "random_matrix.v1", || "must be at least 1".into());
            c.require(m.eps1 - m.eps0 >= m.width, "random_matrix.eps1", || {
                format!("bands overlap: eps1 - eps0 = {} is smaller than width = {}", m.eps1 - m.eps0, m.width)
            });
        }
        if let Some(e) = &self.engine {
            for (k, v) in [("gap_system", e.gap_system), ("gap_hot", e.gap_hot), ("t_cold", e.t_cold), ("t_hot0", e.t_hot0)] {
                c.positive(&format!("engine.{k}"), v);
            }
            c.require(e.n_qubits >= 1, "engine.n_qubits", || "must be at least 1".into());
            if let Some(n) = self.cycles {
                c.require((1..=e.n_qubits).contains(&n), "cycles", || {
                    format!("must lie in 1..={} (one fresh hot qubit per cycle), got {n}", e.n_qubits)
                });
            }
        }
        if let Some(sizes) = &self.bath_sizes {
            c.require(!sizes.is_empty(), "bath_sizes", || "must not be empty".into());
            for (i, &n) in sizes.iter().enumerate() {
                c.require(n >= 2, &format!("bath_sizes[{i}]"), || format!("must be at least 2, got {n}"));
            }
        }
        if let Some(g) = &self.time_grid {
            c.positive("time_grid.t_max", g.t_max);
            c.require(g.n_points >= 2, "time_grid.n_points", || format!("must be at least 2, got {}", g.n_points));
        }
        if let Some(ic) = &self.initial_condition {
            match (ic.bath_temperature, ic.bath_beta0) {
                (Some(_), Some(_)) => c.0.push(
                    "initial_condition: give either bath_temperature or bath_beta0, not both".into(),
                ),
                (Some(t), None) => c.require(t.is_finite() && t != 0.0, "initial_condition.bath_temperature", || {
                    format!("must be finite and nonzero, got {t}")
                }),
                (None, Some(b)) => c.finite("initial_condition.bath_beta0", b),
                (None, None) => {}
            }
            let custom = ic.system_state == SystemStateName::Custom;
            match (custom, &ic.custom_matrix) {
                (true, None) => c.0.push("missing required field `initial_condition.custom_matrix`".into()),
                (false, Some(_)) => c.0.push(
                    "initial_condition.custom_matrix: only allowed with system_state = \"custom\"".into(),
                ),
                (true, Some(rows)) => {
                    let ok = rows.len() == 2 && rows.iter().all(|r| r.len() == 2);
                    c.require(ok, "initial_condition.custom_matrix", || "must be a 2x2 matrix of [re, im] pairs".into());
                    if ok {
                        let space = CompositeSpace::new([("S", 2)]).expect("static space");
                        if let Err(e) = DensityMatrix::new(space, ic.custom_state().expect("present")) {
                            c.0.push(format!("initial_condition.custom_matrix: {e}"));
                        }
                    }
                }
                (false, None) => {}
            }
        }
        if let Some(cg) = &self.coarse_graining {
            if let Some(b) = cg.bins {
                c.require(b >= 1, "coarse_graining.bins", || "must be at least 1".into());
            }
        }
        if let Some(bounds) = &self.bounds {
            for (i, name) in bounds.iter().enumerate() {
                c.require(name.parse::<BoundKind>().is_ok(), &format!("bounds[{i}]"), || {
                    let all: Vec<&str> = BoundKind::ALL.iter().map(|k| k.name()).collect();
                    format!("unknown bound '{name}' (expected one of {})", all.join(", "))
                });
            }
        }
        if let Some(out) = &self.output {
            if let Some(f) = &out.formats {
                c.require(!f.is_empty(), "output.formats", || "must not be empty".into());
            }
        }
        if c.0.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { messages: c.0 })
        }
    }

    /// Apply every default explicitly. The result re-parses to itself.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        self.validate()?;
        self.seed.get_or_insert(0);
        let out = self.output.get_or_insert(OutputConfig { directory: None, formats: None });
        out.directory.get_or_insert_with(|| DEFAULT_OUTPUT_DIR.to_owned());
        out.formats.get_or_insert_with(|| vec![Format::Csv]);
        match self.scenario {
            Scenario::LandauerSpinChain | Scenario::LandauerRandomMatrix => {
                self.bounds.get_or_insert_with(|| BoundKind::ALL.iter().map(|k| k.name().to_owned()).collect());
                let (dim, bands) = match (&self.spin_chain, &self.random_matrix) {
                    (Some(m), _) => (1usize << m.n_bath_spins, None),
                    (_, Some(m)) => (m.v0 + m.v1, Some(2)),
                    _ => unreachable!("required block checked during parsing"),
                };
                let cg = self.coarse_graining.get_or_insert(CoarseGrainingConfig { bins: None });
                cg.bins.get_or_insert_with(|| default_bin_count(dim, bands));
            }
            Scenario::SwapEngine => {
                let n = self.engine.as_ref().map_or(DEFAULT_ENGINE_QUBITS, |e| e.n_qubits);
                self.cycles.get_or_insert(n);
            }
            Scenario::EngineErrorScaling => {
                self.bath_sizes.get_or_insert_with(|| DEFAULT_BATH_SIZES.to_vec());
            }
        }
        Ok(self)
    }

    pub fn bound_kinds(&self) -> Vec<BoundKind> {
        self.bounds.iter().flatten().filter_map(|b| b.parse().ok()).collect()
    }

    pub fn formats(&self) -> Vec<Format> {
        self.output.as_ref().and_then(|o| o.formats.clone()).unwrap_or_else(|| vec![Format::Csv])
    }

    pub fn output_directory(&self) -> String {
        self.output.as_ref().and_then(|o| o.directory.clone()).unwrap_or_else(|| DEFAULT_OUTPUT_DIR.to_owned())
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }
}
