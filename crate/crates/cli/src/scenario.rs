//! Scenario files: the JSON schema, strict parsing with pointer-style error
//! paths, and the semantic validation each model performs on top.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use swarm_core::asymmetric::AsymParams;
use swarm_core::engine::IntegratorConfig;
use swarm_core::game::{ModelParams, SimplexState};
use swarm_core::network::{power_law, DegreeDistribution};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Unstructured,
    Structured,
    Asymmetric,
    MicroMacro,
    Sector,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Unstructured => "unstructured",
            ModelKind::Structured => "structured",
            ModelKind::Asymmetric => "asymmetric",
            ModelKind::MicroMacro => "micro_macro",
            ModelKind::Sector => "sector",
        }
    }
}

/// The eight canonical rate constants.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct FullParamsDto {
    pub r1: f64,
    pub r2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl FullParamsDto {
    pub fn to_model_params(&self) -> CliResult<ModelParams> {
        ModelParams::new(
            self.r1,
            self.r2,
            self.sigma1,
            self.sigma2,
            self.alpha1,
            self.alpha2,
            self.gamma1,
            self.gamma2,
        )
        .map_err(|e| CliError::validation(format!("/params: {e}")))
    }

    pub fn from_model_params(p: &ModelParams) -> Self {
        Self {
            r1: p.r1,
            r2: p.r2,
            sigma1: p.sigma1,
            sigma2: p.sigma2,
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            gamma1: p.gamma1,
            gamma2: p.gamma2,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AsymParamsDto {
    pub gamma1: f64,
    pub gamma2: f64,
    pub sigma: f64,
}

impl AsymParamsDto {
    pub fn to_asym_params(&self) -> CliResult<AsymParams> {
        AsymParams::new(self.gamma1, self.gamma2, self.sigma)
            .map_err(|e| CliError::validation(format!("/params: {e}")))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum ParamsSpec {
    Full(FullParamsDto),
    Asym(AsymParamsDto),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitNetworkDto {
    pub support: Vec<u32>,
    pub probs: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawDto {
    pub mean_k: f64,
    pub k_max: u32,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawWrapper {
    pub power_law: PowerLawDto,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum NetworkSpec {
    Explicit(ExplicitNetworkDto),
    PowerLaw(PowerLawWrapper),
}

impl NetworkSpec {
    pub fn build(&self) -> CliResult<DegreeDistribution> {
        match self {
            NetworkSpec::Explicit(e) => {
                let sum: f64 = e.probs.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(CliError::validation(format!(
                        "/network/probs: probabilities sum to {sum}, expected 1"
                    )));
                }
                DegreeDistribution::from_weights(e.support.clone(), e.probs.clone())
                    .map_err(|e| CliError::validation(format!("/network: {e}")))
            }
            NetworkSpec::PowerLaw(w) => power_law(w.power_law.mean_k, w.power_law.k_max)
                .map_err(|e| CliError::validation(format!("/network/power_law: {e}"))),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ClassesSpec {
    /// Explicit per-class connectivity fractions. Only a single isolated
    /// class is supported: with more than one class the link probability
    /// would need the degree weights a plain psi list does not carry.
    pub psi: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalInitDto {
    pub global: [f64; 3],
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PerClassInitDto {
    /// Keys are degrees (as JSON object keys, hence strings).
    pub per_class: BTreeMap<String, [f64; 3]>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum InitSpec {
    Global(GlobalInitDto),
    PerClass(PerClassInitDto),
}

impl InitSpec {
    pub fn global_state(&self) -> CliResult<SimplexState> {
        match self {
            InitSpec::Global(g) => SimplexState::new(g.global[0], g.global[1], g.global[2])
                .map_err(|e| CliError::validation(format!("/init/global: {e}"))),
            InitSpec::PerClass(_) => Err(CliError::validation(
                "/init: this model needs a global initial state",
            )),
        }
    }

    /// Initial state per degree class, in support order.
    pub fn per_class_states(&self, dist: &DegreeDistribution) -> CliResult<Vec<SimplexState>> {
        match self {
            InitSpec::Global(g) => {
                let s = SimplexState::new(g.global[0], g.global[1], g.global[2])
                    .map_err(|e| CliError::validation(format!("/init/global: {e}")))?;
                Ok(vec![s; dist.len()])
            }
            InitSpec::PerClass(pc) => {
                for key in pc.per_class.keys() {
                    let k: u32 = key.parse().map_err(|_| {
                        CliError::validation(format!(
                            "/init/per_class/{key}: keys must be degrees"
                        ))
                    })?;
                    if dist.index_of(k).is_none() {
                        return Err(CliError::validation(format!(
                            "/init/per_class/{key}: degree not in the network support"
                        )));
                    }
                }
                dist.support()
                    .iter()
                    .map(|k| {
                        let v = pc.per_class.get(&k.to_string()).ok_or_else(|| {
                            CliError::validation(format!(
                                "/init/per_class: missing state for degree {k}"
                            ))
                        })?;
                        SimplexState::new(v[0], v[1], v[2]).map_err(|e| {
                            CliError::validation(format!("/init/per_class/{k}: {e}"))
                        })
                    })
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Rk4Fixed,
    Rk45Adaptive,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub method: MethodKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub abs_tol: Option<f64>,
    pub horizon: f64,
}

impl IntegratorSpec {
    pub fn to_config(&self) -> CliResult<IntegratorConfig> {
        match self.method {
            MethodKind::Rk4Fixed => {
                let step = self.step.ok_or_else(|| {
                    CliError::validation("/integrator/step: required for rk4_fixed")
                })?;
                IntegratorConfig::rk4(step, self.horizon)
                    .map_err(|e| CliError::validation(format!("/integrator: {e}")))
            }
            MethodKind::Rk45Adaptive => {
                let rel = self.rel_tol.ok_or_else(|| {
                    CliError::validation("/integrator/rel_tol: required for rk45_adaptive")
                })?;
                let abs = self.abs_tol.ok_or_else(|| {
                    CliError::validation("/integrator/abs_tol: required for rk45_adaptive")
                })?;
                IntegratorConfig::rk45(rel, abs, self.horizon)
                    .map_err(|e| CliError::validation(format!("/integrator: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryOut {
    pub trajectory_csv: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BarycentricOut {
    pub barycentric_csv: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ReportOut {
    pub report_json: String,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(untagged)]
pub enum OutputSpec {
    Trajectory(TrajectoryOut),
    Barycentric(BarycentricOut),
    Report(ReportOut),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalSpec {
    /// sigma(t) = value for all t.
    Constant { value: f64 },
    /// sigma(t) = k_tilde (1 + sin t) / 2.
    Sine,
    /// Piecewise constant: a fresh level uniform in [0, k_tilde) every
    /// `period` time units, drawn from the scenario seed.
    Switching { period: f64 },
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSpec {
    pub k_tilde: f64,
    pub signal: SignalSpec,
    /// Linearization coordinate; defaults to the symmetric equilibrium at
    /// mid-sector sigma = k_tilde / 2.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<f64>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub model: ModelKind,
    pub params: ParamsSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<NetworkSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<ClassesSpec>,
    /// Frozen link probability for the mean-field response model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    pub init: InitSpec,
    pub integrator: IntegratorSpec,
    #[serde(default)]
    pub outputs: Vec<OutputSpec>,
    /// Seed for randomized signals; defaults to 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<SectorSpec>,
    /// Record every n-th step into the CSV outputs (default 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv_every: Option<usize>,
    /// For micro_macro: also bracket the consensus threshold empirically.
    #[serde(default)]
    pub empirical_threshold: bool,
}

impl Scenario {
    /// Symmetric eight-field parameters, required by several models.
    pub fn params_symmetric(&self) -> CliResult<ModelParams> {
        match &self.params {
            ParamsSpec::Full(f) => {
                let p = f.to_model_params()?;
                if !p.is_symmetric() {
                    return Err(CliError::validation(format!(
                        "/params: model '{}' requires symmetric parameters (r1 = r2, sigma1 = sigma2, alpha1 = alpha2, gamma1 = gamma2)",
                        self.model.as_str()
                    )));
                }
                Ok(p)
            }
            ParamsSpec::Asym(_) => Err(CliError::validation(format!(
                "/params: model '{}' takes the eight-field form, not the asymmetric one",
                self.model.as_str()
            ))),
        }
    }

    pub fn params_asym(&self) -> CliResult<AsymParams> {
        match &self.params {
            ParamsSpec::Asym(a) => a.to_asym_params(),
            ParamsSpec::Full(_) => Err(CliError::validation(
                "/params: the asymmetric model takes {gamma1, gamma2, sigma}",
            )),
        }
    }

    pub fn csv_every(&self) -> usize {
        self.csv_every.unwrap_or(1).max(1)
    }
}

/// Parse a scenario file, reporting schema violations with a JSON pointer.
pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> CliResult<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = format!("/{}", e.path().to_string().replace('.', "/"));
        CliError::validation(format!("{pointer}: {}", e.inner()))
    })
}
