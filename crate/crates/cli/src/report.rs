//! The report.json schema: everything an analysis run learns, serialized
//! deterministically (field order is fixed by the struct definitions).

use serde::{Deserialize, Serialize};
use swarm_core::unstructured::Classification;

pub fn classification_str(c: Classification) -> &'static str {
    match c {
        Classification::StableNode => "stable_node",
        Classification::StableFocus => "stable_focus",
        Classification::Saddle => "saddle",
        Classification::Unstable => "unstable",
        Classification::Degenerate => "degenerate",
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub case: String,
    pub point: [f64; 3],
    pub feasible: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvalues: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Thresholds {
    /// Closed-form consensus threshold of the unstructured system.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<f64>,
    /// Structured threshold at the measured symmetric aggregate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structured: Option<f64>,
    /// structured / formula, recorded for the degenerate-network comparison.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    /// Aggregate the structured value was evaluated at.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi_aggregate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical_bracket: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeanFieldClassReport {
    pub k: u32,
    pub psi: f64,
    pub eigenvalues: [f64; 2],
    pub equilibrium: [f64; 3],
    pub final_state: [f64; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settle_time: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SettleReport {
    pub final_state: Vec<f64>,
    /// First time the trajectory stays within 1e-6 of its final state.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settle_time_to_final: Option<f64>,
    /// First time within 0.01 of the consensus corner (asymmetric runs).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settle_99: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_x3: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KypJson {
    pub found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<[[f64; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<[[f64; 2]; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SprJson {
    pub hurwitz: bool,
    pub trace: f64,
    pub determinant: f64,
    pub pole_list: Vec<[f64; 2]>,
    pub min_eig_margin: f64,
    pub worst_omega: f64,
    pub z_inf_positive: bool,
    pub verdict: String,
    pub kyp: KypJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorRunReport {
    pub k_tilde: f64,
    /// Linearization coordinate the certificate was built at.
    pub x_lin: f64,
    pub sup_norm: f64,
    pub final_state: [f64; 2],
    pub final_rhs_inf: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lyapunov_residual_ball: Option<f64>,
    /// Largest single-step rise of x'Px outside the residual ball.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lyapunov_worst_increase: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassFinal {
    pub k: u32,
    pub psi: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MicroMacroReport {
    /// Max gap between the evolved macro pair and the link probabilities
    /// recomputed from the micro states.
    pub theta_consistency_gap: f64,
    pub final_theta: [f64; 2],
    pub final_classes: Vec<ClassFinal>,
    pub x3_monotone_in_k: bool,
}

/// Simplex bookkeeping along every recorded trajectory of the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvariantReport {
    pub min_coordinate: f64,
    pub max_mass_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub model: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equilibria: Option<Vec<EquilibriumReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Thresholds>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_field: Option<Vec<MeanFieldClassReport>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub settle: Option<SettleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spr: Option<SprJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sector: Option<SectorRunReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micro_macro: Option<MicroMacroReport>,
    pub invariants: InvariantReport,
    /// Files the run wrote, relative to its output directory.
    pub outputs: Vec<String>,
}

impl Report {
    pub fn new(model: &str) -> Self {
        Self {
            model: model.to_string(),
            equilibria: None,
            thresholds: None,
            mean_field: None,
            settle: None,
            spr: None,
            sector: None,
            micro_macro: None,
            invariants: InvariantReport {
                min_coordinate: f64::INFINITY,
                max_mass_error: 0.0,
            },
            outputs: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }
}
