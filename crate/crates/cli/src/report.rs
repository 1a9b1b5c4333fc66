//! Report layout. Reports carry no timestamps so reruns are byte-identical.

use drfcheck_core::causal::{BoundResult, FirstOutcomeDependence, MembershipResult};
use drfcheck_core::inequality::{NoSignalingReport, OptimizeResult, VbcReport};
use drfcheck_core::spacetime::SpacetimeReport;
use drfcheck_core::stats::{CountSidecar, EstimateReport, NoSignalStatReport};
use serde::Serialize;

use crate::config::RunConfig;

pub const TOOL_NAME: &str = "drfcheck";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub schema_version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub warnings: Vec<String>,
    pub results: Results,
}

impl Report {
    pub fn new(command: &str, config: RunConfig) -> Self {
        Self {
            tool: TOOL_NAME,
            tool_version: TOOL_VERSION,
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            warnings: Vec::new(),
            results: Results::default(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report is always serializable");
        s.push('\n');
        s
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Results {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ideal: Option<VbcReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vbc: Option<VbcReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub no_signaling: Option<NoSignalingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<CountSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nosignal_stat: Option<NoSignalStatReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<BoundSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<MembershipResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacetime: Option<SpacetimeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<SweepPoint>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub significance_check: Option<SignificanceCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Vec<ComparisonRow>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountSummary {
    #[serde(flatten)]
    pub sidecar: CountSidecar,
    pub detected: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundSummary {
    pub functional: String,
    pub first_outcome: FirstOutcomeDependence,
    #[serde(flatten)]
    pub result: BoundResult,
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizeSummary {
    #[serde(flatten)]
    pub result: OptimizeResult,
    pub equivalent_to_canonical: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct FiberDelay {
    pub label: String,
    pub length_m: f64,
    pub group_index: f64,
    pub delay_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpacetimeSummary {
    pub fibers: Vec<FiberDelay>,
    #[serde(flatten)]
    pub report: SpacetimeReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub visibility: f64,
    pub werner_p: f64,
    pub vbc: VbcReport,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignificanceCheck {
    pub total: f64,
    pub std: f64,
    pub sigmas: f64,
}

/// One line of the side-by-side table against published numbers.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonRow {
    pub quantity: String,
    pub published: f64,
    pub published_std: Option<f64>,
    pub model_exact: Option<f64>,
    pub model_sampled: f64,
    pub model_sampled_std: Option<f64>,
}
