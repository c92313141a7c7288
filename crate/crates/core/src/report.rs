// SPDX-License-Identifier: Apache-2.0

//! JSON report documents and their validation.
//!
//! Every document starts with a [`Provenance`] block. The wall-clock time
//! lives only in `provenance.generated_at`, so two runs with the same inputs
//! and seed differ in that field alone.

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::communities::CommunityPartition;
use crate::empirical::{CorrelationMatrix, RegressionModel, SelectionReport};
use crate::error::{Error, Result};
use crate::fitting::{FitResult, ScalingFit, ScalingMeasure};
use crate::measures::MeasureReport;
use crate::null_models::{EnsembleStats, LatticeOrdering, NullKind, NullModelEnsemble};
use crate::pipeline::AnalysisConfig;
use crate::small_world::OmegaResult;

pub const TOOL_NAME: &str = "spatnet";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TIMESTAMP_FIELD: &str = "generated_at";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    /// Always present; `null` for deterministic commands.
    #[serde(deserialize_with = "Option::deserialize")]
    pub seed: Option<u64>,
    pub config: AnalysisConfig,
    pub generated_at: String,
}

impl Provenance {
    pub fn new(command: &str, config: &AnalysisConfig) -> Self {
        Self {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            command: command.to_string(),
            seed: config.seed,
            config: config.clone(),
            generated_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasuresDocument {
    pub provenance: Provenance,
    pub report: MeasureReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSummary {
    pub kind: NullKind,
    pub seed: u64,
    pub swaps_per_edge: usize,
    pub replicates: usize,
    pub ordering: Option<LatticeOrdering>,
    pub swaps_accepted: Vec<usize>,
    pub stats: EnsembleStats,
}

impl From<&NullModelEnsemble> for EnsembleSummary {
    fn from(e: &NullModelEnsemble) -> Self {
        Self {
            kind: e.kind,
            seed: e.seed,
            swaps_per_edge: e.swaps_per_edge,
            replicates: e.replicates.len(),
            ordering: e.ordering,
            swaps_accepted: e.swaps_accepted.clone(),
            stats: e.stats.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaDocument {
    pub provenance: Provenance,
    pub result: OmegaResult,
    pub random: EnsembleSummary,
    pub lattice: EnsembleSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommunitiesDocument {
    pub provenance: Provenance,
    pub partition: CommunityPartition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeDistributionFits {
    /// `(degree, node count)` pairs.
    pub histogram: Vec<(usize, usize)>,
    pub normal: FitResult,
    pub powerlaw: FitResult,
}

/// A scaling fit, or the reason it could not be made.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingEntry {
    pub measure: ScalingMeasure,
    pub fit: Option<ScalingFit>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitsDocument {
    pub provenance: Provenance,
    pub degree_distribution: DegreeDistributionFits,
    pub scaling: Vec<ScalingEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionDocument {
    pub provenance: Provenance,
    pub rows: usize,
    pub dropped_ids: Vec<String>,
    pub correlations: CorrelationMatrix,
    pub selection: SelectionReport,
    pub models: Vec<RegressionModel>,
}

/// The report files a command can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReportKind {
    Measures,
    Omega,
    Communities,
    Fits,
    Regression,
}

impl ReportKind {
    pub const ALL: [ReportKind; 5] = [
        ReportKind::Measures,
        ReportKind::Omega,
        ReportKind::Communities,
        ReportKind::Fits,
        ReportKind::Regression,
    ];

    pub fn file_name(self) -> &'static str {
        match self {
            ReportKind::Measures => "measures.json",
            ReportKind::Omega => "omega.json",
            ReportKind::Communities => "communities.json",
            ReportKind::Fits => "fits.json",
            ReportKind::Regression => "regression.json",
        }
    }

    pub fn from_file_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.file_name() == name)
    }
}

fn strict<T: DeserializeOwned>(text: &str) -> Result<()> {
    serde_json::from_str::<T>(text)
        .map(|_| ())
        .map_err(|e| Error::InvalidReport(e.to_string()))
}

/// Checks that `text` parses as a `kind` document with no unknown or missing fields.
pub fn validate_report(kind: ReportKind, text: &str) -> Result<()> {
    match kind {
        ReportKind::Measures => strict::<MeasuresDocument>(text),
        ReportKind::Omega => strict::<OmegaDocument>(text),
        ReportKind::Communities => strict::<CommunitiesDocument>(text),
        ReportKind::Fits => strict::<FitsDocument>(text),
        ReportKind::Regression => strict::<RegressionDocument>(text),
    }
}

/// Replaces `provenance.generated_at` with a fixed string.
pub fn mask_timestamp(text: &str) -> Result<String> {
    let mut value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::InvalidReport(e.to_string()))?;
    let slot = value
        .get_mut("provenance")
        .and_then(|p| p.get_mut(TIMESTAMP_FIELD))
        .ok_or_else(|| Error::InvalidReport("missing provenance.generated_at".into()))?;
    *slot = serde_json::Value::String("<masked>".into());
    serde_json::to_string_pretty(&value).map_err(|e| Error::InvalidReport(e.to_string()))
}

/// Serialized reports and plot tables, keyed by relative file path.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReportBundle {
    pub files: BTreeMap<String, String>,
}

impl ReportBundle {
    pub fn insert_json<T: Serialize>(&mut self, kind: ReportKind, document: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(document)
            .map_err(|e| Error::InvalidReport(e.to_string()))?;
        text.push('\n');
        validate_report(kind, &text)?;
        self.files.insert(kind.file_name().to_string(), text);
        Ok(())
    }

    pub fn insert_plot(&mut self, name: &str, csv: String) {
        self.files.insert(format!("plotdata/{name}.csv"), csv);
    }

    pub fn get(&self, path: &str) -> Option<&str> {
        self.files.get(path).map(String::as_str)
    }

    pub fn report(&self, kind: ReportKind) -> Option<&str> {
        self.get(kind.file_name())
    }

    pub fn kinds(&self) -> Vec<ReportKind> {
        ReportKind::ALL
            .into_iter()
            .filter(|k| self.files.contains_key(k.file_name()))
            .collect()
    }
}
