// SPDX-License-Identifier: Apache-2.0

//! Command execution: ingest, compute, and emit a [`ReportBundle`].
//!
//! A command either produces every report it owns or returns an error
//! without touching the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::communities::{find_communities, EdgeWeighting};
use crate::empirical::{
    ols_regress, pearson_matrix, select_representatives, VariableTable, DEFAULT_ALPHA,
};
use crate::error::{Error, Result};
use crate::fitting::{
    degree_histogram, fit_normal, fit_powerlaw, histogram_points, scaling_by_degree_class,
    ScalingMeasure,
};
use crate::graph::SpatialGraph;
use crate::io::{ingest, series_csv};
use crate::measures::{measure_report, MeasureOptions};
use crate::null_models::{
    latticeize, randomize, LatticeOrdering, NullModelParams, DEFAULT_REPLICATES,
    DEFAULT_SWAPS_PER_EDGE,
};
use crate::report::{
    CommunitiesDocument, DegreeDistributionFits, FitsDocument, MeasuresDocument, OmegaDocument,
    Provenance, RegressionDocument, ReportBundle, ReportKind, ScalingEntry,
};
use crate::small_world::{omega, DEFAULT_THRESHOLD};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Omega,
    Communities,
    Fit,
    Regress,
    All,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Omega => "omega",
            Command::Communities => "communities",
            Command::Fit => "fit",
            Command::Regress => "regress",
            Command::All => "all",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(self, Command::Omega | Command::Communities | Command::All)
    }

    fn includes(self, other: Command) -> bool {
        self == other || self == Command::All
    }
}

/// Inputs and parameters for one run. The output directory is not part of
/// the echoed configuration, so reports do not depend on where they land.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    pub variables: Option<PathBuf>,
    pub epoch: Option<String>,
    pub seed: Option<u64>,
    pub swaps_per_edge: usize,
    pub replicates: usize,
    pub lattice_ordering: LatticeOrdering,
    pub omega_threshold: f64,
    pub community_weighting: EdgeWeighting,
    pub alpha: f64,
    /// Predictor sets to fit; empty means the sets implied by the selection.
    pub models: Vec<Vec<String>>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl AnalysisConfig {
    pub fn new(nodes: impl Into<PathBuf>, edges: impl Into<PathBuf>) -> Self {
        Self {
            nodes: nodes.into(),
            edges: edges.into(),
            variables: None,
            epoch: None,
            seed: None,
            swaps_per_edge: DEFAULT_SWAPS_PER_EDGE,
            replicates: DEFAULT_REPLICATES,
            lattice_ordering: LatticeOrdering::default(),
            omega_threshold: DEFAULT_THRESHOLD,
            community_weighting: EdgeWeighting::default(),
            alpha: DEFAULT_ALPHA,
            models: Vec::new(),
            out: PathBuf::from("."),
        }
    }

    /// Parameter and path checks that run before any computation.
    pub fn validate(&self, command: Command) -> Result<()> {
        if command.is_stochastic() && self.seed.is_none() {
            return Err(Error::Config(format!(
                "`{}` is stochastic and needs --seed",
                command.name()
            )));
        }
        if command == Command::Regress && self.variables.is_none() {
            return Err(Error::Config("`regress` needs --vars".into()));
        }
        if self.swaps_per_edge == 0 || self.replicates == 0 {
            return Err(Error::Config(
                "swaps per edge and replicates must be positive".into(),
            ));
        }
        if !(self.omega_threshold.is_finite() && self.omega_threshold > 0.0) {
            return Err(Error::Config(format!(
                "omega threshold must be positive, got {}",
                self.omega_threshold
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if self.models.iter().any(Vec::is_empty) {
            return Err(Error::Config("empty model set".into()));
        }
        let inputs = [
            Some(&self.nodes),
            Some(&self.edges),
            self.variables.as_ref(),
        ];
        for path in inputs.into_iter().flatten() {
            if !path.is_file() {
                return Err(Error::Io(format!("{}: no such file", path.display())));
            }
        }
        Ok(())
    }

    fn null_params(&self) -> NullModelParams {
        NullModelParams::new(self.seed.expect("validated"))
            .with_swaps_per_edge(self.swaps_per_edge)
            .with_replicates(self.replicates)
            .with_ordering(self.lattice_ordering)
    }
}

/// Computes every report `command` owns. Nothing is written to disk.
pub fn run(command: Command, config: &AnalysisConfig) -> Result<ReportBundle> {
    config.validate(command)?;
    let data = ingest(&config.nodes, &config.edges, config.variables.as_deref())?;
    let provenance = Provenance::new(command.name(), config);
    let g = &data.graph;
    let mut bundle = ReportBundle::default();

    if command.includes(Command::Analyze) {
        let options = MeasureOptions {
            epoch: config.epoch.clone(),
            ..MeasureOptions::default()
        };
        let report = measure_report(g, &options)?;
        bundle.insert_json(
            ReportKind::Measures,
            &MeasuresDocument {
                provenance: provenance.clone(),
                report,
            },
        )?;
    }
    if command.includes(Command::Omega) {
        bundle.insert_json(ReportKind::Omega, &omega_document(g, config, &provenance)?)?;
    }
    if command.includes(Command::Communities) {
        let partition = find_communities(
            g,
            config.seed.expect("validated"),
            config.community_weighting,
        )?;
        bundle.insert_json(
            ReportKind::Communities,
            &CommunitiesDocument {
                provenance: provenance.clone(),
                partition,
            },
        )?;
    }
    if command.includes(Command::Fit) {
        fits(g, &provenance, &mut bundle)?;
    }
    if command.includes(Command::Regress) {
        if let Some(table) = &data.variables {
            let document = regression_document(table, config, &provenance)?;
            bundle.insert_json(ReportKind::Regression, &document)?;
        }
    }
    Ok(bundle)
}

fn omega_document(
    g: &SpatialGraph,
    config: &AnalysisConfig,
    provenance: &Provenance,
) -> Result<OmegaDocument> {
    let params = config.null_params();
    let random = randomize(g, &params)?;
    let lattice = latticeize(g, &params)?;
    let result = omega(g, &random, &lattice, config.omega_threshold)?;
    Ok(OmegaDocument {
        provenance: provenance.clone(),
        result,
        random: (&random).into(),
        lattice: (&lattice).into(),
    })
}

fn fits(g: &SpatialGraph, provenance: &Provenance, bundle: &mut ReportBundle) -> Result<()> {
    let histogram = degree_histogram(g);
    let points = histogram_points(&histogram);
    let normal = fit_normal(&points)?;
    let powerlaw = fit_powerlaw(&points)?;
    bundle.insert_plot(
        "degree_distribution_normal",
        series_csv(&normal.series(&points)),
    );
    bundle.insert_plot(
        "degree_distribution_powerlaw",
        series_csv(&powerlaw.series(&points)),
    );

    let mut scaling = Vec::new();
    for measure in [
        ScalingMeasure::Betweenness,
        ScalingMeasure::Strength,
        ScalingMeasure::Clustering,
    ] {
        let entry = match scaling_by_degree_class(g, measure) {
            Ok(fit) => {
                let name = match measure {
                    ScalingMeasure::Betweenness => "betweenness_vs_degree",
                    ScalingMeasure::Strength => "strength_vs_degree",
                    ScalingMeasure::Clustering => "clustering_vs_degree",
                };
                bundle.insert_plot(name, series_csv(&fit.fit.series(&fit.fitted_points())));
                ScalingEntry {
                    measure,
                    fit: Some(fit),
                    error: None,
                }
            }
            Err(e @ (Error::InsufficientClasses { .. } | Error::InsufficientPoints { .. })) => {
                ScalingEntry {
                    measure,
                    fit: None,
                    error: Some(e.to_string()),
                }
            }
            Err(e) => return Err(e),
        };
        scaling.push(entry);
    }
    bundle.insert_json(
        ReportKind::Fits,
        &FitsDocument {
            provenance: provenance.clone(),
            degree_distribution: DegreeDistributionFits {
                histogram,
                normal,
                powerlaw,
            },
            scaling,
        },
    )
}

fn regression_document(
    table: &VariableTable,
    config: &AnalysisConfig,
    provenance: &Provenance,
) -> Result<RegressionDocument> {
    let correlations = pearson_matrix(table)?;
    let selection = select_representatives(table, config.alpha)?;
    let sets = if config.models.is_empty() {
        selection.model_sets.clone()
    } else {
        config.models.clone()
    };
    let models = sets
        .iter()
        .map(|set| {
            let names: Vec<&str> = set.iter().map(String::as_str).collect();
            ols_regress(table, &names)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RegressionDocument {
        provenance: provenance.clone(),
        rows: table.rows(),
        dropped_ids: table.dropped_ids().to_vec(),
        correlations,
        selection,
        models,
    })
}

/// Writes the bundle under `out`. Files are staged in a scratch directory
/// inside `out` first and moved into place only once all of them are written.
pub fn write_bundle(bundle: &ReportBundle, out: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out)?;
    let staging = tempfile::Builder::new()
        .prefix(".staging-")
        .tempdir_in(out)?;
    for (relative, contents) in &bundle.files {
        let path = staging.path().join(relative);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, contents)?;
    }
    let mut written = Vec::new();
    for relative in bundle.files.keys() {
        let target = out.join(relative);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::rename(staging.path().join(relative), &target)?;
        written.push(target);
    }
    Ok(written)
}

/// Parses `"S6,B6,O2;S6,B6,O7"` into predictor sets.
pub fn parse_model_sets(text: &str) -> Result<Vec<Vec<String>>> {
    text.split(';')
        .map(str::trim)
        .filter(|set| !set.is_empty())
        .map(|set| {
            let names: Vec<String> = set.split(',').map(|s| s.trim().to_string()).collect();
            if names.iter().any(String::is_empty) {
                Err(Error::Config(format!("malformed model set `{set}`")))
            } else {
                Ok(names)
            }
        })
        .collect()
}
