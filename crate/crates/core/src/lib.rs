// SPDX-License-Identifier: Apache-2.0

//! Spatial complex-network analysis for interregional road and commuting
//! systems.
//!
//! The crate models a network as an undirected graph whose nodes carry
//! coordinates and attributes and whose edges carry road kilometres and
//! per-epoch travel times. On top of it sit:
//!
//! * [`measures`]: degree, strength, closeness, betweenness, clustering,
//!   path length, straightness, density;
//! * [`null_models`] and [`small_world`]: degree-preserving randomization and
//!   latticeization ensembles and the ω small-world index;
//! * [`communities`]: Louvain modularity maximization;
//! * [`fitting`]: degree-distribution and degree-scaling curve fits;
//! * [`empirical`]: correlation-gated variable selection and OLS regression;
//! * [`io`], [`report`] and [`pipeline`]: CSV ingestion, JSON reports and
//!   command execution.

#![allow(clippy::needless_range_loop)]

pub mod communities;
pub mod empirical;
pub mod error;
pub mod fitting;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod measures;
pub mod null_models;
pub mod pipeline;
pub mod report;
mod sentinel;
pub mod small_world;
pub mod stats;

pub use communities::{find_communities, modularity, CommunityPartition, EdgeWeighting};
pub use empirical::{
    ols_regress, pearson_matrix, select_representatives, ColumnTag, CorrelationMatrix,
    RegressionModel, SelectionReport, VarClass, VariableTable,
};
pub use error::{Error, Result};
pub use fitting::{FitFamily, FitResult, ScalingFit, ScalingMeasure};
pub use graph::{DistanceMode, EdgeRecord, GeoPoint, NodeRecord, ShortestPaths, SpatialGraph};
pub use measures::{measure_report, MeasureOptions, MeasureReport, Planarity};
pub use null_models::{
    latticeize, randomize, LatticeOrdering, NullKind, NullModelEnsemble, NullModelParams,
};
pub use pipeline::{run, write_bundle, AnalysisConfig, Command};
pub use report::{validate_report, ReportBundle, ReportKind};
pub use small_world::{omega, omega_from_values, OmegaResult, Topology};
