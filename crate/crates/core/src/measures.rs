// SPDX-License-Identifier: Apache-2.0

//! Per-node and global network measures.
//!
//! Conventions:
//! * closeness is the mean shortest-path distance (small = central);
//! * betweenness is normalized by the number of unordered pairs not involving
//!   the node, so it lies in `[0, 1]`;
//! * average path length averages over ordered pairs;
//! * any measure built on shortest paths refuses disconnected graphs instead
//!   of skipping unreachable pairs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceMode, ShortestPaths, SpatialGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Planarity {
    /// Edge count relative to the planar maximum `3n - 6`.
    Planar,
    /// Edge count relative to all `n(n-1)/2` pairs.
    Nonplanar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeStrength {
    pub degree: BTreeMap<String, usize>,
    pub strength_km: BTreeMap<String, f64>,
    pub mean_degree: f64,
    pub mean_strength_km: f64,
}

pub fn degree_and_strength(g: &SpatialGraph) -> DegreeStrength {
    let strength = strengths(g);
    let n = g.node_count();
    let (mean_degree, mean_strength_km) = if n == 0 {
        (0.0, 0.0)
    } else {
        (
            2.0 * g.edge_count() as f64 / n as f64,
            strength.iter().sum::<f64>() / n as f64,
        )
    };
    DegreeStrength {
        degree: by_id(g, g.degrees()),
        strength_km: by_id(g, strength),
        mean_degree,
        mean_strength_km,
    }
}

pub fn density(g: &SpatialGraph, planarity: Planarity) -> Result<f64> {
    density_from_counts(g.node_count(), g.edge_count(), planarity)
}

/// Density from the node and edge counts alone.
pub fn density_from_counts(n: usize, m: usize, planarity: Planarity) -> Result<f64> {
    let (n, m) = (n as f64, m as f64);
    match planarity {
        Planarity::Planar if n < 3.0 => Err(Error::TooFewNodes {
            required: 3,
            actual: n as usize,
        }),
        Planarity::Planar => Ok(m / (3.0 * n - 6.0)),
        Planarity::Nonplanar if n < 2.0 => Err(Error::TooFewNodes {
            required: 2,
            actual: n as usize,
        }),
        Planarity::Nonplanar => Ok(2.0 * m / (n * (n - 1.0))),
    }
}

/// Mean shortest-path distance from each node to every other node.
pub fn closeness(g: &SpatialGraph, mode: &DistanceMode) -> Result<BTreeMap<String, f64>> {
    let tables = connected_tables(g, mode)?;
    Ok(by_id(g, closeness_values(&tables)))
}

pub fn betweenness(g: &SpatialGraph, mode: &DistanceMode) -> Result<BTreeMap<String, f64>> {
    let tables = connected_tables(g, mode)?;
    Ok(by_id(g, betweenness_values(g, &tables)))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteringOptions {
    /// Leave nodes with degree < 2 out of the average instead of counting them as 0.
    pub exclude_low_degree: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub local: BTreeMap<String, f64>,
    /// `3 * triangles / connected triplets`.
    pub global: f64,
    pub average: f64,
}

pub fn clustering(g: &SpatialGraph, options: ClusteringOptions) -> Clustering {
    let triangles = triangles_per_node(g);
    let local = local_clustering(g, &triangles);
    let total_triangles: usize = triangles.iter().sum::<usize>() / 3;
    let triplets: usize = g
        .degrees()
        .iter()
        .map(|&k| k * k.saturating_sub(1) / 2)
        .sum();
    let global = if triplets == 0 {
        0.0
    } else {
        3.0 * total_triangles as f64 / triplets as f64
    };
    let average = average_local(g, &local, options);
    Clustering {
        local: by_id(g, local),
        global,
        average,
    }
}

/// ⟨C⟩ with low-degree nodes counted as zero.
pub fn average_clustering(g: &SpatialGraph) -> f64 {
    let local = local_clustering(g, &triangles_per_node(g));
    average_local(g, &local, ClusteringOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub mean: f64,
    pub diameter: f64,
}

pub fn path_length_and_diameter(g: &SpatialGraph, mode: &DistanceMode) -> Result<PathStats> {
    let tables = connected_tables(g, mode)?;
    Ok(path_stats(&tables))
}

/// Mean over destinations of straight-line (great-circle) over route distance.
pub fn straightness(g: &SpatialGraph) -> Result<BTreeMap<String, f64>> {
    require_coordinates(g)?;
    let tables = connected_tables(g, &DistanceMode::Km)?;
    Ok(by_id(g, straightness_values(g, &tables)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborStats {
    pub degree: BTreeMap<String, f64>,
    pub strength_km: BTreeMap<String, f64>,
    pub mean_degree: f64,
    pub mean_strength_km: f64,
}

pub fn avg_nearest_neighbor(g: &SpatialGraph) -> Result<NeighborStats> {
    let (degree, strength) = neighbor_values(g)?;
    let n = g.node_count() as f64;
    Ok(NeighborStats {
        mean_degree: degree.iter().sum::<f64>() / n,
        mean_strength_km: strength.iter().sum::<f64>() / n,
        degree: by_id(g, degree),
        strength_km: by_id(g, strength),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MeasureOptions {
    pub clustering: ClusteringOptions,
    /// Also compute travel-time closeness and path statistics for this epoch.
    pub epoch: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeMeasures {
    pub degree: usize,
    pub strength_km: f64,
    pub closeness: f64,
    pub closeness_km: f64,
    pub closeness_time: Option<f64>,
    pub betweenness: f64,
    pub clustering: f64,
    /// Absent when the graph has no coordinates.
    pub straightness: Option<f64>,
    pub avg_neighbor_degree: f64,
    pub avg_neighbor_strength_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlobalMeasures {
    pub n: usize,
    pub m: usize,
    pub components: usize,
    pub self_loops: usize,
    pub isolated_nodes: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    pub mean_degree: f64,
    pub mean_strength_km: f64,
    pub mean_neighbor_degree: f64,
    pub mean_neighbor_strength_km: f64,
    pub density_planar: Option<f64>,
    pub density_nonplanar: f64,
    pub mean_path_length: f64,
    pub mean_path_length_km: f64,
    pub diameter_binary: f64,
    pub diameter_km: f64,
    pub clustering_global: f64,
    pub clustering_average: f64,
    pub total_edge_length_km: f64,
    pub mean_edge_length_km: f64,
    pub epoch: Option<String>,
    pub mean_path_length_time: Option<f64>,
    pub diameter_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureReport {
    pub per_node: BTreeMap<String, NodeMeasures>,
    pub global: GlobalMeasures,
}

/// Every measure for one connected graph snapshot.
pub fn measure_report(g: &SpatialGraph, options: &MeasureOptions) -> Result<MeasureReport> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::TooFewNodes {
            required: 2,
            actual: n,
        });
    }
    let binary = connected_tables(g, &DistanceMode::Binary)?;
    let km = connected_tables(g, &DistanceMode::Km)?;
    let time = match &options.epoch {
        Some(epoch) => Some(connected_tables(g, &DistanceMode::Time(epoch.clone()))?),
        None => None,
    };

    let degrees = g.degrees();
    let strength = strengths(g);
    let closeness_bin = closeness_values(&binary);
    let closeness_km = closeness_values(&km);
    let closeness_time = time.as_ref().map(|t| closeness_values(t));
    let between = betweenness_values(g, &binary);
    let triangles = triangles_per_node(g);
    let local = local_clustering(g, &triangles);
    let straight = g
        .nodes()
        .iter()
        .all(|node| node.position.is_some())
        .then(|| straightness_values(g, &km));
    let (nb_degree, nb_strength) = neighbor_values(g)?;

    let per_node = (0..n)
        .map(|i| {
            (
                g.id(i).to_string(),
                NodeMeasures {
                    degree: degrees[i],
                    strength_km: strength[i],
                    closeness: closeness_bin[i],
                    closeness_km: closeness_km[i],
                    closeness_time: closeness_time.as_ref().map(|c| c[i]),
                    betweenness: between[i],
                    clustering: local[i],
                    straightness: straight.as_ref().map(|s| s[i]),
                    avg_neighbor_degree: nb_degree[i],
                    avg_neighbor_strength_km: nb_strength[i],
                },
            )
        })
        .collect();

    let clustering = clustering(g, options.clustering);
    let bin_stats = path_stats(&binary);
    let km_stats = path_stats(&km);
    let time_stats = time.as_ref().map(|t| path_stats(t));
    let total_km: f64 = g.edges().iter().map(|e| e.distance_km).sum();
    let m = g.edge_count();
    let nf = n as f64;
    let global = GlobalMeasures {
        n,
        m,
        components: g.component_count(),
        self_loops: 0,
        isolated_nodes: degrees.iter().filter(|&&k| k == 0).count(),
        min_degree: degrees.iter().copied().min().unwrap_or(0),
        max_degree: degrees.iter().copied().max().unwrap_or(0),
        mean_degree: 2.0 * m as f64 / nf,
        mean_strength_km: strength.iter().sum::<f64>() / nf,
        mean_neighbor_degree: nb_degree.iter().sum::<f64>() / nf,
        mean_neighbor_strength_km: nb_strength.iter().sum::<f64>() / nf,
        density_planar: density(g, Planarity::Planar).ok(),
        density_nonplanar: density(g, Planarity::Nonplanar)?,
        mean_path_length: bin_stats.mean,
        mean_path_length_km: km_stats.mean,
        diameter_binary: bin_stats.diameter,
        diameter_km: km_stats.diameter,
        clustering_global: clustering.global,
        clustering_average: clustering.average,
        total_edge_length_km: total_km,
        mean_edge_length_km: if m == 0 { 0.0 } else { total_km / m as f64 },
        epoch: options.epoch.clone(),
        mean_path_length_time: time_stats.map(|s| s.mean),
        diameter_time: time_stats.map(|s| s.diameter),
    };
    Ok(MeasureReport { per_node, global })
}

// ---- index-based helpers ----

pub(crate) fn by_id<T>(g: &SpatialGraph, values: Vec<T>) -> BTreeMap<String, T> {
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| (g.id(i).to_string(), v))
        .collect()
}

pub(crate) fn strengths(g: &SpatialGraph) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| {
            g.neighbors(i)
                .iter()
                .map(|a| g.edges()[a.edge].distance_km)
                .sum()
        })
        .collect()
}

/// All-pairs tables, failing unless every pair is reachable under `mode`.
pub(crate) fn connected_tables(
    g: &SpatialGraph,
    mode: &DistanceMode,
) -> Result<Vec<ShortestPaths>> {
    g.require_connected()?;
    let tables = g.all_shortest_paths(mode)?;
    // Time mode can cut edges that lack the epoch.
    if tables
        .iter()
        .any(|t| t.distances().iter().any(Option::is_none))
    {
        return Err(Error::Disconnected { components: 2 });
    }
    Ok(tables)
}

fn closeness_values(tables: &[ShortestPaths]) -> Vec<f64> {
    let n = tables.len();
    if n < 2 {
        return vec![0.0; n];
    }
    tables
        .iter()
        .map(|t| t.distances().iter().flatten().sum::<f64>() / (n - 1) as f64)
        .collect()
}

/// Brandes dependency accumulation over the per-source tables.
pub(crate) fn betweenness_values(g: &SpatialGraph, tables: &[ShortestPaths]) -> Vec<f64> {
    let n = g.node_count();
    let mut total = vec![0.0; n];
    let mut delta = vec![0.0; n];
    for table in tables {
        delta.iter_mut().for_each(|d| *d = 0.0);
        for &w in table.settled_order().iter().rev() {
            let coeff = (1.0 + delta[w]) / table.path_count(w);
            for &v in table.predecessors(w) {
                delta[v] += table.path_count(v) * coeff;
            }
            if w != table.source() {
                total[w] += delta[w];
            }
        }
    }
    if n < 3 {
        return vec![0.0; n];
    }
    // Each unordered pair was seen from both endpoints.
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    total.into_iter().map(|b| b / 2.0 / pairs).collect()
}

fn triangles_per_node(g: &SpatialGraph) -> Vec<usize> {
    let n = g.node_count();
    let mut mark = vec![usize::MAX; n];
    (0..n)
        .map(|i| {
            for a in g.neighbors(i) {
                mark[a.node] = i;
            }
            let mut links = 0;
            for a in g.neighbors(i) {
                links += g
                    .neighbors(a.node)
                    .iter()
                    .filter(|b| mark[b.node] == i)
                    .count();
            }
            links / 2
        })
        .collect()
}

pub(crate) fn local_clustering_values(g: &SpatialGraph) -> Vec<f64> {
    local_clustering(g, &triangles_per_node(g))
}

fn local_clustering(g: &SpatialGraph, triangles: &[usize]) -> Vec<f64> {
    (0..g.node_count())
        .map(|i| {
            let k = g.degree(i);
            if k < 2 {
                0.0
            } else {
                2.0 * triangles[i] as f64 / (k * (k - 1)) as f64
            }
        })
        .collect()
}

fn average_local(g: &SpatialGraph, local: &[f64], options: ClusteringOptions) -> f64 {
    let included: Vec<f64> = local
        .iter()
        .enumerate()
        .filter(|&(i, _)| !options.exclude_low_degree || g.degree(i) >= 2)
        .map(|(_, &c)| c)
        .collect();
    if included.is_empty() {
        0.0
    } else {
        included.iter().sum::<f64>() / included.len() as f64
    }
}

pub(crate) fn path_stats(tables: &[ShortestPaths]) -> PathStats {
    let n = tables.len();
    let mut sum = 0.0;
    let mut diameter: f64 = 0.0;
    for t in tables {
        for d in t.distances().iter().flatten() {
            sum += d;
            diameter = diameter.max(*d);
        }
    }
    let mean = if n < 2 {
        0.0
    } else {
        sum / (n * (n - 1)) as f64
    };
    PathStats { mean, diameter }
}

fn require_coordinates(g: &SpatialGraph) -> Result<()> {
    match g.nodes().iter().find(|node| node.position.is_none()) {
        Some(node) => Err(Error::MissingCoordinates(node.id.clone())),
        None => Ok(()),
    }
}

fn straightness_values(g: &SpatialGraph, km: &[ShortestPaths]) -> Vec<f64> {
    let n = g.node_count();
    if n < 2 {
        return vec![0.0; n];
    }
    let pos: Vec<_> = g
        .nodes()
        .iter()
        .map(|node| node.position.expect("checked"))
        .collect();
    km.iter()
        .enumerate()
        .map(|(i, table)| {
            let sum: f64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let route = table.distance(j).expect("connected");
                    pos[i].haversine_km(&pos[j]) / route
                })
                .sum();
            sum / (n - 1) as f64
        })
        .collect()
}

fn neighbor_values(g: &SpatialGraph) -> Result<(Vec<f64>, Vec<f64>)> {
    let strength = strengths(g);
    let mut degree_mean = Vec::with_capacity(g.node_count());
    let mut strength_mean = Vec::with_capacity(g.node_count());
    for i in 0..g.node_count() {
        let nbrs = g.neighbors(i);
        if nbrs.is_empty() {
            return Err(Error::IsolatedNode(g.id(i).to_string()));
        }
        let k = nbrs.len() as f64;
        degree_mean.push(nbrs.iter().map(|a| g.degree(a.node) as f64).sum::<f64>() / k);
        strength_mean.push(nbrs.iter().map(|a| strength[a.node]).sum::<f64>() / k);
    }
    Ok((degree_mean, strength_mean))
}
