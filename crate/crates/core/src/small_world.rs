// SPDX-License-Identifier: Apache-2.0

//! Omega small-world index: `ω = ⟨l⟩_rand / ⟨l⟩ − ⟨C⟩ / ⟨C⟩_latt`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceMode, SpatialGraph};
use crate::measures::{average_clustering, connected_tables, path_stats};
use crate::null_models::NullModelEnsemble;

pub const DEFAULT_THRESHOLD: f64 = 0.3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    LatticeLike,
    SmallWorld,
    RandomLike,
}

impl Topology {
    /// `|ω| <= θ` is small-world; the sign decides otherwise.
    pub fn classify(omega: f64, threshold: f64) -> Self {
        if omega < -threshold {
            Topology::LatticeLike
        } else if omega > threshold {
            Topology::RandomLike
        } else {
            Topology::SmallWorld
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaResult {
    pub l_emp: f64,
    pub c_emp: f64,
    pub l_rand: f64,
    pub c_latt: f64,
    pub omega: f64,
    /// Set when ω falls outside `[-1, 1]`; the value itself is never clamped.
    pub out_of_range: bool,
    pub classification: Topology,
    pub threshold: f64,
    /// ω from replicate `i` of each ensemble, when computed from ensembles.
    pub per_replicate: Vec<f64>,
}

/// ω from the four averaged quantities.
pub fn omega_from_values(
    l_emp: f64,
    c_emp: f64,
    l_rand: f64,
    c_latt: f64,
    threshold: f64,
) -> Result<OmegaResult> {
    let omega = omega_value(l_emp, c_emp, l_rand, c_latt)?;
    Ok(OmegaResult {
        l_emp,
        c_emp,
        l_rand,
        c_latt,
        omega,
        out_of_range: !(-1.0..=1.0).contains(&omega),
        classification: Topology::classify(omega, threshold),
        threshold,
        per_replicate: Vec::new(),
    })
}

/// ω of `g` against its randomized and latticeized ensembles (ensemble means).
pub fn omega(
    g: &SpatialGraph,
    random: &NullModelEnsemble,
    lattice: &NullModelEnsemble,
    threshold: f64,
) -> Result<OmegaResult> {
    let l_emp = path_stats(&connected_tables(g, &DistanceMode::Binary)?).mean;
    let c_emp = average_clustering(g);
    let mut result = omega_from_values(
        l_emp,
        c_emp,
        random.stats.mean_path_length,
        lattice.stats.mean_clustering,
        threshold,
    )?;
    result.per_replicate = random
        .stats
        .path_lengths
        .iter()
        .zip(&lattice.stats.clusterings)
        .filter_map(|(&l_rand, &c_latt)| omega_value(l_emp, c_emp, l_rand, c_latt).ok())
        .collect();
    Ok(result)
}

fn omega_value(l_emp: f64, c_emp: f64, l_rand: f64, c_latt: f64) -> Result<f64> {
    if c_latt == 0.0 {
        return Err(Error::ZeroClustering("lattice clustering"));
    }
    if l_emp == 0.0 {
        return Err(Error::ZeroPathLength);
    }
    Ok(l_rand / l_emp - c_emp / c_latt)
}
