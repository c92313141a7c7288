// SPDX-License-Identifier: Apache-2.0

//! Modularity and multi-level greedy community detection (Louvain).

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SpatialGraph;

/// Gains below this are treated as no improvement.
const MIN_GAIN: f64 = 1e-12;
const MAX_PASSES: usize = 1000;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeWeighting {
    #[default]
    Unweighted,
    Km,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommunityPartition {
    pub assignment: BTreeMap<String, usize>,
    pub q: f64,
    pub community_count: usize,
    /// Assignment of the original nodes after each aggregation level.
    pub levels: Vec<BTreeMap<String, usize>>,
    pub seed: u64,
    pub weighting: EdgeWeighting,
}

/// `Q = (1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(g_i, g_j)` over ordered pairs.
pub fn modularity(
    g: &SpatialGraph,
    assignment: &BTreeMap<String, usize>,
    weighting: EdgeWeighting,
) -> Result<f64> {
    let labels = g
        .nodes()
        .iter()
        .map(|node| {
            assignment
                .get(&node.id)
                .copied()
                .ok_or_else(|| Error::IncompleteAssignment(node.id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(modularity_of_labels(
        &WeightedGraph::from_spatial(g, weighting),
        &labels,
    ))
}

/// Louvain optimization; the node visit order at every level is shuffled by `seed`.
pub fn find_communities(
    g: &SpatialGraph,
    seed: u64,
    weighting: EdgeWeighting,
) -> Result<CommunityPartition> {
    let base = WeightedGraph::from_spatial(g, weighting);
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut levels = Vec::new();
    let mut current = base.clone();

    loop {
        let (labels, moved) = local_moves(&current, &mut rng);
        if !moved {
            break;
        }
        let (renumbered, count) = renumber(&labels);
        for m in membership.iter_mut() {
            *m = renumbered[*m];
        }
        levels.push(membership.clone());
        if count == current.len() {
            break;
        }
        current = current.aggregate(&renumbered, count);
    }

    let mut labels = renumber(&membership).0;
    let mut q = modularity_of_labels(&base, &labels);
    if q < 0.0 {
        labels = vec![0; n];
        q = 0.0;
    }
    let to_map = |labels: &[usize]| -> BTreeMap<String, usize> {
        let (canon, _) = renumber(labels);
        canon
            .into_iter()
            .enumerate()
            .map(|(i, c)| (g.id(i).to_string(), c))
            .collect()
    };
    Ok(CommunityPartition {
        community_count: labels.iter().copied().max().map_or(0, |c| c + 1),
        assignment: to_map(&labels),
        q,
        levels: levels.iter().map(|l| to_map(l)).collect(),
        seed,
        weighting,
    })
}

/// Undirected weighted graph where `loops[i]` holds `A_ii` (twice the weight
/// absorbed inside an aggregated node).
#[derive(Debug, Clone)]
struct WeightedGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    loops: Vec<f64>,
    degree: Vec<f64>,
    total: f64,
}

impl WeightedGraph {
    fn from_spatial(g: &SpatialGraph, weighting: EdgeWeighting) -> Self {
        let n = g.node_count();
        let mut adjacency = vec![Vec::new(); n];
        for (e, &(a, b)) in g.endpoints().iter().enumerate() {
            let w = match weighting {
                EdgeWeighting::Unweighted => 1.0,
                EdgeWeighting::Km => g.edges()[e].distance_km,
            };
            adjacency[a].push((b, w));
            adjacency[b].push((a, w));
        }
        Self::new(adjacency, vec![0.0; n])
    }

    fn new(adjacency: Vec<Vec<(usize, f64)>>, loops: Vec<f64>) -> Self {
        let degree: Vec<f64> = adjacency
            .iter()
            .zip(&loops)
            .map(|(nbrs, l)| nbrs.iter().map(|&(_, w)| w).sum::<f64>() + l)
            .collect();
        let total = degree.iter().sum();
        Self {
            adjacency,
            loops,
            degree,
            total,
        }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    fn aggregate(&self, labels: &[usize], count: usize) -> Self {
        let mut loops = vec![0.0; count];
        let mut merged: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); count];
        for (i, nbrs) in self.adjacency.iter().enumerate() {
            let ci = labels[i];
            loops[ci] += self.loops[i];
            for &(j, w) in nbrs {
                let cj = labels[j];
                if ci == cj {
                    loops[ci] += w;
                } else {
                    *merged[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let adjacency = merged
            .into_iter()
            .map(|m| m.into_iter().collect())
            .collect();
        Self::new(adjacency, loops)
    }
}

fn modularity_of_labels(g: &WeightedGraph, labels: &[usize]) -> f64 {
    if g.total == 0.0 {
        return 0.0;
    }
    let mut inside: HashMap<usize, f64> = HashMap::new();
    let mut tot: HashMap<usize, f64> = HashMap::new();
    for i in 0..g.len() {
        let c = labels[i];
        *tot.entry(c).or_insert(0.0) += g.degree[i];
        let within: f64 = g.adjacency[i]
            .iter()
            .filter(|&&(j, _)| labels[j] == c)
            .map(|&(_, w)| w)
            .sum();
        *inside.entry(c).or_insert(0.0) += within + g.loops[i];
    }
    let mut communities: Vec<usize> = tot.keys().copied().collect();
    communities.sort_unstable();
    communities
        .into_iter()
        .map(|c| inside.get(&c).copied().unwrap_or(0.0) / g.total - (tot[&c] / g.total).powi(2))
        .sum()
}

/// One level of local moving. Returns labels and whether any move strictly
/// improved modularity.
fn local_moves(g: &WeightedGraph, rng: &mut ChaCha8Rng) -> (Vec<usize>, bool) {
    let n = g.len();
    let mut labels: Vec<usize> = (0..n).collect();
    if g.total == 0.0 {
        return (labels, false);
    }
    let mut tot = g.degree.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut improved_any = false;
    let mut links: BTreeMap<usize, f64> = BTreeMap::new();

    for _ in 0..MAX_PASSES {
        let mut improved = false;
        for &i in &order {
            let own = labels[i];
            let k = g.degree[i];
            links.clear();
            links.insert(own, 0.0);
            for &(j, w) in &g.adjacency[i] {
                *links.entry(labels[j]).or_insert(0.0) += w;
            }
            tot[own] -= k;
            let gain = |c: usize, k_in: f64| k_in - tot[c] * k / g.total;
            let stay = gain(own, links[&own]);
            // BTreeMap iterates labels ascending, so the lowest label wins ties.
            let (mut best, mut best_gain) = (own, f64::NEG_INFINITY);
            for (&c, &k_in) in &links {
                let value = gain(c, k_in);
                if value > best_gain + MIN_GAIN {
                    best = c;
                    best_gain = value;
                }
            }
            if best_gain <= stay + MIN_GAIN {
                // Equal gain: still prefer the lowest label, without counting it as progress.
                if best > own {
                    best = own;
                }
            } else {
                improved = true;
            }
            tot[best] += k;
            labels[i] = best;
        }
        if !improved {
            break;
        }
        improved_any = true;
    }
    (labels, improved_any)
}

/// Relabels communities 0.. in order of first appearance.
fn renumber(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut map = HashMap::new();
    let out = labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect();
    (out, map.len())
}
