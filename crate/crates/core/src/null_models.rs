// SPDX-License-Identifier: Apache-2.0

//! Degree-preserving null models built from double-edge swaps.
//!
//! A swap takes edges `(a, b)` and `(c, d)` and rewires them to `(a, d)` and
//! `(c, b)`. Swaps that would create a self-loop, a multi-edge or a
//! disconnected graph are rejected. Randomization accepts every other swap;
//! latticeization additionally requires that the swap does not increase the
//! ring-index cost `sum over edges of min(|p(u) - p(v)|, n - |p(u) - p(v)|)`
//! for a fixed ring position `p` of every node.

use std::collections::{HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceMode, SpatialGraph};
use crate::measures::{average_clustering, connected_tables, path_stats};

pub const DEFAULT_SWAPS_PER_EDGE: usize = 10;
pub const DEFAULT_REPLICATES: usize = 20;
/// Attempt budget as a multiple of the requested accepted swaps.
pub const ATTEMPTS_PER_SWAP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NullKind {
    Random,
    Lattice,
}

/// How nodes are placed on the ring used by the lattice cost.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LatticeOrdering {
    #[default]
    Ingestion,
    Longitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NullModelParams {
    pub seed: u64,
    pub swaps_per_edge: usize,
    pub replicates: usize,
    pub ordering: LatticeOrdering,
}

impl NullModelParams {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            swaps_per_edge: DEFAULT_SWAPS_PER_EDGE,
            replicates: DEFAULT_REPLICATES,
            ordering: LatticeOrdering::Ingestion,
        }
    }

    pub fn with_swaps_per_edge(mut self, swaps: usize) -> Self {
        self.swaps_per_edge = swaps;
        self
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_ordering(mut self, ordering: LatticeOrdering) -> Self {
        self.ordering = ordering;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleStats {
    pub mean_path_length: f64,
    pub mean_clustering: f64,
    pub path_lengths: Vec<f64>,
    pub clusterings: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct NullModelEnsemble {
    pub kind: NullKind,
    pub seed: u64,
    pub swaps_per_edge: usize,
    /// Ring ordering, for lattice ensembles only.
    pub ordering: Option<LatticeOrdering>,
    pub replicates: Vec<SpatialGraph>,
    pub swaps_accepted: Vec<usize>,
    pub stats: EnsembleStats,
}

pub fn randomize(g: &SpatialGraph, params: &NullModelParams) -> Result<NullModelEnsemble> {
    build_ensemble(g, params, NullKind::Random)
}

pub fn latticeize(g: &SpatialGraph, params: &NullModelParams) -> Result<NullModelEnsemble> {
    build_ensemble(g, params, NullKind::Lattice)
}

/// Ring-index cost of `g` under the given ordering.
pub fn ring_cost(g: &SpatialGraph, ordering: LatticeOrdering) -> Result<u64> {
    let ring = Ring::new(g, ordering)?;
    Ok(g.endpoints().iter().map(|&(a, b)| ring.cost(a, b)).sum())
}

/// Seed for replicate `index` of an ensemble seeded with `seed`.
pub fn replicate_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

fn build_ensemble(
    g: &SpatialGraph,
    params: &NullModelParams,
    kind: NullKind,
) -> Result<NullModelEnsemble> {
    g.require_connected()?;
    if g.edge_count() < 2 {
        return Err(Error::TooFewEdges {
            required: 2,
            actual: g.edge_count(),
        });
    }
    if params.replicates == 0 {
        return Err(Error::Config("replicate count must be at least 1".into()));
    }
    let ring = match kind {
        NullKind::Lattice => Some(Ring::new(g, params.ordering)?),
        NullKind::Random => None,
    };

    let built: Vec<(SpatialGraph, usize)> = (0..params.replicates)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(params.seed, r));
            let mut state = SwapState::new(g);
            let accepted = state.run(&mut rng, params.swaps_per_edge, ring.as_ref(), r)?;
            Ok((g.rewired(&state.edges)?, accepted))
        })
        .collect::<Result<_>>()?;

    let mut path_lengths = Vec::with_capacity(built.len());
    let mut clusterings = Vec::with_capacity(built.len());
    for (replicate, _) in &built {
        let tables = connected_tables(replicate, &DistanceMode::Binary)?;
        path_lengths.push(path_stats(&tables).mean);
        clusterings.push(average_clustering(replicate));
    }
    let count = built.len() as f64;
    let stats = EnsembleStats {
        mean_path_length: path_lengths.iter().sum::<f64>() / count,
        mean_clustering: clusterings.iter().sum::<f64>() / count,
        path_lengths,
        clusterings,
    };
    let (replicates, swaps_accepted) = built.into_iter().unzip();
    Ok(NullModelEnsemble {
        kind,
        seed: params.seed,
        swaps_per_edge: params.swaps_per_edge,
        ordering: ring.map(|_| params.ordering),
        replicates,
        swaps_accepted,
        stats,
    })
}

struct Ring {
    position: Vec<usize>,
}

impl Ring {
    fn new(g: &SpatialGraph, ordering: LatticeOrdering) -> Result<Self> {
        let n = g.node_count();
        let mut order: Vec<usize> = (0..n).collect();
        if ordering == LatticeOrdering::Longitude {
            let mut lon = Vec::with_capacity(n);
            for node in g.nodes() {
                let p = node
                    .position
                    .ok_or_else(|| Error::MissingCoordinates(node.id.clone()))?;
                lon.push(p.lon);
            }
            order.sort_by(|&a, &b| lon[a].total_cmp(&lon[b]).then(a.cmp(&b)));
        }
        let mut position = vec![0; n];
        for (pos, &node) in order.iter().enumerate() {
            position[node] = pos;
        }
        Ok(Self { position })
    }

    fn cost(&self, a: usize, b: usize) -> u64 {
        let n = self.position.len();
        let gap = self.position[a].abs_diff(self.position[b]);
        gap.min(n - gap) as u64
    }
}

#[derive(Clone, Copy)]
struct Swap {
    first: usize,
    second: usize,
    new_first: (usize, usize),
    new_second: (usize, usize),
}

struct SwapState {
    edges: Vec<(usize, usize)>,
    present: HashSet<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl SwapState {
    fn new(g: &SpatialGraph) -> Self {
        let edges = g.endpoints().to_vec();
        let present = edges.iter().map(|&(a, b)| key(a, b)).collect();
        let mut adjacency = vec![Vec::new(); g.node_count()];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Self {
            edges,
            present,
            adjacency,
        }
    }

    fn run(
        &mut self,
        rng: &mut ChaCha8Rng,
        swaps_per_edge: usize,
        ring: Option<&Ring>,
        replicate: usize,
    ) -> Result<usize> {
        let m = self.edges.len();
        let requested = swaps_per_edge * m;
        let budget = requested * ATTEMPTS_PER_SWAP;
        let mut accepted = 0;
        let mut attempts = 0;
        while accepted < requested && attempts < budget {
            attempts += 1;
            let first = rng.random_range(0..m);
            let mut second = rng.random_range(0..m - 1);
            if second >= first {
                second += 1;
            }
            let flip = rng.random_bool(0.5);
            let Some(swap) = self.candidate(first, second, flip) else {
                continue;
            };
            if ring.is_some_and(|ring| self.cost_change(&swap, ring) > 0) {
                continue;
            }
            if self.try_apply(swap) {
                accepted += 1;
            }
        }
        if accepted == requested {
            return Ok(accepted);
        }
        match ring {
            // Budget spent: randomization may only stop early when no valid
            // swap remains at all.
            None => match self.find_swap(None) {
                Some(_) => Err(Error::SwapBudgetExhausted {
                    replicate,
                    accepted,
                    requested,
                    attempts,
                }),
                None => Ok(accepted),
            },
            // Lattice descent finishes at a local minimum of the ring cost.
            Some(ring) => {
                while let Some(swap) = self.find_swap(Some(ring)) {
                    self.apply(swap);
                    accepted += 1;
                }
                Ok(accepted)
            }
        }
    }

    /// Rewiring of edges `first`, `second` that keeps the graph simple.
    fn candidate(&self, first: usize, second: usize, flip: bool) -> Option<Swap> {
        let (a, b) = self.edges[first];
        let (mut c, mut d) = self.edges[second];
        if flip {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d
            || c == b
            || self.present.contains(&key(a, d))
            || self.present.contains(&key(c, b))
        {
            return None;
        }
        Some(Swap {
            first,
            second,
            new_first: (a, d),
            new_second: (c, b),
        })
    }

    fn cost_change(&self, swap: &Swap, ring: &Ring) -> i64 {
        let (a, b) = self.edges[swap.first];
        let (c, d) = self.edges[swap.second];
        let before = ring.cost(a, b) + ring.cost(c, d);
        let after = ring.cost(swap.new_first.0, swap.new_first.1)
            + ring.cost(swap.new_second.0, swap.new_second.1);
        after as i64 - before as i64
    }

    /// Applies the swap and returns the inverse swap.
    fn apply(&mut self, swap: Swap) -> Swap {
        let inverse = Swap {
            new_first: self.edges[swap.first],
            new_second: self.edges[swap.second],
            ..swap
        };
        for idx in [swap.first, swap.second] {
            let (a, b) = self.edges[idx];
            self.present.remove(&key(a, b));
            remove_neighbor(&mut self.adjacency[a], b);
            remove_neighbor(&mut self.adjacency[b], a);
        }
        for (idx, (a, b)) in [(swap.first, swap.new_first), (swap.second, swap.new_second)] {
            self.edges[idx] = (a, b);
            self.present.insert(key(a, b));
            self.adjacency[a].push(b);
            self.adjacency[b].push(a);
        }
        inverse
    }

    /// Applies the swap if the graph stays connected.
    fn try_apply(&mut self, swap: Swap) -> bool {
        let inverse = self.apply(swap);
        if self.is_connected() {
            true
        } else {
            self.apply(inverse);
            false
        }
    }

    /// First valid swap in edge order; with a ring, only strictly improving ones.
    fn find_swap(&mut self, ring: Option<&Ring>) -> Option<Swap> {
        let m = self.edges.len();
        for first in 0..m {
            for second in first + 1..m {
                for flip in [false, true] {
                    let Some(swap) = self.candidate(first, second, flip) else {
                        continue;
                    };
                    if ring.is_some_and(|ring| self.cost_change(&swap, ring) >= 0) {
                        continue;
                    }
                    let inverse = self.apply(swap);
                    let connected = self.is_connected();
                    self.apply(inverse);
                    if connected {
                        return Some(swap);
                    }
                }
            }
        }
        None
    }

    fn is_connected(&self) -> bool {
        let n = self.adjacency.len();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == n
    }
}

fn remove_neighbor(list: &mut Vec<usize>, target: usize) {
    if let Some(pos) = list.iter().position(|&x| x == target) {
        list.swap_remove(pos);
    }
}
