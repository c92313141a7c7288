// SPDX-License-Identifier: Apache-2.0

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SpatialGraph;
use crate::error::{Error, Result};

/// Relative tolerance under which two weighted path costs count as equal.
const TIE_TOLERANCE: f64 = 1e-9;

/// Edge cost used by shortest-path searches.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMode {
    /// Every edge costs 1.
    Binary,
    Km,
    /// Travel minutes for one epoch; edges without that epoch are impassable.
    Time(String),
}

/// Single-source shortest-path table with path counts and predecessor lists.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    source: usize,
    dist: Vec<Option<f64>>,
    sigma: Vec<f64>,
    preds: Vec<Vec<usize>>,
    order: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathEntry {
    /// `None` when the target is unreachable.
    pub distance: Option<f64>,
    pub path_count: f64,
}

impl ShortestPaths {
    pub fn source(&self) -> usize {
        self.source
    }

    /// `None` means unreachable.
    pub fn distance(&self, target: usize) -> Option<f64> {
        self.dist[target]
    }

    /// Number of distinct shortest paths from the source (σ_st).
    pub fn path_count(&self, target: usize) -> f64 {
        self.sigma[target]
    }

    pub fn predecessors(&self, target: usize) -> &[usize] {
        &self.preds[target]
    }

    /// Reachable nodes in non-decreasing distance order, source first.
    pub fn settled_order(&self) -> &[usize] {
        &self.order
    }

    pub fn distances(&self) -> &[Option<f64>] {
        &self.dist
    }

    /// Per-target table keyed by node id.
    pub fn table(&self, g: &SpatialGraph) -> BTreeMap<String, PathEntry> {
        (0..g.node_count())
            .map(|t| {
                (
                    g.id(t).to_string(),
                    PathEntry {
                        distance: self.dist[t],
                        path_count: self.sigma[t],
                    },
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Frontier {
    cost: f64,
    node: usize,
}

impl Eq for Frontier {}

impl Ord for Frontier {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Frontier {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl SpatialGraph {
    pub fn shortest_paths(&self, source: &str, mode: &DistanceMode) -> Result<ShortestPaths> {
        let s = self.require_index(source)?;
        self.check_mode(mode)?;
        Ok(self.paths_from(s, mode))
    }

    /// One table per source, in node order.
    pub fn all_shortest_paths(&self, mode: &DistanceMode) -> Result<Vec<ShortestPaths>> {
        self.check_mode(mode)?;
        Ok((0..self.node_count())
            .into_par_iter()
            .map(|s| self.paths_from(s, mode))
            .collect())
    }

    pub(crate) fn check_mode(&self, mode: &DistanceMode) -> Result<()> {
        match mode {
            DistanceMode::Time(epoch) if !self.epochs.contains(epoch) => {
                Err(Error::UnknownEpoch(epoch.clone()))
            }
            _ => Ok(()),
        }
    }

    pub(crate) fn edge_cost(&self, edge: usize, mode: &DistanceMode) -> Option<f64> {
        match mode {
            DistanceMode::Binary => Some(1.0),
            DistanceMode::Km => Some(self.edges[edge].distance_km),
            DistanceMode::Time(epoch) => self.edges[edge].time_min.get(epoch).copied(),
        }
    }

    pub(crate) fn paths_from(&self, source: usize, mode: &DistanceMode) -> ShortestPaths {
        match mode {
            DistanceMode::Binary => self.bfs(source),
            _ => self.dijkstra(source, mode),
        }
    }

    fn bfs(&self, source: usize) -> ShortestPaths {
        let n = self.node_count();
        let mut hops = vec![usize::MAX; n];
        let mut sigma = vec![0.0; n];
        let mut preds = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::new();
        hops[source] = 0;
        sigma[source] = 1.0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for adj in self.neighbors(v) {
                let w = adj.node;
                if hops[w] == usize::MAX {
                    hops[w] = hops[v] + 1;
                    queue.push_back(w);
                }
                if hops[w] == hops[v] + 1 {
                    sigma[w] += sigma[v];
                    preds[w].push(v);
                }
            }
        }
        let dist = hops
            .into_iter()
            .map(|h| (h != usize::MAX).then_some(h as f64))
            .collect();
        ShortestPaths {
            source,
            dist,
            sigma,
            preds,
            order,
        }
    }

    fn dijkstra(&self, source: usize, mode: &DistanceMode) -> ShortestPaths {
        let n = self.node_count();
        let mut dist: Vec<Option<f64>> = vec![None; n];
        let mut settled = vec![false; n];
        let mut sigma = vec![0.0; n];
        let mut preds = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        let mut heap = BinaryHeap::new();
        dist[source] = Some(0.0);
        sigma[source] = 1.0;
        heap.push(Frontier {
            cost: 0.0,
            node: source,
        });
        while let Some(Frontier { cost, node: v }) = heap.pop() {
            if settled[v] || dist[v].is_some_and(|d| cost > d) {
                continue;
            }
            settled[v] = true;
            order.push(v);
            for adj in self.neighbors(v) {
                let w = adj.node;
                if settled[w] {
                    continue;
                }
                let Some(c) = self.edge_cost(adj.edge, mode) else {
                    continue;
                };
                let candidate = cost + c;
                match dist[w] {
                    Some(d) if (candidate - d).abs() <= TIE_TOLERANCE * d.max(1.0) => {
                        sigma[w] += sigma[v];
                        preds[w].push(v);
                    }
                    Some(d) if candidate > d => {}
                    _ => {
                        dist[w] = Some(candidate);
                        sigma[w] = sigma[v];
                        preds[w].clear();
                        preds[w].push(v);
                        heap.push(Frontier {
                            cost: candidate,
                            node: w,
                        });
                    }
                }
            }
        }
        ShortestPaths {
            source,
            dist,
            sigma,
            preds,
            order,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{EdgeRecord, NodeRecord};

    fn triangle_km() -> SpatialGraph {
        SpatialGraph::build(
            vec![
                NodeRecord::new("a"),
                NodeRecord::new("b"),
                NodeRecord::new("c"),
            ],
            vec![
                EdgeRecord::new("a", "b", 3.0).with_time("2010", 10.0),
                EdgeRecord::new("a", "c", 4.0).with_time("2010", 30.0),
                EdgeRecord::new("b", "c", 5.0).with_time("2010", 10.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn path_graph_binary() {
        let g = SpatialGraph::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let sp = g.shortest_paths("0", &DistanceMode::Binary).unwrap();
        assert_eq!(sp.distance(2), Some(2.0));
        assert_eq!(sp.path_count(2), 1.0);
        assert_eq!(sp.settled_order(), &[0, 1, 2]);
    }

    #[test]
    fn weighted_triangle_prefers_direct_edge() {
        // Corner "a" joins the 3 km and 4 km edges; "c" sits across the
        // 4 km edge, "b" across the 3 km one. The only two simple a->b paths
        // are 3 (direct) and 4 + 5 = 9; a->c: 4 direct vs 3 + 5 = 8.
        let g = triangle_km();
        let sp = g.shortest_paths("a", &DistanceMode::Km).unwrap();
        assert_eq!(sp.distance(1), Some(3.0));
        assert_eq!(sp.distance(2), Some(4.0));
        // From "b": b->c is 5 direct vs 3 + 4 = 7.
        let sp = g.shortest_paths("b", &DistanceMode::Km).unwrap();
        assert_eq!(sp.distance(2), Some(5.0));
    }

    #[test]
    fn time_mode_and_ties() {
        let g = triangle_km();
        let sp = g
            .shortest_paths("a", &DistanceMode::Time("2010".into()))
            .unwrap();
        assert_eq!(sp.distance(2), Some(20.0));
        assert_eq!(sp.predecessors(2), &[1]);

        // Two equal-cost routes are both counted.
        let g = SpatialGraph::build(
            (0..4).map(|i| NodeRecord::new(i.to_string())).collect(),
            vec![
                EdgeRecord::new("0", "1", 0.1),
                EdgeRecord::new("1", "3", 0.2),
                EdgeRecord::new("0", "2", 0.2),
                EdgeRecord::new("2", "3", 0.1),
            ],
        )
        .unwrap();
        let sp = g.shortest_paths("0", &DistanceMode::Km).unwrap();
        assert_eq!(sp.path_count(3), 2.0);
    }

    #[test]
    fn unknown_epoch_and_node() {
        let g = triangle_km();
        let err = g
            .shortest_paths("a", &DistanceMode::Time("1988".into()))
            .unwrap_err();
        assert_eq!(err, Error::UnknownEpoch("1988".into()));
        assert!(matches!(
            g.shortest_paths("q", &DistanceMode::Binary),
            Err(Error::UnknownNode(_))
        ));
    }

    #[test]
    fn unreachable_is_none() {
        let g = SpatialGraph::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        let sp = g.shortest_paths("0", &DistanceMode::Binary).unwrap();
        assert_eq!(sp.distance(3), None);
        assert_eq!(sp.path_count(3), 0.0);
        let table = sp.table(&g);
        assert_eq!(table["3"].distance, None);
    }
}
