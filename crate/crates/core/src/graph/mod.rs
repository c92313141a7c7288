// SPDX-License-Identifier: Apache-2.0

//! Undirected spatial graph with node coordinates and kilometric / travel-time
//! edge weights.
//!
//! Nodes keep their ingestion order internally, but every public per-node
//! output elsewhere in the crate is keyed by node id.

mod paths;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use paths::{DistanceMode, PathEntry, ShortestPaths};

/// Mean Earth radius used for great-circle distances.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoPoint {
    pub lat: f64,
    pub lon: f64,
}

impl GeoPoint {
    pub fn new(lat: f64, lon: f64) -> Self {
        Self { lat, lon }
    }

    /// Great-circle distance in kilometres (haversine).
    pub fn haversine_km(&self, other: &GeoPoint) -> f64 {
        let (phi1, phi2) = (self.lat.to_radians(), other.lat.to_radians());
        let dphi = phi2 - phi1;
        let dlambda = (other.lon - self.lon).to_radians();
        let a =
            (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
        2.0 * EARTH_RADIUS_KM * a.sqrt().min(1.0).asin()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: String,
    pub label: String,
    pub position: Option<GeoPoint>,
    /// Named node weights, e.g. population or outgoing commuters.
    pub attributes: BTreeMap<String, f64>,
}

impl NodeRecord {
    pub fn new(id: impl Into<String>) -> Self {
        let id = id.into();
        Self {
            label: id.clone(),
            id,
            position: None,
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_position(mut self, lat: f64, lon: f64) -> Self {
        self.position = Some(GeoPoint::new(lat, lon));
        self
    }

    pub fn with_attribute(mut self, name: impl Into<String>, value: f64) -> Self {
        self.attributes.insert(name.into(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: String,
    pub v: String,
    pub distance_km: f64,
    /// Travel time in minutes per epoch label (e.g. "1988", "2010").
    pub time_min: BTreeMap<String, f64>,
}

impl EdgeRecord {
    pub fn new(u: impl Into<String>, v: impl Into<String>, distance_km: f64) -> Self {
        Self {
            u: u.into(),
            v: v.into(),
            distance_km,
            time_min: BTreeMap::new(),
        }
    }

    pub fn with_time(mut self, epoch: impl Into<String>, minutes: f64) -> Self {
        self.time_min.insert(epoch.into(), minutes);
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacent {
    pub node: usize,
    pub edge: usize,
}

/// Validated, immutable undirected graph.
///
/// Equality compares node records and edge records in order; everything
/// else is derived from them.
#[derive(Debug, Clone)]
pub struct SpatialGraph {
    nodes: Vec<NodeRecord>,
    edges: Vec<EdgeRecord>,
    index: HashMap<String, usize>,
    endpoints: Vec<(usize, usize)>,
    adjacency: Vec<Vec<Adjacent>>,
    component_of: Vec<usize>,
    components: usize,
    epochs: BTreeSet<String>,
}

impl PartialEq for SpatialGraph {
    fn eq(&self, other: &Self) -> bool {
        self.nodes == other.nodes && self.edges == other.edges
    }
}

impl SpatialGraph {
    pub fn build(nodes: Vec<NodeRecord>, edges: Vec<EdgeRecord>) -> Result<Self> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if let Some(p) = node.position {
                if !(p.lat.is_finite() && (-90.0..=90.0).contains(&p.lat)) {
                    return Err(Error::InvalidCoordinate {
                        id: node.id.clone(),
                        what: format!("lat {}", p.lat),
                    });
                }
                if !(p.lon.is_finite() && (-180.0..=180.0).contains(&p.lon)) {
                    return Err(Error::InvalidCoordinate {
                        id: node.id.clone(),
                        what: format!("lon {}", p.lon),
                    });
                }
            }
            if index.insert(node.id.clone(), i).is_some() {
                return Err(Error::DuplicateNode(node.id.clone()));
            }
        }

        let mut endpoints = Vec::with_capacity(edges.len());
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adjacency = vec![Vec::new(); nodes.len()];
        let mut epochs = BTreeSet::new();
        for (e, edge) in edges.iter().enumerate() {
            let lookup = |id: &String| {
                index.get(id).copied().ok_or_else(|| Error::DanglingEdge {
                    u: edge.u.clone(),
                    v: edge.v.clone(),
                    missing: id.clone(),
                })
            };
            let (a, b) = (lookup(&edge.u)?, lookup(&edge.v)?);
            if a == b {
                return Err(Error::SelfLoop(edge.u.clone()));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::DuplicateEdge(edge.u.clone(), edge.v.clone()));
            }
            check_positive(edge, "distance_km", edge.distance_km)?;
            for (epoch, &t) in &edge.time_min {
                check_positive(edge, &format!("time_{epoch}_min"), t)?;
                epochs.insert(epoch.clone());
            }
            endpoints.push((a, b));
            adjacency[a].push(Adjacent { node: b, edge: e });
            adjacency[b].push(Adjacent { node: a, edge: e });
        }

        let (component_of, components) = label_components(&adjacency);
        Ok(Self {
            nodes,
            edges,
            index,
            endpoints,
            adjacency,
            component_of,
            components,
            epochs,
        })
    }

    /// Unit-weight graph on nodes "0".."n-1", mostly for synthetic inputs.
    pub fn from_pairs(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let nodes = (0..n).map(|i| NodeRecord::new(i.to_string())).collect();
        let edges = pairs
            .iter()
            .map(|&(a, b)| EdgeRecord::new(a.to_string(), b.to_string(), 1.0))
            .collect();
        Self::build(nodes, edges)
    }

    /// Same nodes, with edge `i` moved onto `endpoints[i]` while keeping its
    /// kilometric and time weights.
    pub fn rewired(&self, endpoints: &[(usize, usize)]) -> Result<Self> {
        assert_eq!(endpoints.len(), self.edges.len(), "edge count must match");
        let edges = self
            .edges
            .iter()
            .zip(endpoints)
            .map(|(edge, &(a, b))| EdgeRecord {
                u: self.nodes[a].id.clone(),
                v: self.nodes[b].id.clone(),
                distance_km: edge.distance_km,
                time_min: edge.time_min.clone(),
            })
            .collect();
        Self::build(self.nodes.clone(), edges)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[NodeRecord] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn node(&self, idx: usize) -> &NodeRecord {
        &self.nodes[idx]
    }

    pub fn id(&self, idx: usize) -> &str {
        &self.nodes[idx].id
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub(crate) fn require_index(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownNode(id.to_string()))
    }

    pub fn endpoints(&self) -> &[(usize, usize)] {
        &self.endpoints
    }

    pub fn neighbors(&self, idx: usize) -> &[Adjacent] {
        &self.adjacency[idx]
    }

    pub fn degree(&self, idx: usize) -> usize {
        self.adjacency[idx].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        let (small, other) = if self.degree(a) <= self.degree(b) {
            (a, b)
        } else {
            (b, a)
        };
        self.adjacency[small].iter().any(|adj| adj.node == other)
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    pub fn component_of(&self, idx: usize) -> usize {
        self.component_of[idx]
    }

    pub fn is_connected(&self) -> bool {
        self.components <= 1
    }

    pub(crate) fn require_connected(&self) -> Result<()> {
        if self.is_connected() {
            Ok(())
        } else {
            Err(Error::Disconnected {
                components: self.components,
            })
        }
    }

    /// Epoch labels carried by at least one edge.
    pub fn epochs(&self) -> &BTreeSet<String> {
        &self.epochs
    }

    /// Degree sequence sorted ascending.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d = self.degrees();
        d.sort_unstable();
        d
    }
}

fn check_positive(edge: &EdgeRecord, what: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::NonPositiveWeight {
            u: edge.u.clone(),
            v: edge.v.clone(),
            what: what.to_string(),
            value,
        })
    }
}

fn label_components(adjacency: &[Vec<Adjacent>]) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; adjacency.len()];
    let mut count = 0;
    let mut queue = VecDeque::new();
    for start in 0..adjacency.len() {
        if label[start] != usize::MAX {
            continue;
        }
        label[start] = count;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            for adj in &adjacency[v] {
                if label[adj.node] == usize::MAX {
                    label[adj.node] = count;
                    queue.push_back(adj.node);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_km() -> SpatialGraph {
        SpatialGraph::build(
            vec![
                NodeRecord::new("a"),
                NodeRecord::new("b"),
                NodeRecord::new("c"),
            ],
            vec![
                EdgeRecord::new("a", "b", 3.0),
                EdgeRecord::new("a", "c", 4.0),
                EdgeRecord::new("b", "c", 5.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn builds_valid_graph() {
        let g = triangle_km();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.component_count(), 1);
        assert!(g.has_edge(0, 2));
        assert_eq!(g.degrees(), vec![2, 2, 2]);
    }

    #[test]
    fn single_node_is_one_component() {
        let g = SpatialGraph::build(vec![NodeRecord::new("x")], vec![]).unwrap();
        assert_eq!(
            (g.node_count(), g.edge_count(), g.component_count()),
            (1, 0, 1)
        );
        assert!(g.is_connected());
    }

    #[test]
    fn rejects_self_loop() {
        let err = SpatialGraph::build(
            vec![NodeRecord::new("a")],
            vec![EdgeRecord::new("a", "a", 1.0)],
        )
        .unwrap_err();
        assert_eq!(err, Error::SelfLoop("a".into()));
    }

    #[test]
    fn rejects_duplicates_and_dangling() {
        let nodes = || vec![NodeRecord::new("a"), NodeRecord::new("b")];
        let err = SpatialGraph::build(vec![NodeRecord::new("a"), NodeRecord::new("a")], vec![])
            .unwrap_err();
        assert_eq!(err, Error::DuplicateNode("a".into()));

        let err = SpatialGraph::build(
            nodes(),
            vec![
                EdgeRecord::new("a", "b", 1.0),
                EdgeRecord::new("b", "a", 2.0),
            ],
        )
        .unwrap_err();
        assert_eq!(err, Error::DuplicateEdge("b".into(), "a".into()));

        let err = SpatialGraph::build(nodes(), vec![EdgeRecord::new("a", "z", 1.0)]).unwrap_err();
        assert!(matches!(err, Error::DanglingEdge { missing, .. } if missing == "z"));
    }

    #[test]
    fn rejects_bad_weights_and_coordinates() {
        let nodes = || vec![NodeRecord::new("a"), NodeRecord::new("b")];
        let err = SpatialGraph::build(nodes(), vec![EdgeRecord::new("a", "b", 0.0)]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { .. }));
        let err = SpatialGraph::build(
            nodes(),
            vec![EdgeRecord::new("a", "b", 1.0).with_time("1988", -3.0)],
        )
        .unwrap_err();
        assert!(matches!(err, Error::NonPositiveWeight { what, .. } if what == "time_1988_min"));
        let err = SpatialGraph::build(vec![NodeRecord::new("a").with_position(91.0, 0.0)], vec![])
            .unwrap_err();
        assert!(matches!(err, Error::InvalidCoordinate { .. }));
    }

    #[test]
    fn counts_components() {
        let g = SpatialGraph::from_pairs(5, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(g.component_count(), 3);
        assert_eq!(g.component_of(0), g.component_of(1));
        assert_ne!(g.component_of(1), g.component_of(2));
    }

    #[test]
    fn rewiring_keeps_weights() {
        let g = SpatialGraph::from_pairs(4, &[(0, 1), (2, 3)]).unwrap();
        let r = g.rewired(&[(0, 3), (2, 1)]).unwrap();
        assert!(r.has_edge(0, 3) && r.has_edge(1, 2));
        assert_eq!(r.degree_sequence(), g.degree_sequence());
    }

    #[test]
    fn haversine_quarter_meridian() {
        let d = GeoPoint::new(0.0, 0.0).haversine_km(&GeoPoint::new(90.0, 0.0));
        assert!((d - EARTH_RADIUS_KM * std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    }
}
