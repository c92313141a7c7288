// SPDX-License-Identifier: Apache-2.0

//! Seeded synthetic graphs and variable tables.
//!
//! `synthetic_gcn` stands in for an interregional road network: 39 nodes
//! scattered over a 5° x 6° box, 71 road links (a Euclidean spanning tree plus
//! the shortest remaining pairs, degree capped at 7), kilometric weights with
//! a detour factor and travel times for two epochs.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::empirical::{ColumnTag, VariableTable};
use crate::graph::{EdgeRecord, GeoPoint, NodeRecord, SpatialGraph};

pub const GCN_NODES: usize = 39;
pub const GCN_EDGES: usize = 71;
const GCN_MAX_DEGREE: usize = 7;

/// Each node joined to its `k / 2` nearest ring neighbours on either side.
pub fn ring_lattice(n: usize, k: usize) -> SpatialGraph {
    SpatialGraph::from_pairs(n, &ring_pairs(n, k)).expect("valid ring lattice")
}

fn ring_pairs(n: usize, k: usize) -> Vec<(usize, usize)> {
    assert!(
        k.is_multiple_of(2) && k < n,
        "ring lattice needs even k < n"
    );
    (0..n)
        .flat_map(|i| (1..=k / 2).map(move |j| (i, (i + j) % n)))
        .collect()
}

/// Watts-Strogatz rewiring of a ring lattice, redrawn until connected.
pub fn watts_strogatz(n: usize, k: usize, p: f64, seed: u64) -> SpatialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut adj = vec![vec![false; n]; n];
        let mut pairs = ring_pairs(n, k);
        for &(a, b) in &pairs {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        for pair in pairs.iter_mut() {
            if !rng.random_bool(p) {
                continue;
            }
            let (a, b) = *pair;
            let free: Vec<usize> = (0..n).filter(|&c| c != a && !adj[a][c]).collect();
            let Some(&c) = free.choose(&mut rng) else {
                continue;
            };
            adj[a][b] = false;
            adj[b][a] = false;
            adj[a][c] = true;
            adj[c][a] = true;
            *pair = (a, c);
        }
        let g = SpatialGraph::from_pairs(n, &pairs).expect("simple graph");
        if g.is_connected() {
            return g;
        }
    }
}

/// G(n, p) random graph; may be disconnected.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> SpatialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|_| rng.random_bool(p))
        .collect();
    SpatialGraph::from_pairs(n, &pairs).expect("simple graph")
}

/// Connected G(n, p) graph, redrawn until connected.
pub fn connected_erdos_renyi(n: usize, p: f64, seed: u64) -> SpatialGraph {
    (0..)
        .map(|attempt| erdos_renyi(n, p, seed.wrapping_mul(0x9E37_79B9).wrapping_add(attempt)))
        .find(SpatialGraph::is_connected)
        .expect("unbounded search")
}

/// 39-node, 71-edge connected spatial fixture with coordinates, kilometric
/// weights, 1988/2010 travel times and population / commuter attributes.
pub fn synthetic_gcn(seed: u64) -> SpatialGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (rows, cols) = (6, 7);
    let mut cells: Vec<usize> = (0..rows * cols).collect();
    cells.shuffle(&mut rng);
    cells.truncate(GCN_NODES);
    cells.sort_unstable();

    let points: Vec<GeoPoint> = cells
        .iter()
        .map(|&cell| {
            let (r, c) = (cell / cols, cell % cols);
            let lat = 36.5 + (r as f64 + rng.random_range(0.15..0.85)) * (5.0 / rows as f64);
            let lon = 20.5 + (c as f64 + rng.random_range(0.15..0.85)) * (6.0 / cols as f64);
            GeoPoint::new(lat, lon)
        })
        .collect();

    let n = points.len();
    let dist = |a: usize, b: usize| points[a].haversine_km(&points[b]);
    let mut pairs = spanning_tree(n, &dist);
    let mut degree = vec![0usize; n];
    let mut present = vec![vec![false; n]; n];
    for &(a, b) in &pairs {
        degree[a] += 1;
        degree[b] += 1;
        present[a][b] = true;
        present[b][a] = true;
    }
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(a, b)| !present[a][b])
        .collect();
    candidates.sort_by(|&(a, b), &(c, d)| dist(a, b).total_cmp(&dist(c, d)));
    for (a, b) in candidates {
        if pairs.len() == GCN_EDGES {
            break;
        }
        if degree[a] < GCN_MAX_DEGREE && degree[b] < GCN_MAX_DEGREE {
            degree[a] += 1;
            degree[b] += 1;
            pairs.push((a, b));
        }
    }

    let nodes = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let population = (rng.random_range(10.5..13.0_f64)).exp().round();
            let commuters = (population * rng.random_range(0.04..0.08)).round();
            NodeRecord::new((i + 1).to_string())
                .with_label(format!("Region {:02}", i + 1))
                .with_position((p.lat * 1e4).round() / 1e4, (p.lon * 1e4).round() / 1e4)
                .with_attribute("population", population)
                .with_attribute("commuters", commuters)
        })
        .collect::<Vec<_>>();
    let edges = pairs
        .iter()
        .map(|&(a, b)| {
            let km = (dist(a, b) * rng.random_range(1.1..1.4) * 10.0).round() / 10.0;
            let speed_1988 = rng.random_range(45.0..65.0);
            let speed_2010 = speed_1988 * rng.random_range(1.0..1.5);
            EdgeRecord::new(nodes[a].id.clone(), nodes[b].id.clone(), km)
                .with_time("1988", (km / speed_1988 * 600.0).round() / 10.0)
                .with_time("2010", (km / speed_2010 * 600.0).round() / 10.0)
        })
        .collect();
    SpatialGraph::build(nodes, edges).expect("synthetic fixture is valid")
}

fn spanning_tree(n: usize, dist: &impl Fn(usize, usize) -> f64) -> Vec<(usize, usize)> {
    let mut in_tree = vec![false; n];
    let mut best = vec![(f64::INFINITY, 0usize); n];
    let mut pairs = Vec::with_capacity(n - 1);
    in_tree[0] = true;
    for j in 1..n {
        best[j] = (dist(0, j), 0);
    }
    for _ in 1..n {
        let next = (0..n)
            .filter(|&j| !in_tree[j])
            .min_by(|&a, &b| best[a].0.total_cmp(&best[b].0))
            .expect("nodes left");
        in_tree[next] = true;
        pairs.push((best[next].1, next));
        for j in 0..n {
            if !in_tree[j] {
                let d = dist(next, j);
                if d < best[j].0 {
                    best[j] = (d, next);
                }
            }
        }
    }
    pairs
}

/// Commuting variables for the nodes of `g`, with a planted gravity pattern:
/// commuters depend on population, vehicles and an education index, and the
/// remaining columns are noisy relatives of those drivers.
pub fn synthetic_variables(g: &SpatialGraph, seed: u64) -> VariableTable {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.node_count();
    let mut normal = move || -> f64 { rng.sample(StandardNormal) };

    let population: Vec<f64> = g
        .nodes()
        .iter()
        .map(|node| node.attributes.get("population").copied())
        .collect::<Option<Vec<_>>>()
        .unwrap_or_else(|| {
            (0..n)
                .map(|_| (11.5 + 0.7 * normal()).exp().round())
                .collect()
        });
    let degree: Vec<f64> = g.degrees().into_iter().map(|k| k as f64).collect();
    let strength = crate::measures::strengths(g);
    let mut noisy = |base: &[f64], scale: f64, noise: f64| -> Vec<f64> {
        base.iter()
            .map(|&b| b * scale * (1.0 + noise * normal()))
            .collect()
    };
    let area = noisy(&vec![4000.0; n], 1.0, 0.3);
    let vehicles = noisy(&population, 0.45, 0.1);
    let households = noisy(&population, 0.35, 0.05);
    let enterprises = noisy(&population, 0.08, 0.2);
    let education: Vec<f64> = noisy(&vec![50.0; n], 1.0, 0.15);
    let accidents = noisy(&vehicles, 0.004, 0.3);
    let gdp_transport = noisy(&population, 0.9, 0.25);

    let commuters: Vec<f64> = (0..n)
        .map(|i| {
            let signal = 0.05 * population[i] + 0.02 * vehicles[i] + 40.0 * education[i];
            (signal * (1.0 + 0.02 * normal())).round()
        })
        .collect();

    let columns = vec![
        ("S1_degree", ColumnTag::S, degree),
        ("S2_strength_km", ColumnTag::S, strength),
        ("S3_area", ColumnTag::S, area),
        ("S6_population", ColumnTag::S, population),
        ("B3_households", ColumnTag::B, households),
        ("B6_vehicles", ColumnTag::B, vehicles),
        ("B7_enterprises", ColumnTag::B, enterprises),
        ("O2_education", ColumnTag::O, education),
        ("O6_transport_gdp", ColumnTag::O, gdp_transport),
        ("O7_accidents", ColumnTag::O, accidents),
        ("Y_commuters", ColumnTag::Y, commuters),
    ];
    let ids = g.nodes().iter().map(|node| node.id.clone()).collect();
    VariableTable::new(
        ids,
        columns
            .into_iter()
            .map(|(name, tag, values)| {
                (
                    name.to_string(),
                    tag,
                    values.into_iter().map(Some).collect(),
                )
            })
            .collect(),
    )
    .expect("synthetic table is valid")
}
