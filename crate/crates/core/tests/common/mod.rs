// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference implementations, deliberately naive and sharing no
//! code with the library.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spatnet_core::{ColumnTag, EdgeRecord, NodeRecord, SpatialGraph};

/// Small test graph: adjacency matrix of integer weights (0 = no edge).
#[derive(Debug, Clone)]
pub struct Small {
    pub n: usize,
    pub w: Vec<Vec<u32>>,
}

impl Small {
    pub fn edges(&self) -> Vec<(usize, usize, u32)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.w[i][j] > 0 {
                    out.push((i, j, self.w[i][j]));
                }
            }
        }
        out
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.w[i][j] > 0
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n).filter(|&j| self.adjacent(i, j)).count()
    }

    pub fn graph(&self) -> SpatialGraph {
        let nodes = (0..self.n)
            .map(|i| NodeRecord::new(i.to_string()))
            .collect();
        let edges = self
            .edges()
            .into_iter()
            .map(|(i, j, w)| {
                EdgeRecord::new(i.to_string(), j.to_string(), f64::from(w))
                    .with_time("t", f64::from(w) * 2.0)
            })
            .collect();
        SpatialGraph::build(nodes, edges).expect("valid test graph")
    }
}

/// Random connected graph: a random spanning tree plus extra edges with probability `p`.
pub fn random_connected(n: usize, p: f64, max_weight: u32, seed: u64) -> Small {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = vec![vec![0u32; n]; n];
    for i in 1..n {
        let j = rng.random_range(0..i);
        let weight = rng.random_range(1..=max_weight);
        w[i][j] = weight;
        w[j][i] = weight;
    }
    for i in 0..n {
        for j in i + 1..n {
            if w[i][j] == 0 && rng.random_bool(p) {
                let weight = rng.random_range(1..=max_weight);
                w[i][j] = weight;
                w[j][i] = weight;
            }
        }
    }
    Small { n, w }
}

/// Every simple path from `s` to `t`, as node sequences.
pub fn simple_paths(g: &Small, s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(
        g: &Small,
        path: &mut Vec<usize>,
        seen: &mut [bool],
        t: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().unwrap();
        if last == t {
            out.push(path.clone());
            return;
        }
        for next in 0..g.n {
            if g.adjacent(last, next) && !seen[next] {
                seen[next] = true;
                path.push(next);
                walk(g, path, seen, t, out);
                path.pop();
                seen[next] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut seen = vec![false; g.n];
    seen[s] = true;
    walk(g, &mut vec![s], &mut seen, t, &mut out);
    out
}

fn path_cost(g: &Small, path: &[usize], weighted: bool) -> u64 {
    path.windows(2)
        .map(|e| {
            if weighted {
                u64::from(g.w[e[0]][e[1]])
            } else {
                1
            }
        })
        .sum()
}

/// Shortest distance and all shortest paths between `s` and `t`, by enumeration.
pub fn shortest(g: &Small, s: usize, t: usize, weighted: bool) -> Option<(u64, Vec<Vec<usize>>)> {
    let paths = simple_paths(g, s, t);
    let best = paths.iter().map(|p| path_cost(g, p, weighted)).min()?;
    let winners = paths
        .into_iter()
        .filter(|p| path_cost(g, p, weighted) == best)
        .collect();
    Some((best, winners))
}

pub fn closeness(g: &Small, weighted: bool) -> Vec<f64> {
    (0..g.n)
        .map(|i| {
            let total: u64 = (0..g.n)
                .filter(|&j| j != i)
                .map(|j| shortest(g, i, j, weighted).unwrap().0)
                .sum();
            total as f64 / (g.n - 1) as f64
        })
        .collect()
}

/// Normalized betweenness over unordered pairs.
pub fn betweenness(g: &Small, weighted: bool) -> Vec<f64> {
    let mut cb = vec![0.0; g.n];
    for s in 0..g.n {
        for t in s + 1..g.n {
            let (_, paths) = shortest(g, s, t, weighted).unwrap();
            for (k, slot) in cb.iter_mut().enumerate() {
                if k == s || k == t {
                    continue;
                }
                let through = paths.iter().filter(|p| p.contains(&k)).count();
                *slot += through as f64 / paths.len() as f64;
            }
        }
    }
    let pairs = ((g.n - 1) * (g.n - 2)) as f64 / 2.0;
    cb.iter()
        .map(|v| if pairs > 0.0 { v / pairs } else { 0.0 })
        .collect()
}

pub fn triangles_at(g: &Small, i: usize) -> usize {
    let mut count = 0;
    for a in 0..g.n {
        for b in a + 1..g.n {
            if g.adjacent(i, a) && g.adjacent(i, b) && g.adjacent(a, b) {
                count += 1;
            }
        }
    }
    count
}

pub fn local_clustering(g: &Small) -> Vec<f64> {
    (0..g.n)
        .map(|i| {
            let k = g.degree(i);
            if k < 2 {
                0.0
            } else {
                2.0 * triangles_at(g, i) as f64 / (k * (k - 1)) as f64
            }
        })
        .collect()
}

pub fn global_clustering(g: &Small) -> f64 {
    let closed: usize = (0..g.n).map(|i| triangles_at(g, i)).sum();
    let triplets: usize = (0..g.n)
        .map(|i| g.degree(i) * g.degree(i).saturating_sub(1) / 2)
        .sum();
    if triplets == 0 {
        0.0
    } else {
        closed as f64 / triplets as f64
    }
}

/// `(mean over ordered pairs, diameter)`.
pub fn path_length_and_diameter(g: &Small, weighted: bool) -> (f64, u64) {
    let mut total = 0u64;
    let mut diameter = 0u64;
    for i in 0..g.n {
        for j in 0..g.n {
            if i != j {
                let d = shortest(g, i, j, weighted).unwrap().0;
                total += d;
                diameter = diameter.max(d);
            }
        }
    }
    (total as f64 / (g.n * (g.n - 1)) as f64, diameter)
}

/// Modularity by the direct ordered-pair double sum over the adjacency matrix.
pub fn modularity(g: &Small, labels: &[usize]) -> f64 {
    let a = |i: usize, j: usize| if g.adjacent(i, j) { 1.0 } else { 0.0 };
    let k: Vec<f64> = (0..g.n).map(|i| g.degree(i) as f64).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..g.n {
        for j in 0..g.n {
            if labels[i] == labels[j] {
                q += a(i, j) - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Every set partition of `0..n` as restricted-growth label vectors.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn grow(labels: &mut Vec<usize>, n: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if labels.len() == n {
            out.push(labels.clone());
            return;
        }
        for l in 0..=max + 1 {
            labels.push(l);
            grow(labels, n, max.max(l), out);
            labels.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    grow(&mut vec![0], n, 0, &mut out);
    out
}

pub fn best_modularity(g: &Small) -> f64 {
    set_partitions(g.n)
        .iter()
        .map(|labels| modularity(g, labels))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Γ(x) for positive integer or half-integer `x`.
pub fn gamma_half_integer(x: f64) -> f64 {
    let twice = (2.0 * x).round() as i64;
    assert!(twice > 0 && (2.0 * x - twice as f64).abs() < 1e-12);
    let (mut value, mut at) = if twice % 2 == 0 {
        (1.0, 1.0)
    } else {
        (std::f64::consts::PI.sqrt(), 0.5)
    };
    while at < x - 1e-9 {
        value *= at;
        at += 1.0;
    }
    value
}

/// Two-tailed Student-t tail by composite Simpson integration of the density on [0, |t|].
pub fn t_two_tailed_by_quadrature(t: f64, df: u32) -> f64 {
    let nu = f64::from(df);
    let norm = gamma_half_integer((nu + 1.0) / 2.0)
        / ((nu * std::f64::consts::PI).sqrt() * gamma_half_integer(nu / 2.0));
    let pdf = |x: f64| norm * (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0);
    let steps = 20_000;
    let h = t.abs() / steps as f64;
    let mut sum = pdf(0.0) + pdf(t.abs());
    for i in 1..steps {
        let x = i as f64 * h;
        sum += if i % 2 == 1 {
            4.0 * pdf(x)
        } else {
            2.0 * pdf(x)
        };
    }
    let central = sum * h / 3.0;
    1.0 - 2.0 * central
}

/// Pearson r from raw sums.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (sx, sy): (f64, f64) = (x.iter().sum(), y.iter().sum());
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
    let sxx: f64 = x.iter().map(|a| a * a).sum();
    let syy: f64 = y.iter().map(|b| b * b).sum();
    (n * sxy - sx * sy) / ((n * sxx - sx * sx).sqrt() * (n * syy - sy * sy).sqrt())
}

/// OLS coefficients (intercept first) from the normal equations, solved by
/// Gauss-Jordan elimination with partial pivoting.
pub fn normal_equations(columns: &[&[f64]], y: &[f64]) -> Vec<f64> {
    let n = y.len();
    let p = columns.len() + 1;
    let x = |row: usize, col: usize| if col == 0 { 1.0 } else { columns[col - 1][row] };
    let mut a = vec![vec![0.0; p + 1]; p];
    for i in 0..p {
        for j in 0..p {
            a[i][j] = (0..n).map(|r| x(r, i) * x(r, j)).sum();
        }
        a[i][p] = (0..n).map(|r| x(r, i) * y[r]).sum();
    }
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let lead = a[col][col];
        for v in a[col].iter_mut() {
            *v /= lead;
        }
        for r in 0..p {
            if r != col {
                let factor = a[r][col];
                let pivot_row = a[col].clone();
                for (v, pv) in a[r].iter_mut().zip(pivot_row) {
                    *v -= factor * pv;
                }
            }
        }
    }
    a.iter().map(|row| row[p]).collect()
}

/// Standard-normal draws.
pub fn normals(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| rng.sample(StandardNormal)).collect()
}

/// Rescales to mean 0 and sample standard deviation 1.
pub fn zscore(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    v.iter().map(|x| (x - m) / sd).collect()
}

/// Spearman rank correlation (no ties expected).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        for (pos, &i) in idx.iter().enumerate() {
            r[i] = pos as f64;
        }
        r
    };
    pearson(&rank(x), &rank(y))
}

/// Gated Σr² sums by brute force: `(within, global)` per column, where
/// `classes[i]` is the class of column `i` (None for an unclassed response).
pub fn gated_sums(
    columns: &[Vec<f64>],
    classes: &[Option<char>],
    alpha: f64,
) -> Vec<(Option<f64>, f64)> {
    let n = columns[0].len();
    let k = columns.len();
    let mut r2 = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            if i != j {
                let r = pearson(&columns[i], &columns[j]);
                let t = r * ((n as f64 - 2.0) / (1.0 - r * r)).sqrt();
                let p = t_two_tailed_by_quadrature(t, (n - 2) as u32);
                if p <= alpha {
                    r2[i][j] = r * r;
                }
            }
        }
    }
    (0..k)
        .map(|i| {
            let global = (0..k).filter(|&j| j != i).map(|j| r2[i][j]).sum();
            let within = classes[i].map(|c| {
                (0..k)
                    .filter(|&j| j != i && classes[j] == Some(c))
                    .map(|j| r2[i][j])
                    .sum()
            });
            (within, global)
        })
        .collect()
}

pub type Columns = Vec<(String, ColumnTag, Vec<f64>)>;

/// Twelve variables in three classes with planted correlation: each class
/// shares a latent factor at varying strengths, and Y loads on all three.
pub fn planted(seed: u64, n: usize) -> (Columns, Vec<Option<char>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let factors: Vec<Vec<f64>> = (0..3).map(|_| normals(&mut rng, n)).collect();
    let mut columns = Vec::new();
    let mut classes = Vec::new();
    let tags = [
        (ColumnTag::S, 'S'),
        (ColumnTag::B, 'B'),
        (ColumnTag::O, 'O'),
    ];
    let loadings = [0.95, 0.7, 0.4, 0.1];
    for (f, (tag, c)) in tags.iter().enumerate() {
        for (j, load) in loadings.iter().enumerate().take(if f == 2 { 3 } else { 4 }) {
            let noise = normals(&mut rng, n);
            let values = factors[f]
                .iter()
                .zip(&noise)
                .map(|(a, e)| load * a + (1.0 - load * load).sqrt() * e)
                .collect();
            columns.push((format!("{c}{}_v", j + 1), *tag, values));
            classes.push(Some(*c));
        }
    }
    let noise = normals(&mut rng, n);
    let y = (0..n)
        .map(|i| 0.5 * factors[0][i] + 0.4 * factors[1][i] + 0.3 * factors[2][i] + 0.5 * noise[i])
        .collect();
    columns.push(("Y".to_string(), ColumnTag::Y, y));
    classes.push(None);
    (columns, classes)
}
