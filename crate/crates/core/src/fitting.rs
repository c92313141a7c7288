// SPDX-License-Identifier: Apache-2.0

//! Degree-distribution fits and degree-conditioned scaling fits.
//!
//! Every fit reports R² on the original `(x, y)` scale, even when the
//! parameters were estimated in log space.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceMode, SpatialGraph};
use crate::measures::{betweenness_values, connected_tables, local_clustering_values, strengths};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    /// `y = amplitude · exp(−(x − mu)² / (2 sigma²))`
    Normal,
    /// `y = a · x^beta`
    Powerlaw,
    /// `y = a − b · ln x`
    LogDecay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitResult {
    pub family: FitFamily,
    pub params: BTreeMap<String, f64>,
    pub r_squared: f64,
    pub points_used: usize,
}

impl FitResult {
    pub fn param(&self, name: &str) -> f64 {
        self.params[name]
    }

    pub fn predict(&self, x: f64) -> f64 {
        let p = |name: &str| self.params[name];
        match self.family {
            FitFamily::Normal => {
                p("amplitude") * (-(x - p("mu")).powi(2) / (2.0 * p("sigma").powi(2))).exp()
            }
            FitFamily::Powerlaw => p("a") * x.powf(p("beta")),
            FitFamily::LogDecay => p("a") - p("b") * x.ln(),
        }
    }

    /// `(x, y, fitted_y)` rows for plotting.
    pub fn series(&self, points: &[(f64, f64)]) -> Vec<(f64, f64, f64)> {
        points
            .iter()
            .map(|&(x, y)| (x, y, self.predict(x)))
            .collect()
    }
}

/// `(k, n(k))` pairs in ascending `k`, zero counts omitted.
pub fn degree_histogram(g: &SpatialGraph) -> Vec<(usize, usize)> {
    let mut counts = BTreeMap::new();
    for k in g.degrees() {
        *counts.entry(k).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

pub fn histogram_points(histogram: &[(usize, usize)]) -> Vec<(f64, f64)> {
    histogram
        .iter()
        .map(|&(k, c)| (k as f64, c as f64))
        .collect()
}

/// Gaussian fit. Centre and width come from a y²-weighted least-squares
/// parabola through `(x, ln y)`, which is exact for noiseless Gaussian data;
/// the amplitude is then solved in closed form on the original scale. When
/// the parabola does not open downward, `y`-weighted moments are used instead.
pub fn fit_normal(points: &[(f64, f64)]) -> Result<FitResult> {
    require_points(points, 3)?;
    require_positive(points, false)?;

    let weights: Vec<f64> = points.iter().map(|&(_, y)| y * y).collect();
    let rows: Vec<[f64; 3]> = points.iter().map(|&(x, _)| [1.0, x, x * x]).collect();
    let targets: Vec<f64> = points.iter().map(|&(_, y)| y.ln()).collect();
    let (mu, sigma) = match weighted_least_squares(&rows, &targets, &weights) {
        Some([_, c1, c2]) if c2 < 0.0 => (-c1 / (2.0 * c2), (-1.0 / (2.0 * c2)).sqrt()),
        _ => weighted_moments(points),
    };

    let shape: Vec<f64> = points
        .iter()
        .map(|&(x, _)| (-(x - mu).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect();
    let denom: f64 = shape.iter().map(|s| s * s).sum();
    let amplitude = if denom > 0.0 {
        points
            .iter()
            .zip(&shape)
            .map(|(&(_, y), s)| y * s)
            .sum::<f64>()
            / denom
    } else {
        0.0
    };
    let fit = FitResult {
        family: FitFamily::Normal,
        params: BTreeMap::from([
            ("amplitude".to_string(), amplitude),
            ("mu".to_string(), mu),
            ("sigma".to_string(), sigma),
        ]),
        r_squared: 0.0,
        points_used: points.len(),
    };
    Ok(with_r_squared(fit, points))
}

/// Log-log linear least squares for `y = a · x^beta`.
pub fn fit_powerlaw(points: &[(f64, f64)]) -> Result<FitResult> {
    require_points(points, 3)?;
    require_positive(points, true)?;
    let logged: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let (intercept, slope) = simple_regression(&logged);
    let fit = FitResult {
        family: FitFamily::Powerlaw,
        params: BTreeMap::from([
            ("a".to_string(), intercept.exp()),
            ("beta".to_string(), slope),
        ]),
        r_squared: 0.0,
        points_used: points.len(),
    };
    Ok(with_r_squared(fit, points))
}

/// Least squares for `y = a − b · ln x`.
pub fn fit_log_decay(points: &[(f64, f64)]) -> Result<FitResult> {
    require_points(points, 3)?;
    if let Some(&(x, y)) = points.iter().find(|&&(x, _)| x <= 0.0) {
        return Err(Error::NonPositiveValues { x, value: y });
    }
    let logged: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y)).collect();
    let (intercept, slope) = simple_regression(&logged);
    let fit = FitResult {
        family: FitFamily::LogDecay,
        params: BTreeMap::from([("a".to_string(), intercept), ("b".to_string(), -slope)]),
        r_squared: 0.0,
        points_used: points.len(),
    };
    Ok(with_r_squared(fit, points))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMeasure {
    Betweenness,
    Strength,
    Clustering,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DegreeClass {
    pub degree: usize,
    pub size: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingFit {
    pub measure: ScalingMeasure,
    pub classes: Vec<DegreeClass>,
    /// Degree classes left out of the fit (non-positive mean under a power law).
    pub excluded_degrees: Vec<usize>,
    pub fit: FitResult,
}

impl ScalingFit {
    pub fn fitted_points(&self) -> Vec<(f64, f64)> {
        self.classes
            .iter()
            .filter(|c| !self.excluded_degrees.contains(&c.degree))
            .map(|c| (c.degree as f64, c.mean))
            .collect()
    }
}

/// Mean of the measure within each degree class, ascending by degree.
pub fn class_averages(samples: &[(usize, f64)]) -> Vec<DegreeClass> {
    let mut acc: BTreeMap<usize, (usize, f64)> = BTreeMap::new();
    for &(k, v) in samples {
        let entry = acc.entry(k).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += v;
    }
    acc.into_iter()
        .map(|(degree, (size, sum))| DegreeClass {
            degree,
            size,
            mean: sum / size as f64,
        })
        .collect()
}

/// Fits the per-class means of `(degree, value)` samples: a power law for
/// betweenness and strength, logarithmic decay for clustering.
pub fn fit_degree_scaling(samples: &[(usize, f64)], measure: ScalingMeasure) -> Result<ScalingFit> {
    let classes = class_averages(samples);
    let mut excluded = Vec::new();
    let points: Vec<(f64, f64)> = classes
        .iter()
        .filter(|c| {
            let keep = c.degree > 0 && (measure == ScalingMeasure::Clustering || c.mean > 0.0);
            if !keep {
                excluded.push(c.degree);
            }
            keep
        })
        .map(|c| (c.degree as f64, c.mean))
        .collect();
    if points.len() < 3 {
        return Err(Error::InsufficientClasses {
            required: 3,
            actual: points.len(),
        });
    }
    let fit = match measure {
        ScalingMeasure::Clustering => fit_log_decay(&points)?,
        _ => fit_powerlaw(&points)?,
    };
    Ok(ScalingFit {
        measure,
        classes,
        excluded_degrees: excluded,
        fit,
    })
}

pub fn scaling_by_degree_class(g: &SpatialGraph, measure: ScalingMeasure) -> Result<ScalingFit> {
    let degrees = g.degrees();
    let values: Vec<f64> = match measure {
        ScalingMeasure::Betweenness => {
            let tables = connected_tables(g, &DistanceMode::Binary)?;
            betweenness_values(g, &tables)
        }
        ScalingMeasure::Strength => strengths(g),
        ScalingMeasure::Clustering => local_clustering_values(g),
    };
    let samples: Vec<(usize, f64)> = degrees.into_iter().zip(values).collect();
    fit_degree_scaling(&samples, measure)
}

// ---- numerics ----

fn require_points(points: &[(f64, f64)], required: usize) -> Result<()> {
    if points.len() < required {
        Err(Error::InsufficientPoints {
            required,
            actual: points.len(),
        })
    } else {
        Ok(())
    }
}

fn require_positive(points: &[(f64, f64)], check_x: bool) -> Result<()> {
    match points
        .iter()
        .find(|&&(x, y)| y <= 0.0 || (check_x && x <= 0.0))
    {
        Some(&(x, y)) => Err(Error::NonPositiveValues { x, value: y }),
        None => Ok(()),
    }
}

/// `1 − SS_res / SS_tot` on the original scale.
pub fn r_squared(points: &[(f64, f64)], predict: impl Fn(f64) -> f64) -> f64 {
    let mean = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let ss_tot: f64 = points.iter().map(|&(_, y)| (y - mean).powi(2)).sum();
    let ss_res: f64 = points.iter().map(|&(x, y)| (y - predict(x)).powi(2)).sum();
    if ss_tot == 0.0 {
        return if ss_res <= f64::EPSILON * mean.abs().max(1.0) {
            1.0
        } else {
            0.0
        };
    }
    1.0 - ss_res / ss_tot
}

fn with_r_squared(mut fit: FitResult, points: &[(f64, f64)]) -> FitResult {
    fit.r_squared = r_squared(points, |x| fit.predict(x));
    fit
}

/// Ordinary least squares line; returns `(intercept, slope)`.
fn simple_regression(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (my - slope * mx, slope)
}

fn weighted_moments(points: &[(f64, f64)]) -> (f64, f64) {
    let total: f64 = points.iter().map(|p| p.1).sum();
    let mu = points.iter().map(|&(x, y)| x * y).sum::<f64>() / total;
    let var = points
        .iter()
        .map(|&(x, y)| y * (x - mu).powi(2))
        .sum::<f64>()
        / total;
    (mu, var.sqrt().max(f64::MIN_POSITIVE))
}

/// Weighted least squares for three coefficients via the normal equations,
/// solved with partial pivoting on centred columns.
fn weighted_least_squares(rows: &[[f64; 3]], targets: &[f64], weights: &[f64]) -> Option<[f64; 3]> {
    let wsum: f64 = weights.iter().sum();
    let xm = rows.iter().zip(weights).map(|(r, w)| r[1] * w).sum::<f64>() / wsum;
    // Centring x keeps the quadratic system well conditioned.
    let centred: Vec<[f64; 3]> = rows
        .iter()
        .map(|r| [1.0, r[1] - xm, (r[1] - xm).powi(2)])
        .collect();
    let mut a = [[0.0; 4]; 3];
    for ((r, &t), &w) in centred.iter().zip(targets).zip(weights) {
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += w * r[i] * r[j];
            }
            a[i][3] += w * r[i] * t;
        }
    }
    for col in 0..3 {
        let pivot = (col..3).max_by(|&p, &q| a[p][col].abs().total_cmp(&a[q][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..4 {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let c: Vec<f64> = (0..3).map(|i| a[i][3] / a[i][i]).collect();
    // Undo centring: c0 + c1 (x − m) + c2 (x − m)².
    let (c0, c1, c2) = (c[0], c[1], c[2]);
    Some([c0 - c1 * xm + c2 * xm * xm, c1 - 2.0 * c2 * xm, c2])
}
