// SPDX-License-Identifier: Apache-2.0

//! Node-variable analysis for commuting: significance-gated correlation sums,
//! per-class representative selection and multivariate OLS.
//!
//! Predictors belong to exactly one class: structural (`S`), functional or
//! behavioural (`B`) and ontological (`O`). The single response column (`Y`)
//! takes part in every correlation sum but is never chosen as a
//! representative. It may optionally carry a class, in which case it also
//! joins that class's within-group sums.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{correlation_p_value, pearson, sample_sd, student_t_two_tailed};

pub const DEFAULT_ALPHA: f64 = 0.10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarClass {
    S,
    B,
    O,
}

impl VarClass {
    pub const ALL: [VarClass; 3] = [VarClass::S, VarClass::B, VarClass::O];

    pub fn parse(tag: &str) -> Option<Self> {
        match tag {
            "S" => Some(VarClass::S),
            "B" => Some(VarClass::B),
            "O" => Some(VarClass::O),
            _ => None,
        }
    }
}

impl fmt::Display for VarClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VarClass::S => "S",
            VarClass::B => "B",
            VarClass::O => "O",
        };
        f.write_str(s)
    }
}

/// Column role as declared in a header tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnTag {
    S,
    B,
    O,
    /// Response without a class.
    Y,
    /// Response that also joins the given class's within-group sums.
    ClassedY(VarClass),
}

impl ColumnTag {
    pub fn class(self) -> Option<VarClass> {
        match self {
            ColumnTag::S => Some(VarClass::S),
            ColumnTag::B => Some(VarClass::B),
            ColumnTag::O => Some(VarClass::O),
            ColumnTag::Y => None,
            ColumnTag::ClassedY(c) => Some(c),
        }
    }

    pub fn is_response(self) -> bool {
        matches!(self, ColumnTag::Y | ColumnTag::ClassedY(_))
    }

    /// Header suffix for this tag, e.g. `S` or `B:Y`.
    pub fn suffix(self) -> String {
        match self {
            ColumnTag::Y => "Y".into(),
            ColumnTag::ClassedY(c) => format!("{c}:Y"),
            other => other.class().expect("predictor").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub tag: ColumnTag,
    pub values: Vec<f64>,
}

/// One row per node; complete after listwise deletion of rows with gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableTable {
    ids: Vec<String>,
    columns: Vec<Column>,
    response: usize,
    dropped: Vec<String>,
}

impl VariableTable {
    /// Builds a table from `(name, tag, values)` columns; `None` marks a missing value.
    pub fn new(
        ids: Vec<String>,
        columns: Vec<(String, ColumnTag, Vec<Option<f64>>)>,
    ) -> Result<Self> {
        let mut names = HashSet::new();
        for (name, _, values) in &columns {
            if !names.insert(name.as_str()) {
                return Err(Error::Config(format!("duplicate variable `{name}`")));
            }
            if values.len() != ids.len() {
                return Err(Error::Config(format!(
                    "variable `{name}` has {} values for {} rows",
                    values.len(),
                    ids.len()
                )));
            }
        }
        let responses: Vec<usize> = columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.1.is_response())
            .map(|(i, _)| i)
            .collect();
        let response = match responses.as_slice() {
            [] => return Err(Error::MissingResponse),
            [r] => *r,
            _ => {
                return Err(Error::Config(
                    "more than one response column tagged `:Y`".into(),
                ))
            }
        };

        let complete: Vec<bool> = (0..ids.len())
            .map(|row| {
                columns
                    .iter()
                    .all(|(_, _, v)| v[row].is_some_and(f64::is_finite))
            })
            .collect();
        let dropped = ids
            .iter()
            .zip(&complete)
            .filter(|(_, &ok)| !ok)
            .map(|(id, _)| id.clone())
            .collect();
        let keep = |values: &[Option<f64>]| -> Vec<f64> {
            values
                .iter()
                .zip(&complete)
                .filter(|(_, &ok)| ok)
                .map(|(v, _)| v.expect("complete row"))
                .collect()
        };
        let kept_ids = ids
            .iter()
            .zip(&complete)
            .filter(|(_, &ok)| ok)
            .map(|(id, _)| id.clone())
            .collect();
        let columns = columns
            .into_iter()
            .map(|(name, tag, values)| Column {
                name,
                tag,
                values: keep(&values),
            })
            .collect();
        Ok(Self {
            ids: kept_ids,
            columns,
            response,
            dropped,
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn rows(&self) -> usize {
        self.ids.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn response(&self) -> &Column {
        &self.columns[self.response]
    }

    /// Rows removed by listwise deletion.
    pub fn dropped_ids(&self) -> &[String] {
        &self.dropped
    }

    /// Column index by full name, or by the code before the first `_`
    /// (`S6` for `S6_population`).
    pub fn resolve(&self, name: &str) -> Result<usize> {
        if let Some(i) = self.columns.iter().position(|c| c.name == name) {
            return Ok(i);
        }
        let by_code: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.name.split('_').next() == Some(name))
            .map(|(i, _)| i)
            .collect();
        match by_code.as_slice() {
            [i] => Ok(*i),
            _ => Err(Error::UnknownVariable(name.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub n: usize,
    pub r: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
}

/// Pearson `r` and its two-tailed significance for every pair of columns.
pub fn pearson_matrix(table: &VariableTable) -> Result<CorrelationMatrix> {
    let cols = table.columns();
    for c in cols {
        if pearson(&c.values, &c.values).is_none() {
            return Err(Error::ZeroVariance(c.name.clone()));
        }
    }
    let k = cols.len();
    let n = table.rows();
    let mut r = vec![vec![1.0; k]; k];
    let mut p = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let rij = pearson(&cols[i].values, &cols[j].values).expect("variance checked");
            let pij = correlation_p_value(rij, n);
            r[i][j] = rij;
            r[j][i] = rij;
            p[i][j] = pij;
            p[j][i] = pij;
        }
    }
    Ok(CorrelationMatrix {
        names: cols.iter().map(|c| c.name.clone()).collect(),
        n,
        r,
        p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VariableSelection {
    pub name: String,
    pub class: Option<VarClass>,
    pub response: bool,
    /// Gated Σr² over the other members of the variable's class.
    pub within_group_sum_r2: Option<f64>,
    pub within_rank: Option<usize>,
    /// Gated Σr² over every other variable, response included.
    pub global_sum_r2: f64,
    pub global_rank: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelectionReport {
    pub alpha: f64,
    pub variables: Vec<VariableSelection>,
    /// Within-group argmax per class.
    pub representatives: BTreeMap<VarClass, String>,
    /// Per-class argmax of the global sums.
    pub global_representatives: BTreeMap<VarClass, String>,
    /// Distinct predictor sets implied by the two rankings, within-group first.
    pub model_sets: Vec<Vec<String>>,
}

/// Picks, per class, the predictor with the largest sum of squared
/// correlations over pairs whose significance is at most `alpha`. Ties go to
/// the earlier column.
pub fn select_representatives(table: &VariableTable, alpha: f64) -> Result<SelectionReport> {
    for class in VarClass::ALL {
        let has_predictor = table
            .columns()
            .iter()
            .any(|c| !c.tag.is_response() && c.tag.class() == Some(class));
        if !has_predictor {
            return Err(Error::EmptyClass(class.to_string()));
        }
    }
    let corr = pearson_matrix(table)?;
    let cols = table.columns();
    let k = cols.len();
    let gated = |i: usize, j: usize| {
        if corr.p[i][j] <= alpha {
            corr.r[i][j].powi(2)
        } else {
            0.0
        }
    };

    let global: Vec<f64> = (0..k)
        .map(|i| (0..k).filter(|&j| j != i).map(|j| gated(i, j)).sum())
        .collect();
    let within: Vec<Option<f64>> = (0..k)
        .map(|i| {
            cols[i].tag.class().map(|class| {
                (0..k)
                    .filter(|&j| j != i && cols[j].tag.class() == Some(class))
                    .map(|j| gated(i, j))
                    .sum()
            })
        })
        .collect();

    let global_rank = dense_ranks(&global.iter().map(|&v| Some(v)).collect::<Vec<_>>());
    let mut within_rank = vec![None; k];
    for class in VarClass::ALL {
        let members: Vec<Option<f64>> = (0..k)
            .map(|i| {
                if cols[i].tag.class() == Some(class) {
                    within[i]
                } else {
                    None
                }
            })
            .collect();
        for (i, rank) in dense_ranks(&members).into_iter().enumerate() {
            if rank.is_some() {
                within_rank[i] = rank;
            }
        }
    }

    let argmax = |scores: &dyn Fn(usize) -> f64, class: VarClass| -> String {
        let mut best: Option<usize> = None;
        for i in 0..k {
            if cols[i].tag.is_response() || cols[i].tag.class() != Some(class) {
                continue;
            }
            if best.is_none_or(|b| scores(i) > scores(b)) {
                best = Some(i);
            }
        }
        cols[best.expect("class is non-empty")].name.clone()
    };
    let representatives: BTreeMap<_, _> = VarClass::ALL
        .iter()
        .map(|&c| (c, argmax(&|i| within[i].unwrap_or(0.0), c)))
        .collect();
    let global_representatives: BTreeMap<_, _> = VarClass::ALL
        .iter()
        .map(|&c| (c, argmax(&|i| global[i], c)))
        .collect();
    let mut model_sets = vec![representatives.values().cloned().collect::<Vec<_>>()];
    let global_set: Vec<String> = global_representatives.values().cloned().collect();
    if global_set != model_sets[0] {
        model_sets.push(global_set);
    }

    let variables = (0..k)
        .map(|i| VariableSelection {
            name: cols[i].name.clone(),
            class: cols[i].tag.class(),
            response: cols[i].tag.is_response(),
            within_group_sum_r2: within[i],
            within_rank: within_rank[i],
            global_sum_r2: global[i],
            global_rank: global_rank[i].expect("every variable ranked"),
        })
        .collect();
    Ok(SelectionReport {
        alpha,
        variables,
        representatives,
        global_representatives,
        model_sets,
    })
}

/// 1-based dense ranks by descending score; `None` entries are unranked.
fn dense_ranks(scores: &[Option<f64>]) -> Vec<Option<usize>> {
    let mut distinct: Vec<f64> = scores.iter().flatten().copied().collect();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    scores
        .iter()
        .map(|s| s.map(|v| distinct.iter().position(|&d| d == v).expect("present") + 1))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficient {
    pub name: String,
    /// Unstandardized coefficient.
    pub b: f64,
    pub se: f64,
    /// Standardized coefficient; absent for the intercept.
    pub beta: Option<f64>,
    #[serde(with = "crate::sentinel")]
    pub t: f64,
    #[serde(with = "crate::sentinel")]
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegressionModel {
    pub response: String,
    pub predictors: Vec<String>,
    pub n: usize,
    pub df_residual: usize,
    pub intercept: Coefficient,
    pub coefficients: Vec<Coefficient>,
    pub r: f64,
    pub r_squared: f64,
    pub se_estimate: f64,
    pub sse: f64,
    pub sst: f64,
}

impl RegressionModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept.b
            + self
                .coefficients
                .iter()
                .zip(x)
                .map(|(c, v)| c.b * v)
                .sum::<f64>()
    }
}

/// Relative column-norm threshold below which a pivot counts as zero.
const RANK_TOLERANCE: f64 = 1e-10;
/// Residual-to-total sum of squares below which the fit counts as exact.
const EXACT_FIT: f64 = 1e-24;

/// OLS of the response on `predictors` (plus intercept) via Householder QR.
pub fn ols_regress(table: &VariableTable, predictors: &[&str]) -> Result<RegressionModel> {
    let response = table.response();
    let mut indices = Vec::with_capacity(predictors.len());
    for name in predictors {
        let i = table.resolve(name)?;
        if table.columns()[i].tag.is_response() {
            return Err(Error::Config(format!(
                "`{name}` is the response, not a predictor"
            )));
        }
        if indices.contains(&i) {
            return Err(Error::Config(format!("predictor `{name}` listed twice")));
        }
        indices.push(i);
    }
    let n = table.rows();
    let q = indices.len();
    if n <= q + 1 {
        return Err(Error::TooFewRows {
            required: q + 1,
            actual: n,
        });
    }
    let y = &response.values;
    let sd_y = sample_sd(y);
    if sd_y == 0.0 {
        return Err(Error::ZeroVariance(response.name.clone()));
    }

    let names: Vec<String> = indices
        .iter()
        .map(|&i| table.columns()[i].name.clone())
        .collect();
    let x = DMatrix::from_fn(n, q + 1, |row, col| {
        if col == 0 {
            1.0
        } else {
            table.columns()[indices[col - 1]].values[row]
        }
    });
    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let r = qr.r();
    for j in 0..=q {
        let norm = x.column(j).norm();
        if r[(j, j)].abs() <= RANK_TOLERANCE * norm.max(f64::MIN_POSITIVE) {
            let name = if j == 0 {
                "(constant)".to_string()
            } else {
                names[j - 1].clone()
            };
            return Err(Error::RankDeficient(name));
        }
    }
    let qty = qr.q().transpose() * &yv;
    let b = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::RankDeficient("(design)".into()))?;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(q + 1, q + 1))
        .ok_or_else(|| Error::RankDeficient("(design)".into()))?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let residuals = &yv - &x * &b;
    let sse = residuals.norm_squared();
    let mean_y = yv.mean();
    let sst: f64 = y.iter().map(|v| (v - mean_y).powi(2)).sum();
    let df = n - q - 1;
    let exact = sse <= EXACT_FIT * sst;
    let sigma2 = if exact { 0.0 } else { sse / df as f64 };
    let r_squared = if exact { 1.0 } else { 1.0 - sse / sst };

    let coefficient = |j: usize, name: String, beta: Option<f64>| {
        let se = (sigma2 * xtx_inv[(j, j)]).max(0.0).sqrt();
        let t = if se == 0.0 {
            if b[j] == 0.0 {
                f64::NAN
            } else {
                b[j].signum() * f64::INFINITY
            }
        } else {
            b[j] / se
        };
        Coefficient {
            name,
            b: b[j],
            se,
            beta,
            t,
            p: student_t_two_tailed(t, df as f64),
        }
    };
    let intercept = coefficient(0, "(constant)".into(), None);
    let coefficients = names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let sd_x = sample_sd(&table.columns()[indices[j]].values);
            coefficient(j + 1, name.clone(), Some(b[j + 1] * sd_x / sd_y))
        })
        .collect();
    Ok(RegressionModel {
        response: response.name.clone(),
        predictors: names,
        n,
        df_residual: df,
        intercept,
        coefficients,
        r: r_squared.max(0.0).sqrt(),
        r_squared,
        se_estimate: sigma2.sqrt(),
        sse,
        sst,
    })
}
