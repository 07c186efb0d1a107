//! Binning of numeric features and the candidate conditions built on it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::data::{Column, Dataset};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Binning {
    /// Cut points at quantiles so bins hold about the same number of rows.
    #[default]
    EqualFrequency,
    /// Cut points evenly spaced between the minimum and maximum.
    EqualWidth,
}

/// Cut points of one numeric feature. With cuts `c0 < c1 < ...` the bins
/// are `(-inf, c0]`, `(c0, c1]`, ..., `(c_last, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureBins {
    pub feature: String,
    pub cuts: Vec<f64>,
}

/// One bin; `None` bounds are unbounded. The lower bound is exclusive and
/// the upper bound inclusive.
#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub feature: String,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl FeatureBins {
    pub fn bins(&self) -> Vec<Bin> {
        (0..=self.cuts.len())
            .map(|b| Bin {
                feature: self.feature.clone(),
                lower: b.checked_sub(1).map(|i| self.cuts[i]),
                upper: self.cuts.get(b).copied(),
            })
            .collect()
    }

    /// Index of the bin holding `v`.
    pub fn bin_of(&self, v: f64) -> usize {
        self.cuts.partition_point(|c| *c < v)
    }
}

/// Cut points for `values`. Duplicate cuts are merged and a cut equal to the
/// maximum is dropped, so a constant feature gets a single bin.
pub fn cut_points(values: &[f64], n_bins: usize, binning: Binning) -> Result<Vec<f64>> {
    if n_bins < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 bins, got {n_bins}")));
    }
    let mut sorted: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    if sorted.is_empty() {
        return Ok(Vec::new());
    }
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let (min, max) = (sorted[0], sorted[n - 1]);
    let mut cuts: Vec<f64> = match binning {
        Binning::EqualFrequency => (1..n_bins).map(|i| sorted[(i * n).div_ceil(n_bins) - 1]).collect(),
        Binning::EqualWidth => (1..n_bins)
            .map(|i| min + (max - min) * i as f64 / n_bins as f64)
            .collect(),
    };
    cuts.dedup();
    cuts.retain(|c| *c < max);
    Ok(cuts)
}

/// Bins every numeric column. Returns the bin index of each row for the
/// numeric columns, in column order, together with the cut points; boolean
/// and categorical columns are left as they are.
pub fn discretize(data: &Dataset, n_bins: usize, binning: Binning) -> Result<(Vec<Vec<usize>>, Vec<FeatureBins>)> {
    let mut binned = Vec::new();
    let mut bins = Vec::new();
    for (name, col) in data.names().iter().zip(data.columns()) {
        if let Column::Numeric(values) = col {
            let fb = FeatureBins { feature: name.clone(), cuts: cut_points(values, n_bins, binning)? };
            binned.push(values.iter().map(|v| fb.bin_of(*v)).collect());
            bins.push(fb);
        }
    }
    Ok((binned, bins))
}

/// The test part of a condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Test {
    /// `lower < v <= upper`; a missing bound is unbounded.
    Range { lower: Option<f64>, upper: Option<f64> },
    Is(bool),
    /// Categorical equality; a missing value compares as `none`.
    Equals(String),
}

/// A single test on one feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub feature: String,
    pub test: Test,
}

impl Condition {
    /// Whether the condition holds for row `i` of `col`. A condition whose
    /// type does not match the column is an error.
    pub fn holds(&self, col: &Column, i: usize) -> Result<bool> {
        match (&self.test, col) {
            (Test::Range { lower, upper }, Column::Numeric(v)) => {
                let x = v[i];
                Ok(lower.is_none_or(|lo| x > lo) && upper.is_none_or(|hi| x <= hi))
            }
            (Test::Is(b), Column::Boolean(v)) => Ok(v[i] == *b),
            (Test::Equals(s), Column::Categorical(v)) => {
                Ok(v[i].as_deref().unwrap_or("none").eq_ignore_ascii_case(s))
            }
            _ => Err(Error::InvalidArgument(format!(
                "condition on `{}` does not match the column type",
                self.feature
            ))),
        }
    }
}

/// All conditions the learner may add, in tie-break order: columns in order;
/// within a numeric column single bins, then `<=` prefixes, then `>`
/// suffixes, each from the lowest bin up; booleans `true` then `false`;
/// categories in sorted order.
pub fn candidate_conditions(data: &Dataset, bins: &[FeatureBins]) -> Vec<Condition> {
    let mut out = Vec::new();
    for (name, col) in data.names().iter().zip(data.columns()) {
        let cond = |test| Condition { feature: name.clone(), test };
        match col {
            Column::Numeric(_) => {
                let Some(fb) = bins.iter().find(|b| &b.feature == name) else { continue };
                let m = fb.cuts.len();
                if m == 0 {
                    continue;
                }
                for b in fb.bins() {
                    out.push(cond(Test::Range { lower: b.lower, upper: b.upper }));
                }
                for j in 1..m {
                    out.push(cond(Test::Range { lower: None, upper: Some(fb.cuts[j]) }));
                }
                for j in 0..m - 1 {
                    out.push(cond(Test::Range { lower: Some(fb.cuts[j]), upper: None }));
                }
            }
            Column::Boolean(_) => {
                out.push(cond(Test::Is(true)));
                out.push(cond(Test::Is(false)));
            }
            Column::Categorical(v) => {
                let mut values: Vec<String> =
                    v.iter().map(|c| c.clone().unwrap_or_else(|| "none".into()).to_lowercase()).collect();
                values.sort();
                values.dedup();
                if values.len() > 1 {
                    out.extend(values.into_iter().map(|s| cond(Test::Equals(s))));
                }
            }
        }
    }
    out
}
