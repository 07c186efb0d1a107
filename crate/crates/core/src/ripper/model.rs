//! Prediction with induced rules and the one-vs-rest ensemble.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alto::ElementKind;
use crate::error::{Error, Result};
use crate::label::LogicalLabel;

use super::data::{Column, Dataset};
use super::discretize::Condition;
use super::learn::{fit_stream, BinaryModel, Hyperparameters};

fn bind<'d>(data: &'d Dataset, conditions: &'d [Condition]) -> Result<Vec<(&'d Condition, &'d Column)>> {
    conditions
        .iter()
        .map(|c| {
            data.column(&c.feature)
                .map(|col| (c, col))
                .ok_or_else(|| Error::MissingFeature(c.feature.clone()))
        })
        .collect()
}

fn all_hold(bound: &[(&Condition, &Column)], row: usize) -> Result<bool> {
    for (c, col) in bound {
        if !c.holds(col, row)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Laplace-smoothed precision.
fn laplace(p: usize, n: usize) -> f64 {
    (p as f64 + 1.0) / ((p + n) as f64 + 2.0)
}

impl BinaryModel {
    /// For every rule, which rows it matches.
    pub fn rule_matches(&self, data: &Dataset) -> Result<Vec<Vec<bool>>> {
        self.rules
            .iter()
            .map(|r| {
                let bound = bind(data, &r.conditions)?;
                (0..data.rows()).map(|i| all_hold(&bound, i)).collect()
            })
            .collect()
    }

    /// Index of the first rule matching each row.
    pub fn first_match(&self, data: &Dataset) -> Result<Vec<Option<usize>>> {
        let bound: Vec<_> = self.rules.iter().map(|r| bind(data, &r.conditions)).collect::<Result<_>>()?;
        (0..data.rows())
            .map(|i| {
                for (ri, b) in bound.iter().enumerate() {
                    if all_hold(b, i)? {
                        return Ok(Some(ri));
                    }
                }
                Ok(None)
            })
            .collect()
    }

    /// True where some rule matches.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<bool>> {
        Ok(self.first_match(data)?.into_iter().map(|m| m.is_some()).collect())
    }

    /// Probability of the positive class: the Laplace precision of the first
    /// matching rule on the training data, or of the unmatched training rows.
    pub fn predict_scores(&self, data: &Dataset) -> Result<Vec<f64>> {
        Ok(self
            .first_match(data)?
            .into_iter()
            .map(|m| match m {
                Some(r) => laplace(self.rules[r].train_positives, self.rules[r].train_negatives),
                None => laplace(self.uncovered_positives, self.uncovered_negatives),
            })
            .collect())
    }
}

/// One binary model per label; predicts the label with the highest score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneVsRest {
    pub kind: ElementKind,
    pub models: Vec<BinaryModel>,
}

impl OneVsRest {
    /// Scores of every model, then the argmax label for each row. Ties go to
    /// the earlier model.
    pub fn predict(&self, data: &Dataset) -> Result<Vec<LogicalLabel>> {
        let scores: Vec<Vec<f64>> = self.models.iter().map(|m| m.predict_scores(data)).collect::<Result<_>>()?;
        Ok((0..data.rows())
            .map(|i| {
                let mut best = 0;
                for m in 1..scores.len() {
                    if scores[m][i] > scores[best][i] {
                        best = m;
                    }
                }
                self.models[best].positive
            })
            .collect())
    }

    pub fn rule_count(&self) -> usize {
        self.models.iter().map(|m| m.rules.len()).sum()
    }
}

/// Trains one model per label present in `labels`, in tagset order. Each
/// model draws from its own random stream so results do not depend on
/// scheduling.
pub fn fit_one_vs_rest(
    data: &Dataset,
    labels: &[LogicalLabel],
    params: Hyperparameters,
    seed: u64,
) -> Result<OneVsRest> {
    if labels.len() != data.rows() {
        return Err(Error::InvalidArgument(format!("{} labels for {} rows", labels.len(), data.rows())));
    }
    let classes: Vec<LogicalLabel> = LogicalLabel::TAGSET
        .into_iter()
        .filter(|c| labels.contains(c))
        .collect();
    if classes.len() < 2 {
        return Err(Error::SingleClass);
    }
    let models = classes
        .par_iter()
        .enumerate()
        .map(|(i, &class)| {
            let binary: Vec<bool> = labels.iter().map(|l| *l == class).collect();
            fit_stream(data, &binary, class, params, seed, i as u64 + 1)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OneVsRest { kind: data.kind(), models })
}
