//! Hyperparameter search with stratified cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::LogicalLabel;

use super::data::Dataset;
use super::discretize::Binning;
use super::learn::{fit_stream, Hyperparameters};
use super::metrics::Confusion;

/// Values tried for each hyperparameter; the grid is their product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub prune_size: Vec<f64>,
    pub k: Vec<usize>,
    pub dl_allowance: Vec<f64>,
    pub n_discretize_bins: Vec<usize>,
}

impl Default for HyperGrid {
    fn default() -> Self {
        HyperGrid {
            prune_size: vec![0.25, 0.33, 0.5],
            k: vec![1, 2],
            dl_allowance: vec![32.0, 64.0, 128.0],
            n_discretize_bins: vec![5, 10, 20, 30],
        }
    }
}

impl HyperGrid {
    /// Every combination, in lexicographic order of the fields.
    pub fn points(&self) -> Vec<Hyperparameters> {
        let mut out = Vec::new();
        for &prune_size in &self.prune_size {
            for &k in &self.k {
                for &dl_allowance in &self.dl_allowance {
                    for &n_discretize_bins in &self.n_discretize_bins {
                        out.push(Hyperparameters {
                            prune_size,
                            k,
                            dl_allowance,
                            n_discretize_bins,
                            binning: Binning::EqualFrequency,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Cross-validated result of one combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScore {
    pub params: Hyperparameters,
    /// F1 on each evaluated fold.
    pub fold_f1: Vec<f64>,
    pub mean_f1: f64,
    /// Rules summed over folds.
    pub total_rules: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub best: Hyperparameters,
    pub scores: Vec<GridScore>,
    /// Folds left out because one side lacked a class.
    pub skipped_folds: Vec<usize>,
}

/// Assigns rows to `folds` folds, spreading each class evenly.
pub fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    for class in [true, false] {
        let mut idx: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            assignment[i] = pos % folds;
        }
    }
    assignment
}

/// Scores every grid point by mean F1 of the positive class over stratified
/// folds. The best point has the highest mean F1, then the fewest rules,
/// then comes first in grid order.
pub fn grid_search(
    data: &Dataset,
    labels: &[bool],
    positive: LogicalLabel,
    grid: &HyperGrid,
    folds: usize,
    seed: u64,
) -> Result<GridResult> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    if labels.len() != data.rows() {
        return Err(Error::InvalidArgument(format!("{} labels for {} rows", labels.len(), data.rows())));
    }
    let points = grid.points();
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty hyperparameter grid".into()));
    }
    let assignment = stratified_folds(labels, folds, seed);
    let mut usable = Vec::new();
    let mut skipped_folds = Vec::new();
    for f in 0..folds {
        let test: Vec<usize> = (0..labels.len()).filter(|&i| assignment[i] == f).collect();
        let train: Vec<usize> = (0..labels.len()).filter(|&i| assignment[i] != f).collect();
        let has_both = |idx: &[usize]| idx.iter().any(|&i| labels[i]) && idx.iter().any(|&i| !labels[i]);
        if has_both(&test) && has_both(&train) {
            usable.push((f, train, test));
        } else {
            log::warn!("fold {f} lacks a class and is skipped");
            skipped_folds.push(f);
        }
    }
    if usable.is_empty() {
        return Err(Error::SingleClass);
    }
    let folds_data: Vec<_> = usable
        .iter()
        .map(|(_, train, test)| {
            let y_train: Vec<bool> = train.iter().map(|&i| labels[i]).collect();
            let y_test: Vec<bool> = test.iter().map(|&i| labels[i]).collect();
            (data.select(train), y_train, data.select(test), y_test)
        })
        .collect();

    let tasks: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|p| (0..folds_data.len()).map(move |f| (p, f)))
        .collect();
    let results: Vec<(f64, usize)> = tasks
        .par_iter()
        .map(|&(p, f)| {
            let (train, y_train, test, y_test) = &folds_data[f];
            let stream = (p * folds_data.len() + f) as u64 + 1;
            let model = fit_stream(train, y_train, positive, points[p], seed, stream)?;
            let predicted = model.predict(test)?;
            let mut c = Confusion::default();
            for (pred, truth) in predicted.iter().zip(y_test) {
                match (pred, truth) {
                    (true, true) => c.true_positives += 1,
                    (true, false) => c.false_positives += 1,
                    (false, true) => c.false_negatives += 1,
                    (false, false) => c.true_negatives += 1,
                }
            }
            Ok((c.f1(), model.rules.len()))
        })
        .collect::<Result<_>>()?;

    let scores: Vec<GridScore> = points
        .iter()
        .enumerate()
        .map(|(p, params)| {
            let per_fold = &results[p * folds_data.len()..(p + 1) * folds_data.len()];
            let fold_f1: Vec<f64> = per_fold.iter().map(|r| r.0).collect();
            GridScore {
                params: *params,
                mean_f1: fold_f1.iter().sum::<f64>() / fold_f1.len() as f64,
                fold_f1,
                total_rules: per_fold.iter().map(|r| r.1).sum(),
            }
        })
        .collect();
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        let b = &scores[best];
        if s.mean_f1 > b.mean_f1 || (s.mean_f1 == b.mean_f1 && s.total_rules < b.total_rules) {
            best = i;
        }
    }
    Ok(GridResult { best: scores[best].params, scores, skipped_folds })
}
