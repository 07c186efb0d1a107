//! RIPPER rule induction for binary labels over line or block features,
//! with one-vs-rest prediction and grid search.

mod bits;
mod data;
mod discretize;
mod grid;
mod io;
mod learn;
mod metrics;
mod model;
mod pipeline;

pub use data::{Column, Dataset, FeatureKindName, FeatureSpec};
pub use discretize::{candidate_conditions, cut_points, discretize, Bin, Binning, Condition, FeatureBins, Test};
pub use grid::{grid_search, stratified_folds, GridResult, GridScore, HyperGrid};
pub use io::{condition_expr, expr_conditions};
pub use learn::{fit, BinaryModel, Hyperparameters, InducedRule};
pub use metrics::{description_length, foil_gain, integer_code_bits, log2_binomial, rule_quality, Confusion};
pub use model::{fit_one_vs_rest, OneVsRest};
pub use pipeline::{RipperLabeler, TrainingSet};
