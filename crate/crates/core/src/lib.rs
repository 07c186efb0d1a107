//! Logical layout analysis for XML ALTO documents.
//!
//! The crate parses ALTO into a [`Document`], computes line, block and
//! document features, labels elements with a declarative rule set or with
//! RIPPER-induced rules, and scores any labeller against ground truth.

pub mod alto;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod label;
pub mod ripper;
pub mod rules;

pub use alto::{parse_alto, parse_alto_named, write_annotated, Document, ElementKind, OutputFormat, Page, TextBlock, TextLine};
pub use error::{Error, Result};
pub use features::{DocumentFeatures, DocumentMatrix, FeatureConfig, HeaderWordSet};
pub use label::LogicalLabel;
pub use evaluation::{
    compare, load_predictions, read_predictions, score, Comparison, ElementKey, EvaluationReport, GroundTruth, Layout,
    Metrics, Prediction, PredictionFormat,
};
