//! The ALTO fixtures under `fixtures/` at the repository root.

use std::path::PathBuf;

use lla_core::evaluation::{predictions_from_documents, score, GroundTruth};
use lla_core::rules::Annotator;
use lla_core::{parse_alto_named, Document, ElementKind};

/// Well-formed fixtures, in a fixed order.
pub const NAMES: [&str; 3] = ["newspaper_3c", "3col_page", "2col_page"];

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn path(file: &str) -> PathBuf {
    dir().join(file)
}

pub fn load(name: &str) -> Document {
    let bytes = std::fs::read(path(&format!("{name}.xml"))).unwrap();
    parse_alto_named(&bytes, name).unwrap()
}

pub fn truth(name: &str) -> GroundTruth {
    let mut t = GroundTruth::read_csv(std::fs::File::open(path(&format!("{name}.truth.csv"))).unwrap()).unwrap();
    t.read_layouts(std::fs::File::open(path("layouts.csv")).unwrap()).unwrap();
    t
}

/// Share of non-Other elements, blocks and lines together, labelled right
/// by the shipped rules.
pub fn rule_accuracy(name: &str) -> f64 {
    let mut doc = load(name);
    Annotator::default().annotate(&mut doc).unwrap();
    let preds = predictions_from_documents(&[doc]).unwrap();
    let report = score(&preds, &truth(name)).unwrap();
    let (b, l) = (report.kind(ElementKind::Block), report.kind(ElementKind::Line));
    (b.confusion.correct() + l.confusion.correct()) as f64 / (b.confusion.total() + l.confusion.total()) as f64
}
