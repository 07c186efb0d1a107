//! A 20-line confusion fixture with P/R/F1 worked out by hand.
//!
//! Truth -> prediction counts:
//!   Text: 6 Text, 1 Firstline, 1 Title
//!   Title: 3 Title, 1 Text
//!   Header: 2 Header, 1 Text
//!   Firstline: 3 Firstline, 1 Text, 1 Other

use lla_core::evaluation::{score, ElementKey, GroundTruth, Metrics, Prediction};
use lla_core::ElementKind;
use lla_core::LogicalLabel::{self, *};

pub const PAIRS: [(LogicalLabel, LogicalLabel, usize); 10] = [
    (Text, Text, 6),
    (Text, Firstline, 1),
    (Text, Title, 1),
    (Title, Title, 3),
    (Title, Text, 1),
    (Header, Header, 2),
    (Header, Text, 1),
    (Firstline, Firstline, 3),
    (Firstline, Text, 1),
    (Firstline, Other, 1),
];

/// (label, precision, recall, f1, support)
pub const EXPECTED: [(LogicalLabel, f64, f64, f64, usize); 4] = [
    (Text, 0.666666666666667, 0.75, 0.705882352941176, 8),
    (Title, 0.75, 0.75, 0.75, 4),
    (Header, 1.0, 0.666666666666667, 0.8, 3),
    (Firstline, 0.75, 0.6, 0.666666666666667, 5),
];

pub const ACCURACY: f64 = 0.7;

pub fn fixture() -> (Vec<Prediction>, GroundTruth) {
    let mut truth = GroundTruth::new();
    let mut preds = Vec::new();
    let mut n = 0;
    for (t, p, count) in PAIRS {
        for _ in 0..count {
            n += 1;
            let key = ElementKey { document_id: "d".into(), kind: ElementKind::Line, element_id: format!("l{n}") };
            truth.insert(key, t).unwrap();
            preds.push(Prediction {
                document_id: Some("d".into()),
                kind: Some(ElementKind::Line),
                element_id: format!("l{n}"),
                label: p,
            });
        }
    }
    (preds, truth)
}

pub fn check_fixture() -> Result<(), String> {
    let (preds, truth) = fixture();
    let report = score(&preds, &truth).map_err(|e| e.to_string())?;
    let lines = report.kind(ElementKind::Line);
    for (label, p, r, f1, support) in EXPECTED {
        let m = lines.label(label).ok_or(format!("{label} missing"))?.mean;
        for (name, got, want) in [("precision", m.precision, p), ("recall", m.recall, r), ("f1", m.f1, f1)] {
            if (got - want).abs() > 1e-9 {
                return Err(format!("{label} {name}: got {got}, want {want}"));
            }
        }
        if m.support != support {
            return Err(format!("{label} support: got {}, want {support}", m.support));
        }
    }
    if (lines.accuracy() - ACCURACY).abs() > 1e-12 {
        return Err(format!("accuracy {}", lines.accuracy()));
    }
    Ok(())
}

/// Mean row over the three TextBlock Text rows of the rule-based system.
pub fn check_table_mean() -> Result<(), String> {
    let row = |p, r, f1| Metrics { precision: p, recall: r, f1, support: 0 };
    let mean = Metrics::mean(&[row(0.947, 0.938, 0.942), row(0.973, 0.989, 0.981), row(0.958, 0.973, 0.965)]);
    for (name, got, want) in [("precision", mean.precision, 0.959), ("recall", mean.recall, 0.966), ("f1", mean.f1, 0.962)] {
        if (got - want).abs() > 0.001 {
            return Err(format!("mean {name}: got {got:.4}, want {want}"));
        }
    }
    Ok(())
}
