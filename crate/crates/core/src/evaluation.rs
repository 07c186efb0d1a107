//! Scoring labellers against ground truth: per-label, per-layout precision,
//! recall and F1, confusion matrices, and side-by-side model comparison.
//!
//! Elements whose true label is Other are not scored. Predicting Other for
//! any other element counts against that element's true label.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alto::{element_records, Document, ElementKind};
use crate::error::{Error, Result};
use crate::label::{parse_output_label, LogicalLabel};

/// Column layout of a document.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Layout {
    #[serde(rename = "1c")]
    OneColumn,
    #[serde(rename = "2c")]
    TwoColumns,
    #[serde(rename = "3c+")]
    ThreePlus,
}

impl Layout {
    pub const ALL: [Layout; 3] = [Layout::OneColumn, Layout::TwoColumns, Layout::ThreePlus];

    pub fn as_str(self) -> &'static str {
        match self {
            Layout::OneColumn => "1c",
            Layout::TwoColumns => "2c",
            Layout::ThreePlus => "3c+",
        }
    }
}

impl fmt::Display for Layout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Layout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1c" => Ok(Layout::OneColumn),
            "2c" => Ok(Layout::TwoColumns),
            "3c+" | "3c" => Ok(Layout::ThreePlus),
            other => Err(Error::InvalidArgument(format!("unknown layout `{other}`, expected 1c, 2c or 3c+"))),
        }
    }
}

/// Identity of an element across a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementKey {
    pub document_id: String,
    pub kind: ElementKind,
    pub element_id: String,
}

impl fmt::Display for ElementKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}/{}", self.document_id, self.kind.as_str(), self.element_id)
    }
}

/// True labels of elements plus, optionally, the layout of each document.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GroundTruth {
    labels: BTreeMap<ElementKey, LogicalLabel>,
    layouts: BTreeMap<String, Layout>,
}

#[derive(Deserialize)]
struct TruthRow {
    document_id: String,
    element_id: String,
    kind: String,
    label: String,
}

#[derive(Deserialize)]
struct LayoutRow {
    document_id: String,
    layout: String,
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::File { path: path.to_path_buf(), source })
}

fn row_line(pos: Option<&csv::Position>) -> Option<usize> {
    pos.map(|p| p.line() as usize)
}

impl GroundTruth {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one element. A second label for the same element is an error.
    pub fn insert(&mut self, key: ElementKey, label: LogicalLabel) -> Result<()> {
        if label == LogicalLabel::Lastline {
            return Err(Error::UnknownLabel { label: label.name().into(), row: None });
        }
        match self.labels.insert(key.clone(), label) {
            Some(_) => Err(Error::DuplicateId(key.to_string())),
            None => Ok(()),
        }
    }

    pub fn set_layout(&mut self, document_id: impl Into<String>, layout: Layout) {
        self.layouts.insert(document_id.into(), layout);
    }

    pub fn labels(&self) -> &BTreeMap<ElementKey, LogicalLabel> {
        &self.labels
    }

    pub fn layouts(&self) -> &BTreeMap<String, Layout> {
        &self.layouts
    }

    pub fn layout_of(&self, document_id: &str) -> Option<Layout> {
        self.layouts.get(document_id).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Reads `document_id,element_id,kind,label` rows.
    pub fn read_csv(reader: impl Read) -> Result<GroundTruth> {
        let mut truth = GroundTruth::new();
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let mut record = csv::StringRecord::new();
        while rdr.read_record(&mut record)? {
            let line = row_line(record.position());
            let row: TruthRow = record.deserialize(Some(&headers))?;
            let kind: ElementKind = row.kind.parse()?;
            let label = parse_output_label(&row.label, line)?;
            truth.insert(
                ElementKey { document_id: row.document_id, kind, element_id: row.element_id },
                label,
            )?;
        }
        Ok(truth)
    }

    /// Reads a `document_id,layout` manifest into this truth.
    pub fn read_layouts(&mut self, reader: impl Read) -> Result<()> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        for row in rdr.deserialize::<LayoutRow>() {
            let row = row?;
            self.layouts.insert(row.document_id, row.layout.parse()?);
        }
        Ok(())
    }

    /// Loads a truth CSV and, when given, a layout manifest. Every document
    /// in the truth must then have a layout.
    pub fn load(truth_csv: &Path, layouts_csv: Option<&Path>) -> Result<GroundTruth> {
        let mut truth = GroundTruth::read_csv(open(truth_csv)?)?;
        if let Some(path) = layouts_csv {
            truth.read_layouts(open(path)?)?;
            truth.check_layouts()?;
        }
        Ok(truth)
    }

    fn check_layouts(&self) -> Result<()> {
        let missing: BTreeSet<&str> = self
            .labels
            .keys()
            .map(|k| k.document_id.as_str())
            .filter(|d| !self.layouts.contains_key(*d))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "no layout for document(s) {}",
                missing.into_iter().collect::<Vec<_>>().join(", ")
            )))
        }
    }

    /// Truth taken from labelled documents.
    pub fn from_documents(docs: &[Document]) -> Result<GroundTruth> {
        let mut truth = GroundTruth::new();
        for p in predictions_from_documents(docs)? {
            truth.insert(
                ElementKey {
                    document_id: p.document_id.unwrap_or_default(),
                    kind: p.kind.expect("records carry a kind"),
                    element_id: p.element_id,
                },
                p.label,
            )?;
        }
        Ok(truth)
    }

    /// Checks that every element of the truth exists in `docs`.
    pub fn check_documents(&self, docs: &[Document]) -> Result<()> {
        let mut present = BTreeSet::new();
        for d in docs {
            for b in d.blocks() {
                present.insert(ElementKey { document_id: d.id.clone(), kind: ElementKind::Block, element_id: b.id.clone() });
            }
            for l in d.lines() {
                present.insert(ElementKey { document_id: d.id.clone(), kind: ElementKind::Line, element_id: l.id.clone() });
            }
        }
        let missing: Vec<String> = self.labels.keys().filter(|k| !present.contains(*k)).map(|k| k.to_string()).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(Error::IdMismatch(missing))
        }
    }
}

/// One predicted label. Document id and kind may be omitted when the element
/// id alone identifies the element in the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub document_id: Option<String>,
    pub kind: Option<ElementKind>,
    pub element_id: String,
    pub label: LogicalLabel,
}

#[derive(Deserialize)]
struct RawPrediction {
    #[serde(alias = "documentId", default)]
    document_id: Option<String>,
    #[serde(alias = "elementKind", default)]
    kind: Option<String>,
    #[serde(alias = "elementId")]
    element_id: String,
    label: String,
}

impl RawPrediction {
    fn into_prediction(self, row: usize) -> Result<Prediction> {
        let kind = match self.kind.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(k) => Some(k.parse::<ElementKind>()?),
        };
        Ok(Prediction {
            document_id: self.document_id.filter(|d| !d.trim().is_empty()),
            kind,
            element_id: self.element_id,
            label: parse_output_label(&self.label, Some(row))?,
        })
    }
}

/// Format of a predictions file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredictionFormat {
    Csv,
    /// JSON lines, or a single JSON array of objects.
    Json,
}

impl PredictionFormat {
    /// Guessed from the file extension; anything but `.json`/`.jsonl` is CSV.
    pub fn from_path(path: &Path) -> PredictionFormat {
        match path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref() {
            Some("json" | "jsonl" | "ndjson") => PredictionFormat::Json,
            _ => PredictionFormat::Csv,
        }
    }
}

/// Parses predictions with columns `element_id,label` and optionally
/// `document_id` and `kind`. Rows are numbered by file line.
pub fn read_predictions(text: &str, format: PredictionFormat) -> Result<Vec<Prediction>> {
    match format {
        PredictionFormat::Csv => {
            let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
            let mut out = Vec::new();
            let mut record = csv::StringRecord::new();
            let headers = rdr.headers()?.clone();
            while rdr.read_record(&mut record)? {
                let line = row_line(record.position()).unwrap_or(0);
                let raw: RawPrediction = record.deserialize(Some(&headers))?;
                out.push(raw.into_prediction(line)?);
            }
            Ok(out)
        }
        PredictionFormat::Json => {
            if text.trim_start().starts_with('[') {
                let rows: Vec<RawPrediction> = serde_json::from_str(text)?;
                return rows.into_iter().enumerate().map(|(i, r)| r.into_prediction(i + 1)).collect();
            }
            let mut out = Vec::new();
            for (i, line) in text.lines().enumerate() {
                if line.trim().is_empty() {
                    continue;
                }
                let raw: RawPrediction = serde_json::from_str(line)?;
                out.push(raw.into_prediction(i + 1)?);
            }
            Ok(out)
        }
    }
}

/// Reads a predictions file; `format` defaults to the one implied by the
/// extension.
pub fn load_predictions(path: &Path, format: Option<PredictionFormat>) -> Result<Vec<Prediction>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::File { path: path.to_path_buf(), source })?;
    read_predictions(&text, format.unwrap_or_else(|| PredictionFormat::from_path(path)))
}

/// Labels currently held by annotated documents.
pub fn predictions_from_documents(docs: &[Document]) -> Result<Vec<Prediction>> {
    let mut out = Vec::new();
    for d in docs {
        for r in element_records(d)? {
            out.push(Prediction {
                document_id: Some(r.document_id),
                kind: Some(r.kind),
                label: parse_output_label(&r.label, None)?,
                element_id: r.element_id,
            });
        }
    }
    Ok(out)
}

/// Matches predictions to truth keys. Predictions for unknown elements and
/// scored truth elements without a prediction are both reported. Truth
/// elements labelled Other need no prediction.
fn align(predictions: &[Prediction], truth: &GroundTruth) -> Result<BTreeMap<ElementKey, LogicalLabel>> {
    let mut by_id: HashMap<&str, Vec<&ElementKey>> = HashMap::new();
    for k in truth.labels.keys() {
        by_id.entry(k.element_id.as_str()).or_default().push(k);
    }
    let mut aligned = BTreeMap::new();
    let mut unknown = Vec::new();
    for p in predictions {
        let matches: Vec<&ElementKey> = by_id
            .get(p.element_id.as_str())
            .map(|ks| {
                ks.iter()
                    .copied()
                    .filter(|k| p.document_id.as_ref().is_none_or(|d| *d == k.document_id))
                    .filter(|k| p.kind.is_none_or(|kind| kind == k.kind))
                    .collect()
            })
            .unwrap_or_default();
        match matches.as_slice() {
            [] => unknown.push(format!(
                "{}/{}/{} (prediction only)",
                p.document_id.as_deref().unwrap_or("*"),
                p.kind.map(ElementKind::as_str).unwrap_or("*"),
                p.element_id
            )),
            [k] => {
                if aligned.insert((*k).clone(), p.label).is_some() {
                    return Err(Error::DuplicateId(k.to_string()));
                }
            }
            _ => {
                return Err(Error::InvalidArgument(format!(
                    "prediction for `{}` matches {} elements; add document_id and kind",
                    p.element_id,
                    matches.len()
                )))
            }
        }
    }
    for (k, l) in &truth.labels {
        if *l != LogicalLabel::Other && !aligned.contains_key(k) {
            unknown.push(format!("{k} (truth only)"));
        }
    }
    if unknown.is_empty() {
        Ok(aligned)
    } else {
        Err(Error::IdMismatch(unknown))
    }
}

/// Precision, recall and F1 of one label with its support.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

impl Metrics {
    /// From one-vs-rest counts; undefined ratios are 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize) -> Metrics {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 { 2.0 * precision * recall / (precision + recall) } else { 0.0 };
        Metrics { precision, recall, f1, support: tp + fn_ }
    }

    /// Unweighted mean of each ratio; supports are summed.
    pub fn mean(items: &[Metrics]) -> Metrics {
        if items.is_empty() {
            return Metrics::default();
        }
        let n = items.len() as f64;
        Metrics {
            precision: items.iter().map(|m| m.precision).sum::<f64>() / n,
            recall: items.iter().map(|m| m.recall).sum::<f64>() / n,
            f1: items.iter().map(|m| m.f1).sum::<f64>() / n,
            support: items.iter().map(|m| m.support).sum(),
        }
    }
}

/// Scores of one label for one element kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelScores {
    pub label: LogicalLabel,
    /// Per layout, for the layouts present in the truth for this kind.
    pub by_layout: BTreeMap<Layout, Metrics>,
    /// Unweighted mean over `by_layout`; equals `pooled` without layouts.
    pub mean: Metrics,
    /// Computed from counts pooled over all documents.
    pub pooled: Metrics,
}

/// Rows are true labels, columns predicted labels, both in
/// [`LogicalLabel::TAGSET`] order; the Other row stays empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<LogicalLabel>,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    fn new() -> Self {
        let n = LogicalLabel::TAGSET.len();
        ConfusionMatrix { labels: LogicalLabel::TAGSET.to_vec(), counts: vec![vec![0; n]; n] }
    }

    fn index(&self, l: LogicalLabel) -> usize {
        self.labels.iter().position(|x| *x == l).expect("tagset label")
    }

    pub fn get(&self, truth: LogicalLabel, predicted: LogicalLabel) -> usize {
        self.counts[self.index(truth)][self.index(predicted)]
    }

    fn add(&mut self, truth: LogicalLabel, predicted: LogicalLabel) {
        let (t, p) = (self.index(truth), self.index(predicted));
        self.counts[t][p] += 1;
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn correct(&self) -> usize {
        (0..self.labels.len()).map(|i| self.counts[i][i]).sum()
    }
}

/// Scores of one element kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindReport {
    pub kind: ElementKind,
    pub labels: Vec<LabelScores>,
    pub confusion: ConfusionMatrix,
    pub confusion_by_layout: BTreeMap<Layout, ConfusionMatrix>,
}

impl KindReport {
    /// Share of scored elements whose prediction is right.
    pub fn accuracy(&self) -> f64 {
        let total = self.confusion.total();
        if total == 0 {
            0.0
        } else {
            self.confusion.correct() as f64 / total as f64
        }
    }

    pub fn label(&self, label: LogicalLabel) -> Option<&LabelScores> {
        self.labels.iter().find(|s| s.label == label)
    }
}

/// Scores of one labeller on one ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Layouts broken down, empty when the truth has none.
    pub layouts: Vec<Layout>,
    pub kinds: Vec<KindReport>,
    /// Truth elements left out because they are Other.
    pub excluded_other: usize,
}

/// Labels scored for a kind: blocks are never Firstline.
pub fn scored_labels(kind: ElementKind) -> Vec<LogicalLabel> {
    LogicalLabel::SCORED
        .into_iter()
        .filter(|l| kind == ElementKind::Line || l.valid_for_block())
        .collect()
}

fn label_metrics(c: &ConfusionMatrix, label: LogicalLabel) -> Metrics {
    let i = c.index(label);
    let tp = c.counts[i][i];
    let fn_: usize = c.counts[i].iter().sum::<usize>() - tp;
    let fp: usize = (0..c.labels.len()).map(|t| c.counts[t][i]).sum::<usize>() - tp;
    Metrics::from_counts(tp, fp, fn_)
}

/// Scores `predictions` against `truth`. With layouts in the truth, every
/// label gets one row per layout present and a mean row over those layouts.
pub fn score(predictions: &[Prediction], truth: &GroundTruth) -> Result<EvaluationReport> {
    let aligned = align(predictions, truth)?;
    let use_layouts = !truth.layouts.is_empty();
    if use_layouts {
        truth.check_layouts()?;
    }
    let mut excluded_other = 0;
    let mut pooled: BTreeMap<ElementKind, ConfusionMatrix> = BTreeMap::new();
    let mut per_layout: BTreeMap<(ElementKind, Layout), ConfusionMatrix> = BTreeMap::new();
    for (key, t) in &truth.labels {
        if *t == LogicalLabel::Other {
            excluded_other += 1;
            continue;
        }
        let p = aligned[key];
        pooled.entry(key.kind).or_insert_with(ConfusionMatrix::new).add(*t, p);
        if use_layouts {
            let layout = truth.layouts[&key.document_id];
            per_layout.entry((key.kind, layout)).or_insert_with(ConfusionMatrix::new).add(*t, p);
        }
    }
    let mut kinds = Vec::new();
    for kind in [ElementKind::Block, ElementKind::Line] {
        let confusion = pooled.remove(&kind).unwrap_or_else(ConfusionMatrix::new);
        let confusion_by_layout: BTreeMap<Layout, ConfusionMatrix> = per_layout
            .iter()
            .filter(|((k, _), _)| *k == kind)
            .map(|((_, l), c)| (*l, c.clone()))
            .collect();
        let labels = scored_labels(kind)
            .into_iter()
            .map(|label| {
                let by_layout: BTreeMap<Layout, Metrics> =
                    confusion_by_layout.iter().map(|(l, c)| (*l, label_metrics(c, label))).collect();
                let pooled = label_metrics(&confusion, label);
                let mean = if use_layouts { Metrics::mean(&by_layout.values().copied().collect::<Vec<_>>()) } else { pooled };
                LabelScores { label, by_layout, mean, pooled }
            })
            .collect();
        kinds.push(KindReport { kind, labels, confusion, confusion_by_layout });
    }
    let layouts = if use_layouts {
        let present: BTreeSet<Layout> = per_layout.keys().map(|(_, l)| *l).collect();
        present.into_iter().collect()
    } else {
        Vec::new()
    };
    Ok(EvaluationReport { layouts, kinds, excluded_other })
}

impl EvaluationReport {
    pub fn kind(&self, kind: ElementKind) -> &KindReport {
        self.kinds.iter().find(|k| k.kind == kind).expect("both kinds are always reported")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Aligned table: one row per label and layout plus a Mean row, with
    /// block and line columns side by side.
    pub fn to_text(&self) -> String {
        let rows: Vec<(LogicalLabel, Option<Layout>)> = LogicalLabel::SCORED
            .into_iter()
            .flat_map(|label| {
                let mut r: Vec<_> = self.layouts.iter().map(|l| (label, Some(*l))).collect();
                r.push((label, None));
                r
            })
            .collect();
        let cell = |kind: ElementKind, label: LogicalLabel, layout: Option<Layout>| -> [String; 3] {
            let k = self.kind(kind);
            match k.label(label) {
                None => ["-".into(), "-".into(), "-".into()],
                Some(s) => {
                    let m = match layout {
                        Some(l) => s.by_layout.get(&l).copied(),
                        None => Some(s.mean),
                    };
                    match m {
                        Some(m) => [format!("{:.3}", m.precision), format!("{:.3}", m.recall), format!("{:.3}", m.f1)],
                        None => ["-".into(), "-".into(), "-".into()],
                    }
                }
            }
        };
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:<7} | {:>9} {:>9} {:>9} | {:>9} {:>9} {:>9}",
            "", "", "TextBlock", "", "", "TextLine", "", ""
        );
        let _ = writeln!(
            out,
            "{:<10} {:<7} | {:>9} {:>9} {:>9} | {:>9} {:>9} {:>9}",
            "Label", "Layout", "P", "R", "F1", "P", "R", "F1"
        );
        for (label, layout) in rows {
            let b = cell(ElementKind::Block, label, layout);
            let l = cell(ElementKind::Line, label, layout);
            let name = match layout {
                Some(l) => l.as_str(),
                None if self.layouts.is_empty() => "All",
                None => "Mean",
            };
            let _ = writeln!(
                out,
                "{:<10} {:<7} | {:>9} {:>9} {:>9} | {:>9} {:>9} {:>9}",
                label.name(),
                name,
                b[0],
                b[1],
                b[2],
                l[0],
                l[1],
                l[2]
            );
        }
        for k in &self.kinds {
            let _ = writeln!(out, "{} accuracy: {:.3} over {} elements", kind_title(k.kind), k.accuracy(), k.confusion.total());
        }
        if self.excluded_other > 0 {
            let _ = writeln!(out, "Other elements excluded: {}", self.excluded_other);
        }
        out
    }

    /// Support of every (kind, label, layout) cell; equal for reports over
    /// the same truth.
    fn truth_shape(&self) -> Vec<(ElementKind, LogicalLabel, Option<Layout>, usize)> {
        let mut out = Vec::new();
        for k in &self.kinds {
            for s in &k.labels {
                out.push((k.kind, s.label, None, s.pooled.support));
                for (l, m) in &s.by_layout {
                    out.push((k.kind, s.label, Some(*l), m.support));
                }
            }
        }
        out
    }
}

fn kind_title(kind: ElementKind) -> &'static str {
    match kind {
        ElementKind::Block => "TextBlock",
        ElementKind::Line => "TextLine",
    }
}

/// Mean scores of several labellers on the same truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub models: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

/// One label of one kind: `[precision, recall, f1]` per model, with the
/// column maxima flagged. Ties flag every maximum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub kind: ElementKind,
    pub label: LogicalLabel,
    pub values: Vec<[f64; 3]>,
    pub best: Vec<[bool; 3]>,
}

/// Puts the mean rows of several reports side by side.
pub fn compare(reports: &[(String, EvaluationReport)]) -> Result<Comparison> {
    if reports.len() < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 reports to compare, got {}", reports.len())));
    }
    let shape = reports[0].1.truth_shape();
    if reports.iter().any(|(_, r)| r.truth_shape() != shape || r.layouts != reports[0].1.layouts) {
        return Err(Error::TruthMismatch);
    }
    let mut rows = Vec::new();
    for (ki, k) in reports[0].1.kinds.iter().enumerate() {
        for (li, s) in k.labels.iter().enumerate() {
            let values: Vec<[f64; 3]> = reports
                .iter()
                .map(|(_, r)| {
                    let m = r.kinds[ki].labels[li].mean;
                    [m.precision, m.recall, m.f1]
                })
                .collect();
            let mut max = [f64::NEG_INFINITY; 3];
            for v in &values {
                for c in 0..3 {
                    max[c] = max[c].max(v[c]);
                }
            }
            let best = values.iter().map(|v| [v[0] == max[0], v[1] == max[1], v[2] == max[2]]).collect();
            rows.push(ComparisonRow { kind: k.kind, label: s.label, values, best });
        }
    }
    Ok(Comparison { models: reports.iter().map(|(n, _)| n.clone()).collect(), rows })
}

impl Comparison {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Aligned table with a `*` after each column maximum.
    pub fn to_text(&self) -> String {
        let width = self.models.iter().map(|m| m.len()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<9} {:<10} {:<width$} | {:>7} {:>7} {:>7}", "Kind", "Label", "Model", "P", "R", "F1");
        for row in &self.rows {
            for (m, name) in self.models.iter().enumerate() {
                let v = row.values[m];
                let b = row.best[m];
                let f = |i: usize| format!("{:.3}{}", v[i], if b[i] { "*" } else { " " });
                let _ = writeln!(
                    out,
                    "{:<9} {:<10} {:<width$} | {:>7} {:>7} {:>7}",
                    kind_title(row.kind),
                    row.label.name(),
                    name,
                    f(0),
                    f(1),
                    f(2)
                );
            }
        }
        out
    }
}
