//! Line, block and document feature matrices.
//!
//! Column order follows the feature numbering used throughout the project:
//! page, blockType, wordCount, spaces, size, position, ... simHeaderSet.
//! Block rows additionally carry the block's own height and width.

mod stats;
pub mod text;

use std::ops::Range;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::alto::{Document, TextBlock, TextLine};
use crate::error::{Error, Result};

pub use stats::{median, quantile};
pub use text::{
    char_proportions, edit_distance, ends_with_punct, header_marks, levenshtein_similarity, normalize,
    sim_header_set, starts_with, HeaderWordSet,
};

/// A single cell of a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureValue {
    Num(f64),
    Bool(bool),
    Cat(Option<String>),
}

impl FeatureValue {
    pub fn as_num(&self) -> Option<f64> {
        match self {
            FeatureValue::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            FeatureValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    fn cell(&self) -> String {
        match self {
            FeatureValue::Num(v) => v.to_string(),
            FeatureValue::Bool(b) => b.to_string(),
            FeatureValue::Cat(c) => c.clone().unwrap_or_default(),
        }
    }
}

/// Value type of a named feature column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureKind {
    Numeric,
    Boolean,
    Categorical,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LineFeatures {
    pub page: u32,
    pub block_type: Option<String>,
    pub word_count: usize,
    pub preceding_space: f64,
    pub following_space: f64,
    pub height: f64,
    pub width: f64,
    pub hpos: f64,
    pub vpos: f64,
    pub diff_hpos: f64,
    pub capital_prop: f64,
    pub digit_prop: f64,
    pub non_alpha_prop: f64,
    pub stw_capital: bool,
    pub stw_digit: bool,
    pub ends_punct: bool,
    pub header_mark1: bool,
    pub header_mark2: bool,
    pub sim_title: f64,
    pub sim_header_set: f64,
    /// Rule-only flag, see [`FeatureConfig::ctn_total`].
    pub ctn_total: bool,
}

pub const LINE_COLUMNS: [&str; 20] = [
    "page",
    "blockType",
    "wordCount",
    "precedingSpace",
    "followingSpace",
    "height",
    "width",
    "hpos",
    "vpos",
    "diffHpos",
    "capitalProp",
    "digitProp",
    "nonAlphaProp",
    "stwCapital",
    "stwDigit",
    "endsPunct",
    "headerMark1",
    "headerMark2",
    "simTitle",
    "simHeaderSet",
];

impl LineFeatures {
    pub fn value(&self, name: &str) -> Option<FeatureValue> {
        use FeatureValue::*;
        Some(match name {
            "page" => Num(self.page as f64),
            "blockType" => Cat(self.block_type.clone()),
            "wordCount" => Num(self.word_count as f64),
            "precedingSpace" => Num(self.preceding_space),
            "followingSpace" => Num(self.following_space),
            "height" => Num(self.height),
            "width" => Num(self.width),
            "hpos" => Num(self.hpos),
            "vpos" => Num(self.vpos),
            "diffHpos" => Num(self.diff_hpos),
            "capitalProp" => Num(self.capital_prop),
            "digitProp" => Num(self.digit_prop),
            "nonAlphaProp" => Num(self.non_alpha_prop),
            "stwCapital" => Bool(self.stw_capital),
            "stwDigit" => Bool(self.stw_digit),
            "endsPunct" => Bool(self.ends_punct),
            "headerMark1" => Bool(self.header_mark1),
            "headerMark2" => Bool(self.header_mark2),
            "simTitle" => Num(self.sim_title),
            "simHeaderSet" => Num(self.sim_header_set),
            "ctnTotal" => Bool(self.ctn_total),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockFeatures {
    pub page: u32,
    pub block_type: Option<String>,
    pub word_count: usize,
    pub preceding_space: f64,
    pub following_space: f64,
    pub height: f64,
    pub width: f64,
    pub firsthpos: f64,
    pub firstvpos: f64,
    pub lasthpos: f64,
    pub lastvpos: f64,
    pub linecount: usize,
    pub word_ratio: f64,
    pub med_height: f64,
    pub med_width: f64,
    pub med_hpos: f64,
    pub med_vpos: f64,
    pub med_word_count: f64,
    pub med_line_space: f64,
    pub capital_prop: f64,
    pub digit_prop: f64,
    pub header_mark1: bool,
    pub header_mark2: bool,
}

pub const BLOCK_COLUMNS: [&str; 23] = [
    "page",
    "blockType",
    "wordCount",
    "precedingSpace",
    "followingSpace",
    "height",
    "width",
    "firsthpos",
    "firstvpos",
    "lasthpos",
    "lastvpos",
    "linecount",
    "wordRatio",
    "medHeight",
    "medWidth",
    "medHpos",
    "medVpos",
    "medWordCount",
    "medLineSpace",
    "capitalProp",
    "digitProp",
    "headerMark1",
    "headerMark2",
];

impl BlockFeatures {
    pub fn value(&self, name: &str) -> Option<FeatureValue> {
        use FeatureValue::*;
        Some(match name {
            "page" => Num(self.page as f64),
            "blockType" => Cat(self.block_type.clone()),
            "wordCount" => Num(self.word_count as f64),
            "precedingSpace" => Num(self.preceding_space),
            "followingSpace" => Num(self.following_space),
            "height" => Num(self.height),
            "width" => Num(self.width),
            "firsthpos" => Num(self.firsthpos),
            "firstvpos" => Num(self.firstvpos),
            "lasthpos" => Num(self.lasthpos),
            "lastvpos" => Num(self.lastvpos),
            "linecount" => Num(self.linecount as f64),
            "wordRatio" => Num(self.word_ratio),
            "medHeight" => Num(self.med_height),
            "medWidth" => Num(self.med_width),
            "medHpos" => Num(self.med_hpos),
            "medVpos" => Num(self.med_vpos),
            "medWordCount" => Num(self.med_word_count),
            "medLineSpace" => Num(self.med_line_space),
            "capitalProp" => Num(self.capital_prop),
            "digitProp" => Num(self.digit_prop),
            "headerMark1" => Bool(self.header_mark1),
            "headerMark2" => Bool(self.header_mark2),
            _ => return None,
        })
    }
}

/// Aggregates over the whole document, used only by the hand-written rules.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DocumentFeatures {
    pub med_height: f64,
    pub med_width: f64,
    pub med_word_count: f64,
    pub med_line_space: f64,
    pub med_block_height: f64,
    pub med_block_width: f64,
    pub med_block_space: f64,
    pub third_quartile_line_space: f64,
    pub med_word_ratio: f64,
    pub med_line_count: f64,
}

pub const DOCUMENT_COLUMNS: [&str; 10] = [
    "medHeight",
    "medWidth",
    "medWordCount",
    "medLineSpace",
    "medBlockHeight",
    "medBlockWidth",
    "medBlockSpace",
    "thirdQuartileLineSpace",
    "medWordRatio",
    "medLineCount",
];

impl DocumentFeatures {
    pub fn value(&self, name: &str) -> Option<f64> {
        Some(match name {
            "medHeight" => self.med_height,
            "medWidth" => self.med_width,
            "medWordCount" => self.med_word_count,
            "medLineSpace" => self.med_line_space,
            "medBlockHeight" => self.med_block_height,
            "medBlockWidth" => self.med_block_width,
            "medBlockSpace" => self.med_block_space,
            "thirdQuartileLineSpace" => self.third_quartile_line_space,
            "medWordRatio" => self.med_word_ratio,
            "medLineCount" => self.med_line_count,
            _ => return None,
        })
    }
}

/// Kind of a line column, including the rule-only `ctnTotal`.
pub fn line_feature_kind(name: &str) -> Option<FeatureKind> {
    Some(match name {
        "blockType" => FeatureKind::Categorical,
        "stwCapital" | "stwDigit" | "endsPunct" | "headerMark1" | "headerMark2" | "ctnTotal" => {
            FeatureKind::Boolean
        }
        n if LINE_COLUMNS.contains(&n) => FeatureKind::Numeric,
        _ => return None,
    })
}

pub fn block_feature_kind(name: &str) -> Option<FeatureKind> {
    Some(match name {
        "blockType" => FeatureKind::Categorical,
        "headerMark1" | "headerMark2" => FeatureKind::Boolean,
        n if BLOCK_COLUMNS.contains(&n) => FeatureKind::Numeric,
        _ => return None,
    })
}

/// Block columns derived from other features; excluded from learned models.
pub const DERIVED_BLOCK_COLUMNS: [&str; 6] =
    ["medHeight", "medWidth", "medHpos", "medVpos", "medWordCount", "medLineSpace"];

/// Columns offered to learned classifiers.
pub fn learning_columns(kind: crate::alto::ElementKind) -> Vec<&'static str> {
    match kind {
        crate::alto::ElementKind::Line => LINE_COLUMNS.to_vec(),
        crate::alto::ElementKind::Block => BLOCK_COLUMNS
            .iter()
            .copied()
            .filter(|c| !DERIVED_BLOCK_COLUMNS.contains(c))
            .collect(),
    }
}

/// Inputs to feature extraction that are not part of the document.
#[derive(Debug, Clone, Default)]
pub struct FeatureConfig {
    pub header_words: HeaderWordSet,
    /// When set, `ctnTotal` is true for lines matching the pattern; otherwise
    /// it is always false.
    pub ctn_total: Option<Regex>,
}

/// All feature rows of one document plus the line/block index maps.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentMatrix {
    pub lines: Vec<LineFeatures>,
    pub blocks: Vec<BlockFeatures>,
    pub doc: DocumentFeatures,
    /// Block row index of each line row.
    pub line_block: Vec<usize>,
    /// Line rows belonging to each block row.
    pub block_lines: Vec<Range<usize>>,
}

fn gap(top_of_next: f64, prev_vpos: f64, prev_height: f64) -> f64 {
    (top_of_next - (prev_vpos + prev_height)).max(0.0)
}

/// Label text carried by a block as its type: a computed label wins, then the
/// source `TYPE` attribute.
pub fn block_type_of(b: &TextBlock) -> Option<String> {
    match (&b.label, &b.type_attr) {
        (Some(l), _) => Some(l.as_str().to_string()),
        (None, Some(t)) => Some(t.to_lowercase()),
        (None, None) => None,
    }
}

/// Within-block vertical gaps between consecutive lines.
fn inner_line_gaps(b: &TextBlock) -> Vec<f64> {
    b.lines
        .windows(2)
        .map(|w| gap(w[1].vpos, w[0].vpos, w[0].height))
        .collect()
}

pub fn extract_line_features(doc: &Document, cfg: &FeatureConfig) -> Vec<LineFeatures> {
    let mut rows = Vec::with_capacity(doc.line_count());
    // Without a reference title there is nothing to resemble.
    let title_known = !normalize(&doc.doc_title).is_empty();
    for page in &doc.pages {
        let med_hpos: Vec<f64> = page
            .blocks
            .iter()
            .map(|b| median(&b.lines.iter().map(|l| l.hpos).collect::<Vec<_>>()))
            .collect();
        let lines: Vec<(usize, &TextLine)> = page
            .blocks
            .iter()
            .enumerate()
            .flat_map(|(bi, b)| b.lines.iter().map(move |l| (bi, l)))
            .collect();
        for (i, &(bi, line)) in lines.iter().enumerate() {
            let preceding = match i {
                0 => 0.0,
                _ => gap(line.vpos, lines[i - 1].1.vpos, lines[i - 1].1.height),
            };
            let following = match lines.get(i + 1) {
                Some((_, next)) => gap(next.vpos, line.vpos, line.height),
                None => 0.0,
            };
            let (capital, digit, non_alpha) = char_proportions(&line.text);
            let (stw_capital, stw_digit) = starts_with(&line.words);
            let (mark1, mark2) = header_marks(&line.text);
            rows.push(LineFeatures {
                page: page.number,
                block_type: block_type_of(&page.blocks[bi]),
                word_count: line.words.len(),
                preceding_space: preceding,
                following_space: following,
                height: line.height,
                width: line.width,
                hpos: line.hpos,
                vpos: line.vpos,
                diff_hpos: line.hpos - med_hpos[bi],
                capital_prop: capital,
                digit_prop: digit,
                non_alpha_prop: non_alpha,
                stw_capital,
                stw_digit,
                ends_punct: ends_with_punct(&line.text),
                header_mark1: mark1,
                header_mark2: mark2,
                sim_title: if title_known {
                    levenshtein_similarity(&line.text, &doc.doc_title)
                } else {
                    0.0
                },
                sim_header_set: sim_header_set(&line.text, &cfg.header_words),
                ctn_total: cfg.ctn_total.as_ref().is_some_and(|re| re.is_match(&line.text)),
            });
        }
    }
    rows
}

fn empty_block_row(page: u32, b: &TextBlock) -> BlockFeatures {
    BlockFeatures {
        page,
        block_type: block_type_of(b),
        word_count: 0,
        preceding_space: 0.0,
        following_space: 0.0,
        height: 0.0,
        width: 0.0,
        firsthpos: 0.0,
        firstvpos: 0.0,
        lasthpos: 0.0,
        lastvpos: 0.0,
        linecount: 0,
        word_ratio: 0.0,
        med_height: 0.0,
        med_width: 0.0,
        med_hpos: 0.0,
        med_vpos: 0.0,
        med_word_count: 0.0,
        med_line_space: 0.0,
        capital_prop: 0.0,
        digit_prop: 0.0,
        header_mark1: false,
        header_mark2: false,
    }
}

pub fn extract_block_features(doc: &Document) -> Vec<BlockFeatures> {
    let mut rows = Vec::with_capacity(doc.block_count());
    for page in &doc.pages {
        let n = page.blocks.len();
        for (i, b) in page.blocks.iter().enumerate() {
            if b.lines.is_empty() {
                rows.push(empty_block_row(page.number, b));
                continue;
            }
            let preceding = match i {
                0 => 0.0,
                _ => gap(b.vpos, page.blocks[i - 1].vpos, page.blocks[i - 1].height),
            };
            let following = if i + 1 < n {
                gap(page.blocks[i + 1].vpos, b.vpos, b.height)
            } else {
                0.0
            };
            let col = |f: fn(&TextLine) -> f64| -> Vec<f64> { b.lines.iter().map(f).collect() };
            let first = &b.lines[0];
            let last = &b.lines[b.lines.len() - 1];
            let text = b.text();
            let (capital, digit, _) = char_proportions(&text);
            let (mark1, mark2) = header_marks(&text);
            let word_count = b.word_count();
            rows.push(BlockFeatures {
                page: page.number,
                block_type: block_type_of(b),
                word_count,
                preceding_space: preceding,
                following_space: following,
                height: b.height,
                width: b.width,
                firsthpos: first.hpos,
                firstvpos: first.vpos,
                lasthpos: last.hpos,
                lastvpos: last.vpos,
                linecount: b.lines.len(),
                word_ratio: word_count as f64 / b.lines.len() as f64,
                med_height: median(&col(|l| l.height)),
                med_width: median(&col(|l| l.width)),
                med_hpos: median(&col(|l| l.hpos)),
                med_vpos: median(&col(|l| l.vpos)),
                med_word_count: median(&col(|l| l.words.len() as f64)),
                med_line_space: median(&inner_line_gaps(b)),
                capital_prop: capital,
                digit_prop: digit,
                header_mark1: mark1,
                header_mark2: mark2,
            });
        }
    }
    rows
}

/// Document statistics. Line statistics range over all lines; block
/// statistics over blocks that contain at least one line.
pub fn extract_document_features(doc: &Document) -> Result<DocumentFeatures> {
    if doc.line_count() == 0 {
        return Err(Error::NoLines);
    }
    let lines: Vec<_> = doc.lines().collect();
    let col = |f: &dyn Fn(&TextLine) -> f64| -> Vec<f64> { lines.iter().map(|l| f(l)).collect() };
    let line_gaps: Vec<f64> = doc.blocks().flat_map(inner_line_gaps).collect();

    let mut block_heights = Vec::new();
    let mut block_widths = Vec::new();
    let mut block_gaps = Vec::new();
    let mut line_counts = Vec::new();
    let mut word_ratios = Vec::new();
    for page in &doc.pages {
        for (i, b) in page.blocks.iter().enumerate() {
            if i > 0 {
                let prev = &page.blocks[i - 1];
                block_gaps.push(gap(b.vpos, prev.vpos, prev.height));
            }
            if b.lines.is_empty() {
                continue;
            }
            block_heights.push(b.height);
            block_widths.push(b.width);
            line_counts.push(b.lines.len() as f64);
            word_ratios.push(b.word_count() as f64 / b.lines.len() as f64);
        }
    }

    Ok(DocumentFeatures {
        med_height: median(&col(&|l| l.height)),
        med_width: median(&col(&|l| l.width)),
        med_word_count: median(&col(&|l| l.words.len() as f64)),
        med_line_space: median(&line_gaps),
        med_block_height: median(&block_heights),
        med_block_width: median(&block_widths),
        med_block_space: median(&block_gaps),
        third_quartile_line_space: quantile(&line_gaps, 0.75),
        med_word_ratio: median(&word_ratios),
        med_line_count: median(&line_counts),
    })
}

/// Extracts all three levels at once.
pub fn extract(doc: &Document, cfg: &FeatureConfig) -> Result<DocumentMatrix> {
    let doc_features = extract_document_features(doc)?;
    let lines = extract_line_features(doc, cfg);
    let blocks = extract_block_features(doc);
    let mut line_block = Vec::with_capacity(lines.len());
    let mut block_lines = Vec::with_capacity(blocks.len());
    let mut next = 0;
    for (bi, b) in doc.blocks().enumerate() {
        block_lines.push(next..next + b.lines.len());
        line_block.extend(std::iter::repeat_n(bi, b.lines.len()));
        next += b.lines.len();
    }
    Ok(DocumentMatrix {
        lines,
        blocks,
        doc: doc_features,
        line_block,
        block_lines,
    })
}

fn write_csv<'a, R: 'a>(
    doc_id: &str,
    ids: impl Iterator<Item = &'a str>,
    rows: &[R],
    columns: &[&str],
    value: impl Fn(&R, &str) -> Option<FeatureValue>,
) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    let mut header = vec!["document_id", "element_id"];
    header.extend_from_slice(columns);
    w.write_record(&header)?;
    for (row, id) in rows.iter().zip(ids) {
        let mut rec = vec![doc_id.to_string(), id.to_string()];
        rec.extend(columns.iter().map(|c| value(row, c).map(|v| v.cell()).unwrap_or_default()));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Line matrix as CSV: `document_id,element_id` followed by [`LINE_COLUMNS`].
pub fn line_matrix_csv(doc: &Document, rows: &[LineFeatures]) -> Result<Vec<u8>> {
    write_csv(&doc.id, doc.lines().map(|l| l.id.as_str()), rows, &LINE_COLUMNS, LineFeatures::value)
}

/// Block matrix as CSV: `document_id,element_id` followed by [`BLOCK_COLUMNS`].
pub fn block_matrix_csv(doc: &Document, rows: &[BlockFeatures]) -> Result<Vec<u8>> {
    write_csv(&doc.id, doc.blocks().map(|b| b.id.as_str()), rows, &BLOCK_COLUMNS, BlockFeatures::value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alto::{Page, TextLine};

    fn page(blocks: Vec<TextBlock>) -> Page {
        Page { number: 1, width: None, height: None, blocks }
    }

    #[test]
    fn single_line_page_has_zero_spaces() {
        let doc = Document::from_pages(
            "d",
            vec![page(vec![TextBlock::new("b", 0.0, 100.0, 30.0, 500.0)
                .with_lines(vec![TextLine::new("l", 0.0, 100.0, 30.0, 500.0).with_text("Seul")])])],
        );
        let rows = extract_line_features(&doc, &FeatureConfig::default());
        assert_eq!((rows[0].preceding_space, rows[0].following_space), (0.0, 0.0));
        let d = extract_document_features(&doc).unwrap();
        assert_eq!(d.med_line_space, 0.0);
        assert_eq!(d.med_height, 30.0);
        assert_eq!(rows[0].sim_title, 100.0);
    }

    #[test]
    fn vertical_gap_between_lines() {
        let doc = Document::from_pages(
            "d",
            vec![page(vec![TextBlock::new("b", 0.0, 100.0, 80.0, 500.0).with_lines(vec![
                TextLine::new("l1", 0.0, 100.0, 30.0, 500.0),
                TextLine::new("l2", 0.0, 150.0, 30.0, 500.0),
            ])])],
        );
        let rows = extract_line_features(&doc, &FeatureConfig::default());
        assert_eq!(rows[1].preceding_space, 20.0);
        assert_eq!(rows[0].following_space, 20.0);
    }

    #[test]
    fn diff_hpos_against_block_median() {
        let doc = Document::from_pages(
            "d",
            vec![page(vec![TextBlock::new("b", 0.0, 0.0, 90.0, 500.0).with_lines(vec![
                TextLine::new("l1", 310.0, 0.0, 30.0, 100.0),
                TextLine::new("l2", 200.0, 30.0, 30.0, 100.0),
                TextLine::new("l3", 200.0, 60.0, 30.0, 100.0),
            ])])],
        );
        let rows = extract_line_features(&doc, &FeatureConfig::default());
        assert_eq!(rows[0].diff_hpos, 110.0);
        assert_eq!(rows[1].diff_hpos, 0.0);
    }

    #[test]
    fn block_medians_and_empty_block() {
        let mk = |id: &str, vpos: f64, h: f64, words: &str| {
            TextLine::new(id, 0.0, vpos, h, 100.0).with_text(words)
        };
        let doc = Document::from_pages(
            "d",
            vec![page(vec![
                TextBlock::new("b1", 0.0, 0.0, 100.0, 100.0).with_lines(vec![
                    mk("l1", 0.0, 20.0, "a b c d"),
                    mk("l2", 30.0, 30.0, "a b c d e f"),
                    mk("l3", 70.0, 40.0, "a b c d e"),
                ]),
                TextBlock::new("b2", 0.0, 200.0, 0.0, 0.0),
                TextBlock::new("b3", 0.0, 300.0, 40.0, 100.0)
                    .with_lines(vec![mk("l4", 300.0, 20.0, "a b c d"), mk("l5", 320.0, 20.0, "a b c d e f")]),
            ])],
        );
        let rows = extract_block_features(&doc);
        assert_eq!(rows[0].med_height, 30.0);
        assert_eq!(rows[0].linecount, 3);
        assert_eq!(rows[0].med_line_space, 10.0);
        assert_eq!(rows[1], empty_block_row(1, &doc.pages[0].blocks[1]));
        assert_eq!(rows[2].med_word_count, 5.0);
        assert_eq!(rows[2].word_ratio, 5.0);
        assert_eq!(rows[0].following_space, 100.0);
    }

    #[test]
    fn empty_document_is_an_error() {
        let doc = Document::from_pages("d", vec![page(vec![])]);
        assert!(matches!(extract_document_features(&doc), Err(Error::NoLines)));
    }

    #[test]
    fn document_line_count_median() {
        let block = |id: &str, n: usize, vpos: f64| {
            TextBlock::new(id, 0.0, vpos, 10.0 * n as f64, 100.0).with_lines(
                (0..n).map(|i| TextLine::new(format!("{id}_{i}"), 0.0, vpos + 10.0 * i as f64, 10.0, 100.0)).collect(),
            )
        };
        let doc = Document::from_pages("d", vec![page(vec![block("a", 2, 0.0), block("b", 8, 100.0), block("c", 10, 300.0)])]);
        assert_eq!(extract_document_features(&doc).unwrap().med_line_count, 8.0);
    }

    #[test]
    fn csv_header_order() {
        let doc = Document::from_pages(
            "d",
            vec![page(vec![TextBlock::new("b", 0.0, 0.0, 10.0, 10.0)
                .with_lines(vec![TextLine::new("l", 0.0, 0.0, 10.0, 10.0).with_text("Un")])])],
        );
        let csv = line_matrix_csv(&doc, &extract_line_features(&doc, &FeatureConfig::default())).unwrap();
        let header = String::from_utf8(csv).unwrap().lines().next().unwrap().to_string();
        assert!(header.starts_with("document_id,element_id,page,blockType,wordCount,precedingSpace"));
        assert!(header.ends_with("simTitle,simHeaderSet"));
    }
}
