//! Labelling documents with induced models: blocks first, then lines whose
//! `blockType` feature carries the predicted block label.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alto::{preset_label, Document, ElementKind};
use crate::error::{Error, Result};
use crate::features::{self, DocumentMatrix, FeatureConfig};
use crate::label::LogicalLabel;

use super::data::Dataset;
use super::learn::Hyperparameters;
use super::model::{fit_one_vs_rest, OneVsRest};

/// Labelled rows gathered from annotated documents.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    pub blocks: Dataset,
    pub block_labels: Vec<LogicalLabel>,
    pub lines: Dataset,
    pub line_labels: Vec<LogicalLabel>,
}

fn line_rows_with_block_labels(m: &DocumentMatrix, block_labels: &[LogicalLabel]) -> Vec<features::LineFeatures> {
    m.lines
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.block_type = Some(block_labels[m.line_block[i]].as_str().to_string());
            row
        })
        .collect()
}

impl TrainingSet {
    /// Feature rows of every element with a known label. `truth` returns
    /// the label of an element by kind and id; lines see their block's true
    /// label as `blockType`. Blocks without a label drop out together with
    /// their lines.
    pub fn from_documents(
        docs: &[Document],
        cfg: &FeatureConfig,
        truth: impl Fn(&Document, ElementKind, &str) -> Option<LogicalLabel> + Sync,
    ) -> Result<TrainingSet> {
        let parts: Vec<_> = docs
            .par_iter()
            .map(|doc| -> Result<_> {
                let m = features::extract(doc, cfg)?;
                let blocks: Vec<Option<LogicalLabel>> =
                    doc.blocks().map(|b| truth(doc, ElementKind::Block, &b.id)).collect();
                let filled: Vec<LogicalLabel> = blocks.iter().map(|l| l.unwrap_or(LogicalLabel::Other)).collect();
                let line_rows = line_rows_with_block_labels(&m, &filled);
                let mut block_idx = Vec::new();
                let mut block_labels = Vec::new();
                for (i, l) in blocks.iter().enumerate() {
                    if let Some(l) = l {
                        block_idx.push(i);
                        block_labels.push(*l);
                    }
                }
                let mut line_idx = Vec::new();
                let mut line_labels = Vec::new();
                for (i, line) in doc.lines().enumerate() {
                    if blocks[m.line_block[i]].is_none() {
                        continue;
                    }
                    if let Some(l) = truth(doc, ElementKind::Line, &line.id) {
                        line_idx.push(i);
                        line_labels.push(l);
                    }
                }
                let block_rows: Vec<_> = block_idx.iter().map(|&i| m.blocks[i].clone()).collect();
                let line_rows: Vec<_> = line_idx.iter().map(|&i| line_rows[i].clone()).collect();
                Ok((Dataset::from_blocks(&block_rows)?, block_labels, Dataset::from_lines(&line_rows)?, line_labels))
            })
            .collect::<Result<_>>()?;
        if parts.is_empty() {
            return Err(Error::InvalidArgument("no training documents".into()));
        }
        let (mut bd, mut bl, mut ld, mut ll) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
        for (b, bls, l, lls) in parts {
            bd.push(b);
            bl.extend(bls);
            ld.push(l);
            ll.extend(lls);
        }
        Ok(TrainingSet {
            blocks: Dataset::concat(&bd)?,
            block_labels: bl,
            lines: Dataset::concat(&ld)?,
            line_labels: ll,
        })
    }
}

/// Block and line models applied in sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipperLabeler {
    pub blocks: OneVsRest,
    pub lines: OneVsRest,
}

impl RipperLabeler {
    /// Trains both models. Block models never predict Firstline.
    pub fn train(set: &TrainingSet, params: Hyperparameters, seed: u64) -> Result<RipperLabeler> {
        let block_labels: Vec<LogicalLabel> = set
            .block_labels
            .iter()
            .map(|l| if l.valid_for_block() { *l } else { LogicalLabel::Text })
            .collect();
        let (blocks, lines) = rayon::join(
            || fit_one_vs_rest(&set.blocks, &block_labels, params, seed),
            || fit_one_vs_rest(&set.lines, &set.line_labels, params, seed.wrapping_add(1)),
        );
        Ok(RipperLabeler { blocks: blocks?, lines: lines? })
    }

    /// Labels every block and line. Pre-existing `TYPE` attributes are kept;
    /// lines of such blocks take the block's label, and zero-line blocks are
    /// Other.
    pub fn annotate(&self, doc: &mut Document, cfg: &FeatureConfig) -> Result<()> {
        doc.clear_labels();
        let m = features::extract(doc, cfg)?;
        let presets: Vec<Option<LogicalLabel>> = doc
            .blocks()
            .map(|b| match (&b.type_attr, b.lines.is_empty()) {
                (Some(t), _) => {
                    let l = preset_label(t);
                    Some(if l.valid_for_block() { l } else { LogicalLabel::Other })
                }
                (None, true) => Some(LogicalLabel::Other),
                (None, false) => None,
            })
            .collect();
        let predicted = self.blocks.predict(&Dataset::from_blocks(&m.blocks)?)?;
        let block_labels: Vec<LogicalLabel> = presets
            .iter()
            .zip(predicted)
            .map(|(p, l)| {
                p.unwrap_or(if l.valid_for_block() { l } else { LogicalLabel::Text })
            })
            .collect();
        let line_rows = line_rows_with_block_labels(&m, &block_labels);
        let line_pred = self.lines.predict(&Dataset::from_lines(&line_rows)?)?;
        let (mut bi, mut li) = (0, 0);
        for page in &mut doc.pages {
            for block in &mut page.blocks {
                block.label = Some(block_labels[bi]);
                for line in &mut block.lines {
                    let label = match (&line.type_attr, presets[bi]) {
                        (Some(t), _) => preset_label(t),
                        (None, Some(_)) if block.type_attr.is_some() => block_labels[bi],
                        _ => line_pred[li],
                    };
                    line.label = Some(if label == LogicalLabel::Lastline { LogicalLabel::Text } else { label });
                    li += 1;
                }
                bi += 1;
            }
        }
        Ok(())
    }
}
