//! Block-then-line labelling: candidate rules, conflict resolution, line
//! inheritance, overrides and the final fixups.

use crate::alto::{preset_label, Document};
use crate::error::Result;
use crate::features::{self, DocumentMatrix, FeatureConfig};
use crate::label::LogicalLabel;

use super::{EvalContext, LabelSet, Neighbors, RuleSet, Scope};

/// Where an element's label comes from before rules run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pin {
    /// Labelled by rules.
    Free,
    /// Line of a Title, Header or Other block; only overrides may change it.
    Inherited(LogicalLabel),
    /// Fixed by a pre-existing `TYPE` attribute; never changed.
    Preset(LogicalLabel),
}

impl Pin {
    fn label(self) -> Option<LogicalLabel> {
        match self {
            Pin::Free => None,
            Pin::Inherited(l) | Pin::Preset(l) => Some(l),
        }
    }
}

/// Final labels for one document, in block and line row order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub blocks: Vec<LogicalLabel>,
    pub lines: Vec<LogicalLabel>,
}

/// When several labels survive conflict resolution the first of these wins.
const PRIORITY: [LogicalLabel; 6] = [
    LogicalLabel::Header,
    LogicalLabel::Title,
    LogicalLabel::Firstline,
    LogicalLabel::Text,
    LogicalLabel::Other,
    LogicalLabel::Lastline,
];

/// Indices of the previous and next row on the same page.
fn page_neighbours(pages: &[u32], i: usize) -> (Option<usize>, Option<usize>) {
    let prev = (i > 0 && pages[i - 1] == pages[i]).then(|| i - 1);
    let next = (i + 1 < pages.len() && pages[i + 1] == pages[i]).then_some(i + 1);
    (prev, next)
}

/// Runs a rule set over documents.
#[derive(Debug, Clone)]
pub struct Annotator {
    rules: RuleSet,
    features: FeatureConfig,
}

impl Default for Annotator {
    fn default() -> Self {
        Annotator::new(RuleSet::default_rules(), FeatureConfig::default())
    }
}

impl Annotator {
    pub fn new(rules: RuleSet, features: FeatureConfig) -> Self {
        Annotator { rules, features }
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn feature_config(&self) -> &FeatureConfig {
        &self.features
    }

    fn block_ctx<'m>(&'m self, m: &'m DocumentMatrix, i: usize, neighbors: Neighbors) -> EvalContext<'m> {
        EvalContext {
            thresholds: &self.rules.thresholds,
            doc: &m.doc,
            block: &m.blocks[i],
            line: None,
            block_lines: &m.lines[m.block_lines[i].clone()],
            neighbors,
        }
    }

    fn line_ctx<'m>(&'m self, m: &'m DocumentMatrix, i: usize, neighbors: Neighbors) -> EvalContext<'m> {
        let b = m.line_block[i];
        EvalContext {
            thresholds: &self.rules.thresholds,
            doc: &m.doc,
            block: &m.blocks[b],
            line: Some(&m.lines[i]),
            block_lines: &m.lines[m.block_lines[b].clone()],
            neighbors,
        }
    }

    /// Candidate labels per block. Pinned and zero-line blocks get their fixed
    /// label only. Context-free rules run first; rules reading neighbour
    /// labels then run in one forward pass where the previous block shows its
    /// full candidate set, and the block itself and the next block their
    /// context-free sets.
    pub fn classify_blocks(&self, m: &DocumentMatrix, pins: &[Pin]) -> Result<Vec<LabelSet>> {
        let fixed: Vec<Option<LogicalLabel>> = (0..m.blocks.len())
            .map(|i| pins[i].label().or((m.blocks[i].linecount == 0).then_some(LogicalLabel::Other)))
            .collect();
        let pages: Vec<u32> = m.blocks.iter().map(|b| b.page).collect();
        self.candidates(Scope::Block, &pages, &fixed, |i, n| self.block_ctx(m, i, n))
    }

    /// Candidate labels per line; pinned lines get their fixed label only.
    pub fn classify_lines(&self, m: &DocumentMatrix, pins: &[Pin]) -> Result<Vec<LabelSet>> {
        let fixed: Vec<Option<LogicalLabel>> = pins.iter().map(|p| p.label()).collect();
        let pages: Vec<u32> = m.lines.iter().map(|l| l.page).collect();
        self.candidates(Scope::Line, &pages, &fixed, |i, n| self.line_ctx(m, i, n))
    }

    fn candidates<'m>(
        &'m self,
        scope: Scope,
        pages: &[u32],
        fixed: &[Option<LogicalLabel>],
        ctx: impl Fn(usize, Neighbors) -> EvalContext<'m>,
    ) -> Result<Vec<LabelSet>> {
        let (contextual, free): (Vec<_>, Vec<_>) = self.rules.rules(scope).partition(|r| r.when.uses_labels());
        let mut sets = vec![LabelSet::default(); pages.len()];
        for i in 0..pages.len() {
            if let Some(l) = fixed[i] {
                sets[i] = LabelSet::single(l);
                continue;
            }
            let c = ctx(i, Neighbors::default());
            for r in &free {
                if c.eval(&r.when)? {
                    sets[i].insert(r.label);
                }
            }
        }
        if contextual.is_empty() {
            return Ok(sets);
        }
        let first_pass = sets.clone();
        for i in 0..pages.len() {
            if fixed[i].is_some() {
                continue;
            }
            let (prev, next) = page_neighbours(pages, i);
            for r in &contextual {
                let n = Neighbors {
                    prev: prev.map(|p| sets[p]),
                    next: next.map(|n| first_pass[n]),
                    current: first_pass[i],
                };
                if ctx(i, n).eval(&r.when)? {
                    sets[i].insert(r.label);
                }
            }
        }
        Ok(sets)
    }

    /// Reduces a candidate set to one label with the scope's conflict rules,
    /// the scope default for an empty set, and a fixed priority otherwise.
    fn resolve_set(&self, scope: Scope, mut set: LabelSet, ctx: &EvalContext<'_>) -> Result<LogicalLabel> {
        for c in self.rules.conflicts(scope) {
            if !(set.intersects(&c.left) && set.intersects(&c.right)) {
                continue;
            }
            let (winners, losers) = if c.left.contains(&c.winner) {
                (&c.left, &c.right)
            } else {
                (&c.right, &c.left)
            };
            let dropped = if ctx.eval(&c.when)? { losers } else { winners };
            for l in dropped {
                set.remove(*l);
            }
        }
        if set.is_empty() {
            return Ok(self.rules.default_label(scope).unwrap_or(LogicalLabel::Text));
        }
        Ok(PRIORITY.into_iter().find(|l| set.contains(*l)).expect("non-empty set"))
    }

    fn apply_overrides<'m>(
        &'m self,
        scope: Scope,
        pages: &[u32],
        labels: &mut [LogicalLabel],
        eligible: impl Fn(usize) -> bool,
        ctx: impl Fn(usize, Neighbors) -> EvalContext<'m>,
    ) -> Result<()> {
        let overrides: Vec<_> = self.rules.overrides(scope).collect();
        if overrides.is_empty() {
            return Ok(());
        }
        for i in 0..labels.len() {
            if !eligible(i) {
                continue;
            }
            let (prev, next) = page_neighbours(pages, i);
            for o in &overrides {
                let n = Neighbors {
                    prev: prev.map(|p| LabelSet::single(labels[p])),
                    next: next.map(|n| LabelSet::single(labels[n])),
                    current: LabelSet::single(labels[i]),
                };
                if ctx(i, n).eval(&o.when)? {
                    labels[i] = o.label;
                }
            }
        }
        Ok(())
    }

    /// One label per block: conflicts, default, then overrides.
    pub fn resolve_block_conflicts(
        &self,
        m: &DocumentMatrix,
        candidates: &[LabelSet],
        pins: &[Pin],
    ) -> Result<Vec<LogicalLabel>> {
        let mut labels = Vec::with_capacity(candidates.len());
        for (i, set) in candidates.iter().enumerate() {
            let fixed = pins[i].label().or((m.blocks[i].linecount == 0).then_some(LogicalLabel::Other));
            labels.push(match fixed {
                Some(l) => l,
                None => self.resolve_set(Scope::Block, *set, &self.block_ctx(m, i, Neighbors::default()))?,
            });
        }
        let pages: Vec<u32> = m.blocks.iter().map(|b| b.page).collect();
        self.apply_overrides(
            Scope::Block,
            &pages,
            &mut labels,
            |i| pins[i] == Pin::Free && m.blocks[i].linecount > 0,
            |i, n| self.block_ctx(m, i, n),
        )?;
        Ok(labels)
    }

    /// One label per line: conflicts, default, overrides, then the fixups:
    /// the first line of the document becomes Title unless it is Header, a
    /// line right after a Title line becomes Firstline unless it is Title or
    /// Header, and remaining Lastline labels become Text. Fixups only touch
    /// lines labelled by rules.
    pub fn resolve_line_conflicts(
        &self,
        m: &DocumentMatrix,
        candidates: &[LabelSet],
        pins: &[Pin],
    ) -> Result<Vec<LogicalLabel>> {
        let mut labels = Vec::with_capacity(candidates.len());
        for (i, set) in candidates.iter().enumerate() {
            labels.push(match pins[i].label() {
                Some(l) => l,
                None => self.resolve_set(Scope::Line, *set, &self.line_ctx(m, i, Neighbors::default()))?,
            });
        }
        let pages: Vec<u32> = m.lines.iter().map(|l| l.page).collect();
        self.apply_overrides(
            Scope::Line,
            &pages,
            &mut labels,
            |i| !matches!(pins[i], Pin::Preset(_)),
            |i, n| self.line_ctx(m, i, n),
        )?;

        let free = |i: usize| pins[i] == Pin::Free;
        if let Some(first) = labels.first_mut() {
            if free(0) && *first != LogicalLabel::Header {
                *first = LogicalLabel::Title;
            }
        }
        for i in 1..labels.len() {
            let after_title = pages[i - 1] == pages[i] && labels[i - 1] == LogicalLabel::Title;
            if after_title && free(i) && !matches!(labels[i], LogicalLabel::Title | LogicalLabel::Header) {
                labels[i] = LogicalLabel::Firstline;
            }
        }
        for l in &mut labels {
            if *l == LogicalLabel::Lastline {
                *l = LogicalLabel::Text;
            }
        }
        Ok(labels)
    }

    /// Pins for line rows given final block labels. A line's own `TYPE`
    /// wins; otherwise lines of Title, Header and Other blocks take the block
    /// label, fixed outright when the block itself was preset.
    pub fn line_pins(
        m: &DocumentMatrix,
        block_labels: &[LogicalLabel],
        block_pins: &[Pin],
        line_presets: &[Option<LogicalLabel>],
    ) -> Vec<Pin> {
        (0..m.lines.len())
            .map(|i| {
                let b = m.line_block[i];
                match (line_presets[i], block_labels[b]) {
                    (Some(l), _) => Pin::Preset(l),
                    (None, l @ (LogicalLabel::Title | LogicalLabel::Header | LogicalLabel::Other)) => {
                        match block_pins[b] {
                            Pin::Preset(_) => Pin::Preset(l),
                            _ => Pin::Inherited(l),
                        }
                    }
                    (None, _) => Pin::Free,
                }
            })
            .collect()
    }

    /// Labels a feature matrix. `block_pins` and `line_presets` carry labels
    /// fixed by the source document.
    pub fn label_matrix(
        &self,
        mut m: DocumentMatrix,
        block_pins: &[Pin],
        line_presets: &[Option<LogicalLabel>],
    ) -> Result<Labels> {
        let candidates = self.classify_blocks(&m, block_pins)?;
        let blocks = self.resolve_block_conflicts(&m, &candidates, block_pins)?;
        for (i, row) in m.lines.iter_mut().enumerate() {
            row.block_type = Some(blocks[m.line_block[i]].as_str().to_string());
        }
        let pins = Self::line_pins(&m, &blocks, block_pins, line_presets);
        let candidates = self.classify_lines(&m, &pins)?;
        let lines = self.resolve_line_conflicts(&m, &candidates, &pins)?;
        Ok(Labels { blocks, lines })
    }

    /// Labels every block and line of `doc`. Labels from an earlier run are
    /// discarded first; `TYPE` attributes are honoured and never changed.
    pub fn annotate(&self, doc: &mut Document) -> Result<()> {
        doc.clear_labels();
        let m = features::extract(doc, &self.features)?;
        let block_pins: Vec<Pin> = doc
            .blocks()
            .map(|b| match b.type_attr.as_deref() {
                Some(t) => {
                    let l = preset_label(t);
                    Pin::Preset(if l.valid_for_block() { l } else { LogicalLabel::Other })
                }
                None => Pin::Free,
            })
            .collect();
        let line_presets: Vec<Option<LogicalLabel>> =
            doc.lines().map(|l| l.type_attr.as_deref().map(preset_label)).collect();
        let labels = self.label_matrix(m, &block_pins, &line_presets)?;
        let (mut bi, mut li) = (0, 0);
        for page in &mut doc.pages {
            for block in &mut page.blocks {
                block.label = Some(labels.blocks[bi]);
                bi += 1;
                for line in &mut block.lines {
                    line.label = Some(labels.lines[li]);
                    li += 1;
                }
            }
        }
        Ok(())
    }
}
