//! Hand-built feature matrices, one per shipped rule, plus the line fixups.
//!
//! Every fixture starts from neutral rows that match no rule and changes only
//! the features its rule reads, so exactly one rule fires on the target.

use lla_core::features::{BlockFeatures, DocumentFeatures, DocumentMatrix, LineFeatures};
use lla_core::rules::{Annotator, LabelSet, Pin};
use lla_core::LogicalLabel::{self, *};

pub struct Case {
    pub name: &'static str,
    pub check: fn() -> Result<(), String>,
}

/// Document statistics shared by every fixture.
pub fn doc() -> DocumentFeatures {
    DocumentFeatures {
        med_height: 30.0,
        med_width: 600.0,
        med_word_count: 30.0,
        med_line_space: 10.0,
        med_block_height: 100.0,
        med_block_width: 600.0,
        med_block_space: 20.0,
        third_quartile_line_space: 15.0,
        med_word_ratio: 1.0,
        med_line_count: 10.0,
    }
}

/// A body line that no line rule matches inside [`block`].
pub fn line() -> LineFeatures {
    LineFeatures {
        page: 1,
        word_count: 8,
        preceding_space: 10.0,
        following_space: 10.0,
        height: 30.0,
        width: 600.0,
        hpos: 100.0,
        capital_prop: 2.0,
        ..Default::default()
    }
}

/// A block that no block rule matches on its own.
pub fn block() -> BlockFeatures {
    BlockFeatures {
        page: 1,
        word_count: 5,
        preceding_space: 10.0,
        following_space: 10.0,
        height: 100.0,
        width: 600.0,
        linecount: 5,
        med_height: 30.0,
        med_width: 600.0,
        med_hpos: 100.0,
        med_word_count: 8.0,
        med_line_space: 10.0,
        ..Default::default()
    }
}

/// A block that B1 labels Text.
pub fn text_block() -> BlockFeatures {
    BlockFeatures { linecount: 12, ..block() }
}

/// Assembles a matrix; the block `page` is copied onto its lines.
pub fn matrix(blocks: Vec<(BlockFeatures, Vec<LineFeatures>)>) -> DocumentMatrix {
    let mut m = DocumentMatrix {
        lines: Vec::new(),
        blocks: Vec::new(),
        doc: doc(),
        line_block: Vec::new(),
        block_lines: Vec::new(),
    };
    for (b, lines) in blocks {
        let start = m.lines.len();
        for mut l in lines {
            l.page = b.page;
            m.line_block.push(m.blocks.len());
            m.lines.push(l);
        }
        m.block_lines.push(start..m.lines.len());
        m.blocks.push(b);
    }
    m
}

fn set(labels: &[LogicalLabel]) -> LabelSet {
    labels.iter().copied().collect()
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, want {want:?}"))
    }
}

/// Checks the candidate set and the final label of block `target`.
fn block_case(
    blocks: Vec<(BlockFeatures, Vec<LineFeatures>)>,
    target: usize,
    candidates: &[LogicalLabel],
    label: LogicalLabel,
) -> Result<(), String> {
    let a = Annotator::default();
    let m = matrix(blocks);
    let pins = vec![Pin::Free; m.blocks.len()];
    let cands = a.classify_blocks(&m, &pins).map_err(|e| e.to_string())?;
    expect("candidates", cands[target], set(candidates))?;
    let presets = vec![None; m.lines.len()];
    let labels = a.label_matrix(m, &pins, &presets).map_err(|e| e.to_string())?;
    expect("label", labels.blocks[target], label)
}

/// A Text block holding two neutral lines, then `lines`, then a neutral line.
/// Returns the index of the first of `lines`.
fn in_text_block(lines: Vec<LineFeatures>) -> (Vec<(BlockFeatures, Vec<LineFeatures>)>, usize) {
    let mut all = vec![line(), line()];
    all.extend(lines);
    all.push(line());
    (vec![(text_block(), all)], 2)
}

/// Checks the candidate set and the final label of the last of `lines`.
fn line_case(lines: Vec<LineFeatures>, candidates: &[LogicalLabel], label: LogicalLabel) -> Result<(), String> {
    let n = lines.len();
    let (blocks, first) = in_text_block(lines);
    let target = first + n - 1;
    let a = Annotator::default();
    let m = matrix(blocks);
    let block_pins = vec![Pin::Free; m.blocks.len()];
    let presets = vec![None; m.lines.len()];
    let labels = a.label_matrix(m.clone(), &block_pins, &presets).map_err(|e| e.to_string())?;
    expect("block label", labels.blocks[0], Text)?;
    let pins = Annotator::line_pins(&m, &labels.blocks, &block_pins, &presets);
    let cands = a.classify_lines(&m, &pins).map_err(|e| e.to_string())?;
    expect("candidates", cands[target], set(candidates))?;
    expect("label", labels.lines[target], label)
}

fn b1() -> Result<(), String> {
    block_case(vec![(text_block(), vec![line()])], 0, &[Text], Text)
}

fn b2() -> Result<(), String> {
    let target = BlockFeatures { linecount: 5, med_height: 30.0, ..block() };
    let blocks = vec![(text_block(), vec![line()]), (target, vec![line()]), (text_block(), vec![line()])];
    block_case(blocks, 1, &[Text], Text)
}

fn b3() -> Result<(), String> {
    let target = BlockFeatures { linecount: 2, med_height: 150.0, preceding_space: 50.0, ..block() };
    let blocks = vec![(text_block(), vec![line()]), (target, vec![line()]), (text_block(), vec![line()])];
    block_case(blocks, 1, &[Title], Title)
}

fn b4() -> Result<(), String> {
    let l = LineFeatures { sim_header_set: 95.0, ..line() };
    block_case(vec![(block(), vec![line(), l])], 0, &[Header], Header)
}

fn b5() -> Result<(), String> {
    let b = BlockFeatures { page: 2, ..block() };
    let l = LineFeatures { header_mark1: true, ..line() };
    block_case(vec![(block(), vec![line()]), (b, vec![l])], 1, &[Header], Header)
}

fn b6() -> Result<(), String> {
    let l = LineFeatures { sim_title: 95.0, ..line() };
    block_case(vec![(text_block(), vec![l.clone()])], 0, &[Header, Text], Header)?;
    let wordy = BlockFeatures { word_count: 60, ..text_block() };
    block_case(vec![(wordy, vec![l])], 0, &[Header, Text], Text)
}

fn b7() -> Result<(), String> {
    // B2 and B3 both fire: the block is short, lower than the median block
    // and set off by a wide gap.
    let target = BlockFeatures { linecount: 2, med_height: 60.0, preceding_space: 50.0, ..block() };
    let blocks = vec![(text_block(), vec![line()]), (target.clone(), vec![line()]), (text_block(), vec![line()])];
    block_case(blocks, 1, &[Text, Title], Title)?;
    let low = BlockFeatures { med_height: 40.0, ..target };
    let blocks = vec![(text_block(), vec![line()]), (low, vec![line()]), (text_block(), vec![line()])];
    block_case(blocks, 1, &[Text, Title], Text)
}

fn l1() -> Result<(), String> {
    let l = LineFeatures { preceding_space: 0.0, following_space: 20.0, stw_capital: true, ..line() };
    line_case(vec![l], &[Title], Title)
}

fn l2() -> Result<(), String> {
    let l = LineFeatures { word_count: 3, preceding_space: 20.0, following_space: 20.0, ..line() };
    line_case(vec![l], &[Title], Title)
}

fn l3() -> Result<(), String> {
    let l = LineFeatures { capital_prop: 50.0, word_count: 3, height: 20.0, preceding_space: 20.0, ..line() };
    line_case(vec![l], &[Title], Title)
}

fn l4() -> Result<(), String> {
    let l = LineFeatures { diff_hpos: 150.0, capital_prop: 5.0, preceding_space: 12.0, following_space: 12.0, ..line() };
    line_case(vec![l], &[Title], Title)
}

fn l5() -> Result<(), String> {
    let l = LineFeatures { hpos: 300.0, diff_hpos: 100.0, stw_digit: true, ..line() };
    line_case(vec![l], &[Firstline], Firstline)
}

fn lastline() -> LineFeatures {
    LineFeatures { width: 200.0, word_count: 3, hpos: 60.0, ..line() }
}

fn l6() -> Result<(), String> {
    line_case(vec![lastline()], &[Lastline], Text)
}

fn l7() -> Result<(), String> {
    let l = LineFeatures { stw_capital: true, following_space: 5.0, ..line() };
    line_case(vec![lastline(), l], &[Firstline], Firstline)
}

fn l8() -> Result<(), String> {
    let l = LineFeatures { stw_capital: true, preceding_space: 20.0, following_space: 5.0, ..line() };
    line_case(vec![l], &[Firstline], Firstline)
}

fn l9() -> Result<(), String> {
    let l = LineFeatures { stw_capital: true, hpos: 140.0, diff_hpos: 120.0, ..line() };
    line_case(vec![l], &[Firstline], Firstline)
}

fn l10() -> Result<(), String> {
    line_case(vec![line()], &[], Text)
}

fn header_line() -> LineFeatures {
    LineFeatures { sim_header_set: 95.0, ..line() }
}

fn l11() -> Result<(), String> {
    let blocks = vec![
        (block(), vec![header_line()]),
        (block(), vec![line()]),
        (block(), vec![header_line()]),
    ];
    let a = Annotator::default();
    let m = matrix(blocks);
    let pins = vec![Pin::Free; 3];
    let labels = a.label_matrix(m, &pins, &[None; 3]).map_err(|e| e.to_string())?;
    expect("blocks", labels.blocks, vec![Header, Text, Header])?;
    expect("lines", labels.lines, vec![Header, Header, Header])
}

fn l12() -> Result<(), String> {
    // L3 and L8 both fire.
    let l = LineFeatures {
        capital_prop: 12.0,
        word_count: 3,
        height: 20.0,
        preceding_space: 20.0,
        following_space: 5.0,
        stw_capital: true,
        ..line()
    };
    line_case(vec![l.clone()], &[Title, Firstline], Title)?;
    let caps = LineFeatures { capital_prop: 50.0, ..l };
    line_case(vec![caps], &[Title, Firstline], Firstline)
}

pub fn rule_cases() -> Vec<Case> {
    vec![
        Case { name: "B1 long block is Text", check: b1 },
        Case { name: "B2 short block between Text blocks is Text", check: b2 },
        Case { name: "B3 spaced short block between Text blocks is Title", check: b3 },
        Case { name: "B4 first page block with a header line is Header", check: b4 },
        Case { name: "B5 later page block with a header mark is Header", check: b5 },
        Case { name: "B6 small block wins Header over Text", check: b6 },
        Case { name: "B7 tall block wins Title over Text", check: b7 },
        Case { name: "L1 capitalised line after no gap is Title", check: l1 },
        Case { name: "L2 short spaced line is Title", check: l2 },
        Case { name: "L3 capitalised small line is Title", check: l3 },
        Case { name: "L4 shifted spaced line is Title", check: l4 },
        Case { name: "L5 indented line is Firstline", check: l5 },
        Case { name: "L6 short left line is Lastline then Text", check: l6 },
        Case { name: "L7 line after Lastline is Firstline", check: l7 },
        Case { name: "L8 spaced capitalised line is Firstline", check: l8 },
        Case { name: "L9 indented capitalised line is Firstline", check: l9 },
        Case { name: "L10 unmatched line is Text", check: l10 },
        Case { name: "L11 line between Header lines is Header", check: l11 },
        Case { name: "L12 tight line wins Title over Firstline", check: l12 },
    ]
}

fn after_title() -> Result<(), String> {
    let title = LineFeatures { word_count: 3, preceding_space: 20.0, following_space: 20.0, ..line() };
    let m = matrix(vec![(text_block(), vec![line(), line(), title, line(), line()])]);
    let labels = Annotator::default().label_matrix(m, &[Pin::Free], &[None; 5]).map_err(|e| e.to_string())?;
    expect("lines", labels.lines, vec![Title, Firstline, Title, Firstline, Text])
}

fn first_line() -> Result<(), String> {
    let a = Annotator::default();
    let m = matrix(vec![(text_block(), vec![line(), line()])]);
    let labels = a.label_matrix(m, &[Pin::Free], &[None; 2]).map_err(|e| e.to_string())?;
    expect("text document", labels.lines, vec![Title, Firstline])?;
    let m = matrix(vec![(block(), vec![header_line()]), (text_block(), vec![line(), line()])]);
    let labels = a.label_matrix(m, &[Pin::Free; 2], &[None; 3]).map_err(|e| e.to_string())?;
    expect("header document", labels.lines, vec![Header, Text, Text])
}

fn sandwich() -> Result<(), String> {
    // Two Text lines between Header lines stay Text; one is relabelled.
    let a = Annotator::default();
    let m = matrix(vec![
        (block(), vec![header_line()]),
        (text_block(), vec![line(), line()]),
        (block(), vec![header_line()]),
    ]);
    let labels = a.label_matrix(m, &[Pin::Free; 3], &[None; 4]).map_err(|e| e.to_string())?;
    expect("wide", labels.lines, vec![Header, Text, Text, Header])?;
    let m = matrix(vec![
        (block(), vec![header_line()]),
        (text_block(), vec![line()]),
        (block(), vec![header_line()]),
    ]);
    let labels = a.label_matrix(m, &[Pin::Free; 3], &[None; 3]).map_err(|e| e.to_string())?;
    expect("blocks", labels.blocks, vec![Header, Text, Header])?;
    expect("narrow", labels.lines, vec![Header, Header, Header])?;
    // Headers on the previous page do not count.
    let next_page = BlockFeatures { page: 2, ..text_block() };
    let m = matrix(vec![
        (block(), vec![header_line()]),
        (next_page, vec![line()]),
        (BlockFeatures { page: 2, ..block() }, vec![LineFeatures { header_mark1: true, ..line() }]),
    ]);
    let labels = a.label_matrix(m, &[Pin::Free; 3], &[None; 3]).map_err(|e| e.to_string())?;
    expect("across pages", labels.lines, vec![Header, Text, Header])
}

fn preset() -> Result<(), String> {
    // The rules would make the block Text and its first line Title.
    let a = Annotator::default();
    let m = matrix(vec![(text_block(), vec![line(), line(), line()])]);
    let pins = [Pin::Preset(Other)];
    let labels = a.label_matrix(m.clone(), &pins, &[None; 3]).map_err(|e| e.to_string())?;
    expect("preset block", labels.blocks, vec![Other])?;
    expect("preset block lines", labels.lines, vec![Other; 3])?;
    let presets = [Some(Text), Some(Title), None];
    let labels = a.label_matrix(m, &[Pin::Free], &presets).map_err(|e| e.to_string())?;
    expect("preset lines", labels.lines, vec![Text, Title, Firstline])
}

pub fn fixup_cases() -> Vec<Case> {
    vec![
        Case { name: "line after a Title becomes Firstline", check: after_title },
        Case { name: "first line becomes Title unless Header", check: first_line },
        Case { name: "line between Header lines becomes Header", check: sandwich },
        Case { name: "TYPE attributes are never overwritten", check: preset },
    ]
}
