//! Straightforward re-implementations of the feature definitions, written
//! without the crate's helpers, and a random document generator to compare
//! them on.

use lla_core::features::{self, BlockFeatures, DocumentFeatures, FeatureConfig, LineFeatures};
use lla_core::{Document, Page, TextBlock, TextLine};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Full-matrix edit distance over chars.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = if a[i - 1] == b[j - 1] { 0 } else { 1 };
            d[i][j] = (d[i - 1][j] + 1).min(d[i][j - 1] + 1).min(d[i - 1][j - 1] + cost);
        }
    }
    d[a.len()][b.len()]
}

fn lower_words(s: &str) -> Vec<String> {
    s.split_whitespace().map(|w| w.to_lowercase()).collect()
}

fn raw_similarity(a: &str, b: &str) -> f64 {
    let n = a.chars().count().max(b.chars().count());
    if n == 0 {
        return 100.0;
    }
    100.0 * (1.0 - levenshtein(a, b) as f64 / n as f64)
}

pub fn similarity(a: &str, b: &str) -> f64 {
    raw_similarity(&lower_words(a).join(" "), &lower_words(b).join(" "))
}

fn header_similarity(line: &str, phrases: &[&str]) -> f64 {
    let words = lower_words(line);
    if words.is_empty() {
        return 0.0;
    }
    let mut best = 0.0f64;
    for p in phrases {
        let pw = lower_words(p);
        if words.len() <= pw.len() {
            best = best.max(raw_similarity(&words.join(" "), &pw.join(" ")));
        } else {
            for start in 0..=words.len() - pw.len() {
                let window = words[start..start + pw.len()].join(" ");
                best = best.max(raw_similarity(&window, &pw.join(" ")));
            }
        }
    }
    best
}

fn sorted_median(v: &[f64]) -> f64 {
    percentile(v, 0.5)
}

fn percentile(v: &[f64], q: f64) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (s.len() as f64 - 1.0);
    let lo = pos as usize;
    let frac = pos - lo as f64;
    if frac == 0.0 {
        s[lo]
    } else {
        s[lo] * (1.0 - frac) + s[lo + 1] * frac
    }
}

fn space(next_top: f64, prev: (f64, f64)) -> f64 {
    let d = next_top - prev.0 - prev.1;
    if d < 0.0 {
        0.0
    } else {
        d
    }
}

fn proportions(text: &str) -> (f64, f64, f64) {
    let chars: Vec<char> = text.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let n = chars.len() as f64;
    let count = |f: fn(&char) -> bool| chars.iter().filter(|c| f(c)).count() as f64 * 100.0 / n;
    (count(|c| c.is_uppercase()), count(|c| c.is_numeric()), count(|c| !c.is_alphanumeric()))
}

const MONTHS: [&str; 2] = ["mars", "août"];
const UNITS: [&str; 2] = ["francs", "centimes"];
const STREETS: [&str; 2] = ["rue", "place"];

fn ends_in_digit(t: &str) -> bool {
    t.chars().last().is_some_and(|c| c.is_ascii_digit())
}

/// A one or two digit day, possibly glued after punctuation as in `3,50`.
fn short_day(t: &str) -> bool {
    let t = t.rsplit(|c: char| !c.is_alphanumeric()).next().unwrap_or(t);
    let t = t.strip_suffix("er").unwrap_or(t);
    (1..=2).contains(&t.len()) && t.chars().all(|c| c.is_ascii_digit())
}

/// Header marks over the generator's token vocabulary.
fn marks(text: &str) -> (bool, bool) {
    let t: Vec<&str> = text.split_whitespace().collect();
    let mark1 = t.iter().any(|w| *w == "-" || *w == "—" || w.eq_ignore_ascii_case("page"));
    let at = |i: usize| t.get(i).copied().unwrap_or("");
    let mut mark2 = false;
    for (i, &w) in t.iter().enumerate() {
        let year = at(i + 2).len() == 4 && at(i + 2).chars().all(|c| c.is_ascii_digit());
        let date = short_day(w) && MONTHS.contains(&at(i + 1)) && year;
        let numeric_date = w == "12/03/1943";
        let money = ends_in_digit(w) && UNITS.contains(&at(i + 1));
        let address = (ends_in_digit(w) && STREETS.contains(&at(i + 1)))
            || (ends_in_digit(w) && (at(i + 1) == "bis" || at(i + 1) == "bis,") && STREETS.contains(&at(i + 2)))
            || (w.strip_suffix(',').is_some_and(ends_in_digit) && STREETS.contains(&at(i + 1)));
        mark2 |= date || numeric_date || money || address;
    }
    (mark1, mark2)
}

const VOCAB: [&str; 38] = [
    "le", "journal", "ville", "marché", "Rédacteur", "Paraissant", "Directeur", "Abonnement", "Numéro",
    "LES", "NOUVELLES", "Été", "école", "Page", "page", "-", "—", "12", "3", "1943", "1914", "1er", "3,50",
    "3,", "12/03/1943", "mars", "août", "francs", "centimes", "rue", "place", "bis", "bis,", "Hier", "x",
    "42", "envoyez", "fonds",
];

fn random_text(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(0..=8);
    (0..n).map(|_| VOCAB[rng.random_range(0..VOCAB.len())]).collect::<Vec<_>>().join(" ")
}

/// Up to 5 blocks and 20 lines over one to three pages; blocks may be empty
/// and lines may carry no words.
pub fn random_document(seed: u64) -> Document {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_blocks = rng.random_range(1..=5);
    let n_pages = rng.random_range(1..=n_blocks.min(3));
    let mut budget = 20usize;
    let mut pages: Vec<Page> = (0..n_pages)
        .map(|_| Page { number: 0, width: None, height: None, blocks: Vec::new() })
        .collect();
    for b in 0..n_blocks {
        let page = if b < n_pages { b } else { rng.random_range(0..n_pages) };
        let max_lines = budget.min(6);
        let n_lines = if b == 0 { rng.random_range(1..=max_lines) } else { rng.random_range(0..=max_lines) };
        budget -= n_lines;
        let vpos = pages[page].blocks.last().map_or(0.0, |x: &TextBlock| x.vpos + x.height)
            + rng.random_range(-20.0..80.0);
        let mut y = vpos;
        let mut lines = Vec::new();
        for l in 0..n_lines {
            let h = rng.random_range(10.0..60.0);
            let line = TextLine::new(
                format!("b{b}_l{l}"),
                rng.random_range(0.0..400.0),
                y,
                h,
                rng.random_range(50.0..900.0),
            )
            .with_text(&random_text(&mut rng));
            y += h + rng.random_range(-5.0..30.0);
            lines.push(line);
        }
        let height = (y - vpos).max(1.0);
        let block = TextBlock::new(format!("b{b}"), rng.random_range(0.0..300.0), vpos, height, 1000.0)
            .with_lines(lines);
        pages[page].blocks.push(block);
    }
    Document::from_pages(format!("random{seed}"), pages)
}

pub struct Expected {
    pub lines: Vec<LineFeatures>,
    pub blocks: Vec<BlockFeatures>,
    pub doc: DocumentFeatures,
}

pub fn expected(doc: &Document, header_phrases: &[&str]) -> Expected {
    let title_words = lower_words(&doc.doc_title);
    let mut lines = Vec::new();
    let mut blocks = Vec::new();
    for (p, page) in doc.pages.iter().enumerate() {
        let page_no = p as u32 + 1;
        let mut flat: Vec<(usize, &TextLine)> = Vec::new();
        for (bi, b) in page.blocks.iter().enumerate() {
            for l in &b.lines {
                flat.push((bi, l));
            }
        }
        for (i, (bi, l)) in flat.iter().enumerate() {
            let block_hpos: Vec<f64> = page.blocks[*bi].lines.iter().map(|x| x.hpos).collect();
            let (cap, dig, non) = proportions(&l.text);
            let (m1, m2) = marks(&l.text);
            let first = l.text.chars().next();
            lines.push(LineFeatures {
                page: page_no,
                block_type: None,
                word_count: l.text.split_whitespace().count(),
                preceding_space: if i == 0 { 0.0 } else { space(l.vpos, (flat[i - 1].1.vpos, flat[i - 1].1.height)) },
                following_space: match flat.get(i + 1) {
                    Some((_, n)) => space(n.vpos, (l.vpos, l.height)),
                    None => 0.0,
                },
                height: l.height,
                width: l.width,
                hpos: l.hpos,
                vpos: l.vpos,
                diff_hpos: l.hpos - sorted_median(&block_hpos),
                capital_prop: cap,
                digit_prop: dig,
                non_alpha_prop: non,
                stw_capital: first.is_some_and(|c| c.is_uppercase()),
                stw_digit: first.is_some_and(|c| c.is_numeric()),
                ends_punct: l.text.ends_with(['.', '!', '?', ':', ';', ',']),
                header_mark1: m1,
                header_mark2: m2,
                sim_title: if title_words.is_empty() { 0.0 } else { similarity(&l.text, &doc.doc_title) },
                sim_header_set: header_similarity(&l.text, header_phrases),
                ctn_total: false,
            });
        }
        for (i, b) in page.blocks.iter().enumerate() {
            let mut row = BlockFeatures { page: page_no, ..Default::default() };
            if !b.lines.is_empty() {
                let texts: Vec<&str> = b.lines.iter().map(|l| l.text.as_str()).filter(|t| !t.is_empty()).collect();
                let text = texts.join(" ");
                let words = text.split_whitespace().count();
                let (cap, dig, _) = proportions(&text);
                let (m1, m2) = marks(&text);
                let gaps: Vec<f64> =
                    (1..b.lines.len()).map(|k| space(b.lines[k].vpos, (b.lines[k - 1].vpos, b.lines[k - 1].height))).collect();
                let n = b.lines.len();
                let med = |f: fn(&TextLine) -> f64| sorted_median(&b.lines.iter().map(f).collect::<Vec<_>>());
                row = BlockFeatures {
                    page: page_no,
                    block_type: None,
                    word_count: words,
                    preceding_space: if i == 0 {
                        0.0
                    } else {
                        space(b.vpos, (page.blocks[i - 1].vpos, page.blocks[i - 1].height))
                    },
                    following_space: match page.blocks.get(i + 1) {
                        Some(nb) => space(nb.vpos, (b.vpos, b.height)),
                        None => 0.0,
                    },
                    height: b.height,
                    width: b.width,
                    firsthpos: b.lines[0].hpos,
                    firstvpos: b.lines[0].vpos,
                    lasthpos: b.lines[n - 1].hpos,
                    lastvpos: b.lines[n - 1].vpos,
                    linecount: n,
                    word_ratio: words as f64 / n as f64,
                    med_height: med(|l| l.height),
                    med_width: med(|l| l.width),
                    med_hpos: med(|l| l.hpos),
                    med_vpos: med(|l| l.vpos),
                    med_word_count: med(|l| l.text.split_whitespace().count() as f64),
                    med_line_space: sorted_median(&gaps),
                    capital_prop: cap,
                    digit_prop: dig,
                    header_mark1: m1,
                    header_mark2: m2,
                };
            }
            blocks.push(row);
        }
    }

    let all_lines: Vec<&TextLine> = doc.pages.iter().flat_map(|p| &p.blocks).flat_map(|b| &b.lines).collect();
    let mut line_gaps = Vec::new();
    let mut block_gaps = Vec::new();
    let (mut heights, mut widths, mut counts, mut ratios) = (vec![], vec![], vec![], vec![]);
    for page in &doc.pages {
        for (i, b) in page.blocks.iter().enumerate() {
            if i > 0 {
                block_gaps.push(space(b.vpos, (page.blocks[i - 1].vpos, page.blocks[i - 1].height)));
            }
            for k in 1..b.lines.len() {
                line_gaps.push(space(b.lines[k].vpos, (b.lines[k - 1].vpos, b.lines[k - 1].height)));
            }
            if !b.lines.is_empty() {
                heights.push(b.height);
                widths.push(b.width);
                counts.push(b.lines.len() as f64);
                let words: usize = b.lines.iter().map(|l| l.text.split_whitespace().count()).sum();
                ratios.push(words as f64 / b.lines.len() as f64);
            }
        }
    }
    let over_lines = |f: fn(&TextLine) -> f64| sorted_median(&all_lines.iter().map(|l| f(l)).collect::<Vec<_>>());
    let doc_row = DocumentFeatures {
        med_height: over_lines(|l| l.height),
        med_width: over_lines(|l| l.width),
        med_word_count: over_lines(|l| l.text.split_whitespace().count() as f64),
        med_line_space: sorted_median(&line_gaps),
        med_block_height: sorted_median(&heights),
        med_block_width: sorted_median(&widths),
        med_block_space: sorted_median(&block_gaps),
        third_quartile_line_space: percentile(&line_gaps, 0.75),
        med_word_ratio: sorted_median(&ratios),
        med_line_count: sorted_median(&counts),
    };
    Expected { lines, blocks, doc: doc_row }
}

fn close(what: &str, a: f64, b: f64) -> Result<(), String> {
    if (a - b).abs() <= 1e-9 {
        Ok(())
    } else {
        Err(format!("{what}: got {a}, want {b}"))
    }
}

fn same<T: PartialEq + std::fmt::Debug>(what: &str, a: T, b: T) -> Result<(), String> {
    if a == b {
        Ok(())
    } else {
        Err(format!("{what}: got {a:?}, want {b:?}"))
    }
}

fn compare_line(i: usize, g: &LineFeatures, w: &LineFeatures) -> Result<(), String> {
    let at = |f: &str| format!("line {i} {f}");
    same(&at("page"), g.page, w.page)?;
    same(&at("blockType"), &g.block_type, &w.block_type)?;
    same(&at("wordCount"), g.word_count, w.word_count)?;
    same(&at("stwCapital"), g.stw_capital, w.stw_capital)?;
    same(&at("stwDigit"), g.stw_digit, w.stw_digit)?;
    same(&at("endsPunct"), g.ends_punct, w.ends_punct)?;
    same(&at("headerMark1"), g.header_mark1, w.header_mark1)?;
    same(&at("headerMark2"), g.header_mark2, w.header_mark2)?;
    same(&at("ctnTotal"), g.ctn_total, w.ctn_total)?;
    for (name, a, b) in [
        ("precedingSpace", g.preceding_space, w.preceding_space),
        ("followingSpace", g.following_space, w.following_space),
        ("height", g.height, w.height),
        ("width", g.width, w.width),
        ("hpos", g.hpos, w.hpos),
        ("vpos", g.vpos, w.vpos),
        ("diffHpos", g.diff_hpos, w.diff_hpos),
        ("capitalProp", g.capital_prop, w.capital_prop),
        ("digitProp", g.digit_prop, w.digit_prop),
        ("nonAlphaProp", g.non_alpha_prop, w.non_alpha_prop),
        ("simTitle", g.sim_title, w.sim_title),
        ("simHeaderSet", g.sim_header_set, w.sim_header_set),
    ] {
        close(&at(name), a, b)?;
    }
    Ok(())
}

fn compare_block(i: usize, g: &BlockFeatures, w: &BlockFeatures) -> Result<(), String> {
    let at = |f: &str| format!("block {i} {f}");
    same(&at("page"), g.page, w.page)?;
    same(&at("blockType"), &g.block_type, &w.block_type)?;
    same(&at("wordCount"), g.word_count, w.word_count)?;
    same(&at("linecount"), g.linecount, w.linecount)?;
    same(&at("headerMark1"), g.header_mark1, w.header_mark1)?;
    same(&at("headerMark2"), g.header_mark2, w.header_mark2)?;
    for (name, a, b) in [
        ("precedingSpace", g.preceding_space, w.preceding_space),
        ("followingSpace", g.following_space, w.following_space),
        ("height", g.height, w.height),
        ("width", g.width, w.width),
        ("firsthpos", g.firsthpos, w.firsthpos),
        ("firstvpos", g.firstvpos, w.firstvpos),
        ("lasthpos", g.lasthpos, w.lasthpos),
        ("lastvpos", g.lastvpos, w.lastvpos),
        ("wordRatio", g.word_ratio, w.word_ratio),
        ("medHeight", g.med_height, w.med_height),
        ("medWidth", g.med_width, w.med_width),
        ("medHpos", g.med_hpos, w.med_hpos),
        ("medVpos", g.med_vpos, w.med_vpos),
        ("medWordCount", g.med_word_count, w.med_word_count),
        ("medLineSpace", g.med_line_space, w.med_line_space),
        ("capitalProp", g.capital_prop, w.capital_prop),
        ("digitProp", g.digit_prop, w.digit_prop),
    ] {
        close(&at(name), a, b)?;
    }
    Ok(())
}

fn compare_doc(g: &DocumentFeatures, w: &DocumentFeatures) -> Result<(), String> {
    for (name, a, b) in [
        ("medHeight", g.med_height, w.med_height),
        ("medWidth", g.med_width, w.med_width),
        ("medWordCount", g.med_word_count, w.med_word_count),
        ("medLineSpace", g.med_line_space, w.med_line_space),
        ("medBlockHeight", g.med_block_height, w.med_block_height),
        ("medBlockWidth", g.med_block_width, w.med_block_width),
        ("medBlockSpace", g.med_block_space, w.med_block_space),
        ("thirdQuartileLineSpace", g.third_quartile_line_space, w.third_quartile_line_space),
        ("medWordRatio", g.med_word_ratio, w.med_word_ratio),
        ("medLineCount", g.med_line_count, w.med_line_count),
    ] {
        close(&format!("document {name}"), a, b)?;
    }
    Ok(())
}

/// Extracts features of `doc` and compares every cell with the oracle.
pub fn check_document(doc: &Document) -> Result<(), String> {
    let cfg = FeatureConfig::default();
    let phrases: Vec<&str> = cfg.header_words.phrases().iter().map(String::as_str).collect();
    let want = expected(doc, &phrases);
    let got = features::extract(doc, &cfg).map_err(|e| e.to_string())?;
    same("line rows", got.lines.len(), want.lines.len())?;
    same("block rows", got.blocks.len(), want.blocks.len())?;
    for (i, (g, w)) in got.lines.iter().zip(&want.lines).enumerate() {
        compare_line(i, g, w)?;
    }
    for (i, (g, w)) in got.blocks.iter().zip(&want.blocks).enumerate() {
        compare_block(i, g, w)?;
    }
    compare_doc(&got.doc, &want.doc)
}

/// Compares features on `n` random documents.
pub fn check_random_documents(n: u64) -> Result<(), String> {
    for seed in 0..n {
        let doc = random_document(seed);
        check_document(&doc).map_err(|e| format!("document seed {seed}: {e}"))?;
    }
    Ok(())
}

const ALPHABET: [char; 12] = ['a', 'b', 'c', 'A', 'B', 'é', 'É', ' ', ' ', 'x', '1', 'ü'];

fn random_string(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(0..=30);
    (0..n).map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())]).collect()
}

/// Compares edit distance and similarity with the oracle on random pairs.
pub fn check_random_pairs(n: usize, seed: u64) -> Result<(), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..n {
        let a = random_string(&mut rng);
        let b = random_string(&mut rng);
        same(&format!("distance {a:?} {b:?}"), features::edit_distance(&a, &b), levenshtein(&a, &b))?;
        same(&format!("similarity {a:?} {b:?}"), features::levenshtein_similarity(&a, &b), similarity(&a, &b))?;
    }
    Ok(())
}
