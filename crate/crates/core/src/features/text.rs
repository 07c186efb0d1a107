//! Text-derived line and block features.

use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of single-character insertions, deletions and substitutions
/// needed to turn `a` into `b`, counted over Unicode scalar values.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Lowercase and collapse runs of whitespace to single spaces.
pub fn normalize(s: &str) -> String {
    s.split_whitespace()
        .map(|w| w.to_lowercase())
        .collect::<Vec<_>>()
        .join(" ")
}

fn similarity_normalized(a: &str, b: &str) -> f64 {
    let longest = a.chars().count().max(b.chars().count());
    if longest == 0 {
        return 100.0;
    }
    100.0 * (1.0 - edit_distance(a, b) as f64 / longest as f64)
}

/// Levenshtein similarity on a 0–100 scale after normalization.
pub fn levenshtein_similarity(a: &str, b: &str) -> f64 {
    similarity_normalized(&normalize(a), &normalize(b))
}

/// Phrases whose presence suggests masthead or running-head material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeaderWordSet {
    phrases: Vec<String>,
}

pub const DEFAULT_HEADER_PHRASES: [&str; 16] = [
    "Rubrique Locale",
    "Gérant",
    "Publicité",
    "Abonnement",
    "Envoyez les fonds",
    "Conservez chaque numéro",
    "Rédacteur",
    "Directeur",
    "Numéro",
    "Chèque postal",
    "Dépôt",
    "Achat-Vente-Echange",
    "Annonce",
    "Imprimerie",
    "En vente partout",
    "Paraissant",
];

impl Default for HeaderWordSet {
    fn default() -> Self {
        HeaderWordSet {
            phrases: DEFAULT_HEADER_PHRASES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl HeaderWordSet {
    pub fn new(phrases: Vec<String>) -> Result<Self> {
        let phrases: Vec<String> = phrases
            .into_iter()
            .map(|p| p.trim().to_string())
            .filter(|p| !p.is_empty())
            .collect();
        if phrases.is_empty() {
            return Err(Error::InvalidArgument("header word set is empty".into()));
        }
        Ok(HeaderWordSet { phrases })
    }

    /// One phrase per non-empty line; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        Self::new(
            text.lines()
                .filter(|l| !l.trim_start().starts_with('#'))
                .map(str::to_string)
                .collect(),
        )
    }

    pub fn phrases(&self) -> &[String] {
        &self.phrases
    }
}

/// Best similarity between any header phrase and a same-length word window
/// of the line. Lines shorter than a phrase are compared whole.
pub fn sim_header_set(line: &str, set: &HeaderWordSet) -> f64 {
    let norm = normalize(line);
    if norm.is_empty() {
        return 0.0;
    }
    let words: Vec<&str> = norm.split(' ').collect();
    let mut best: f64 = 0.0;
    for phrase in set.phrases() {
        let phrase = normalize(phrase);
        let n = phrase.split(' ').count();
        if words.len() <= n {
            best = best.max(similarity_normalized(&norm, &phrase));
            continue;
        }
        for window in words.windows(n) {
            best = best.max(similarity_normalized(&window.join(" "), &phrase));
            if best >= 100.0 {
                return 100.0;
            }
        }
    }
    best
}

const DASHES: [char; 3] = ['-', '\u{2013}', '\u{2014}'];

fn page_regex() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\bpage\b").expect("valid regex"))
}

fn mark2_regexes() -> &'static [Regex; 4] {
    static RE: OnceLock<[Regex; 4]> = OnceLock::new();
    RE.get_or_init(|| {
        let months = "janvier|f[ée]vrier|mars|avril|mai|juin|juillet|ao[ûu]t|septembre|octobre|novembre|d[ée]cembre";
        [
            // 12 mars 1943, 1er août 1914
            Regex::new(&format!(r"(?i)\b\d{{1,2}}(?:er)?\s+(?:{months})\s+\d{{4}}\b")).expect("valid regex"),
            // 12/03/1943, 1.3.43
            Regex::new(r"\b\d{1,2}[/.\-]\d{1,2}[/.\-]\d{2,4}\b").expect("valid regex"),
            // 5 francs, 0,50 fr., 25 c.
            Regex::new(r"(?i)\b\d+(?:[.,]\d+)?\s*(?:francs?\b|centimes?\b|fr\.|c\.)").expect("valid regex"),
            // 12, rue de la Paix / 3 bis place ...
            Regex::new(r"(?i)\b\d+\s*(?:bis|ter)?,?\s+(?:rue|place|avenue|boulevard|bd)\b").expect("valid regex"),
        ]
    })
}

/// `(headerMark1, headerMark2)`: page word or dash; date, currency or address.
pub fn header_marks(text: &str) -> (bool, bool) {
    let mark1 = text.contains(DASHES) || page_regex().is_match(text);
    let mark2 = mark2_regexes().iter().any(|re| re.is_match(text));
    (mark1, mark2)
}

/// `(capitalProp, digitProp, nonAlphaProp)` as percentages of the
/// non-whitespace characters.
pub fn char_proportions(text: &str) -> (f64, f64, f64) {
    let (mut total, mut upper, mut digit, mut non_alnum) = (0usize, 0usize, 0usize, 0usize);
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        total += 1;
        if c.is_uppercase() {
            upper += 1;
        }
        if c.is_numeric() {
            digit += 1;
        }
        if !c.is_alphanumeric() {
            non_alnum += 1;
        }
    }
    if total == 0 {
        return (0.0, 0.0, 0.0);
    }
    let pct = |n: usize| 100.0 * n as f64 / total as f64;
    (pct(upper), pct(digit), pct(non_alnum))
}

/// `(stwCapital, stwDigit)` from the first character of the first word.
pub fn starts_with(words: &[String]) -> (bool, bool) {
    match words.first().and_then(|w| w.chars().next()) {
        Some(c) => (c.is_uppercase(), c.is_numeric()),
        None => (false, false),
    }
}

pub fn ends_with_punct(text: &str) -> bool {
    matches!(
        text.trim_end().chars().last(),
        Some('.' | '!' | '?' | ':' | ';' | ',')
    )
}
