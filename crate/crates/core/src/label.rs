use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Logical role of a text block or line.
///
/// `Lastline` is a working label used while classifying lines; the pipeline
/// maps any residual `Lastline` to `Text` before output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogicalLabel {
    Text,
    Title,
    Header,
    Firstline,
    Other,
    Lastline,
}

impl LogicalLabel {
    /// Labels that may appear in output and ground truth.
    pub const TAGSET: [LogicalLabel; 5] = [
        LogicalLabel::Text,
        LogicalLabel::Title,
        LogicalLabel::Header,
        LogicalLabel::Firstline,
        LogicalLabel::Other,
    ];

    /// Labels that are scored; `Other` is excluded from evaluation.
    pub const SCORED: [LogicalLabel; 4] = [
        LogicalLabel::Text,
        LogicalLabel::Title,
        LogicalLabel::Firstline,
        LogicalLabel::Header,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            LogicalLabel::Text => "text",
            LogicalLabel::Title => "title",
            LogicalLabel::Header => "header",
            LogicalLabel::Firstline => "firstline",
            LogicalLabel::Other => "other",
            LogicalLabel::Lastline => "lastline",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicalLabel::Text => "Text",
            LogicalLabel::Title => "Title",
            LogicalLabel::Header => "Header",
            LogicalLabel::Firstline => "Firstline",
            LogicalLabel::Other => "Other",
            LogicalLabel::Lastline => "Lastline",
        }
    }

    /// Whether the label is allowed on a TextBlock.
    pub fn valid_for_block(self) -> bool {
        !matches!(self, LogicalLabel::Firstline | LogicalLabel::Lastline)
    }
}

impl fmt::Display for LogicalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LogicalLabel {
    type Err = Error;

    /// Case-insensitive parse of the output tagset. `Lastline` is accepted only
    /// so rule files can name the working label.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "text" => Ok(LogicalLabel::Text),
            "title" => Ok(LogicalLabel::Title),
            "header" => Ok(LogicalLabel::Header),
            "firstline" => Ok(LogicalLabel::Firstline),
            "other" => Ok(LogicalLabel::Other),
            "lastline" => Ok(LogicalLabel::Lastline),
            _ => Err(Error::UnknownLabel {
                label: s.to_string(),
                row: None,
            }),
        }
    }
}

/// Parse a label that may appear in output or ground truth files.
pub fn parse_output_label(s: &str, row: Option<usize>) -> Result<LogicalLabel, Error> {
    match s.parse::<LogicalLabel>() {
        Ok(LogicalLabel::Lastline) | Err(_) => Err(Error::UnknownLabel {
            label: s.to_string(),
            row,
        }),
        Ok(l) => Ok(l),
    }
}
