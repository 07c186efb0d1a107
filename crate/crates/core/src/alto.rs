//! In-memory model of an XML ALTO document and its reader/writer.
//!
//! Only the parts of ALTO needed for logical layout analysis are modelled:
//! pages, text blocks (ComposedBlock wrappers are flattened), text lines and
//! the `CONTENT` of their `String` children. The original bytes are kept so
//! annotated output can be re-emitted without losing anything else the file
//! carries.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::Cursor;

use log::warn;
use quick_xml::events::{BytesStart, Event};
use quick_xml::{Reader, Writer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::LogicalLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextLine {
    pub id: String,
    pub hpos: f64,
    pub vpos: f64,
    pub height: f64,
    pub width: f64,
    pub words: Vec<String>,
    pub text: String,
    /// `TYPE` attribute present in the source file. Never overwritten.
    pub type_attr: Option<String>,
    pub label: Option<LogicalLabel>,
}

impl TextLine {
    pub fn new(id: impl Into<String>, hpos: f64, vpos: f64, height: f64, width: f64) -> Self {
        TextLine {
            id: id.into(),
            hpos,
            vpos,
            height,
            width,
            words: Vec::new(),
            text: String::new(),
            type_attr: None,
            label: None,
        }
    }

    /// Builder-style helper; splits `text` on whitespace into words.
    pub fn with_text(mut self, text: &str) -> Self {
        self.set_words(text.split_whitespace().map(str::to_string).collect());
        self
    }

    pub fn set_words(&mut self, words: Vec<String>) {
        self.text = words.join(" ");
        self.words = words;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TextBlock {
    pub id: String,
    pub hpos: f64,
    pub vpos: f64,
    pub height: f64,
    pub width: f64,
    pub language: Option<String>,
    /// `TYPE` attribute present in the source file. Never overwritten.
    pub type_attr: Option<String>,
    pub lines: Vec<TextLine>,
    pub label: Option<LogicalLabel>,
}

impl TextBlock {
    pub fn new(id: impl Into<String>, hpos: f64, vpos: f64, height: f64, width: f64) -> Self {
        TextBlock {
            id: id.into(),
            hpos,
            vpos,
            height,
            width,
            language: None,
            type_attr: None,
            lines: Vec::new(),
            label: None,
        }
    }

    pub fn with_lines(mut self, lines: Vec<TextLine>) -> Self {
        self.lines = lines;
        self
    }

    pub fn text(&self) -> String {
        self.lines
            .iter()
            .map(|l| l.text.as_str())
            .filter(|t| !t.is_empty())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn word_count(&self) -> usize {
        self.lines.iter().map(|l| l.words.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Page {
    /// 1-based, consecutive.
    pub number: u32,
    pub width: Option<f64>,
    pub height: Option<f64>,
    pub blocks: Vec<TextBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub source_path: String,
    /// Reference title used by the `simTitle` feature.
    pub doc_title: String,
    pub pages: Vec<Page>,
    /// Non-fatal problems noticed while parsing.
    #[serde(skip)]
    pub warnings: Vec<String>,
    #[serde(skip)]
    source: Option<Vec<u8>>,
}

/// Position of a line in reading order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LineRef {
    pub page: usize,
    pub block: usize,
    pub line: usize,
}

/// Kind of an annotated element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementKind {
    #[serde(rename = "block")]
    Block,
    #[serde(rename = "line")]
    Line,
}

impl ElementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Block => "block",
            ElementKind::Line => "line",
        }
    }
}

impl std::str::FromStr for ElementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "block" | "textblock" => Ok(ElementKind::Block),
            "line" | "textline" => Ok(ElementKind::Line),
            other => Err(Error::InvalidArgument(format!("unknown element kind `{other}`"))),
        }
    }
}

impl Document {
    /// Builds a document from pages constructed in code. Pages are renumbered
    /// from 1 and the title defaults to the first line of page 1.
    pub fn from_pages(id: impl Into<String>, mut pages: Vec<Page>) -> Self {
        for (i, p) in pages.iter_mut().enumerate() {
            p.number = i as u32 + 1;
        }
        let mut doc = Document {
            id: id.into(),
            source_path: String::new(),
            doc_title: String::new(),
            pages,
            warnings: Vec::new(),
            source: None,
        };
        doc.doc_title = doc.default_title();
        doc
    }

    /// Text of the first line of page 1, or empty.
    pub fn default_title(&self) -> String {
        self.pages
            .first()
            .and_then(|p| p.blocks.iter().flat_map(|b| b.lines.iter()).next())
            .map(|l| l.text.clone())
            .unwrap_or_default()
    }

    pub fn set_title(&mut self, title: Option<&str>) {
        self.doc_title = match title {
            Some(t) => t.to_string(),
            None => self.default_title(),
        };
    }

    pub fn blocks(&self) -> impl Iterator<Item = &TextBlock> {
        self.pages.iter().flat_map(|p| p.blocks.iter())
    }

    pub fn lines(&self) -> impl Iterator<Item = &TextLine> {
        self.blocks().flat_map(|b| b.lines.iter())
    }

    pub fn block_count(&self) -> usize {
        self.blocks().count()
    }

    pub fn line_count(&self) -> usize {
        self.lines().count()
    }

    pub fn line_at(&self, r: LineRef) -> &TextLine {
        &self.pages[r.page].blocks[r.block].lines[r.line]
    }

    /// Linear iteration order: blocks in file order, then lines within block.
    pub fn reading_order(&self) -> Vec<LineRef> {
        reading_order(self)
    }

    /// Clears every computed label; `type_attr` is left untouched.
    pub fn clear_labels(&mut self) {
        for page in &mut self.pages {
            for block in &mut page.blocks {
                block.label = None;
                for line in &mut block.lines {
                    line.label = None;
                }
            }
        }
    }

    fn check_unique_ids(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for b in self.blocks() {
            if !seen.insert(b.id.as_str()) {
                return Err(Error::DuplicateId(b.id.clone()));
            }
            for l in &b.lines {
                if !seen.insert(l.id.as_str()) {
                    return Err(Error::DuplicateId(l.id.clone()));
                }
            }
        }
        Ok(())
    }
}

pub fn reading_order(doc: &Document) -> Vec<LineRef> {
    let mut out = Vec::new();
    for (p, page) in doc.pages.iter().enumerate() {
        for (b, block) in page.blocks.iter().enumerate() {
            out.extend((0..block.lines.len()).map(|l| LineRef { page: p, block: b, line: l }));
        }
    }
    out
}

fn attr_eq(key: &[u8], name: &str) -> bool {
    key.eq_ignore_ascii_case(name.as_bytes())
}

fn xml_err<E: std::fmt::Display>(reader: &Reader<&[u8]>, e: E) -> Error {
    Error::Xml {
        offset: reader.error_position(),
        message: e.to_string(),
    }
}

struct Attrs {
    id: Option<String>,
    hpos: Option<f64>,
    vpos: Option<f64>,
    height: Option<f64>,
    width: Option<f64>,
    type_attr: Option<String>,
    language: Option<String>,
    content: Option<String>,
}

fn read_attrs(reader: &Reader<&[u8]>, e: &BytesStart<'_>) -> Result<Attrs> {
    let mut a = Attrs {
        id: None,
        hpos: None,
        vpos: None,
        height: None,
        width: None,
        type_attr: None,
        language: None,
        content: None,
    };
    for attr in e.attributes() {
        let attr = attr.map_err(|err| xml_err(reader, err))?;
        let key = attr.key.local_name();
        let key = key.as_ref();
        let value = attr
            .unescape_value()
            .map_err(|err| xml_err(reader, err))?
            .into_owned();
        let num = || value.trim().parse::<f64>().ok();
        if attr_eq(key, "ID") {
            a.id = Some(value);
        } else if attr_eq(key, "HPOS") {
            a.hpos = num();
        } else if attr_eq(key, "VPOS") {
            a.vpos = num();
        } else if attr_eq(key, "HEIGHT") {
            a.height = num();
        } else if attr_eq(key, "WIDTH") {
            a.width = num();
        } else if attr_eq(key, "TYPE") {
            a.type_attr = Some(value);
        } else if attr_eq(key, "LANGUAGE") || attr_eq(key, "LANG") {
            a.language = Some(value);
        } else if attr_eq(key, "CONTENT") {
            a.content = Some(value);
        }
    }
    Ok(a)
}

fn coord(value: Option<f64>, what: &str, id: &str, warnings: &mut Vec<String>) -> f64 {
    match value {
        Some(v) if v >= 0.0 && v.is_finite() => v,
        Some(v) => {
            warnings.push(format!("{id}: {what}={v} clamped to 0"));
            0.0
        }
        None => {
            warnings.push(format!("{id}: missing {what}, using 0"));
            0.0
        }
    }
}

/// Parses ALTO bytes. The document id is left empty; see [`parse_alto_named`].
pub fn parse_alto(xml: &[u8]) -> Result<Document> {
    parse_alto_named(xml, "")
}

/// Parses ALTO bytes into a [`Document`] with the given id.
pub fn parse_alto_named(xml: &[u8], id: &str) -> Result<Document> {
    let mut reader = Reader::from_reader(xml);
    reader.config_mut().trim_text(false);
    let mut buf = Vec::new();

    let mut pages: Vec<Page> = Vec::new();
    let mut warnings = Vec::new();
    let mut saw_print_space = false;
    let mut block: Option<TextBlock> = None;
    let mut line: Option<TextLine> = None;
    let mut n_blocks = 0usize;
    let mut n_lines = 0usize;
    let mut open: Vec<String> = Vec::new();

    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_err(&reader, e))?;
        let (start, is_empty) = match &event {
            Event::Start(e) => (Some(e.clone().into_owned()), false),
            Event::Empty(e) => (Some(e.clone().into_owned()), true),
            _ => (None, false),
        };
        if let Some(e) = start {
            let name = e.local_name();
            match name.as_ref() {
                b"Page" => {
                    let a = read_attrs(&reader, &e)?;
                    pages.push(Page {
                        number: pages.len() as u32 + 1,
                        width: a.width,
                        height: a.height,
                        blocks: Vec::new(),
                    });
                }
                b"PrintSpace" => {
                    saw_print_space = true;
                    if pages.is_empty() {
                        let a = read_attrs(&reader, &e)?;
                        pages.push(Page { number: 1, width: a.width, height: a.height, blocks: Vec::new() });
                    }
                }
                b"TextBlock" => {
                    let a = read_attrs(&reader, &e)?;
                    n_blocks += 1;
                    let id = a.id.unwrap_or_else(|| {
                        warnings.push(format!("TextBlock #{n_blocks} has no ID"));
                        format!("TB_{n_blocks}")
                    });
                    let mut b = TextBlock::new(
                        id.clone(),
                        coord(a.hpos, "HPOS", &id, &mut warnings),
                        coord(a.vpos, "VPOS", &id, &mut warnings),
                        coord(a.height, "HEIGHT", &id, &mut warnings),
                        coord(a.width, "WIDTH", &id, &mut warnings),
                    );
                    b.language = a.language;
                    b.type_attr = a.type_attr;
                    if is_empty {
                        push_block(&mut pages, b);
                    } else {
                        block = Some(b);
                    }
                }
                b"TextLine" => {
                    let a = read_attrs(&reader, &e)?;
                    n_lines += 1;
                    let id = a.id.unwrap_or_else(|| {
                        warnings.push(format!("TextLine #{n_lines} has no ID"));
                        format!("TL_{n_lines}")
                    });
                    let mut l = TextLine::new(
                        id.clone(),
                        coord(a.hpos, "HPOS", &id, &mut warnings),
                        coord(a.vpos, "VPOS", &id, &mut warnings),
                        coord(a.height, "HEIGHT", &id, &mut warnings),
                        coord(a.width, "WIDTH", &id, &mut warnings),
                    );
                    l.type_attr = a.type_attr;
                    match (&mut block, is_empty) {
                        (Some(b), true) => b.lines.push(l),
                        (Some(_), false) => line = Some(l),
                        (None, _) => warnings.push(format!("{id}: TextLine outside TextBlock ignored")),
                    }
                }
                b"String" => {
                    let a = read_attrs(&reader, &e)?;
                    if let (Some(l), Some(c)) = (&mut line, a.content) {
                        if !c.trim().is_empty() {
                            l.words.push(c.trim().to_string());
                        }
                    }
                }
                _ => {}
            }
        }
        match &event {
            Event::Start(e) => open.push(String::from_utf8_lossy(e.name().as_ref()).into_owned()),
            Event::End(_) => {
                open.pop();
            }
            _ => {}
        }
        match &event {
            Event::End(e) => match e.local_name().as_ref() {
                b"TextLine" => {
                    if let (Some(mut l), Some(b)) = (line.take(), &mut block) {
                        l.text = l.words.join(" ");
                        b.lines.push(l);
                    }
                }
                b"TextBlock" => {
                    if let Some(b) = block.take() {
                        push_block(&mut pages, b);
                    }
                }
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }

    if let Some(name) = open.last() {
        return Err(Error::Xml {
            offset: reader.buffer_position(),
            message: format!("unexpected end of file inside <{name}>"),
        });
    }
    if !saw_print_space {
        return Err(Error::EmptyDocument);
    }
    for w in &warnings {
        warn!("{id}: {w}");
    }
    let mut doc = Document {
        id: id.to_string(),
        source_path: String::new(),
        doc_title: String::new(),
        pages,
        warnings,
        source: Some(xml.to_vec()),
    };
    doc.check_unique_ids()?;
    doc.doc_title = doc.default_title();
    Ok(doc)
}

fn push_block(pages: &mut Vec<Page>, b: TextBlock) {
    if pages.is_empty() {
        pages.push(Page { number: 1, width: None, height: None, blocks: Vec::new() });
    }
    pages.last_mut().expect("non-empty").blocks.push(b);
}

/// Output format for [`write_annotated`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Alto,
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "alto" | "xml" => Ok(OutputFormat::Alto),
            "json" | "jsonl" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(Error::InvalidArgument(format!("unknown output format `{s}`"))),
        }
    }
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Alto => "xml",
            OutputFormat::Json => "jsonl",
            OutputFormat::Csv => "csv",
        }
    }
}

/// One labelled element, as written to JSON lines and CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementRecord {
    #[serde(rename = "documentId", alias = "document_id")]
    pub document_id: String,
    pub page: u32,
    #[serde(rename = "elementId", alias = "element_id")]
    pub element_id: String,
    #[serde(rename = "elementKind", alias = "kind")]
    pub kind: ElementKind,
    pub label: String,
}

/// Label implied by a pre-existing `TYPE` attribute: one of the tagset names
/// maps to itself (so annotated output re-reads unchanged), anything else
/// (`illegible`, `advertisement`, ...) is `Other`.
pub fn preset_label(type_attr: &str) -> LogicalLabel {
    match crate::label::parse_output_label(type_attr, None) {
        Ok(l) => l,
        Err(_) => LogicalLabel::Other,
    }
}

fn block_output_label(b: &TextBlock) -> Option<LogicalLabel> {
    b.label.or(b.type_attr.as_deref().map(preset_label))
}

fn output_label(l: Option<LogicalLabel>) -> Option<LogicalLabel> {
    l.map(|l| if l == LogicalLabel::Lastline { LogicalLabel::Text } else { l })
}

pub fn element_records(doc: &Document) -> Result<Vec<ElementRecord>> {
    let mut missing = Vec::new();
    let mut out = Vec::new();
    for page in &doc.pages {
        for b in &page.blocks {
            match output_label(block_output_label(b)) {
                Some(l) => out.push(ElementRecord {
                    document_id: doc.id.clone(),
                    page: page.number,
                    element_id: b.id.clone(),
                    kind: ElementKind::Block,
                    label: l.name().to_string(),
                }),
                None => missing.push(b.id.clone()),
            }
            for line in &b.lines {
                match output_label(line.label.or(line.type_attr.as_deref().map(preset_label))) {
                    Some(l) => out.push(ElementRecord {
                        document_id: doc.id.clone(),
                        page: page.number,
                        element_id: line.id.clone(),
                        kind: ElementKind::Line,
                        label: l.name().to_string(),
                    }),
                    None => missing.push(line.id.clone()),
                }
            }
        }
    }
    if missing.is_empty() {
        Ok(out)
    } else {
        Err(Error::IncompleteAnnotation(missing))
    }
}

pub const CSV_HEADER: &str = "document_id,page,element_id,kind,label";

/// Serializes a labelled document.
pub fn write_annotated(doc: &Document, format: OutputFormat) -> Result<Vec<u8>> {
    let records = element_records(doc)?;
    match format {
        OutputFormat::Json => {
            let mut out = Vec::new();
            for r in &records {
                serde_json::to_writer(&mut out, r)?;
                out.push(b'\n');
            }
            Ok(out)
        }
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
            w.write_record(CSV_HEADER.split(','))?;
            for r in &records {
                w.write_record([
                    r.document_id.as_str(),
                    &r.page.to_string(),
                    r.element_id.as_str(),
                    r.kind.as_str(),
                    r.label.as_str(),
                ])?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
        OutputFormat::Alto => match &doc.source {
            Some(src) => rewrite_alto(doc, src),
            None => Ok(generate_alto(doc).into_bytes()),
        },
    }
}

/// Streams the original file, adding `TYPE` to each TextBlock and TextLine.
/// Elements are matched by document order, so ids are never needed.
fn rewrite_alto(doc: &Document, src: &[u8]) -> Result<Vec<u8>> {
    let block_labels: Vec<Option<LogicalLabel>> =
        doc.blocks().map(|b| output_label(b.label)).collect();
    let line_labels: Vec<Option<LogicalLabel>> =
        doc.lines().map(|l| output_label(l.label)).collect();
    let (mut bi, mut li) = (0usize, 0usize);

    let mut reader = Reader::from_reader(src);
    reader.config_mut().trim_text(false);
    let mut writer = Writer::new(Cursor::new(Vec::with_capacity(src.len() + src.len() / 8)));
    let mut buf = Vec::new();
    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| xml_err(&reader, e))?;
        let rewritten = match &event {
            Event::Start(e) | Event::Empty(e) => {
                let label = match e.local_name().as_ref() {
                    b"TextBlock" => {
                        bi += 1;
                        Some(block_labels.get(bi - 1).copied().flatten())
                    }
                    b"TextLine" => {
                        li += 1;
                        Some(line_labels.get(li - 1).copied().flatten())
                    }
                    _ => None,
                };
                match label {
                    Some(label) => Some(with_type(&reader, e, label)?),
                    None => None,
                }
            }
            _ => None,
        };
        let res = match (rewritten, &event) {
            (Some(start), Event::Start(_)) => writer.write_event(Event::Start(start)),
            (Some(start), _) => writer.write_event(Event::Empty(start)),
            (None, Event::Eof) => break,
            (None, ev) => writer.write_event(ev.borrow()),
        };
        res.map_err(|e| Error::Io(std::io::Error::other(e)))?;
        buf.clear();
    }
    Ok(writer.into_inner().into_inner())
}

fn with_type(
    reader: &Reader<&[u8]>,
    e: &BytesStart<'_>,
    label: Option<LogicalLabel>,
) -> Result<BytesStart<'static>> {
    let name = String::from_utf8_lossy(e.name().as_ref()).into_owned();
    let mut out = BytesStart::new(name);
    let mut has_type = false;
    for attr in e.attributes() {
        let attr = attr.map_err(|err| xml_err(reader, err))?;
        if attr_eq(attr.key.local_name().as_ref(), "TYPE") {
            has_type = true;
        }
        out.push_attribute(attr);
    }
    if let (false, Some(label)) = (has_type, label) {
        out.push_attribute(("TYPE", label.as_str()));
    }
    Ok(out)
}

fn escape_attr(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

/// Minimal ALTO v3 for documents built in code.
fn generate_alto(doc: &Document) -> String {
    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str("<alto xmlns=\"http://www.loc.gov/standards/alto/ns-v3#\">\n<Layout>\n");
    for page in &doc.pages {
        let _ = write!(s, "<Page ID=\"P{}\" PHYSICAL_IMG_NR=\"{}\"", page.number, page.number);
        if let Some(w) = page.width {
            let _ = write!(s, " WIDTH=\"{w}\"");
        }
        if let Some(h) = page.height {
            let _ = write!(s, " HEIGHT=\"{h}\"");
        }
        s.push_str(">\n<PrintSpace>\n");
        for b in &page.blocks {
            let _ = write!(
                s,
                "<TextBlock ID=\"{}\" HPOS=\"{}\" VPOS=\"{}\" HEIGHT=\"{}\" WIDTH=\"{}\"",
                escape_attr(&b.id),
                b.hpos,
                b.vpos,
                b.height,
                b.width
            );
            if let Some(lang) = &b.language {
                let _ = write!(s, " LANGUAGE=\"{}\"", escape_attr(lang));
            }
            match (&b.type_attr, output_label(b.label)) {
                (Some(t), _) => {
                    let _ = write!(s, " TYPE=\"{}\"", escape_attr(t));
                }
                (None, Some(l)) => {
                    let _ = write!(s, " TYPE=\"{}\"", l.as_str());
                }
                _ => {}
            }
            s.push_str(">\n");
            for l in &b.lines {
                let _ = write!(
                    s,
                    "<TextLine ID=\"{}\" HPOS=\"{}\" VPOS=\"{}\" HEIGHT=\"{}\" WIDTH=\"{}\"",
                    escape_attr(&l.id),
                    l.hpos,
                    l.vpos,
                    l.height,
                    l.width
                );
                match (&l.type_attr, output_label(l.label)) {
                    (Some(t), _) => {
                        let _ = write!(s, " TYPE=\"{}\"", escape_attr(t));
                    }
                    (None, Some(lab)) => {
                        let _ = write!(s, " TYPE=\"{}\"", lab.as_str());
                    }
                    _ => {}
                }
                s.push('>');
                for (i, w) in l.words.iter().enumerate() {
                    if i > 0 {
                        s.push_str("<SP/>");
                    }
                    let _ = write!(s, "<String CONTENT=\"{}\"/>", escape_attr(w));
                }
                s.push_str("</TextLine>\n");
            }
            s.push_str("</TextBlock>\n");
        }
        s.push_str("</PrintSpace>\n</Page>\n");
    }
    s.push_str("</Layout>\n</alto>\n");
    s
}
