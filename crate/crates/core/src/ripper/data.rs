//! Column-oriented training data.

use serde::{Deserialize, Serialize};

use crate::alto::ElementKind;
use crate::error::{Error, Result};
use crate::features::{learning_columns, BlockFeatures, DERIVED_BLOCK_COLUMNS, FeatureKind, FeatureValue, LineFeatures};

#[derive(Debug, Clone, PartialEq)]
pub enum Column {
    Numeric(Vec<f64>),
    Boolean(Vec<bool>),
    Categorical(Vec<Option<String>>),
}

impl Column {
    pub fn len(&self) -> usize {
        match self {
            Column::Numeric(v) => v.len(),
            Column::Boolean(v) => v.len(),
            Column::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn kind(&self) -> FeatureKind {
        match self {
            Column::Numeric(_) => FeatureKind::Numeric,
            Column::Boolean(_) => FeatureKind::Boolean,
            Column::Categorical(_) => FeatureKind::Categorical,
        }
    }

    fn select(&self, rows: &[usize]) -> Column {
        match self {
            Column::Numeric(v) => Column::Numeric(rows.iter().map(|&i| v[i]).collect()),
            Column::Boolean(v) => Column::Boolean(rows.iter().map(|&i| v[i]).collect()),
            Column::Categorical(v) => Column::Categorical(rows.iter().map(|&i| v[i].clone()).collect()),
        }
    }

    fn empty_like(kind: FeatureKind) -> Column {
        match kind {
            FeatureKind::Numeric => Column::Numeric(Vec::new()),
            FeatureKind::Boolean => Column::Boolean(Vec::new()),
            FeatureKind::Categorical => Column::Categorical(Vec::new()),
        }
    }

    fn push(&mut self, v: FeatureValue) -> bool {
        match (self, v) {
            (Column::Numeric(c), FeatureValue::Num(x)) => c.push(x),
            (Column::Boolean(c), FeatureValue::Bool(x)) => c.push(x),
            (Column::Categorical(c), FeatureValue::Cat(x)) => c.push(x),
            _ => return false,
        }
        true
    }
}

/// Name and type of a model input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub kind: FeatureKindName,
}

/// Serializable mirror of [`FeatureKind`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKindName {
    Numeric,
    Boolean,
    Categorical,
}

impl From<FeatureKind> for FeatureKindName {
    fn from(k: FeatureKind) -> Self {
        match k {
            FeatureKind::Numeric => FeatureKindName::Numeric,
            FeatureKind::Boolean => FeatureKindName::Boolean,
            FeatureKind::Categorical => FeatureKindName::Categorical,
        }
    }
}

impl From<FeatureKindName> for FeatureKind {
    fn from(k: FeatureKindName) -> Self {
        match k {
            FeatureKindName::Numeric => FeatureKind::Numeric,
            FeatureKindName::Boolean => FeatureKind::Boolean,
            FeatureKindName::Categorical => FeatureKind::Categorical,
        }
    }
}

/// Named columns of equal length describing lines or blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    kind: ElementKind,
    names: Vec<String>,
    columns: Vec<Column>,
    rows: usize,
}

impl Dataset {
    pub fn new(kind: ElementKind, names: Vec<String>, columns: Vec<Column>) -> Result<Self> {
        if names.len() != columns.len() {
            return Err(Error::InvalidArgument(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let rows = columns.first().map_or(0, Column::len);
        if let Some((n, c)) = names.iter().zip(&columns).find(|(_, c)| c.len() != rows) {
            return Err(Error::InvalidArgument(format!(
                "column `{n}` has {} rows, expected {rows}",
                c.len()
            )));
        }
        Ok(Dataset { kind, names, columns, rows })
    }

    fn from_rows<R>(
        kind: ElementKind,
        rows: &[R],
        value: impl Fn(&R, &str) -> Option<FeatureValue>,
        kind_of: impl Fn(&str) -> Option<FeatureKind>,
    ) -> Result<Self> {
        let names: Vec<&str> = learning_columns(kind);
        let mut columns: Vec<Column> = names
            .iter()
            .map(|n| kind_of(n).map(Column::empty_like).ok_or_else(|| Error::MissingFeature(n.to_string())))
            .collect::<Result<_>>()?;
        for row in rows {
            for (name, col) in names.iter().zip(columns.iter_mut()) {
                let v = value(row, name).ok_or_else(|| Error::MissingFeature(name.to_string()))?;
                if !col.push(v) {
                    return Err(Error::InvalidArgument(format!("feature `{name}` has inconsistent types")));
                }
            }
        }
        Dataset::new(kind, names.into_iter().map(String::from).collect(), columns)
    }

    /// Learning columns of line feature rows.
    pub fn from_lines(rows: &[LineFeatures]) -> Result<Self> {
        Dataset::from_rows(ElementKind::Line, rows, LineFeatures::value, crate::features::line_feature_kind)
    }

    /// Learning columns of block feature rows.
    pub fn from_blocks(rows: &[BlockFeatures]) -> Result<Self> {
        Dataset::from_rows(ElementKind::Block, rows, BlockFeatures::value, crate::features::block_feature_kind)
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.names.iter().position(|n| n == name).map(|i| &self.columns[i])
    }

    pub fn specs(&self) -> Vec<FeatureSpec> {
        self.names
            .iter()
            .zip(&self.columns)
            .map(|(n, c)| FeatureSpec { name: n.clone(), kind: c.kind().into() })
            .collect()
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            kind: self.kind,
            names: self.names.clone(),
            columns: self.columns.iter().map(|c| c.select(indices)).collect(),
            rows: indices.len(),
        }
    }

    /// Reads a feature table such as the one written by feature extraction.
    /// `element_id` is required and `document_id` optional; every other
    /// column is a feature. Known feature names keep their type, other
    /// columns are boolean when every cell is `true`/`false`, numeric when
    /// every cell parses as a number, and categorical otherwise. Derived block
    /// columns are dropped so the result matches [`Dataset::from_blocks`].
    pub fn read_csv(reader: impl std::io::Read, kind: ElementKind) -> Result<(Dataset, Vec<(String, String)>)> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        let find = |n: &str| headers.iter().position(|h| h == n);
        let id_col = find("element_id").ok_or_else(|| Error::MissingFeature("element_id".into()))?;
        let doc_col = find("document_id");
        let feature_cols: Vec<usize> = (0..headers.len())
            .filter(|&i| i != id_col && Some(i) != doc_col)
            .filter(|&i| kind == ElementKind::Line || !DERIVED_BLOCK_COLUMNS.contains(&&headers[i]))
            .collect();
        let mut cells: Vec<Vec<String>> = vec![Vec::new(); feature_cols.len()];
        let mut ids = Vec::new();
        for record in rdr.records() {
            let record = record?;
            ids.push((
                doc_col.map(|c| record[c].to_string()).unwrap_or_default(),
                record[id_col].to_string(),
            ));
            for (slot, &c) in cells.iter_mut().zip(&feature_cols) {
                slot.push(record[c].to_string());
            }
        }
        let known = |name: &str| match kind {
            ElementKind::Line => crate::features::line_feature_kind(name),
            ElementKind::Block => crate::features::block_feature_kind(name),
        };
        let mut names = Vec::new();
        let mut columns = Vec::new();
        for (&c, values) in feature_cols.iter().zip(cells) {
            let name = headers[c].to_string();
            let is_bool = |v: &String| v == "true" || v == "false";
            let column_kind = known(&name).unwrap_or_else(|| {
                if !values.is_empty() && values.iter().all(is_bool) {
                    FeatureKind::Boolean
                } else if !values.is_empty() && values.iter().all(|v| v.parse::<f64>().is_ok()) {
                    FeatureKind::Numeric
                } else {
                    FeatureKind::Categorical
                }
            });
            let bad = |row: usize, v: &str| {
                Error::InvalidArgument(format!("column `{name}` row {}: `{v}` is not a {column_kind:?} value", row + 1))
            };
            let column = match column_kind {
                FeatureKind::Numeric => Column::Numeric(
                    values.iter().enumerate().map(|(i, v)| v.parse().map_err(|_| bad(i, v))).collect::<Result<_>>()?,
                ),
                FeatureKind::Boolean => Column::Boolean(
                    values
                        .iter()
                        .enumerate()
                        .map(|(i, v)| v.to_ascii_lowercase().parse().map_err(|_| bad(i, v)))
                        .collect::<Result<_>>()?,
                ),
                FeatureKind::Categorical => Column::Categorical(
                    values.into_iter().map(|v| (!v.is_empty()).then(|| v.to_lowercase())).collect(),
                ),
            };
            names.push(name);
            columns.push(column);
        }
        let rows = ids.len();
        let mut data = Dataset::new(kind, names, columns)?;
        data.rows = rows;
        Ok((data, ids))
    }

    /// Stacks datasets with identical columns.
    pub fn concat(parts: &[Dataset]) -> Result<Dataset> {
        let Some(first) = parts.first() else {
            return Err(Error::InvalidArgument("no datasets to concatenate".into()));
        };
        let mut columns = first.columns.clone();
        for p in &parts[1..] {
            if p.names != first.names || p.kind != first.kind {
                return Err(Error::InvalidArgument("datasets have different columns".into()));
            }
            for (acc, c) in columns.iter_mut().zip(&p.columns) {
                match (acc, c) {
                    (Column::Numeric(a), Column::Numeric(b)) => a.extend_from_slice(b),
                    (Column::Boolean(a), Column::Boolean(b)) => a.extend_from_slice(b),
                    (Column::Categorical(a), Column::Categorical(b)) => a.extend_from_slice(b),
                    _ => return Err(Error::InvalidArgument("datasets have different column types".into())),
                }
            }
        }
        Dataset::new(first.kind, first.names.clone(), columns)
    }
}
