//! Tabular input: CSV parsing, feature typing and one-hot encoding.

mod csv_reader;
mod onehot;

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{HnetError, Result};

pub use onehot::{one_hot_encode, one_hot_encode_all, CategoryColumn, OneHotMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    /// Parsed but not typed yet.
    Pending,
    Discrete,
    Numeric,
    Excluded,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ColumnData {
    Text(Vec<Option<String>>),
    Numeric(Vec<Option<f64>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Text(v) => v.len(),
            ColumnData::Numeric(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_present(&self, row: usize) -> bool {
        match self {
            ColumnData::Text(v) => v[row].is_some(),
            ColumnData::Numeric(v) => v[row].is_some(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub name: String,
    pub kind: FeatureKind,
    pub data: ColumnData,
}

impl Column {
    pub fn text(&self) -> Option<&[Option<String>]> {
        match &self.data {
            ColumnData::Text(v) => Some(v),
            ColumnData::Numeric(_) => None,
        }
    }

    pub fn numeric(&self) -> Option<&[Option<f64>]> {
        match &self.data {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Text(_) => None,
        }
    }

    pub fn present_count(&self) -> usize {
        (0..self.data.len())
            .filter(|&r| self.data.is_present(r))
            .count()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureTable {
    pub columns: Vec<Column>,
    pub n_rows: usize,
}

impl FeatureTable {
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        let n_rows = columns.first().map_or(0, |c| c.data.len());
        for c in &columns {
            if c.data.len() != n_rows {
                return Err(HnetError::LengthMismatch {
                    expected: n_rows,
                    found: c.data.len(),
                });
            }
        }
        Ok(Self { columns, n_rows })
    }

    pub fn column(&self, name: &str) -> Option<&Column> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// First `n` rows.
    pub fn head(&self, n: usize) -> FeatureTable {
        let n = n.min(self.n_rows);
        let columns = self
            .columns
            .iter()
            .map(|c| Column {
                name: c.name.clone(),
                kind: c.kind,
                data: match &c.data {
                    ColumnData::Text(v) => ColumnData::Text(v[..n].to_vec()),
                    ColumnData::Numeric(v) => ColumnData::Numeric(v[..n].to_vec()),
                },
            })
            .collect();
        FeatureTable { columns, n_rows: n }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| HnetError::Io(std::io::Error::other(e));
        w.write_record(self.columns.iter().map(|c| c.name.as_str()))
            .map_err(csv_err)?;
        for row in 0..self.n_rows {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|c| match &c.data {
                    ColumnData::Text(v) => v[row].clone().unwrap_or_default(),
                    ColumnData::Numeric(v) => v[row].map(|x| x.to_string()).unwrap_or_default(),
                })
                .collect();
            w.write_record(&cells).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn default_delimiter() -> char {
    ','
}

fn default_na_tokens() -> Vec<String> {
    ["", "NA", "NaN", "None"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

fn default_unique_fraction() -> f64 {
    0.20
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestConfig {
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    #[serde(default = "default_na_tokens")]
    pub na_tokens: Vec<String>,
    /// A real-valued column with at least this fraction of distinct values
    /// among its present cells is typed numeric.
    #[serde(default = "default_unique_fraction")]
    pub unique_fraction: f64,
    /// Apply `unique_fraction` to integer-formatted columns too. Off by
    /// default: integer columns are discrete unless overridden.
    pub unique_fraction_for_integers: bool,
    pub type_overrides: BTreeMap<String, FeatureKind>,
}

impl Default for IngestConfig {
    fn default() -> Self {
        Self {
            delimiter: default_delimiter(),
            na_tokens: default_na_tokens(),
            unique_fraction: default_unique_fraction(),
            unique_fraction_for_integers: false,
            type_overrides: BTreeMap::new(),
        }
    }
}

/// Reads a UTF-8 CSV with a header row. Every non-missing cell is kept
/// verbatim; columns come back as [`FeatureKind::Pending`].
pub fn parse_csv(bytes: &[u8], config: &IngestConfig) -> Result<FeatureTable> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| HnetError::MalformedCsv(format!("input is not UTF-8: {e}")))?;
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    if text.trim().is_empty() {
        return Err(HnetError::EmptyInput);
    }
    let mut records = csv_reader::split_records(text, config.delimiter)?.into_iter();
    let header = records
        .next()
        .ok_or_else(|| HnetError::MalformedCsv("missing header row".into()))?;
    if header.iter().all(|h| h.trim().is_empty()) {
        return Err(HnetError::MalformedCsv("header row is blank".into()));
    }
    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h.as_str()) {
            return Err(HnetError::MalformedCsv(format!("duplicate header `{h}`")));
        }
    }

    let width = header.len();
    let na: HashSet<&str> = config.na_tokens.iter().map(String::as_str).collect();
    let mut cells: Vec<Vec<Option<String>>> = vec![Vec::new(); width];
    for (i, rec) in records.enumerate() {
        if width > 1 && rec.len() == 1 && rec[0].is_empty() {
            continue; // blank line
        }
        if rec.len() != width {
            return Err(HnetError::MalformedCsv(format!(
                "row {} has {} fields, header has {width}",
                i + 2,
                rec.len()
            )));
        }
        for (col, value) in cells.iter_mut().zip(rec) {
            col.push(if na.contains(value.as_str()) {
                None
            } else {
                Some(value)
            });
        }
    }

    let columns = header
        .into_iter()
        .zip(cells)
        .map(|(name, values)| Column {
            name,
            kind: FeatureKind::Pending,
            data: ColumnData::Text(values),
        })
        .collect();
    FeatureTable::new(columns)
}

fn parse_real(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|x| x.is_finite())
}

fn looks_float_formatted(s: &str) -> bool {
    s.contains(['.', 'e', 'E'])
}

/// Renders integer-valued float text ("1.0", "-2.00") as the bare integer so
/// it unifies with "1" / "-2".
pub fn canonical_label(s: &str) -> String {
    if let Some((int, frac)) = s.split_once('.') {
        let digits = int.strip_prefix(['-', '+']).unwrap_or(int);
        if !digits.is_empty()
            && digits.bytes().all(|b| b.is_ascii_digit())
            && frac.bytes().all(|b| b == b'0')
        {
            return int.to_string();
        }
    }
    s.to_string()
}

fn infer_kind(values: &[Option<String>], config: &IngestConfig) -> FeatureKind {
    let present: Vec<&str> = values.iter().flatten().map(String::as_str).collect();
    if present.is_empty() {
        return FeatureKind::Excluded;
    }
    let Some(reals) = present
        .iter()
        .map(|s| parse_real(s))
        .collect::<Option<Vec<_>>>()
    else {
        return FeatureKind::Discrete;
    };
    if reals.iter().any(|x| x.fract() != 0.0) {
        return FeatureKind::Numeric;
    }
    let float_kind = present.iter().any(|s| looks_float_formatted(s));
    if float_kind || config.unique_fraction_for_integers {
        // +0.0 shifts -0.0 onto the same bit pattern
        let distinct: HashSet<u64> = reals.iter().map(|x| (x + 0.0).to_bits()).collect();
        if distinct.len() as f64 >= config.unique_fraction * present.len() as f64 {
            return FeatureKind::Numeric;
        }
    }
    FeatureKind::Discrete
}

/// Types every column as discrete or numeric. Overrides win over inference.
pub fn assign_types(table: FeatureTable, config: &IngestConfig) -> Result<FeatureTable> {
    for name in config.type_overrides.keys() {
        if table.column(name).is_none() {
            return Err(HnetError::UnknownOverrideColumn(name.clone()));
        }
    }
    let n_rows = table.n_rows;
    let mut columns = Vec::with_capacity(table.columns.len());
    for col in table.columns {
        let values = match col.data {
            ColumnData::Text(v) => v,
            // already typed numeric, nothing to do
            ColumnData::Numeric(_) => {
                columns.push(col);
                continue;
            }
        };
        let kind = match config.type_overrides.get(&col.name) {
            Some(FeatureKind::Pending) | None => infer_kind(&values, config),
            Some(&k) => k,
        };
        let data = match kind {
            FeatureKind::Numeric => {
                let mut out = Vec::with_capacity(values.len());
                for v in values {
                    out.push(match v {
                        None => None,
                        Some(s) => Some(parse_real(&s).ok_or_else(|| {
                            HnetError::NonNumericOverride(col.name.clone(), s.clone())
                        })?),
                    });
                }
                ColumnData::Numeric(out)
            }
            FeatureKind::Discrete => ColumnData::Text(
                values
                    .into_iter()
                    .map(|v| v.map(|s| canonical_label(&s)))
                    .collect(),
            ),
            _ => ColumnData::Text(values),
        };
        columns.push(Column {
            name: col.name,
            kind,
            data,
        });
    }
    Ok(FeatureTable { columns, n_rows })
}
