//! CSV ingestion: attribute projection, normalization to `[0, 1)`,
//! categorical coding and the missing-value policy.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::hash::Hasher;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use siphasher::sip::SipHasher13;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};

/// Largest factor applied to normalized values so the maximum stays below 1.
const SHRINK: f64 = 1.0 - f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttributeKind {
    /// Min-max normalized.
    Numeric,
    /// Seeded hash code per distinct value.
    Categorical,
    /// `YYYY-MM-DD`, converted to days since 1970-01-01 and then treated as numeric.
    Date,
    /// Already inside `[0, 1)`; used unchanged.
    Unit,
}

impl AttributeKind {
    pub fn name(self) -> &'static str {
        match self {
            AttributeKind::Numeric => "numeric",
            AttributeKind::Categorical => "categorical",
            AttributeKind::Date => "date",
            AttributeKind::Unit => "unit",
        }
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttributeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "num" | "numeric" => Ok(AttributeKind::Numeric),
            "cat" | "categorical" => Ok(AttributeKind::Categorical),
            "date" => Ok(AttributeKind::Date),
            "unit" => Ok(AttributeKind::Unit),
            _ => Err(Error::InvalidParameter(format!("unknown attribute kind `{s}`"))),
        }
    }
}

/// A selected column. Columns not listed are ignored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub name: String,
    pub kind: AttributeKind,
}

impl AttributeSpec {
    pub fn new(name: impl Into<String>, kind: AttributeKind) -> Self {
        AttributeSpec {
            name: name.into(),
            kind,
        }
    }

    pub fn numeric(name: impl Into<String>) -> Self {
        Self::new(name, AttributeKind::Numeric)
    }
}

impl FromStr for AttributeSpec {
    type Err = Error;

    /// `name` or `name:kind`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, kind) = match s.rsplit_once(':') {
            Some((name, kind)) => (name, kind.parse()?),
            None => (s, AttributeKind::Numeric),
        };
        if name.is_empty() {
            return Err(Error::InvalidParameter(format!("empty attribute name in `{s}`")));
        }
        Ok(AttributeSpec::new(name, kind))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MissingPolicy {
    /// Rows missing any selected value are skipped.
    #[default]
    Drop,
    /// Missing values become coordinate 0.
    ImputeZero,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestOptions {
    pub delimiter: u8,
    pub seed: u64,
    pub missing: MissingPolicy,
    /// Column holding integer point ids; row numbers are used otherwise.
    pub id_column: Option<String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            delimiter: b',',
            seed: 42,
            missing: MissingPolicy::Drop,
            id_column: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeReport {
    pub name: String,
    pub kind: AttributeKind,
    pub distinct_values: usize,
    /// Normalization bounds of numeric and date attributes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub codes: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub rows_read: usize,
    pub rows_kept: usize,
    pub rows_dropped: usize,
    pub missing_policy: MissingPolicy,
    pub seed: u64,
    pub attributes: Vec<AttributeReport>,
}

impl IngestReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Maps `v` from `[min, max]` into `[0, 1)`; a constant column maps to 0.
pub fn normalize(v: f64, min: f64, max: f64) -> f64 {
    if max > min {
        ((v - min) / (max - min) * SHRINK).clamp(0.0, SHRINK)
    } else {
        0.0
    }
}

pub fn normalize_numeric(values: &[f64], min: f64, max: f64) -> Vec<f64> {
    values.iter().map(|&v| normalize(v, min, max)).collect()
}

fn hash_code(value: &str, seed: u64, salt: u64) -> f64 {
    let mut h = SipHasher13::new_with_keys(seed, salt);
    h.write(value.as_bytes());
    (h.finish() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Deterministic pseudo-random code in `[0, 1)` for every distinct value,
/// from SipHash-1-3 keyed by `(seed, salt)`. The salt starts at 0 and is
/// bumped until all codes differ.
pub fn encode_categorical<'a, I>(values: I, seed: u64) -> BTreeMap<String, f64>
where
    I: IntoIterator<Item = &'a str>,
{
    let distinct: BTreeSet<&str> = values.into_iter().collect();
    for salt in 0u64.. {
        let table: BTreeMap<String, f64> = distinct
            .iter()
            .map(|v| (v.to_string(), hash_code(v, seed, salt)))
            .collect();
        let codes: BTreeSet<u64> = table.values().map(|c| c.to_bits()).collect();
        if codes.len() == table.len() {
            return table;
        }
    }
    unreachable!("salt space exhausted")
}

fn is_missing(raw: &str) -> bool {
    let t = raw.trim();
    t.is_empty()
        || ["na", "nan", "null", "n/a"]
            .iter()
            .any(|m| t.eq_ignore_ascii_case(m))
}

fn parse_date(raw: &str) -> Option<f64> {
    let date = NaiveDate::parse_from_str(raw, "%Y-%m-%d").ok()?;
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1)?;
    Some((date - epoch).num_days() as f64)
}

enum Cell {
    Missing,
    Number(f64),
    Text(String),
}

/// Loads `path` and projects it onto `attrs`.
pub fn load_csv(path: &Path, attrs: &[AttributeSpec], options: &IngestOptions) -> Result<(PointCloud, IngestReport)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_reader(file, attrs, options)
}

pub fn load_reader<R: Read>(
    input: R,
    attrs: &[AttributeSpec],
    options: &IngestOptions,
) -> Result<(PointCloud, IngestReport)> {
    if attrs.is_empty() {
        return Err(Error::InvalidParameter("no attributes selected".into()));
    }
    let names: BTreeSet<&str> = attrs.iter().map(|a| a.name.as_str()).collect();
    if names.len() != attrs.len() {
        return Err(Error::InvalidParameter("selected attributes must be distinct".into()));
    }

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(true)
        .from_reader(input);
    let header = reader.headers()?.clone();
    let column = |name: &str| {
        header
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let columns = attrs.iter().map(|a| column(&a.name)).collect::<Result<Vec<_>>>()?;
    let id_column = options.id_column.as_deref().map(column).transpose()?;

    let mut rows_read = 0usize;
    let mut ids = Vec::new();
    let mut cells: Vec<Vec<Cell>> = Vec::new();
    cells.resize_with(attrs.len(), Vec::new);
    let mut record = csv::StringRecord::new();
    while reader.read_record(&mut record)? {
        let line = record.position().map_or(rows_read as u64 + 2, |p| p.line());
        let row_index = rows_read as u64;
        rows_read += 1;
        let parse_error = |column: &str, value: &str| Error::Parse {
            row: line,
            column: column.to_string(),
            value: value.to_string(),
        };

        let mut row = Vec::with_capacity(attrs.len());
        for (attr, &col) in attrs.iter().zip(&columns) {
            let raw = record.get(col).unwrap_or("");
            if is_missing(raw) {
                row.push(Cell::Missing);
                continue;
            }
            let raw = raw.trim();
            row.push(match attr.kind {
                AttributeKind::Categorical => Cell::Text(raw.to_string()),
                AttributeKind::Date => {
                    Cell::Number(parse_date(raw).ok_or_else(|| parse_error(&attr.name, raw))?)
                }
                AttributeKind::Numeric => Cell::Number(
                    raw.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| parse_error(&attr.name, raw))?,
                ),
                AttributeKind::Unit => Cell::Number(
                    raw.parse::<f64>()
                        .ok()
                        .filter(|v| (0.0..1.0).contains(v))
                        .ok_or_else(|| parse_error(&attr.name, raw))?,
                ),
            });
        }
        if options.missing == MissingPolicy::Drop && row.iter().any(|c| matches!(c, Cell::Missing)) {
            continue;
        }
        let id = match id_column {
            Some(col) => {
                let raw = record.get(col).unwrap_or("").trim();
                let name = options.id_column.as_deref().unwrap_or_default();
                raw.parse::<u64>().map_err(|_| parse_error(name, raw))?
            }
            None => row_index,
        };
        ids.push(id);
        for (dst, cell) in cells.iter_mut().zip(row) {
            dst.push(cell);
        }
    }

    let rows_kept = ids.len();
    if rows_kept == 0 {
        return Err(Error::EmptyCloud);
    }

    let n = attrs.len();
    let mut coords = vec![0.0; rows_kept * n];
    let mut reports = Vec::with_capacity(n);
    for (axis, (attr, column)) in attrs.iter().zip(&cells).enumerate() {
        let mut report = AttributeReport {
            name: attr.name.clone(),
            kind: attr.kind,
            distinct_values: 0,
            min: None,
            max: None,
            codes: None,
        };
        let mapped: Vec<f64> = match attr.kind {
            AttributeKind::Categorical => {
                let table = encode_categorical(
                    column.iter().filter_map(|c| match c {
                        Cell::Text(s) => Some(s.as_str()),
                        _ => None,
                    }),
                    options.seed,
                );
                report.distinct_values = table.len();
                let mapped = column
                    .iter()
                    .map(|c| match c {
                        Cell::Text(s) => table[s.as_str()],
                        _ => 0.0,
                    })
                    .collect();
                report.codes = Some(table);
                mapped
            }
            kind => {
                let values = column.iter().filter_map(|c| match c {
                    Cell::Number(v) => Some(*v),
                    _ => None,
                });
                let distinct: BTreeSet<u64> = values.clone().map(f64::to_bits).collect();
                report.distinct_values = distinct.len();
                let (min, max) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                });
                let scale = kind != AttributeKind::Unit && min <= max;
                if scale {
                    report.min = Some(min);
                    report.max = Some(max);
                }
                column
                    .iter()
                    .map(|c| match c {
                        Cell::Number(v) if scale => normalize(*v, min, max),
                        Cell::Number(v) => *v,
                        _ => 0.0,
                    })
                    .collect()
            }
        };
        for (row, v) in mapped.into_iter().enumerate() {
            coords[row * n + axis] = v;
        }
        reports.push(report);
    }

    let cloud = PointCloud::new(n, coords, ids)?;
    let report = IngestReport {
        rows_read,
        rows_kept,
        rows_dropped: rows_read - rows_kept,
        missing_policy: options.missing,
        seed: options.seed,
        attributes: reports,
    };
    Ok((cloud, report))
}
