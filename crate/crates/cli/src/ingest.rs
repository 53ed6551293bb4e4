//! CSV ingestion: one value column, optionally summed over a group column,
//! ordered by a timestamp column.

use std::collections::BTreeMap;
use std::collections::btree_map::Entry;
use std::io;
use std::path::Path;

use parima::TimeSeries;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestSpec {
    pub time_column: String,
    pub value_column: String,
    /// When set, values sharing a timestamp are summed across groups.
    pub group_column: Option<String>,
}

impl Default for IngestSpec {
    fn default() -> Self {
        Self {
            time_column: "t".into(),
            value_column: "value".into(),
            group_column: None,
        }
    }
}

/// An ingested series together with the timestamp label of each point.
#[derive(Debug, Clone, PartialEq)]
pub struct Labeled {
    pub labels: Vec<String>,
    pub series: TimeSeries,
}

pub fn ingest_csv(path: &Path, spec: &IngestSpec) -> CliResult<TimeSeries> {
    Ok(read_labeled(path, spec)?.series)
}

pub fn read_labeled(path: &Path, spec: &IngestSpec) -> CliResult<Labeled> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    parse_labeled(file, spec)
}

fn column(headers: &csv::StringRecord, name: &str) -> CliResult<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::UnknownColumn(name.to_string()))
}

fn malformed(e: csv::Error) -> CliError {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    CliError::MalformedCsv {
        line,
        reason: e.to_string(),
    }
}

pub fn parse_labeled<R: io::Read>(input: R, spec: &IngestSpec) -> CliResult<Labeled> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(malformed)?.clone();
    let t_col = column(&headers, &spec.time_column)?;
    let v_col = column(&headers, &spec.value_column)?;
    let g_col = spec.group_column.as_deref().map(|g| column(&headers, g)).transpose()?;

    // timestamp -> group -> value; without a group column every row is its own group ""
    let mut rows: BTreeMap<String, BTreeMap<String, Option<f64>>> = BTreeMap::new();
    for record in reader.records() {
        let record = record.map_err(malformed)?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let timestamp = record[t_col].to_string();
        if timestamp.is_empty() {
            return Err(CliError::MalformedCsv {
                line,
                reason: "empty timestamp".into(),
            });
        }
        let raw = &record[v_col];
        let value = if raw.is_empty() {
            None
        } else {
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Some(v),
                _ => {
                    return Err(CliError::MalformedCsv {
                        line,
                        reason: format!("{raw:?} is not a finite number"),
                    })
                }
            }
        };
        let group = g_col.map(|g| record[g].to_string()).unwrap_or_default();
        match rows.entry(timestamp.clone()).or_default().entry(group.clone()) {
            Entry::Occupied(_) => {
                return Err(CliError::DuplicateKey {
                    timestamp,
                    group: g_col.map(|_| group),
                })
            }
            Entry::Vacant(slot) => {
                slot.insert(value);
            }
        }
    }
    if rows.is_empty() {
        return Err(parima::Error::EmptyInput.into());
    }

    let mut points: Vec<(String, Option<f64>)> = rows
        .into_iter()
        .map(|(t, groups)| {
            // a missing cell in any group leaves the total unknown
            let total = groups.values().try_fold(0.0, |acc, v| v.map(|v| acc + v));
            (t, total)
        })
        .collect();
    // numeric timestamps sort by value; anything else (ISO dates) sorts as text
    let numeric: Option<Vec<f64>> = points.iter().map(|(t, _)| t.parse::<f64>().ok()).collect();
    if let Some(keys) = numeric {
        let mut idx: Vec<usize> = (0..points.len()).collect();
        idx.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]));
        points = idx.into_iter().map(|i| points[i].clone()).collect();
    }
    let (labels, values): (Vec<String>, Vec<Option<f64>>) = points.into_iter().unzip();
    Ok(Labeled {
        labels,
        series: TimeSeries::new(values)?,
    })
}
