//! Indicator time series from World Bank style CSV exports.
//!
//! Two layouts are accepted and told apart by the header row:
//!
//! * wide: one row per indicator, one column per year. The indicator column is
//!   `Indicator Code` (the official export, which may carry preamble lines
//!   before the header) or a leading `indicator` column.
//! * long: header `indicator,year,value`.
//!
//! Empty cells and the export's `..` placeholder become gaps. Gaps are kept,
//! never interpolated.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Model role -> indicator code, e.g. `"gdp_level" -> "NY.GDP.MKTP.CD"`.
pub type RoleMap = BTreeMap<String, String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorldBankLayout {
    Wide,
    Long,
}

/// One indicator's chronological series. `values[n]` belongs to `years[n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    pub indicator: String,
    pub years: Vec<i32>,
    pub values: Vec<Option<f64>>,
}

impl IndicatorSeries {
    pub fn gaps(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

type Raw = BTreeMap<String, BTreeMap<i32, Option<f64>>>;

/// Reads a World Bank CSV and returns one series per mapped role.
///
/// Every role in `required` must appear in `mapping`, and every mapped
/// indicator must be present in the file.
pub fn ingest_worldbank_csv(
    bytes: &[u8],
    mapping: &RoleMap,
    required: &[&str],
) -> Result<(WorldBankLayout, BTreeMap<String, IndicatorSeries>)> {
    let unmapped: Vec<String> = required.iter().filter(|r| !mapping.contains_key(**r)).map(|r| r.to_string()).collect();
    if !unmapped.is_empty() {
        return Err(Error::MissingRole { missing: unmapped, found: mapping.keys().cloned().collect() });
    }

    let (layout, raw) = parse(bytes)?;

    let mut found = Vec::new();
    let mut missing = Vec::new();
    let mut out = BTreeMap::new();
    for (role, code) in mapping {
        match raw.get(code) {
            Some(points) => {
                found.push(role.clone());
                out.insert(
                    role.clone(),
                    IndicatorSeries {
                        indicator: code.clone(),
                        years: points.keys().copied().collect(),
                        values: points.values().copied().collect(),
                    },
                );
            }
            None => missing.push(role.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingRole { missing, found });
    }
    Ok((layout, out))
}

fn parse(bytes: &[u8]) -> Result<(WorldBankLayout, Raw)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(bytes);
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let fields: Vec<String> = rec.iter().map(|f| f.trim().trim_start_matches('\u{feff}').to_owned()).collect();
        rows.push((line, fields));
    }

    for (n, (line, header)) in rows.iter().enumerate() {
        let lower: Vec<String> = header.iter().map(|h| h.to_ascii_lowercase()).collect();
        if lower.len() >= 3 && lower[..3] == ["indicator", "year", "value"] {
            return Ok((WorldBankLayout::Long, parse_long(&rows[n + 1..])?));
        }
        let code_col = lower
            .iter()
            .position(|h| h == "indicator code")
            .or_else(|| (lower.first().map(String::as_str) == Some("indicator")).then_some(0));
        if let Some(col) = code_col {
            let years: Vec<(usize, i32)> =
                header.iter().enumerate().filter_map(|(c, h)| parse_year(h).map(|y| (c, y))).collect();
            if years.is_empty() {
                return Err(Error::Parse { line: *line, message: "wide layout header has no year columns".into() });
            }
            return Ok((WorldBankLayout::Wide, parse_wide(&rows[n + 1..], col, &years)?));
        }
    }
    Err(Error::Parse {
        line: 1,
        message: "no recognizable header (expected `indicator,year,value` or an indicator column followed by years)"
            .into(),
    })
}

fn parse_wide(rows: &[(usize, Vec<String>)], code_col: usize, years: &[(usize, i32)]) -> Result<Raw> {
    let mut raw = Raw::new();
    for (line, fields) in rows {
        if fields.iter().all(String::is_empty) {
            continue;
        }
        let code = fields.get(code_col).cloned().unwrap_or_default();
        if code.is_empty() {
            return Err(Error::Parse { line: *line, message: "empty indicator code".into() });
        }
        let mut points = BTreeMap::new();
        for &(c, y) in years {
            let cell = fields.get(c).map(String::as_str).unwrap_or("");
            points.insert(y, parse_value(cell, *line)?);
        }
        if raw.insert(code.clone(), points).is_some() {
            return Err(Error::Parse { line: *line, message: format!("duplicate indicator `{code}`") });
        }
    }
    Ok(raw)
}

fn parse_long(rows: &[(usize, Vec<String>)]) -> Result<Raw> {
    let mut raw = Raw::new();
    for (line, fields) in rows {
        if fields.iter().all(String::is_empty) {
            continue;
        }
        if fields.len() != 3 {
            return Err(Error::Parse { line: *line, message: format!("expected 3 fields, found {}", fields.len()) });
        }
        let year = parse_year(&fields[1])
            .ok_or_else(|| Error::Parse { line: *line, message: format!("bad year `{}`", fields[1]) })?;
        let value = parse_value(&fields[2], *line)?;
        if raw.entry(fields[0].clone()).or_default().insert(year, value).is_some() {
            return Err(Error::Parse { line: *line, message: format!("duplicate year {year} for `{}`", fields[0]) });
        }
    }
    Ok(raw)
}

fn parse_year(s: &str) -> Option<i32> {
    (s.len() == 4 && s.bytes().all(|b| b.is_ascii_digit())).then(|| s.parse().ok()).flatten()
}

fn parse_value(cell: &str, line: usize) -> Result<Option<f64>> {
    if cell.is_empty() || cell == ".." {
        return Ok(None);
    }
    let plain = super::parse_decimal(cell);
    let v = plain.or_else(|| cell.parse::<f64>().ok().filter(|v| v.is_finite()));
    v.map(Some).ok_or_else(|| Error::Parse { line, message: format!("bad value `{cell}`") })
}
