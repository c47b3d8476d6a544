//! Transaction classification into money-tensor cells.
//!
//! A transaction is a scalar amount plus three labels. Classification resolves
//! the labels against a [`Taxonomy`] and yields a [`CellIncrement`]; building
//! a tensor sums increments per cell.

mod worldbank;

pub use worldbank::{ingest_worldbank_csv, IndicatorSeries, RoleMap, WorldBankLayout};

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Axis, Error, Result};
use crate::tensor::{Dims, Tensor3};

/// Ordered, unique labels for each tensor axis, plus optional sector flags
/// consulted by scenario shocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TaxonomyRaw", into = "TaxonomyRaw")]
pub struct Taxonomy {
    sectors: Vec<String>,
    agents: Vec<String>,
    /// Declaration order is chronological order. Labels are opaque.
    periods: Vec<String>,
    service_sectors: Vec<String>,
    brown_sectors: Vec<String>,
    green_sectors: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TaxonomyRaw {
    sectors: Vec<String>,
    agents: Vec<String>,
    periods: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    service_sectors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    brown_sectors: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    green_sectors: Vec<String>,
}

impl TryFrom<TaxonomyRaw> for Taxonomy {
    type Error = Error;

    fn try_from(r: TaxonomyRaw) -> Result<Self> {
        Taxonomy::new(r.sectors, r.agents, r.periods)?.with_flags(r.service_sectors, r.brown_sectors, r.green_sectors)
    }
}

impl From<Taxonomy> for TaxonomyRaw {
    fn from(t: Taxonomy) -> Self {
        Self {
            sectors: t.sectors,
            agents: t.agents,
            periods: t.periods,
            service_sectors: t.service_sectors,
            brown_sectors: t.brown_sectors,
            green_sectors: t.green_sectors,
        }
    }
}

fn check_axis(axis: Axis, labels: &[String]) -> Result<()> {
    if labels.is_empty() {
        return Err(invalid(format!("{axis} axis must be non-empty")));
    }
    let mut seen = HashSet::new();
    for l in labels {
        if l.is_empty() {
            return Err(invalid(format!("empty {axis} label")));
        }
        if !seen.insert(l.as_str()) {
            return Err(invalid(format!("duplicate {axis} label `{l}`")));
        }
    }
    Ok(())
}

impl Taxonomy {
    pub fn new(sectors: Vec<String>, agents: Vec<String>, periods: Vec<String>) -> Result<Self> {
        check_axis(Axis::Sector, &sectors)?;
        check_axis(Axis::Agent, &agents)?;
        check_axis(Axis::Time, &periods)?;
        Ok(Self {
            sectors,
            agents,
            periods,
            service_sectors: Vec::new(),
            brown_sectors: Vec::new(),
            green_sectors: Vec::new(),
        })
    }

    /// Attaches the service, brown and green sector flags. Each must name known sectors.
    pub fn with_flags(mut self, service: Vec<String>, brown: Vec<String>, green: Vec<String>) -> Result<Self> {
        for (what, list) in [("service_sectors", &service), ("brown_sectors", &brown), ("green_sectors", &green)] {
            for l in list {
                if self.sector_index(l).is_none() {
                    return Err(invalid(format!("{what}: unknown sector `{l}`")));
                }
            }
        }
        self.service_sectors = service;
        self.brown_sectors = brown;
        self.green_sectors = green;
        Ok(self)
    }

    pub fn sectors(&self) -> &[String] {
        &self.sectors
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    pub fn service_sectors(&self) -> &[String] {
        &self.service_sectors
    }

    pub fn brown_sectors(&self) -> &[String] {
        &self.brown_sectors
    }

    pub fn green_sectors(&self) -> &[String] {
        &self.green_sectors
    }

    pub fn labels(&self, axis: Axis) -> &[String] {
        match axis {
            Axis::Sector => &self.sectors,
            Axis::Agent => &self.agents,
            Axis::Time => &self.periods,
        }
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.sectors.len(), self.agents.len(), self.periods.len())
    }

    pub fn sector_index(&self, label: &str) -> Option<usize> {
        self.sectors.iter().position(|s| s == label)
    }

    pub fn resolve(&self, axis: Axis, label: &str) -> Result<usize> {
        self.labels(axis)
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel { axis, label: label.to_owned() })
    }

    /// Indices of the given sector labels, in the order given.
    pub fn sector_indices(&self, labels: &[String]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.resolve(Axis::Sector, l)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transaction {
    pub amount: f64,
    pub sector: String,
    pub agent: String,
    pub period: String,
}

impl Transaction {
    pub fn new(
        amount: f64,
        sector: impl Into<String>,
        agent: impl Into<String>,
        period: impl Into<String>,
    ) -> Result<Self> {
        if !(amount.is_finite() && amount > 0.0) {
            return Err(invalid(format!("transaction amount must be positive and finite, got {amount}")));
        }
        Ok(Self { amount, sector: sector.into(), agent: agent.into(), period: period.into() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellIncrement {
    pub sector_index: usize,
    pub agent_index: usize,
    pub period_index: usize,
    pub amount: f64,
}

/// Resolves a transaction's labels to tensor indices. The amount passes through unchanged.
pub fn classify(txn: &Transaction, tax: &Taxonomy) -> Result<CellIncrement> {
    if !(txn.amount.is_finite() && txn.amount > 0.0) {
        return Err(invalid(format!("transaction amount must be positive and finite, got {}", txn.amount)));
    }
    Ok(CellIncrement {
        sector_index: tax.resolve(Axis::Sector, &txn.sector)?,
        agent_index: tax.resolve(Axis::Agent, &txn.agent)?,
        period_index: tax.resolve(Axis::Time, &txn.period)?,
        amount: txn.amount,
    })
}

/// Aggregates transactions into the money tensor.
///
/// Fails on the first transaction that does not classify. Each cell sums its
/// amounts in ascending order, which makes the result independent of the
/// order of `txns`.
pub fn build_tensor(txns: &[Transaction], tax: &Taxonomy) -> Result<Tensor3<f64>> {
    let mut tensor = Tensor3::zeros(tax.dims())?;
    let mut cells: HashMap<usize, Vec<f64>> = HashMap::new();
    for (index, txn) in txns.iter().enumerate() {
        let inc = classify(txn, tax).map_err(|e| Error::Transaction { index, source: Box::new(e) })?;
        let offset = tensor.offset(inc.sector_index, inc.agent_index, inc.period_index);
        cells.entry(offset).or_default().push(inc.amount);
    }
    let d = tax.dims();
    for (offset, mut amounts) in cells {
        amounts.sort_by(f64::total_cmp);
        let total: f64 = amounts.iter().sum();
        let k = offset % d.n_periods;
        let j = (offset / d.n_periods) % d.n_agents;
        let i = offset / (d.n_periods * d.n_agents);
        tensor.add_at(i, j, k, total)?;
    }
    Ok(tensor)
}

const TXN_HEADER: [&str; 4] = ["amount", "sector", "agent", "period"];

/// Parses a transaction CSV with header `amount,sector,agent,period`.
pub fn parse_transactions_csv(bytes: &[u8]) -> Result<Vec<Transaction>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(bytes);
    let mut records = rdr.records();
    match records.next() {
        None => return Err(Error::Parse { line: 1, message: "missing header".into() }),
        Some(Err(e)) => return Err(Error::Parse { line: 1, message: e.to_string() }),
        Some(Ok(h)) => {
            if h.iter().map(str::trim).ne(TXN_HEADER) {
                return Err(Error::Parse { line: 1, message: format!("expected header `{}`", TXN_HEADER.join(",")) });
            }
        }
    }

    let mut out = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let field = |n: usize| rec.get(n).map(str::trim).unwrap_or_default();
        let amount_text = field(0);
        let amount = parse_decimal(amount_text)
            .ok_or_else(|| Error::Parse { line, message: format!("amount `{amount_text}` is not a decimal number") })?;
        if !(amount > 0.0) {
            return Err(Error::Validation { line, message: format!("amount must be positive, got {amount_text}") });
        }
        if !amount.is_finite() {
            return Err(Error::Validation { line, message: format!("amount `{amount_text}` overflows") });
        }
        for (n, name) in TXN_HEADER.iter().enumerate().skip(1) {
            if field(n).is_empty() {
                return Err(Error::Parse { line, message: format!("empty {name}") });
            }
        }
        out.push(Transaction {
            amount,
            sector: field(1).to_owned(),
            agent: field(2).to_owned(),
            period: field(3).to_owned(),
        });
    }
    Ok(out)
}

/// Writes transactions back in the canonical CSV layout.
pub fn write_transactions_csv(txns: &[Transaction]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = "writing to memory cannot fail";
    w.write_record(TXN_HEADER).expect(io);
    for t in txns {
        w.write_record([t.amount.to_string().as_str(), &t.sector, &t.agent, &t.period]).expect(io);
    }
    String::from_utf8(w.into_inner().expect(io)).expect("inputs are UTF-8")
}

/// Plain decimal: optional sign, digits, optional `.` fraction. No exponents,
/// no thousands separators.
pub(crate) fn parse_decimal(s: &str) -> Option<f64> {
    let body = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !digits(int) || !digits(frac) {
        return None;
    }
    s.parse().ok()
}
