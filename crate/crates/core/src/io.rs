//! On-disk formats: the table cache, exported distributions, and list
//! arguments.
//!
//! Integers are written in plain decimal with no separators. Probabilities
//! are written as unreduced `count/total` pairs so that exported files
//! parse back to the exact rationals they encode.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::distributions::Pmf;
use crate::dup_trees::BTable;
use crate::error::{Error, Result};
use crate::one_component::NTable;
use crate::series::ExactRational;

/// Version written to and required from cache files.
pub const CACHE_FORMAT_VERSION: u32 = 1;

/// Serialized `N` and `B` tables, keyed `"n,k"` with decimal values.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheFile {
    pub format_version: u32,
    pub provenance: String,
    pub n_table: BTreeMap<String, String>,
    pub b_table: BTreeMap<String, String>,
}

fn encode_rows(rows: &[Vec<BigUint>]) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    for (n, row) in rows.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            out.insert(format!("{n},{k}"), v.to_string());
        }
    }
    out
}

fn decode_rows(name: &str, cells: &BTreeMap<String, String>) -> Result<Option<Vec<Vec<BigUint>>>> {
    if cells.is_empty() {
        return Ok(None);
    }
    let mut parsed: BTreeMap<(usize, usize), BigUint> = BTreeMap::new();
    for (key, value) in cells {
        let (n, k) = key
            .split_once(',')
            .and_then(|(n, k)| Some((parse_decimal_usize(n)?, parse_decimal_usize(k)?)))
            .ok_or_else(|| Error::Parse(format!("{name} table key '{key}' is not 'n,k'")))?;
        let v = parse_decimal(value)
            .ok_or_else(|| Error::Parse(format!("{name} table value at {key} is not a decimal integer")))?;
        parsed.insert((n, k), v);
    }
    let n_max = parsed.keys().map(|&(n, _)| n).max().unwrap_or(0);
    if !(2..=100_000).contains(&n_max) {
        return Err(Error::Parse(format!("{name} table has implausible n_max {n_max}")));
    }
    let mut rows: Vec<Vec<BigUint>> = vec![Vec::new(); n_max + 1];
    for ((n, k), v) in parsed {
        if n < 2 || k >= n || k != rows[n].len() {
            return Err(Error::Parse(format!("{name} table has a misplaced or missing cell near ({n},{k})")));
        }
        rows[n].push(v);
    }
    Ok(Some(rows))
}

fn parse_decimal_usize(s: &str) -> Option<usize> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

fn parse_decimal(s: &str) -> Option<BigUint> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

impl CacheFile {
    pub fn new(ntable: Option<&NTable>, btable: Option<&BTable>) -> CacheFile {
        CacheFile {
            format_version: CACHE_FORMAT_VERSION,
            provenance: format!("galled-census {}", env!("CARGO_PKG_VERSION")),
            n_table: ntable.map(|t| encode_rows(t.rows())).unwrap_or_default(),
            b_table: btable.map(|t| encode_rows(t.rows())).unwrap_or_default(),
        }
    }

    pub fn to_json(&self) -> String {
        // Maps of strings always serialize.
        serde_json::to_string_pretty(self).unwrap_or_default() + "\n"
    }

    /// Parses and checks the version; table contents are checked by
    /// [`CacheFile::n_table`] and [`CacheFile::b_table`].
    pub fn from_json(text: &str) -> Result<CacheFile> {
        let file: CacheFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("cache file: {e}")))?;
        if file.format_version != CACHE_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "cache format version {} is not supported (expected {CACHE_FORMAT_VERSION})",
                file.format_version
            )));
        }
        Ok(file)
    }

    pub fn n_table(&self) -> Result<Option<NTable>> {
        decode_rows("N", &self.n_table)?
            .map(NTable::from_rows)
            .transpose()
    }

    pub fn b_table(&self) -> Result<Option<BTable>> {
        decode_rows("B", &self.b_table)?
            .map(BTable::from_rows)
            .transpose()
    }
}

/// Families with an exported distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistFamily {
    /// `n - Z_n` for one-component networks.
    OneComponent,
    /// `(X_n, n - Y_n)` for galled networks.
    Galled,
    /// `n - R_n` for dup-trees.
    Dup,
}

impl DistFamily {
    pub fn name(self) -> &'static str {
        match self {
            DistFamily::OneComponent => "one-component",
            DistFamily::Galled => "galled",
            DistFamily::Dup => "dup",
        }
    }

    pub fn is_joint(self) -> bool {
        self == DistFamily::Galled
    }
}

impl fmt::Display for DistFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DistFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<DistFamily> {
        [DistFamily::OneComponent, DistFamily::Galled, DistFamily::Dup]
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown distribution family '{s}'")))
    }
}

/// One exported outcome: `j` for the joint family only, `k` the
/// reindexed statistic, `count` the numerator over the common total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistRow {
    pub j: Option<usize>,
    pub k: i64,
    pub count: BigUint,
}

/// A distribution in export form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistTable {
    pub n: usize,
    pub family: DistFamily,
    pub rows: Vec<DistRow>,
    pub total: BigUint,
}

pub const CSV_HEADER: &str = "k,probability_num,probability_den";
pub const CSV_HEADER_JOINT: &str = "j,k,probability_num,probability_den";

/// Rows of an exported CSV with their shared denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvDist {
    pub rows: Vec<DistRow>,
    pub denominator: BigUint,
}

impl CsvDist {
    pub fn weights(&self) -> Vec<ExactRational> {
        weights(&self.rows, &self.denominator)
    }
}

fn weights(rows: &[DistRow], total: &BigUint) -> Vec<ExactRational> {
    rows.iter()
        .map(|r| ExactRational::new(BigInt::from(r.count.clone()), BigInt::from(total.clone())))
        .collect()
}

/// Rejects empty tables, mixed `j` presence, repeated outcomes and counts
/// that do not add up to the total.
fn validate_rows(rows: &[DistRow], total: &BigUint, joint: bool) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::Parse("distribution has no rows".into()));
    }
    if total.is_zero() {
        return Err(Error::Parse("distribution total is zero".into()));
    }
    let mut seen = BTreeSet::new();
    let mut sum = BigUint::zero();
    for r in rows {
        if r.j.is_some() != joint {
            return Err(Error::Parse("inconsistent 'j' column".into()));
        }
        if !seen.insert((r.j, r.k)) {
            return Err(Error::Parse(format!("repeated outcome j={:?} k={}", r.j, r.k)));
        }
        sum += &r.count;
    }
    if &sum != total {
        return Err(Error::Parse(format!("counts sum to {sum}, not to the total {total}")));
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonCell {
    k: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    j: Option<usize>,
    count: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDist {
    n: usize,
    family: String,
    cells: Vec<JsonCell>,
    total: String,
}

impl DistTable {
    pub fn from_scalar(n: usize, family: DistFamily, pmf: &Pmf<usize>) -> Result<DistTable> {
        if family.is_joint() {
            return Err(Error::Contract(format!("{family} needs a joint distribution")));
        }
        let rows = pmf
            .iter()
            .map(|(&k, c)| DistRow {
                j: None,
                k: k as i64,
                count: c.clone(),
            })
            .collect();
        Ok(DistTable {
            n,
            family,
            rows,
            total: pmf.total().clone(),
        })
    }

    pub fn from_joint(n: usize, pmf: &Pmf<(usize, i64)>) -> DistTable {
        let rows = pmf
            .iter()
            .map(|(&(j, k), c)| DistRow {
                j: Some(j),
                k,
                count: c.clone(),
            })
            .collect();
        DistTable {
            n,
            family: DistFamily::Galled,
            rows,
            total: pmf.total().clone(),
        }
    }

    pub fn weights(&self) -> Vec<ExactRational> {
        weights(&self.rows, &self.total)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let header = if self.family.is_joint() { CSV_HEADER_JOINT } else { CSV_HEADER };
        let total = self.total.to_string();
        // Writing to a Vec cannot fail.
        let _ = w.write_record(header.split(','));
        for r in &self.rows {
            let mut record = Vec::with_capacity(4);
            if let Some(j) = r.j {
                record.push(j.to_string());
            }
            record.push(r.k.to_string());
            record.push(r.count.to_string());
            record.push(total.clone());
            let _ = w.write_record(&record);
        }
        let bytes = w.into_inner().unwrap_or_default();
        String::from_utf8(bytes).unwrap_or_default()
    }

    pub fn to_json(&self) -> String {
        let doc = JsonDist {
            n: self.n,
            family: self.family.name().to_string(),
            cells: self
                .rows
                .iter()
                .map(|r| JsonCell {
                    k: r.k,
                    j: r.j,
                    count: r.count.to_string(),
                })
                .collect(),
            total: self.total.to_string(),
        };
        serde_json::to_string_pretty(&doc).unwrap_or_default() + "\n"
    }

    pub fn from_json(text: &str) -> Result<DistTable> {
        let doc: JsonDist =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("distribution JSON: {e}")))?;
        let family: DistFamily = doc.family.parse()?;
        let total = parse_decimal(&doc.total)
            .ok_or_else(|| Error::Parse("'total' is not a decimal integer".into()))?;
        let rows = doc
            .cells
            .into_iter()
            .map(|c| {
                let count = parse_decimal(&c.count)
                    .ok_or_else(|| Error::Parse(format!("count '{}' is not a decimal integer", c.count)))?;
                Ok(DistRow { j: c.j, k: c.k, count })
            })
            .collect::<Result<Vec<_>>>()?;
        validate_rows(&rows, &total, family.is_joint())?;
        Ok(DistTable {
            n: doc.n,
            family,
            rows,
            total,
        })
    }
}

/// Parses CSV written by [`DistTable::to_csv`].
pub fn parse_dist_csv(text: &str) -> Result<CsvDist> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::Parse(format!("CSV header: {e}")))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    let joint = match header.as_str() {
        CSV_HEADER => false,
        CSV_HEADER_JOINT => true,
        other => return Err(Error::Parse(format!("unexpected CSV header '{other}'"))),
    };
    let mut rows = Vec::new();
    let mut denominator: Option<BigUint> = None;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("CSV: {e}")))?;
        let line_no = i + 2;
        let bad = |what: &str| Error::Parse(format!("line {line_no}: bad {what}"));
        let fields: Vec<&str> = record.iter().collect();
        let (j, rest) = if joint {
            (Some(parse_decimal_usize(fields[0]).ok_or_else(|| bad("j"))?), &fields[1..])
        } else {
            (None, &fields[..])
        };
        let k: i64 = rest[0].parse().map_err(|_| bad("k"))?;
        let count = parse_decimal(rest[1]).ok_or_else(|| bad("numerator"))?;
        let den = parse_decimal(rest[2]).ok_or_else(|| bad("denominator"))?;
        match &denominator {
            None => denominator = Some(den),
            Some(d) if *d != den => return Err(bad("denominator (rows disagree)")),
            Some(_) => {}
        }
        rows.push(DistRow { j, k, count });
    }
    let denominator = denominator.ok_or_else(|| Error::Parse("CSV has no rows".into()))?;
    validate_rows(&rows, &denominator, joint)?;
    Ok(CsvDist { rows, denominator })
}

/// Parses a comma-separated list of positive integers such as `10,25,50`.
pub fn parse_ns_list(text: &str) -> Result<Vec<usize>> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().all(|s| s.is_empty()) {
        return Err(Error::Parse("empty list".into()));
    }
    items
        .into_iter()
        .map(|s| match parse_decimal_usize(s) {
            Some(0) | None => Err(Error::Parse(format!("'{s}' is not a positive integer"))),
            Some(n) => Ok(n),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{dist_galled_joint, dist_one_component};
    use crate::galled::galled_joint;
    use num_traits::One;

    #[test]
    fn cache_round_trip() {
        let n = NTable::build(12).unwrap();
        let b = BTable::build(9).unwrap();
        let text = CacheFile::new(Some(&n), Some(&b)).to_json();
        let back = CacheFile::from_json(&text).unwrap();
        assert_eq!(back.n_table().unwrap().unwrap(), n);
        assert_eq!(back.b_table().unwrap().unwrap(), b);
        let only_n = CacheFile::from_json(&CacheFile::new(Some(&n), None).to_json()).unwrap();
        assert!(only_n.b_table().unwrap().is_none());
    }

    #[test]
    fn cache_rejects_damage() {
        let n = NTable::build(5).unwrap();
        let mut file = CacheFile::new(Some(&n), None);
        file.n_table.remove("4,2");
        assert!(matches!(file.n_table(), Err(Error::Parse(_))));

        let mut file = CacheFile::new(Some(&n), None);
        file.n_table.insert("4,0".into(), "4".into());
        assert!(matches!(file.n_table(), Err(Error::Parse(_))));

        let mut file = CacheFile::new(Some(&n), None);
        file.n_table.insert("4,1".into(), "-3".into());
        assert!(matches!(file.n_table(), Err(Error::Parse(_))));

        let mut file = CacheFile::new(Some(&n), None);
        file.format_version = 9;
        assert!(matches!(CacheFile::from_json(&file.to_json()), Err(Error::Parse(_))));
        assert!(matches!(CacheFile::from_json("{}"), Err(Error::Parse(_))));
    }

    #[test]
    fn csv_example() {
        let t = NTable::build(4).unwrap();
        let dist = DistTable::from_scalar(2, DistFamily::OneComponent, &dist_one_component(&t, 2).unwrap()).unwrap();
        assert_eq!(dist.to_csv(), "k,probability_num,probability_den\n0,3,6\n1,2,6\n2,1,6\n");
        let back = parse_dist_csv(&dist.to_csv()).unwrap();
        assert_eq!(back.rows, dist.rows);
        assert_eq!(back.weights().into_iter().sum::<ExactRational>(), ExactRational::one());
    }

    #[test]
    fn joint_round_trips() {
        let t = NTable::build(7).unwrap();
        let pmf = dist_galled_joint(&galled_joint(5, &t).unwrap()).unwrap();
        let dist = DistTable::from_joint(5, &pmf);
        let csv = parse_dist_csv(&dist.to_csv()).unwrap();
        assert_eq!(csv.rows, dist.rows);
        assert_eq!(csv.denominator, dist.total);
        let json = DistTable::from_json(&dist.to_json()).unwrap();
        assert_eq!(json, dist);
        assert_eq!(json.weights(), pmf.weights());
    }

    #[test]
    fn malformed_distributions() {
        assert!(parse_dist_csv("").is_err());
        assert!(parse_dist_csv("k,probability_num,probability_den\n").is_err());
        assert!(parse_dist_csv("k,probability_num,probability_den\n0,1,2\n").is_err());
        assert!(parse_dist_csv("k,probability_num,probability_den\n0,1,2\n1,1,3\n").is_err());
        assert!(parse_dist_csv("k,probability_num,probability_den\n0,1,2\n0,1,2\n").is_err());
        assert!(parse_dist_csv("k,probability_num,probability_den\n0,+1,2\n1,1,2\n").is_err());
        assert!(DistTable::from_json(r#"{"n":1,"family":"dup","cells":[{"k":0,"count":"1"}],"total":"2"}"#).is_err());
        assert!(DistTable::from_json(r#"{"n":1,"family":"galled","cells":[{"k":0,"count":"1"}],"total":"1"}"#).is_err());
        assert!(DistTable::from_json(r#"{"n":1,"family":"dup","cells":[{"k":0,"count":"1"},{"k":1,"count":"1"}],"total":"2"}"#).is_ok());
    }

    #[test]
    fn ns_lists() {
        assert_eq!(parse_ns_list("10,25, 50,100").unwrap(), vec![10, 25, 50, 100]);
        assert!(parse_ns_list("").is_err());
        assert!(parse_ns_list("3,,4").is_err());
        assert!(parse_ns_list("0").is_err());
        assert!(parse_ns_list("-3").is_err());
        assert!(parse_ns_list("99999999999999999999999").is_err());
    }
}
