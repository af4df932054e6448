//! Flat table rows and their CSV/JSON encodings.

use std::io::{Read, Write};

use anyhow::{Context, Result};
use modcurve::{Family, InvariantSet, SubgroupSpec};
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: [&str; 9] = [
    "family",
    "level",
    "m",
    "psl2_index",
    "nu2",
    "nu3",
    "cusps",
    "genus",
    "method",
];

/// One row of an invariant table. For the arithmetic families `level` is
/// `N` and `m` is `M`; elsewhere `m` is 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantRecord {
    pub family: String,
    pub level: u64,
    pub m: u64,
    pub psl2_index: u64,
    pub nu2: u64,
    pub nu3: u64,
    pub cusps: u64,
    pub genus: u64,
    pub method: String,
}

impl InvariantRecord {
    pub fn new(spec: &SubgroupSpec, inv: &InvariantSet) -> InvariantRecord {
        InvariantRecord {
            family: spec.family.tag().to_string(),
            level: spec.level,
            m: spec.m,
            psl2_index: inv.psl2_index,
            nu2: inv.eps2,
            nu3: inv.eps3,
            cusps: inv.eps_inf,
            genus: inv.genus,
            method: inv.method.to_string(),
        }
    }
}

pub fn write_csv<W: Write>(out: W, records: &[InvariantRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, records: &[InvariantRecord]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    out.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
pub fn read_csv<R: Read>(input: R) -> Result<Vec<InvariantRecord>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row.context("reading CSV row")?);
    }
    Ok(out)
}

#[cfg(test)]
pub fn read_json<R: Read>(input: R) -> Result<Vec<InvariantRecord>> {
    Ok(serde_json::from_reader(input)?)
}

/// A row of a reference file given to `compare`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceRow {
    pub line: u64,
    pub spec: SubgroupSpec,
    pub values: (u64, u64, u64, u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowIssue {
    Malformed { line: u64, reason: String },
    UnknownFamily { line: u64, tag: String },
}

/// Parses reference rows of 8 or 9 columns, with or without a header.
pub fn read_reference<R: Read>(mut input: R) -> Result<(Vec<ReferenceRow>, Vec<RowIssue>)> {
    let mut text = String::new();
    input
        .read_to_string(&mut text)
        .context("reading reference file")?;
    let mut rows = Vec::new();
    let mut issues = Vec::new();
    let mut seen_content = false;
    for (k, raw) in text.lines().enumerate() {
        let line = k as u64 + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(raw.as_bytes());
        let record = match reader.records().next() {
            Some(Ok(r)) => r,
            Some(Err(e)) => {
                issues.push(RowIssue::Malformed {
                    line,
                    reason: e.to_string(),
                });
                continue;
            }
            None => continue,
        };
        let first = !seen_content;
        seen_content = true;
        if first && record.get(0) == Some("family") {
            continue;
        }
        match parse_reference(&record, line) {
            Ok(row) => rows.push(row),
            Err(issue) => issues.push(issue),
        }
    }
    Ok((rows, issues))
}

fn parse_reference(
    record: &csv::StringRecord,
    line: u64,
) -> std::result::Result<ReferenceRow, RowIssue> {
    let malformed = |reason: String| RowIssue::Malformed { line, reason };
    if !(8..=9).contains(&record.len()) {
        return Err(malformed(format!(
            "expected 8 or 9 columns, found {}",
            record.len()
        )));
    }
    let tag = &record[0];
    let family: Family = tag.parse().map_err(|_| RowIssue::UnknownFamily {
        line,
        tag: tag.to_string(),
    })?;
    let mut nums = [0u64; 7];
    for (j, slot) in nums.iter_mut().enumerate() {
        let field = &record[j + 1];
        *slot = field.parse().map_err(|_| {
            malformed(format!(
                "column {} (`{field}`) is not a nonnegative integer",
                CSV_HEADER[j + 1]
            ))
        })?;
    }
    let [level, m, i, nu2, nu3, cusps, genus] = nums;
    let spec = SubgroupSpec {
        m,
        ..SubgroupSpec::new(family, level)
    };
    spec.validate().map_err(|e| malformed(e.to_string()))?;
    Ok(ReferenceRow {
        line,
        spec,
        values: (i, nu2, nu3, cusps, genus),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use modcurve::invariants_formula;

    fn sample() -> Vec<InvariantRecord> {
        [
            SubgroupSpec::new(Family::NsStar, 39),
            SubgroupSpec::arith(Family::Arith1, 2, 3),
            SubgroupSpec::new(Family::SpPlus, 2),
        ]
        .iter()
        .map(|s| InvariantRecord::new(s, &invariants_formula(s).unwrap()))
        .collect()
    }

    #[test]
    fn csv_header_is_exact() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "family,level,m,psl2_index,nu2,nu3,cusps,genus,method\n"
        );
    }

    #[test]
    fn csv_and_json_round_trip() {
        let rows = sample();
        let mut csv_buf = Vec::new();
        write_csv(&mut csv_buf, &rows).unwrap();
        assert!(!csv_buf.contains(&b'\r'));
        let mut json_buf = Vec::new();
        write_json(&mut json_buf, &rows).unwrap();
        assert_eq!(read_csv(csv_buf.as_slice()).unwrap(), rows);
        assert_eq!(read_json(json_buf.as_slice()).unwrap(), rows);
        let text = String::from_utf8(csv_buf).unwrap();
        assert!(text.contains("ns*,39,0,234,18,0,6,13,formula\n"));
    }

    #[test]
    fn reference_parsing() {
        let input = "family,level,m,psl2_index,nu2,nu3,cusps,genus\n\
                     ns+,39,0,468,24,0,12,28\n\
                     \n\
                     x7,3,0,1,1,1,1,0\n\
                     x0,abc,0,1,1,1,1,0\n\
                     x0,11,0,12,0,0,2,1,formula\n\
                     x0,11\n";
        let (rows, issues) = read_reference(input.as_bytes()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].values, (468, 24, 0, 12, 28));
        assert_eq!(rows[1].line, 6);
        assert_eq!(issues.len(), 3, "{issues:?}");
        assert!(matches!(&issues[0], RowIssue::UnknownFamily { line: 4, tag } if tag == "x7"));
        assert!(matches!(issues[1], RowIssue::Malformed { line: 5, .. }));
        assert!(matches!(issues[2], RowIssue::Malformed { line: 7, .. }));
    }
}
