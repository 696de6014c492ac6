//! Corpus ingestion and the datasets S(parity, interval).
//!
//! A corpus is a CSV of isogeny classes: one labeled representative
//! equation per class, with the conductor and rank carried as trusted
//! labels (there is no general algorithm to compute the rank, and
//! conductor computation is out of scope). The artifact verifies what it
//! can: the representative is nonsingular and, where asked, that every
//! prime of bad reduction divides the labeled conductor.
//!
//! Format, UTF-8, `#` comment lines allowed:
//!
//! ```text
//! label,conductor,rank,a1,a2,a3,a4,a6
//! 37.a,37,1,0,0,1,-1,0
//! ```

use std::collections::HashSet;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::ecpoint::{ap_vector_with_tables, ApVector, CurveEquation, PrimeTables};
use crate::error::Error;
use crate::Result;

/// Half-open conductor interval `[lo, hi)`.
///
/// Dyadic windows partition cleanly under this convention; the closed
/// interval notation `[lo, hi]` used in table captions maps to
/// `[lo, hi + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConductorInterval {
    pub lo: u64,
    pub hi: u64,
}

impl ConductorInterval {
    pub fn new(lo: u64, hi: u64) -> Result<Self> {
        if lo >= hi {
            return Err(Error::BadInterval { lo, hi });
        }
        Ok(ConductorInterval { lo, hi })
    }

    /// Closed-notation constructor: `[lo, hi]` becomes `[lo, hi + 1)`.
    pub fn closed(lo: u64, hi: u64) -> Result<Self> {
        Self::new(lo, hi + 1)
    }

    pub fn contains(&self, n: u64) -> bool {
        self.lo <= n && n < self.hi
    }
}

impl std::fmt::Display for ConductorInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{})", self.lo, self.hi)
    }
}

/// One isogeny class: representative equation plus trusted labels.
#[derive(Debug, Clone)]
pub struct IsogenyClassRecord {
    pub label: String,
    pub conductor: u64,
    pub rank: u32,
    pub curve: CurveEquation,
    /// Lazily computed trace vector; `None` until materialized.
    pub ap: Option<ApVector>,
}

impl IsogenyClassRecord {
    pub fn parity(&self) -> u8 {
        (self.rank % 2) as u8
    }

    /// One-directional conductor check: every prime dividing the
    /// discriminant (that is, every bad prime of the representative)
    /// must divide the labeled conductor.
    pub fn bad_primes_divide_conductor(&self) -> bool {
        let n = BigInt::from(self.conductor);
        let mut d = self.curve.discriminant().clone();
        if d < BigInt::ZERO {
            d = -d;
        }
        loop {
            let g = gcd(&d, &n);
            if g.is_one() {
                break;
            }
            while (&d % &g) == BigInt::ZERO {
                d /= &g;
            }
        }
        d.is_one()
    }
}

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.clone();
    let mut b = b.clone();
    while b != BigInt::ZERO {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// S(parity, interval): the selected class records, corpus order preserved.
#[derive(Debug, Clone)]
pub struct DatasetSelection {
    pub parity: u8,
    pub interval: ConductorInterval,
    pub members: Vec<IsogenyClassRecord>,
}

const HEADER: &str = "label,conductor,rank,a1,a2,a3,a4,a6";

/// Parse a corpus CSV. Malformed rows report the line number and field;
/// duplicate labels are rejected.
pub fn parse_corpus<R: BufRead>(source: R) -> Result<Vec<IsogenyClassRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    let mut header_seen = false;
    for (idx, line) in source.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if !header_seen {
            if trimmed != HEADER {
                return Err(Error::Corpus {
                    line: line_no,
                    msg: format!("expected header `{HEADER}`"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Corpus {
                line: line_no,
                msg: format!("expected 8 fields, got {}", fields.len()),
            });
        }
        let label = fields[0].to_string();
        if label.is_empty() {
            return Err(Error::Corpus {
                line: line_no,
                msg: "field label: empty".into(),
            });
        }
        if !seen.insert(label.clone()) {
            return Err(Error::DuplicateLabel(label));
        }
        let conductor: u64 = fields[1].parse().map_err(|_| Error::Corpus {
            line: line_no,
            msg: format!("field conductor: invalid positive integer `{}`", fields[1]),
        })?;
        if conductor == 0 {
            return Err(Error::Corpus {
                line: line_no,
                msg: "field conductor: must be positive".into(),
            });
        }
        let rank: u32 = fields[2].parse().map_err(|_| Error::Corpus {
            line: line_no,
            msg: format!("field rank: invalid nonnegative integer `{}`", fields[2]),
        })?;
        let names = ["a1", "a2", "a3", "a4", "a6"];
        let mut coeffs = Vec::with_capacity(5);
        for (k, name) in names.iter().enumerate() {
            let c: BigInt = fields[3 + k].parse().map_err(|_| Error::Corpus {
                line: line_no,
                msg: format!("field {name}: invalid integer `{}`", fields[3 + k]),
            })?;
            coeffs.push(c);
        }
        let curve = CurveEquation::new(
            coeffs[0].clone(),
            coeffs[1].clone(),
            coeffs[2].clone(),
            coeffs[3].clone(),
            coeffs[4].clone(),
        )
        .map_err(|_| Error::Corpus {
            line: line_no,
            msg: "singular representative equation (discriminant is zero)".into(),
        })?;
        records.push(IsogenyClassRecord {
            label,
            conductor,
            rank,
            curve,
            ap: None,
        });
    }
    Ok(records)
}

/// Select by rank parity and conductor window, preserving corpus order.
/// An empty selection is legal.
pub fn select(
    records: &[IsogenyClassRecord],
    parity: u8,
    interval: ConductorInterval,
) -> DatasetSelection {
    let members = records
        .iter()
        .filter(|r| interval.contains(r.conductor) && r.parity() == parity % 2)
        .cloned()
        .collect();
    DatasetSelection {
        parity: parity % 2,
        interval,
        members,
    }
}

/// Dense a_p matrix: one row per member, one column per prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApMatrix {
    pub labels: Vec<String>,
    pub primes: Vec<u64>,
    pub rows: Vec<Vec<i64>>,
}

impl ApMatrix {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "label")?;
        for p in &self.primes {
            write!(out, ",p_{p}")?;
        }
        writeln!(out)?;
        for (label, row) in self.labels.iter().zip(&self.rows) {
            write!(out, "{label}")?;
            for v in row {
                write!(out, ",{v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Compute the a_p matrix of a selection. Rows are distributed across
/// worker threads and gathered back in member order, so the result does
/// not depend on the schedule.
pub fn materialize_ap(selection: &DatasetSelection, prime_limit: u64) -> Result<ApMatrix> {
    materialize_records(&selection.members, prime_limit)
}

/// Every record in the window regardless of parity, corpus order kept.
pub fn window(records: &[IsogenyClassRecord], interval: ConductorInterval) -> Vec<IsogenyClassRecord> {
    records
        .iter()
        .filter(|r| interval.contains(r.conductor))
        .cloned()
        .collect()
}

/// Row-parallel a_p matrix over arbitrary records.
pub fn materialize_records(records: &[IsogenyClassRecord], prime_limit: u64) -> Result<ApMatrix> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let tables = PrimeTables::new(prime_limit)?;
    let rows: Vec<Vec<i64>> = records
        .par_iter()
        .map(|rec| ap_vector_with_tables(&rec.curve, &rec.label, &tables).values)
        .collect();
    Ok(ApMatrix {
        labels: records.iter().map(|r| r.label.clone()).collect(),
        primes: tables.primes().to_vec(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn corpus(text: &str) -> Vec<IsogenyClassRecord> {
        parse_corpus(Cursor::new(text)).unwrap()
    }

    const TWO_ROWS: &str = "label,conductor,rank,a1,a2,a3,a4,a6\n37.a,37,1,0,0,1,-1,0\n19.a,19,0,0,1,1,1,0\n";

    #[test]
    fn parses_labeled_rows() {
        let recs = corpus(TWO_ROWS);
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].label, "37.a");
        assert_eq!(recs[0].conductor, 37);
        assert_eq!(recs[0].rank, 1);
        assert_eq!(recs[1].conductor, 19);
        assert_eq!(recs[1].rank, 0);
        assert_eq!(recs[1].curve.discriminant(), &num_bigint::BigInt::from(-19));
    }

    #[test]
    fn empty_stream_is_empty_corpus() {
        assert!(corpus("").is_empty());
        assert!(corpus("# just a comment\n").is_empty());
    }

    #[test]
    fn malformed_row_names_line_and_field() {
        let bad = "label,conductor,rank,a1,a2,a3,a4,a6\n37.a,thirty,1,0,0,1,-1,0\n";
        let err = parse_corpus(Cursor::new(bad)).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("conductor"), "{msg}");
    }

    #[test]
    fn duplicate_label_rejected() {
        let bad = "label,conductor,rank,a1,a2,a3,a4,a6\n37.a,37,1,0,0,1,-1,0\n37.a,37,1,0,0,1,-1,0\n";
        assert!(matches!(
            parse_corpus(Cursor::new(bad)),
            Err(Error::DuplicateLabel(_))
        ));
    }

    #[test]
    fn select_filters_and_partitions() {
        let recs = corpus(TWO_ROWS);
        let window = ConductorInterval::new(0, 100).unwrap();
        let even = select(&recs, 0, window);
        let odd = select(&recs, 1, window);
        assert_eq!(even.members.len(), 1);
        assert_eq!(odd.members.len(), 1);
        assert_eq!(even.members.len() + odd.members.len(), recs.len());
        assert!(select(&recs, 0, ConductorInterval::new(0, 1).unwrap())
            .members
            .is_empty());
    }

    #[test]
    fn materialize_rows_match_single_curves() {
        let recs = corpus(TWO_ROWS);
        let all = ConductorInterval::new(0, 100).unwrap();
        let odd = select(&recs, 1, all);
        let m = materialize_ap(&odd, 10).unwrap();
        assert_eq!(m.rows, vec![vec![-2, -3, -2, -1]]);
        let even = select(&recs, 0, all);
        let m = materialize_ap(&even, 10).unwrap();
        assert_eq!(m.rows, vec![vec![0, -2, 3, -1]]);
    }

    #[test]
    fn identical_curves_under_distinct_labels_give_equal_rows() {
        let text = "label,conductor,rank,a1,a2,a3,a4,a6\nx,37,1,0,0,1,-1,0\ny,37,1,0,0,1,-1,0\n";
        let sel = select(&corpus(text), 1, ConductorInterval::new(0, 100).unwrap());
        let m = materialize_ap(&sel, 30).unwrap();
        assert_eq!(m.rows[0], m.rows[1]);
    }

    #[test]
    fn empty_selection_has_no_matrix() {
        let recs = corpus(TWO_ROWS);
        let sel = select(&recs, 0, ConductorInterval::new(0, 1).unwrap());
        assert!(matches!(materialize_ap(&sel, 10), Err(Error::EmptyDataset)));
    }

    #[test]
    fn matrix_csv_headers_name_primes() {
        let recs = corpus(TWO_ROWS);
        let sel = select(&recs, 1, ConductorInterval::new(0, 100).unwrap());
        let m = materialize_ap(&sel, 10).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("label,p_2,p_3,p_5,p_7\n"));
        assert!(text.contains("37.a,-2,-3,-2,-1\n"));
    }

    #[test]
    fn conductor_check_accepts_good_labels() {
        let recs = corpus(TWO_ROWS);
        assert!(recs.iter().all(|r| r.bad_primes_divide_conductor()));
        // mislabeled conductor: 37.a under conductor 11
        let bad = corpus("label,conductor,rank,a1,a2,a3,a4,a6\nz,11,1,0,0,1,-1,0\n");
        assert!(!bad[0].bad_primes_divide_conductor());
    }
}
