//! Chebyshev's remainder bias for odd primes mod 4.
//!
//! Every odd prime leaves remainder 1 or 3 mod 4; the average of the two
//! is 2, so each prime contributes a discrepancy of +1 (remainder 1) or
//! -1 (remainder 3). Partial sums of the discrepancy stay negative for a
//! long stretch: the first prime with a strictly positive aggregate is
//! 26861.

use std::io::Write;

use crate::ecpoint::sieve_primes;
use crate::Result;

/// Per-prime discrepancies and their running sums, odd primes only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiasSeries {
    pub primes: Vec<u64>,
    pub discrepancies: Vec<i64>,
    pub aggregates: Vec<i64>,
}

/// Discrepancy series over all odd primes `<= limit`.
pub fn bias_series(limit: u64) -> BiasSeries {
    let primes: Vec<u64> = sieve_primes(limit).into_iter().filter(|&p| p != 2).collect();
    let mut discrepancies = Vec::with_capacity(primes.len());
    let mut aggregates = Vec::with_capacity(primes.len());
    let mut total = 0i64;
    for &p in &primes {
        let d = if p % 4 == 1 { 1 } else { -1 };
        discrepancies.push(d);
        total += d;
        aggregates.push(total);
    }
    BiasSeries {
        primes,
        discrepancies,
        aggregates,
    }
}

/// The first `count` odd primes at which the aggregate is strictly
/// positive. Returns fewer when the range holds fewer.
pub fn first_positive_crossings(limit: u64, count: usize) -> Vec<u64> {
    let series = bias_series(limit);
    series
        .primes
        .iter()
        .zip(series.aggregates.iter())
        .filter(|&(_, &agg)| agg > 0)
        .map(|(&p, _)| p)
        .take(count)
        .collect()
}

/// CSV rows `prime,remainder,discrepancy,aggregate`.
pub fn write_csv<W: Write>(series: &BiasSeries, mut out: W) -> Result<()> {
    writeln!(out, "prime,remainder,discrepancy,aggregate")?;
    for i in 0..series.primes.len() {
        writeln!(
            out,
            "{},{},{},{}",
            series.primes[i],
            series.primes[i] % 4,
            series.discrepancies[i],
            series.aggregates[i]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_rows_match_remainder_table() {
        let s = bias_series(10);
        assert_eq!(s.primes, vec![3, 5, 7]);
        assert_eq!(s.aggregates, vec![-1, 0, -1]);
    }

    #[test]
    fn aggregate_at_97() {
        let s = bias_series(97);
        assert_eq!(s.primes.len(), 24);
        assert_eq!(*s.aggregates.last().unwrap(), -2);
    }

    #[test]
    fn single_odd_prime() {
        assert_eq!(bias_series(3).aggregates, vec![-1]);
    }

    #[test]
    fn no_positive_crossing_below_100() {
        assert!(first_positive_crossings(100, 1).is_empty());
        assert!(first_positive_crossings(3, 1).is_empty());
    }

    #[test]
    fn steps_are_unit_and_bounded() {
        let s = bias_series(10_000);
        assert_eq!(s.aggregates[0], -1);
        for k in 1..s.aggregates.len() {
            let step = s.aggregates[k] - s.aggregates[k - 1];
            assert!(step == 1 || step == -1);
            assert!(s.aggregates[k].unsigned_abs() as usize <= k + 1);
        }
    }

    #[test]
    fn csv_shape() {
        let mut buf = Vec::new();
        write_csv(&bias_series(10), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "prime,remainder,discrepancy,aggregate\n3,3,-1,-1\n5,1,1,0\n7,3,-1,-1\n"
        );
    }
}
