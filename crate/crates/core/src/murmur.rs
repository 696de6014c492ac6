//! Murmuration averages m(p) over datasets S(parity, interval).
//!
//! For each prime, the traces a_p of every class in the selection are
//! averaged. Sums are accumulated as exact integers and kept as rationals
//! so that table reproduction is bit-stable; decimal output rounds half
//! to even at 3 places, matching the precision the averages are usually
//! printed at.
//!
//! Series over disjoint dyadic conductor windows, once the prime axis is
//! rescaled to x = p / lo(interval), line up: peaks and crossover points
//! recur at the same x. The alignment score operationalizes that as a
//! Pearson correlation on a common resampled grid.

use std::io::Write;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::dataset::{materialize_ap, select, ConductorInterval, DatasetSelection, IsogenyClassRecord};
use crate::error::Error;
use crate::Result;

/// Per-prime exact averages of a_p over one selection.
#[derive(Debug, Clone)]
pub struct MurmurationSeries {
    pub parity: u8,
    pub interval: ConductorInterval,
    pub primes: Vec<u64>,
    /// Exact column mean, numerator over member count.
    pub means: Vec<Ratio<i64>>,
    pub member_count: usize,
}

impl MurmurationSeries {
    pub fn means_f64(&self) -> Vec<f64> {
        self.means
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    }
}

/// Round an exact rational half-to-even at 3 decimals, returning
/// thousandths.
pub fn round_half_even_milli(r: Ratio<i64>) -> i64 {
    let num = *r.numer();
    let den = *r.denom(); // normalized positive by Ratio
    let neg = num < 0;
    let n = num.unsigned_abs() as u128 * 1000;
    let d = den as u128;
    let q = n / d;
    let rem = n % d;
    let q = match (2 * rem).cmp(&d) {
        std::cmp::Ordering::Less => q,
        std::cmp::Ordering::Greater => q + 1,
        std::cmp::Ordering::Equal => {
            if q % 2 == 0 {
                q
            } else {
                q + 1
            }
        }
    };
    let q = q as i64;
    if neg {
        -q
    } else {
        q
    }
}

/// Fixed 3-decimal rendering of an exact rational, half-to-even.
pub fn format_mean3(r: Ratio<i64>) -> String {
    let milli = round_half_even_milli(r);
    let sign = if milli < 0 { "-" } else { "" };
    let m = milli.unsigned_abs();
    format!("{sign}{}.{:03}", m / 1000, m % 1000)
}

/// Average a_p over the members of a selection, one mean per prime
/// `<= prime_limit`. Column sums run in parallel over primes; integer
/// addition keeps every schedule on the same result.
pub fn murmuration(selection: &DatasetSelection, prime_limit: u64) -> Result<MurmurationSeries> {
    let matrix = materialize_ap(selection, prime_limit)?;
    let count = matrix.rows.len() as i64;
    let means: Vec<Ratio<i64>> = (0..matrix.primes.len())
        .into_par_iter()
        .map(|col| {
            let sum: i64 = matrix.rows.iter().map(|row| row[col]).sum();
            Ratio::new(sum, count)
        })
        .collect();
    Ok(MurmurationSeries {
        parity: selection.parity,
        interval: selection.interval,
        primes: matrix.primes,
        means,
        member_count: selection.members.len(),
    })
}

/// Even and odd series over one window and a shared prime grid.
pub fn paired_series(
    records: &[IsogenyClassRecord],
    interval: ConductorInterval,
    prime_limit: u64,
) -> Result<(MurmurationSeries, MurmurationSeries)> {
    let even = select(records, 0, interval);
    if even.members.is_empty() {
        return Err(Error::EmptyParity(0));
    }
    let odd = select(records, 1, interval);
    if odd.members.is_empty() {
        return Err(Error::EmptyParity(1));
    }
    Ok((murmuration(&even, prime_limit)?, murmuration(&odd, prime_limit)?))
}

/// `count` consecutive dyadic windows starting at `base`:
/// `[base*2^k, base*2^(k+1))` for k = 0..count.
pub fn dyadic_windows(base: u64, count: usize) -> Vec<ConductorInterval> {
    assert!(base >= 1 && count >= 1);
    (0..count)
        .map(|k| ConductorInterval {
            lo: base << k,
            hi: base << (k + 1),
        })
        .collect()
}

/// Rescale the prime axis to x = p / lo(interval); y stays the mean.
/// Errors when the prime grid runs past the window start, where the
/// convention is undefined.
pub fn normalized_series(series: &MurmurationSeries) -> Result<Vec<(f64, f64)>> {
    let lo = series.interval.lo;
    if series.primes.iter().any(|&p| p > lo) {
        return Err(Error::GridExceedsWindow(lo));
    }
    let means = series.means_f64();
    Ok(series
        .primes
        .iter()
        .zip(means)
        .map(|(&p, m)| (p as f64 / lo as f64, m))
        .collect())
}

/// Pearson correlation of two equal-length samples.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Linear interpolation of a sorted (x, y) series at `x`, constant
/// beyond the ends.
fn sample(series: &[(f64, f64)], x: f64) -> f64 {
    match series.iter().position(|&(sx, _)| sx >= x) {
        None => series.last().unwrap().1,
        Some(0) => series[0].1,
        Some(i) => {
            let (x0, y0) = series[i - 1];
            let (x1, y1) = series[i];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

pub const ALIGNMENT_GRID: usize = 256;

/// Pearson correlation of two normalized series resampled onto `grid`
/// evenly spaced x values in (0, 1].
pub fn scale_alignment_score_with_grid(
    a: &[(f64, f64)],
    b: &[(f64, f64)],
    grid: usize,
) -> Result<f64> {
    assert!(!a.is_empty() && !b.is_empty());
    let xs: Vec<f64> = (1..=grid).map(|i| i as f64 / grid as f64).collect();
    let ya: Vec<f64> = xs.iter().map(|&x| sample(a, x)).collect();
    let yb: Vec<f64> = xs.iter().map(|&x| sample(b, x)).collect();
    pearson(&ya, &yb)
}

/// Alignment on the default 256-point grid.
pub fn scale_alignment_score(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64> {
    scale_alignment_score_with_grid(a, b, ALIGNMENT_GRID)
}

/// Series CSV `prime,x,mean_even,mean_odd,count_even,count_odd`, means at
/// 3 decimals half-to-even, x = p / lo at 6 decimals.
pub fn write_paired_csv<W: Write>(
    even: &MurmurationSeries,
    odd: &MurmurationSeries,
    mut out: W,
) -> Result<()> {
    assert_eq!(even.primes, odd.primes, "paired series share one grid");
    let lo = even.interval.lo;
    if lo == 0 {
        return Err(Error::BadInterval {
            lo,
            hi: even.interval.hi,
        });
    }
    writeln!(out, "prime,x,mean_even,mean_odd,count_even,count_odd")?;
    for (k, &p) in even.primes.iter().enumerate() {
        writeln!(
            out,
            "{},{:.6},{},{},{},{}",
            p,
            p as f64 / lo as f64,
            format_mean3(even.means[k]),
            format_mean3(odd.means[k]),
            even.member_count,
            odd.member_count
        )?;
    }
    Ok(())
}
