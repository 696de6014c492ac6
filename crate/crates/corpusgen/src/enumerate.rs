//! Corpus assembly: scan coefficient boxes, minimalize, compute
//! conductors, collapse isogeny classes by trace fingerprint, assign
//! analytic ranks, and emit the corpus CSV.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use murmur_core::ecpoint::{ap_vector_with_tables, CurveEquation, PrimeTables};
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::curve::{invariants, minimal_model, Model};
use crate::factor::{factorize, is_prime};
use crate::lseries::{analytic_rank, dirichlet_coefficients, fe_conductor, series_length};
use crate::tate::{conductor, reduction_kind, ReductionKind};

pub struct GenOptions {
    pub conductor_max: u128,
    pub a4_bound: i128,
    pub a6_bound: i128,
    pub allow_rank3: bool,
    /// cross-check Tate's conductor against the functional equation on
    /// this many classes with additive reduction at 2 or 3 (usize::MAX
    /// means every one of them)
    pub fe_check: usize,
}

#[derive(Debug, Clone)]
pub struct ClassRecord {
    pub label: String,
    pub conductor: u128,
    pub rank: u32,
    pub model: Model,
    pub fingerprint: Vec<i64>,
}

const FINGERPRINT_LIMIT: u64 = 200;

/// All prime factors of d at most `bound`. `trial_covers_bound` marks
/// that the trial list reaches past the bound, in which case any
/// unstripped cofactor is certainly rough.
fn smooth(d: u128, bound: u128, small_primes: &[u64], trial_covers_bound: bool) -> bool {
    assert!(d < 1 << 62);
    let mut m = d as u64; // box discriminants stay far below 2^63
    for &p in small_primes {
        if p * p > m {
            break;
        }
        while m % p == 0 {
            m /= p;
        }
    }
    if m == 1 || m as u128 <= bound {
        return true; // whatever factors remain are below the bound
    }
    if trial_covers_bound {
        return false; // every factor of m exceeds the trial range
    }
    if is_prime(m as u128) {
        return false;
    }
    // composite cofactor, all factors above the trial range
    factorize(m as u128).iter().all(|&(p, _)| p <= bound)
}

/// Scan the normalized coefficient box and return distinct minimal models
/// with conductor in (0, conductor_max].
pub fn scan_box(opts: &GenOptions) -> Vec<(u128, Model)> {
    let trial_limit = if opts.conductor_max <= 1000 { 1024 } else { 320 };
    let trial: Vec<u64> = murmur_core::ecpoint::sieve_primes(trial_limit);
    let trial_covers_bound = trial_limit as u128 > opts.conductor_max;

    let mut tuples = Vec::new();
    for a1 in 0..=1i128 {
        for a2 in -1..=1i128 {
            for a3 in 0..=1i128 {
                for a4 in -opts.a4_bound..=opts.a4_bound {
                    tuples.push((a1, a2, a3, a4));
                }
            }
        }
    }

    let found: Vec<Vec<(u128, Model)>> = tuples
        .par_iter()
        .map(|&(a1, a2, a3, a4)| {
            let mut local = Vec::new();
            for a6 in -opts.a6_bound..=opts.a6_bound {
                let m = [a1, a2, a3, a4, a6];
                let inv = invariants(&m);
                if inv.disc == 0 {
                    continue;
                }
                if !smooth(
                    inv.disc.unsigned_abs(),
                    opts.conductor_max,
                    &trial,
                    trial_covers_bound,
                ) {
                    continue;
                }
                let minimal = minimal_model(&m);
                let n = conductor(&minimal);
                if n <= opts.conductor_max {
                    local.push((n, minimal));
                }
            }
            local
        })
        .collect();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (n, m) in found.into_iter().flatten() {
        if seen.insert(m) {
            out.push((n, m));
        }
    }
    out
}

fn to_curve(m: &Model) -> CurveEquation {
    CurveEquation::new(
        BigInt::from(m[0]),
        BigInt::from(m[1]),
        BigInt::from(m[2]),
        BigInt::from(m[3]),
        BigInt::from(m[4]),
    )
    .expect("minimal model is nonsingular")
}

fn spreadsheet_letters(mut k: usize) -> String {
    let mut s = String::new();
    loop {
        s.insert(0, (b'a' + (k % 26) as u8) as char);
        k /= 26;
        if k == 0 {
            break;
        }
        k -= 1;
    }
    s
}

/// Collapse models into isogeny classes, pick the smallest representative,
/// assign analytic ranks and deterministic labels.
pub fn build_classes(models: Vec<(u128, Model)>, opts: &GenOptions) -> Vec<ClassRecord> {
    let tables = PrimeTables::new(FINGERPRINT_LIMIT).expect("fingerprint tables");
    let prints: Vec<(u128, Model, Vec<i64>)> = models
        .into_par_iter()
        .map(|(n, m)| {
            let fp = ap_vector_with_tables(&to_curve(&m), "", &tables).values;
            (n, m, fp)
        })
        .collect();

    let mut classes: HashMap<(u128, Vec<i64>), Vec<Model>> = HashMap::new();
    for (n, m, fp) in prints {
        classes.entry((n, fp)).or_default().push(m);
    }

    let size_key = |m: &Model| {
        (
            m[3].unsigned_abs().max(m[4].unsigned_abs()),
            m.map(|c| c.unsigned_abs()),
            *m,
        )
    };
    let mut reps: Vec<(u128, Vec<i64>, Model)> = classes
        .into_iter()
        .map(|((n, fp), members)| {
            let rep = members.into_iter().min_by_key(size_key).unwrap();
            (n, fp, rep)
        })
        .collect();
    reps.sort();

    // analytic ranks, parallel over classes
    let rank_tables = PrimeTables::new(series_length(opts.conductor_max) as u64).expect("tables");
    let ranks: Vec<u32> = reps
        .par_iter()
        .map(|(n, _, m)| analytic_rank(m, *n, &rank_tables, opts.allow_rank3).rank)
        .collect();

    let mut per_level = HashMap::new();
    reps.iter()
        .zip(ranks)
        .map(|((n, fp, m), rank)| {
            let idx = per_level.entry(*n).or_insert(0usize);
            let label = format!("{}.{}", n, spreadsheet_letters(*idx));
            *idx += 1;
            ClassRecord {
                label,
                conductor: *n,
                rank,
                model: *m,
                fingerprint: fp.clone(),
            }
        })
        .collect()
}

/// Independent conductor check: the functional equation must prefer the
/// Tate conductor over every other candidate with the same tame part.
pub fn cross_check_conductors(records: &[ClassRecord], sample: usize) -> usize {
    let wild: Vec<&ClassRecord> = records
        .iter()
        .filter(|r| {
            reduction_kind(&r.model, 2) == ReductionKind::Additive
                || reduction_kind(&r.model, 3) == ReductionKind::Additive
        })
        .collect();
    let take = wild.len().min(sample);
    let step = (wild.len() / take.max(1)).max(1);
    let checked: Vec<&&ClassRecord> = wild.iter().step_by(step).take(take).collect();
    let n_hi: u128 = checked.iter().map(|r| r.conductor).max().unwrap_or(1);

    let failures: usize = checked
        .par_iter()
        .map(|rec| {
            let mut tame = rec.conductor;
            while tame % 2 == 0 {
                tame /= 2;
            }
            while tame % 3 == 0 {
                tame /= 3;
            }
            let mut cands = Vec::new();
            for i in 0..=8u32 {
                for j in 0..=5u32 {
                    cands.push(tame * 2u128.pow(i) * 3u128.pow(j));
                }
            }
            let n_max = series_length(n_hi.max(rec.conductor * 2));
            let tables = PrimeTables::new(n_max as u64).expect("tables");
            let an = dirichlet_coefficients(&rec.model, n_max, &tables);
            let (best, _, res, runner) = fe_conductor(&an, &cands);
            if best != rec.conductor || res > 1e-7 || runner < 1e3 * res.max(1e-13) {
                eprintln!(
                    "conductor mismatch: {:?} tate={} fe={} residuals {res:.2e}/{runner:.2e}",
                    rec.model, rec.conductor, best
                );
                1
            } else {
                0
            }
        })
        .sum();
    failures
}

fn isqrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x > 0 && x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Exhaustive per-conductor search: every discriminant candidate
/// +-prod p^e over the primes of N up to `disc_cap`, solved for integral
/// invariant pairs c4^3 - c6^2 = 1728 disc with |c4| <= c4_cap. Finds
/// classes whose minimal coefficients sit outside any practical box.
pub fn mordell_scan(
    n_lo: u128,
    n_hi: u128,
    disc_cap: i128,
    c4_cap: i128,
) -> Vec<(u128, Model)> {
    let levels: Vec<u128> = (n_lo.max(11)..n_hi).collect();
    let found: Vec<Vec<(u128, Model)>> = levels
        .par_iter()
        .map(|&n| {
            let primes: Vec<i128> = factorize(n).into_iter().map(|(p, _)| p as i128).collect();
            let mut discs = Vec::new();
            let mut stack = vec![(0usize, 1i128)];
            while let Some((idx, acc)) = stack.pop() {
                if idx == primes.len() {
                    if acc > 1 {
                        discs.push(acc);
                        discs.push(-acc);
                    }
                    continue;
                }
                // every prime of N divides the minimal discriminant
                let mut v = acc * primes[idx];
                while v.unsigned_abs() <= disc_cap.unsigned_abs() {
                    stack.push((idx + 1, v));
                    v *= primes[idx];
                }
            }

            let mut local = Vec::new();
            for disc in discs {
                let k = 1728 * disc;
                // smallest c4 with c4^3 >= k
                let mut c4 = if k >= 0 {
                    let r = (k as f64).cbrt().floor() as i128 - 2;
                    let mut r = r.max(0);
                    while r * r * r < k {
                        r += 1;
                    }
                    r
                } else {
                    let r = ((-k) as f64).cbrt().ceil() as i128 + 2;
                    let mut r = -r;
                    while r * r * r < k {
                        r += 1;
                    }
                    r
                };
                while c4 <= c4_cap {
                    let t = c4 * c4 * c4 - k;
                    let s = isqrt_u128(t as u128);
                    if (s * s) as i128 == t {
                        for c6 in if s == 0 {
                            vec![0i128]
                        } else {
                            vec![s as i128, -(s as i128)]
                        } {
                            if let Some(m) = crate::curve::try_model_from_c4c6(c4, c6) {
                                let minimal = minimal_model(&m);
                                let cond = conductor(&minimal);
                                if n_lo <= cond && cond < n_hi {
                                    local.push((cond, minimal));
                                }
                            }
                        }
                    }
                    c4 += 1;
                }
            }
            local
        })
        .collect();

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (n, m) in found.into_iter().flatten() {
        if seen.insert(m) {
            out.push((n, m));
        }
    }
    out
}

/// Union of model lists with exact dedupe, first occurrence wins.
pub fn merge_models(lists: Vec<Vec<(u128, Model)>>) -> Vec<(u128, Model)> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (n, m) in lists.into_iter().flatten() {
        if seen.insert(m) {
            out.push((n, m));
        }
    }
    out
}

pub fn write_corpus_csv<W: Write>(records: &[ClassRecord], mut out: W) -> std::io::Result<()> {
    writeln!(out, "label,conductor,rank,a1,a2,a3,a4,a6")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.label, r.conductor, r.rank, r.model[0], r.model[1], r.model[2], r.model[3], r.model[4]
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_box_finds_the_low_conductor_classes() {
        let opts = GenOptions {
            conductor_max: 40,
            a4_bound: 16,
            a6_bound: 32,
            allow_rank3: false,
            fe_check: usize::MAX,
        };
        let models = scan_box(&opts);
        let classes = build_classes(models, &opts);
        let conductors: Vec<u128> = classes.iter().map(|c| c.conductor).collect();
        // the complete list of conductors below 40 with their class counts
        for want in [11, 14, 15, 17, 19, 20, 21, 24, 26, 27, 30, 32, 33, 34, 35, 36, 37, 38, 39] {
            assert!(conductors.contains(&want), "missing conductor {want}");
        }
        // 26, 37, 38 split into two classes; everything else here is one
        let count = |n: u128| conductors.iter().filter(|&&c| c == n).count();
        assert_eq!(count(26), 2);
        assert_eq!(count(37), 2);
        assert_eq!(count(38), 2);
        assert_eq!(count(11), 1);
        assert!(!conductors.iter().any(|&n| n < 11));
        // ranks: everything below conductor 37 has rank 0; 37.a is the
        // first rank-1 class
        let c37a = classes.iter().find(|c| c.label == "37.a").unwrap();
        assert_eq!(c37a.rank, 1);
        assert_eq!(c37a.model, [0, 0, 1, -1, 0]);
        let c37b = classes.iter().find(|c| c.label == "37.b").unwrap();
        assert_eq!(c37b.rank, 0);
        assert!(classes
            .iter()
            .filter(|c| c.conductor < 37)
            .all(|c| c.rank == 0));
        assert_eq!(cross_check_conductors(&classes, usize::MAX), 0);
    }
}
