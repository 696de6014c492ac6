//! Exact point counting of Weierstrass curves over prime fields.
//!
//! A curve in long Weierstrass form
//!
//! ```text
//! y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6
//! ```
//!
//! is reduced mod p and its projective points are counted exactly. The
//! Frobenius trace is `a_p = p + 1 - #E_p`, where `#E_p` counts every
//! affine solution plus the point at infinity (at bad primes the singular
//! point is included, which makes `a_p` land in {-1, 0, 1} without any
//! reduction-type classification).
//!
//! Two counting routes exist: a brute-force double loop over F_p^2, and a
//! quadratic-character sweep that completes the square in y and counts
//! `1 + chi(f(x))` per abscissa. The brute loop is the oracle; the sweep
//! must agree with it everywhere.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::Result;

/// Primes above this are rejected outright; desk-scale sweeps sit far below.
pub const PRIME_CEILING: u64 = 1 << 31;

/// Ordered primes `<= limit` by sieve of Eratosthenes. `limit < 2` gives
/// an empty list.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Least nonnegative residue of a signed big integer.
fn residue(a: &BigInt, p: u64) -> u64 {
    let m = BigInt::from(p);
    let r = a % &m;
    let r = if r.is_negative() { r + &m } else { r };
    r.to_u64().expect("residue fits u64")
}

/// Good or bad reduction at one prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Good,
    Bad,
}

/// The trace `a_p = p + 1 - #E_p` together with the reduction status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrobeniusTrace {
    pub prime: u64,
    pub value: i64,
    pub reduction: Reduction,
}

/// Long Weierstrass equation with arbitrary-precision coefficients.
///
/// Construction checks that the global discriminant is nonzero; singular
/// cubics are rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveEquation {
    a1: BigInt,
    a2: BigInt,
    a3: BigInt,
    a4: BigInt,
    a6: BigInt,
    discriminant: BigInt,
}

impl CurveEquation {
    pub fn new(a1: BigInt, a2: BigInt, a3: BigInt, a4: BigInt, a6: BigInt) -> Result<Self> {
        let disc = discriminant(&a1, &a2, &a3, &a4, &a6);
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        Ok(CurveEquation {
            a1,
            a2,
            a3,
            a4,
            a6,
            discriminant: disc,
        })
    }

    /// Coefficient order is [a1, a2, a3, a4, a6] in every interface.
    pub fn from_coeffs(c: [i64; 5]) -> Result<Self> {
        Self::new(
            BigInt::from(c[0]),
            BigInt::from(c[1]),
            BigInt::from(c[2]),
            BigInt::from(c[3]),
            BigInt::from(c[4]),
        )
    }

    pub fn coefficients(&self) -> [&BigInt; 5] {
        [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    pub fn has_bad_reduction(&self, p: u64) -> bool {
        (&self.discriminant % BigInt::from(p)).is_zero()
    }

    /// Coefficients as least nonnegative residues mod p.
    fn reduce(&self, p: u64) -> [u64; 5] {
        [
            residue(&self.a1, p),
            residue(&self.a2, p),
            residue(&self.a3, p),
            residue(&self.a4, p),
            residue(&self.a6, p),
        ]
    }

    /// b-invariants mod p, as used by the completed-square sweep.
    fn b_invariants_mod(&self, p: u64) -> (u64, u64, u64) {
        let [a1, a2, a3, a4, a6] = self.reduce(p);
        let b2 = (mulmod(a1, a1, p) + 4 * a2 % p) % p;
        let b4 = (2 * a4 % p + mulmod(a1, a3, p)) % p;
        let b6 = (mulmod(a3, a3, p) + 4 * a6 % p) % p;
        (b2, b4, b6)
    }
}

fn discriminant(a1: &BigInt, a2: &BigInt, a3: &BigInt, a4: &BigInt, a6: &BigInt) -> BigInt {
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * (a3 * a3) - a4 * a4;
    let b2sq: BigInt = &b2 * &b2;
    -b2sq * &b8 - 8 * (&b4 * &b4 * &b4) - 27 * (&b6 * &b6) + 9 * &b2 * &b4 * &b6
}

/// Quadratic-character lookup for one prime: `chi[v]` is +1 for a nonzero
/// square mod p, -1 for a non-square, 0 at v = 0. Immutable after build and
/// shared read-only across curves.
#[derive(Debug, Clone)]
pub struct ResidueTable {
    prime: u64,
    chi: Vec<i8>,
}

impl ResidueTable {
    pub fn new(p: u64) -> Result<Self> {
        if p >= PRIME_CEILING {
            return Err(Error::PrimeTooLarge(p));
        }
        let mut chi = vec![-1i8; p as usize];
        chi[0] = 0;
        for v in 1..p {
            chi[mulmod(v, v, p) as usize] = 1;
        }
        Ok(ResidueTable { prime: p, chi })
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    #[inline]
    fn chi(&self, v: u64) -> i64 {
        self.chi[v as usize] as i64
    }
}

/// Brute-force count of `#E_p`: all (x, y) in F_p^2 plus infinity. At bad
/// primes the singular point is part of the count.
pub fn count_points_naive(curve: &CurveEquation, p: u64) -> u64 {
    assert!(p >= 2 && p < PRIME_CEILING, "prime out of range");
    let [a1, a2, a3, a4, a6] = curve.reduce(p);
    let mut affine = 0u64;
    for x in 0..p {
        // rhs(x) = x^3 + a2 x^2 + a4 x + a6
        let rhs = (mulmod(mulmod(x, x, p), x, p)
            + mulmod(a2, mulmod(x, x, p), p)
            + mulmod(a4, x, p)
            + a6)
            % p;
        let lin = (mulmod(a1, x, p) + a3) % p;
        for y in 0..p {
            // lhs(y) = y^2 + (a1 x + a3) y
            let lhs = (mulmod(y, y, p) + mulmod(lin, y, p)) % p;
            if lhs == rhs {
                affine += 1;
            }
        }
    }
    affine + 1
}

/// Character-sweep count for odd p; p = 2 and p = 3 fall back to the
/// brute loop. Agrees with [`count_points_naive`] on every input.
///
/// Completing the square with Y = 2y + a1 x + a3 turns the affine count
/// into `sum over x of 1 + chi(4x^3 + b2 x^2 + 2 b4 x + b6)`.
pub fn count_points_fast(curve: &CurveEquation, p: u64, table: &ResidueTable) -> Result<u64> {
    if table.prime() != p {
        return Err(Error::TableMismatch {
            table: table.prime(),
            requested: p,
        });
    }
    if p < 5 {
        return Ok(count_points_naive(curve, p));
    }
    let (b2, b4, b6) = curve.b_invariants_mod(p);
    let tb4 = 2 * b4 % p;
    let mut sum = 0i64;
    let mut fx: u64;
    for x in 0..p {
        // Horner: ((4x + b2)x + 2b4)x + b6
        fx = (4 * x + b2) % p;
        fx = (mulmod(fx, x, p) + tb4) % p;
        fx = (mulmod(fx, x, p) + b6) % p;
        sum += table.chi(fx);
    }
    Ok((p as i64 + 1 + sum) as u64)
}

/// Trace at one prime; builds a throwaway residue table. Sweeps over many
/// curves should share tables via [`PrimeTables`] instead.
pub fn frobenius_trace(curve: &CurveEquation, p: u64) -> FrobeniusTrace {
    let table = ResidueTable::new(p).expect("prime below ceiling");
    frobenius_trace_with_table(curve, &table)
}

pub fn frobenius_trace_with_table(curve: &CurveEquation, table: &ResidueTable) -> FrobeniusTrace {
    let p = table.prime();
    let count = count_points_fast(curve, p, table).expect("table prime matches");
    let value = p as i64 + 1 - count as i64;
    let reduction = if curve.has_bad_reduction(p) {
        Reduction::Bad
    } else {
        Reduction::Good
    };
    debug_assert!(match reduction {
        Reduction::Good => value * value <= 4 * p as i64,
        Reduction::Bad => (-1..=1).contains(&value),
    });
    FrobeniusTrace {
        prime: p,
        value,
        reduction,
    }
}

/// Residue tables for every prime up to a limit, built once and shared
/// read-only across curves and threads.
#[derive(Debug, Clone)]
pub struct PrimeTables {
    primes: Vec<u64>,
    tables: Vec<ResidueTable>,
}

impl PrimeTables {
    pub fn new(prime_limit: u64) -> Result<Self> {
        let primes = sieve_primes(prime_limit);
        let tables = primes
            .iter()
            .map(|&p| ResidueTable::new(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(PrimeTables { primes, tables })
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn tables(&self) -> &[ResidueTable] {
        &self.tables
    }
}

/// The feature vector X(E): one trace per prime, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApVector {
    pub curve_id: String,
    pub values: Vec<i64>,
}

impl ApVector {
    pub fn prime_count(&self) -> usize {
        self.values.len()
    }
}

/// a_p for every prime `<= prime_limit`.
pub fn ap_vector(curve: &CurveEquation, prime_limit: u64) -> ApVector {
    let tables = PrimeTables::new(prime_limit).expect("limit below ceiling");
    ap_vector_with_tables(curve, "", &tables)
}

pub fn ap_vector_with_tables(
    curve: &CurveEquation,
    curve_id: &str,
    tables: &PrimeTables,
) -> ApVector {
    let values = tables
        .tables()
        .iter()
        .map(|t| frobenius_trace_with_table(curve, t).value)
        .collect();
    ApVector {
        curve_id: curve_id.to_string(),
        values,
    }
}

/// Running sums of a_p in prime order: entry k is `(p_k, sum of a_p up to p_k)`.
pub fn aggregate_discrepancy(curve: &CurveEquation, prime_limit: u64) -> Vec<(u64, i64)> {
    let ap = ap_vector(curve, prime_limit);
    let primes = sieve_primes(prime_limit);
    let mut total = 0i64;
    primes
        .iter()
        .zip(ap.values.iter())
        .map(|(&p, &a)| {
            total += a;
            (p, total)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn curve_37a() -> CurveEquation {
        // y^2 + y = x^3 - x
        CurveEquation::from_coeffs([0, 0, 1, -1, 0]).unwrap()
    }

    fn curve_19a() -> CurveEquation {
        // y^2 + y = x^3 + x^2 + x
        CurveEquation::from_coeffs([0, 1, 1, 1, 0]).unwrap()
    }

    #[test]
    fn sieve_small() {
        assert_eq!(sieve_primes(10), vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2), vec![2]);
        assert!(sieve_primes(1).is_empty());
        assert!(sieve_primes(0).is_empty());
    }

    #[test]
    fn sieve_counts_564_primes_below_4096() {
        assert_eq!(sieve_primes(4096).len(), 564);
    }

    #[test]
    fn naive_counts_match_tables() {
        // 16 affine solutions mod 11 plus infinity
        assert_eq!(count_points_naive(&curve_37a(), 11), 17);
        // 4 affine mod 2 plus infinity
        assert_eq!(count_points_naive(&curve_37a(), 2), 5);
        // 2 affine mod 5 plus infinity
        assert_eq!(count_points_naive(&curve_19a(), 5), 3);
    }

    #[test]
    fn fast_equals_naive_on_named_cases() {
        let t11 = ResidueTable::new(11).unwrap();
        assert_eq!(count_points_fast(&curve_37a(), 11, &t11).unwrap(), 17);
        let t2 = ResidueTable::new(2).unwrap();
        assert_eq!(count_points_fast(&curve_19a(), 2, &t2).unwrap(), 3);
        let t5 = ResidueTable::new(5).unwrap();
        let c = CurveEquation::from_coeffs([0, 0, 0, 0, 1]).unwrap(); // y^2 = x^3 + 1
        assert_eq!(count_points_fast(&c, 5, &t5).unwrap(), 6);
    }

    #[test]
    fn table_mismatch_is_an_error() {
        let t7 = ResidueTable::new(7).unwrap();
        let err = count_points_fast(&curve_37a(), 11, &t7).unwrap_err();
        assert_eq!(err.code(), "E_TABLE_MISMATCH");
    }

    #[test]
    fn singular_cubic_rejected() {
        assert!(matches!(
            CurveEquation::from_coeffs([0, 0, 0, 0, 0]),
            Err(Error::SingularCurve)
        ));
    }

    #[test]
    fn trace_values_from_tables() {
        assert_eq!(frobenius_trace(&curve_37a(), 2).value, -2);
        assert_eq!(frobenius_trace(&curve_19a(), 53).value, 12);
        let t = frobenius_trace(&curve_37a(), 37);
        assert_eq!(t.value, -1);
        assert_eq!(t.reduction, Reduction::Bad);
        assert_eq!(curve_37a().discriminant(), &BigInt::from(37));
    }

    #[test]
    fn ap_vector_first_primes() {
        assert_eq!(ap_vector(&curve_37a(), 10).values, vec![-2, -3, -2, -1]);
        assert_eq!(ap_vector(&curve_19a(), 10).values, vec![0, -2, 3, -1]);
        assert_eq!(ap_vector(&curve_37a(), 2).values.len(), 1);
    }

    #[test]
    fn aggregate_running_sums() {
        let agg = aggregate_discrepancy(&curve_37a(), 5);
        assert_eq!(agg, vec![(2, -2), (3, -5), (5, -7)]);
        assert_eq!(aggregate_discrepancy(&curve_37a(), 100).last(), Some(&(97, -14)));
        assert_eq!(aggregate_discrepancy(&curve_19a(), 100).last(), Some(&(97, 31)));
    }

    #[test]
    fn isogenous_curves_share_traces() {
        // the conductor-11 class: three equations, one set of a_p
        let reps = [
            CurveEquation::from_coeffs([0, -1, 1, 0, 0]).unwrap(),
            CurveEquation::from_coeffs([0, -1, 1, -7820, -263580]).unwrap(),
            CurveEquation::from_coeffs([0, -1, 1, -10, -20]).unwrap(),
        ];
        let want = ap_vector(&reps[0], 100).values;
        for rep in &reps[1..] {
            assert_eq!(ap_vector(rep, 100).values, want);
        }
    }

    proptest! {
        #[test]
        fn fast_equals_naive_and_invariants_hold(
            a1 in -20i64..=20, a2 in -20i64..=20, a3 in -20i64..=20,
            a4 in -20i64..=20, a6 in -20i64..=20,
            pidx in 0usize..26,
        ) {
            let curve = match CurveEquation::from_coeffs([a1, a2, a3, a4, a6]) {
                Ok(c) => c,
                Err(_) => return Ok(()), // singular draw
            };
            let p = sieve_primes(101)[pidx];
            let table = ResidueTable::new(p).unwrap();
            let fast = count_points_fast(&curve, p, &table).unwrap();
            prop_assert_eq!(fast, count_points_naive(&curve, p));
            let t = frobenius_trace_with_table(&curve, &table);
            match t.reduction {
                Reduction::Good => prop_assert!(t.value * t.value <= 4 * p as i64),
                Reduction::Bad => prop_assert!((-1..=1).contains(&t.value)),
            }
        }
    }
}
