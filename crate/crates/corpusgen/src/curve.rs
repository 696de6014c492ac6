//! Integral Weierstrass models over i128: invariants, coordinate
//! changes, and Laska-Kraus-Connell minimalization.

/// [a1, a2, a3, a4, a6]
pub type Model = [i128; 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Invariants {
    pub b2: i128,
    pub b4: i128,
    pub b6: i128,
    pub b8: i128,
    pub c4: i128,
    pub c6: i128,
    pub disc: i128,
}

pub fn invariants(a: &Model) -> Invariants {
    let [a1, a2, a3, a4, a6] = *a;
    let b2 = a1 * a1 + 4 * a2;
    let b4 = 2 * a4 + a1 * a3;
    let b6 = a3 * a3 + 4 * a6;
    let b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    let c4 = b2 * b2 - 24 * b4;
    let c6 = -b2 * b2 * b2 + 36 * b2 * b4 - 216 * b6;
    let disc = -b2 * b2 * b8 - 8 * b4 * b4 * b4 - 27 * b6 * b6 + 9 * b2 * b4 * b6;
    debug_assert_eq!(c4 * c4 * c4 - c6 * c6, 1728 * disc);
    Invariants {
        b2,
        b4,
        b6,
        b8,
        c4,
        c6,
        disc,
    }
}

/// Coordinate change x = u^2 x' + r, y = u^3 y' + s u^2 x' + t.
pub fn transform(a: &Model, u: i128, r: i128, s: i128, t: i128) -> Model {
    let [a1, a2, a3, a4, a6] = *a;
    let na1 = a1 + 2 * s;
    let na2 = a2 - s * a1 + 3 * r - s * s;
    let na3 = a3 + r * a1 + 2 * t;
    let na4 = a4 - s * a3 + 2 * r * a2 - (t + r * s) * a1 + 3 * r * r - 2 * s * t;
    let na6 = a6 + r * a4 + r * r * a2 + r * r * r - t * a3 - t * t - r * t * a1;
    assert!(
        na1 % u == 0
            && na2 % (u * u) == 0
            && na3 % (u * u * u) == 0
            && na4 % (u * u * u * u) == 0
            && na6 % (u * u * u * u * u * u) == 0,
        "inadmissible transform"
    );
    [
        na1 / u,
        na2 / (u * u),
        na3 / (u * u * u),
        na4 / (u * u * u * u),
        na6 / (u * u * u * u * u * u),
    ]
}

pub fn vp(mut n: i128, p: i128) -> u32 {
    assert!(n != 0);
    if n < 0 {
        n = -n;
    }
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Kraus's integrality conditions at 2 and 3 for a (c4, c6) pair.
fn kraus_ok(c4: i128, c6: i128) -> bool {
    // at 3: v3(c6) != 2
    if c6 != 0 && vp(c6, 3) == 2 {
        return false;
    }
    // at 2: c6 = -1 mod 4, or (c4 = 0 mod 16 and c6 = 0 or 8 mod 32)
    let c6m4 = c6.rem_euclid(4);
    if c6m4 == 3 {
        return true;
    }
    let c6m32 = c6.rem_euclid(32);
    c4.rem_euclid(16) == 0 && (c6m32 == 0 || c6m32 == 8)
}

/// Reconstruct the normalized model (a1 in {0,1}, a2 in {-1,0,1},
/// a3 in {0,1}) from a (c4, c6) pair; None when no integral model
/// carries these invariants.
pub fn try_model_from_c4c6(c4: i128, c6: i128) -> Option<Model> {
    if !kraus_ok(c4, c6) {
        return None;
    }
    let b2 = match (-c6).rem_euclid(12) {
        8 => -4,
        9 => -3,
        v @ (0 | 1 | 4 | 5) => v,
        _ => return None,
    };
    if (b2 * b2 - c4).rem_euclid(24) != 0 {
        return None;
    }
    let b4 = (b2 * b2 - c4) / 24;
    let num = -b2 * b2 * b2 + 36 * b2 * b4 - c6;
    if num.rem_euclid(216) != 0 {
        return None;
    }
    let b6 = num / 216;
    let a1 = b2.rem_euclid(2);
    let a2 = (b2 - a1) / 4;
    let a3 = b6.rem_euclid(2);
    let a6 = (b6 - a3) / 4;
    if (b4 - a1 * a3).rem_euclid(2) != 0 {
        return None;
    }
    let a4 = (b4 - a1 * a3) / 2;
    let m = [a1, a2, a3, a4, a6];
    let inv = invariants(&m);
    if (inv.c4, inv.c6) != (c4, c6) {
        return None;
    }
    Some(m)
}

/// Global minimal model by Laska-Kraus-Connell, in normalized form.
pub fn minimal_model(a: &Model) -> Model {
    let inv = invariants(a);
    assert!(inv.disc != 0, "singular model");
    let mut c4 = inv.c4;
    let mut c6 = inv.c6;
    // candidate scaling primes satisfy p^12 | disc
    let mut d = inv.disc.unsigned_abs();
    let mut p = 2u128;
    let mut primes = Vec::new();
    while p * p <= d {
        if d % p == 0 {
            primes.push(p as i128);
            while d % p == 0 {
                d /= p;
            }
        }
        p += 1;
    }
    if d > 1 {
        primes.push(d as i128);
    }
    for p in primes {
        let p4 = p * p * p * p;
        let p6 = p4 * p * p;
        loop {
            let divides = (c4 == 0 || c4 % p4 == 0) && (c6 == 0 || c6 % p6 == 0);
            if !divides {
                break;
            }
            let (n4, n6) = (if c4 == 0 { 0 } else { c4 / p4 }, if c6 == 0 { 0 } else { c6 / p6 });
            // 1728 * disc = c4^3 - c6^2 must stay integral after u = p
            let num = n4 * n4 * n4 - n6 * n6;
            if num % 1728 != 0 || num == 0 {
                break;
            }
            if (p == 2 || p == 3) && !kraus_ok(n4, n6) {
                break;
            }
            c4 = n4;
            c6 = n6;
        }
    }
    try_model_from_c4c6(c4, c6).expect("scaled-down invariants stay realizable")
}
