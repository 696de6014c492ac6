//! Factorization of discriminant-sized integers: trial division,
//! deterministic Miller-Rabin, Pollard rho.

fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    // inputs stay below 2^63 here, so the product fits u128
    (a * b) % m
}

fn powmod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime(n: u128) -> bool {
    assert!(n < 1 << 62, "factorization input out of range");
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> u128 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u128;
    loop {
        let f = |x: u128| (mulmod(x, x, n) + c) % n;
        let mut x = 2u128;
        let mut y = 2u128;
        let mut d = 1u128;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            let diff = if x > y { x - y } else { y - x };
            d = gcd(diff, n);
        }
        if d != n && d != 0 {
            return d;
        }
        c += 1;
    }
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Sorted prime factorization with exponents.
pub fn factorize(mut n: u128) -> Vec<(u128, u32)> {
    assert!(n > 0);
    let mut out: Vec<(u128, u32)> = Vec::new();
    let mut push = |p: u128, out: &mut Vec<(u128, u32)>| {
        match out.iter_mut().find(|(q, _)| *q == p) {
            Some((_, e)) => *e += 1,
            None => out.push((p, 1)),
        }
    };
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            n /= p;
            push(p, &mut out);
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            push(m, &mut out);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_basics() {
        assert!(is_prime(2));
        assert!(is_prime(97));
        assert!(is_prime(26861));
        assert!(is_prime(616841));
        assert!(!is_prime(1));
        assert!(!is_prime(561)); // Carmichael
        assert!(!is_prime(25326001));
    }

    #[test]
    fn factors_discriminant_sized_numbers() {
        assert_eq!(factorize(161051), vec![(11, 5)]);
        assert_eq!(factorize(2u128.pow(12) * 27), vec![(2, 12), (3, 3)]);
        assert_eq!(factorize(1_000_003u128 * 999_983), vec![(999_983, 1), (1_000_003, 1)]);
    }
}
