//! Primality, prime powers, and the two prime searches behind the
//! constructions.
//!
//! Everything here is exact integer arithmetic. The moduli this crate
//! touches stay small (six digits at the very largest), so trial division
//! is the deliberate choice: no probabilistic primality, nothing to audit
//! beyond a loop. Intermediate products widen to `u128` where they could
//! otherwise wrap.

use crate::error::{Error, Result};

/// True iff `n` is prime. Trial division by 2 and the odd numbers up to
/// the square root.
#[must_use]
pub const fn is_prime(n: u64) -> bool {
    if n < 4 {
        return n > 1;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Least prime `>= n`. For `n <= 2` the answer is 2.
#[must_use]
pub const fn smallest_prime_geq(n: u64) -> u64 {
    let mut p = if n < 2 { 2 } else { n };
    while !is_prime(p) {
        p += 1;
    }
    p
}

/// Exact `ceil(sqrt(n))`.
#[must_use]
pub const fn ceil_sqrt(n: u64) -> u64 {
    let r = n.isqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Largest `r` with `r^e <= n`. `e >= 1`.
const fn nth_root(n: u64, e: u32) -> u64 {
    if e == 1 {
        return n;
    }
    let mut lo = 0u64;
    let mut hi = 1u64 << (n.ilog2() / e + 1);
    // Invariant: lo^e <= n < (hi+1)^e, with hi wide enough at entry.
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        let mut pow = 1u128;
        let mut i = 0;
        let mut fits = true;
        while i < e {
            pow *= mid as u128;
            if pow > n as u128 {
                fits = false;
                break;
            }
            i += 1;
        }
        if fits {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Decomposes `n` as `q^e` with `q` prime, if possible. The decomposition
/// is unique when it exists; `1` is not a prime power.
#[must_use]
pub const fn is_prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let mut e = n.ilog2();
    while e >= 1 {
        let q = nth_root(n, e);
        // q^e == n is exact: nth_root already told us q^e <= n.
        let mut pow = 1u64;
        let mut i = 0;
        let mut exact = true;
        while i < e {
            match pow.checked_mul(q) {
                Some(v) => pow = v,
                None => {
                    exact = false;
                    break;
                }
            }
            i += 1;
        }
        if exact && pow == n && is_prime(q) {
            return Some((q, e));
        }
        e -= 1;
    }
    None
}

/// Channels left usable once the reserved difference set of the general
/// square construction is carved out of `Z_p`: with `d = ceil(sqrt(p))`
/// the set takes `d + floor(p/d) - 1` residues, leaving
/// `p - d - floor(p/d) + 1`.
#[must_use]
pub const fn usable_channels(p: u64) -> u64 {
    if p == 0 {
        return 0;
    }
    let d = ceil_sqrt(p);
    let reserved = d + p / d - 1;
    p.saturating_sub(reserved)
}

/// Least prime `p` leaving at least `n` usable channels. The answer stays
/// below `4n` for every `n >= 16`; small `n` pay a little more (`n = 1`
/// already needs `p = 3`).
#[must_use]
pub fn general_prime_for(n: u64) -> u64 {
    let mut p = 2;
    loop {
        if is_prime(p) && usable_channels(p) >= n {
            return p;
        }
        p += 1;
    }
}

/// All orders `l <= limit` accepted by the square construction: `l` must
/// be a prime power with `l^2 + l + 1` prime. Ascending.
#[must_use]
pub fn valid_ideal_orders(limit: u64) -> Vec<u64> {
    (2..=limit)
        .filter(|&l| is_prime_power(l).is_some() && is_prime(l * l + l + 1))
        .collect()
}

/// `base^exp mod m`, `m >= 1`.
#[must_use]
pub const fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    let mut b = (base % m) as u128;
    let m = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        exp >>= 1;
    }
    acc as u64
}

/// Multiplicative inverse of `a` mod `m` (`m >= 2`), by the extended
/// Euclidean algorithm. Errors when `gcd(a, m) != 1`.
pub fn mod_inverse(a: u64, m: u64) -> Result<u64> {
    if m < 2 {
        return Err(Error::precondition(format!(
            "modulus {m} has no inverses"
        )));
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::precondition(format!(
            "{a} is not invertible mod {m} (gcd = {r0})"
        )));
    }
    Ok(t0.rem_euclid(m as i128) as u64)
}
