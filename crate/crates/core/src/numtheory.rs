//! Exact integer helpers: the largest-power-of-two function, logarithms of
//! rational ratios, and the solver for congruences `2^x = r (mod q)`.
//!
//! Everything here is exact integer arithmetic; no floating point anywhere.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Largest power of two `<= |n|`, with `lambda(0) = 0`.
pub fn lambda(n: &BigInt) -> BigInt {
    if n.is_zero() {
        BigInt::zero()
    } else {
        BigInt::one() << (n.bits() - 1)
    }
}

/// `ceil(log2(b/a))` for positive `a`, `b`, computed by shift-and-compare.
pub fn ceil_log2_ratio(b: &BigInt, a: &BigInt) -> i64 {
    assert!(a.is_positive() && b.is_positive());
    let e = floor_log2_ratio(b, a);
    if shifted_cmp(a, e, b) == std::cmp::Ordering::Equal {
        e
    } else {
        e + 1
    }
}

/// `floor(log2(b/a))` for positive `a`, `b`: the largest `e` with
/// `a * 2^e <= b`.
pub fn floor_log2_ratio(b: &BigInt, a: &BigInt) -> i64 {
    assert!(a.is_positive() && b.is_positive());
    let mut e = b.bits() as i64 - a.bits() as i64;
    // a*2^e and b agree to within one bit length; fix up by at most one step
    // in each direction.
    while shifted_cmp(a, e, b) == std::cmp::Ordering::Greater {
        e -= 1;
    }
    while shifted_cmp(a, e + 1, b) != std::cmp::Ordering::Greater {
        e += 1;
    }
    e
}

/// Compares `a * 2^e` against `b` without ever producing negative shifts.
fn shifted_cmp(a: &BigInt, e: i64, b: &BigInt) -> std::cmp::Ordering {
    if e >= 0 {
        (a << (e as u64)).cmp(b)
    } else {
        a.cmp(&(b << ((-e) as u64)))
    }
}

/// Solutions of `2^x = r (mod q)` over nonnegative `x`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CongruenceSolution {
    Unsat,
    /// A unique solution.
    Single(BigInt),
    /// Exactly the set `{start + i*period : i >= 0}`.
    Progression {
        start: BigInt,
        period: BigInt,
    },
}

/// Solves `2^x = r (mod q)` for `q >= 1` and `r` in `[0, q)`.
///
/// Both searches stop at `q - 1`: the sequence `2^0, 2^1, ... mod q` enters
/// its cycle within `q` steps, so the minimal solution `s` and the minimal
/// period `t` (the least `u > 0` with `q | r*(2^u - 1)`) are found there if
/// they exist at all. All arithmetic is done modulo `q` by iterative
/// doubling.
pub fn solve_pow_congruence(q: &BigInt, r: &BigInt) -> CongruenceSolution {
    assert!(q.is_positive(), "modulus must be positive");
    if q.is_one() {
        // every x solves 2^x = 0 (mod 1); the general search bound q-1
        // excludes the period u = 1 here
        return CongruenceSolution::Progression {
            start: BigInt::zero(),
            period: BigInt::one(),
        };
    }
    assert!(!r.is_negative() && r < q, "residue must lie in [0, q)");
    let start = {
        let mut p = BigInt::one().mod_floor(q);
        let mut s = BigInt::zero();
        loop {
            if s >= *q {
                break None;
            }
            if p == *r {
                break Some(s);
            }
            p = (p << 1u32).mod_floor(q);
            s += 1;
        }
    };
    let Some(start) = start else {
        return CongruenceSolution::Unsat;
    };
    // Least u > 0 with r*(2^u - 1) = 0 (mod q).
    let mut p = (BigInt::from(2)).mod_floor(q);
    let mut u = BigInt::one();
    while u < *q {
        if (r * (&p - 1u8)).mod_floor(q).is_zero() {
            return CongruenceSolution::Progression { start, period: u };
        }
        p = (p << 1u32).mod_floor(q);
        u += 1;
    }
    CongruenceSolution::Single(start)
}

/// Euler's totient by trial-division factorization. Only used as a test
/// oracle; nothing on the solving path calls it.
pub fn totient(n: u64) -> u64 {
    assert!(n >= 1);
    let mut n = n;
    let mut result = n;
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

pub fn lcm_big(a: &BigInt, b: &BigInt) -> BigInt {
    if a.is_zero() || b.is_zero() {
        BigInt::zero()
    } else {
        a.lcm(b)
    }
}
