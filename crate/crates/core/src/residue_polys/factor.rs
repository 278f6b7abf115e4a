//! Complete factorization of polynomial values: trial division by a
//! supplied small-prime list, then Miller-Rabin plus Brent-cycle Pollard
//! rho on whatever cofactor survives.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::numtheory::{is_prime, is_prime_u64};

/// Modular-multiplication budget for the big-integer rho stage, across all
/// restarts within one factor_value call. Values here are at most about
/// 72 p^{3/2}; a cofactor that defeats this budget is reported, not chased.
const RHO_BIG_BUDGET: u64 = 4_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FactorError {
    #[error("factorization budget exhausted; unfactored cofactor {cofactor}")]
    Timeout {
        /// Factors recovered before giving up.
        partial: BTreeMap<BigUint, u32>,
        cofactor: BigUint,
    },
}

/// Complete prime factorization of v >= 1 as {prime: valuation}. The
/// product of q^valuation reconstructs v exactly (checked in debug builds).
pub fn factor_value(
    v: &BigUint,
    small_primes: &[u64],
) -> Result<BTreeMap<BigUint, u32>, FactorError> {
    assert!(!v.is_zero(), "factorization of zero");
    let mut out = BTreeMap::new();
    if v.is_one() {
        return Ok(out);
    }
    if let Some(n) = v.to_u64() {
        factor_u64_into(n, small_primes, &mut out);
        debug_assert_eq!(&rebuild(&out), v);
        return Ok(out);
    }

    let mut rest = v.clone();
    for &q in small_primes {
        if rest.is_one() {
            break;
        }
        let qb = BigUint::from(q);
        let mut e = 0u32;
        loop {
            let (quo, rem) = rest.div_rem(&qb);
            if !rem.is_zero() {
                break;
            }
            rest = quo;
            e += 1;
        }
        if e > 0 {
            out.insert(qb, e);
        }
    }
    if rest.is_one() {
        debug_assert_eq!(&rebuild(&out), v);
        return Ok(out);
    }
    // The cofactor may have dropped into machine range.
    if let Some(n) = rest.to_u64() {
        factor_u64_into(n, &[], &mut out);
        debug_assert_eq!(&rebuild(&out), v);
        return Ok(out);
    }

    let mut budget = RHO_BIG_BUDGET;
    let mut stack = vec![rest];
    while let Some(m) = stack.pop() {
        if let Some(n) = m.to_u64() {
            factor_u64_into(n, &[], &mut out);
            continue;
        }
        if is_prime(&m) {
            *out.entry(m).or_insert(0) += 1;
            continue;
        }
        match rho_big(&m, &mut budget) {
            Some(d) => {
                stack.push(&m / &d);
                stack.push(d);
            }
            None => {
                // Fold anything still on the stack into the reported
                // cofactor so partial * cofactor = v holds exactly.
                let mut cofactor = m;
                for s in stack {
                    cofactor *= s;
                }
                return Err(FactorError::Timeout {
                    partial: out,
                    cofactor,
                });
            }
        }
    }
    debug_assert_eq!(&rebuild(&out), v);
    Ok(out)
}

fn rebuild(map: &BTreeMap<BigUint, u32>) -> BigUint {
    map.iter()
        .fold(BigUint::one(), |acc, (q, &e)| acc * q.pow(e))
}

/// Factors a u64 completely (no budget: rho on 64-bit inputs always
/// terminates fast). Trial primes may be empty when the caller already
/// stripped them.
fn factor_u64_into(mut n: u64, small_primes: &[u64], out: &mut BTreeMap<BigUint, u32>) {
    if n <= 1 {
        return;
    }
    for &q in small_primes {
        if q * q > n {
            break;
        }
        let mut e = 0u32;
        while n % q == 0 {
            n /= q;
            e += 1;
        }
        if e > 0 {
            out.insert(BigUint::from(q), e);
        }
    }
    if n == 1 {
        return;
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            *out.entry(BigUint::from(m)).or_insert(0) += 1;
            continue;
        }
        // Strip twos first; rho needs odd input.
        if m % 2 == 0 {
            *out.entry(BigUint::from(2u32)).or_insert(0) += 1;
            stack.push(m / 2);
            continue;
        }
        let d = rho_u64(m);
        stack.push(d);
        stack.push(m / d);
    }
}

/// Brent-cycle Pollard rho on odd composite n; returns a nontrivial
/// divisor. Retries with successive polynomial offsets until one works
/// (guaranteed eventually for composite n; tiny in practice).
fn rho_u64(n: u64) -> u64 {
    debug_assert!(n > 3 && n % 2 == 1 && !is_prime_u64(n));
    // Perfect squares defeat some parameter choices quickly; handle first.
    let r = n.isqrt();
    if r * r == n {
        return r;
    }
    for c in 1u64.. {
        if let Some(d) = rho_brent(n, c) {
            return d;
        }
    }
    unreachable!()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn rho_brent(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mulmod(x, x, n) + c) % n;
    let mut y: u64 = 2;
    let mut d;
    let mut x;
    let mut ys = y;
    let mut r: u64 = 1;
    let mut q: u64 = 1;
    loop {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        d = 1;
        while k < r && d == 1 {
            ys = y;
            let batch = 128.min(r - k);
            for _ in 0..batch {
                y = f(y);
                q = mulmod(q, x.abs_diff(y), n);
            }
            d = gcd_u64(q, n);
            k += batch;
        }
        r <<= 1;
        if d != 1 {
            break;
        }
        if r > (1 << 24) {
            return None; // give this offset up, caller retries
        }
    }
    if d == n {
        // Backtrack the last batch one step at a time.
        loop {
            ys = f(ys);
            d = gcd_u64(x.abs_diff(ys), n);
            if d > 1 {
                break;
            }
        }
    }
    if d > 1 && d < n {
        Some(d)
    } else {
        None
    }
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Floyd-cycle rho over big integers, budgeted. Returns None when the
/// budget runs dry.
fn rho_big(n: &BigUint, budget: &mut u64) -> Option<BigUint> {
    for c in 1u32..64 {
        let cb = BigUint::from(c);
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        loop {
            if *budget < 3 {
                return None;
            }
            *budget -= 3;
            x = (&x * &x + &cb) % n;
            y = (&y * &y + &cb) % n;
            y = (&y * &y + &cb) % n;
            let diff = if x > y { &x - &y } else { &y - &x };
            if diff.is_zero() {
                break; // cycle collapsed, try the next offset
            }
            let d = diff.gcd(n);
            if !d.is_one() {
                if &d == n {
                    break;
                }
                return Some(d);
            }
        }
    }
    None
}
