//! Root counting modulo prime powers by level-by-level lifting.

use super::{NumTheoryError, primality::powmod_u64};
use crate::poly::{horner_u64, IntPoly};

/// Lifted-root budget per level. Singular roots multiply candidates by q,
/// so pathological inputs are cut off rather than allowed to blow up.
const MAX_ROOTS: usize = 1 << 20;

/// Number of roots of f mod q^k, for prime q. Simple roots (f'(r) nonzero
/// mod q) lift uniquely level by level; singular roots are enumerated by
/// trying all q refinements. Exact, not an upper bound.
pub fn hensel_root_count(f: &IntPoly, q: u64, k: u32) -> Result<u64, NumTheoryError> {
    assert!(k >= 1);
    if q < 2 {
        return Err(NumTheoryError::NotOddPrime(q.to_string()));
    }
    // q^k must fit comfortably in u64 for the reduced Horner evaluation.
    let modulus = checked_pow(q, k).ok_or(NumTheoryError::PrimePowerTooLarge { q, k })?;

    let fq = f.reduced_mod(q);
    if fq.iter().all(|&c| c == 0) {
        return Err(NumTheoryError::DegeneratePolynomial(q));
    }
    let f_full = f.reduced_mod(modulus);
    let dq = f.derivative().reduced_mod(q);

    // Roots mod q by direct scan. Harvested primes are small by
    // construction, so the linear pass is the whole cost.
    let mut roots: Vec<u64> = (0..q).filter(|&r| horner_u64(&fq, r, q) == 0).collect();

    let mut level_mod = q;
    for _ in 1..k {
        let next_mod = level_mod * q;
        let mut lifted = Vec::with_capacity(roots.len());
        for &r in &roots {
            let fr = horner_u64(&f_full, r, next_mod);
            let fd = horner_u64(&dq, r, q);
            if fd != 0 {
                // Unique refinement: r + t * level_mod with
                // t = -(f(r)/level_mod) * f'(r)^-1 mod q.
                let quotient = (fr / level_mod) % q;
                let inv = powmod_u64(fd, q - 2, q);
                let t = (q - mulmod(quotient, inv, q)) % q;
                lifted.push(r + t * level_mod);
            } else if fr == 0 {
                // Singular root that stays a root: every refinement works.
                for t in 0..q {
                    lifted.push(r + t * level_mod);
                }
            }
            // Singular with f(r) != 0 mod next level: no lift survives.
            if lifted.len() > MAX_ROOTS {
                return Err(NumTheoryError::CapacityExceeded(format!(
                    "more than {MAX_ROOTS} roots while lifting mod {q}^{k}"
                )));
            }
        }
        roots = lifted;
        level_mod = next_mod;
    }
    Ok(roots.len() as u64)
}

fn checked_pow(q: u64, k: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(q)?;
    }
    if acc <= (1 << 63) {
        Some(acc)
    } else {
        None
    }
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}
