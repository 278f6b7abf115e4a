//! Jacobi symbol via the binary reciprocity algorithm.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::NumTheoryError;

/// Jacobi symbol (a/n) for odd n >= 1. Returns 0, 1, or -1.
pub fn jacobi_symbol(a: &BigInt, n: &BigUint) -> Result<i32, NumTheoryError> {
    if n.is_even() {
        return Err(NumTheoryError::EvenModulus);
    }
    if let (Some(a64), Some(n64)) = (reduce_to_u64(a, n), n.to_u64()) {
        return Ok(jacobi_u64(a64, n64));
    }
    let n_int = BigInt::from(n.clone());
    let mut a = a.mod_floor(&n_int).to_biguint().expect("non-negative");
    let mut n = n.clone();
    let mut sign = 1i32;
    while !a.is_zero() {
        // Pull out factors of two; (2/n) = -1 iff n = 3, 5 mod 8.
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz % 2 == 1 {
            let n8 = (&n % 8u32).to_u8().unwrap();
            if n8 == 3 || n8 == 5 {
                sign = -sign;
            }
        }
        a >>= tz;
        // Quadratic reciprocity flip: both odd now.
        let a4 = (&a % 4u32).to_u8().unwrap();
        let n4 = (&n % 4u32).to_u8().unwrap();
        if a4 == 3 && n4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    if n.is_one() {
        Ok(sign)
    } else {
        Ok(0)
    }
}

fn reduce_to_u64(a: &BigInt, n: &BigUint) -> Option<u64> {
    let n64 = n.to_u64()?;
    let r = a.mod_floor(&BigInt::from(n64));
    r.to_u64()
}

pub(crate) fn jacobi_u64(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut sign = 1i32;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn j(a: i64, n: u64) -> i32 {
        jacobi_symbol(&BigInt::from(a), &BigUint::from(n)).unwrap()
    }

    /// Euler-criterion reference for prime modulus.
    fn euler(a: i64, p: u64) -> i32 {
        let am = a.rem_euclid(p as i64) as u64;
        if am == 0 {
            return 0;
        }
        let r = super::super::primality::powmod_u64(am, (p - 1) / 2, p);
        if r == 1 {
            1
        } else {
            -1
        }
    }

    #[test]
    fn matches_euler_criterion_for_primes() {
        for p in [3u64, 5, 7, 11, 13, 8191, 1_000_003] {
            for a in -50i64..50 {
                assert_eq!(j(a, p), euler(a, p), "a={a}, p={p}");
            }
        }
    }

    #[test]
    fn composite_modulus_multiplicativity() {
        // (a/15) = (a/3)(a/5)
        for a in -30i64..30 {
            assert_eq!(j(a, 15), j(a, 3) * j(a, 5), "a={a}");
        }
        assert_eq!(j(6, 15), 0); // shared factor
    }

    #[test]
    fn even_modulus_rejected() {
        assert_eq!(
            jacobi_symbol(&BigInt::from(3), &BigUint::from(8u32)),
            Err(NumTheoryError::EvenModulus)
        );
    }

    #[test]
    fn big_path_matches_small_path() {
        // Force the BigUint branch with a modulus above 2^64 that is a
        // product of known primes, then check multiplicativity transfers.
        let p = BigUint::from((1u128 << 89) - 1); // Mersenne prime
        for a in [-7i64, -2, 2, 3, 5, 1_000_000_007] {
            let s = jacobi_symbol(&BigInt::from(a), &p).unwrap();
            assert!(s == 1 || s == -1, "a={a} gave {s}");
        }
        // (x^2 / p) = 1 always.
        let x = BigInt::from(123_456_789u64);
        assert_eq!(jacobi_symbol(&(&x * &x), &p).unwrap(), 1);
        // (-1/p) for p = 2^89 - 1 = 3 mod 4 must be -1.
        assert_eq!(jacobi_symbol(&BigInt::from(-1), &p).unwrap(), -1);
    }
}
