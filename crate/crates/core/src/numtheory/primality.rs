//! Miller-Rabin primality: deterministic below 2^64, fixed-base beyond.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Witness set that decides primality for every n < 2^64 (first twelve
/// primes; the smallest composite they all miss exceeds 3.3 * 10^24).
const U64_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Number of fixed pseudo-random bases used above 2^64. Error probability
/// is bounded by 4^-40 per call.
const BIG_ROUNDS: u64 = 40;

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    'base: for &a in &U64_BASES {
        let mut x = powmod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod_u64(x, x, n);
            if x == n - 1 {
                continue 'base;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    // Above u64: strip tiny factors, then fixed-seed Miller-Rabin.
    for &p in &U64_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().expect("n > 1");
    let d = &nm1 >> s;
    let mut state: u64 = 0x9e3779b97f4a7c15;
    for _ in 0..BIG_ROUNDS {
        // splitmix64 stream; bases are deterministic so results reproduce.
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        let a = BigUint::from((z ^ (z >> 31)) | 2);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        let mut witness = true;
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == nm1 {
                witness = false;
                break;
            }
        }
        if witness {
            return false;
        }
    }
    true
}

pub(crate) fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod_u64(mut base: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc: u64 = 1;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, base, m);
        }
        base = mulmod_u64(base, base, m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert!(!is_prime_u64(0));
        assert!(!is_prime_u64(1));
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(!is_prime_u64(4));
        assert!(is_prime_u64(97));
    }

    #[test]
    fn carmichael_numbers_rejected() {
        for n in [561u64, 1105, 1729, 2465, 2821, 6601, 8911, 10585, 15841] {
            assert!(!is_prime_u64(n), "{n} is Carmichael, not prime");
        }
    }

    #[test]
    fn known_large_primes() {
        assert!(is_prime_u64((1 << 61) - 1)); // Mersenne
        assert!(is_prime_u64(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime_u64(18_446_744_073_709_551_555));
    }

    #[test]
    fn agrees_with_trial_division() {
        let trial = |n: u64| {
            if n < 2 {
                return false;
            }
            let mut d = 2;
            while d * d <= n {
                if n % d == 0 {
                    return false;
                }
                d += 1;
            }
            true
        };
        for n in 0..5_000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "n={n}");
        }
    }

    #[test]
    fn biguint_path() {
        // 2^89 - 1 is a Mersenne prime; 2^89 + 1 = 3 * 179 * ...
        let p = (BigUint::one() << 89) - 1u32;
        assert!(is_prime(&p));
        assert!(!is_prime(&(&p + 2u32)));
        // Product of two 40-bit primes.
        let a = BigUint::from(1_099_511_627_791u64);
        let b = BigUint::from(1_099_511_627_803u64);
        assert!(!is_prime(&(&a * &b)));
        assert!(is_prime(&a));
    }
}
