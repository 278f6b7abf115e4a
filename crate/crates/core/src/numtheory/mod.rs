//! Modular arithmetic kernels: primality, sieving, Jacobi symbols, square
//! roots mod p, k-th power residue tests, and root counting mod prime powers.

mod hensel;
mod jacobi;
mod modsqrt;
mod primality;
mod sieve;

pub use hensel::hensel_root_count;
pub use jacobi::jacobi_symbol;
pub use modsqrt::sqrt_mod_prime;
pub use primality::{is_prime, is_prime_u64};
pub use sieve::sieve_primes;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NumTheoryError {
    #[error("modulus {0} is not an odd prime")]
    NotOddPrime(String),
    #[error("modulus must be odd")]
    EvenModulus,
    #[error("{0} is not a square modulo the prime")]
    NotAResidue(String),
    #[error("value is divisible by the modulus")]
    DivisibleByModulus,
    #[error("polynomial vanishes identically modulo {0}")]
    DegeneratePolynomial(u64),
    #[error("work bound exceeded: {0}")]
    CapacityExceeded(String),
    #[error("prime power {q}^{k} does not fit the supported range")]
    PrimePowerTooLarge { q: u64, k: u32 },
}

/// An odd prime modulus with its residue classes mod 3 and mod 4 cached.
/// Every public construction path validates primality, so downstream code
/// can lean on the invariant instead of re-checking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeModulus {
    p: BigUint,
    p_u64: Option<u64>,
    mod3: u8,
    mod4: u8,
}

impl PrimeModulus {
    pub fn new(p: BigUint) -> Result<Self, NumTheoryError> {
        if p.is_even() || p.is_one() || !is_prime(&p) {
            return Err(NumTheoryError::NotOddPrime(p.to_string()));
        }
        let mod3 = (&p % 3u32).to_u8().unwrap();
        let mod4 = (&p % 4u32).to_u8().unwrap();
        Ok(PrimeModulus {
            p_u64: p.to_u64(),
            p,
            mod3,
            mod4,
        })
    }

    pub fn from_u64(p: u64) -> Result<Self, NumTheoryError> {
        Self::new(BigUint::from(p))
    }

    pub fn value(&self) -> &BigUint {
        &self.p
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.p_u64
    }

    /// p mod 3 (0 only for p = 3 itself).
    pub fn mod3(&self) -> u8 {
        self.mod3
    }

    pub fn mod4(&self) -> u8 {
        self.mod4
    }

    pub fn bits(&self) -> u64 {
        self.p.bits()
    }
}

/// Floor square root of a non-negative big integer.
pub fn isqrt(v: &BigUint) -> BigUint {
    v.sqrt()
}

/// Is q a k-th power residue mod p? Decided by the order test
/// q^((p-1)/gcd(k, p-1)) = 1 (mod p), which for prime p is equivalent to
/// q being in the image of the k-th power map on nonzero residues.
pub fn kth_power_residue(q: &BigInt, p: &PrimeModulus, k: u32) -> Result<bool, NumTheoryError> {
    assert!(k >= 1);
    let qm = q.mod_floor(&BigInt::from(p.value().clone()));
    let qm = qm.magnitude();
    if qm.is_zero() {
        return Err(NumTheoryError::DivisibleByModulus);
    }
    let pm1 = p.value() - 1u32;
    let g = pm1.gcd(&BigUint::from(k));
    let e = &pm1 / &g;
    Ok(qm.modpow(&e, p.value()).is_one())
}
