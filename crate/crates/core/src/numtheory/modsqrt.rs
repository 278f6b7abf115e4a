//! Square roots modulo an odd prime (Tonelli-Shanks, with the p = 3 mod 4
//! exponentiation shortcut).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{jacobi_symbol, NumTheoryError, PrimeModulus};

/// Both square roots of a mod p, sorted ascending. a = 0 gives (0, 0).
/// Fails with `NotAResidue` when a is a non-residue.
pub fn sqrt_mod_prime(a: &BigInt, p: &PrimeModulus) -> Result<(BigUint, BigUint), NumTheoryError> {
    let pv = p.value();
    let am = a
        .mod_floor(&BigInt::from(pv.clone()))
        .to_biguint()
        .expect("non-negative");
    if am.is_zero() {
        return Ok((BigUint::zero(), BigUint::zero()));
    }
    if jacobi_symbol(a, pv)? != 1 {
        return Err(NumTheoryError::NotAResidue(a.to_string()));
    }
    let r = if p.mod4() == 3 {
        // r = a^((p+1)/4): squaring gives a^((p+1)/2) = a * a^((p-1)/2) = a.
        let e = (pv + 1u32) >> 2;
        am.modpow(&e, pv)
    } else {
        tonelli_shanks(&am, pv)
    };
    let other = pv - &r;
    debug_assert_eq!((&r * &r) % pv, am);
    if r <= other {
        Ok((r, other))
    } else {
        Ok((other, r))
    }
}

/// Tonelli-Shanks for p = 1 mod 4. Caller guarantees a is a nonzero residue.
fn tonelli_shanks(a: &BigUint, p: &BigUint) -> BigUint {
    let one = BigUint::one();
    let pm1 = p - &one;
    let s = pm1.trailing_zeros().expect("p odd, p-1 even");
    let q = &pm1 >> s;

    // Any quadratic non-residue serves as the 2-group generator; scan from 2.
    let mut z = BigUint::from(2u32);
    loop {
        if jacobi_symbol(&BigInt::from(z.clone()), p).expect("odd prime") == -1 {
            break;
        }
        z += 1u32;
    }

    let mut m = s;
    let mut c = z.modpow(&q, p);
    let mut t = a.modpow(&q, p);
    let mut r = a.modpow(&((&q + 1u32) >> 1), p);
    while !t.is_one() {
        // Least i with t^(2^i) = 1; strictly decreases m each round.
        let mut i = 0u64;
        let mut t2 = t.clone();
        while !t2.is_one() {
            t2 = (&t2 * &t2) % p;
            i += 1;
        }
        let b = c.modpow(&(BigUint::one() << (m - i - 1)), p);
        m = i;
        c = (&b * &b) % p;
        t = (&t * &c) % p;
        r = (&r * &b) % p;
    }
    r
}
