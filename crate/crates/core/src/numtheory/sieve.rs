//! Plain sieve of Eratosthenes over an odd-only bitset.

use super::NumTheoryError;

/// Upper bound on sieve size; beyond this the harvest ranges are wrong
/// anyway and the caller should have rejected the parameters earlier.
const SIEVE_BUDGET: u64 = 1 << 31;

/// All primes <= limit, ascending.
pub fn sieve_primes(limit: u64) -> Result<Vec<u64>, NumTheoryError> {
    if limit > SIEVE_BUDGET {
        return Err(NumTheoryError::CapacityExceeded(format!(
            "sieve limit {limit} exceeds {SIEVE_BUDGET}"
        )));
    }
    if limit < 2 {
        return Ok(vec![]);
    }
    if limit == 2 {
        return Ok(vec![2]);
    }
    // Bit i represents the odd number 2i + 3.
    let n_odd = ((limit - 1) / 2) as usize;
    let mut composite = vec![false; n_odd];
    let mut i = 0usize;
    loop {
        let p = 2 * i as u64 + 3;
        if p * p > limit {
            break;
        }
        if !composite[i] {
            let mut j = (p * p - 3) / 2;
            while (j as usize) < n_odd {
                composite[j as usize] = true;
                j += p;
            }
        }
        i += 1;
    }
    let mut primes = Vec::with_capacity(n_odd / 2 + 1);
    primes.push(2);
    for (i, &c) in composite.iter().enumerate() {
        if !c {
            primes.push(2 * i as u64 + 3);
        }
    }
    Ok(primes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::is_prime_u64;

    #[test]
    fn small_limits() {
        assert_eq!(sieve_primes(0).unwrap(), Vec::<u64>::new());
        assert_eq!(sieve_primes(1).unwrap(), Vec::<u64>::new());
        assert_eq!(sieve_primes(2).unwrap(), vec![2]);
        assert_eq!(sieve_primes(3).unwrap(), vec![2, 3]);
        assert_eq!(sieve_primes(30).unwrap(), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }

    #[test]
    fn counts_and_membership() {
        let primes = sieve_primes(100_000).unwrap();
        assert_eq!(primes.len(), 9592); // pi(10^5)
        assert!(primes.iter().all(|&p| is_prime_u64(p)));
        // Inclusive upper endpoint.
        let primes = sieve_primes(97).unwrap();
        assert_eq!(*primes.last().unwrap(), 97);
    }

    #[test]
    fn budget_enforced() {
        assert!(matches!(
            sieve_primes(SIEVE_BUDGET + 1),
            Err(NumTheoryError::CapacityExceeded(_))
        ));
    }
}
