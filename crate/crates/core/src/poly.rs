//! Dense integer polynomials in one variable.
//!
//! Coefficients are stored ascending (index = power of n). Everything the
//! harvest touches goes through [`IntPoly`]: exact evaluation over BigInt,
//! derivatives for distinguishing simple from singular roots, and reduced
//! evaluation mod a u64 for the brute-force root counters.

use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Zero};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    /// Builds from ascending coefficients, dropping leading zeros. The zero
    /// polynomial is represented by an empty coefficient vector.
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        IntPoly::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial mapped to 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * n + c;
        }
        acc
    }

    pub fn eval_u64(&self, n: u64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::new(vec![]);
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Gcd of all coefficients (0 for the zero polynomial).
    pub fn content(&self) -> BigUint {
        let mut g = BigUint::zero();
        for c in &self.coeffs {
            g = g.gcd(c.magnitude());
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// Coefficients reduced into [0, m). Length is degree+1 (never empty:
    /// the zero polynomial reduces to [0]).
    pub fn reduced_mod(&self, m: u64) -> Vec<u64> {
        assert!(m > 0);
        if self.coeffs.is_empty() {
            return vec![0];
        }
        let mb = BigInt::from(m);
        self.coeffs
            .iter()
            .map(|c| {
                let r = c.mod_floor(&mb);
                u64::try_from(r.magnitude()).expect("residue fits u64")
            })
            .collect()
    }
}

/// Is f squarefree as a polynomial over the field of q elements? Decided
/// by gcd(f mod q, f' mod q) being constant. Returns false when f reduces
/// to a constant mod q (degree arguments do not apply there).
pub fn squarefree_mod(f: &IntPoly, q: u64) -> bool {
    assert!(q >= 2 && q < (1 << 63));
    let a = trim(f.reduced_mod(q));
    if a.len() <= 1 {
        return false;
    }
    let mut b: Vec<u64> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mulmod(c, (i as u64) % q, q))
        .collect();
    b = trim(b);
    // Euclidean gcd over F_q; (a, b) -> (b, a mod b) until b vanishes.
    // Trimmed vectors are empty iff they are the zero polynomial.
    let mut a = a;
    while !b.is_empty() {
        let r = poly_rem_mod(&a, &b, q);
        a = b;
        b = r;
    }
    a.len() == 1
}

fn trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Remainder of a / b over F_q (b nonzero, q prime).
fn poly_rem_mod(a: &[u64], b: &[u64], q: u64) -> Vec<u64> {
    debug_assert!(!b.is_empty() && *b.last().unwrap() != 0);
    let mut r: Vec<u64> = a.to_vec();
    let inv_lead = powmod(*b.last().unwrap(), q - 2, q);
    while r.len() >= b.len() {
        let k = r.len() - b.len();
        let scale = mulmod(*r.last().unwrap(), inv_lead, q);
        for (i, &bc) in b.iter().enumerate() {
            let sub = mulmod(scale, bc, q);
            r[k + i] = (r[k + i] + q - sub) % q;
        }
        debug_assert_eq!(*r.last().unwrap(), 0);
        r.pop();
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Horner evaluation of reduced coefficients at n, mod m. Products go
/// through u128 so any m < 2^64 is safe.
pub fn horner_u64(coeffs: &[u64], n: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    let n = (n as u128) % (m as u128);
    let mut acc: u128 = 0;
    for &c in coeffs.iter().rev() {
        acc = (acc * n + (c as u128) % (m as u128)) % (m as u128);
    }
    acc as u64
}

impl fmt::Display for IntPoly {
    /// Descending powers, signs folded into separators: "n^2 + 8n - 1".
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.magnitude();
            if first {
                if c.sign() == Sign::Minus {
                    write!(f, "-")?;
                }
                first = false;
            } else if c.sign() == Sign::Minus {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let unit_coeff = mag.is_one() && i > 0;
            if !unit_coeff {
                write!(f, "{mag}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "n")?,
                _ => write!(f, "n^{i}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_and_derivative() {
        // (n+4)^2 - 17 = n^2 + 8n - 1
        let f = IntPoly::from_i64(&[-1, 8, 1]);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.eval_u64(0), BigInt::from(-1));
        assert_eq!(f.eval_u64(3), BigInt::from(32));
        assert_eq!(f.eval(&BigInt::from(-4)), BigInt::from(-17));
        let d = f.derivative();
        assert_eq!(d, IntPoly::from_i64(&[8, 2]));
        assert_eq!(d.derivative(), IntPoly::from_i64(&[2]));
        assert!(d.derivative().derivative().is_zero());
    }

    #[test]
    fn normalization_and_content() {
        let f = IntPoly::from_i64(&[6, 0, -9, 0, 0]);
        assert_eq!(f.degree(), 2);
        assert_eq!(f.leading(), BigInt::from(-9));
        assert_eq!(f.content(), BigUint::from(3u32));
        assert_eq!(IntPoly::from_i64(&[0, 0]).content(), BigUint::zero());
    }

    #[test]
    fn reduction_matches_exact_eval() {
        let f = IntPoly::from_i64(&[-1, 8, 1]);
        let m = 97u64;
        let red = f.reduced_mod(m);
        assert_eq!(red, vec![96, 8, 1]);
        for n in 0..200u64 {
            let exact = f.eval_u64(n).mod_floor(&BigInt::from(m));
            assert_eq!(
                BigInt::from(horner_u64(&red, n, m)),
                exact,
                "mismatch at n={n}"
            );
        }
    }

    #[test]
    fn squarefree_detection() {
        // n^2 + 8n - 1 has discriminant 68 = 2^2 * 17: squarefree away
        // from 2 and 17, singular at both.
        let f = IntPoly::from_i64(&[-1, 8, 1]);
        assert!(squarefree_mod(&f, 3));
        assert!(squarefree_mod(&f, 5));
        assert!(squarefree_mod(&f, 97));
        assert!(!squarefree_mod(&f, 2));
        assert!(!squarefree_mod(&f, 17));
        // (n+1)^2 is a square everywhere.
        let g = IntPoly::from_i64(&[1, 2, 1]);
        assert!(!squarefree_mod(&g, 5));
        assert!(!squarefree_mod(&g, 101));
        // n^3 - n = n(n-1)(n+1): squarefree for q >= 5, collapses mod 3
        // to n^3 - n = (n^3 - n), derivative 3n^2 - 1 = -1, gcd constant.
        let h = IntPoly::from_i64(&[0, -1, 0, 1]);
        assert!(squarefree_mod(&h, 5));
        assert!(squarefree_mod(&h, 3));
        assert!(!squarefree_mod(&h, 2)); // n^3 + n = n(n+1)^2 mod 2
        // Constants and the zero polynomial are never counted.
        assert!(!squarefree_mod(&IntPoly::from_i64(&[7]), 5));
        assert!(!squarefree_mod(&IntPoly::from_i64(&[]), 5));
        // Degree drop: 5n^2 + n mod 5 = n, squarefree as a linear poly.
        let k = IntPoly::from_i64(&[0, 1, 5]);
        assert!(squarefree_mod(&k, 5));
    }

    #[test]
    fn display_forms() {
        assert_eq!(IntPoly::from_i64(&[-1, 8, 1]).to_string(), "n^2 + 8n - 1");
        assert_eq!(
            IntPoly::from_i64(&[5, 0, -1]).to_string(),
            "-n^2 + 5"
        );
        assert_eq!(IntPoly::from_i64(&[]).to_string(), "0");
        assert_eq!(IntPoly::from_i64(&[7]).to_string(), "7");
        assert_eq!(
            IntPoly::from_i64(&[-3, -27, 9, 27]).to_string(),
            "27n^3 + 9n^2 - 27n - 3"
        );
    }
}
