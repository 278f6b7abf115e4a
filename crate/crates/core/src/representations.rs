//! Integer representations attached to a prime: 4p = L^2 + 27M^2,
//! p = L^2 + 4M^2, and binary quadratic forms of discriminant -p.
//!
//! The cubic and biquadratic harvests need the pair (L, M) because the
//! polynomial coefficients are built from it; the p = 3 mod 4 quadratic
//! harvest needs a reduced form (a, b, c) with a prime and sitting in a
//! prescribed size window. Representations are found by Cornacchia-style
//! descent, then normalized to the sign conventions the polynomial
//! constructions assume. Every constructor re-checks its defining identity
//! exactly before returning.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::numtheory::{
    is_prime, isqrt, jacobi_symbol, sqrt_mod_prime, NumTheoryError, PrimeModulus,
};
use crate::xreal::{Ratio, Real};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RepresentationError {
    #[error("prime is in the wrong residue class for this representation: {0}")]
    WrongResidueClass(String),
    #[error("descent failed to produce a representation for {0}")]
    NoRepresentation(String),
    #[error("no prime a with (-p/a) = 1 in the window ({lo}, {hi}]")]
    WindowExhausted { lo: String, hi: String },
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

/// Which identity the pair (l, m) satisfies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepKind {
    /// 4p = L^2 + 27 M^2, normalized to L = 1 mod 3, M > 0.
    FourP27,
    /// p = L^2 + 4 M^2, normalized to L > 0 odd, M > 0.
    POne4,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationPair {
    pub kind: RepKind,
    pub l: BigInt,
    pub m: BigInt,
}

impl RepresentationPair {
    /// max(|L|, |M|), the size scale the counting bounds are phrased in.
    pub fn max_abs(&self) -> BigUint {
        self.l.magnitude().max(self.m.magnitude()).clone()
    }

    pub fn l_dominant(&self) -> bool {
        self.l.magnitude() >= self.m.magnitude()
    }
}

/// The pair (L, M) with 4p = L^2 + 27M^2, for p = 1 mod 3. Found by the
/// modified Cornacchia descent: take x0 with x0^2 = -27 mod p, matched to
/// the parity of D = -27 mod 2, and run the Euclidean remainder chain on
/// (2p, x0) down to the first remainder below 2 sqrt(p).
pub fn represent_4p_27(p: &PrimeModulus) -> Result<RepresentationPair, RepresentationError> {
    if p.mod3() != 1 {
        return Err(RepresentationError::WrongResidueClass(format!(
            "{} = {} mod 3, need 1",
            p.value(),
            p.mod3()
        )));
    }
    let pv = p.value();
    let four_p = pv << 2;
    let (r1, r2) = sqrt_mod_prime(&BigInt::from(-27), p)?;
    // D = -27 is odd, so the root must be odd too; the two roots have
    // opposite parities since p is odd.
    let mut x0 = if r1.is_odd() { r1 } else { r2 };
    if x0.is_even() {
        // Only possible for tiny p where the roots coincide; keep descent
        // well-defined anyway.
        x0 = pv - &x0;
    }
    let mut a = pv << 1;
    let mut b = x0;
    let c = isqrt(&four_p);
    while b > c {
        let t = &a % &b;
        a = std::mem::replace(&mut b, t);
    }
    // b is now the candidate L magnitude: 4p - b^2 should be 27 M^2.
    let t = &four_p - &b * &b;
    let (q27, r27) = t.div_rem(&BigUint::from(27u32));
    if !r27.is_zero() {
        return Err(RepresentationError::NoRepresentation(pv.to_string()));
    }
    let m = isqrt(&q27);
    if &m * &m != q27 {
        return Err(RepresentationError::NoRepresentation(pv.to_string()));
    }
    // Normalize: L = 1 mod 3 fixes the sign of L; M > 0 by choice.
    let l_mag = BigInt::from(b);
    let l = if (&l_mag % BigInt::from(3)).to_u8() == Some(1) {
        l_mag
    } else {
        -l_mag
    };
    let m = BigInt::from(m);
    let pair = RepresentationPair {
        kind: RepKind::FourP27,
        l,
        m,
    };
    debug_assert_eq!(
        BigInt::from(four_p),
        &pair.l * &pair.l + 27 * (&pair.m * &pair.m)
    );
    Ok(pair)
}

/// The pair (L, M) with p = L^2 + 4M^2, for p = 1 mod 4. Classic
/// Cornacchia with d = 1 (p = x^2 + y^2, exactly one of x, y even), the
/// even one halved into M.
pub fn represent_p_4(p: &PrimeModulus) -> Result<RepresentationPair, RepresentationError> {
    if p.mod4() != 1 {
        return Err(RepresentationError::WrongResidueClass(format!(
            "{} = {} mod 4, need 1",
            p.value(),
            p.mod4()
        )));
    }
    let pv = p.value();
    let (r1, r2) = sqrt_mod_prime(&BigInt::from(-1), p)?;
    let mut a = pv.clone();
    let mut b = r1.max(r2);
    let c = isqrt(pv);
    while b > c {
        let t = &a % &b;
        a = std::mem::replace(&mut b, t);
    }
    let rem = pv - &b * &b;
    let other = isqrt(&rem);
    if &other * &other != rem {
        return Err(RepresentationError::NoRepresentation(pv.to_string()));
    }
    // x odd, y even; p odd forces exactly one of each.
    let (x, y) = if b.is_odd() { (b, other) } else { (other, b) };
    debug_assert!(x.is_odd() && y.is_even());
    let pair = RepresentationPair {
        kind: RepKind::POne4,
        l: BigInt::from(x),
        m: BigInt::from(y >> 1),
    };
    debug_assert_eq!(
        BigInt::from(pv.clone()),
        &pair.l * &pair.l + 4 * (&pair.m * &pair.m)
    );
    Ok(pair)
}

/// A positive-definite binary quadratic form a n^2 + b n + c of
/// discriminant b^2 - 4ac = -p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryQuadraticForm {
    pub a: BigUint,
    pub b: BigInt,
    pub c: BigUint,
}

impl BinaryQuadraticForm {
    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - 4 * BigInt::from(self.a.clone()) * BigInt::from(self.c.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormOutcome {
    pub form: BinaryQuadraticForm,
    /// True when the form came from the small-p reduced-forms fallback
    /// rather than the windowed prime search.
    pub via_fallback: bool,
    /// The (lo, hi] window the leading coefficient was searched in.
    pub window: (BigUint, BigUint),
}

/// Primes below this get the exhaustive reduced-form fallback when the
/// windowed search comes up empty: the window (p^(1/2-eps/2), p^(1/2)/4)
/// is only guaranteed to contain a usable prime for large p.
const FORM_FALLBACK_BOUND: u64 = 10_000;

/// A form a n^2 + b n + c, disc -p, with a prime in the window
/// (p^(1/2 - eps/2), p^(1/2) / 4) and (-p/a) = 1, b odd, b < a. For
/// p < 10^4 a failed window scan falls back to the largest leading
/// coefficient among all reduced forms of discriminant -p.
pub fn build_form_3mod4(
    p: &PrimeModulus,
    eps: Ratio,
) -> Result<FormOutcome, RepresentationError> {
    if p.mod4() != 3 {
        return Err(RepresentationError::WrongResidueClass(format!(
            "{} = {} mod 4, need 3",
            p.value(),
            p.mod4()
        )));
    }
    let pv = p.value();
    let p_real = Real::from_biguint(pv);
    // Window (p^(1/2 - eps/2), p^(1/2)/4), exclusive below and above.
    let half_minus = &Real::from_f64(0.5) - &Real::from_ratio(eps.div_int(2));
    let lo = p_real.pow(&half_minus).floor_inward();
    let hi_real = &p_real.pow(&Real::from_f64(0.5)) / &Real::from_u64(4);
    let hi = hi_real.ceil_outward();

    let neg_p = -BigInt::from(pv.clone());
    let mut a = &lo + BigUint::one();
    while a < hi {
        if is_prime(&a) && jacobi_symbol(&neg_p, &a)? == 1 {
            if let Some(form) = form_with_leading(pv, &a) {
                return Ok(FormOutcome {
                    form,
                    via_fallback: false,
                    window: (lo, hi),
                });
            }
        }
        a += BigUint::one();
    }

    if pv.to_u64().map_or(false, |v| v < FORM_FALLBACK_BOUND) {
        if let Some(form) = largest_reduced_form(pv.to_u64().unwrap()) {
            return Ok(FormOutcome {
                form,
                via_fallback: true,
                window: (lo, hi),
            });
        }
    }
    Err(RepresentationError::WindowExhausted {
        lo: lo.to_string(),
        hi: hi.to_string(),
    })
}

/// Completes a leading coefficient a (odd prime, (-p/a) = 1) to a form of
/// discriminant -p: b the odd square root of -p mod a, c = (b^2 + p) / 4a.
fn form_with_leading(p: &BigUint, a: &BigUint) -> Option<BinaryQuadraticForm> {
    let pm = PrimeModulus::new(a.clone()).ok()?;
    let (r1, r2) = sqrt_mod_prime(&BigInt::from(-(BigInt::from(p.clone()))), &pm).ok()?;
    // -p = 1 mod 4 and b^2 = -p mod 4a needs b odd; the two roots mod a
    // have opposite parities unless a | p (impossible: a < p prime).
    let b = if r1.is_odd() { r1 } else { r2 };
    if b.is_even() {
        return None;
    }
    let b2p = &b * &b + p;
    let four_a = a << 2;
    let (c, rem) = b2p.div_rem(&four_a);
    if !rem.is_zero() {
        return None;
    }
    let form = BinaryQuadraticForm {
        a: a.clone(),
        b: BigInt::from(b),
        c,
    };
    debug_assert_eq!(form.discriminant(), -BigInt::from(p.clone()));
    Some(form)
}

/// Exhaustive reduced forms of discriminant -p (p = 3 mod 4, p < 10^4):
/// odd b with |b| <= a <= c and 4ac = b^2 + p; returns the one with the
/// largest a.
fn largest_reduced_form(p: u64) -> Option<BinaryQuadraticForm> {
    let mut best: Option<(u64, u64, u64)> = None;
    let mut b = 1u64;
    // Reduction forces b^2 <= ac <= c^2 and b^2 + p = 4ac >= 4b^2.
    while b * b <= p / 3 {
        let n = b * b + p;
        if n % 4 == 0 {
            let ac = n / 4;
            let mut a = b.max(1);
            while a * a <= ac {
                if ac % a == 0 {
                    let c = ac / a;
                    debug_assert!(c >= a && a >= b);
                    if best.map_or(true, |(ba, _, _)| a > ba) {
                        best = Some((a, b, c));
                    }
                }
                a += 1;
            }
        }
        b += 2;
    }
    best.map(|(a, b, c)| BinaryQuadraticForm {
        a: BigUint::from(a),
        b: BigInt::from(b),
        c: BigUint::from(c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::from_u64(p).unwrap()
    }

    fn pair64(pair: &RepresentationPair) -> (i64, i64) {
        (pair.l.to_i64().unwrap(), pair.m.to_i64().unwrap())
    }

    #[test]
    fn four_p_representations() {
        // 4 * 31 = 124 = 4^2 + 27 * 2^2, L = 4 = 1 mod 3.
        assert_eq!(pair64(&represent_4p_27(&pm(31)).unwrap()), (4, 2));
        // 4 * 7 = 28 = 1 + 27.
        assert_eq!(pair64(&represent_4p_27(&pm(7)).unwrap()), (1, 1));
        // 4 * 13 = 52 = 25 + 27; 5 = 2 mod 3 flips to L = -5.
        assert_eq!(pair64(&represent_4p_27(&pm(13)).unwrap()), (-5, 1));
        assert!(matches!(
            represent_4p_27(&pm(11)),
            Err(RepresentationError::WrongResidueClass(_))
        ));
    }

    #[test]
    fn p_one_four_representations() {
        // 13 = 9 + 4: L = 3, M = 1. 17 = 1 + 16: L = 1, M = 2.
        assert_eq!(pair64(&represent_p_4(&pm(13)).unwrap()), (3, 1));
        assert_eq!(pair64(&represent_p_4(&pm(17)).unwrap()), (1, 2));
        assert!(matches!(
            represent_p_4(&pm(19)),
            Err(RepresentationError::WrongResidueClass(_))
        ));
    }

    #[test]
    fn identities_hold_across_a_range() {
        // Exhaustive against brute-force search for every odd prime in
        // range, both identities.
        let brute_4p27 = |p: u64| -> (i64, i64) {
            let target = 4 * p as i64;
            let mut m = 1i64;
            loop {
                let rest = target - 27 * m * m;
                if rest <= 0 {
                    panic!("no representation for {p}");
                }
                let l = (rest as f64).sqrt() as i64;
                for cand in [l - 1, l, l + 1] {
                    if cand > 0 && cand * cand == rest {
                        let l = if cand % 3 == 1 { cand } else { -cand };
                        return (l, m);
                    }
                }
                m += 1;
            }
        };
        for p in (5..3000u64).filter(|&v| crate::numtheory::is_prime_u64(v)) {
            let pmod = pm(p);
            if p % 3 == 1 {
                let pair = represent_4p_27(&pmod).unwrap();
                let (l, m) = pair64(&pair);
                assert_eq!(4 * p as i64, l * l + 27 * m * m, "p={p}");
                assert_eq!(l.rem_euclid(3), 1, "p={p}");
                assert!(m > 0);
                // Representation is unique up to signs, so the brute pair
                // must match exactly after normalization.
                assert_eq!((l, m), brute_4p27(p), "p={p}");
                // Size: 4p = L^2 + 27M^2 forces max(|L|, |M|)^2 >= 4p / 28.
                assert!(pair.max_abs().pow(2) * 7u32 >= BigUint::from(p), "p={p}");
            }
            if p % 4 == 1 {
                let pair = represent_p_4(&pmod).unwrap();
                let (l, m) = pair64(&pair);
                assert_eq!(p as i64, l * l + 4 * m * m, "p={p}");
                assert!(l > 0 && l % 2 == 1 && m > 0, "p={p}");
                // p = L^2 + 4M^2 forces max(|L|, |M|)^2 >= p / 5.
                assert!(pair.max_abs().pow(2) * 5u32 >= BigUint::from(p), "p={p}");
            }
        }
    }

    #[test]
    fn forms_for_small_primes() {
        // p = 23: window is empty at this size, fallback finds the reduced
        // form 2n^2 + n + 3 (disc 1 - 24 = -23).
        let out = build_form_3mod4(&pm(23), Ratio::new(1, 5)).unwrap();
        assert!(out.via_fallback);
        assert_eq!(out.form.a, BigUint::from(2u32));
        assert_eq!(out.form.b, BigInt::from(1));
        assert_eq!(out.form.c, BigUint::from(3u32));
        // p = 7: principal-adjacent form n^2 + n + 2.
        let out = build_form_3mod4(&pm(7), Ratio::new(1, 5)).unwrap();
        assert_eq!(out.form.a, BigUint::one());
        assert_eq!(out.form.b, BigInt::one());
        assert_eq!(out.form.c, BigUint::from(2u32));
    }

    #[test]
    fn forms_have_correct_discriminant_and_window() {
        for p in (7..2000u64).filter(|&v| v % 4 == 3 && crate::numtheory::is_prime_u64(v)) {
            let out = build_form_3mod4(&pm(p), Ratio::new(1, 4)).unwrap();
            assert_eq!(
                out.form.discriminant(),
                BigInt::from(-(p as i64)),
                "p={p}"
            );
            assert!(out.form.b.is_odd());
            if !out.via_fallback {
                let a = &out.form.a;
                assert!(a > &out.window.0 && a < &out.window.1, "p={p}");
                assert!(is_prime(a), "p={p}");
            }
        }
    }

    #[test]
    fn windowed_search_hits_for_large_p() {
        // The window (p^(1/2 - eps/2), sqrt(p)/4) is nonempty once
        // p^(eps/2) > 4; for eps = 1/5 that means p beyond ~10^6. At
        // p = 10^8 + 7 the window is roughly (1585, 2500).
        let p = pm(100_000_007);
        let out = build_form_3mod4(&p, Ratio::new(1, 5)).unwrap();
        assert!(!out.via_fallback);
        assert!(is_prime(&out.form.a));
        assert!(&out.form.a > &out.window.0 && &out.form.a < &out.window.1);
        assert_eq!(
            out.form.discriminant(),
            -BigInt::from(p.value().clone())
        );
    }

    #[test]
    fn window_exhausted_over_fallback_bound() {
        // eps tiny shrinks the window to near-empty; p above the fallback
        // bound must surface the structured error.
        let p = pm(10007);
        let r = build_form_3mod4(&p, Ratio::new(1, 1000));
        assert!(matches!(r, Err(RepresentationError::WindowExhausted { .. })));
    }
}
