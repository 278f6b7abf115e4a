//! Extended-precision reals and exact rational exponents.
//!
//! Window bounds like ceil(p^eps) and thresholds like (1/4)p^(eps/2) must
//! not flip on floating-point noise, so everything analytic runs on 192-bit
//! floats ([`Real`]) and integer conversions round outward (never shrinking
//! a window below its true value). Exponents arrive as exact rationals
//! ([`Ratio`]): 0.2 parsed as 1/5 really is <= 1/5, which an f64 is not.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigUint;
use num_traits::{One, Zero};

/// Working precision in bits. Far above the 80-bit floor the audits need;
/// the outward bump in [`Real::ceil_outward`] is sized against it.
pub const PRECISION_BITS: usize = 192;

const RM: RoundingMode = RoundingMode::None;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// A 192-bit float. Thin wrapper so callers never touch rounding modes or
/// the shared constants cache directly.
#[derive(Clone, Debug)]
pub struct Real(BigFloat);

impl Real {
    pub fn from_u64(v: u64) -> Self {
        Real(BigFloat::from_u64(v, PRECISION_BITS))
    }

    pub fn from_i64(v: i64) -> Self {
        Real(BigFloat::from_i64(v, PRECISION_BITS))
    }

    pub fn from_f64(v: f64) -> Self {
        Real(BigFloat::from_f64(v, PRECISION_BITS))
    }

    pub fn from_biguint(v: &BigUint) -> Self {
        if let Ok(small) = u64::try_from(v) {
            return Real::from_u64(small);
        }
        // Decimal round-trip is exact up to the 192-bit rounding.
        let s = v.to_str_radix(10);
        Real(with_consts(|cc| {
            BigFloat::parse(&s, Radix::Dec, PRECISION_BITS, RM, cc)
        }))
    }

    pub fn from_ratio(r: Ratio) -> Self {
        &Real::from_u64(r.num) / &Real::from_u64(r.den)
    }

    pub fn zero() -> Self {
        Real::from_u64(0)
    }

    pub fn one() -> Self {
        Real::from_u64(1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative() && !self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        !self.0.is_inf() && !self.0.is_nan()
    }

    /// Natural logarithm. The argument must be positive.
    pub fn ln(&self) -> Self {
        assert!(
            !self.is_zero() && !self.is_negative(),
            "ln of a non-positive value"
        );
        Real(with_consts(|cc| self.0.ln(PRECISION_BITS, RM, cc)))
    }

    pub fn exp(&self) -> Self {
        Real(with_consts(|cc| self.0.exp(PRECISION_BITS, RM, cc)))
    }

    /// self^e for a positive base (goes through exp(e ln self)).
    pub fn pow(&self, e: &Real) -> Self {
        Real(with_consts(|cc| self.0.pow(&e.0, PRECISION_BITS, RM, cc)))
    }

    pub fn abs(&self) -> Self {
        Real(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        &Real::one() / self
    }

    /// Round-to-nearest f64 view (infinite when out of range).
    pub fn to_f64(&self) -> f64 {
        if self.0.is_zero() {
            return 0.0;
        }
        if self.0.is_nan() {
            return f64::NAN;
        }
        if self.0.is_inf() {
            return if self.0.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            };
        }
        let (words, prec, sign, exp, _) = self.0.as_raw_parts().expect("finite float");
        // value = (sum words[i] 2^(64 i)) * 2^(exp - prec); top two words carry
        // far more than f64 needs.
        let top = words.len() - 1;
        let mut mant = words[top] as f64;
        let mut shift = exp as i64 - prec as i64 + 64 * top as i64;
        if top > 0 {
            mant = mant * 18446744073709551616.0 + words[top - 1] as f64;
            shift -= 64;
        }
        let mut out = mant * pow2(shift);
        if sign == Sign::Neg {
            out = -out;
        }
        out
    }

    /// Exact floor as a big integer. The value must be non-negative and finite.
    fn floor_biguint_exact(&self) -> BigUint {
        assert!(!self.is_negative() && self.is_finite());
        if self.0.is_zero() {
            return BigUint::zero();
        }
        let (words, prec, _sign, exp, _) = self.0.as_raw_parts().expect("finite float");
        if exp <= 0 {
            return BigUint::zero(); // value < 1
        }
        let mut m = BigUint::zero();
        for (i, w) in words.iter().enumerate() {
            m |= BigUint::from(*w) << (64 * i);
        }
        let exp = exp as i64;
        let prec = prec as i64;
        if exp >= prec {
            m << (exp - prec) as usize
        } else {
            m >> (prec - exp) as usize
        }
    }

    /// Ceiling as a big integer, stable against rounding drift: a value
    /// within 2^-80 (relative) of an integer is taken to *be* that integer.
    /// The expressions feeding this sit a handful of 192-bit operations
    /// deep, so their drift is below 2^-120; genuinely non-integer inputs
    /// (roots of a prime, say) sit far outside the snap band. Without the
    /// snap, a bound that is exactly 72p could come back as 72p + 1.
    pub fn ceil_outward(&self) -> BigUint {
        assert!(!self.is_negative(), "ceiling of a negative value");
        if let Some(n) = self.snap_to_integer() {
            return n;
        }
        self.floor_biguint_exact() + BigUint::one()
    }

    /// Floor with the same integer snap as [`Real::ceil_outward`]. Used for
    /// exclusive lower window bounds.
    pub fn floor_inward(&self) -> BigUint {
        assert!(!self.is_negative());
        if let Some(n) = self.snap_to_integer() {
            return n;
        }
        self.floor_biguint_exact()
    }

    fn snap_to_integer(&self) -> Option<BigUint> {
        let fl = self.floor_biguint_exact();
        let scale = self.abs();
        let scale = if scale.cmp_real(&Real::one()) == Ordering::Less {
            Real::one()
        } else {
            scale
        };
        let tol = &scale * &Real::from_f64(2f64.powi(-80));
        let lo = Real::from_biguint(&fl);
        if (self - &lo).abs().cmp_real(&tol) != Ordering::Greater {
            return Some(fl);
        }
        let next = &fl + BigUint::one();
        let hi = Real::from_biguint(&next);
        if (&hi - self).abs().cmp_real(&tol) != Ordering::Greater {
            return Some(next);
        }
        None
    }

    pub fn cmp_real(&self, other: &Real) -> Ordering {
        self.0.partial_cmp(&other.0).expect("comparable floats")
    }

    /// self <= rhs, with a 1e-12 relative tolerance in rhs's favor. All
    /// pass/fail inequality audits go through here so a value sitting on the
    /// boundary cannot flip on rounding noise.
    pub fn le_with_tol(&self, rhs: &Real) -> bool {
        let scale = rhs.abs();
        let scale = if scale.cmp_real(&Real::one()) == Ordering::Less {
            Real::one()
        } else {
            scale
        };
        let slack = &scale * &Real::from_f64(1e-12);
        self.cmp_real(&(rhs + &slack)) != Ordering::Greater
    }
}

fn pow2(e: i64) -> f64 {
    // f64::powi saturates cleanly to 0 / inf outside the exponent range.
    2f64.powi(e.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                Real(with_consts(|_| self.0.$method(&rhs.0, PRECISION_BITS, RM)))
            }
        }
    };
}

real_binop!(Add, add);
real_binop!(Sub, sub);
real_binop!(Mul, mul);
real_binop!(Div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real(self.0.clone().neg())
    }
}

/// Exact non-negative rational, reduced, used for the exponents eps and
/// delta. Parsed from decimal ("0.2") or fraction ("1/5") notation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = gcd_u64(num.max(1), den); // gcd(0, d) = d; keep 0/1 canonical
        let g = if num == 0 { den } else { g };
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn as_real(&self) -> Real {
        Real::from_ratio(*self)
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Exact comparison against another rational (cross-multiplication in
    /// 128 bits; no rounding anywhere).
    pub fn le(&self, num: u64, den: u64) -> bool {
        (self.num as u128) * (den as u128) <= (num as u128) * (self.den as u128)
    }

    pub fn lt(&self, num: u64, den: u64) -> bool {
        (self.num as u128) * (den as u128) < (num as u128) * (self.den as u128)
    }

    /// self / k, exactly.
    pub fn div_int(&self, k: u64) -> Ratio {
        Ratio::new(self.num, self.den.checked_mul(k).expect("ratio overflow"))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

#[derive(Debug, PartialEq, Eq)]
pub struct RatioParseError(pub String);

impl fmt::Display for RatioParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a decimal or fraction: {:?}", self.0)
    }
}

impl std::error::Error for RatioParseError {}

impl FromStr for Ratio {
    type Err = RatioParseError;

    /// Accepts "0.25", ".25", "3", and "1/4".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || RatioParseError(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let num: u64 = n.trim().parse().map_err(|_| bad())?;
            let den: u64 = d.trim().parse().map_err(|_| bad())?;
            if den == 0 {
                return Err(bad());
            }
            return Ok(Ratio::new(num, den));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            if frac.len() > 18 {
                return Err(bad());
            }
            let int: u64 = if int.is_empty() {
                0
            } else {
                int.parse().map_err(|_| bad())?
            };
            let den = 10u64.pow(frac.len() as u32);
            let frac: u64 = frac.parse().map_err(|_| bad())?;
            let num = int
                .checked_mul(den)
                .and_then(|v| v.checked_add(frac))
                .ok_or_else(bad)?;
            return Ok(Ratio::new(num, den));
        }
        let num: u64 = s.parse().map_err(|_| bad())?;
        Ok(Ratio::new(num, 1))
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
