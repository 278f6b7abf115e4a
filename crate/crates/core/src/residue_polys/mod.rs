//! The reciprocity polynomial families and the harvest itself.
//!
//! Each family pairs a polynomial f with a window (x, Q]: reciprocity
//! guarantees that any prime q | f(n) outside a short exclusion list is a
//! k-th power residue mod p. Factoring f(1), ..., f(x) therefore yields
//! certified residues. The five families, split by the residue class of p:
//!
//! * `Quad1Mod4`   f(n) = (n + floor(sqrt p))^2 - p,    x = ceil(p^eps)
//! * `Quad3Mod4`   f(n) = a n^2 + b n + c (disc -p),    x = ceil(p^(eps/2))
//! * `Quad3Mod4Special` f(n) = n^2 + n + (1+p)/4,       x = ceil(p^delta)
//! * `Cubic`       f(n) = |L|(9n^2-1) + 27|M|(n^3-n),   x = ceil(p^(eps/3))
//! * `Biquadratic` f(n) = 6|L|(9n^3-n) + |M|(81n^4-54n^2+1), x = ceil(p^(eps/4))
//!
//! The cubic and biquadratic forms take |L|, |M| rather than the signed
//! pair: the underlying divisibility criteria are invariant under sign
//! flips of L and M (absorb them into n -> -n), and all-positive signs
//! keep f(n) >= 1 so logarithms and factorizations are well-defined.

mod factor;

pub use factor::{factor_value, FactorError};

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::bound_audit;
use crate::numtheory::{sieve_primes, NumTheoryError, PrimeModulus};
use crate::oracle::{ExclusionReason, ResidueReport, ResidueWitness};
use crate::poly::IntPoly;
use crate::representations::{
    build_form_3mod4, represent_4p_27, represent_p_4, FormOutcome, RepresentationError,
    RepresentationPair,
};
use crate::xreal::{Ratio, Real};

/// Hard cap on the effective search limit: evaluating and factoring more
/// values than this is a batch job, not a library call.
pub const X_LIMIT_CAP: u64 = 10_000_000;

/// Trial division bound used when factoring polynomial values.
const TRIAL_BOUND: u64 = 10_000;

fn trial_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(TRIAL_BOUND).expect("static sieve"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PolyCase {
    Quad1Mod4,
    Quad3Mod4,
    Quad3Mod4Special,
    Cubic,
    Biquadratic,
}

impl PolyCase {
    /// Which power-residue statement the harvest certifies.
    pub fn k(&self) -> u32 {
        match self {
            PolyCase::Quad1Mod4 | PolyCase::Quad3Mod4 | PolyCase::Quad3Mod4Special => 2,
            PolyCase::Cubic => 3,
            PolyCase::Biquadratic => 4,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            PolyCase::Quad1Mod4 | PolyCase::Quad3Mod4 | PolyCase::Quad3Mod4Special => 2,
            PolyCase::Cubic => 3,
            PolyCase::Biquadratic => 4,
        }
    }

    /// Constant W in the harvest window bound Q = ceil(W * p^(1/2+eps)).
    pub fn window_factor(&self) -> u32 {
        match self {
            PolyCase::Quad1Mod4 | PolyCase::Quad3Mod4 | PolyCase::Quad3Mod4Special => 2,
            PolyCase::Cubic => 72,
            PolyCase::Biquadratic => 42,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            PolyCase::Quad1Mod4 => "quadratic-1mod4",
            PolyCase::Quad3Mod4 => "quadratic-3mod4",
            PolyCase::Quad3Mod4Special => "quadratic-3mod4-special",
            PolyCase::Cubic => "cubic",
            PolyCase::Biquadratic => "biquadratic",
        }
    }

    /// Exponent e in the search limit x = ceil(p^e).
    pub fn x_exponent(&self, epsilon: Ratio, delta: Option<Ratio>) -> Ratio {
        match self {
            PolyCase::Quad1Mod4 => epsilon,
            PolyCase::Quad3Mod4 => epsilon.div_int(2),
            PolyCase::Quad3Mod4Special => delta.expect("special case carries delta"),
            PolyCase::Cubic => epsilon.div_int(3),
            PolyCase::Biquadratic => epsilon.div_int(4),
        }
    }
}

impl fmt::Display for PolyCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for PolyCase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadratic-1mod4" => Ok(PolyCase::Quad1Mod4),
            "quadratic-3mod4" => Ok(PolyCase::Quad3Mod4),
            "quadratic-3mod4-special" => Ok(PolyCase::Quad3Mod4Special),
            "cubic" => Ok(PolyCase::Cubic),
            "biquadratic" => Ok(PolyCase::Biquadratic),
            other => Err(format!("unknown case {other:?}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum PolyError {
    #[error("{case} requires p in a different residue class: {detail}")]
    WrongResidueClass { case: &'static str, detail: String },
    #[error("epsilon {eps} outside the supported range (0, {max}]")]
    EpsilonOutOfRange { eps: String, max: String },
    #[error("the special case requires --delta in (0, 1/2)")]
    DeltaRequired,
    #[error("delta {0} outside the open interval (0, 1/2)")]
    DeltaOutOfRange(String),
    #[error("search limit {limit} exceeds the cap {cap}")]
    LimitTooLarge { limit: BigUint, cap: u64 },
    #[error("constructed polynomial is not positive at n = {n}")]
    NonPositiveValue { n: u64 },
    #[error("fixed divisor {0} > 1 where the family admits none")]
    UnexpectedFixedDivisor(BigUint),
    #[error(transparent)]
    Representation(#[from] RepresentationError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

/// Optional knobs for [`build_poly_with`]. `delta` selects the special
/// case's window exponent; `x_override` replaces the search limit for desk
/// runs (which also widens the harvest window to (1, infinity) so small
/// worked examples keep their witnesses).
#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    pub delta: Option<Ratio>,
    pub x_override: Option<u64>,
}

/// A constructed polynomial family instance, ready to harvest.
#[derive(Clone, Debug)]
pub struct ReciprocityPolynomial {
    pub case: PolyCase,
    pub p: PrimeModulus,
    pub epsilon: Ratio,
    pub delta: Option<Ratio>,
    pub poly: IntPoly,
    /// ceil(p^e) for the case's exponent e, before any override.
    pub x_limit_theoretical: BigUint,
    /// Effective search limit actually used.
    pub x_limit: u64,
    /// Upper end of the harvest window (inclusive).
    pub q_bound: BigUint,
    /// True when an x override put the run in desk-window mode.
    pub desk_window: bool,
    /// (L, M) pair behind the cubic/biquadratic coefficients.
    pub rep: Option<RepresentationPair>,
    /// Form data behind the 3 mod 4 quadratic coefficients.
    pub form: Option<FormOutcome>,
    /// gcd of f(1), ..., f(30).
    pub fixed_divisor: BigUint,
    pub deviations: Vec<String>,
}

pub fn build_poly(
    case: PolyCase,
    p: &PrimeModulus,
    epsilon: Ratio,
) -> Result<ReciprocityPolynomial, PolyError> {
    build_poly_with(case, p, epsilon, BuildOptions::default())
}

pub fn build_poly_with(
    case: PolyCase,
    p: &PrimeModulus,
    epsilon: Ratio,
    opts: BuildOptions,
) -> Result<ReciprocityPolynomial, PolyError> {
    // The construction itself is sound for any eps in (0, 1/2]; the
    // narrower per-theorem ranges only affect thresholds, which note the
    // overshoot instead of refusing to run.
    if epsilon.is_zero() || !epsilon.le(1, 2) {
        return Err(PolyError::EpsilonOutOfRange {
            eps: epsilon.to_string(),
            max: "1/2".into(),
        });
    }
    let mut deviations = Vec::new();
    let mut rep = None;
    let mut form = None;

    let wrong_class = |detail: String| PolyError::WrongResidueClass {
        case: case.label(),
        detail,
    };

    let (poly, epsilon, delta) = match case {
        PolyCase::Quad1Mod4 => {
            if p.mod4() != 1 {
                return Err(wrong_class(format!("{} = 3 mod 4", p.value())));
            }
            let r = crate::numtheory::isqrt(p.value());
            let r = BigInt::from(r);
            let pi = BigInt::from(p.value().clone());
            (
                IntPoly::new(vec![&r * &r - &pi, 2 * &r, BigInt::one()]),
                epsilon,
                None,
            )
        }
        PolyCase::Quad3Mod4 => {
            if p.mod4() != 3 {
                return Err(wrong_class(format!("{} = 1 mod 4", p.value())));
            }
            let out = build_form_3mod4(p, epsilon)?;
            if out.via_fallback {
                deviations.push(
                    "leading coefficient from the reduced-form fallback (window empty at this size)"
                        .into(),
                );
            } else {
                deviations.push(
                    "leading coefficient capped below sqrt(p)/4 so c = (b^2+p)/4a exceeds sqrt(p)"
                        .into(),
                );
            }
            let f = IntPoly::new(vec![
                BigInt::from(out.form.c.clone()),
                out.form.b.clone(),
                BigInt::from(out.form.a.clone()),
            ]);
            form = Some(out);
            (f, epsilon, None)
        }
        PolyCase::Quad3Mod4Special => {
            if p.mod4() != 3 {
                return Err(wrong_class(format!("{} = 1 mod 4", p.value())));
            }
            let delta = opts.delta.ok_or(PolyError::DeltaRequired)?;
            if delta.is_zero() || !delta.lt(1, 2) {
                return Err(PolyError::DeltaOutOfRange(delta.to_string()));
            }
            // This family is the eps = 1/2 endpoint by definition; the
            // caller's eps is irrelevant here.
            let c0 = (p.value() + 1u32) >> 2;
            (
                IntPoly::new(vec![BigInt::from(c0), BigInt::one(), BigInt::one()]),
                Ratio::new(1, 2),
                Some(delta),
            )
        }
        PolyCase::Cubic => {
            if p.mod3() != 1 {
                return Err(wrong_class(format!(
                    "{} = {} mod 3",
                    p.value(),
                    p.mod3()
                )));
            }
            let pair = represent_4p_27(p)?;
            let l = BigInt::from(pair.l.magnitude().clone());
            let m = BigInt::from(pair.m.magnitude().clone());
            let f = IntPoly::new(vec![-&l, -27 * &m, 9 * &l, 27 * &m]);
            rep = Some(pair);
            (f, epsilon, None)
        }
        PolyCase::Biquadratic => {
            if p.mod4() != 1 {
                return Err(wrong_class(format!("{} = 3 mod 4", p.value())));
            }
            let pair = represent_p_4(p)?;
            let l = BigInt::from(pair.l.magnitude().clone());
            let m = BigInt::from(pair.m.magnitude().clone());
            let f = IntPoly::new(vec![
                m.clone(),
                -6 * &l,
                -54 * &m,
                54 * &l,
                81 * &m,
            ]);
            rep = Some(pair);
            (f, epsilon, None)
        }
    };

    let p_real = Real::from_biguint(p.value());
    let x_exp = case.x_exponent(epsilon, delta);
    let x_limit_theoretical = p_real.pow(&x_exp.as_real()).ceil_outward();

    let desk_window = opts.x_override.is_some();
    let x_limit = match opts.x_override {
        Some(x) => {
            deviations.push(format!(
                "search limit overridden to {x}; harvest window widened to (1, inf)"
            ));
            x.max(1)
        }
        None => x_limit_theoretical
            .to_u64()
            .filter(|&x| x <= X_LIMIT_CAP)
            .ok_or_else(|| PolyError::LimitTooLarge {
                limit: x_limit_theoretical.clone(),
                cap: X_LIMIT_CAP,
            })?,
    };

    let q_bound = if case == PolyCase::Quad3Mod4Special {
        // eps = 1/2 makes the window bound exactly 2p; integer arithmetic
        // keeps it exact for p of any size.
        p.value() << 1
    } else {
        let half_plus = &Real::from_f64(0.5) + &epsilon.as_real();
        (&p_real.pow(&half_plus) * &Real::from_u64(case.window_factor() as u64)).ceil_outward()
    };

    // Positivity across the search range (prefix plus endpoint; every
    // family is provably increasing past its first values).
    let probe_end = x_limit.min(1000);
    for n in (1..=probe_end).chain([x_limit]) {
        if poly.eval_u64(n) < BigInt::one() {
            return Err(PolyError::NonPositiveValue { n });
        }
    }

    // Fixed divisor: gcd of the first 30 values. The (n+r)^2 - p family
    // never has one (consecutive values differ by odd numbers and take
    // both parities); the others can pick up a 2 or 3 tied to the parity
    // of the coefficients, which the exclusion rules already discard.
    let mut fixed = BigUint::zero();
    for n in 1..=30u64 {
        fixed = fixed.gcd(poly.eval_u64(n).magnitude());
        if fixed.is_one() {
            break;
        }
    }
    let fixed_divisor = fixed;
    if case == PolyCase::Quad1Mod4 && !fixed_divisor.is_one() {
        return Err(PolyError::UnexpectedFixedDivisor(fixed_divisor));
    }
    if !fixed_divisor.is_one() {
        deviations.push(format!(
            "fixed divisor {fixed_divisor} (every value shares it; covered by the exclusion rules)"
        ));
    }

    Ok(ReciprocityPolynomial {
        case,
        p: p.clone(),
        epsilon,
        delta,
        poly,
        x_limit_theoretical,
        x_limit,
        q_bound,
        desk_window,
        rep,
        form,
        fixed_divisor,
        deviations,
    })
}

impl ReciprocityPolynomial {
    pub fn evaluate(&self, n: u64) -> BigUint {
        let v = self.poly.eval_u64(n);
        debug_assert!(v >= BigInt::one(), "positivity invariant");
        v.magnitude().clone()
    }

    /// Exclusion verdict for a harvested prime q, in rule priority order.
    fn exclusion_for(&self, q: &BigUint) -> Option<ExclusionReason> {
        if q == self.p.value() {
            return Some(ExclusionReason::EqualsP);
        }
        // The cubic and biquadratic divisibility criteria have q = 2, 3 as
        // genuine side conditions (denominators 3M and 4(x^3 - x) force q
        // odd and q != 3). A prime dividing L or M itself still certifies:
        // the congruence collapses to a statement the direct oracle
        // confirms, so only 2 and 3 are dropped here.
        if matches!(self.case, PolyCase::Cubic | PolyCase::Biquadratic)
            && (*q == BigUint::from(2u32) || *q == BigUint::from(3u32))
        {
            return Some(ExclusionReason::DividesLM);
        }
        if !self.desk_window {
            if q.to_u64().map_or(false, |q| q <= self.x_limit) {
                return Some(ExclusionReason::SmallPrime);
            }
            if *q > self.q_bound {
                return Some(ExclusionReason::OutOfWindow);
            }
        }
        None
    }

    /// Factors f(n) for n in [n_lo, n_hi] and returns one witness per
    /// (q, n) pair. Ranges can be harvested independently and merged; the
    /// result is sorted by (q, n). Returns the witnesses plus the list of
    /// n whose value could not be fully factored.
    pub fn collect_witnesses_range(
        &self,
        n_lo: u64,
        n_hi: u64,
    ) -> (Vec<ResidueWitness>, Vec<u64>) {
        let mut witnesses = Vec::new();
        let mut failed = Vec::new();
        for n in n_lo..=n_hi.min(self.x_limit) {
            let v = self.evaluate(n);
            let factors = match factor_value(&v, trial_primes()) {
                Ok(f) => f,
                Err(FactorError::Timeout { partial, .. }) => {
                    failed.push(n);
                    partial
                }
            };
            for (q, val) in factors {
                let reason = self.exclusion_for(&q);
                witnesses.push(ResidueWitness {
                    q,
                    n,
                    valuation: val,
                    excluded: reason.is_some(),
                    reason,
                });
            }
        }
        witnesses.sort_by(|a, b| a.q.cmp(&b.q).then(a.n.cmp(&b.n)));
        (witnesses, failed)
    }
}

/// Runs the harvest over the full range [1, x_limit] and assembles the
/// report: witnesses, exclusions, the deduplicated harvested set, and the
/// threshold/regime context. Oracle certification is a separate pass
/// ([`crate::oracle::verify_report`]); a fresh report always carries
/// `oracle_verified = false`.
pub fn collect_witnesses(f: &ReciprocityPolynomial) -> ResidueReport {
    let (witnesses, failed) = f.collect_witnesses_range(1, f.x_limit);
    let mut deviations = f.deviations.clone();
    for n in &failed {
        deviations.push(format!("value at n = {n} not fully factored"));
    }

    let mut harvested: Vec<BigUint> = witnesses
        .iter()
        .filter(|w| !w.excluded)
        .map(|w| w.q.clone())
        .collect();
    harvested.sort();
    harvested.dedup();

    let (threshold, threshold_note) =
        bound_audit::report_threshold(f.case, f.p.value(), f.epsilon, f.delta);
    if let Some(note) = threshold_note {
        deviations.push(note);
    }
    let regime = bound_audit::guaranteed_regime(f.case, f.p.value(), f.epsilon);
    let meets_threshold = harvested.len() as f64 >= threshold - 1e-12;

    ResidueReport {
        p: f.p.value().clone(),
        case: f.case,
        epsilon: f.epsilon,
        delta: f.delta,
        x_limit_theoretical: f.x_limit_theoretical.clone(),
        x_limit: f.x_limit,
        q_bound: f.q_bound.clone(),
        desk_window: f.desk_window,
        harvested_count: harvested.len() as u64,
        harvested,
        witnesses,
        complete: failed.is_empty(),
        oracle_verified: false,
        residue_checks: Vec::new(),
        threshold,
        meets_threshold,
        guaranteed_regime: regime.stated,
        guaranteed_regime_alt: regime.alternate,
        deviations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::from_u64(p).unwrap()
    }

    fn eps(n: u64, d: u64) -> Ratio {
        Ratio::new(n, d)
    }

    #[test]
    fn quad_1mod4_construction() {
        // p = 17, r = 4: (n+4)^2 - 17 = n^2 + 8n - 1.
        let f = build_poly(PolyCase::Quad1Mod4, &pm(17), eps(1, 4)).unwrap();
        assert_eq!(f.poly, IntPoly::from_i64(&[-1, 8, 1]));
        assert_eq!(f.x_limit, 3); // ceil(17^0.25) = ceil(2.03)
        assert_eq!(f.q_bound, BigUint::from(17u32)); // ceil(2 * 17^0.75) = ceil(16.75)
        assert!(f.fixed_divisor.is_one());
        assert_eq!(f.evaluate(1), BigUint::from(8u32));
        assert_eq!(f.evaluate(2), BigUint::from(19u32));
        assert_eq!(f.evaluate(3), BigUint::from(32u32));
        assert!(matches!(
            build_poly(PolyCase::Quad1Mod4, &pm(23), eps(1, 4)),
            Err(PolyError::WrongResidueClass { .. })
        ));
    }

    #[test]
    fn quad_3mod4_construction() {
        // p = 23 falls back to the reduced form (2, 1, 3): 2n^2 + n + 3.
        let f = build_poly(PolyCase::Quad3Mod4, &pm(23), eps(1, 5)).unwrap();
        assert_eq!(f.poly, IntPoly::from_i64(&[3, 1, 2]));
        assert!(f.form.as_ref().unwrap().via_fallback);
        // x = ceil(23^(1/10)) = 2; Q = ceil(2 * 23^(7/10)) = ceil(17.99).
        assert_eq!(f.x_limit, 2);
        assert_eq!(f.q_bound, BigUint::from(18u32));
    }

    #[test]
    fn special_case_construction() {
        // p = 10007: f = n^2 + n + 2502, x = ceil(10007^(1/4)) = 10.
        let p = pm(10007);
        let f = build_poly_with(
            PolyCase::Quad3Mod4Special,
            &p,
            eps(1, 5), // ignored: the family pins eps = 1/2
            BuildOptions {
                delta: Some(eps(1, 4)),
                x_override: None,
            },
        )
        .unwrap();
        assert_eq!(f.epsilon, eps(1, 2));
        assert_eq!(f.poly, IntPoly::from_i64(&[2502, 1, 1]));
        assert_eq!(f.x_limit, 11); // 10007^0.25 = 10.0017...
        assert_eq!(f.q_bound, BigUint::from(2 * 10007u32));
        assert!(matches!(
            build_poly(PolyCase::Quad3Mod4Special, &p, eps(1, 5)),
            Err(PolyError::DeltaRequired)
        ));
        let bad = build_poly_with(
            PolyCase::Quad3Mod4Special,
            &p,
            eps(1, 5),
            BuildOptions {
                delta: Some(eps(1, 2)),
                x_override: None,
            },
        );
        assert!(matches!(bad, Err(PolyError::DeltaOutOfRange(_))));
    }

    #[test]
    fn cubic_construction_and_example_values() {
        // p = 13: (L, M) = (-5, 1), so f = 5(9n^2-1) + 27(n^3-n), f(1) = 40.
        let f = build_poly(PolyCase::Cubic, &pm(13), eps(1, 2)).unwrap();
        assert_eq!(f.poly, IntPoly::from_i64(&[-5, -27, 45, 27]));
        assert_eq!(f.evaluate(1), BigUint::from(40u32));
        assert_eq!(f.x_limit, 2); // ceil(13^(1/6))
        assert_eq!(f.q_bound, BigUint::from(936u32)); // 72 * 13
        assert!(matches!(
            build_poly(PolyCase::Cubic, &pm(5), eps(1, 2)),
            Err(PolyError::WrongResidueClass { .. })
        ));
    }

    #[test]
    fn biquadratic_construction_and_example_values() {
        // p = 13: (L, M) = (3, 1), f = 18(9n^3-n) + (81n^4-54n^2+1), f(1) = 172.
        let f = build_poly(PolyCase::Biquadratic, &pm(13), eps(1, 2)).unwrap();
        assert_eq!(f.poly, IntPoly::from_i64(&[1, -18, -54, 162, 81]));
        assert_eq!(f.evaluate(1), BigUint::from(172u32));
        assert_eq!(f.x_limit, 2); // ceil(13^(1/8)) = ceil(1.378)
        assert_eq!(f.q_bound, BigUint::from(546u32)); // 42 * 13
    }

    #[test]
    fn epsilon_bounds_enforced() {
        assert!(matches!(
            build_poly(PolyCase::Quad1Mod4, &pm(17), eps(3, 5)),
            Err(PolyError::EpsilonOutOfRange { .. })
        ));
        assert!(matches!(
            build_poly(PolyCase::Cubic, &pm(13), eps(0, 1)),
            Err(PolyError::EpsilonOutOfRange { .. })
        ));
        // eps = 1/2 is the inclusive top of the supported range.
        assert!(build_poly(PolyCase::Cubic, &pm(13), eps(1, 2)).is_ok());
    }

    #[test]
    fn desk_example_p17_harvest() {
        // Search limit 3 with the desk window: harvested {2, 19} from
        // f(1) = 8 = 2^3, f(2) = 19, f(3) = 32 = 2^5.
        let f = build_poly_with(
            PolyCase::Quad1Mod4,
            &pm(17),
            eps(1, 4),
            BuildOptions {
                delta: None,
                x_override: Some(3),
            },
        )
        .unwrap();
        assert!(f.desk_window);
        let report = collect_witnesses(&f);
        assert!(report.complete);
        assert_eq!(
            report.harvested,
            vec![BigUint::from(2u32), BigUint::from(19u32)]
        );
        assert_eq!(report.harvested_count, 2);
        // Witness triples (q, n, valuation), sorted by (q, n).
        let triples: Vec<(u64, u64, u32)> = report
            .witnesses
            .iter()
            .map(|w| (w.q.to_u64().unwrap(), w.n, w.valuation))
            .collect();
        assert_eq!(triples, vec![(2, 1, 3), (2, 3, 5), (19, 2, 1)]);
        assert!(report.witnesses.iter().all(|w| !w.excluded));
    }

    #[test]
    fn cubic_p13_exclusions() {
        let f = build_poly(PolyCase::Cubic, &pm(13), eps(1, 2)).unwrap();
        let report = collect_witnesses(&f);
        // f(1) = 40 = 2^3 * 5, f(2) = 337 (prime). q = 2 is a criterion
        // side condition; 5 and 337 land in (2, 936].
        assert_eq!(
            report.harvested,
            vec![BigUint::from(5u32), BigUint::from(337u32)]
        );
        let two = report
            .witnesses
            .iter()
            .find(|w| w.q == BigUint::from(2u32))
            .unwrap();
        assert_eq!(two.reason, Some(ExclusionReason::DividesLM));
    }

    #[test]
    fn biquadratic_p13_window_exclusion() {
        let f = build_poly(PolyCase::Biquadratic, &pm(13), eps(1, 2)).unwrap();
        let report = collect_witnesses(&f);
        // f(1) = 172 = 2^2 * 43, f(2) = 2341 (prime, above Q = 546).
        assert_eq!(report.harvested, vec![BigUint::from(43u32)]);
        let big = report
            .witnesses
            .iter()
            .find(|w| w.q == BigUint::from(2341u32))
            .unwrap();
        assert_eq!(big.reason, Some(ExclusionReason::OutOfWindow));
        let two = report
            .witnesses
            .iter()
            .find(|w| w.q == BigUint::from(2u32))
            .unwrap();
        assert_eq!(two.reason, Some(ExclusionReason::DividesLM));
    }

    #[test]
    fn small_prime_exclusion_applies() {
        // p = 1009 = 1 mod 4, eps = 1/4: x = ceil(1009^(1/4)) = 6, so any
        // harvested q <= 6 must carry the small-prime exclusion.
        let f = build_poly(PolyCase::Quad1Mod4, &pm(1009), eps(1, 4)).unwrap();
        assert_eq!(f.x_limit, 6);
        let report = collect_witnesses(&f);
        for w in &report.witnesses {
            if w.q.to_u64().map_or(false, |q| q <= 6) {
                assert!(w.excluded, "q={} n={}", w.q, w.n);
                assert_eq!(w.reason, Some(ExclusionReason::SmallPrime));
            }
        }
        assert!(report
            .harvested
            .iter()
            .all(|q| q.to_u64().map_or(true, |q| q > 6)));
    }

    #[test]
    fn range_harvests_merge() {
        let f = build_poly(PolyCase::Quad1Mod4, &pm(1009), eps(1, 4)).unwrap();
        let (full, _) = f.collect_witnesses_range(1, f.x_limit);
        let (mut a, _) = f.collect_witnesses_range(1, 3);
        let (b, _) = f.collect_witnesses_range(4, f.x_limit);
        a.extend(b);
        a.sort_by(|u, v| u.q.cmp(&v.q).then(u.n.cmp(&v.n)));
        assert_eq!(a, full);
    }

    #[test]
    fn valuations_are_exact() {
        for (case, p, e) in [
            (PolyCase::Quad1Mod4, 1009, eps(1, 4)),
            (PolyCase::Quad3Mod4, 1019, eps(1, 4)),
            (PolyCase::Cubic, 1021, eps(1, 2)),
            (PolyCase::Biquadratic, 1013, eps(1, 2)),
        ] {
            let f = build_poly(case, &pm(p), e).unwrap();
            let report = collect_witnesses(&f);
            assert!(report.complete);
            for w in &report.witnesses {
                let v = BigInt::from(f.evaluate(w.n));
                let qk = BigInt::from(w.q.pow(w.valuation));
                assert!(
                    (&v % &qk).is_zero(),
                    "{case}: q^val does not divide f({})",
                    w.n
                );
                assert!(
                    !(&v % (qk * BigInt::from(w.q.clone()))).is_zero(),
                    "{case}: valuation not maximal at f({})",
                    w.n
                );
            }
        }
    }

    #[test]
    fn fixed_divisors_recorded_for_even_forms() {
        // p = 7: special family is n^2 + n + 2, always even.
        let f = build_poly_with(
            PolyCase::Quad3Mod4Special,
            &pm(7),
            eps(1, 2),
            BuildOptions {
                delta: Some(eps(1, 4)),
                x_override: None,
            },
        )
        .unwrap();
        assert_eq!(f.fixed_divisor, BigUint::from(2u32));
        assert!(f
            .deviations
            .iter()
            .any(|d| d.contains("fixed divisor 2")));
        // p = 31: (L, M) = (4, 2) gives f(n) = 4(9n^2-1) + 54(n^3-n),
        // and 2n(1+n^2) = 0 mod 4 for every n, so the divisor is 4.
        let f = build_poly(PolyCase::Cubic, &pm(31), eps(1, 2)).unwrap();
        assert_eq!(f.fixed_divisor, BigUint::from(4u32));
    }

    #[test]
    fn limit_cap_enforced() {
        // p = 2^61 - 1 with delta just under 1/2 asks for p^0.49 ~ 10^9
        // values, past the cap.
        let p = pm((1 << 61) - 1);
        let out = build_poly_with(
            PolyCase::Quad3Mod4Special,
            &p,
            eps(1, 2),
            BuildOptions {
                delta: Some(eps(49, 100)),
                x_override: None,
            },
        );
        assert!(matches!(out, Err(PolyError::LimitTooLarge { .. })));
    }
}
