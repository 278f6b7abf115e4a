//! Brute-force ground truth for the harvest pipeline.
//!
//! Everything here decides the same questions as the reciprocity route but
//! by direct computation: enumerate the residue set outright, recheck each
//! harvested prime with the order test, replay the factorization log sum
//! as an exact integer product, and count polynomial roots by evaluation.
//! The harvest is a lower-bound method, so certification is subset
//! inclusion, never set equality.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::numtheory::{
    is_prime, kth_power_residue, sieve_primes, NumTheoryError, PrimeModulus,
};
use crate::poly::IntPoly;
use crate::residue_polys::PolyCase;
use crate::xreal::Ratio;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("report carries unfactored values; certification needs a complete harvest")]
    IncompleteReport,
    #[error("modulus {0} exceeds the brute-force cap {1}")]
    ModulusTooLarge(BigUint, u64),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

/// Why a factor of some f(n) was left out of the harvested set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExclusionReason {
    /// q = p itself.
    EqualsP,
    /// q is 2 or 3 in the cubic or biquadratic case, where the
    /// divisibility criterion carries q != 2, 3 as a side condition.
    DividesLM,
    /// q <= x, below the window's lower edge.
    SmallPrime,
    /// q > Q, beyond the window's upper edge.
    OutOfWindow,
}

impl ExclusionReason {
    pub fn label(&self) -> &'static str {
        match self {
            ExclusionReason::EqualsP => "equals-p",
            ExclusionReason::DividesLM => "criterion-side-condition",
            ExclusionReason::SmallPrime => "below-window",
            ExclusionReason::OutOfWindow => "above-window",
        }
    }
}

/// One division event q^valuation || f(n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueWitness {
    pub q: BigUint,
    pub n: u64,
    /// Exact power of q in f(n).
    pub valuation: u32,
    pub excluded: bool,
    pub reason: Option<ExclusionReason>,
}

/// Certification record for one harvested prime.
#[derive(Clone, Debug)]
pub struct ResidueCheck {
    pub q: BigUint,
    pub is_prime: bool,
    pub distinct_from_p: bool,
    pub in_window: bool,
    /// Order test on q itself.
    pub kth_residue: bool,
    /// Order test on the signed prime (-1)^((q-1)/2) q. Only populated
    /// for the biquadratic case, where it is the asserted flag.
    pub qstar_kth_residue: Option<bool>,
    pub passed: bool,
}

/// Full output of one harvest run. Built by
/// [`crate::residue_polys::collect_witnesses`], certified in place by
/// [`verify_report`].
#[derive(Clone, Debug)]
pub struct ResidueReport {
    pub p: BigUint,
    pub case: PolyCase,
    pub epsilon: Ratio,
    pub delta: Option<Ratio>,
    pub x_limit_theoretical: BigUint,
    pub x_limit: u64,
    pub q_bound: BigUint,
    pub desk_window: bool,
    /// Distinct non-excluded primes, ascending.
    pub harvested: Vec<BigUint>,
    pub harvested_count: u64,
    /// Every division event, included or not, sorted by (q, n).
    pub witnesses: Vec<ResidueWitness>,
    /// False when any f(n) resisted full factorization.
    pub complete: bool,
    pub oracle_verified: bool,
    /// Per-q certification details, filled by [`verify_report`].
    pub residue_checks: Vec<ResidueCheck>,
    pub threshold: f64,
    pub meets_threshold: bool,
    pub guaranteed_regime: bool,
    pub guaranteed_regime_alt: bool,
    pub deviations: Vec<String>,
}

/// Outcome of a certification pass.
#[derive(Clone, Debug)]
pub struct VerifySummary {
    pub verified: bool,
    /// Harvested primes that failed, with the failing condition.
    pub offenders: Vec<(BigUint, String)>,
}

/// All primes q <= limit, q != p, that are k-th power residues mod p,
/// found by sieving and testing each prime directly.
pub fn direct_residue_set(
    p: &PrimeModulus,
    k: u32,
    limit: u64,
) -> Result<Vec<u64>, NumTheoryError> {
    let mut out = Vec::new();
    for q in sieve_primes(limit)? {
        if BigUint::from(q) == *p.value() {
            continue;
        }
        if kth_power_residue(&BigInt::from(q), p, k)? {
            out.push(q);
        }
    }
    Ok(out)
}

/// The signed prime (-1)^((q-1)/2) q: q when q = 1 mod 4, -q otherwise.
pub fn q_star(q: &BigUint) -> BigInt {
    if (q % 4u32) == BigUint::one() {
        BigInt::from(q.clone())
    } else {
        -BigInt::from(q.clone())
    }
}

/// Membership test equivalent to `q in direct_residue_set(p, k, ...)`,
/// without building the set: q prime, q != p, order test passes. The
/// window is checked separately by the caller.
pub fn direct_residue_member(
    p: &PrimeModulus,
    k: u32,
    q: &BigUint,
) -> Result<bool, NumTheoryError> {
    if !is_prime(q) || q == p.value() {
        return Ok(false);
    }
    kth_power_residue(&BigInt::from(q.clone()), p, k)
}

/// Recheck every harvested prime against the direct oracle and stamp the
/// report. Each q must be prime, distinct from p, inside the window
/// (skipped in desk-window mode), and pass the order test for the case's
/// k; the biquadratic case asserts the test on the signed prime q* and
/// records both flags. Fails fast on reports with unfactored values.
pub fn verify_report(report: &mut ResidueReport) -> Result<VerifySummary, OracleError> {
    if !report.complete {
        return Err(OracleError::IncompleteReport);
    }
    let p = PrimeModulus::new(report.p.clone())?;
    let k = report.case.k();
    let mut checks = Vec::with_capacity(report.harvested.len());
    let mut offenders = Vec::new();

    for q in &report.harvested {
        let q_is_prime = is_prime(q);
        let distinct = q != &report.p;
        let in_window = report.desk_window
            || (q.to_u64().map_or(false, |v| v > report.x_limit) && *q <= report.q_bound);
        // A q divisible by p would be q = p (both prime), already caught
        // by `distinct`; guard anyway so the order test cannot error.
        let kth = distinct && q_is_prime && kth_power_residue(&BigInt::from(q.clone()), &p, k)?;
        let qstar = if report.case == PolyCase::Biquadratic {
            Some(distinct && q_is_prime && kth_power_residue(&q_star(q), &p, k)?)
        } else {
            None
        };
        let asserted = qstar.unwrap_or(kth);
        let passed = q_is_prime && distinct && in_window && asserted;
        if !passed {
            let why = if !q_is_prime {
                "not prime"
            } else if !distinct {
                "equals p"
            } else if !in_window {
                "outside window"
            } else {
                "order test failed"
            };
            offenders.push((q.clone(), why.to_string()));
        }
        checks.push(ResidueCheck {
            q: q.clone(),
            is_prime: q_is_prime,
            distinct_from_p: distinct,
            in_window,
            kth_residue: kth,
            qstar_kth_residue: qstar,
            passed,
        });
    }

    let verified = offenders.is_empty();
    report.residue_checks = checks;
    report.oracle_verified = verified;
    Ok(VerifySummary { verified, offenders })
}

/// Replays sum log f(n) = sum over division events of log q as the exact
/// integer identity prod f(n) = prod q^valuation, plus the floating-point
/// residual of the log form for diagnostics.
#[derive(Clone, Debug)]
pub struct LogSumCheck {
    pub exact: bool,
    pub residual: f64,
    /// Number of values, 1 <= n <= x, entering the product.
    pub terms: u64,
}

pub fn logsum_identity_check(
    f: &crate::residue_polys::ReciprocityPolynomial,
    x: u64,
) -> Result<LogSumCheck, OracleError> {
    let x = x.min(f.x_limit);
    let (witnesses, failed) = f.collect_witnesses_range(1, x);
    if !failed.is_empty() {
        return Err(OracleError::IncompleteReport);
    }
    let mut lhs = BigUint::one();
    let mut log_lhs = 0.0f64;
    for n in 1..=x {
        let v = f.evaluate(n);
        log_lhs += big_ln(&v);
        lhs *= v;
    }
    let mut rhs = BigUint::one();
    let mut log_rhs = 0.0f64;
    for w in &witnesses {
        rhs *= w.q.pow(w.valuation);
        log_rhs += w.valuation as f64 * big_ln(&w.q);
    }
    Ok(LogSumCheck {
        exact: lhs == rhs,
        residual: (log_lhs - log_rhs).abs(),
        terms: x,
    })
}

/// Natural log of a positive big integer via the 64 most significant bits.
fn big_ln(v: &BigUint) -> f64 {
    let bits = v.bits();
    if bits <= 63 {
        return (v.to_u64().unwrap() as f64).ln();
    }
    let shift = bits - 63;
    let top = (v >> shift).to_u64().unwrap() as f64;
    top.ln() + (shift as f64) * std::f64::consts::LN_2
}

/// Counts roots of f mod m by direct evaluation of all m residues.
pub fn count_roots_brute(f: &IntPoly, m: u64) -> Result<u64, OracleError> {
    const CAP: u64 = 1_000_000;
    if m == 0 || m > CAP {
        return Err(OracleError::ModulusTooLarge(BigUint::from(m), CAP));
    }
    let reduced = f.reduced_mod(m);
    let mut count = 0;
    for n in 0..m {
        if crate::poly::horner_u64(&reduced, n, m) == 0 {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue_polys::{build_poly, build_poly_with, BuildOptions};

    fn pm(p: u64) -> PrimeModulus {
        PrimeModulus::from_u64(p).unwrap()
    }

    #[test]
    fn direct_sets_match_hand_computation() {
        // Cubes mod 13 are {1, 5, 8, 12}; of the primes up to 12 only 5
        // lands in the set.
        assert_eq!(direct_residue_set(&pm(13), 3, 12).unwrap(), vec![5]);
        // Squares mod 17 are {1,2,4,8,9,13,15,16}; 19 = 2 counts too.
        assert_eq!(
            direct_residue_set(&pm(17), 2, 20).unwrap(),
            vec![2, 13, 19]
        );
        // k = 1: everything prime except p itself.
        assert_eq!(direct_residue_set(&pm(5), 1, 10).unwrap(), vec![2, 3, 7]);
    }

    #[test]
    fn member_agrees_with_set() {
        let p = pm(41);
        for k in [2u32, 3, 4] {
            let set = direct_residue_set(&p, k, 100).unwrap();
            for q in sieve_primes(100).unwrap() {
                let member = direct_residue_member(&p, k, &BigUint::from(q)).unwrap();
                assert_eq!(member, set.contains(&q), "p=41 k={k} q={q}");
            }
        }
    }

    #[test]
    fn q_star_signs() {
        assert_eq!(q_star(&BigUint::from(13u32)), BigInt::from(13));
        assert_eq!(q_star(&BigUint::from(43u32)), BigInt::from(-43));
        assert_eq!(q_star(&BigUint::from(2u32)), BigInt::from(-2));
    }

    #[test]
    fn verify_certifies_the_p17_example() {
        let f = build_poly_with(
            PolyCase::Quad1Mod4,
            &pm(17),
            Ratio::new(1, 4),
            BuildOptions {
                delta: None,
                x_override: Some(3),
            },
        )
        .unwrap();
        let mut report = crate::residue_polys::collect_witnesses(&f);
        let summary = verify_report(&mut report).unwrap();
        assert!(summary.verified);
        assert!(report.oracle_verified);
        assert_eq!(report.residue_checks.len(), 2);
        assert!(report.residue_checks.iter().all(|c| c.passed));
    }

    #[test]
    fn verify_flags_injected_offender() {
        let f = build_poly_with(
            PolyCase::Quad1Mod4,
            &pm(17),
            Ratio::new(1, 4),
            BuildOptions {
                delta: None,
                x_override: Some(3),
            },
        )
        .unwrap();
        let mut report = crate::residue_polys::collect_witnesses(&f);
        // 3 is not a square mod 17.
        report.harvested.insert(1, BigUint::from(3u32));
        report.harvested_count += 1;
        let summary = verify_report(&mut report).unwrap();
        assert!(!summary.verified);
        assert!(!report.oracle_verified);
        assert_eq!(summary.offenders.len(), 1);
        assert_eq!(summary.offenders[0].0, BigUint::from(3u32));
        assert!(summary.offenders[0].1.contains("order test"));
    }

    #[test]
    fn verify_empty_harvest_is_vacuous() {
        let f = build_poly_with(
            PolyCase::Quad1Mod4,
            &pm(17),
            Ratio::new(1, 4),
            BuildOptions {
                delta: None,
                x_override: Some(3),
            },
        )
        .unwrap();
        let mut report = crate::residue_polys::collect_witnesses(&f);
        report.harvested.clear();
        report.harvested_count = 0;
        assert!(verify_report(&mut report).unwrap().verified);
    }

    #[test]
    fn verify_biquadratic_asserts_signed_flag() {
        // p = 13 harvests q = 43: 43 = 4 mod 13 is not a fourth power
        // (those are {1, 3, 9}), but -43 = 9 is. The signed flag governs.
        let f = build_poly(PolyCase::Biquadratic, &pm(13), Ratio::new(1, 2)).unwrap();
        let mut report = crate::residue_polys::collect_witnesses(&f);
        let summary = verify_report(&mut report).unwrap();
        assert!(summary.verified, "offenders: {:?}", summary.offenders);
        let check = &report.residue_checks[0];
        assert_eq!(check.q, BigUint::from(43u32));
        assert!(!check.kth_residue);
        assert_eq!(check.qstar_kth_residue, Some(true));
    }

    #[test]
    fn verify_rejects_incomplete_reports() {
        let f = build_poly(PolyCase::Cubic, &pm(13), Ratio::new(1, 2)).unwrap();
        let mut report = crate::residue_polys::collect_witnesses(&f);
        report.complete = false;
        assert!(matches!(
            verify_report(&mut report),
            Err(OracleError::IncompleteReport)
        ));
    }

    #[test]
    fn logsum_exact_on_worked_values() {
        // 8 * 19 = 152 = 2^3 * 19 at x = 2.
        let f = build_poly_with(
            PolyCase::Quad1Mod4,
            &pm(17),
            Ratio::new(1, 4),
            BuildOptions {
                delta: None,
                x_override: Some(3),
            },
        )
        .unwrap();
        let check = logsum_identity_check(&f, 2).unwrap();
        assert!(check.exact);
        assert!(check.residual < 1e-9);
        assert_eq!(check.terms, 2);
        // 40 = 2^3 * 5 at x = 1 for the cubic family at p = 13.
        let f = build_poly(PolyCase::Cubic, &pm(13), Ratio::new(1, 2)).unwrap();
        let check = logsum_identity_check(&f, 1).unwrap();
        assert!(check.exact);
        assert_eq!(check.terms, 1);
    }

    #[test]
    fn logsum_vacuous_at_zero() {
        let f = build_poly(PolyCase::Cubic, &pm(13), Ratio::new(1, 2)).unwrap();
        let check = logsum_identity_check(&f, 0).unwrap();
        assert!(check.exact);
        assert_eq!(check.residual, 0.0);
        assert_eq!(check.terms, 0);
    }

    #[test]
    fn brute_root_counts() {
        // n^2 + 8n - 1 mod 3 has no roots; (n+4)^2 - 17 mod 4 has two.
        assert_eq!(
            count_roots_brute(&IntPoly::from_i64(&[-1, 8, 1]), 3).unwrap(),
            0
        );
        assert_eq!(
            count_roots_brute(&IntPoly::from_i64(&[-1, 8, 1]), 4).unwrap(),
            2
        );
        assert_eq!(count_roots_brute(&IntPoly::from_i64(&[0, 0, 1]), 7).unwrap(), 1);
        assert!(count_roots_brute(&IntPoly::from_i64(&[0, 1]), 2_000_000).is_err());
    }

    #[test]
    fn big_ln_matches_f64_ln() {
        for v in [1u64, 2, 10, 1_000_003, u64::MAX] {
            let big = BigUint::from(v);
            assert!((big_ln(&big) - (v as f64).ln()).abs() < 1e-12);
        }
        let huge = BigUint::from(10u32).pow(40);
        assert!((big_ln(&huge) - 40.0 * 10f64.ln()).abs() < 1e-9);
    }
}
