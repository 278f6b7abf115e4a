//! Numerical audit of the counting thresholds, validity regimes, and the
//! intermediate inequality chains behind them.
//!
//! The headline regimes (p >= e^312 and friends) are far beyond anything
//! a desk run can reach, so these functions never gate the harvest; they
//! evaluate each expression at the caller's actual (p, epsilon) and report
//! where it stands. All analytic work runs on 192-bit reals and is rounded
//! to f64 only at the edge; pass/fail comparisons carry a 1e-12 slack so a
//! borderline value cannot flip on the final rounding.

use num_bigint::BigUint;
use thiserror::Error;

use crate::numtheory::sieve_primes;
use crate::oracle::ResidueReport;
use crate::residue_polys::{PolyCase, ReciprocityPolynomial};
use crate::xreal::{Ratio, Real};

/// Slack for >= / <= verdicts computed through floating point.
const VERDICT_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum AuditError {
    #[error("epsilon {eps} outside the stated range (0, {max}] for this case")]
    EpsilonOutOfRange { eps: String, max: String },
    #[error("report carries unfactored values")]
    IncompleteReport,
    #[error("report has not passed oracle certification")]
    ReportNotVerified,
}

/// Both readings of a theorem's validity condition. `stated` follows the
/// headline statement (p >= e^312; p >= max{75^(eps/3), e^100}; p >=
/// max{60^(eps/4), e^85}). `alternate` follows the in-proof variant where
/// the two differ: eps <= 1/4 with p >= e^144 for the 1 mod 4 quadratic,
/// x >= 75 with p >= e^100 for the cubic, x >= 60 with p >= e^84 for the
/// biquadratic. The special quadratic family has an unquantified error
/// term, so both flags are always false there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegimeFlags {
    pub stated: bool,
    pub alternate: bool,
}

fn ln_real(p: &BigUint) -> Real {
    Real::from_biguint(p).ln()
}

/// c1 = 1 + 0.15 / ln^3 x, the prime-power tail constant, evaluated at
/// the case's search limit.
pub fn c1_at(x: &Real) -> Real {
    let lnx = x.ln();
    let cube = &(&lnx * &lnx) * &lnx;
    &Real::one() + &(&Real::from_f64(0.15) / &cube)
}

fn threshold_parts(case: PolyCase) -> (u64, u64) {
    // (denominator of the leading coefficient, k in the exponent eps/k).
    match case {
        PolyCase::Quad1Mod4 | PolyCase::Quad3Mod4 | PolyCase::Quad3Mod4Special => (4, 2),
        PolyCase::Cubic => (15, 3),
        PolyCase::Biquadratic => (16, 4),
    }
}

/// Threshold formula without the range check: (1/4)p^(eps/2),
/// (1/15)p^(eps/3), or (1/16)p^(eps/4).
pub fn threshold_value_unchecked(case: PolyCase, p: &BigUint, epsilon: Ratio) -> f64 {
    let (den, k) = threshold_parts(case);
    let exp = Ratio::new(epsilon.num(), epsilon.den() * k).as_real();
    let val = &(&ln_real(p) * &exp).exp() / &Real::from_u64(den);
    val.to_f64()
}

/// The counting theorem's lower-bound value at (p, epsilon), refusing
/// epsilon outside the theorem's stated range (1/5 for the quadratic
/// statements, 1/2 for the cubic and biquadratic ones).
pub fn theorem_threshold(
    case: PolyCase,
    p: &BigUint,
    epsilon: Ratio,
) -> Result<f64, AuditError> {
    let (max_num, max_den) = match case {
        PolyCase::Quad1Mod4 | PolyCase::Quad3Mod4 | PolyCase::Quad3Mod4Special => (1, 5),
        PolyCase::Cubic | PolyCase::Biquadratic => (1, 2),
    };
    if epsilon.is_zero() || !epsilon.le(max_num, max_den) {
        return Err(AuditError::EpsilonOutOfRange {
            eps: epsilon.to_string(),
            max: format!("{max_num}/{max_den}"),
        });
    }
    Ok(threshold_value_unchecked(case, p, epsilon))
}

/// Threshold for a harvest report, falling back to the bare formula with
/// an explanatory note when epsilon sits outside the stated range (the
/// special family always does: it is the eps = 1/2 endpoint).
pub fn report_threshold(
    case: PolyCase,
    p: &BigUint,
    epsilon: Ratio,
    _delta: Option<Ratio>,
) -> (f64, Option<String>) {
    match theorem_threshold(case, p, epsilon) {
        Ok(v) => (v, None),
        Err(_) => (
            threshold_value_unchecked(case, p, epsilon),
            Some(format!(
                "threshold formula evaluated at eps = {epsilon}, outside the stated range of the counting bound"
            )),
        ),
    }
}

/// The special family's count floor (1 - 2 delta) p^delta. The full
/// statement carries an unquantified O(p^delta) error, so this is a
/// reference point, not a guarantee.
pub fn special_count_floor(p: &BigUint, delta: Ratio) -> f64 {
    let pd = (&ln_real(p) * &delta.as_real()).exp();
    let coef = &Real::one() - &(&Real::from_u64(2) * &delta.as_real());
    (&coef * &pd).to_f64()
}

/// Where (p, epsilon) stands against the case's validity condition, in
/// both readings. Comparisons run in log space.
pub fn guaranteed_regime(case: PolyCase, p: &BigUint, epsilon: Ratio) -> RegimeFlags {
    let lnp = ln_real(p).to_f64();
    let eps = epsilon.as_f64();
    let ge = |a: f64, b: f64| a >= b - VERDICT_TOL;
    match case {
        PolyCase::Quad1Mod4 => RegimeFlags {
            stated: epsilon.le(1, 5) && ge(lnp, 312.0),
            alternate: epsilon.le(1, 4) && ge(lnp, 144.0),
        },
        PolyCase::Quad3Mod4 => {
            let ok = epsilon.le(1, 5) && ge(lnp, 312.0);
            RegimeFlags {
                stated: ok,
                alternate: ok,
            }
        }
        PolyCase::Quad3Mod4Special => RegimeFlags {
            stated: false,
            alternate: false,
        },
        PolyCase::Cubic => RegimeFlags {
            stated: epsilon.le(1, 2) && ge(lnp, (eps / 3.0 * 75f64.ln()).max(100.0)),
            // x >= 75 i.e. (eps/3) ln p >= ln 75, with p >= e^100.
            alternate: epsilon.le(1, 2)
                && ge(eps / 3.0 * lnp, 75f64.ln())
                && ge(lnp, 100.0),
        },
        PolyCase::Biquadratic => RegimeFlags {
            stated: epsilon.le(1, 2) && ge(lnp, (eps / 4.0 * 60f64.ln()).max(85.0)),
            alternate: epsilon.le(1, 2)
                && ge(eps / 4.0 * lnp, 60f64.ln())
                && ge(lnp, 84.0),
        },
    }
}

/// One point of the prime log-sum inequality
/// sum over primes q <= x of ln q / (q - 1) <= c1 (2 + ln x).
#[derive(Clone, Debug)]
pub struct ChebyshevAudit {
    pub x: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Audits the log-sum inequality at every grid point with one sieve and
/// one accumulation pass. Grid points must be >= 10 (the c1 formula needs
/// ln^3 x comfortably away from 0); returned in ascending x order.
pub fn chebyshev_grid_audit(xs: &[u64]) -> Vec<ChebyshevAudit> {
    assert!(xs.iter().all(|&x| x >= 10), "grid points must be >= 10");
    let mut grid: Vec<u64> = xs.to_vec();
    grid.sort_unstable();
    grid.dedup();
    let Some(&max) = grid.last() else {
        return Vec::new();
    };
    let primes = sieve_primes(max).expect("grid beyond sieve budget");
    let mut out = Vec::with_capacity(grid.len());
    let mut sum = Real::zero();
    let mut next = 0usize;
    for &x in &grid {
        while next < primes.len() && primes[next] <= x {
            let q = primes[next];
            sum = &sum + &(&Real::from_u64(q).ln() / &Real::from_u64(q - 1));
            next += 1;
        }
        let xr = Real::from_u64(x);
        let rhs = &c1_at(&xr) * &(&Real::from_u64(2) + &xr.ln());
        let holds = sum.cmp_real(&rhs) != std::cmp::Ordering::Greater;
        out.push(ChebyshevAudit {
            x,
            lhs: sum.to_f64(),
            rhs: rhs.to_f64(),
            holds,
        });
    }
    out
}

pub fn chebyshev_sum_audit(x: u64) -> ChebyshevAudit {
    chebyshev_grid_audit(&[x]).pop().expect("single point")
}

/// Numerical state of one case's final counting chain at (p, epsilon):
/// the analytic lower-bound expression against the certified harvest
/// count, plus the threshold and regime verdicts.
#[derive(Clone, Debug)]
pub struct BoundAudit {
    pub case: PolyCase,
    pub p: BigUint,
    pub epsilon: Ratio,
    pub delta: Option<Ratio>,
    /// Counting-bound value (1/4)p^(eps/2) etc., formula applied at the
    /// run's actual epsilon.
    pub threshold: f64,
    /// Tail constant at the case's search limit.
    pub c1: f64,
    /// The chain's final lower-bound expression. Negative at desk scale:
    /// the error terms swamp the main term for small p.
    pub lhs: f64,
    /// Certified harvest count, the quantity the chain bounds.
    pub rhs: f64,
    pub empirical_count: u64,
    /// lhs <= count, the direction the chain guarantees in regime.
    pub chain_holds: bool,
    pub meets_threshold: bool,
    pub guaranteed_regime: bool,
    pub guaranteed_regime_alt: bool,
    pub notes: Vec<String>,
}

/// Evaluates the case's final inequality-chain expression at the report's
/// (p, epsilon) and compares it with the certified count. Requires a
/// complete, oracle-certified report.
pub fn inequality_chain_audit(
    f: &ReciprocityPolynomial,
    report: &ResidueReport,
) -> Result<BoundAudit, AuditError> {
    if !report.complete {
        return Err(AuditError::IncompleteReport);
    }
    if !report.oracle_verified {
        return Err(AuditError::ReportNotVerified);
    }

    let p = f.p.value();
    let lnp = ln_real(p);
    let eps = f.epsilon.as_real();
    let x_exp = f.case.x_exponent(f.epsilon, f.delta);
    // Analytic x = p^e, not the ceiled search limit.
    let x = (&lnp * &x_exp.as_real()).exp();
    let c1 = c1_at(&x);
    let mut notes = Vec::new();

    let one = Real::one();
    let half = Real::from_f64(0.5);
    let two = Real::from_u64(2);

    let lhs = match f.case {
        PolyCase::Quad1Mod4 => {
            // ((1/2 + (1-2c1)eps - 4(1+c1)/ln p) x) / (1 + 2eps + ln4/ln p)
            let num = &(&half + &(&(&one - &(&two * &c1)) * &eps))
                - &(&(&Real::from_u64(4) * &(&one + &c1)) / &lnp);
            let den = &(&one + &(&two * &eps)) + &(&Real::from_u64(4).ln() / &lnp);
            &(&num * &x) / &den
        }
        PolyCase::Quad3Mod4 => {
            // ((1/2 - 5eps/6 - 9/ln p) x) / (1 + eps + ln4/ln p)
            let num = &(&half - &(&(&Real::from_u64(5) * &eps) / &Real::from_u64(6)))
                - &(&Real::from_u64(9) / &lnp);
            let den = &(&one + &eps) + &(&Real::from_u64(4).ln() / &lnp);
            &(&num * &x) / &den
        }
        PolyCase::Quad3Mod4Special => {
            // (1 - 2 delta) p^delta, with an unquantified O(p^delta) term.
            notes.push(
                "count floor carries an unquantified error term of the same order".into(),
            );
            let delta = f.delta.expect("special family carries delta").as_real();
            &(&one - &(&two * &delta)) * &x
        }
        PolyCase::Cubic => {
            // (coef - 3c1(2/ln p + eps/3)) x / (3 (1/2 + eps + ln72/ln p))
            // where coef depends on which of |L|, |M| dominates.
            let rep = f.rep.as_ref().expect("cubic family carries (L, M)");
            let coef = if rep.l_dominant() {
                &(&(&half + &(&(&two * &eps) / &Real::from_u64(3)))
                    - &(&Real::from_f64(0.78) / &lnp))
                    - &(&Real::from_u64(4) / &x)
            } else {
                &(&(&half + &eps) - &(&Real::from_f64(0.68) / &lnp))
                    - &(&Real::from_u64(3) / &x)
            };
            let tail = &(&Real::from_u64(3) * &c1)
                * &(&(&two / &lnp) + &(&eps / &Real::from_u64(3)));
            let den = &Real::from_u64(3)
                * &(&(&half + &eps) + &(&Real::from_u64(72).ln() / &lnp));
            &(&(&coef - &tail) * &x) / &den
        }
        PolyCase::Biquadratic => {
            // (coef - 4c1(2/ln p + eps/4)) x ln p / (4 (ln 42 + (1/2+eps) ln p))
            let coef = &(&(&half + &(&(&Real::from_u64(3) * &eps) / &Real::from_u64(4)))
                + &(&one / &(&Real::from_u64(3) * &lnp)))
                - &(&Real::from_u64(5) / &(&Real::from_u64(4) * &x));
            let tail = &(&Real::from_u64(4) * &c1)
                * &(&(&two / &lnp) + &(&eps / &Real::from_u64(4)));
            let den = &Real::from_u64(4)
                * &(&Real::from_u64(42).ln() + &(&(&half + &eps) * &lnp));
            notes.push(
                "window lower bound read as strict: p^(eps/4) < q, matching the other cases"
                    .into(),
            );
            &(&(&(&coef - &tail) * &x) * &lnp) / &den
        }
    };

    let (threshold, threshold_note) = report_threshold(f.case, p, f.epsilon, f.delta);
    if let Some(note) = threshold_note {
        notes.push(note);
    }
    let regime = guaranteed_regime(f.case, p, f.epsilon);
    let count = report.harvested_count;
    let lhs = lhs.to_f64();

    Ok(BoundAudit {
        case: f.case,
        p: p.clone(),
        epsilon: f.epsilon,
        delta: f.delta,
        threshold,
        c1: c1.to_f64(),
        lhs,
        rhs: count as f64,
        empirical_count: count,
        chain_holds: lhs <= count as f64 + VERDICT_TOL,
        meets_threshold: count as f64 >= threshold - VERDICT_TOL,
        guaranteed_regime: regime.stated,
        guaranteed_regime_alt: regime.alternate,
        notes,
    })
}
