//! Batch harvesting over randomly sampled primes.
//!
//! Sampling is driven entirely by a seeded ChaCha stream, so a scan with
//! the same (case, bits, count, seed, epsilon, delta) always visits the
//! same primes in the same order and serializes to the same bytes.

use powres::numtheory::{is_prime_u64, PrimeModulus};
use powres::residue_polys::{
    build_poly_with, collect_witnesses, BuildOptions, PolyCase,
};
use powres::xreal::Ratio;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// What a scan samples. `QuadraticAuto` accepts any odd prime and lets
/// the residue class pick between the two quadratic families, mirroring
/// the `quadratic` subcommand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanCase {
    QuadraticAuto,
    Fixed(PolyCase),
}

impl ScanCase {
    pub fn parse(s: &str) -> Result<ScanCase, String> {
        match s {
            "quadratic" => Ok(ScanCase::QuadraticAuto),
            "special" => Ok(ScanCase::Fixed(PolyCase::Quad3Mod4Special)),
            other => other
                .parse::<PolyCase>()
                .map(ScanCase::Fixed)
                .map_err(|_| {
                    format!(
                        "unknown case {other:?}; expected quadratic, quadratic-1mod4, \
                         quadratic-3mod4, special, cubic, or biquadratic"
                    )
                }),
        }
    }

    /// Residue-class filter applied during sampling.
    fn admits(&self, p: u64) -> bool {
        match self {
            ScanCase::QuadraticAuto => p > 3,
            ScanCase::Fixed(PolyCase::Quad1Mod4) | ScanCase::Fixed(PolyCase::Biquadratic) => {
                p % 4 == 1
            }
            ScanCase::Fixed(PolyCase::Quad3Mod4)
            | ScanCase::Fixed(PolyCase::Quad3Mod4Special) => p % 4 == 3,
            ScanCase::Fixed(PolyCase::Cubic) => p % 3 == 1,
        }
    }

    fn resolve(&self, p: u64) -> PolyCase {
        match self {
            ScanCase::Fixed(c) => *c,
            ScanCase::QuadraticAuto => {
                if p % 4 == 1 {
                    PolyCase::Quad1Mod4
                } else {
                    PolyCase::Quad3Mod4
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub p: u64,
    pub case_label: &'static str,
    pub epsilon: Ratio,
    pub x_limit: u64,
    pub harvested_count: u64,
    pub threshold: f64,
    pub meets_threshold: bool,
    pub oracle_verified: bool,
}

/// Next prime from the stream: uniform `bits`-bit odd candidates (top and
/// low bit forced), retried until prime and in the case's residue class.
pub fn sample_prime(rng: &mut ChaCha8Rng, bits: u32, case: ScanCase) -> u64 {
    assert!((4..=62).contains(&bits));
    loop {
        let cand = (rng.next_u64() >> (64 - bits)) | (1 << (bits - 1)) | 1;
        if case.admits(cand) && is_prime_u64(cand) {
            return cand;
        }
    }
}

/// Runs `count` build-harvest-certify rounds. Returns the rows plus the
/// conjunction of their verification verdicts.
pub fn run_scan(
    case: ScanCase,
    bits: u32,
    count: u32,
    seed: u64,
    epsilon: Ratio,
    delta: Option<Ratio>,
) -> Result<(Vec<ScanRow>, bool), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(count as usize);
    let mut all_verified = true;
    for _ in 0..count {
        let p = sample_prime(&mut rng, bits, case);
        let pm = PrimeModulus::from_u64(p).expect("sampled prime");
        let poly_case = case.resolve(p);
        let opts = BuildOptions {
            delta: if poly_case == PolyCase::Quad3Mod4Special {
                Some(delta.unwrap_or(Ratio::new(1, 4)))
            } else {
                delta
            },
            x_override: None,
        };
        let f = build_poly_with(poly_case, &pm, epsilon, opts)
            .map_err(|e| format!("p = {p}: {e}"))?;
        let mut report = collect_witnesses(&f);
        let verified = if report.complete {
            powres::oracle::verify_report(&mut report)
                .map_err(|e| format!("p = {p}: {e}"))?
                .verified
        } else {
            false
        };
        all_verified &= verified;
        rows.push(ScanRow {
            p,
            case_label: poly_case.label(),
            epsilon: report.epsilon,
            x_limit: report.x_limit,
            harvested_count: report.harvested_count,
            threshold: report.threshold,
            meets_threshold: report.meets_threshold,
            oracle_verified: report.oracle_verified,
        });
    }
    Ok((rows, all_verified))
}
