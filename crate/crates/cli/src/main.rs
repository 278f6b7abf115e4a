//! Command-line surface for the residue harvester.
//!
//! Single-prime commands run the full build-harvest-certify-audit
//! pipeline; `scan` repeats it over seeded random primes; `audit`
//! evaluates the analytic bounds alone. Exit codes: 0 all verified,
//! 1 certification failed (or an inequality point violated), 2 invalid
//! input or an infeasible configuration.

mod output;
mod scan;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use powres::bound_audit::{self, BoundAudit};
use powres::numtheory::PrimeModulus;
use powres::oracle::{self, ResidueReport, VerifySummary};
use powres::residue_polys::{
    build_poly_with, collect_witnesses, BuildOptions, PolyCase, ReciprocityPolynomial,
};
use powres::xreal::Ratio;
use scan::ScanCase;
use serde::Deserialize;

#[derive(Parser)]
#[command(
    name = "powres",
    version,
    about = "Harvest small prime power residues mod p through reciprocity polynomials"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON file supplying defaults for any option; explicit flags win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Quadratic residues; the subcase follows p mod 4, and --delta
    /// selects the eps = 1/2 special family for p = 3 mod 4.
    Quadratic(RunArgs),
    /// Cubic residues (requires p = 1 mod 3).
    Cubic(RunArgs),
    /// Biquadratic residues (requires p = 1 mod 4).
    Biquadratic(RunArgs),
    /// Analytic audits: counting chain for one prime, or the prime
    /// log-sum inequality at a point.
    Audit(AuditArgs),
    /// Batch harvest over random primes of a fixed bit length.
    Scan(ScanArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Odd prime modulus.
    #[arg(long)]
    p: Option<String>,
    /// Window exponent, a decimal or fraction in (0, 1/2] (default 0.2).
    #[arg(long)]
    epsilon: Option<String>,
    /// Special-family exponent in (0, 1/2); only for p = 3 mod 4.
    #[arg(long)]
    delta: Option<String>,
    /// Replace the search limit and disable window exclusions.
    #[arg(long)]
    x_override: Option<u64>,
}

#[derive(Args)]
struct AuditArgs {
    /// Prime for a counting-chain audit (needs --case).
    #[arg(long)]
    p: Option<String>,
    /// Case for the chain audit: quadratic, quadratic-1mod4,
    /// quadratic-3mod4, special, cubic, or biquadratic.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    #[arg(long)]
    x_override: Option<u64>,
    /// Audit the prime log-sum inequality at this point (>= 10) instead.
    #[arg(long)]
    x: Option<u64>,
}

#[derive(Args)]
struct ScanArgs {
    /// Case to sample: quadratic, quadratic-1mod4, quadratic-3mod4,
    /// special, cubic, or biquadratic.
    #[arg(long)]
    case: Option<String>,
    /// Bit length of sampled primes (4 to 62).
    #[arg(long)]
    bits: Option<u32>,
    /// Number of primes to sample.
    #[arg(long)]
    count: Option<u32>,
    /// Stream seed; identical seeds reproduce identical output.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    delta: Option<String>,
}

/// Optional defaults file; every field mirrors a flag of the same name.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    p: Option<serde_json::Value>,
    epsilon: Option<serde_json::Value>,
    delta: Option<serde_json::Value>,
    x_override: Option<u64>,
    bits: Option<u32>,
    count: Option<u32>,
    seed: Option<u64>,
    case: Option<String>,
    format: Option<String>,
    x: Option<u64>,
}

struct CliError(String);

impl<E: std::fmt::Display> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError(e.to_string())
    }
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> Result<ExitCode, CliError> {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(path) => {
            let raw = fs::read_to_string(path)
                .map_err(|e| CliError(format!("config {}: {e}", path.display())))?;
            serde_json::from_str::<FileConfig>(&raw)
                .map_err(|e| CliError(format!("config {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };
    let format = match cli.format {
        Some(f) => f,
        None => match cfg.format.as_deref() {
            Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some("text") | None => Format::Text,
            Some(other) => return Err(CliError(format!("unknown format {other:?}"))),
        },
    };
    match cli.command {
        Command::Quadratic(args) => run_family(Family::Quadratic, args, &cfg, format),
        Command::Cubic(args) => run_family(Family::Cubic, args, &cfg, format),
        Command::Biquadratic(args) => run_family(Family::Biquadratic, args, &cfg, format),
        Command::Audit(args) => run_audit(args, &cfg, format),
        Command::Scan(args) => run_scan_cmd(args, &cfg, format),
    }
}

#[derive(Clone, Copy)]
enum Family {
    Quadratic,
    Cubic,
    Biquadratic,
}

fn value_to_string(v: &serde_json::Value) -> Result<String, CliError> {
    match v {
        serde_json::Value::String(s) => Ok(s.clone()),
        serde_json::Value::Number(n) => Ok(n.to_string()),
        other => Err(CliError(format!("expected string or number, got {other}"))),
    }
}

fn merge_str(
    flag: Option<String>,
    file: &Option<serde_json::Value>,
) -> Result<Option<String>, CliError> {
    match flag {
        Some(s) => Ok(Some(s)),
        None => file.as_ref().map(value_to_string).transpose(),
    }
}

fn parse_ratio(s: &str, what: &str) -> Result<Ratio, CliError> {
    Ratio::from_str(s).map_err(|e| CliError(format!("{what}: {e}")))
}

fn parse_prime(s: &str) -> Result<PrimeModulus, CliError> {
    let v: BigUint = s
        .parse()
        .map_err(|_| CliError(format!("p must be a non-negative integer, got {s:?}")))?;
    Ok(PrimeModulus::new(v)?)
}

/// Resolve the polynomial case for a family command.
fn resolve_case(family: Family, p: &PrimeModulus, has_delta: bool) -> Result<PolyCase, CliError> {
    match family {
        Family::Quadratic => {
            if p.mod4() == 1 {
                if has_delta {
                    return Err(CliError(
                        "--delta selects the special family, which needs p = 3 mod 4".into(),
                    ));
                }
                Ok(PolyCase::Quad1Mod4)
            } else if has_delta {
                Ok(PolyCase::Quad3Mod4Special)
            } else {
                Ok(PolyCase::Quad3Mod4)
            }
        }
        Family::Cubic => {
            if has_delta {
                return Err(CliError("--delta only applies to the quadratic command".into()));
            }
            Ok(PolyCase::Cubic)
        }
        Family::Biquadratic => {
            if has_delta {
                return Err(CliError("--delta only applies to the quadratic command".into()));
            }
            Ok(PolyCase::Biquadratic)
        }
    }
}

struct PipelineOutcome {
    f: ReciprocityPolynomial,
    report: ResidueReport,
    summary: Option<VerifySummary>,
    audit: Option<BoundAudit>,
}

fn run_pipeline(
    case: PolyCase,
    p: &PrimeModulus,
    epsilon: Ratio,
    delta: Option<Ratio>,
    x_override: Option<u64>,
) -> Result<PipelineOutcome, CliError> {
    let f = build_poly_with(
        case,
        p,
        epsilon,
        BuildOptions { delta, x_override },
    )?;
    let mut report = collect_witnesses(&f);
    let (summary, audit) = if report.complete {
        let summary = oracle::verify_report(&mut report)?;
        let audit = if summary.verified {
            Some(bound_audit::inequality_chain_audit(&f, &report)?)
        } else {
            None
        };
        (Some(summary), audit)
    } else {
        (None, None)
    };
    Ok(PipelineOutcome {
        f,
        report,
        summary,
        audit,
    })
}

fn run_family(
    family: Family,
    args: RunArgs,
    cfg: &FileConfig,
    format: Format,
) -> Result<ExitCode, CliError> {
    let p_str = merge_str(args.p, &cfg.p)?.ok_or(CliError("--p is required".into()))?;
    let p = parse_prime(&p_str)?;
    let epsilon = match merge_str(args.epsilon, &cfg.epsilon)? {
        Some(s) => parse_ratio(&s, "epsilon")?,
        None => Ratio::new(1, 5),
    };
    let delta = merge_str(args.delta, &cfg.delta)?
        .map(|s| parse_ratio(&s, "delta"))
        .transpose()?;
    let x_override = args.x_override.or(cfg.x_override);
    let case = resolve_case(family, &p, delta.is_some())?;
    let out = run_pipeline(case, &p, epsilon, delta, x_override)?;

    let rendered = match format {
        Format::Json => output::report_json(&out.f, &out.report, out.audit.as_ref()),
        Format::Csv => output::report_csv(&out.report),
        Format::Text => {
            output::report_text(&out.f, &out.report, out.summary.as_ref(), out.audit.as_ref())
        }
    };
    print!("{rendered}");
    if !out.report.complete {
        eprintln!("error: factorization incomplete; certification skipped");
        return Ok(ExitCode::from(1));
    }
    Ok(if out.report.oracle_verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_audit(args: AuditArgs, cfg: &FileConfig, format: Format) -> Result<ExitCode, CliError> {
    let p_str = merge_str(args.p, &cfg.p)?;
    let x = args.x.or(cfg.x);
    match (p_str, x) {
        (None, Some(x)) => {
            if x < 10 {
                return Err(CliError("--x must be at least 10".into()));
            }
            let audit = bound_audit::chebyshev_sum_audit(x);
            let rendered = match format {
                Format::Json => output::chebyshev_json(&audit),
                _ => output::chebyshev_text(&audit),
            };
            print!("{rendered}");
            Ok(if audit.holds {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        (Some(p_str), None) => {
            let p = parse_prime(&p_str)?;
            let case_str = args
                .case
                .or_else(|| cfg.case.clone())
                .ok_or(CliError("--case is required with --p".into()))?;
            let scan_case = ScanCase::parse(&case_str)?;
            let epsilon = match merge_str(args.epsilon, &cfg.epsilon)? {
                Some(s) => parse_ratio(&s, "epsilon")?,
                None => Ratio::new(1, 5),
            };
            let mut delta = merge_str(args.delta, &cfg.delta)?
                .map(|s| parse_ratio(&s, "delta"))
                .transpose()?;
            let case = match scan_case {
                ScanCase::QuadraticAuto => resolve_case(Family::Quadratic, &p, delta.is_some())?,
                ScanCase::Fixed(c) => c,
            };
            if case == PolyCase::Quad3Mod4Special && delta.is_none() {
                delta = Some(Ratio::new(1, 4));
            }
            let x_override = args.x_override.or(cfg.x_override);
            let out = run_pipeline(case, &p, epsilon, delta, x_override)?;
            if !out.report.complete {
                eprintln!("error: factorization incomplete; audit skipped");
                return Ok(ExitCode::from(1));
            }
            if !out.report.oracle_verified {
                eprintln!("error: certification failed; audit skipped");
                return Ok(ExitCode::from(1));
            }
            let audit = out.audit.expect("audit present for verified report");
            let rendered = match format {
                Format::Json => audit_json(&audit),
                _ => audit_text(&audit),
            };
            print!("{rendered}");
            Ok(ExitCode::SUCCESS)
        }
        (Some(_), Some(_)) => Err(CliError("--p and --x are mutually exclusive".into())),
        (None, None) => Err(CliError("audit needs --p (with --case) or --x".into())),
    }
}

fn audit_json(a: &BoundAudit) -> String {
    #[derive(serde::Serialize)]
    struct JsonBoundAudit<'a> {
        case: &'static str,
        p: serde_json::Value,
        epsilon: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        delta: Option<String>,
        threshold: f64,
        c1: f64,
        chain_lower_bound: f64,
        empirical_count: u64,
        chain_holds: bool,
        meets_threshold: bool,
        guaranteed_regime: bool,
        guaranteed_regime_alt: bool,
        notes: &'a [String],
    }
    let dto = JsonBoundAudit {
        case: a.case.label(),
        p: match a.p.to_string().parse::<u64>() {
            Ok(small) if small < (1 << 53) => serde_json::Value::from(small),
            _ => serde_json::Value::from(a.p.to_string()),
        },
        epsilon: a.epsilon.to_string(),
        delta: a.delta.map(|d| d.to_string()),
        threshold: a.threshold,
        c1: a.c1,
        chain_lower_bound: a.lhs,
        empirical_count: a.empirical_count,
        chain_holds: a.chain_holds,
        meets_threshold: a.meets_threshold,
        guaranteed_regime: a.guaranteed_regime,
        guaranteed_regime_alt: a.guaranteed_regime_alt,
        notes: &a.notes,
    };
    let mut s = serde_json::to_string_pretty(&dto).expect("audit serializes");
    s.push('\n');
    s
}

fn audit_text(a: &BoundAudit) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "case: {}", a.case.label());
    let _ = writeln!(s, "p: {}", a.p);
    let _ = writeln!(s, "epsilon: {}", a.epsilon);
    if let Some(d) = a.delta {
        let _ = writeln!(s, "delta: {d}");
    }
    let _ = writeln!(s, "threshold: {}", a.threshold);
    let _ = writeln!(s, "c1: {}", a.c1);
    let _ = writeln!(s, "chain lower bound: {}", a.lhs);
    let _ = writeln!(s, "empirical count: {}", a.empirical_count);
    let _ = writeln!(
        s,
        "chain holds: {}",
        if a.chain_holds { "yes" } else { "no" }
    );
    let _ = writeln!(
        s,
        "meets threshold: {}",
        if a.meets_threshold { "yes" } else { "no" }
    );
    let _ = writeln!(
        s,
        "guaranteed regime: {} (alternate reading: {})",
        if a.guaranteed_regime { "yes" } else { "no" },
        if a.guaranteed_regime_alt { "yes" } else { "no" }
    );
    for note in &a.notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

fn run_scan_cmd(args: ScanArgs, cfg: &FileConfig, format: Format) -> Result<ExitCode, CliError> {
    let case_str = args
        .case
        .or_else(|| cfg.case.clone())
        .ok_or(CliError("--case is required for scan".into()))?;
    let case = ScanCase::parse(&case_str)?;
    let bits = args
        .bits
        .or(cfg.bits)
        .ok_or(CliError("--bits is required for scan".into()))?;
    if !(4..=62).contains(&bits) {
        return Err(CliError(format!("--bits must be in [4, 62], got {bits}")));
    }
    let count = args
        .count
        .or(cfg.count)
        .ok_or(CliError("--count is required for scan".into()))?;
    if count == 0 {
        return Err(CliError("--count must be positive".into()));
    }
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    let epsilon = match merge_str(args.epsilon, &cfg.epsilon)? {
        Some(s) => parse_ratio(&s, "epsilon")?,
        None => Ratio::new(1, 5),
    };
    let delta = merge_str(args.delta, &cfg.delta)?
        .map(|s| parse_ratio(&s, "delta"))
        .transpose()?;
    if delta.is_some() && case != ScanCase::Fixed(PolyCase::Quad3Mod4Special) {
        return Err(CliError("--delta only applies to --case special".into()));
    }

    let (rows, all_verified) = scan::run_scan(case, bits, count, seed, epsilon, delta)?;
    let rendered = match format {
        Format::Json => output::scan_json(&rows),
        Format::Csv => output::scan_csv(&rows),
        Format::Text => output::scan_text(&rows),
    };
    print!("{rendered}");
    Ok(if all_verified {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
