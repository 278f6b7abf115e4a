//! Serialization of reports, audits, and scan rows.
//!
//! JSON keeps a stable field set {p, case, epsilon, x_limit, q_bound,
//! witnesses[], excluded[], harvested_count, oracle_verified, threshold,
//! guaranteed_regime, deviations[]}; extra diagnostic fields follow the
//! stable ones. Integers that do not fit in a double exactly (>= 2^53)
//! are emitted as decimal strings. Everything here is deterministic:
//! identical inputs serialize to identical bytes.

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use powres::bound_audit::{BoundAudit, ChebyshevAudit};
use powres::oracle::{ResidueReport, VerifySummary};
use powres::residue_polys::ReciprocityPolynomial;
use serde::Serialize;
use serde_json::Value;

use crate::scan::ScanRow;

/// Largest integer a JSON double can carry exactly.
const JSON_SAFE_MAX: u64 = (1 << 53) - 1;

fn json_int(v: &BigUint) -> Value {
    match v.to_u64() {
        Some(small) if small <= JSON_SAFE_MAX => Value::from(small),
        _ => Value::from(v.to_string()),
    }
}

#[derive(Serialize)]
struct JsonWitness {
    q: Value,
    n: u64,
    valuation: u32,
}

#[derive(Serialize)]
struct JsonExcluded {
    q: Value,
    n: u64,
    valuation: u32,
    reason: &'static str,
}

#[derive(Serialize)]
struct JsonCheck {
    q: Value,
    is_prime: bool,
    distinct_from_p: bool,
    in_window: bool,
    kth_residue: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    qstar_kth_residue: Option<bool>,
    passed: bool,
}

#[derive(Serialize)]
struct JsonAudit {
    c1: f64,
    chain_lower_bound: f64,
    chain_holds: bool,
    guaranteed_regime: bool,
    guaranteed_regime_alt: bool,
    notes: Vec<String>,
}

#[derive(Serialize)]
struct JsonReport {
    p: Value,
    case: &'static str,
    epsilon: String,
    x_limit: Value,
    q_bound: Value,
    witnesses: Vec<JsonWitness>,
    excluded: Vec<JsonExcluded>,
    harvested_count: u64,
    oracle_verified: bool,
    threshold: f64,
    guaranteed_regime: bool,
    deviations: Vec<String>,
    // Stable schema ends here; diagnostics follow.
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<String>,
    polynomial: String,
    harvested: Vec<Value>,
    meets_threshold: bool,
    guaranteed_regime_alt: bool,
    desk_window: bool,
    complete: bool,
    residue_checks: Vec<JsonCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    audit: Option<JsonAudit>,
}

fn build_json(
    f: &ReciprocityPolynomial,
    report: &ResidueReport,
    audit: Option<&BoundAudit>,
) -> JsonReport {
    let witnesses = report
        .witnesses
        .iter()
        .filter(|w| !w.excluded)
        .map(|w| JsonWitness {
            q: json_int(&w.q),
            n: w.n,
            valuation: w.valuation,
        })
        .collect();
    let excluded = report
        .witnesses
        .iter()
        .filter(|w| w.excluded)
        .map(|w| JsonExcluded {
            q: json_int(&w.q),
            n: w.n,
            valuation: w.valuation,
            reason: w.reason.expect("excluded witness carries a reason").label(),
        })
        .collect();
    let residue_checks = report
        .residue_checks
        .iter()
        .map(|c| JsonCheck {
            q: json_int(&c.q),
            is_prime: c.is_prime,
            distinct_from_p: c.distinct_from_p,
            in_window: c.in_window,
            kth_residue: c.kth_residue,
            qstar_kth_residue: c.qstar_kth_residue,
            passed: c.passed,
        })
        .collect();
    JsonReport {
        p: json_int(&report.p),
        case: report.case.label(),
        epsilon: report.epsilon.to_string(),
        x_limit: Value::from(report.x_limit),
        q_bound: json_int(&report.q_bound),
        witnesses,
        excluded,
        harvested_count: report.harvested_count,
        oracle_verified: report.oracle_verified,
        threshold: report.threshold,
        guaranteed_regime: report.guaranteed_regime,
        deviations: report.deviations.clone(),
        delta: report.delta.map(|d| d.to_string()),
        polynomial: f.poly.to_string(),
        harvested: report.harvested.iter().map(json_int).collect(),
        meets_threshold: report.meets_threshold,
        guaranteed_regime_alt: report.guaranteed_regime_alt,
        desk_window: report.desk_window,
        complete: report.complete,
        residue_checks,
        audit: audit.map(|a| JsonAudit {
            c1: a.c1,
            chain_lower_bound: a.lhs,
            chain_holds: a.chain_holds,
            guaranteed_regime: a.guaranteed_regime,
            guaranteed_regime_alt: a.guaranteed_regime_alt,
            notes: a.notes.clone(),
        }),
    }
}

pub fn report_json(
    f: &ReciprocityPolynomial,
    report: &ResidueReport,
    audit: Option<&BoundAudit>,
) -> String {
    let mut s = serde_json::to_string_pretty(&build_json(f, report, audit))
        .expect("report serializes");
    s.push('\n');
    s
}

pub fn report_text(
    f: &ReciprocityPolynomial,
    report: &ResidueReport,
    summary: Option<&VerifySummary>,
    audit: Option<&BoundAudit>,
) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "p: {}", report.p);
    let _ = writeln!(s, "case: {}", report.case.label());
    let _ = writeln!(s, "polynomial: {}", f.poly);
    let _ = writeln!(s, "epsilon: {}", report.epsilon);
    if let Some(d) = report.delta {
        let _ = writeln!(s, "delta: {d}");
    }
    let _ = writeln!(
        s,
        "search limit: {} (theoretical {})",
        report.x_limit, report.x_limit_theoretical
    );
    if report.desk_window {
        let _ = writeln!(s, "window: (1, inf) [override]");
    } else {
        let _ = writeln!(s, "window: ({}, {}]", report.x_limit, report.q_bound);
    }
    let harvested: Vec<String> = report.harvested.iter().map(|q| q.to_string()).collect();
    let _ = writeln!(
        s,
        "harvested ({}): {}",
        report.harvested_count,
        if harvested.is_empty() {
            "none".to_string()
        } else {
            harvested.join(", ")
        }
    );
    for w in report.witnesses.iter().filter(|w| !w.excluded) {
        let _ = writeln!(s, "  witness q={} at n={} (valuation {})", w.q, w.n, w.valuation);
    }
    for w in report.witnesses.iter().filter(|w| w.excluded) {
        let _ = writeln!(
            s,
            "  excluded q={} at n={} ({})",
            w.q,
            w.n,
            w.reason.expect("excluded witness carries a reason").label()
        );
    }
    if !report.complete {
        let _ = writeln!(s, "warning: some values were not fully factored");
    }
    let _ = writeln!(
        s,
        "oracle verified: {}",
        if report.oracle_verified { "yes" } else { "no" }
    );
    if let Some(sum) = summary {
        for (q, why) in &sum.offenders {
            let _ = writeln!(s, "  offender q={q}: {why}");
        }
    }
    let _ = writeln!(
        s,
        "threshold: {} ({})",
        report.threshold,
        if report.meets_threshold { "met" } else { "not met" }
    );
    let _ = writeln!(
        s,
        "guaranteed regime: {} (alternate reading: {})",
        if report.guaranteed_regime { "yes" } else { "no" },
        if report.guaranteed_regime_alt { "yes" } else { "no" }
    );
    if let Some(a) = audit {
        let _ = writeln!(s, "chain lower bound: {} (c1 = {})", a.lhs, a.c1);
        let _ = writeln!(
            s,
            "chain holds: {}",
            if a.chain_holds { "yes" } else { "no" }
        );
        for note in &a.notes {
            let _ = writeln!(s, "  note: {note}");
        }
    }
    for d in &report.deviations {
        let _ = writeln!(s, "deviation: {d}");
    }
    s
}

pub const CSV_HEADER: &str =
    "p,case,epsilon,x_limit,harvested_count,threshold,meets_threshold,oracle_verified";

fn csv_row(
    p: &str,
    case: &str,
    epsilon: &str,
    x_limit: u64,
    harvested_count: u64,
    threshold: f64,
    meets_threshold: bool,
    oracle_verified: bool,
) -> String {
    format!(
        "{p},{case},{epsilon},{x_limit},{harvested_count},{threshold},{meets_threshold},{oracle_verified}"
    )
}

pub fn report_csv(report: &ResidueReport) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    s.push_str(&csv_row(
        &report.p.to_string(),
        report.case.label(),
        &report.epsilon.to_string(),
        report.x_limit,
        report.harvested_count,
        report.threshold,
        report.meets_threshold,
        report.oracle_verified,
    ));
    s.push('\n');
    s
}

pub fn scan_csv(rows: &[ScanRow]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in rows {
        s.push_str(&csv_row(
            &r.p.to_string(),
            r.case_label,
            &r.epsilon.to_string(),
            r.x_limit,
            r.harvested_count,
            r.threshold,
            r.meets_threshold,
            r.oracle_verified,
        ));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct JsonScanRow {
    p: u64,
    case: &'static str,
    epsilon: String,
    x_limit: u64,
    harvested_count: u64,
    threshold: f64,
    meets_threshold: bool,
    oracle_verified: bool,
}

pub fn scan_json(rows: &[ScanRow]) -> String {
    let rows: Vec<JsonScanRow> = rows
        .iter()
        .map(|r| JsonScanRow {
            p: r.p,
            case: r.case_label,
            epsilon: r.epsilon.to_string(),
            x_limit: r.x_limit,
            harvested_count: r.harvested_count,
            threshold: r.threshold,
            meets_threshold: r.meets_threshold,
            oracle_verified: r.oracle_verified,
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("rows serialize");
    s.push('\n');
    s
}

pub fn scan_text(rows: &[ScanRow]) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    for r in rows {
        let _ = writeln!(
            s,
            "p={} case={} epsilon={} x={} harvested={} threshold={} meets={} verified={}",
            r.p,
            r.case_label,
            r.epsilon,
            r.x_limit,
            r.harvested_count,
            r.threshold,
            r.meets_threshold,
            r.oracle_verified
        );
    }
    s
}

#[derive(Serialize)]
struct JsonCheby {
    x: u64,
    lhs: f64,
    rhs: f64,
    holds: bool,
}

pub fn chebyshev_json(a: &ChebyshevAudit) -> String {
    let mut s = serde_json::to_string_pretty(&JsonCheby {
        x: a.x,
        lhs: a.lhs,
        rhs: a.rhs,
        holds: a.holds,
    })
    .expect("audit serializes");
    s.push('\n');
    s
}

pub fn chebyshev_text(a: &ChebyshevAudit) -> String {
    format!(
        "prime log-sum at x = {}: lhs = {} rhs = {} -> {}\n",
        a.x,
        a.lhs,
        a.rhs,
        if a.holds { "holds" } else { "VIOLATED" }
    )
}
