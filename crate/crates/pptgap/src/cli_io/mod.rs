//! Command-line surface: file formats, report rendering and the exit-code
//! contract shared by the `pptgap` binary and the integration tests.
//!
//! Human-readable and machine-readable renderings of a report always carry
//! the same numbers; the machine form is one JSON object per line.

pub mod format;
pub mod suites;

use crate::criteria::{CriteriaReport, Tolerance};
use crate::search::{SearchRecord, SearchSummary};
use suites::SuiteReport;

/// All applicable checks passed.
pub const EXIT_OK: i32 = 0;
/// Load, parse, Hermiticity or configuration failure.
pub const EXIT_USAGE: i32 = 1;
/// The separability rank inequality is violated: the state is entangled.
pub const EXIT_ENTANGLED: i32 = 2;
/// An internally proven implication failed — a bug, not a discovery.
pub const EXIT_INCONSISTENT: i32 = 3;
/// A confirmed gap candidate was found; the full state is dumped for
/// independent review.
pub const EXIT_CANDIDATE: i32 = 4;

/// Environment variable overriding the default tolerance scale.
pub const EPS_ENV_VAR: &str = "PPTGAP_EPS";

/// Tolerance for local dimension `k`, honoring a `PPTGAP_EPS` override
/// (an absolute value used for both cutoffs).
pub fn tolerance_from_env(k: usize) -> Tolerance {
    match std::env::var(EPS_ENV_VAR).ok().and_then(|s| s.parse::<f64>().ok()) {
        Some(eps) if eps >= 0.0 => Tolerance { eps_psd: eps, eps_rank: eps },
        _ => Tolerance::for_local_dim(k),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn render_criteria_report(report: &CriteriaReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("state analysis (k = {})\n", report.k));
    out.push_str(&format!("  psd:                {}\n", yes_no(report.is_psd)));
    out.push_str(&format!("  ppt:                {}\n", yes_no(report.is_ppt)));
    out.push_str(&format!("  spc:                {}\n", yes_no(report.is_spc)));
    out.push_str(&format!("  marginal rank r:    {}\n", report.r));
    out.push_str(&format!("  rank_sym:           {}\n", report.rank_sym));
    out.push_str(&format!("  rank_skew:          {}\n", report.rank_skew));
    out.push_str(&format!(
        "  rank inequality:    {}\n",
        if report.rank_inequality_holds { "holds" } else { "VIOLATED (entangled)" }
    ));
    out.push_str(&format!("  gap candidate:      {}\n", yes_no(report.gap_candidate)));
    out.push_str(&format!("  r ≤ 3 shortcut:     {}\n", yes_no(report.m3_shortcut)));
    if let Some(chain) = report.spc_chain {
        out.push_str(&format!(
            "  spc chain:          {}\n",
            if chain { "holds" } else { "VIOLATED" }
        ));
    }
    if let Some(rank1) = report.rank1_consequence {
        out.push_str(&format!(
            "  rank-1 consequence: {}\n",
            if rank1 { "holds (r ≤ 2)" } else { "VIOLATED" }
        ));
    }
    out
}

pub fn render_suite_report(report: &SuiteReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "suite {} (seed {}): {} — {} checks, {} failed\n",
        report.suite,
        report.seed,
        if report.passed { "PASS" } else { "FAIL" },
        report.checks_total,
        report.checks_failed
    ));
    for line in &report.lines {
        out.push_str(&format!(
            "  [{}] {}: {}\n",
            if line.passed { "ok" } else { "FAIL" },
            line.label,
            line.detail
        ));
    }
    out
}

pub fn render_search_summary(summary: &SearchSummary) -> String {
    let mut out = String::new();
    out.push_str("search summary\n");
    out.push_str(&format!("  iterations:         {}\n", summary.iterations));
    out.push_str(&format!("  evaluated:          {}\n", summary.evaluated));
    out.push_str(&format!("  dropped:            {}\n", summary.dropped));
    out.push_str(&format!("  confirmed:          {}\n", summary.candidates));
    out.push_str(&format!("  near misses:        {}\n", summary.near_misses));
    out.push_str(&format!("  unstable:           {}\n", summary.unstable));
    out.push_str(&format!("  theorem violations: {}\n", summary.theorem_violations));
    match summary.best_soft_gap {
        Some(best) => out.push_str(&format!("  best soft gap:      {best:.6}\n")),
        None => out.push_str("  best soft gap:      n/a\n"),
    }
    let hist: Vec<String> = summary
        .r_histogram
        .iter()
        .map(|(r, count)| format!("r={r}:{count}"))
        .collect();
    out.push_str(&format!("  r histogram:        {}\n", hist.join(" ")));
    out
}

pub fn record_json(record: &SearchRecord) -> String {
    serde_json::to_string(record).expect("serializable record")
}
