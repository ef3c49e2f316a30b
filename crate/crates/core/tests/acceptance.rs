//! Runs every acceptance suite and prints one line per criterion.

use std::io::Write;

use fquad_core::verify::{run_suites, suites, Status, VerifyConfig};

/// Written past the test harness capture so the verdicts show in every run.
fn report(line: String) {
    let _ = writeln!(std::io::stderr(), "{line}");
}

#[test]
fn acceptance_criteria() {
    let selected: Vec<_> = suites().iter().collect();
    let outcomes = run_suites(&selected, &VerifyConfig::default());
    assert_eq!(outcomes.len(), 12);
    let mut failed = Vec::new();
    for (i, (suite, o)) in selected.iter().zip(&outcomes).enumerate() {
        let verdict = if o.passed() { "PASS" } else { "FAIL" };
        report(format!(
            "criterion {:>2} [{verdict}] {}: {}",
            i + 1,
            suite.name,
            suite.summary
        ));
        if !o.passed() {
            report(format!("             {}", o.summary_line()));
            for r in o
                .records
                .iter()
                .filter(|r| r.status == Status::Fail)
                .take(10)
            {
                report(format!(
                    "             {}: expected {}, got {}",
                    r.case, r.expected, r.actual
                ));
            }
            failed.push(suite.name);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

#[test]
fn retraction_law_covers_enough_morphisms() {
    let suite = fquad_core::verify::find_suite("retraction-law").unwrap();
    let o = fquad_core::verify::run_suite(suite, &VerifyConfig::default());
    let total: usize = o
        .records
        .iter()
        .map(|r| {
            let count = r.case.rsplit('(').next().unwrap();
            count
                .split_whitespace()
                .next()
                .unwrap()
                .parse::<usize>()
                .unwrap()
        })
        .sum();
    assert!(total >= 100, "only {total} morphisms checked");
}
