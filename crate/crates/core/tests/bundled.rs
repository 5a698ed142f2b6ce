//! Invariants over the bundled scenario files at their default settings.

use std::path::Path;

use omopg_core::{parse_scenario, run_experiment, ExperimentOptions, VerdictStatus, BOUND_NAMES};

const BUNDLED: [&str; 4] = [
    "drift2.scn",
    "drift1.scn",
    "illscaled.scn",
    "stationary2.scn",
];

fn load(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn bundled_scenarios_have_exact_sigma_and_clean_lemma2a() {
    for name in BUNDLED {
        let spec = parse_scenario(&load(name)).unwrap();
        let exp = run_experiment(
            &spec,
            &ExperimentOptions {
                record_inner: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(!exp.report.sigma_surrogate, "{name}: sigma must be exact");
        for (t, verdict) in exp.report.lemma2.a.iter().enumerate() {
            assert!(
                verdict.satisfied(),
                "{name}: lemma2a violated at t = {}",
                t + 1
            );
        }
    }
}

#[test]
fn bundled_scenarios_report_every_bound_without_violations() {
    for name in BUNDLED {
        let spec = parse_scenario(&load(name)).unwrap();
        let exp = run_experiment(
            &spec,
            &ExperimentOptions {
                record_inner: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(exp.report.bounds.len(), BOUND_NAMES.len());
        for (summary, expected_name) in exp.report.bounds.iter().zip(BOUND_NAMES) {
            assert_eq!(summary.name, expected_name);
            assert_ne!(
                summary.verdict.status,
                VerdictStatus::Violated,
                "{name}: {} violated ({:?})",
                summary.name,
                summary.verdict
            );
        }
        // Exactly one of theorem/corollary applies per weight case.
        assert_ne!(
            exp.report.theorem1.is_some(),
            exp.report.corollary.is_some()
        );
    }
}

#[test]
fn cumulative_rows_reconcile_with_final_regret() {
    for name in BUNDLED {
        let spec = parse_scenario(&load(name)).unwrap();
        let exp = run_experiment(&spec, &ExperimentOptions::default()).unwrap();
        assert_eq!(exp.report.rows.len(), spec.horizon * spec.num_objectives);
        for i in 1..=spec.num_objectives {
            let last = exp
                .report
                .rows
                .iter()
                .rev()
                .find(|r| r.i == i)
                .expect("row for every objective");
            let diff = (last.reg_cum - exp.report.dynamic_regret[i - 1]).abs();
            assert!(diff <= 1e-12, "{name}: cumulative regret mismatch {diff}");
        }
        for row in &exp.report.rows {
            assert!(
                row.gap >= -1e-8,
                "{name}: negative regret summand {}",
                row.gap
            );
        }
    }
}
