use std::sync::Arc;

use consbandit::confidence::{ConfidenceSchedule, PsiVariant};
use consbandit::domain::{pseudo_regret_by_round, ProblemInstance};
use consbandit::environments::RewardTable;
use consbandit::harness::{
    audit_constraint, format_float, lower_bound_b, monte_carlo, run_seeded, AuditMode, DeltaSpec,
    EnvKind, EpisodeSpec, ExperimentConfig,
};
use consbandit::policies::{argmax, expectation_mode_params, PolicyKind};
use consbandit::sum::{sum, NeumaierSum};
use proptest::prelude::*;

fn means(k: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.05f64..0.95, k + 1)
}

fn instance() -> impl Strategy<Value = ProblemInstance> {
    (1usize..5)
        .prop_flat_map(|k| (means(k), 0.01f64..1.0, 0.001f64..0.5, 20u64..300))
        .prop_map(|(m, a, d, n)| ProblemInstance::new(m, a, d, n).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn regret_is_nonnegative_and_both_forms_agree(inst in instance(), seed in any::<u64>(), p in 0usize..8) {
        let spec = EpisodeSpec::new(PolicyKind::ALL[p], inst.clone());
        let (trace, _) = run_seeded(&spec, seed, false).unwrap();
        trace.validate().unwrap();
        let r = trace.summary.pseudo_regret;
        prop_assert!(r >= -1e-9);
        prop_assert!((pseudo_regret_by_round(&trace, &inst).unwrap() - r).abs() < 1e-7);
        prop_assert_eq!(trace.summary.pulls.iter().sum::<u64>(), inst.horizon());
    }

    #[test]
    fn pseudo_audit_matches_ledger(inst in instance(), seed in any::<u64>()) {
        let spec = EpisodeSpec::new(PolicyKind::UnbalancedMoss, inst.clone());
        let trace = run_seeded(&spec, seed, false).unwrap().0;
        let audit = audit_constraint(&trace, &inst, AuditMode::Pseudo);
        prop_assert_eq!(audit.first_round, trace.summary.first_violation_round);
        prop_assert!((audit.min_budget - trace.summary.min_pseudo_budget).abs() < 1e-9);
    }

    #[test]
    fn alpha_one_makes_cucb_plain_ucb(m in (1usize..5).prop_flat_map(means), seed in any::<u64>()) {
        let inst = ProblemInstance::new(m, 1.0, 0.05, 200).unwrap();
        let a = run_seeded(&EpisodeSpec::new(PolicyKind::Ucb, inst.clone()), seed, false).unwrap().0;
        let b = run_seeded(&EpisodeSpec::new(PolicyKind::Cucb, inst), seed, false).unwrap().0;
        prop_assert!(a.arms().eq(b.arms()));
    }

    #[test]
    fn safe_play_never_breaks_the_realized_constraint(
        rows in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 3), 50..200),
        mu0 in 0.05f64..1.0,
        alpha in 0.01f64..1.0,
        seed in any::<u64>(),
    ) {
        let n = rows.len() as u64;
        let table = Arc::new(RewardTable::from_rows(&rows).unwrap());
        let inst = ProblemInstance::new(vec![mu0, 0.5, 0.5, 0.5], alpha, 0.1, n).unwrap();
        let mut spec = EpisodeSpec::new(PolicyKind::SafeExp3Ix, inst.clone());
        spec.environment = EnvKind::Table { path: String::new(), table };
        let trace = run_seeded(&spec, seed, false).unwrap().0;
        prop_assert!(!audit_constraint(&trace, &inst, AuditMode::Realized).violated);
    }

    #[test]
    fn all_default_budget_grows_linearly(mu0 in 0.05f64..1.0, alpha in 0.0f64..1.0, n in 1u64..500) {
        let inst = ProblemInstance::new(vec![mu0, 1.0], alpha, 0.1, n).unwrap();
        let table = Arc::new(RewardTable::from_rows(&vec![vec![0.0]; n as usize]).unwrap());
        // BudgetFirst opens with a run of default pulls.
        let mut spec = EpisodeSpec::new(PolicyKind::BudgetFirst, inst.clone());
        spec.environment = EnvKind::Table { path: String::new(), table };
        let trace = run_seeded(&spec, 0, false).unwrap().0;
        for row in trace.rows.iter().take_while(|r| r.arm == 0) {
            let expected = alpha * mu0 * row.round as f64;
            prop_assert!((row.pseudo_budget - expected).abs() < 1e-9 * (1.0 + expected));
        }
    }

    #[test]
    fn psi_is_nondecreasing(k in 1usize..20, delta in 0.001f64..0.9, s in 1u64..1_000_000) {
        for variant in [PsiVariant::Simple, PsiVariant::Refined] {
            let sch = ConfidenceSchedule::new(variant, k, delta).unwrap();
            prop_assert!(sch.psi(s + 1).unwrap() >= sch.psi(s).unwrap());
            prop_assert!(sch.radius_for(0).is_infinite());
        }
    }

    #[test]
    fn compensated_sum_is_order_insensitive(mut xs in prop::collection::vec(-1e6f64..1e6, 1..200)) {
        let forward = sum(xs.iter().copied());
        xs.reverse();
        let backward: NeumaierSum = xs.iter().copied().collect();
        prop_assert!((forward - backward.value()).abs() <= 1e-9 * (1.0 + forward.abs()));
    }

    #[test]
    fn argmax_takes_lowest_index_among_ties(xs in prop::collection::vec(0u8..4, 1..20)) {
        let values: Vec<f64> = xs.iter().map(|&x| x as f64).collect();
        let i = argmax(&values);
        let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(values[i], max);
        prop_assert!(values[..i].iter().all(|&v| v < max));
    }

    #[test]
    fn floats_survive_formatting(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(format_float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn expectation_mode_tightens_alpha(alpha in 0.0f64..=1.0, n in 2u64..1_000_000) {
        match expectation_mode_params(alpha, n) {
            Ok((d, a)) => {
                prop_assert!(alpha >= 2.0 / n as f64);
                prop_assert_eq!(d, 1.0 / n as f64);
                prop_assert!(a <= alpha && a > 0.0);
            }
            Err(_) => prop_assert!(alpha < 2.0 / n as f64),
        }
    }

    #[test]
    fn lower_bound_shrinks_as_alpha_grows(a in 0.01f64..0.5, k in 1usize..10, n in 10u64..100_000) {
        let tight = lower_bound_b(k, n, a, 0.5).value;
        let loose = lower_bound_b(k, n, a * 2.0, 0.5).value;
        prop_assert!(loose <= tight);
    }

    #[test]
    fn table_csv_round_trip(rows in prop::collection::vec(prop::collection::vec(0.0f64..=1.0, 2), 1..30)) {
        let table = RewardTable::from_rows(&rows).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        prop_assert_eq!(RewardTable::from_csv(buf.as_slice()).unwrap(), table);
    }
}

#[test]
fn monte_carlo_is_thread_count_invariant() {
    let mut c = ExperimentConfig::new(vec![0.5, 0.6, 0.4, 0.4], 0.2, 400, DeltaSpec::InverseHorizon);
    c.policies = PolicyKind::ALL.to_vec();
    c.replications = 6;
    let one = monte_carlo(&c, Some(1)).unwrap();
    let many = monte_carlo(&c, Some(3)).unwrap();
    assert_eq!(one, many);
}

#[test]
fn stderr_shrinks_with_more_replications() {
    let mut c = ExperimentConfig::new(vec![0.5, 0.6, 0.4], 0.1, 500, DeltaSpec::InverseHorizon);
    c.policies = vec![PolicyKind::Ucb];
    c.replications = 400;
    let small = monte_carlo(&c, None).unwrap().summaries[0].stderr;
    c.replications = 1600;
    let large = monte_carlo(&c, None).unwrap().summaries[0].stderr;
    let ratio = small / large;
    assert!((1.6..2.4).contains(&ratio), "{ratio}");
}
