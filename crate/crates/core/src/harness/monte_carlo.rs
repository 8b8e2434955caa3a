use rayon::prelude::*;

use crate::domain::ProblemInstance;
use crate::policies::PolicyKind;
use crate::rng::replication_seed;
use crate::sum::NeumaierSum;
use crate::{Error, Result};

use super::audit::{audit_constraint, AuditMode};
use super::config::{ExperimentConfig, SweepPoint};
use super::episode::{run_seeded, EpisodeSpec};

/// Terminal metrics of one replication.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub policy: PolicyKind,
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub alpha: f64,
    pub n: u64,
    pub delta: f64,
    pub replication: u64,
    pub seed: u64,
    pub pseudo_regret: f64,
    pub realized_regret: f64,
    pub min_pseudo_budget: f64,
    /// Pseudo-budget violation for stochastic rewards, realized-reward
    /// violation for adversarial ones.
    pub violated: bool,
    pub first_violation_round: Option<u64>,
    pub pulls: Vec<u64>,
}

/// Aggregate over the replications of one (sweep point, policy) pair.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats {
    pub policy: PolicyKind,
    pub sweep_var: &'static str,
    pub sweep_value: f64,
    pub replications: u64,
    pub mean_pseudo_regret: f64,
    /// Standard error of the mean pseudo-regret (0 for a single replication).
    pub stderr: f64,
    pub mean_realized_regret: f64,
    pub violation_rate: f64,
    pub mean_min_budget: f64,
    pub mean_pulls: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloOutput {
    /// Ordered by sweep point, then policy, then replication.
    pub runs: Vec<RunRecord>,
    /// Ordered by sweep point, then policy.
    pub summaries: Vec<SummaryStats>,
}

/// Runs every (sweep point, policy, replication) episode on a pool of
/// `threads` workers (all cores when `None`).
///
/// Replication `r` uses seed `seed_base ^ r` for every policy, so policies
/// see the same reward draws.
pub fn monte_carlo(config: &ExperimentConfig, threads: Option<usize>) -> Result<MonteCarloOutput> {
    config.validate()?;
    let points = config.points()?;
    let jobs: Vec<(usize, usize, u64)> = (0..points.len())
        .flat_map(|p| {
            (0..config.policies.len())
                .flat_map(move |k| (0..config.replications).map(move |r| (p, k, r)))
        })
        .collect();

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::config("threads", e.to_string()))?;

    let runs: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(p, k, r)| run_one(config, &points[p], config.policies[k], r))
            .collect::<Result<_>>()
    })?;

    let per_group = config.replications as usize;
    let summaries = runs.chunks(per_group).map(aggregate).collect();
    Ok(MonteCarloOutput { runs, summaries })
}

fn run_one(config: &ExperimentConfig, point: &SweepPoint, policy: PolicyKind, replication: u64) -> Result<RunRecord> {
    let seed = replication_seed(config.seed_base, replication);
    let spec = EpisodeSpec {
        policy,
        instance: point.instance.clone(),
        policy_instance: point.policy_instance.clone(),
        psi: config.psi,
        noise: config.noise,
        environment: config.environment.clone(),
    };
    let wrap = |e: Error| Error::Run {
        run: format!(
            "policy {policy}, {}={}, replication {replication}, seed {seed}",
            point.var, point.value
        ),
        source: Box::new(e),
    };
    let (trace, _) = run_seeded(&spec, seed, false).map_err(wrap)?;
    let instance: &ProblemInstance = &point.instance;
    let (violated, first_violation_round) = if config.environment.is_adversarial() {
        let audit = audit_constraint(&trace, instance, AuditMode::Realized);
        (audit.violated, audit.first_round)
    } else {
        let first = trace.summary.first_violation_round;
        (first.is_some(), first)
    };
    Ok(RunRecord {
        policy,
        sweep_var: point.var,
        sweep_value: point.value,
        alpha: instance.alpha(),
        n: instance.horizon(),
        delta: instance.delta(),
        replication,
        seed,
        pseudo_regret: trace.summary.pseudo_regret,
        realized_regret: trace.summary.realized_regret,
        min_pseudo_budget: trace.summary.min_pseudo_budget,
        violated,
        first_violation_round,
        pulls: trace.summary.pulls,
    })
}

/// Summarizes the replications of one group, in the given order.
///
/// # Panics
/// If `runs` is empty.
pub fn aggregate(runs: &[RunRecord]) -> SummaryStats {
    let first = &runs[0];
    let count = runs.len() as f64;
    let mean_of = |f: &dyn Fn(&RunRecord) -> f64| runs.iter().map(f).collect::<NeumaierSum>().value() / count;

    let mean = mean_of(&|r| r.pseudo_regret);
    let stderr = if runs.len() > 1 {
        let ss: NeumaierSum = runs.iter().map(|r| (r.pseudo_regret - mean).powi(2)).collect();
        (ss.value() / (count - 1.0)).sqrt() / count.sqrt()
    } else {
        0.0
    };
    let mean_pulls = (0..first.pulls.len())
        .map(|arm| mean_of(&|r| r.pulls[arm] as f64))
        .collect();

    SummaryStats {
        policy: first.policy,
        sweep_var: first.sweep_var,
        sweep_value: first.sweep_value,
        replications: runs.len() as u64,
        mean_pseudo_regret: mean,
        stderr,
        mean_realized_regret: mean_of(&|r| r.realized_regret),
        violation_rate: runs.iter().filter(|r| r.violated).count() as f64 / count,
        mean_min_budget: mean_of(&|r| r.min_pseudo_budget),
        mean_pulls,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{DeltaSpec, Sweep};

    fn config() -> ExperimentConfig {
        let mut c = ExperimentConfig::new(vec![0.5, 0.6, 0.4], 0.1, 300, DeltaSpec::InverseHorizon);
        c.policies = vec![PolicyKind::Ucb, PolicyKind::Cucb];
        c.replications = 5;
        c.seed_base = 11;
        c.sweep = Sweep::Alpha(vec![0.1, 0.5]);
        c
    }

    #[test]
    fn ordering_and_counts() {
        let out = monte_carlo(&config(), Some(2)).unwrap();
        assert_eq!(out.runs.len(), 2 * 2 * 5);
        assert_eq!(out.summaries.len(), 4);
        let keys: Vec<_> = out.runs.iter().map(|r| (r.alpha, r.policy, r.replication)).collect();
        let mut expected = Vec::new();
        for alpha in [0.1, 0.5] {
            for policy in [PolicyKind::Ucb, PolicyKind::Cucb] {
                expected.extend((0..5).map(|r| (alpha, policy, r)));
            }
        }
        assert_eq!(keys, expected);
        assert_eq!(out.summaries[1].policy, PolicyKind::Cucb);
        assert_eq!(out.summaries[2].sweep_value, 0.5);
    }

    #[test]
    fn single_replication_summary_matches_trace() {
        let mut c = config();
        c.replications = 1;
        c.sweep = Sweep::None;
        let out = monte_carlo(&c, Some(1)).unwrap();
        let s = &out.summaries[0];
        let r = &out.runs[0];
        assert_eq!(s.mean_pseudo_regret, r.pseudo_regret);
        assert_eq!(s.stderr, 0.0);
        assert_eq!(s.mean_min_budget, r.min_pseudo_budget);
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let a = monte_carlo(&config(), Some(1)).unwrap();
        let b = monte_carlo(&config(), Some(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn policies_share_reward_draws() {
        let out = monte_carlo(&config(), Some(2)).unwrap();
        assert_eq!(out.runs[0].seed, out.runs[5].seed);
        assert_eq!(out.runs[0].seed, 11);
    }
}
