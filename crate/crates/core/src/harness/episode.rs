use crate::confidence::PsiVariant;
use crate::domain::{
    pseudo_regret_from_pulls, BudgetLedger, EpisodeTrace, ProblemInstance, RewardMatrix,
    RoundOutcome, TraceRow, TraceSummary,
};
use crate::environments::{AdversarialEnv, Environment, Noise, StochasticEnv};
use crate::policies::{Policy, PolicyKind};
use crate::rng::{self, Stream};
use crate::sum::NeumaierSum;
use crate::{Error, Result};

use super::config::EnvKind;

/// Plays `policy` against `env` for `instance.horizon()` rounds.
///
/// With `retain_rewards` the full reward matrix (all arms, every round) is
/// returned alongside the trace.
pub fn run_episode(
    policy: &mut dyn Policy,
    env: &mut dyn Environment,
    instance: &ProblemInstance,
    retain_rewards: bool,
) -> Result<(EpisodeTrace, Option<RewardMatrix>)> {
    let arms = instance.num_arms();
    if policy.num_arms() != arms || env.num_arms() != arms {
        return Err(Error::ArmCountMismatch {
            policy: policy.num_arms(),
            environment: env.num_arms(),
        });
    }
    let n = instance.horizon();
    let mut ledger = BudgetLedger::for_instance(instance);
    let mut column_sums = vec![NeumaierSum::new(); arms];
    let mut pulls = vec![0u64; arms];
    let mut row = vec![0.0; arms];
    let mut rows = Vec::with_capacity(n as usize);
    let mut matrix = retain_rewards.then(|| RewardMatrix::new(arms));

    for t in 1..=n {
        let decision = policy.select(t);
        if decision.arm >= arms {
            return Err(Error::MalformedTrace(format!(
                "{} chose arm {} at round {t}",
                policy.name(),
                decision.arm
            )));
        }
        env.rewards(t, &mut row)?;
        let reward = row[decision.arm];
        policy.observe(t, decision.arm, reward);
        ledger.update(
            RoundOutcome {
                round: t,
                arm: decision.arm,
                reward,
                default_reward: row[0],
            },
            instance,
        )?;
        for (sum, &x) in column_sums.iter_mut().zip(&row) {
            sum.add(x);
        }
        if let Some(m) = matrix.as_mut() {
            m.push_row(&row)?;
        }
        pulls[decision.arm] += 1;
        rows.push(TraceRow {
            round: t,
            arm: decision.arm,
            proposed: decision.proposed,
            budget_bound: decision.budget_bound,
            reward,
            pseudo_budget: ledger.pseudo_budget(),
            true_budget: ledger.true_budget(),
            safe_mode: decision.safe_mode,
        });
    }

    let best_fixed = column_sums
        .iter()
        .map(NeumaierSum::value)
        .fold(f64::NEG_INFINITY, f64::max);
    let summary = TraceSummary {
        pseudo_regret: pseudo_regret_from_pulls(&pulls, instance),
        realized_regret: best_fixed - ledger.played_reward_sum(),
        pulls,
        min_pseudo_budget: ledger.min_pseudo_budget(),
        first_violation_round: ledger.first_violation_round(),
        min_true_budget: ledger.min_true_budget(),
        first_true_violation_round: ledger.first_true_violation_round(),
    };
    Ok((
        EpisodeTrace {
            num_arms: arms,
            rows,
            summary,
        },
        matrix,
    ))
}

/// Everything needed to replay one episode from a seed.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeSpec {
    pub policy: PolicyKind,
    /// Problem the budget and regret are measured against.
    pub instance: ProblemInstance,
    /// Parameters the policy is built with; usually equal to `instance`.
    pub policy_instance: ProblemInstance,
    pub psi: PsiVariant,
    pub noise: Noise,
    pub environment: EnvKind,
}

impl EpisodeSpec {
    pub fn new(policy: PolicyKind, instance: ProblemInstance) -> Self {
        Self {
            policy,
            policy_instance: instance.clone(),
            instance,
            psi: PsiVariant::default(),
            noise: Noise::default(),
            environment: EnvKind::Stochastic,
        }
    }

    pub fn environment(&self, seed: u64) -> Result<Box<dyn Environment>> {
        let means = self.instance.means().to_vec();
        Ok(match &self.environment {
            EnvKind::Stochastic => Box::new(StochasticEnv::new(
                means,
                self.noise,
                rng::stream(seed, Stream::Environment),
            )),
            EnvKind::Adversary(adversary) => Box::new(AdversarialEnv::builtin(
                *adversary,
                means,
                self.instance.horizon(),
                seed,
            )?),
            EnvKind::Table { table, .. } => {
                Box::new(AdversarialEnv::from_table(self.instance.mu0(), table.clone())?)
            }
        })
    }

    pub fn policy(&self, seed: u64) -> Result<Box<dyn Policy>> {
        self.policy
            .build(&self.policy_instance, self.psi, rng::stream(seed, Stream::Policy))
    }
}

/// Builds the environment and policy for `seed` and runs one episode.
pub fn run_seeded(
    spec: &EpisodeSpec,
    seed: u64,
    retain_rewards: bool,
) -> Result<(EpisodeTrace, Option<RewardMatrix>)> {
    let mut env = spec.environment(seed)?;
    let mut policy = spec.policy(seed)?;
    run_episode(policy.as_mut(), env.as_mut(), &spec.instance, retain_rewards)
}
