//! Domain types shared by every policy and by the harness: per-arm
//! statistics, the problem instance, budget accounting and regret.

use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// Running statistics of one arm.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ArmStats {
    pulls: u64,
    reward_sum: NeumaierSum,
}

impl ArmStats {
    pub const fn new() -> Self {
        Self {
            pulls: 0,
            reward_sum: NeumaierSum::new(),
        }
    }

    /// Records one observed reward.
    pub fn update(&mut self, reward: f64) {
        self.pulls += 1;
        self.reward_sum.add(reward);
    }

    /// Returns a copy with one more observation.
    #[must_use]
    pub fn updated(mut self, reward: f64) -> Self {
        self.update(reward);
        self
    }

    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn reward_sum(&self) -> f64 {
        self.reward_sum.value()
    }

    /// Empirical mean; zero for an arm that was never pulled.
    pub fn empirical_mean(&self) -> f64 {
        if self.pulls == 0 {
            0.0
        } else {
            self.reward_sum.value() / self.pulls as f64
        }
    }
}

/// A conservative bandit problem: arm means (index 0 is the default arm),
/// the allowed loss fraction `alpha`, confidence `delta` and horizon.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemInstance {
    means: Vec<f64>,
    alpha: f64,
    delta: f64,
    horizon: u64,
}

impl ProblemInstance {
    pub fn new(means: Vec<f64>, alpha: f64, delta: f64, horizon: u64) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::config(
                "means",
                "need the default arm and at least one alternative",
            ));
        }
        if let Some((i, m)) = means
            .iter()
            .enumerate()
            .find(|(_, m)| !(0.0..=1.0).contains(*m))
        {
            return Err(Error::config("means", format!("means[{i}] = {m} is outside [0, 1]")));
        }
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::config("alpha", format!("{alpha} is outside (0, 1]")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::config("delta", format!("{delta} is outside (0, 1)")));
        }
        if horizon == 0 {
            return Err(Error::config("n", "horizon must be at least 1"));
        }
        Ok(Self {
            means,
            alpha,
            delta,
            horizon,
        })
    }

    /// Number of non-default arms.
    pub fn k(&self) -> usize {
        self.means.len() - 1
    }

    /// Total number of arms, `K + 1`.
    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn mean(&self, arm: usize) -> f64 {
        self.means[arm]
    }

    /// Mean of the default arm.
    pub fn mu0(&self) -> f64 {
        self.means[0]
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn best_mean(&self) -> f64 {
        self.means.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gap of every arm to the best one.
    pub fn gaps(&self) -> Vec<f64> {
        let best = self.best_mean();
        self.means.iter().map(|m| best - m).collect()
    }

    pub fn gap(&self, arm: usize) -> f64 {
        self.best_mean() - self.means[arm]
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.means.clone(), alpha, self.delta, self.horizon)
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.means.clone(), self.alpha, delta, self.horizon)
    }

    pub fn with_horizon(&self, horizon: u64) -> Result<Self> {
        Self::new(self.means.clone(), self.alpha, self.delta, horizon)
    }
}

/// What happened in one round, as seen by the budget ledger.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoundOutcome {
    pub round: u64,
    pub arm: usize,
    /// Reward of the arm that was played.
    pub reward: f64,
    /// Reward the default arm produced this round, whether played or not.
    pub default_reward: f64,
}

/// Tracks the realized budget, the mean-reward (pseudo) budget and the
/// pre-play lower bound used by the safe wrapper.
///
/// Minimums include the round-0 baseline of 0.
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetLedger {
    alpha: f64,
    mu0: f64,
    round: u64,
    played_rewards: NeumaierSum,
    default_rewards: NeumaierSum,
    played_means: NeumaierSum,
    true_budget: f64,
    pseudo_budget: f64,
    pre_play_budget: f64,
    min_pseudo_budget: f64,
    min_true_budget: f64,
    first_violation_round: Option<u64>,
    first_true_violation_round: Option<u64>,
}

impl BudgetLedger {
    pub fn new(alpha: f64, mu0: f64) -> Self {
        Self {
            alpha,
            mu0,
            round: 0,
            played_rewards: NeumaierSum::new(),
            default_rewards: NeumaierSum::new(),
            played_means: NeumaierSum::new(),
            true_budget: 0.0,
            pseudo_budget: 0.0,
            pre_play_budget: 0.0,
            min_pseudo_budget: 0.0,
            min_true_budget: 0.0,
            first_violation_round: None,
            first_true_violation_round: None,
        }
    }

    pub fn for_instance(instance: &ProblemInstance) -> Self {
        Self::new(instance.alpha(), instance.mu0())
    }

    /// Advances both budgets by one round. Rounds must arrive as 1, 2, 3, ...
    pub fn update(&mut self, outcome: RoundOutcome, instance: &ProblemInstance) -> Result<()> {
        let expected = self.round + 1;
        if outcome.round != expected {
            return Err(Error::OutOfOrderRound {
                expected,
                got: outcome.round,
            });
        }
        if outcome.arm >= instance.num_arms() {
            return Err(Error::MalformedTrace(format!(
                "arm {} outside 0..={}",
                outcome.arm,
                instance.k()
            )));
        }
        let t = outcome.round as f64;
        let floor = (1.0 - self.alpha) * t * self.mu0;

        // Lower bound on the budget before this round's reward is known.
        self.pre_play_budget = self.played_rewards.value() - floor;

        self.played_rewards.add(outcome.reward);
        self.default_rewards.add(outcome.default_reward);
        self.played_means.add(instance.mean(outcome.arm));

        self.true_budget =
            self.played_rewards.value() - (1.0 - self.alpha) * self.default_rewards.value();
        self.pseudo_budget = self.played_means.value() - floor;
        self.round = outcome.round;

        if self.pseudo_budget < self.min_pseudo_budget {
            self.min_pseudo_budget = self.pseudo_budget;
        }
        if self.pseudo_budget < 0.0 && self.first_violation_round.is_none() {
            self.first_violation_round = Some(outcome.round);
        }
        if self.true_budget < self.min_true_budget {
            self.min_true_budget = self.true_budget;
        }
        if self.true_budget < 0.0 && self.first_true_violation_round.is_none() {
            self.first_true_violation_round = Some(outcome.round);
        }
        Ok(())
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    /// Realized budget `Z_t`.
    pub fn true_budget(&self) -> f64 {
        self.true_budget
    }

    /// Budget on mean rewards `Z~_t`.
    pub fn pseudo_budget(&self) -> f64 {
        self.pseudo_budget
    }

    /// `sum_{s<t} X_s - (1 - alpha) mu0 t` for the last recorded round.
    pub fn pre_play_budget(&self) -> f64 {
        self.pre_play_budget
    }

    pub fn min_pseudo_budget(&self) -> f64 {
        self.min_pseudo_budget
    }

    pub fn min_true_budget(&self) -> f64 {
        self.min_true_budget
    }

    pub fn first_violation_round(&self) -> Option<u64> {
        self.first_violation_round
    }

    pub fn first_true_violation_round(&self) -> Option<u64> {
        self.first_true_violation_round
    }

    pub fn played_reward_sum(&self) -> f64 {
        self.played_rewards.value()
    }
}

/// One round of an episode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow {
    pub round: u64,
    /// Arm actually played.
    pub arm: usize,
    /// Arm the underlying index policy wanted to play, when there is one.
    pub proposed: Option<usize>,
    /// Budget lower bound the decision was based on, when there is one.
    pub budget_bound: Option<f64>,
    pub reward: f64,
    pub pseudo_budget: f64,
    pub true_budget: f64,
    /// Whether the conservative branch decided this round.
    pub safe_mode: bool,
}

/// Terminal metrics of an episode.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceSummary {
    pub pulls: Vec<u64>,
    pub pseudo_regret: f64,
    pub realized_regret: f64,
    pub min_pseudo_budget: f64,
    pub first_violation_round: Option<u64>,
    pub min_true_budget: f64,
    pub first_true_violation_round: Option<u64>,
}

/// Complete record of an episode.
#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeTrace {
    pub num_arms: usize,
    pub rows: Vec<TraceRow>,
    pub summary: TraceSummary,
}

impl EpisodeTrace {
    pub fn horizon(&self) -> u64 {
        self.rows.len() as u64
    }

    /// Arms played, in round order.
    pub fn arms(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.arm)
    }

    /// Checks the structural invariants: rounds `1..=n` consecutive, arm
    /// indices in range, pull counts summing to `n`.
    pub fn validate(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.round != i as u64 + 1 {
                return Err(Error::MalformedTrace(format!(
                    "row {i} has round {} (expected {})",
                    row.round,
                    i + 1
                )));
            }
        }
        let counted = pull_counts(self.arms(), self.num_arms)?;
        if counted != self.summary.pulls {
            return Err(Error::MalformedTrace(
                "pull counts disagree with the rows".into(),
            ));
        }
        Ok(())
    }
}

/// Per-arm pull counts of an arm sequence.
pub fn pull_counts(arms: impl IntoIterator<Item = usize>, num_arms: usize) -> Result<Vec<u64>> {
    let mut pulls = vec![0u64; num_arms];
    for arm in arms {
        let slot = pulls.get_mut(arm).ok_or_else(|| {
            Error::MalformedTrace(format!("arm {arm} outside 0..{num_arms}"))
        })?;
        *slot += 1;
    }
    Ok(pulls)
}

/// Pseudo-regret `sum_i T_i(n) * gap_i`.
pub fn pseudo_regret(trace: &EpisodeTrace, instance: &ProblemInstance) -> Result<f64> {
    let pulls = pull_counts(trace.arms(), instance.num_arms())?;
    Ok(pseudo_regret_from_pulls(&pulls, instance))
}

pub fn pseudo_regret_from_pulls(pulls: &[u64], instance: &ProblemInstance) -> f64 {
    let best = instance.best_mean();
    crate::sum::sum(
        pulls
            .iter()
            .zip(instance.means())
            .map(|(&n, &m)| n as f64 * (best - m)),
    )
}

/// Pseudo-regret in its per-round form `n * mu_star - sum_t mu_{I_t}`.
pub fn pseudo_regret_by_round(trace: &EpisodeTrace, instance: &ProblemInstance) -> Result<f64> {
    let mut played = NeumaierSum::new();
    for arm in trace.arms() {
        if arm >= instance.num_arms() {
            return Err(Error::MalformedTrace(format!("arm {arm} outside 0..={}", instance.k())));
        }
        played.add(instance.mean(arm));
    }
    Ok(trace.horizon() as f64 * instance.best_mean() - played.value())
}

/// Full table of rewards `X_{t,i}` for rounds `1..=n` and arms `0..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardMatrix {
    num_arms: usize,
    values: Vec<f64>,
}

impl RewardMatrix {
    pub fn new(num_arms: usize) -> Self {
        Self {
            num_arms,
            values: Vec::new(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let num_arms = rows.first().map_or(0, Vec::len);
        let mut m = Self::new(num_arms);
        for row in rows {
            m.push_row(&row)?;
        }
        Ok(m)
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.num_arms {
            return Err(Error::DimensionMismatch(format!(
                "row has {} arms, matrix has {}",
                row.len(),
                self.num_arms
            )));
        }
        self.values.extend_from_slice(row);
        Ok(())
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    pub fn rounds(&self) -> u64 {
        self.values.len().checked_div(self.num_arms).unwrap_or(0) as u64
    }

    /// Rewards of round `t` (1-based).
    pub fn row(&self, t: u64) -> &[f64] {
        let start = (t as usize - 1) * self.num_arms;
        &self.values[start..start + self.num_arms]
    }

    /// Cumulative reward of every fixed arm.
    pub fn column_sums(&self) -> Vec<f64> {
        let mut sums = vec![NeumaierSum::new(); self.num_arms];
        for row in self.values.chunks_exact(self.num_arms.max(1)) {
            for (s, &x) in sums.iter_mut().zip(row) {
                s.add(x);
            }
        }
        sums.iter().map(NeumaierSum::value).collect()
    }
}

/// Regret against the best fixed arm in hindsight:
/// `max_i sum_t X_{t,i} - sum_t X_{t,I_t}`.
pub fn realized_regret(trace: &EpisodeTrace, rewards: &RewardMatrix) -> Result<f64> {
    if rewards.rounds() != trace.horizon() || rewards.num_arms() != trace.num_arms {
        return Err(Error::DimensionMismatch(format!(
            "trace is {}x{}, reward matrix is {}x{}",
            trace.horizon(),
            trace.num_arms,
            rewards.rounds(),
            rewards.num_arms()
        )));
    }
    let mut earned = NeumaierSum::new();
    for row in &trace.rows {
        let x = rewards.row(row.round).get(row.arm).ok_or_else(|| {
            Error::MalformedTrace(format!("arm {} outside 0..{}", row.arm, trace.num_arms))
        })?;
        earned.add(*x);
    }
    Ok(best_fixed_arm_sum(&rewards.column_sums()) - earned.value())
}

pub(crate) fn best_fixed_arm_sum(column_sums: &[f64]) -> f64 {
    column_sums.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    fn trace_of(arms: &[usize], num_arms: usize) -> EpisodeTrace {
        let rows = arms
            .iter()
            .enumerate()
            .map(|(i, &arm)| TraceRow {
                round: i as u64 + 1,
                arm,
                proposed: None,
                budget_bound: None,
                reward: 0.0,
                pseudo_budget: 0.0,
                true_budget: 0.0,
                safe_mode: false,
            })
            .collect();
        let mut pulls = vec![0; num_arms];
        for &a in arms {
            if a < num_arms {
                pulls[a] += 1;
            }
        }
        EpisodeTrace {
            num_arms,
            rows,
            summary: TraceSummary {
                pulls,
                pseudo_regret: 0.0,
                realized_regret: 0.0,
                min_pseudo_budget: 0.0,
                first_violation_round: None,
                min_true_budget: 0.0,
                first_true_violation_round: None,
            },
        }
    }

    #[test]
    fn stats_single_observation() {
        let s = ArmStats::new().updated(0.7);
        assert_eq!(s.pulls(), 1);
        assert!(close(s.reward_sum(), 0.7));
        assert!(close(s.empirical_mean(), 0.7));
    }

    #[test]
    fn unpulled_arm_has_zero_mean() {
        assert_eq!(ArmStats::new().empirical_mean(), 0.0);
    }

    #[test]
    fn stats_accept_negative_rewards() {
        let mut s = ArmStats::new();
        for r in [0.5, 0.4, 0.3] {
            s.update(r);
        }
        assert!(close(s.reward_sum(), 1.2));
        s.update(-0.4);
        assert_eq!(s.pulls(), 4);
        assert!(close(s.reward_sum(), 0.8));
        assert!(close(s.empirical_mean(), 0.2));
    }

    #[test]
    fn instance_validation() {
        assert!(ProblemInstance::new(vec![0.5, 0.6], 0.1, 0.1, 10).is_ok());
        assert!(ProblemInstance::new(vec![0.5], 0.1, 0.1, 10).is_err());
        assert!(ProblemInstance::new(vec![0.5, 1.2], 0.1, 0.1, 10).is_err());
        assert!(ProblemInstance::new(vec![0.5, 0.6], 0.0, 0.1, 10).is_err());
        assert!(ProblemInstance::new(vec![0.5, 0.6], 1.0, 0.1, 10).is_ok());
        assert!(ProblemInstance::new(vec![0.5, 0.6], 0.1, 1.0, 10).is_err());
        assert!(ProblemInstance::new(vec![0.5, 0.6], 0.1, 0.1, 0).is_err());
    }

    #[test]
    fn gaps_are_nonnegative() {
        let inst = ProblemInstance::new(vec![0.5, 0.6, 0.4], 0.1, 0.1, 10).unwrap();
        assert!(inst.gaps().iter().all(|&g| g >= 0.0));
        assert!(close(inst.gap(0), 0.1));
        assert_eq!(inst.gap(1), 0.0);
    }

    #[test]
    fn pseudo_regret_examples() {
        let inst = ProblemInstance::new(vec![0.5, 0.6, 0.4], 0.1, 0.1, 10).unwrap();
        let mut arms = vec![0; 5];
        arms.extend([1; 3]);
        arms.extend([2; 2]);
        let t = trace_of(&arms, 3);
        assert!(close(pseudo_regret(&t, &inst).unwrap(), 0.9));
        assert!(close(pseudo_regret_by_round(&t, &inst).unwrap(), 0.9));

        let optimal = trace_of(&[1; 10], 3);
        assert_eq!(pseudo_regret(&optimal, &inst).unwrap(), 0.0);

        let inst2 = ProblemInstance::new(vec![0.5, 0.6], 0.1, 0.1, 10).unwrap();
        let all_default = trace_of(&[0; 10], 2);
        assert!(close(pseudo_regret(&all_default, &inst2).unwrap(), 1.0));
    }

    #[test]
    fn pseudo_regret_rejects_bad_arm() {
        let inst = ProblemInstance::new(vec![0.5, 0.6], 0.1, 0.1, 10).unwrap();
        let t = trace_of(&[0, 3], 2);
        assert!(matches!(pseudo_regret(&t, &inst), Err(Error::MalformedTrace(_))));
        assert!(t.validate().is_err());
    }

    #[test]
    fn realized_regret_examples() {
        let rewards = RewardMatrix::from_rows(vec![vec![0.5, 1.0], vec![0.5, 0.0]]).unwrap();
        assert_eq!(realized_regret(&trace_of(&[1, 1], 2), &rewards).unwrap(), 0.0);
        assert_eq!(realized_regret(&trace_of(&[0, 0], 2), &rewards).unwrap(), 0.0);
        assert!(close(realized_regret(&trace_of(&[1, 0], 2), &rewards).unwrap(), -0.5));
        assert!(matches!(
            realized_regret(&trace_of(&[1], 2), &rewards),
            Err(Error::DimensionMismatch(_))
        ));
    }

    fn outcome(round: u64, arm: usize, reward: f64, default_reward: f64) -> RoundOutcome {
        RoundOutcome {
            round,
            arm,
            reward,
            default_reward,
        }
    }

    #[test]
    fn default_arm_grows_budget_by_alpha_mu0() {
        let inst = ProblemInstance::new(vec![0.5, 0.6, 0.45], 0.1, 0.1, 10).unwrap();
        let mut ledger = BudgetLedger::for_instance(&inst);
        ledger.update(outcome(1, 0, 0.5, 0.5), &inst).unwrap();
        assert!(close(ledger.pseudo_budget(), 0.05));
        // mu_2 = (1 - alpha) mu0: budget unchanged.
        ledger.update(outcome(2, 2, 0.45, 0.5), &inst).unwrap();
        assert!(close(ledger.pseudo_budget(), 0.05));
    }

    #[test]
    fn first_round_exploration_budget() {
        let inst = ProblemInstance::new(vec![0.5, 0.6], 0.1, 0.1, 10).unwrap();
        let mut ledger = BudgetLedger::for_instance(&inst);
        ledger.update(outcome(1, 1, 0.6, 0.5), &inst).unwrap();
        assert!(close(ledger.pseudo_budget(), 0.15));
        assert!(close(ledger.pre_play_budget(), -0.45));
    }

    #[test]
    fn ledger_tracks_violations() {
        let inst = ProblemInstance::new(vec![0.5, 0.1], 0.1, 0.1, 10).unwrap();
        let mut ledger = BudgetLedger::for_instance(&inst);
        ledger.update(outcome(1, 1, 0.1, 0.5), &inst).unwrap();
        assert_eq!(ledger.first_violation_round(), Some(1));
        assert!(close(ledger.min_pseudo_budget(), -0.35));
        assert_eq!(ledger.first_true_violation_round(), Some(1));
    }

    #[test]
    fn ledger_rejects_out_of_order_rounds() {
        let inst = ProblemInstance::new(vec![0.5, 0.6], 0.1, 0.1, 10).unwrap();
        let mut ledger = BudgetLedger::for_instance(&inst);
        assert!(matches!(
            ledger.update(outcome(2, 0, 0.5, 0.5), &inst),
            Err(Error::OutOfOrderRound { expected: 1, got: 2 })
        ));
    }
}
