use super::ucb::upper_bounds;
use super::{argmax, Decision, Policy};
use crate::confidence::ConfidenceSchedule;
use crate::domain::{ArmStats, ProblemInstance};
use crate::{Error, Result};

/// Worst-case pseudo-regret of high-probability UCB over `n` rounds:
/// `2 sqrt(n K psi(n)) + K`.
pub fn worst_case_regret(instance: &ProblemInstance, schedule: &ConfidenceSchedule) -> Result<f64> {
    let n = instance.horizon();
    let k = instance.k() as f64;
    Ok(2.0 * (n as f64 * k * schedule.psi(n)?).sqrt() + k)
}

/// Length of the default-arm prefix, `ceil(r_worst / (alpha mu0))` capped at `n`.
pub fn budget_first_t0_from_worst(r_worst: f64, alpha: f64, mu0: f64, n: u64) -> Result<u64> {
    if mu0 <= 0.0 {
        return Err(Error::config(
            "means",
            "budgetfirst needs a positive default mean",
        ));
    }
    if alpha <= 0.0 {
        return Err(Error::config("alpha", "budgetfirst needs alpha > 0"));
    }
    let t0 = (r_worst / (alpha * mu0)).ceil();
    Ok(if t0 >= n as f64 { n } else { t0.max(0.0) as u64 })
}

pub fn budget_first_t0(instance: &ProblemInstance, schedule: &ConfidenceSchedule) -> Result<u64> {
    budget_first_t0_from_worst(
        worst_case_regret(instance, schedule)?,
        instance.alpha(),
        instance.mu0(),
        instance.horizon(),
    )
}

/// Plays the default arm for the first `t0` rounds, then UCB with the
/// default mean known. Observations from the prefix stay in arm 0's
/// statistics.
#[derive(Clone, Debug)]
pub struct BudgetFirst {
    stats: Vec<ArmStats>,
    schedule: ConfidenceSchedule,
    mu0: f64,
    t0: u64,
    upper: Vec<f64>,
}

impl BudgetFirst {
    pub fn new(num_arms: usize, schedule: ConfidenceSchedule, mu0: f64, t0: u64) -> Self {
        Self {
            stats: vec![ArmStats::new(); num_arms],
            schedule,
            mu0,
            t0,
            upper: vec![0.0; num_arms],
        }
    }

    pub fn t0(&self) -> u64 {
        self.t0
    }
}

impl Policy for BudgetFirst {
    fn name(&self) -> &'static str {
        "budgetfirst"
    }

    fn num_arms(&self) -> usize {
        self.stats.len()
    }

    fn select(&mut self, t: u64) -> Decision {
        if t <= self.t0 {
            return Decision {
                arm: 0,
                proposed: None,
                budget_bound: None,
                safe_mode: true,
            };
        }
        upper_bounds(&self.stats, &self.schedule, Some(self.mu0), &mut self.upper);
        Decision::plain(argmax(&self.upper))
    }

    fn observe(&mut self, _t: u64, arm: usize, reward: f64) {
        self.stats[arm].update(reward);
    }
}
