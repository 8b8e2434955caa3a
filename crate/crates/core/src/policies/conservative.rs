//! Conservative UCB.
//!
//! Each round the UCB arm `J_t` is computed as usual. Before playing it the
//! policy forms a lower confidence bound on what the budget would be after
//! playing `J_t`; the arm is played only if that bound is nonnegative,
//! otherwise the round falls back to a conservative choice.

use super::ucb::upper_bounds;
use super::{argmax, Decision, Policy};
use crate::confidence::ConfidenceSchedule;
use crate::domain::ArmStats;
use crate::{Error, Result};

/// What the policy knows about the default arm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DefaultKnowledge {
    /// Default mean known exactly; both of arm 0's bounds equal it.
    Known(f64),
    /// Arm 0 is estimated like every other arm.
    Unknown,
}

/// Choice made when the budget bound is negative.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fallback {
    /// Play the default arm.
    #[default]
    DefaultArm,
    /// Play the arm with the largest lower confidence bound.
    LowerBound,
}

/// Budget lower bound with a known default mean:
/// `sum_i T_i(t-1) lambda_i(t) + lambda_J(t) - (1 - alpha) t mu0`.
///
/// `lower[0]` must equal `mu0`.
pub fn known_budget_bound(
    pulls: &[u64],
    lower: &[f64],
    proposed: usize,
    alpha: f64,
    mu0: f64,
    t: u64,
) -> f64 {
    let banked: f64 = pulls.iter().zip(lower).map(|(&n, &l)| n as f64 * l).sum();
    banked + lower[proposed] - (1.0 - alpha) * t as f64 * mu0
}

/// Budget lower bound when the default mean is estimated:
/// `sum_{i>0} T_i(t-1) lambda_i(t) + lambda_J(t) + (T_0(t-1) - (1 - alpha) t) theta_0(t)`.
///
/// An unexplored default arm has `theta_0 = +inf` against a negative
/// coefficient, which yields `-inf`.
pub fn unknown_budget_bound(
    pulls: &[u64],
    lower: &[f64],
    default_upper: f64,
    proposed: usize,
    alpha: f64,
    t: u64,
) -> f64 {
    let banked: f64 = pulls[1..]
        .iter()
        .zip(&lower[1..])
        .map(|(&n, &l)| n as f64 * l)
        .sum();
    let coefficient = pulls[0] as f64 - (1.0 - alpha) * t as f64;
    // 0 * inf is NaN; a zero coefficient contributes nothing.
    let default_term = if coefficient == 0.0 {
        0.0
    } else {
        coefficient * default_upper
    };
    banked + lower[proposed] + default_term
}

/// Parameters `(delta', alpha')` that turn the high-probability constraint
/// into one holding in expectation: `delta' = 1/n`,
/// `alpha' = (alpha - delta') / (1 - delta')`.
///
/// Requires `alpha >= 2/n`; with `alpha` of order `1/n` the exploration
/// budget is constant and the problem is hopeless.
pub fn expectation_mode_params(alpha: f64, n: u64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::config("n", "horizon must be at least 1"));
    }
    let delta = 1.0 / n as f64;
    if !(alpha >= 2.0 * delta) || alpha > 1.0 {
        return Err(Error::config(
            "alpha",
            format!("expectation mode needs 2/n <= alpha <= 1 (alpha = {alpha}, n = {n})"),
        ));
    }
    Ok((delta, (alpha - delta) / (1.0 - delta)))
}

#[derive(Clone, Debug)]
pub struct ConservativeUcb {
    stats: Vec<ArmStats>,
    schedule: ConfidenceSchedule,
    alpha: f64,
    knowledge: DefaultKnowledge,
    fallback: Fallback,
    upper: Vec<f64>,
    lower: Vec<f64>,
    pulls: Vec<u64>,
    last_proposed: Option<usize>,
    last_bound: Option<f64>,
}

impl ConservativeUcb {
    pub fn new(
        num_arms: usize,
        schedule: ConfidenceSchedule,
        alpha: f64,
        knowledge: DefaultKnowledge,
        fallback: Fallback,
    ) -> Self {
        Self {
            stats: vec![ArmStats::new(); num_arms],
            schedule,
            alpha,
            knowledge,
            fallback,
            upper: vec![0.0; num_arms],
            lower: vec![0.0; num_arms],
            pulls: vec![0; num_arms],
            last_proposed: None,
            last_bound: None,
        }
    }

    pub fn stats(&self) -> &[ArmStats] {
        &self.stats
    }

    /// `J_t` of the most recent round.
    pub fn last_proposed(&self) -> Option<usize> {
        self.last_proposed
    }

    /// Budget bound of the most recent round.
    pub fn last_bound(&self) -> Option<f64> {
        self.last_bound
    }

    fn refresh_bounds(&mut self) {
        let known = match self.knowledge {
            DefaultKnowledge::Known(mu0) => Some(mu0),
            DefaultKnowledge::Unknown => None,
        };
        upper_bounds(&self.stats, &self.schedule, known, &mut self.upper);
        for (arm, (l, s)) in self.lower.iter_mut().zip(&self.stats).enumerate() {
            *l = match (arm, known) {
                (0, Some(mu0)) => mu0,
                _ => (s.empirical_mean() - self.schedule.radius(s)).max(0.0),
            };
        }
        for (p, s) in self.pulls.iter_mut().zip(&self.stats) {
            *p = s.pulls();
        }
    }
}

impl Policy for ConservativeUcb {
    fn name(&self) -> &'static str {
        match (self.knowledge, self.fallback) {
            (DefaultKnowledge::Unknown, _) => "cucb-unknown-mu0",
            (_, Fallback::LowerBound) => "cucb-alt",
            _ => "cucb",
        }
    }

    fn num_arms(&self) -> usize {
        self.stats.len()
    }

    fn select(&mut self, t: u64) -> Decision {
        self.refresh_bounds();
        let proposed = argmax(&self.upper);
        let bound = match self.knowledge {
            DefaultKnowledge::Known(mu0) => {
                known_budget_bound(&self.pulls, &self.lower, proposed, self.alpha, mu0, t)
            }
            DefaultKnowledge::Unknown => unknown_budget_bound(
                &self.pulls,
                &self.lower,
                self.upper[0],
                proposed,
                self.alpha,
                t,
            ),
        };
        self.last_proposed = Some(proposed);
        self.last_bound = Some(bound);
        let safe = bound >= 0.0;
        let arm = if safe {
            proposed
        } else {
            match self.fallback {
                Fallback::DefaultArm => 0,
                Fallback::LowerBound => argmax(&self.lower),
            }
        };
        Decision {
            arm,
            proposed: Some(proposed),
            budget_bound: Some(bound),
            safe_mode: !safe,
        }
    }

    fn observe(&mut self, _t: u64, arm: usize, reward: f64) {
        self.stats[arm].update(reward);
    }
}
