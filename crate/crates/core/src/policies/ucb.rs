use super::{argmax, Decision, Policy};
use crate::confidence::ConfidenceSchedule;
use crate::domain::ArmStats;

/// Fills `out` with upper confidence bounds `mean + radius`.
/// A known default mean replaces arm 0's bound.
pub fn upper_bounds(
    stats: &[ArmStats],
    schedule: &ConfidenceSchedule,
    known_mu0: Option<f64>,
    out: &mut [f64],
) {
    for ((u, s), arm) in out.iter_mut().zip(stats).zip(0..) {
        *u = match (arm, known_mu0) {
            (0, Some(mu0)) => mu0,
            _ => s.empirical_mean() + schedule.radius(s),
        };
    }
}

/// High-probability UCB choice: unexplored arms first (lowest index), then the
/// largest upper bound.
pub fn ucb_select(stats: &[ArmStats], schedule: &ConfidenceSchedule, known_mu0: Option<f64>) -> usize {
    let mut upper = vec![0.0; stats.len()];
    upper_bounds(stats, schedule, known_mu0, &mut upper);
    argmax(&upper)
}

/// Unconstrained UCB with the high-probability confidence schedule.
#[derive(Clone, Debug)]
pub struct Ucb {
    stats: Vec<ArmStats>,
    schedule: ConfidenceSchedule,
    known_mu0: Option<f64>,
    upper: Vec<f64>,
}

impl Ucb {
    pub fn new(num_arms: usize, schedule: ConfidenceSchedule, known_mu0: Option<f64>) -> Self {
        Self {
            stats: vec![ArmStats::new(); num_arms],
            schedule,
            known_mu0,
            upper: vec![0.0; num_arms],
        }
    }

    /// Starts from existing statistics.
    pub fn with_stats(stats: Vec<ArmStats>, schedule: ConfidenceSchedule, known_mu0: Option<f64>) -> Self {
        let n = stats.len();
        Self {
            stats,
            schedule,
            known_mu0,
            upper: vec![0.0; n],
        }
    }

    pub fn stats(&self) -> &[ArmStats] {
        &self.stats
    }
}

impl Policy for Ucb {
    fn name(&self) -> &'static str {
        "ucb"
    }

    fn num_arms(&self) -> usize {
        self.stats.len()
    }

    fn select(&mut self, _t: u64) -> Decision {
        upper_bounds(&self.stats, &self.schedule, self.known_mu0, &mut self.upper);
        Decision::plain(argmax(&self.upper))
    }

    fn observe(&mut self, _t: u64, arm: usize, reward: f64) {
        self.stats[arm].update(reward);
    }
}
