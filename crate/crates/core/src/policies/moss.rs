//! Unbalanced MOSS: MOSS with a per-arm regret target `B_i`.
//!
//! Only the final-round return is (in expectation) protected; the policy is
//! free to explore from round one.

use super::{argmax, Decision, Policy};
use crate::domain::{ArmStats, ProblemInstance};
use crate::{Error, Result};

/// Regret targets `(B_0, B_1, ..., B_K)`:
/// `B_i = sqrt(nK) + K / (alpha mu0)` for `i >= 1` and `B_0 = nK / B_i`.
pub fn umoss_budget_vector(instance: &ProblemInstance) -> Result<Vec<f64>> {
    let (alpha, mu0) = (instance.alpha(), instance.mu0());
    if mu0 <= 0.0 {
        return Err(Error::config(
            "means",
            "unbalanced-moss needs a positive default mean",
        ));
    }
    let n = instance.horizon() as f64;
    let k = instance.k() as f64;
    let b = (n * k).sqrt() + k / (alpha * mu0);
    let mut out = vec![b; instance.num_arms()];
    out[0] = n * k / b;
    Ok(out)
}

/// `mean + sqrt((2/T) log+(n^2 / (B^2 T)))`, `+inf` when unpulled.
pub fn moss_index(stats: &ArmStats, horizon: u64, target: f64) -> f64 {
    let pulls = stats.pulls();
    if pulls == 0 {
        return f64::INFINITY;
    }
    let t = pulls as f64;
    let n = horizon as f64;
    let log_plus = (n * n / (target * target * t)).ln().max(0.0);
    stats.empirical_mean() + (2.0 / t * log_plus).sqrt()
}

#[derive(Clone, Debug)]
pub struct UnbalancedMoss {
    stats: Vec<ArmStats>,
    horizon: u64,
    targets: Vec<f64>,
    index: Vec<f64>,
}

impl UnbalancedMoss {
    pub fn new(horizon: u64, targets: Vec<f64>) -> Self {
        let n = targets.len();
        Self {
            stats: vec![ArmStats::new(); n],
            horizon,
            targets,
            index: vec![0.0; n],
        }
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

impl Policy for UnbalancedMoss {
    fn name(&self) -> &'static str {
        "unbalanced-moss"
    }

    fn num_arms(&self) -> usize {
        self.stats.len()
    }

    fn select(&mut self, _t: u64) -> Decision {
        for ((idx, s), &b) in self.index.iter_mut().zip(&self.stats).zip(&self.targets) {
            *idx = moss_index(s, self.horizon, b);
        }
        Decision::plain(argmax(&self.index))
    }

    fn observe(&mut self, _t: u64, arm: usize, reward: f64) {
        self.stats[arm].update(reward);
    }
}
