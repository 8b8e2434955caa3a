//! EXP3 with implicit exploration (EXP3-IX), anytime schedule.
//!
//! Works on losses `1 - reward`. After playing arm `i` with probability `p`,
//! its cumulative loss estimate grows by `loss / (p + gamma_t)`.

use log::warn;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{Decision, Policy};

/// `gamma_t = sqrt(ln A / (4 A t))` for `A` arms; the learning rate is `2 gamma_t`.
pub fn exp3ix_gamma(num_arms: usize, t: u64) -> f64 {
    let a = num_arms as f64;
    (a.ln() / (4.0 * a * t as f64)).sqrt()
}

/// Implicit-exploration loss estimate for the played arm.
pub fn ix_loss_estimate(loss: f64, probability: f64, gamma: f64) -> f64 {
    loss / (probability + gamma)
}

/// Fills `out` with `p_i ∝ exp(-eta * L_i)`.
pub fn exp3ix_distribution(loss_estimates: &[f64], eta: f64, out: &mut [f64]) {
    let min = loss_estimates.iter().copied().fold(f64::INFINITY, f64::min);
    let mut total = 0.0;
    for (p, &l) in out.iter_mut().zip(loss_estimates) {
        *p = (-eta * (l - min)).exp();
        total += *p;
    }
    for p in out.iter_mut() {
        *p /= total;
    }
}

#[derive(Clone, Debug)]
pub struct Exp3Ix {
    loss_estimates: Vec<f64>,
    probabilities: Vec<f64>,
    rounds: u64,
    gamma: f64,
    rng: ChaCha8Rng,
    clamped: u64,
}

impl Exp3Ix {
    pub fn new(num_arms: usize, rng: ChaCha8Rng) -> Self {
        Self {
            loss_estimates: vec![0.0; num_arms],
            probabilities: vec![1.0 / num_arms as f64; num_arms],
            rounds: 0,
            gamma: 0.0,
            rng,
            clamped: 0,
        }
    }

    /// Sampling distribution of the most recent `select`.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn loss_estimates(&self) -> &[f64] {
        &self.loss_estimates
    }

    /// Rounds this learner has been fed (its own clock).
    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Rewards that had to be clamped into `[0, 1]`.
    pub fn clamped_rewards(&self) -> u64 {
        self.clamped
    }
}

impl Policy for Exp3Ix {
    fn name(&self) -> &'static str {
        "exp3ix"
    }

    fn num_arms(&self) -> usize {
        self.loss_estimates.len()
    }

    fn select(&mut self, _t: u64) -> Decision {
        let own_round = self.rounds + 1;
        self.gamma = exp3ix_gamma(self.num_arms(), own_round);
        exp3ix_distribution(&self.loss_estimates, 2.0 * self.gamma, &mut self.probabilities);
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        let mut arm = self.probabilities.len() - 1;
        for (i, &p) in self.probabilities.iter().enumerate() {
            acc += p;
            if u < acc {
                arm = i;
                break;
            }
        }
        Decision::plain(arm)
    }

    fn observe(&mut self, _t: u64, arm: usize, reward: f64) {
        let reward = if (0.0..=1.0).contains(&reward) {
            reward
        } else {
            if self.clamped == 0 {
                warn!("exp3ix: reward {reward} outside [0, 1], clamping (further clamps are silent)");
            }
            self.clamped += 1;
            reward.clamp(0.0, 1.0)
        };
        self.loss_estimates[arm] +=
            ix_loss_estimate(1.0 - reward, self.probabilities[arm], self.gamma);
        self.rounds += 1;
    }
}
