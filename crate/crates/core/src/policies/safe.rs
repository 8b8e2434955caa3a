//! Safe-playing wrapper for adversarial learners.
//!
//! The default arm pays a fixed `mu0`. Before each round the wrapper checks
//! whether the reward collected so far already covers the floor
//! `(1 - alpha) mu0 t` on its own; if so the base learner plays, otherwise the
//! default arm does. Since rewards are nonnegative, the realized constraint
//! then holds at every round by induction. While the default arm is played
//! the base learner is frozen: its clock does not advance and it receives no
//! feedback.

use super::{Decision, Policy};
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// High-probability anytime regret bound of EXP3-IX:
/// `7 sqrt(K t ln K) ln(4 t^2 / delta)`.
pub fn admissible_bound(t: u64, k: usize, delta: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::Domain(format!("admissible bound needs K >= 2, got {k}")));
    }
    if t == 0 {
        return Err(Error::Domain("admissible bound needs t >= 1".into()));
    }
    let (t, k) = (t as f64, k as f64);
    Ok(7.0 * (k * t * k.ln()).sqrt() * (4.0 * t * t / delta).ln())
}

#[derive(Clone, Debug)]
pub struct SafePlay<P> {
    base: P,
    alpha: f64,
    mu0: f64,
    collected: NeumaierSum,
    base_rounds: u64,
    delegated: bool,
}

impl<P: Policy> SafePlay<P> {
    pub fn new(base: P, alpha: f64, mu0: f64) -> Self {
        Self {
            base,
            alpha,
            mu0,
            collected: NeumaierSum::new(),
            base_rounds: 0,
            delegated: false,
        }
    }

    pub fn base(&self) -> &P {
        &self.base
    }

    /// Rounds on which the base learner was consulted.
    pub fn base_rounds(&self) -> u64 {
        self.base_rounds
    }

    /// `sum_{s<t} X_s - (1 - alpha) mu0 t`.
    pub fn pre_play_budget(&self, t: u64) -> f64 {
        self.collected.value() - (1.0 - self.alpha) * t as f64 * self.mu0
    }
}

impl<P: Policy> Policy for SafePlay<P> {
    fn name(&self) -> &'static str {
        "safe-exp3ix"
    }

    fn num_arms(&self) -> usize {
        self.base.num_arms()
    }

    fn select(&mut self, t: u64) -> Decision {
        let budget = self.pre_play_budget(t);
        self.delegated = budget >= 0.0;
        if self.delegated {
            let inner = self.base.select(self.base_rounds + 1);
            Decision {
                arm: inner.arm,
                proposed: Some(inner.arm),
                budget_bound: Some(budget),
                safe_mode: false,
            }
        } else {
            Decision {
                arm: 0,
                proposed: None,
                budget_bound: Some(budget),
                safe_mode: true,
            }
        }
    }

    fn observe(&mut self, _t: u64, arm: usize, reward: f64) {
        self.collected.add(reward);
        if self.delegated {
            self.base_rounds += 1;
            self.base.observe(self.base_rounds, arm, reward);
            self.delegated = false;
        }
    }
}
