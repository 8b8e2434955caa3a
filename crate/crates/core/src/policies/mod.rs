//! Arm-selection policies.
//!
//! Every policy follows the same two-step contract per round `t = 1, 2, ...`:
//! [`Policy::select`] proposes the arm to play, then [`Policy::observe`] is
//! called exactly once with that arm and its realized reward.

mod budget_first;
mod conservative;
mod exp3ix;
mod moss;
mod safe;
mod ucb;

use std::fmt;
use std::str::FromStr;

use rand_chacha::ChaCha8Rng;

pub use budget_first::{budget_first_t0, budget_first_t0_from_worst, worst_case_regret, BudgetFirst};
pub use conservative::{
    expectation_mode_params, known_budget_bound, unknown_budget_bound, ConservativeUcb,
    DefaultKnowledge, Fallback,
};
pub use exp3ix::{exp3ix_distribution, exp3ix_gamma, ix_loss_estimate, Exp3Ix};
pub use moss::{moss_index, umoss_budget_vector, UnbalancedMoss};
pub use safe::{admissible_bound, SafePlay};
pub use ucb::{ucb_select, upper_bounds, Ucb};

use crate::confidence::{ConfidenceSchedule, PsiVariant};
use crate::domain::ProblemInstance;
use crate::{Error, Result};

/// Outcome of [`Policy::select`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Decision {
    pub arm: usize,
    /// Arm the index rule wanted before any conservative override.
    pub proposed: Option<usize>,
    /// Budget lower bound the override was decided on.
    pub budget_bound: Option<f64>,
    /// True when the conservative branch chose the arm.
    pub safe_mode: bool,
}

impl Decision {
    pub fn plain(arm: usize) -> Self {
        Self {
            arm,
            proposed: None,
            budget_bound: None,
            safe_mode: false,
        }
    }
}

pub trait Policy: Send {
    fn name(&self) -> &'static str;

    /// Number of arms, including the default arm.
    fn num_arms(&self) -> usize;

    fn select(&mut self, t: u64) -> Decision;

    fn observe(&mut self, t: u64, arm: usize, reward: f64);
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn num_arms(&self) -> usize {
        (**self).num_arms()
    }

    fn select(&mut self, t: u64) -> Decision {
        (**self).select(t)
    }

    fn observe(&mut self, t: u64, arm: usize, reward: f64) {
        (**self).observe(t, arm, reward)
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// The policy roster, by configuration name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Ucb,
    Cucb,
    CucbUnknownMu0,
    CucbAlt,
    BudgetFirst,
    UnbalancedMoss,
    Exp3Ix,
    SafeExp3Ix,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 8] = [
        PolicyKind::Ucb,
        PolicyKind::Cucb,
        PolicyKind::CucbUnknownMu0,
        PolicyKind::CucbAlt,
        PolicyKind::BudgetFirst,
        PolicyKind::UnbalancedMoss,
        PolicyKind::Exp3Ix,
        PolicyKind::SafeExp3Ix,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Ucb => "ucb",
            PolicyKind::Cucb => "cucb",
            PolicyKind::CucbUnknownMu0 => "cucb-unknown-mu0",
            PolicyKind::CucbAlt => "cucb-alt",
            PolicyKind::BudgetFirst => "budgetfirst",
            PolicyKind::UnbalancedMoss => "unbalanced-moss",
            PolicyKind::Exp3Ix => "exp3ix",
            PolicyKind::SafeExp3Ix => "safe-exp3ix",
        }
    }

    /// Builds a fresh policy for `instance`. `rng` feeds randomized policies.
    ///
    /// Policies that know the default arm take its mean from the instance.
    pub fn build(
        self,
        instance: &ProblemInstance,
        psi: PsiVariant,
        rng: ChaCha8Rng,
    ) -> Result<Box<dyn Policy>> {
        let k = instance.k();
        let arms = instance.num_arms();
        let known = || ConfidenceSchedule::new(psi, k, instance.delta());
        Ok(match self {
            PolicyKind::Ucb => Box::new(Ucb::new(arms, known()?, Some(instance.mu0()))),
            PolicyKind::Cucb => Box::new(ConservativeUcb::new(
                arms,
                known()?,
                instance.alpha(),
                DefaultKnowledge::Known(instance.mu0()),
                Fallback::DefaultArm,
            )),
            PolicyKind::CucbAlt => Box::new(ConservativeUcb::new(
                arms,
                known()?,
                instance.alpha(),
                DefaultKnowledge::Known(instance.mu0()),
                Fallback::LowerBound,
            )),
            PolicyKind::CucbUnknownMu0 => Box::new(ConservativeUcb::new(
                arms,
                ConfidenceSchedule::new(psi, arms, instance.delta())?,
                instance.alpha(),
                DefaultKnowledge::Unknown,
                Fallback::DefaultArm,
            )),
            PolicyKind::BudgetFirst => {
                let schedule = known()?;
                let t0 = budget_first_t0(instance, &schedule)?;
                Box::new(BudgetFirst::new(arms, schedule, instance.mu0(), t0))
            }
            PolicyKind::UnbalancedMoss => Box::new(UnbalancedMoss::new(
                instance.horizon(),
                umoss_budget_vector(instance)?,
            )),
            PolicyKind::Exp3Ix => Box::new(Exp3Ix::new(arms, rng)),
            PolicyKind::SafeExp3Ix => Box::new(SafePlay::new(
                Exp3Ix::new(arms, rng),
                instance.alpha(),
                instance.mu0(),
            )),
        })
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::config("policies", format!("unknown policy {s:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[0.5, 0.62, 0.58]), 1);
        assert_eq!(argmax(&[0.5, 0.5, 0.5]), 0);
        assert_eq!(argmax(&[f64::INFINITY; 3]), 0);
        assert_eq!(argmax(&[0.1, f64::INFINITY, f64::INFINITY]), 1);
    }

    #[test]
    fn roster_names_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.as_str().parse::<PolicyKind>().unwrap(), kind);
        }
        assert!("thompson".parse::<PolicyKind>().is_err());
    }
}
