use std::sync::Arc;

use crate::confidence::PsiVariant;
use crate::domain::ProblemInstance;
use crate::environments::{Adversary, Noise, RewardTable};
use crate::policies::{expectation_mode_params, PolicyKind};
use crate::{Error, Result};

/// Confidence level, possibly tied to the horizon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DeltaSpec {
    Fixed(f64),
    /// `delta = 1/n`, resolved per sweep point.
    InverseHorizon,
}

impl DeltaSpec {
    pub fn resolve(self, horizon: u64) -> f64 {
        match self {
            DeltaSpec::Fixed(d) => d,
            DeltaSpec::InverseHorizon => 1.0 / horizon as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sweep {
    None,
    Alpha(Vec<f64>),
    Horizon(Vec<u64>),
}

impl Sweep {
    pub fn var(&self) -> &'static str {
        match self {
            Sweep::None => "none",
            Sweep::Alpha(_) => "alpha",
            Sweep::Horizon(_) => "n",
        }
    }
}

/// Where rewards come from.
#[derive(Clone, Debug, PartialEq)]
pub enum EnvKind {
    Stochastic,
    Adversary(Adversary),
    /// Rewards of arms `1..=K` read from a table; the default arm pays `means[0]`.
    Table { path: String, table: Arc<RewardTable> },
}

impl EnvKind {
    pub fn is_adversarial(&self) -> bool {
        !matches!(self, EnvKind::Stochastic)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Arm means; index 0 is the default arm.
    pub means: Vec<f64>,
    /// Used unless alpha is swept.
    pub alpha: f64,
    /// Used unless the horizon is swept.
    pub horizon: u64,
    pub delta: DeltaSpec,
    pub sweep: Sweep,
    pub policies: Vec<PolicyKind>,
    pub replications: u64,
    pub seed_base: u64,
    pub noise: Noise,
    pub psi: PsiVariant,
    pub environment: EnvKind,
    /// Run with `(delta', alpha')` so the constraint holds in expectation.
    pub expectation_mode: bool,
}

/// One resolved point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub var: &'static str,
    pub value: f64,
    /// The problem the constraint is audited against.
    pub instance: ProblemInstance,
    /// The parameters policies are built with (differs in expectation mode).
    pub policy_instance: ProblemInstance,
}

impl ExperimentConfig {
    /// A single-point stochastic experiment with the default options.
    pub fn new(means: Vec<f64>, alpha: f64, horizon: u64, delta: DeltaSpec) -> Self {
        Self {
            means,
            alpha,
            horizon,
            delta,
            sweep: Sweep::None,
            policies: vec![PolicyKind::Cucb],
            replications: 1,
            seed_base: 0,
            noise: Noise::default(),
            psi: PsiVariant::default(),
            environment: EnvKind::Stochastic,
            expectation_mode: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::config("replications", "must be at least 1"));
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies", "roster is empty"));
        }
        match &self.sweep {
            Sweep::None => {}
            Sweep::Alpha(values) => check_sorted("alpha", values)?,
            Sweep::Horizon(values) => {
                let as_f64: Vec<f64> = values.iter().map(|&n| n as f64).collect();
                check_sorted("n", &as_f64)?;
            }
        }
        if let EnvKind::Table { table, .. } = &self.environment {
            if table.k() + 1 != self.means.len() {
                return Err(Error::config(
                    "means",
                    format!(
                        "reward table has {} arms but means lists {}",
                        table.k(),
                        self.means.len().saturating_sub(1)
                    ),
                ));
            }
        }
        self.points().map(|_| ())
    }

    /// Resolves every sweep point, validating each instance.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let settings: Vec<(f64, f64, u64)> = match &self.sweep {
            Sweep::None => vec![(self.alpha, self.alpha, self.horizon)],
            Sweep::Alpha(values) => values.iter().map(|&a| (a, a, self.horizon)).collect(),
            Sweep::Horizon(values) => values.iter().map(|&n| (n as f64, self.alpha, n)).collect(),
        };
        settings
            .into_iter()
            .map(|(value, alpha, n)| {
                let delta = self.delta.resolve(n);
                let instance = ProblemInstance::new(self.means.clone(), alpha, delta, n)?;
                let policy_instance = if self.expectation_mode {
                    let (d, a) = expectation_mode_params(alpha, n)?;
                    ProblemInstance::new(self.means.clone(), a, d, n)?
                } else {
                    instance.clone()
                };
                if let EnvKind::Table { table, .. } = &self.environment {
                    if table.rounds() < n {
                        return Err(Error::config(
                            "n",
                            format!("horizon {n} exceeds the reward table's {} rounds", table.rounds()),
                        ));
                    }
                }
                Ok(SweepPoint {
                    var: self.sweep.var(),
                    value,
                    instance,
                    policy_instance,
                })
            })
            .collect()
    }
}

fn check_sorted(field: &str, values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(field, "sweep list is empty"));
    }
    if values.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::config(field, "sweep list must be strictly ascending"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ExperimentConfig {
        ExperimentConfig::new(vec![0.5, 0.6, 0.4], 0.1, 10_000, DeltaSpec::InverseHorizon)
    }

    #[test]
    fn inverse_horizon_delta() {
        let points = base().points().unwrap();
        assert_eq!(points.len(), 1);
        assert_eq!(points[0].instance.delta(), 1e-4);
    }

    #[test]
    fn horizon_sweep_resolves_delta_per_point() {
        let mut c = base();
        c.sweep = Sweep::Horizon(vec![100, 1000]);
        let points = c.points().unwrap();
        assert_eq!(points[0].instance.delta(), 0.01);
        assert_eq!(points[1].instance.delta(), 0.001);
        assert_eq!(points[1].value, 1000.0);
    }

    #[test]
    fn sweeps_must_be_sorted_and_nonempty() {
        let mut c = base();
        c.sweep = Sweep::Alpha(vec![0.5, 0.1]);
        assert!(c.validate().is_err());
        c.sweep = Sweep::Alpha(vec![]);
        assert!(c.validate().is_err());
        c.sweep = Sweep::Alpha(vec![0.1, 0.5]);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn expectation_mode_transforms_policy_parameters() {
        let mut c = base();
        c.expectation_mode = true;
        let p = &c.points().unwrap()[0];
        assert_eq!(p.instance.alpha(), 0.1);
        assert_eq!(p.policy_instance.delta(), 1e-4);
        assert!((p.policy_instance.alpha() - 0.0999 / 0.9999).abs() < 1e-15);

        c.alpha = 1e-4;
        assert!(c.validate().unwrap_err().is_config());
    }

    #[test]
    fn zero_replications_rejected() {
        let mut c = base();
        c.replications = 0;
        assert!(c.validate().is_err());
    }
}
