use std::f64::consts::E;

use crate::confidence::ConfidenceSchedule;
use crate::domain::{ArmStats, EpisodeTrace, ProblemInstance, RewardMatrix};
use crate::policies::admissible_bound;
use crate::sum::NeumaierSum;
use crate::{Error, Result};

/// Largest round the Theorem 3 crossing search will consider.
pub const T0_SCAN_CAP: u64 = 100_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuditMode {
    /// `Z~_t >= 0` on mean rewards.
    Pseudo,
    /// `sum X_{s,I_s} >= (1 - alpha) mu0 t` on the rewards actually received.
    Realized,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintAudit {
    pub violated: bool,
    pub first_round: Option<u64>,
    /// Minimum over rounds, including the round-0 value of 0.
    pub min_budget: f64,
}

/// Recomputes the budget of every round from the trace's arms and rewards.
pub fn audit_constraint(trace: &EpisodeTrace, instance: &ProblemInstance, mode: AuditMode) -> ConstraintAudit {
    let slack = 1.0 - instance.alpha();
    let mu0 = instance.mu0();
    let mut collected = NeumaierSum::new();
    let mut audit = ConstraintAudit {
        violated: false,
        first_round: None,
        min_budget: 0.0,
    };
    for row in &trace.rows {
        collected.add(match mode {
            AuditMode::Pseudo => instance.mean(row.arm),
            AuditMode::Realized => row.reward,
        });
        let budget = collected.value() - slack * row.round as f64 * mu0;
        audit.min_budget = audit.min_budget.min(budget);
        if budget < 0.0 && !audit.violated {
            audit.violated = true;
            audit.first_round = Some(row.round);
        }
    }
    audit
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// Whether the parameters satisfy the lower bound's precondition.
    pub valid: bool,
}

/// Worst-case regret lower bound for conservative algorithms.
pub fn lower_bound_b(k: usize, n: u64, alpha: f64, mu0: f64) -> LowerBound {
    let c = 16.0 * E + 8.0;
    let (k, n) = (k as f64, n as f64);
    let value = (k / (c * alpha * mu0)).max((k * n).sqrt() / c.sqrt());
    let needed = (1.0 / (2.0 * alpha.sqrt())).max((E + 0.5).sqrt()) * (k / n).sqrt();
    LowerBound {
        value,
        valid: mu0.min(1.0 - mu0) >= needed,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PullAudit {
    pub arm: usize,
    pub pulls: u64,
    pub bound: f64,
    pub ok: bool,
}

/// Checks `T_i(n) <= 4L/gap_i^2 + 1` for each suboptimal arm `i >= 1`, with
/// `L = psi(n)`. Arms with a zero gap are skipped.
pub fn audit_pull_bound(
    trace: &EpisodeTrace,
    instance: &ProblemInstance,
    schedule: &ConfidenceSchedule,
) -> Result<Vec<PullAudit>> {
    let l = schedule.psi(trace.horizon())?;
    Ok((1..instance.num_arms())
        .filter(|&arm| instance.gap(arm) > 0.0)
        .map(|arm| {
            let pulls = trace.summary.pulls[arm];
            let gap = instance.gap(arm);
            let bound = 4.0 * l / (gap * gap) + 1.0;
            PullAudit {
                arm,
                pulls,
                bound,
                ok: pulls as f64 <= bound,
            }
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoverageAudit {
    pub failed: bool,
    /// `(round, arm)` of the first interval that missed its mean.
    pub first_failure: Option<(u64, usize)>,
}

/// Replays the trace and checks `|mean_hat_i - mu_i| <= radius(T_i)` after
/// every pull of an arm in `arms`.
pub fn audit_coverage(
    trace: &EpisodeTrace,
    instance: &ProblemInstance,
    schedule: &ConfidenceSchedule,
    arms: std::ops::Range<usize>,
) -> CoverageAudit {
    let mut stats = vec![ArmStats::new(); trace.num_arms];
    for row in &trace.rows {
        let s = &mut stats[row.arm];
        s.update(row.reward);
        if !arms.contains(&row.arm) {
            continue;
        }
        if (s.empirical_mean() - instance.mean(row.arm)).abs() > schedule.radius(s) {
            return CoverageAudit {
                failed: true,
                first_failure: Some((row.round, row.arm)),
            };
        }
    }
    CoverageAudit {
        failed: false,
        first_failure: None,
    }
}

/// Last `t` with `alpha mu0 t <= R_hat(t) + mu0`, where `R_hat` is the
/// admissible regret bound. Fails if the crossing lies beyond [`T0_SCAN_CAP`].
pub fn theorem3_t0(alpha: f64, mu0: f64, k: usize, delta: f64) -> Result<u64> {
    let holds = |t: u64| -> Result<bool> { Ok(alpha * mu0 * t as f64 <= admissible_bound(t, k, delta)? + mu0) };
    let overflow = Error::ScanOverflow {
        what: "theorem 3 t0",
        cap: T0_SCAN_CAP,
    };
    if !holds(1)? {
        return Ok(0);
    }
    // Invariant: holds(lo) and !holds(hi).
    let mut lo = 1u64;
    let mut hi = 2u64;
    while holds(hi)? {
        if hi > T0_SCAN_CAP {
            return Err(overflow);
        }
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo > T0_SCAN_CAP {
        return Err(overflow);
    }
    Ok(lo)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdversarialAudit {
    pub regret: f64,
    pub t0: u64,
    pub bound: f64,
    pub ok: bool,
}

/// Compares the realized regret against `t0 + R_hat(n)`.
pub fn audit_adversarial_regret(
    trace: &EpisodeTrace,
    rewards: &RewardMatrix,
    k: usize,
    alpha: f64,
    mu0: f64,
    delta: f64,
) -> Result<AdversarialAudit> {
    let regret = crate::domain::realized_regret(trace, rewards)?;
    let t0 = theorem3_t0(alpha, mu0, k, delta)?;
    let bound = t0 as f64 + admissible_bound(trace.horizon(), k, delta)?;
    Ok(AdversarialAudit {
        regret,
        t0,
        bound,
        ok: regret <= bound,
    })
}
