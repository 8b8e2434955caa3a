//! Episode runner, Monte Carlo driver, audits and CSV output.

mod audit;
mod config;
mod episode;
mod monte_carlo;
mod output;

pub use audit::{
    audit_adversarial_regret, audit_constraint, audit_coverage, audit_pull_bound, lower_bound_b,
    theorem3_t0, AdversarialAudit, AuditMode, ConstraintAudit, CoverageAudit, LowerBound,
    PullAudit, T0_SCAN_CAP,
};
pub use config::{DeltaSpec, EnvKind, ExperimentConfig, Sweep, SweepPoint};
pub use episode::{run_episode, run_seeded, EpisodeSpec};
pub use monte_carlo::{aggregate, monte_carlo, MonteCarloOutput, RunRecord, SummaryStats};
pub use output::{
    format_float, read_summary_csv, runs_header, write_runs_csv, write_summary_csv, SummaryRow,
    SUMMARY_HEADER,
};
