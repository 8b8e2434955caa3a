//! Built-in experiment setups.

use consbandit::harness::{DeltaSpec, ExperimentConfig, Sweep};
use consbandit::policies::PolicyKind;

use crate::CliError;

pub const NAMES: [&str; 2] = ["fig2", "fig3"];

const MEANS: [f64; 5] = [0.5, 0.6, 0.4, 0.4, 0.4];
const POLICIES: [PolicyKind; 5] = [
    PolicyKind::Ucb,
    PolicyKind::Cucb,
    PolicyKind::CucbUnknownMu0,
    PolicyKind::BudgetFirst,
    PolicyKind::UnbalancedMoss,
];
const REPLICATIONS: u64 = 4000;
pub const HORIZONS: [u64; 10] = [100, 200, 500, 1_000, 2_000, 5_000, 10_000, 20_000, 50_000, 100_000];

pub fn describe(name: &str) -> &'static str {
    match name {
        "fig2" => "regret against alpha (0.01, then 0.05 to 1 in steps of 0.05), n = 10^4, delta = 1/n",
        "fig3" => "regret against n (100 to 10^5), alpha = 0.1, delta = 1/n",
        _ => "",
    }
}

/// `start, start + step, ...` up to `end` inclusive, rounded to 10 decimals
/// so that e.g. 0.15 is exactly the literal 0.15.
pub fn grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0) || !start.is_finite() || !end.is_finite() || end < start {
        return Err(CliError::Config(format!(
            "grid: need start <= end and step > 0 (got {start}:{end}:{step})"
        )));
    }
    let count = ((end - start) / step + 1e-9).floor() as u64 + 1;
    Ok((0..count)
        .map(|i| {
            let x = start + i as f64 * step;
            format!("{x:.10}").parse().expect("formatted float parses")
        })
        .collect())
}

/// Default alpha grid for alpha sweeps.
pub fn alpha_grid() -> Vec<f64> {
    let mut values = vec![0.01];
    values.extend(grid(0.05, 1.0, 0.05).expect("static grid is valid"));
    values
}

pub fn preset(name: &str) -> Result<ExperimentConfig, CliError> {
    let mut config = ExperimentConfig::new(MEANS.to_vec(), 0.1, 10_000, DeltaSpec::InverseHorizon);
    config.policies = POLICIES.to_vec();
    config.replications = REPLICATIONS;
    match name {
        "fig2" => {
            let alphas = alpha_grid();
            config.alpha = alphas[0];
            config.sweep = Sweep::Alpha(alphas);
        }
        "fig3" => {
            config.horizon = HORIZONS[0];
            config.sweep = Sweep::Horizon(HORIZONS.to_vec());
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown preset {other:?} (available: {})",
                NAMES.join(", ")
            )))
        }
    }
    Ok(config)
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;
    use crate::config::{emit_config, parse_config_str};

    #[test]
    fn grid_arithmetic() {
        let g = grid(0.05, 1.0, 0.05).unwrap();
        assert_eq!(g.len(), 20);
        assert_eq!(g[2], 0.15);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(grid(1.0, 0.5, 0.1).is_err());
        assert!(grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn presets_round_trip() {
        for name in NAMES {
            let p = preset(name).unwrap();
            p.validate().unwrap();
            assert_eq!(parse_config_str(&emit_config(&p), &[], Path::new(".")).unwrap(), p);
        }
    }

    #[test]
    fn fig2_grid_shape() {
        let Sweep::Alpha(a) = preset("fig2").unwrap().sweep else {
            panic!("fig2 sweeps alpha");
        };
        assert_eq!(a.len(), 21);
        assert_eq!(a[0], 0.01);
        assert_eq!(a[1], 0.05);
    }

    #[test]
    fn unknown_preset() {
        assert!(preset("fig9").is_err());
    }
}
