use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use consbandit::harness::{
    format_float, lower_bound_b, monte_carlo, read_summary_csv, write_runs_csv, write_summary_csv,
    ExperimentConfig, Sweep, SUMMARY_HEADER,
};

use crate::config::{emit_config, parse_config, parse_config_str};
use crate::presets::{self, alpha_grid, grid, HORIZONS};
use crate::{CliError, Source};

const THREADS_VAR: &str = "CONSBANDIT_THREADS";

fn load(source: &Source) -> Result<ExperimentConfig, CliError> {
    match (&source.config, &source.preset) {
        (Some(path), _) => parse_config(path, &source.overrides),
        (None, Some(name)) => {
            let text = emit_config(&presets::preset(name)?);
            parse_config_str(&text, &source.overrides, Path::new("."))
        }
        (None, None) => Err(CliError::Config("need --config or --preset".into())),
    }
}

fn threads() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("{THREADS_VAR}: expected a positive integer, got {v:?}"))),
        },
    }
}

fn runtime<'a>(context: &'a str, path: &'a Path) -> impl Fn(std::io::Error) -> CliError + 'a {
    move |e| CliError::Runtime(format!("{context} {}: {e}", path.display()))
}

// A closed stdout (say, piped into `head`) is not worth failing over.
macro_rules! say {
    ($($arg:tt)*) => {
        let _ = writeln!(io::stdout().lock(), $($arg)*);
    };
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(runtime("cannot create", path))
}

pub fn run(source: &Source, sweep: Option<Sweep>) -> Result<(), CliError> {
    let mut config = load(source)?;
    if let Some(sweep) = sweep {
        match &sweep {
            Sweep::Alpha(v) => config.alpha = v[0],
            Sweep::Horizon(v) => config.horizon = v[0],
            Sweep::None => {}
        }
        config.sweep = sweep;
        config.validate()?;
    }
    let threads = threads()?;
    let out = &source.out;
    fs::create_dir_all(out).map_err(runtime("cannot create output directory", out))?;

    let result = monte_carlo(&config, threads)?;
    write_runs_csv(create(&out.join("runs.csv"))?, &result.runs)?;
    write_summary_csv(create(&out.join("summary.csv"))?, &result.summaries)?;
    let config_path = out.join("config.json");
    fs::write(&config_path, emit_config(&config)).map_err(runtime("cannot write", &config_path))?;

    for s in &result.summaries {
        let point = match s.sweep_var {
            "none" => String::new(),
            var => format!(" {var}={}", s.sweep_value),
        };
        say!(
            "{:<17}{point}: regret {:.3} ± {:.3}, violation rate {:.4}, mean min budget {:.3}",
            s.policy, s.mean_pseudo_regret, s.stderr, s.violation_rate, s.mean_min_budget
        );
    }
    Ok(())
}

pub fn sweep_alpha(source: &Source, spec: Option<&str>) -> Result<(), CliError> {
    let values = match spec {
        None => alpha_grid(),
        Some(spec) => {
            let parts: Vec<f64> = spec
                .split(':')
                .map(|p| p.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Config(format!("grid: {spec:?} is not start:end:step")))?;
            let [start, end, step] = parts[..] else {
                return Err(CliError::Config(format!("grid: {spec:?} is not start:end:step")));
            };
            grid(start, end, step)?
        }
    };
    run(source, Some(Sweep::Alpha(values)))
}

pub fn sweep_horizon(source: &Source, spec: Option<&str>) -> Result<(), CliError> {
    let values = match spec {
        None => HORIZONS.to_vec(),
        Some(spec) => spec
            .split(',')
            .map(|p| p.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError::Config(format!("grid: {spec:?} is not a comma-separated list of horizons")))?,
    };
    run(source, Some(Sweep::Horizon(values)))
}

pub fn report(input: &Path, out: Option<&Path>) -> Result<(), CliError> {
    let summary_path = input.join("summary.csv");
    let summary = File::open(&summary_path).map_err(|e| {
        CliError::Config(format!("cannot open {}: {e}", summary_path.display()))
    })?;
    let rows = read_summary_csv(summary)?;
    let config_path = input.join("config.json");
    let text = fs::read_to_string(&config_path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config_path.display())))?;
    // Only the problem parameters matter here; skip loading reward tables.
    let config = parse_config_str(&text, &["environment=stochastic".into()], input)?;
    let k = config.means.len() - 1;
    let mu0 = config.means[0];

    let out_path: PathBuf = out.map_or_else(|| input.join("report.csv"), Path::to_path_buf);
    let mut w = csv::Writer::from_writer(create(&out_path)?);
    let mut header: Vec<&str> = SUMMARY_HEADER.to_vec();
    header.extend(["alpha", "n", "lower_bound_b", "lower_bound_valid"]);
    w.write_record(&header).map_err(consbandit::Error::from)?;
    for row in &rows {
        let (alpha, n) = match row.sweep_var.as_str() {
            "alpha" => (row.sweep_value, config.horizon),
            "n" => (config.alpha, row.sweep_value as u64),
            _ => (config.alpha, config.horizon),
        };
        let b = lower_bound_b(k, n, alpha, mu0);
        w.write_record([
            row.policy.clone(),
            row.sweep_var.clone(),
            format_float(row.sweep_value),
            format_float(row.mean_pseudo_regret),
            format_float(row.stderr),
            format_float(row.violation_rate),
            format_float(row.mean_min_budget),
            format_float(alpha),
            n.to_string(),
            format_float(b.value),
            u8::from(b.valid).to_string(),
        ])
        .map_err(consbandit::Error::from)?;
        say!(
            "{:<17} alpha={alpha} n={n}: regret {:.3} ± {:.3}, lower bound {:.3}{}",
            row.policy,
            row.mean_pseudo_regret,
            row.stderr,
            b.value,
            if b.valid { "" } else { " (precondition fails)" }
        );
    }
    w.flush().map_err(runtime("cannot write", &out_path))?;
    Ok(())
}

pub fn presets(name: Option<&str>) -> Result<(), CliError> {
    match name {
        None => {
            for name in presets::NAMES {
                say!("{name}: {}", presets::describe(name));
            }
        }
        Some(name) => {
            let _ = io::stdout().lock().write_all(emit_config(&presets::preset(name)?).as_bytes());
        }
    }
    Ok(())
}
