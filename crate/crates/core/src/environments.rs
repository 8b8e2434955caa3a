//! Reward generators.
//!
//! Environments produce the full reward vector of every round (all arms, in
//! arm order) from their own random stream, so every policy run against the
//! same seed faces the same rewards.

use std::fmt;
use std::io::Read;
use std::str::FromStr;

use log::warn;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

pub trait Environment: Send {
    /// Number of arms including the default arm.
    fn num_arms(&self) -> usize;

    /// Writes the rewards of round `t` (1-based) for arms `0..num_arms`.
    fn rewards(&mut self, t: u64, out: &mut [f64]) -> Result<()>;
}

/// Noise law of a stochastic environment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Noise {
    /// `mu + sigma * N(0, 1)`.
    Gaussian { sigma: f64 },
    /// `1` with probability `mu`, else `0`.
    Bernoulli,
}

impl Noise {
    pub const UNIT_GAUSSIAN: Noise = Noise::Gaussian { sigma: 1.0 };
    pub const NONE: Noise = Noise::Gaussian { sigma: 0.0 };

    pub fn name(&self) -> &'static str {
        match self {
            Noise::Gaussian { sigma } if *sigma == 0.0 => "none",
            Noise::Gaussian { .. } => "gaussian",
            Noise::Bernoulli => "bernoulli",
        }
    }
}

impl Default for Noise {
    fn default() -> Self {
        Noise::UNIT_GAUSSIAN
    }
}

impl FromStr for Noise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Noise::UNIT_GAUSSIAN),
            "bernoulli" => Ok(Noise::Bernoulli),
            "none" => Ok(Noise::NONE),
            other => Err(Error::config(
                "noise",
                format!("unknown noise {other:?} (expected gaussian, bernoulli or none)"),
            )),
        }
    }
}

/// One stochastic reward of an arm with mean `mean`.
pub fn sample_stochastic<R: Rng + ?Sized>(mean: f64, noise: Noise, rng: &mut R) -> f64 {
    match noise {
        Noise::Gaussian { sigma } => {
            let z: f64 = rng.sample(StandardNormal);
            if sigma == 0.0 {
                mean
            } else {
                mean + sigma * z
            }
        }
        Noise::Bernoulli => {
            let u: f64 = rng.random();
            if u < mean {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// `X_{t,i} = mu_i + eta_{t,i}` with independent noise.
#[derive(Clone, Debug)]
pub struct StochasticEnv {
    means: Vec<f64>,
    noise: Noise,
    rng: ChaCha8Rng,
}

impl StochasticEnv {
    pub fn new(means: Vec<f64>, noise: Noise, rng: ChaCha8Rng) -> Self {
        Self { means, noise, rng }
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Draws the next reward of `arm` from the environment's stream.
    pub fn sample(&mut self, arm: usize) -> f64 {
        sample_stochastic(self.means[arm], self.noise, &mut self.rng)
    }
}

impl Environment for StochasticEnv {
    fn num_arms(&self) -> usize {
        self.means.len()
    }

    fn rewards(&mut self, _t: u64, out: &mut [f64]) -> Result<()> {
        for (x, &m) in out.iter_mut().zip(&self.means) {
            *x = sample_stochastic(m, self.noise, &mut self.rng);
        }
        Ok(())
    }
}

/// Built-in oblivious adversaries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Adversary {
    /// Arm `i` always pays `means[i]`.
    Constant,
    /// Like `Constant` for the first half; afterwards the non-default arms'
    /// payoffs are reversed, so the best arm switches.
    Drift,
    /// I.i.d. Bernoulli rewards with the given means.
    StochasticDisguise,
}

impl Adversary {
    pub const ALL: [Adversary; 3] = [
        Adversary::Constant,
        Adversary::Drift,
        Adversary::StochasticDisguise,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Adversary::Constant => "constant",
            Adversary::Drift => "drift",
            Adversary::StochasticDisguise => "stochastic-disguise",
        }
    }
}

impl fmt::Display for Adversary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Adversary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Adversary::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::config("environment", format!("unknown adversary {s:?}")))
    }
}

/// Rewards of the non-default arms, indexed by round and arm.
///
/// CSV form: header `t,arm,reward`, rounds from 1, arms `1..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct RewardTable {
    k: usize,
    cells: Vec<Option<f64>>,
}

impl RewardTable {
    /// Dense table from rows of `K` rewards each.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.first().map_or(0, Vec::len);
        if k == 0 {
            return Err(Error::MalformedEnvironment("empty reward table".into()));
        }
        let mut cells = Vec::with_capacity(rows.len() * k);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::MalformedEnvironment(format!(
                    "round {} has {} arms, expected {k}",
                    i + 1,
                    row.len()
                )));
            }
            cells.extend(row.iter().map(|&x| Some(x)));
        }
        Ok(Self { k, cells })
    }

    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["t", "arm", "reward"] {
            return Err(Error::MalformedEnvironment(format!(
                "expected header t,arm,reward, found {}",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut entries = Vec::new();
        for (line, record) in rdr.records().enumerate() {
            let record = record?;
            let field = |i: usize| record.get(i).unwrap_or("");
            let bad = |what: &str| {
                Error::MalformedEnvironment(format!("record {}: bad {what}", line + 1))
            };
            let t: u64 = field(0).parse().map_err(|_| bad("round"))?;
            let arm: usize = field(1).parse().map_err(|_| bad("arm"))?;
            let reward: f64 = field(2).parse().map_err(|_| bad("reward"))?;
            if t == 0 {
                return Err(bad("round (rounds start at 1)"));
            }
            if arm == 0 {
                return Err(bad("arm (arm 0 is implicit)"));
            }
            entries.push((t, arm, reward));
        }
        let rounds = entries.iter().map(|e| e.0).max().unwrap_or(0) as usize;
        let k = entries.iter().map(|e| e.1).max().unwrap_or(0);
        if rounds == 0 {
            return Err(Error::MalformedEnvironment("empty reward table".into()));
        }
        let mut cells = vec![None; rounds * k];
        for (t, arm, reward) in entries {
            let slot = &mut cells[(t as usize - 1) * k + arm - 1];
            if slot.is_some() {
                return Err(Error::MalformedEnvironment(format!(
                    "duplicate entry for round {t}, arm {arm}"
                )));
            }
            *slot = Some(reward);
        }
        Ok(Self { k, cells })
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "arm", "reward"])?;
        for t in 1..=self.rounds() {
            for arm in 1..=self.k {
                if let Some(x) = self.get(t, arm) {
                    w.write_record([t.to_string(), arm.to_string(), x.to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rounds(&self) -> u64 {
        (self.cells.len() / self.k) as u64
    }

    /// Raw entry for round `t`, arm `1..=K`.
    pub fn get(&self, t: u64, arm: usize) -> Option<f64> {
        if t == 0 || arm == 0 || arm > self.k || t > self.rounds() {
            return None;
        }
        self.cells[(t as usize - 1) * self.k + arm - 1]
    }

    /// Average reward of each non-default arm over the present entries.
    pub fn column_means(&self) -> Vec<f64> {
        (1..=self.k)
            .map(|arm| {
                let xs: Vec<f64> = (1..=self.rounds())
                    .filter_map(|t| self.get(t, arm))
                    .map(|x| x.clamp(0.0, 1.0))
                    .collect();
                if xs.is_empty() {
                    0.0
                } else {
                    crate::sum::sum(xs.iter().copied()) / xs.len() as f64
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
enum Generator {
    Table(std::sync::Arc<RewardTable>),
    Builtin {
        adversary: Adversary,
        means: Vec<f64>,
        horizon: u64,
        seed: u64,
        rng: ChaCha8Rng,
    },
}

/// Adversarial environment; the default arm always pays `mu0`.
#[derive(Clone, Debug)]
pub struct AdversarialEnv {
    mu0: f64,
    k: usize,
    generator: Generator,
    clamped: u64,
}

impl AdversarialEnv {
    pub fn from_table(mu0: f64, table: std::sync::Arc<RewardTable>) -> Result<Self> {
        check_mu0(mu0)?;
        Ok(Self {
            mu0,
            k: table.k(),
            generator: Generator::Table(table),
            clamped: 0,
        })
    }

    /// `means[0]` is `mu0`; `means[1..]` parameterize the adversary.
    pub fn builtin(adversary: Adversary, means: Vec<f64>, horizon: u64, seed: u64) -> Result<Self> {
        let mu0 = *means
            .first()
            .ok_or_else(|| Error::MalformedEnvironment("no arms".into()))?;
        check_mu0(mu0)?;
        Ok(Self {
            mu0,
            k: means.len() - 1,
            generator: Generator::Builtin {
                adversary,
                means,
                horizon,
                seed,
                rng: ChaCha8Rng::seed_from_u64(seed),
            },
            clamped: 0,
        })
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    /// Rewards that were outside `[0, 1]` and got clamped.
    pub fn clamped_rewards(&self) -> u64 {
        self.clamped
    }

    /// Reward of `arm` at round `t`. Random access; sequential generation
    /// through [`Environment::rewards`] yields the same values.
    pub fn reward(&mut self, t: u64, arm: usize) -> Result<f64> {
        if arm == 0 {
            return Ok(self.mu0);
        }
        if arm > self.k {
            return Err(Error::MalformedEnvironment(format!("arm {arm} outside 0..={}", self.k)));
        }
        let raw = match &self.generator {
            Generator::Table(table) => table.get(t, arm).ok_or_else(|| {
                Error::MalformedEnvironment(format!("no reward for round {t}, arm {arm}"))
            })?,
            Generator::Builtin {
                adversary,
                means,
                horizon,
                seed,
                ..
            } => match adversary {
                Adversary::Constant => means[arm],
                Adversary::Drift => drift_reward(means, *horizon, t, arm),
                Adversary::StochasticDisguise => {
                    let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                    rng.set_word_pos(disguise_word(t, arm, self.k));
                    bernoulli(&mut rng, means[arm])
                }
            },
        };
        Ok(self.clamp(t, arm, raw))
    }

    fn clamp(&mut self, t: u64, arm: usize, x: f64) -> f64 {
        if (0.0..=1.0).contains(&x) {
            return x;
        }
        if self.clamped == 0 {
            warn!("reward {x} at round {t}, arm {arm} outside [0, 1]; clamping (further clamps are silent)");
        }
        self.clamped += 1;
        x.clamp(0.0, 1.0)
    }
}

fn check_mu0(mu0: f64) -> Result<()> {
    if (0.0..=1.0).contains(&mu0) {
        Ok(())
    } else {
        Err(Error::config("means", format!("default reward {mu0} outside [0, 1]")))
    }
}

fn drift_reward(means: &[f64], horizon: u64, t: u64, arm: usize) -> f64 {
    let k = means.len() - 1;
    if t > horizon / 2 {
        means[k + 1 - arm]
    } else {
        means[arm]
    }
}

// Each Bernoulli draw reads one u64, i.e. two 32-bit words of the stream.
fn disguise_word(t: u64, arm: usize, k: usize) -> u128 {
    ((t - 1) as u128 * k as u128 + (arm - 1) as u128) * 2
}

fn bernoulli(rng: &mut ChaCha8Rng, p: f64) -> f64 {
    // Same mapping as `Rng::random::<f64>`: top 53 bits of one u64.
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    if u < p {
        1.0
    } else {
        0.0
    }
}

impl Environment for AdversarialEnv {
    fn num_arms(&self) -> usize {
        self.k + 1
    }

    fn rewards(&mut self, t: u64, out: &mut [f64]) -> Result<()> {
        out[0] = self.mu0;
        if let Generator::Builtin {
            adversary: Adversary::StochasticDisguise,
            means,
            rng,
            ..
        } = &mut self.generator
        {
            for (x, &m) in out[1..].iter_mut().zip(&means[1..]) {
                *x = bernoulli(rng, m);
            }
            for arm in 1..=self.k {
                out[arm] = self.clamp(t, arm, out[arm]);
            }
            return Ok(());
        }
        for arm in 1..=self.k {
            out[arm] = self.reward(t, arm)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    #[test]
    fn zero_noise_returns_means() {
        let mut env = StochasticEnv::new(vec![0.5, 0.6], Noise::NONE, stream(1, Stream::Environment));
        let mut out = [0.0; 2];
        for t in 1..=10 {
            env.rewards(t, &mut out).unwrap();
            assert_eq!(out, [0.5, 0.6]);
        }
    }

    #[test]
    fn gaussian_sample_mean() {
        let mut env = StochasticEnv::new(vec![0.5], Noise::UNIT_GAUSSIAN, stream(2, Stream::Environment));
        let n = 1_000_000;
        let mean = crate::sum::sum((0..n).map(|_| env.sample(0))) / n as f64;
        // 3 sigma / sqrt(N) = 0.003
        assert!((mean - 0.5).abs() < 0.004, "mean {mean}");
    }

    #[test]
    fn bernoulli_rewards_are_binary() {
        let mut rng = stream(3, Stream::Environment);
        let xs: Vec<f64> = (0..10_000).map(|_| sample_stochastic(0.3, Noise::Bernoulli, &mut rng)).collect();
        assert!(xs.iter().all(|&x| x == 0.0 || x == 1.0));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.3).abs() < 0.02);
    }

    #[test]
    fn stochastic_replay_is_identical() {
        let draw = || {
            let mut env = StochasticEnv::new(vec![0.5, 0.6, 0.4], Noise::UNIT_GAUSSIAN, stream(9, Stream::Environment));
            let mut out = vec![0.0; 3];
            let mut all = Vec::new();
            for t in 1..=100 {
                env.rewards(t, &mut out).unwrap();
                all.extend_from_slice(&out);
            }
            all
        };
        let (a, b) = (draw(), draw());
        assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn arms_are_uncorrelated() {
        let mut env = StochasticEnv::new(vec![0.5, 0.5], Noise::UNIT_GAUSSIAN, stream(4, Stream::Environment));
        let n = 100_000;
        let mut out = [0.0; 2];
        let (mut sx, mut sy, mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for t in 1..=n {
            env.rewards(t, &mut out).unwrap();
            let (x, y) = (out[0], out[1]);
            sx += x;
            sy += y;
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
        let nf = n as f64;
        let cov = sxy / nf - (sx / nf) * (sy / nf);
        let corr = cov / ((sxx / nf - (sx / nf).powi(2)) * (syy / nf - (sy / nf).powi(2))).sqrt();
        assert!(corr.abs() < 0.01, "corr {corr}");
    }

    #[test]
    fn default_arm_is_fixed() {
        let mut env = AdversarialEnv::builtin(Adversary::Drift, vec![0.4, 0.6, 0.2], 10, 0).unwrap();
        for t in 1..=10 {
            assert_eq!(env.reward(t, 0).unwrap(), 0.4);
        }
    }

    #[test]
    fn constant_adversary() {
        let mut env = AdversarialEnv::builtin(Adversary::Constant, vec![0.5, 0.6, 0.4], 10, 0).unwrap();
        for t in 1..=10 {
            assert_eq!(env.reward(t, 1).unwrap(), 0.6);
        }
    }

    #[test]
    fn drift_switches_best_arm() {
        let mut env = AdversarialEnv::builtin(Adversary::Drift, vec![0.5, 0.6, 0.4, 0.3], 10, 0).unwrap();
        assert_eq!(env.reward(5, 1).unwrap(), 0.6);
        assert_eq!(env.reward(6, 1).unwrap(), 0.3);
        assert_eq!(env.reward(6, 3).unwrap(), 0.6);
    }

    #[test]
    fn disguise_random_access_matches_sequential() {
        let means = vec![0.5, 0.6, 0.3, 0.9];
        let mut seq = AdversarialEnv::builtin(Adversary::StochasticDisguise, means.clone(), 50, 11).unwrap();
        let mut random = AdversarialEnv::builtin(Adversary::StochasticDisguise, means, 50, 11).unwrap();
        let mut out = [0.0; 4];
        for t in 1..=50 {
            seq.rewards(t, &mut out).unwrap();
            for arm in 0..4 {
                assert_eq!(random.reward(t, arm).unwrap(), out[arm]);
            }
        }
    }

    #[test]
    fn table_csv_and_errors() {
        let csv = "t,arm,reward\n1,1,0.2\n1,2,1.2\n2,1,0.4\n";
        let table = std::sync::Arc::new(RewardTable::from_csv(csv.as_bytes()).unwrap());
        assert_eq!(table.k(), 2);
        assert_eq!(table.rounds(), 2);
        let mut env = AdversarialEnv::from_table(0.5, table).unwrap();
        assert_eq!(env.reward(1, 1).unwrap(), 0.2);
        assert_eq!(env.reward(1, 2).unwrap(), 1.0);
        assert_eq!(env.clamped_rewards(), 1);
        assert!(matches!(env.reward(2, 2), Err(Error::MalformedEnvironment(_))));
        assert!(matches!(env.reward(3, 1), Err(Error::MalformedEnvironment(_))));

        assert!(RewardTable::from_csv("round,arm,reward\n1,1,0.2\n".as_bytes()).is_err());
        assert!(RewardTable::from_csv("t,arm,reward\n1,0,0.2\n".as_bytes()).is_err());
        assert!(RewardTable::from_csv("t,arm,reward\n1,1,0.2\n1,1,0.3\n".as_bytes()).is_err());
    }

    #[test]
    fn table_csv_round_trip() {
        let table = RewardTable::from_rows(&[vec![0.1, 0.9], vec![0.25, 0.5]]).unwrap();
        let mut buf = Vec::new();
        table.write_csv(&mut buf).unwrap();
        assert_eq!(RewardTable::from_csv(buf.as_slice()).unwrap(), table);
    }

    #[test]
    fn noise_names() {
        for name in ["gaussian", "bernoulli", "none"] {
            assert_eq!(name.parse::<Noise>().unwrap().name(), name);
        }
    }
}
