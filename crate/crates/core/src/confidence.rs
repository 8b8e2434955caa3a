//! Confidence-interval widths.
//!
//! A schedule maps a pull count `s` to `psi(s)`, and the radius of an arm's
//! interval after `s` pulls is `sqrt(psi(s) / s)`. With probability at least
//! `1 - delta` every interval of every arm contains the true mean at every
//! round (the "all intervals valid" event). All logarithms are natural.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use crate::domain::ArmStats;
use crate::{Error, Result};

/// Which width function to use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum PsiVariant {
    /// `2 ln(K s^3 / delta)`, valid by Hoeffding plus union bounds.
    Simple,
    /// Iterated-logarithm width; tighter in practice.
    #[default]
    Refined,
}

impl PsiVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            PsiVariant::Simple => "simple",
            PsiVariant::Refined => "refined",
        }
    }
}

impl fmt::Display for PsiVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PsiVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(PsiVariant::Simple),
            "refined" => Ok(PsiVariant::Refined),
            other => Err(Error::config(
                "psi",
                format!("unknown variant {other:?} (expected \"simple\" or \"refined\")"),
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfidenceSchedule {
    variant: PsiVariant,
    arms: usize,
    delta: f64,
    zeta: f64,
    // Refined width: offset + slope * ln ln(1 + s).
    offset: f64,
    slope: f64,
}

impl ConfidenceSchedule {
    /// `arms` is the number of arms whose means are being estimated.
    pub fn new(variant: PsiVariant, arms: usize, delta: f64) -> Result<Self> {
        if arms == 0 {
            return Err(Error::config("K", "need at least one estimated arm"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::config("delta", format!("{delta} is outside (0, 1)")));
        }
        let zeta = arms as f64 / delta;
        let ln_zeta = zeta.ln();
        let offset = ln_zeta.max(3.0).ln() + (2.0 * E * E * zeta).ln();
        let slope = zeta * (1.0 + ln_zeta) / ((zeta - 1.0) * ln_zeta);
        Ok(Self {
            variant,
            arms,
            delta,
            zeta,
            offset,
            slope,
        })
    }

    pub fn variant(&self) -> PsiVariant {
        self.variant
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `K / delta`.
    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// Coefficient of `ln ln(1 + s)` in the refined width.
    pub fn refined_slope(&self) -> f64 {
        self.slope
    }

    pub fn psi(&self, s: u64) -> Result<f64> {
        match self.variant {
            PsiVariant::Simple => self.psi_simple(s),
            PsiVariant::Refined => self.psi_refined(s),
        }
    }

    pub fn psi_simple(&self, s: u64) -> Result<f64> {
        nonzero(s)?;
        Ok(self.simple_width(s as f64))
    }

    pub fn psi_refined(&self, s: u64) -> Result<f64> {
        nonzero(s)?;
        Ok(self.refined_width(s as f64))
    }

    fn simple_width(&self, s: f64) -> f64 {
        2.0 * (self.arms as f64 * s * s * s / self.delta).ln()
    }

    fn refined_width(&self, s: f64) -> f64 {
        self.offset + self.slope * (1.0 + s).ln().ln()
    }

    /// Interval half-width after `pulls` observations; `+inf` when unpulled.
    pub fn radius_for(&self, pulls: u64) -> f64 {
        if pulls == 0 {
            return f64::INFINITY;
        }
        let s = pulls as f64;
        let psi = match self.variant {
            PsiVariant::Simple => self.simple_width(s),
            PsiVariant::Refined => self.refined_width(s),
        };
        (psi / s).sqrt()
    }

    pub fn radius(&self, stats: &ArmStats) -> f64 {
        self.radius_for(stats.pulls())
    }
}

fn nonzero(s: u64) -> Result<()> {
    if s == 0 {
        Err(Error::Domain("psi is undefined at s = 0".into()))
    } else {
        Ok(())
    }
}

/// `sqrt(psi / pulls)` for an explicit width value; `+inf` when unpulled.
pub fn radius_from_psi(pulls: u64, psi: f64) -> f64 {
    if pulls == 0 {
        f64::INFINITY
    } else {
        (psi / pulls as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn schedule(variant: PsiVariant, k: usize, delta: f64) -> ConfidenceSchedule {
        ConfidenceSchedule::new(variant, k, delta).unwrap()
    }

    #[test]
    fn simple_width_values() {
        let s = schedule(PsiVariant::Simple, 4, 0.1);
        assert!((s.psi(1).unwrap() - 7.377_758_908_227_872_5).abs() < 1e-12);
        assert!((s.psi(10).unwrap() - 21.193_269_466_192_145).abs() < 1e-12);
        let unit = schedule(PsiVariant::Simple, 1, (-3.0f64).exp());
        assert!((unit.psi(1).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn refined_width_values() {
        let s = schedule(PsiVariant::Refined, 4, 0.1);
        assert_eq!(s.zeta(), 40.0);
        assert!((s.psi(1).unwrap() - 7.209_534_927_531_655).abs() < 1e-12);
        assert!(s.psi(10).unwrap() > s.psi(1).unwrap());
        assert!((s.refined_slope() - 1.303_676_954_545_453_2).abs() < 1e-12);
    }

    #[test]
    fn zero_pulls_is_a_domain_error() {
        for v in [PsiVariant::Simple, PsiVariant::Refined] {
            assert!(matches!(schedule(v, 4, 0.1).psi(0), Err(Error::Domain(_))));
        }
    }

    #[test]
    fn radius_examples() {
        let s = schedule(PsiVariant::Refined, 4, 0.1);
        assert_eq!(s.radius(&ArmStats::new()), f64::INFINITY);
        assert_eq!(radius_from_psi(4, 16.0), 2.0);
        assert!(radius_from_psi(1_000_000, 100.0) <= 0.01);
        assert!(radius_from_psi(1_000_000, 99.0) < 0.01);
    }

    #[test]
    fn radius_agrees_with_psi() {
        for v in [PsiVariant::Simple, PsiVariant::Refined] {
            let s = schedule(v, 3, 0.05);
            for pulls in [1, 2, 17, 1000] {
                let expected = (s.psi(pulls).unwrap() / pulls as f64).sqrt();
                assert!((s.radius_for(pulls) - expected).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn simple_radius_strictly_decreasing() {
        let s = schedule(PsiVariant::Simple, 4, 0.1);
        let mut prev = s.radius_for(3);
        for pulls in 4..=100_000 {
            let r = s.radius_for(pulls);
            assert!(r < prev, "radius not decreasing at {pulls}");
            prev = r;
        }
    }

    #[test]
    fn widths_nondecreasing() {
        for v in [PsiVariant::Simple, PsiVariant::Refined] {
            let s = schedule(v, 4, 0.1);
            let mut prev = s.psi(1).unwrap();
            for pulls in 2..=10_000 {
                let p = s.psi(pulls).unwrap();
                assert!(p >= prev);
                prev = p;
            }
        }
    }

    #[test]
    fn variant_parsing() {
        assert_eq!("simple".parse::<PsiVariant>().unwrap(), PsiVariant::Simple);
        assert_eq!("refined".parse::<PsiVariant>().unwrap(), PsiVariant::Refined);
        assert!("kl".parse::<PsiVariant>().is_err());
    }

    #[test]
    fn schedule_rejects_bad_delta() {
        assert!(ConfidenceSchedule::new(PsiVariant::Simple, 4, 1.0).is_err());
        assert!(ConfidenceSchedule::new(PsiVariant::Simple, 0, 0.1).is_err());
    }
}
