//! Sweeps, exhaustive enumeration and property checks behind the CLI.

mod enumerate;
mod fc;
mod ring;
mod verify;

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{SimConfig, DEFAULT_WARMUP_FRACTION};

pub use enumerate::{enumerate_n6, EnumerationRow, EnumerationTable, GroupSummary};
pub use fc::{FC_SIM_CAP, fc_grid, largest_decade, log_log_slope, sweep_fc, FcRow, FcTable};
pub use ring::{RING_SIM_CAP, ring_grid, ring_ordering_violations, sweep_ring, RingRow, RingTable};
pub use verify::{
    check_consolidation, check_cut_toward_corner, check_engagement_sums, check_greedy_step, check_link_addition,
    check_oracle_equivalence, check_path_profiles, check_product_envelope, check_rd_table, check_ring_increment,
    check_ring_path_sandwich, check_ring_strategy_order, check_set_monotone, random_network, verify_properties,
    PropertyResult, VerifyLevel, VerifyReport, ENGAGEMENT_SUMS, RD_TABLE_HUNDREDTHS,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Adjacent,
    Equidistant,
    Random,
    Greedy,
}

impl Strategy {
    pub const RING: [Strategy; 3] = [Strategy::Adjacent, Strategy::Random, Strategy::Equidistant];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Adjacent => "adjacent",
            Strategy::Equidistant => "equidistant",
            Strategy::Random => "random",
            Strategy::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "adjacent" => Ok(Strategy::Adjacent),
            "equidistant" => Ok(Strategy::Equidistant),
            "random" => Ok(Strategy::Random),
            "greedy" => Ok(Strategy::Greedy),
            other => Err(Error::Config(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    AnalyticLine,
    AnalyticMiniring,
    Simulation,
    Bounds,
}

/// How the jammer count follows from `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JammerRule {
    /// `floor(c n^alpha)`
    #[default]
    Power,
    /// `floor(n ln n)`, fully connected sweeps only.
    NLogN,
}

impl JammerRule {
    pub fn count(&self, n: usize, alpha: f64, c: f64) -> usize {
        let nf = n as f64;
        let raw = match self {
            JammerRule::Power => c * nf.powf(alpha),
            JammerRule::NLogN => nf * nf.ln(),
        };
        // c n^alpha can land a hair under an integer it equals exactly
        (raw + 1e-9).floor().max(0.0) as usize
    }
}

fn default_engines() -> BTreeSet<Engine> {
    [Engine::AnalyticLine, Engine::AnalyticMiniring, Engine::Bounds].into()
}

/// One sweep: a grid of system sizes, a jammer rule and a placement strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepSpec {
    pub alpha: f64,
    pub c: f64,
    pub n_values: Vec<usize>,
    pub strategy: Strategy,
    pub jammer_rule: JammerRule,
    pub engines: BTreeSet<Engine>,
    pub seed: u64,
    pub horizon: f64,
    /// Defaults to 5% of the horizon.
    pub warmup: Option<f64>,
    pub replications: usize,
    /// Largest `n` that is simulated; 512 for rings and 256 for fully
    /// connected networks when unset.
    pub sim_cap: Option<usize>,
    /// `lambda_s / lambda`; ages scale linearly in it.
    pub lambda_ratio: f64,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            c: 1.0,
            n_values: Vec::new(),
            strategy: Strategy::Equidistant,
            jammer_rule: JammerRule::Power,
            engines: default_engines(),
            seed: 1,
            horizon: 1e5,
            warmup: None,
            replications: 10,
            sim_cap: None,
            lambda_ratio: 1.0,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.alpha) {
            return Err(Error::Domain(format!("alpha must lie in [0, 2], got {}", self.alpha)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Domain(format!("scale c must be positive, got {}", self.c)));
        }
        if !(self.lambda_ratio > 0.0 && self.lambda_ratio.is_finite()) {
            return Err(Error::Config(format!("lambda ratio must be positive, got {}", self.lambda_ratio)));
        }
        if self.n_values.is_empty() {
            return Err(Error::Config("n grid is empty".into()));
        }
        if self.n_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("n values must be strictly increasing".into()));
        }
        if self.simulates() {
            self.sim_config(0).validate()?;
        }
        Ok(())
    }

    pub fn simulates(&self) -> bool {
        self.engines.contains(&Engine::Simulation)
    }

    /// Simulation settings for one sweep point.
    pub fn sim_config(&self, seed: u64) -> SimConfig {
        SimConfig {
            horizon: self.horizon,
            warmup: self.warmup.unwrap_or(self.horizon * DEFAULT_WARMUP_FRACTION),
            seed,
            replications: self.replications,
        }
    }
}

/// Keep at most `max_points` of a sorted grid, roughly evenly in log scale,
/// always including both ends.
pub fn thin_geometric(values: &[usize], max_points: usize) -> Vec<usize> {
    if values.len() <= max_points || max_points < 2 {
        return values.to_vec();
    }
    let lo = (values[0].max(1) as f64).ln();
    let hi = (values[values.len() - 1] as f64).ln();
    let mut out: Vec<usize> = Vec::with_capacity(max_points);
    let mut idx = 0;
    for p in 0..max_points {
        let target = lo + (hi - lo) * p as f64 / (max_points - 1) as f64;
        while idx + 1 < values.len() && (values[idx] as f64).ln() < target {
            idx += 1;
        }
        if out.last() != Some(&values[idx]) {
            out.push(values[idx]);
        }
    }
    out
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_rows<W: Write, R>(out: W, header: &[&str], rows: &[R], fields: impl Fn(&R) -> Vec<String>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(fields(r))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        let mut spec = SweepSpec {
            n_values: vec![4, 8],
            ..SweepSpec::default()
        };
        assert!(spec.validate().is_ok());
        spec.n_values = vec![8, 8];
        assert!(spec.validate().is_err());
        spec.n_values = vec![8];
        spec.alpha = 2.5;
        assert!(matches!(spec.validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn spec_from_partial_json() {
        let spec: SweepSpec = serde_json::from_str(r#"{"alpha": 0.8, "n_values": [10, 20], "strategy": "adjacent"}"#).unwrap();
        assert_eq!(spec.alpha, 0.8);
        assert_eq!(spec.strategy, Strategy::Adjacent);
        assert_eq!(spec.replications, 10);
        assert_eq!(spec.sim_config(3).warmup, 5e3);
    }

    #[test]
    fn jammer_counts() {
        assert_eq!(JammerRule::Power.count(1000, 0.3, 1.0), 7);
        assert_eq!(JammerRule::Power.count(8, 1.0 / 3.0, 1.0), 2);
        assert_eq!(JammerRule::NLogN.count(13, 0.0, 1.0), 33);
    }

    #[test]
    fn thinning_keeps_ends() {
        let v: Vec<usize> = (1..=1000).collect();
        let t = thin_geometric(&v, 10);
        assert_eq!(t.first(), Some(&1));
        assert_eq!(t.last(), Some(&1000));
        assert!(t.len() <= 10 && t.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(thin_geometric(&[3, 5], 10), vec![3, 5]);
    }
}
