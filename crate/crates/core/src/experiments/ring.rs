use std::collections::BTreeMap;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fmt_opt, thin_geometric, write_rows, Engine, Strategy, SweepSpec};
use crate::error::{Error, Result};
use crate::network::{GossipNetwork, JammerSet};
use crate::placement::{ring_adjacent, ring_equidistant, ring_random};
use crate::sim::{derive_seed, simulate};
use crate::solver::{dismembered_ring_age, ring_scaling_bounds, RingModel};

const REL_TOL: f64 = 1e-12;
const SIGMAS: f64 = 3.0;
pub const RING_SIM_CAP: usize = 512;

/// Grid of ring sizes up to `n_max`: each jammer count `t` maps back to the
/// smallest `n` with `floor(c n^alpha) = t`. With `alpha = 0` the jammer
/// count is fixed and the sizes are spread geometrically.
pub fn ring_grid(alpha: f64, c: f64, n_max: usize, max_points: usize) -> Vec<usize> {
    let mut ns = Vec::new();
    if alpha <= 0.0 {
        ns.extend(2..=n_max);
    } else {
        for t in 1.. {
            let n = ((t as f64 / c).powf(1.0 / alpha).ceil() as usize).max(2);
            if n > n_max {
                break;
            }
            if ns.last() != Some(&n) {
                ns.push(n);
            }
        }
    }
    thin_geometric(&ns, max_points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingRow {
    pub n: usize,
    pub n_jammers: usize,
    pub strategy: Strategy,
    pub age_line: Option<f64>,
    pub age_miniring: Option<f64>,
    pub age_sim: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub seed: u64,
    /// Failed in-row checks.
    pub violations: Vec<String>,
}

impl RingRow {
    fn check(&mut self) {
        let le = |a: f64, b: f64| a <= b + REL_TOL * b.abs();
        let mut v = Vec::new();
        if let (Some(lo), Some(r)) = (self.lower_bound, self.age_miniring) {
            if !le(lo, r) {
                v.push(format!("lower bound {lo} exceeds miniring age {r}"));
            }
        }
        if let (Some(r), Some(l)) = (self.age_miniring, self.age_line) {
            if !le(r, l) {
                v.push(format!("miniring age {r} exceeds line age {l}"));
            }
            if !le(l, 2.0 * r) {
                v.push(format!("line age {l} exceeds twice the miniring age {r}"));
            }
        }
        if let (Some(l), Some(hi)) = (self.age_line, self.upper_bound) {
            if !le(l, hi) {
                v.push(format!("line age {l} exceeds upper bound {hi}"));
            }
        }
        if let (Some(s), Some(se), Some(l)) = (self.age_sim, self.sim_stderr, self.age_line) {
            if !((s - l).abs() <= SIGMAS * se) {
                v.push(format!("simulated age {s} +- {se} is more than {SIGMAS} standard errors from {l}"));
            }
        }
        self.violations = v;
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RingTable {
    pub rows: Vec<RingRow>,
    /// Sizes left out of the sweep and why.
    pub skipped: Vec<String>,
}

impl RingTable {
    /// Every failed in-row check, prefixed with its row.
    pub fn violations(&self) -> Vec<String> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.violations
                    .iter()
                    .map(move |v| format!("n={} jammers={} strategy={}: {v}", r.n, r.n_jammers, r.strategy))
            })
            .collect()
    }

    pub fn extend(&mut self, other: RingTable) {
        self.rows.extend(other.rows);
        self.skipped.extend(other.skipped);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        const HEADER: [&str; 10] = [
            "n",
            "n_jammers",
            "strategy",
            "age_line",
            "age_miniring",
            "age_sim",
            "sim_stderr",
            "lower_bound",
            "upper_bound",
            "seed",
        ];
        write_rows(out, &HEADER, &self.rows, |r| {
            vec![
                r.n.to_string(),
                r.n_jammers.to_string(),
                r.strategy.to_string(),
                fmt_opt(r.age_line),
                fmt_opt(r.age_miniring),
                fmt_opt(r.age_sim),
                fmt_opt(r.sim_stderr),
                fmt_opt(r.lower_bound),
                fmt_opt(r.upper_bound),
                r.seed.to_string(),
            ]
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn place(strategy: Strategy, n: usize, n_jammers: usize, seed: u64) -> Result<JammerSet> {
    match strategy {
        Strategy::Adjacent => ring_adjacent(n, n_jammers),
        Strategy::Equidistant => ring_equidistant(n, n_jammers),
        Strategy::Random => ring_random(n, n_jammers, seed),
        Strategy::Greedy => Err(Error::Config("greedy placement applies to fully connected networks".into())),
    }
}

fn ring_row(spec: &SweepSpec, n: usize) -> Result<std::result::Result<RingRow, String>> {
    let n_jammers = spec.jammer_rule.count(n, spec.alpha, spec.c);
    if n < 2 || n_jammers == 0 || n_jammers > n {
        return Ok(Err(format!("n={n}: {n_jammers} jammers do not fit a ring of {n} nodes")));
    }
    let seed = derive_seed(spec.seed, n as u64);
    let jam = place(spec.strategy, n, n_jammers, seed)?;
    let ratio = spec.lambda_ratio;
    let has = |e| spec.engines.contains(&e);

    let analytic = |model| dismembered_ring_age(n, &jam, model, 1.0, ratio).map(|r| r.average);
    let age_line = has(Engine::AnalyticLine).then(|| analytic(RingModel::Line)).transpose()?;
    let age_miniring = has(Engine::AnalyticMiniring).then(|| analytic(RingModel::Miniring)).transpose()?;
    let bounds = has(Engine::Bounds)
        .then(|| ring_scaling_bounds(n as f64, spec.alpha, spec.c))
        .transpose()?;
    let sim = if spec.simulates() && n <= spec.sim_cap.unwrap_or(RING_SIM_CAP) {
        let net = GossipNetwork::ring(n, 1.0, ratio)?.apply_jammers(&jam);
        Some(simulate(&net, &spec.sim_config(seed))?)
    } else {
        None
    };

    let mut row = RingRow {
        n,
        n_jammers,
        strategy: spec.strategy,
        age_line,
        age_miniring,
        age_sim: sim.as_ref().map(|s| s.average),
        sim_stderr: sim.as_ref().map(|s| s.average_std_error),
        lower_bound: bounds.map(|b| b.lower * ratio),
        upper_bound: bounds.map(|b| b.upper * ratio),
        seed,
        violations: Vec::new(),
    };
    row.check();
    Ok(Ok(row))
}

/// Average ages of jammed rings over the sweep's size grid, one row per size.
/// Rows carry their failed bound checks; see [`RingTable::violations`].
pub fn sweep_ring(spec: &SweepSpec) -> Result<RingTable> {
    spec.validate()?;
    if spec.strategy == Strategy::Greedy {
        return Err(Error::Config("ring sweeps take adjacent, equidistant or random placement".into()));
    }
    if spec.jammer_rule != super::JammerRule::Power {
        return Err(Error::Config("ring sweeps use the power jammer rule".into()));
    }
    let results: Vec<_> = spec.n_values.par_iter().map(|&n| ring_row(spec, n)).collect();
    let mut table = RingTable::default();
    for r in results {
        match r? {
            Ok(row) => table.rows.push(row),
            Err(why) => {
                log::warn!("skipping {why}");
                table.skipped.push(why);
            }
        }
    }
    Ok(table)
}

/// Check adjacent >= random >= equidistant on the miniring averages, for
/// every size present under all three strategies.
pub fn ring_ordering_violations(table: &RingTable) -> Vec<String> {
    let mut by_n: BTreeMap<usize, BTreeMap<Strategy, f64>> = BTreeMap::new();
    for r in &table.rows {
        if let Some(a) = r.age_miniring {
            by_n.entry(r.n).or_default().insert(r.strategy, a);
        }
    }
    let mut out = Vec::new();
    for (n, ages) in by_n {
        let get = |s| ages.get(&s).copied();
        if let (Some(adj), Some(rnd), Some(eq)) =
            (get(Strategy::Adjacent), get(Strategy::Random), get(Strategy::Equidistant))
        {
            if adj < rnd * (1.0 - REL_TOL) || rnd < eq * (1.0 - REL_TOL) {
                out.push(format!(
                    "n={n}: expected adjacent {adj} >= random {rnd} >= equidistant {eq}"
                ));
            }
        }
    }
    out
}
