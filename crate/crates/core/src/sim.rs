//! Event-driven Monte Carlo simulation of version-age gossip.
//!
//! All clocks are Poisson, so the process is simulated as one exponential
//! clock at the total rate with the firing event drawn from an alias table.
//! Ages are integrated exactly between events: the age of node `i` is
//! `N(t) - N_i(t)`, so it suffices to integrate the source version and each
//! node version separately, touching a node only when its version changes.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{weighted::WeightedAliasIndex, Distribution, Exp};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::GossipNetwork;

/// Fraction of the horizon discarded as warmup by default.
pub const DEFAULT_WARMUP_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Simulated time per replication.
    pub horizon: f64,
    /// Prefix of each replication excluded from the averages.
    pub warmup: f64,
    pub seed: u64,
    pub replications: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self::new(1e5, 0, 10)
    }
}

impl SimConfig {
    /// Config with the default warmup of 5% of the horizon.
    pub fn new(horizon: f64, seed: u64, replications: usize) -> Self {
        Self {
            horizon,
            warmup: horizon * DEFAULT_WARMUP_FRACTION,
            seed,
            replications,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.warmup.is_finite()) {
            return Err(Error::Config("horizon and warmup must be finite".into()));
        }
        if !(self.warmup >= 0.0 && self.horizon > self.warmup) {
            return Err(Error::Config(format!(
                "need horizon > warmup >= 0, got horizon {} and warmup {}",
                self.horizon, self.warmup
            )));
        }
        if self.replications == 0 {
            return Err(Error::Config("at least one replication is required".into()));
        }
        Ok(())
    }

    fn window(&self) -> f64 {
        self.horizon - self.warmup
    }
}

/// Time-averaged ages over the replications.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub per_node_time_avg: Vec<f64>,
    pub average: f64,
    /// Standard error of each node's mean across replications; NaN with a single replication.
    pub std_error: Vec<f64>,
    pub average_std_error: f64,
    /// Events fired in each replication over `(0, horizon]`.
    pub events: Vec<u64>,
}

impl SimResult {
    /// `node_id,mean_age,std_error` rows with 1-based node ids.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node_id", "mean_age", "std_error"])?;
        for (i, (m, se)) in self.per_node_time_avg.iter().zip(&self.std_error).enumerate() {
            w.write_record([(i + 1).to_string(), m.to_string(), se.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetAgeEstimate {
    pub mean: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Copy)]
enum Event {
    SourceTick,
    SourcePush(usize),
    Gossip { from: usize, to: usize },
}

/// Static event table of a network; built once, shared by replications.
struct EventTable {
    n: usize,
    events: Vec<Event>,
    picker: WeightedAliasIndex<f64>,
    clock: Exp<f64>,
}

impl EventTable {
    fn new(net: &GossipNetwork) -> Result<Self> {
        let mut events = Vec::new();
        let mut weights = Vec::new();
        let mut push = |e: Event, w: f64| {
            if w > 0.0 {
                events.push(e);
                weights.push(w);
            }
        };
        push(Event::SourceTick, net.lambda_s());
        for (j, &r) in net.source_rates().iter().enumerate() {
            push(Event::SourcePush(j), r);
        }
        for ((i, j), r) in net.links() {
            push(Event::Gossip { from: i, to: j }, r.forward);
            push(Event::Gossip { from: j, to: i }, r.backward);
        }
        let total: f64 = weights.iter().sum();
        if events.is_empty() || !(total.is_finite() && total > 0.0) {
            return Err(Error::Degenerate("network has no positive event rate".into()));
        }
        let picker = WeightedAliasIndex::new(weights).map_err(|e| Error::Degenerate(e.to_string()))?;
        let clock = Exp::new(total).map_err(|e| Error::Degenerate(e.to_string()))?;
        Ok(Self {
            n: net.n(),
            events,
            picker,
            clock,
        })
    }
}

/// Integral of a nondecreasing step function, restricted to `[from, ..)`.
#[derive(Debug, Clone, Copy)]
struct StepIntegral {
    value: u64,
    since: f64,
    area: f64,
}

impl StepIntegral {
    fn new() -> Self {
        Self {
            value: 0,
            since: 0.0,
            area: 0.0,
        }
    }

    fn advance(&mut self, t: f64, from: f64) {
        let start = self.since.max(from);
        if t > start {
            self.area += self.value as f64 * (t - start);
        }
        self.since = t;
    }

    fn set(&mut self, value: u64, t: f64, from: f64) {
        self.advance(t, from);
        self.value = value;
    }
}

struct Replication {
    node_avg: Vec<f64>,
    set_avg: Option<f64>,
    events: u64,
}

fn replicate(table: &EventTable, cfg: &SimConfig, stream: u64, set: Option<&[bool]>) -> Replication {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    let w = cfg.warmup;
    let mut source = StepIntegral::new();
    let mut nodes = vec![StepIntegral::new(); table.n];
    let mut set_best = set.map(|_| StepIntegral::new());
    let mut t = 0.0;
    let mut events = 0u64;

    loop {
        t += table.clock.sample(&mut rng);
        if t > cfg.horizon {
            break;
        }
        events += 1;
        let updated = match table.events[table.picker.sample(&mut rng)] {
            Event::SourceTick => {
                let v = source.value + 1;
                source.set(v, t, w);
                None
            }
            Event::SourcePush(j) => Some((j, source.value)),
            Event::Gossip { from, to } => Some((to, nodes[from].value)),
        };
        if let Some((j, incoming)) = updated {
            // stale packets are discarded
            if incoming > nodes[j].value {
                nodes[j].set(incoming, t, w);
                if let (Some(best), Some(mask)) = (set_best.as_mut(), set) {
                    if mask[j] && incoming > best.value {
                        best.set(incoming, t, w);
                    }
                }
            }
            debug_assert!(nodes[j].value <= source.value);
        }
    }

    let horizon = cfg.horizon;
    source.advance(horizon, w);
    let window = cfg.window();
    let node_avg = nodes
        .iter_mut()
        .map(|s| {
            s.advance(horizon, w);
            (source.area - s.area) / window
        })
        .collect();
    let set_avg = set_best.map(|mut b| {
        b.advance(horizon, w);
        (source.area - b.area) / window
    });
    Replication {
        node_avg,
        set_avg,
        events,
    }
}

fn mean_and_se(samples: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let count = samples.clone().count() as f64;
    let mean = samples.clone().sum::<f64>() / count;
    if count < 2.0 {
        return (mean, f64::NAN);
    }
    let var = samples.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (count - 1.0);
    (mean, (var / count).sqrt())
}

fn run(net: &GossipNetwork, cfg: &SimConfig, set: Option<&[bool]>) -> Result<Vec<Replication>> {
    cfg.validate()?;
    let table = EventTable::new(net)?;
    Ok((0..cfg.replications as u64)
        .into_par_iter()
        .map(|rep| replicate(&table, cfg, rep, set))
        .collect())
}

/// Simulate `cfg.replications` independent runs and average per-node ages
/// over `(warmup, horizon]`. Deterministic for a fixed config.
pub fn simulate(net: &GossipNetwork, cfg: &SimConfig) -> Result<SimResult> {
    let reps = run(net, cfg, None)?;
    let n = net.n();
    let mut per_node_time_avg = Vec::with_capacity(n);
    let mut std_error = Vec::with_capacity(n);
    for i in 0..n {
        let (m, se) = mean_and_se(reps.iter().map(|r| r.node_avg[i]));
        per_node_time_avg.push(m);
        std_error.push(se);
    }
    let (average, average_std_error) =
        mean_and_se(reps.iter().map(|r| r.node_avg.iter().sum::<f64>() / n as f64));
    Ok(SimResult {
        per_node_time_avg,
        average,
        std_error,
        average_std_error,
        events: reps.iter().map(|r| r.events).collect(),
    })
}

/// Time-averaged age of the freshest node in `set`.
pub fn simulate_set_age(net: &GossipNetwork, set: &[usize], cfg: &SimConfig) -> Result<SetAgeEstimate> {
    if set.is_empty() {
        return Err(Error::Config("node set must be nonempty".into()));
    }
    let mut mask = vec![false; net.n()];
    for &v in set {
        if v >= net.n() {
            return Err(Error::NodeOutOfRange { node: v, n: net.n() });
        }
        mask[v] = true;
    }
    let reps = run(net, cfg, Some(&mask))?;
    let (mean, std_error) = mean_and_se(reps.iter().map(|r| r.set_avg.expect("set tracked")));
    Ok(SetAgeEstimate { mean, std_error })
}

/// Draw a seed for a derived run, e.g. one sweep point.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.rotate_left(32));
    rng.random()
}
