use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gossip_age::experiments::{
    enumerate_n6, fc_grid, ring_grid, ring_ordering_violations, sweep_fc, sweep_ring, verify_properties, Engine,
    JammerRule, RingTable, Strategy, SweepSpec, VerifyLevel,
};
use gossip_age::network::NetworkDocument;
use gossip_age::placement::{fc_greedy, ring_adjacent, ring_equidistant, ring_random};
use gossip_age::sim::{simulate, simulate_set_age, SimConfig, DEFAULT_WARMUP_FRACTION};
use gossip_age::solver::{solve, DEFAULT_COMPONENT_CAP};
use gossip_age::{Error, GossipNetwork, JammerSet, LinkDenominator, Result};

#[derive(Parser)]
#[command(name = "gossip-age", version, about = "Version age of gossip networks under link jamming")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact per-node ages.
    Solve {
        #[command(flatten)]
        net: NetworkArgs,
        /// Largest component handed to the subset recursion.
        #[arg(long, default_value_t = DEFAULT_COMPONENT_CAP)]
        cap: usize,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo estimate of per-node ages.
    Simulate {
        #[command(flatten)]
        net: NetworkArgs,
        #[command(flatten)]
        sim: SimArgs,
        /// Estimate the age of this node set (1-based, comma separated) instead.
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<usize>>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Jammer placement, written as a network document with its cuts.
    Place {
        #[command(flatten)]
        net: NetworkArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Ring sweep over a size grid.
    SweepRing {
        #[command(flatten)]
        sweep: SweepArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Fully connected sweep with greedy placement.
    SweepFc {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Jammer count rule.
        #[arg(long, value_enum, default_value_t = RuleArg::Nlogn)]
        rule: RuleArg,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Every six-node configuration with C(k, 2) links.
    Enumerate {
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run the property suites.
    Verify {
        #[arg(long, value_enum, default_value_t = LevelArg::Fast)]
        level: LevelArg,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Topology {
    Ring,
    Fc,
    Isolated,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Adjacent,
    Equidistant,
    Random,
    Greedy,
    /// Adjacent, random and equidistant in turn.
    All,
}

impl StrategyArg {
    fn single(self) -> Option<Strategy> {
        match self {
            StrategyArg::Adjacent => Some(Strategy::Adjacent),
            StrategyArg::Equidistant => Some(Strategy::Equidistant),
            StrategyArg::Random => Some(Strategy::Random),
            StrategyArg::Greedy => Some(Strategy::Greedy),
            StrategyArg::All => None,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RuleArg {
    Power,
    Nlogn,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct NetworkArgs {
    /// Network document (JSON, 1-based ids); replaces the topology flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Topology::Ring)]
    topology: Topology,
    #[arg(long)]
    n: Option<usize>,
    /// Number of jammers.
    #[arg(long, conflicts_with = "alpha")]
    jammers: Option<usize>,
    /// Jammer count floor(c n^alpha).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// lambda_s / lambda.
    #[arg(long, default_value_t = 1.0)]
    lambda_ratio: f64,
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 1e5)]
    horizon: f64,
    /// Discarded prefix; 5% of the horizon by default.
    #[arg(long)]
    warmup: Option<f64>,
    #[arg(long, default_value_t = 10)]
    reps: usize,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep settings as JSON; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, value_enum)]
    strategy: Option<StrategyArg>,
    /// Explicit sizes (comma separated); otherwise generated up to --n-max.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, default_value_t = 10_000)]
    n_max: usize,
    /// Most grid points kept when generating sizes.
    #[arg(long, default_value_t = 40)]
    points: usize,
    /// Also simulate sizes up to the simulation cap.
    #[arg(long)]
    sim: bool,
    #[arg(long)]
    sim_cap: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    warmup: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    lambda_ratio: Option<f64>,
}

impl SweepArgs {
    fn spec(&self, default_alpha: f64) -> Result<SweepSpec> {
        let mut spec = match &self.config {
            Some(path) => serde_json::from_str(&std::fs::read_to_string(path)?)?,
            None => SweepSpec {
                alpha: default_alpha,
                ..SweepSpec::default()
            },
        };
        if let Some(a) = self.alpha {
            spec.alpha = a;
        }
        if let Some(c) = self.c {
            spec.c = c;
        }
        if let Some(ns) = &self.n {
            spec.n_values = ns.clone();
        }
        if self.sim {
            spec.engines.insert(Engine::Simulation);
        }
        if self.sim_cap.is_some() {
            spec.sim_cap = self.sim_cap;
        }
        if let Some(h) = self.horizon {
            spec.horizon = h;
        }
        if self.warmup.is_some() {
            spec.warmup = self.warmup;
        }
        if let Some(r) = self.reps {
            spec.replications = r;
        }
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(r) = self.lambda_ratio {
            spec.lambda_ratio = r;
        }
        Ok(spec)
    }
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Ok,
    InvariantFailed(Vec<String>),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::InvariantFailed(why)) => {
            for line in why {
                eprintln!("invariant failed: {line}");
            }
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn emit(
    out: &OutputArgs,
    csv: impl FnOnce(&mut dyn Write) -> Result<()>,
    json: impl FnOnce() -> Result<String>,
) -> Result<()> {
    let mut w = writer(out.out.as_deref())?;
    match out.format {
        Format::Csv => csv(&mut w)?,
        Format::Json => writeln!(w, "{}", json()?)?,
    }
    w.flush()?;
    Ok(())
}

fn outcome(violations: Vec<String>) -> Outcome {
    if violations.is_empty() {
        Outcome::Ok
    } else {
        Outcome::InvariantFailed(violations)
    }
}

fn build_network(args: &NetworkArgs) -> Result<(GossipNetwork, JammerSet)> {
    if let Some(path) = &args.config {
        return NetworkDocument::read_json(path)?.into_parts();
    }
    let n = args
        .n
        .ok_or_else(|| Error::Config("--n is required unless --config gives a network".into()))?;
    let ratio = args.lambda_ratio;
    let count = match (args.jammers, args.alpha) {
        (Some(t), _) => Some(t),
        (None, Some(a)) => Some(JammerRule::Power.count(n, a, args.c)),
        (None, None) => None,
    };
    let strategy = args.strategy.map(|s| {
        s.single()
            .ok_or_else(|| Error::Config("pick a single placement strategy".into()))
    });
    match args.topology {
        Topology::Isolated => Ok((GossipNetwork::isolated(n, 1.0, ratio)?, JammerSet::new())),
        Topology::Ring => {
            let net = GossipNetwork::ring(n, 1.0, ratio)?;
            let jam = match count {
                None | Some(0) => JammerSet::new(),
                Some(t) => match strategy.transpose()?.unwrap_or(Strategy::Equidistant) {
                    Strategy::Adjacent => ring_adjacent(n, t)?,
                    Strategy::Equidistant => ring_equidistant(n, t)?,
                    Strategy::Random => ring_random(n, t, args.seed)?,
                    Strategy::Greedy => return Err(Error::Config("greedy placement needs --topology fc".into())),
                },
            };
            Ok((net, jam))
        }
        Topology::Fc => {
            let net = GossipNetwork::fully_connected(n, 1.0, ratio, LinkDenominator::N)?;
            match strategy.transpose()? {
                None | Some(Strategy::Greedy) => {}
                Some(_) => return Err(Error::Config("fully connected networks take greedy placement".into())),
            }
            let jam = match count {
                None => JammerSet::new(),
                Some(t) => fc_greedy(n, t)?.1,
            };
            Ok((net, jam))
        }
    }
}

fn sim_config(args: &SimArgs, seed: u64) -> SimConfig {
    SimConfig {
        horizon: args.horizon,
        warmup: args.warmup.unwrap_or(args.horizon * DEFAULT_WARMUP_FRACTION),
        seed,
        replications: args.reps,
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Solve { net, cap, out } => {
            let (base, jam) = build_network(&net)?;
            let report = solve(&base.apply_jammers(&jam), cap)?;
            emit(&out, |w| report.write_csv(w), || report.to_json())?;
            Ok(Outcome::Ok)
        }
        Command::Simulate { net, sim, set, out } => {
            let (base, jam) = build_network(&net)?;
            let jammed = base.apply_jammers(&jam);
            let cfg = sim_config(&sim, net.seed);
            match set {
                Some(ids) => {
                    let nodes = ids
                        .iter()
                        .map(|&v| v.checked_sub(1).ok_or(Error::NodeOutOfRange { node: v, n: jammed.n() }))
                        .collect::<Result<Vec<_>>>()?;
                    let est = simulate_set_age(&jammed, &nodes, &cfg)?;
                    emit(
                        &out,
                        |w| Ok(writeln!(w, "mean_age,std_error\n{},{}", est.mean, est.std_error)?),
                        || Ok(serde_json::to_string_pretty(&est)?),
                    )?;
                }
                None => {
                    let result = simulate(&jammed, &cfg)?;
                    emit(&out, |w| result.write_csv(w), || result.to_json())?;
                }
            }
            Ok(Outcome::Ok)
        }
        Command::Place { net, out } => {
            let (base, jam) = build_network(&net)?;
            let doc = base.to_document(Some(&jam));
            emit(
                &out,
                |w| {
                    writeln!(w, "i,j")?;
                    for [i, j] in &doc.cuts {
                        writeln!(w, "{i},{j}")?;
                    }
                    Ok(())
                },
                || doc.to_json(),
            )?;
            Ok(Outcome::Ok)
        }
        Command::SweepRing { sweep, out } => {
            let mut spec = sweep.spec(0.3)?;
            if spec.n_values.is_empty() {
                spec.n_values = ring_grid(spec.alpha, spec.c, sweep.n_max, sweep.points);
            }
            let strategies = match sweep.strategy.unwrap_or(StrategyArg::All).single() {
                Some(s) => vec![s],
                None => Strategy::RING.to_vec(),
            };
            let mut table = RingTable::default();
            for strategy in strategies {
                table.extend(sweep_ring(&SweepSpec {
                    strategy,
                    ..spec.clone()
                })?);
            }
            emit(&out, |w| table.write_csv(w), || table.to_json())?;
            let mut violations = table.violations();
            violations.extend(ring_ordering_violations(&table));
            Ok(outcome(violations))
        }
        Command::SweepFc { sweep, rule, out } => {
            let mut spec = sweep.spec(1.8)?;
            spec.strategy = Strategy::Greedy;
            if let Some(s) = sweep.strategy {
                if s != StrategyArg::Greedy {
                    return Err(Error::Config("fully connected sweeps use greedy placement".into()));
                }
            }
            spec.jammer_rule = match rule {
                RuleArg::Power => JammerRule::Power,
                RuleArg::Nlogn => JammerRule::NLogN,
            };
            if spec.n_values.is_empty() {
                spec.n_values = fc_grid(spec.jammer_rule, spec.alpha, spec.c, sweep.n_max, sweep.points);
            }
            let table = sweep_fc(&spec)?;
            emit(&out, |w| table.write_csv(w), || table.to_json())?;
            Ok(outcome(table.violations()))
        }
        Command::Enumerate { out } => {
            let table = enumerate_n6()?;
            emit(&out, |w| table.write_csv(w), || table.to_json())?;
            let violations = table
                .groups
                .iter()
                .filter(|g| !g.greedy_attains_max)
                .map(|g| {
                    format!(
                        "{} links: greedy average {} below the maximum {}",
                        g.n_bar, g.greedy_average, g.max_average
                    )
                })
                .collect();
            Ok(outcome(violations))
        }
        Command::Verify { level, out } => {
            let level = match level {
                LevelArg::Fast => VerifyLevel::Fast,
                LevelArg::Full => VerifyLevel::Full,
            };
            let report = verify_properties(level)?;
            emit(&out, |w| report.write_csv(w), || report.to_json())?;
            let failed = report
                .failed()
                .map(|p| {
                    format!(
                        "{}: {} of {} cases failed; first: {}",
                        p.name,
                        p.violations,
                        p.cases,
                        p.first_violation.as_deref().unwrap_or("no cases checked")
                    )
                })
                .collect();
            Ok(outcome(failed))
        }
    }
}
