//! Numerical checks of the structural properties of version age.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::write_rows;
use crate::error::{Error, Result};
use crate::network::{GossipNetwork, JammerSet, LinkRates, Shape};
use crate::placement::{binomial2, ring_adjacent, ring_equidistant, ring_random, ClusterPlan};
use crate::solver::{
    component_set_ages, dismembered_ring_age, exp_product_bounds, line_corner_age, mini_fc_age, ratio_product,
    rd_hundredths, ring_node_age, solve_path_interval_dp, solve_subset_dp, specialized_component_ages,
    star_node_age, RingModel, DEFAULT_COMPONENT_CAP,
};

/// Age-reduction coefficients for `d = 1..=22`, floored to hundredths.
pub const RD_TABLE_HUNDREDTHS: [u32; 22] = [
    25, 37, 44, 49, 53, 56, 59, 61, 63, 64, 66, 67, 68, 69, 70, 71, 72, 72, 73, 74, 74, 75,
];

/// Degree splits of newly engaged nodes, the clique size `k` they join, and
/// the floored coefficient sums in hundredths they are expected to reach.
pub const ENGAGEMENT_SUMS: [(&[usize], usize, u32); 16] = [
    (&[5, 1, 1], 7, 103),
    (&[4, 2, 1], 7, 111),
    (&[3, 3, 1], 7, 113),
    (&[3, 2, 2], 7, 118),
    (&[2, 1, 1], 4, 87),
    (&[22, 1], 23, 100),
    (&[21, 2], 23, 111),
    (&[20, 3], 23, 118),
    (&[19, 4], 23, 122),
    (&[18, 5], 23, 125),
    (&[17, 6], 23, 128),
    (&[16, 7], 23, 130),
    (&[15, 8], 23, 131),
    (&[14, 9], 23, 132),
    (&[13, 10], 23, 132),
    (&[12, 11], 23, 133),
];

const TOL: f64 = 1e-10;

fn le(a: f64, b: f64) -> bool {
    a <= b + TOL * b.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    Fast,
    Full,
}

impl FromStr for VerifyLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(VerifyLevel::Fast),
            "full" => Ok(VerifyLevel::Full),
            other => Err(Error::Config(format!("unknown verify level {other:?}"))),
        }
    }
}

impl fmt::Display for VerifyLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerifyLevel::Fast => "fast",
            VerifyLevel::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub name: String,
    pub cases: u64,
    pub violations: u64,
    pub first_violation: Option<String>,
}

impl PropertyResult {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            cases: 0,
            violations: 0,
            first_violation: None,
        }
    }

    fn record(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.violations += 1;
            if self.first_violation.is_none() {
                self.first_violation = Some(context());
            }
        }
    }

    fn fail(&mut self, context: String) {
        self.record(false, || context);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0 && self.cases > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub properties: Vec<PropertyResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyResult::passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &PropertyResult> {
        self.properties.iter().filter(|p| !p.passed())
    }

    pub fn get(&self, name: &str) -> Option<&PropertyResult> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let header = ["property", "cases", "violations", "passed", "first_violation"];
        write_rows(out, &header, &self.properties, |p| {
            vec![
                p.name.clone(),
                p.cases.to_string(),
                p.violations.to_string(),
                p.passed().to_string(),
                p.first_violation.clone().unwrap_or_default(),
            ]
        })
    }
}

/// Path ages fall toward the center and mirror about it, for every path of
/// up to `n0_max` nodes and system sizes `n0`, `2 n0` and `10 n0`.
pub fn check_path_profiles(n0_max: usize) -> [PropertyResult; 2] {
    let mut center = PropertyResult::new("path_center_minimal");
    let mut mirror = PropertyResult::new("path_mirror_symmetric");
    for n0 in 1..=n0_max {
        for n in [n0, 2 * n0, 10 * n0] {
            let a = solve_path_interval_dp(n0, n as f64, 1.0, 1.0);
            for i in 0..n0 / 2 {
                center.record(le(a[i + 1], a[i]), || {
                    format!("n0={n0} n={n}: node {} age {} above node {} age {}", i + 2, a[i + 1], i + 1, a[i])
                });
            }
            for i in 0..n0 {
                let b = a[n0 - 1 - i];
                mirror.record((a[i] - b).abs() <= TOL * a[i], || {
                    format!("n0={n0} n={n}: node {} age {} vs mirror {b}", i + 1, a[i])
                });
            }
        }
    }
    [center, mirror]
}

/// Ring age <= every path node <= line corner <= twice the ring age.
pub fn check_ring_path_sandwich(n0_max: usize, n_max: usize) -> PropertyResult {
    let mut p = PropertyResult::new("ring_path_sandwich");
    for n0 in 1..=n0_max.min(n_max) {
        let mut ns: Vec<usize> = [1, 2, 5, 10, 100].iter().map(|m| m * n0).chain([n_max]).collect();
        ns.retain(|&n| n >= n0 && n <= n_max);
        ns.sort_unstable();
        ns.dedup();
        for n in ns {
            let nf = n as f64;
            let ring = ring_node_age(n0, nf, 1.0, 1.0);
            let corner = line_corner_age(n0, nf, 1.0, 1.0);
            for (i, &a) in solve_path_interval_dp(n0, nf, 1.0, 1.0).iter().enumerate() {
                p.record(le(ring, a) && le(a, corner), || {
                    format!("n0={n0} n={n}: node {} age {a} outside [{ring}, {corner}]", i + 1)
                });
            }
            p.record(le(corner, 2.0 * ring), || {
                format!("n0={n0} n={n}: corner {corner} above twice the ring age {ring}")
            });
        }
    }
    p
}

/// `n0 R(n0) - (n0 + 1) R(n0 + 1)` decreases in `n0`, where `R` is the ring node age.
pub fn check_ring_increment(n_values: &[usize], n0_max: usize) -> PropertyResult {
    let mut p = PropertyResult::new("ring_increment_decreasing");
    for &n in n_values {
        let nf = n as f64;
        let total = |m: usize| m as f64 * ring_node_age(m, nf, 1.0, 1.0);
        let f = |m: usize| total(m) - total(m + 1);
        let top = n0_max.min(n.saturating_sub(2));
        for n0 in 1..top {
            let (a, b) = (f(n0), f(n0 + 1));
            p.record(le(b, a), || format!("n={n}: f({}) = {b} above f({n0}) = {a}", n0 + 1));
        }
    }
    p
}

/// Random network on `n` nodes: each pair linked with probability
/// `edge_prob`, directional rates in `[0.1, 2)`, source rates in `[0.05, 1)`.
pub fn random_network<R: Rng>(rng: &mut R, n: usize, edge_prob: f64) -> Result<GossipNetwork> {
    let sources = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
    let mut net = GossipNetwork::new(rng.random_range(0.2..2.0), sources)?;
    for (i, j) in (0..n).tuple_combinations() {
        if rng.random_bool(edge_prob) {
            net.set_link(i, j, random_link(rng))?;
        }
    }
    Ok(net)
}

fn random_link<R: Rng>(rng: &mut R) -> LinkRates {
    LinkRates {
        forward: rng.random_range(0.1..2.0),
        backward: rng.random_range(0.1..2.0),
    }
}

/// Adding any absent link never raises any node's age.
pub fn check_link_addition(graphs: usize, max_nodes: usize, seed: u64) -> Result<PropertyResult> {
    let mut p = PropertyResult::new("link_addition_monotone");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for g in 0..graphs {
        let n = rng.random_range(2..=max_nodes);
        let density = rng.random_range(0.1..0.7);
        let net = random_network(&mut rng, n, density)?;
        let before = solve_subset_dp(&net, DEFAULT_COMPONENT_CAP)?;
        for (i, j) in (0..n).tuple_combinations() {
            if net.has_link(i, j) {
                continue;
            }
            let mut grown = net.clone();
            grown.set_link(i, j, random_link(&mut rng))?;
            let after = solve_subset_dp(&grown, DEFAULT_COMPONENT_CAP)?;
            for v in 0..n {
                let (a, b) = (after.per_node[v], before.per_node[v]);
                p.record(le(a, b), || {
                    format!("graph {g}: adding ({}, {}) raised node {} from {b} to {a}", i + 1, j + 1, v + 1)
                });
            }
        }
    }
    Ok(p)
}

/// Floored age-reduction coefficients match the reference table.
pub fn check_rd_table() -> PropertyResult {
    let mut p = PropertyResult::new("rd_table");
    for (d, &want) in (1..).zip(RD_TABLE_HUNDREDTHS.iter()) {
        let got = rd_hundredths(d);
        p.record(got == want, || format!("d={d}: floored coefficient 0.{got:02}, expected 0.{want:02}"));
    }
    p
}

/// Floored coefficient sums of engaged nodes match the reference sums and
/// exceed the single-node reduction `k / (k + 1)`.
pub fn check_engagement_sums() -> PropertyResult {
    let mut p = PropertyResult::new("engagement_sums");
    for (degrees, k, want) in ENGAGEMENT_SUMS {
        let got: u32 = degrees.iter().map(|&d| rd_hundredths(d)).sum();
        let r_bar = k as f64 / (k as f64 + 1.0);
        p.record(got == want && got as f64 / 100.0 > r_bar, || {
            format!("degrees {degrees:?}: sum {got}/100, expected {want}/100 above {r_bar}")
        });
    }
    p
}

fn uniform_component(m: usize, r: f64, s: f64, links: &[(usize, usize)]) -> Result<GossipNetwork> {
    let mut net = GossipNetwork::new(1.0, vec![s; m])?;
    for &(i, j) in links {
        net.set_link(i, j, LinkRates::symmetric(r))?;
    }
    Ok(net)
}

fn compare_ages(p: &mut PropertyResult, label: &str, fast: &[f64], exact: &[f64]) {
    for (i, (a, b)) in fast.iter().zip(exact).enumerate() {
        p.record((a - b).abs() <= TOL * b, || format!("{label}: node {} closed form {a}, recursion {b}", i + 1));
    }
}

/// Path, cycle, clique and star solvers agree with the subset recursion on
/// components of up to `max_size` nodes with random uniform rates.
pub fn check_oracle_equivalence(max_size: usize, seed: u64) -> Result<PropertyResult> {
    let mut p = PropertyResult::new("oracle_equivalence");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for m in 1..=max_size {
        let r = rng.random_range(0.1..2.0);
        let s = rng.random_range(0.1..2.0);
        let path: Vec<_> = (0..m.saturating_sub(1)).map(|i| (i, i + 1)).collect();
        let mut cases = vec![("path", uniform_component(m, r, s, &path)?)];
        if m >= 3 {
            let mut cycle = path.clone();
            cycle.push((0, m - 1));
            cases.push(("cycle", uniform_component(m, r, s, &cycle)?));
        }
        if m >= 2 {
            let clique: Vec<_> = (0..m).tuple_combinations().collect();
            cases.push(("clique", uniform_component(m, s, s, &clique)?));
        }
        for (label, net) in cases {
            let comp = &net.decompose().components[0];
            let exact = component_set_ages(&net, &comp.nodes)?.node_ages();
            let label = format!("{label} of {m}");
            match specialized_component_ages(&net, comp) {
                Some((_, fast)) => compare_ages(&mut p, &label, &fast, &exact),
                None => p.fail(format!("{label}: no specialized solver applied")),
            }
        }
        if m >= 2 {
            let d = m - 1;
            let n = rng.random_range(m..=4 * m);
            let net = GossipNetwork::star(d, n, 1.0, 1.0)?;
            let comp = &net.decompose().components[0];
            if comp.shape != Shape::Star && d >= 3 {
                p.fail(format!("star of {m} classified as {}", comp.shape));
            }
            let hub = component_set_ages(&net, &comp.nodes)?.age_of(&[0]).expect("hub in component");
            compare_ages(&mut p, &format!("star hub d={d} n={n}"), &[star_node_age(d, n as f64, 1.0, 1.0)], &[hub]);
        }
    }
    Ok(p)
}

/// Enlarging a node set never raises its age.
pub fn check_set_monotone(graphs: usize, max_nodes: usize, seed: u64) -> Result<PropertyResult> {
    let mut p = PropertyResult::new("set_age_monotone");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for g in 0..graphs {
        let n = rng.random_range(2..=max_nodes);
        let net = random_network(&mut rng, n, 0.5)?;
        for comp in net.decompose().components {
            let table = component_set_ages(&net, &comp.nodes)?;
            let full = table.full_mask();
            for mask in 1..=full {
                for b in 0..comp.len() {
                    let bigger = mask | (1 << b);
                    if bigger == mask {
                        continue;
                    }
                    let (small, large) = (table.age(mask), table.age(bigger));
                    p.record(le(large, small), || format!("graph {g}: set {mask:#b} age {small} < superset {large}"));
                }
            }
        }
    }
    Ok(p)
}

/// Splitting a ring segment of `n0` into `m` and `n0 - m` (each closed into
/// its own ring) gives a total that falls as the cut moves to the middle.
pub fn check_cut_toward_corner(n0_max: usize) -> PropertyResult {
    let mut p = PropertyResult::new("cut_toward_corner");
    for n0 in 2..=n0_max {
        for n in [n0, 2 * n0, 10 * n0] {
            let nf = n as f64;
            let split = |m: usize| {
                m as f64 * ring_node_age(m, nf, 1.0, 1.0) + (n0 - m) as f64 * ring_node_age(n0 - m, nf, 1.0, 1.0)
            };
            for m in 1..n0 / 2 {
                let (a, b) = (split(m), split(m + 1));
                p.record(le(b, a), || format!("n0={n0} n={n}: split {} total {b} above split {m} total {a}", m + 1));
            }
        }
    }
    p
}

/// One clique of `k` ages the network at least as much as the same links
/// spread over smaller equal cliques, for all systems up to `n_max`.
pub fn check_consolidation(n_max: usize) -> PropertyResult {
    let mut p = PropertyResult::new("consolidation");
    for k in 3..=n_max {
        for k_bar in 2..k {
            let Some(plan) = ClusterPlan::for_clique(k, k_bar) else {
                continue;
            };
            for n in plan.engaged().max(k)..=n_max {
                let single = mini_fc_age(k, n as f64, 1.0, 1.0).total;
                let clustered = plan.total_age(n, 1.0, 1.0);
                p.record(le(clustered, single), || {
                    format!("n={n} k={k}: {} clusters of {k_bar} total {clustered} above {single}", plan.m_bar)
                });
            }
        }
    }
    p
}

/// Adjacent >= random >= equidistant on the miniring model.
pub fn check_ring_strategy_order(samples: usize, n_max: usize, seed: u64) -> Result<PropertyResult> {
    let mut p = PropertyResult::new("ring_strategy_order");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let n = rng.random_range(3..=n_max);
        let t = rng.random_range(1..=n);
        let age = |jam: JammerSet| dismembered_ring_age(n, &jam, RingModel::Miniring, 1.0, 1.0).map(|r| r.average);
        let adj = age(ring_adjacent(n, t)?)?;
        let rnd = age(ring_random(n, t, rng.random())?)?;
        let eq = age(ring_equidistant(n, t)?)?;
        p.record(le(rnd, adj) && le(eq, rnd), || {
            format!("n={n} jammers={t}: adjacent {adj}, random {rnd}, equidistant {eq}")
        });
    }
    Ok(p)
}

/// Adding `k` links to a `k`-clique among isolated nodes: the only placements
/// reaching the largest total age are those forming a `(k + 1)`-clique.
pub fn check_greedy_step(n_max: usize, k_max: usize) -> Result<PropertyResult> {
    let mut p = PropertyResult::new("greedy_step_exhaustive");
    for k in 1..=k_max {
        for n in k + 1..=n_max {
            let rate = 1.0 / n as f64;
            let clique: Vec<(usize, usize)> = (0..k).tuple_combinations().collect();
            let free: Vec<(usize, usize)> = (0..n)
                .tuple_combinations()
                .filter(|&(i, j)| !(i < k && j < k))
                .collect();
            let mut best_clique = f64::NEG_INFINITY;
            let mut best_other = f64::NEG_INFINITY;
            let mut other_links = Vec::new();
            for added in free.iter().copied().combinations(k) {
                let links = clique.iter().copied().chain(added.iter().copied());
                let net = GossipNetwork::with_links(n, 1.0, 1.0, rate, links)?;
                let total = solve_subset_dp(&net, DEFAULT_COMPONENT_CAP)?.total;
                let dec = net.decompose();
                let grown = dec.largest() == k + 1
                    && dec.components.iter().all(|c| c.len() == 1 || c.len() == k + 1)
                    && net.link_count() == binomial2(k + 1);
                if grown {
                    best_clique = best_clique.max(total);
                } else if total > best_other {
                    best_other = total;
                    other_links = added;
                }
            }
            let margin = TOL * best_clique.abs();
            p.record(best_other < best_clique - margin, || {
                format!("n={n} k={k}: placement {other_links:?} total {best_other} reaches clique total {best_clique}")
            });
        }
    }
    Ok(p)
}

/// `exp(-j^2/n) <= prod 1/(1 + k/n) <= exp(-j^2/(4n))` for all `j <= n`
/// over a geometric grid of `n` up to `n_max`.
pub fn check_product_envelope(n_max: usize, points: usize) -> Result<PropertyResult> {
    let mut p = PropertyResult::new("product_envelope");
    let all: Vec<usize> = (1..=n_max).collect();
    for n in super::thin_geometric(&all, points) {
        let nf = n as f64;
        let mut log_prod = 0.0;
        for j in 1..=n {
            log_prod -= (j as f64 / nf).ln_1p();
            let prod = log_prod.exp();
            let (lo, hi) = exp_product_bounds(j, nf)?;
            p.record(le(lo, prod) && le(prod, hi), || format!("j={j} n={n}: {prod} outside [{lo}, {hi}]"));
        }
        debug_assert!((ratio_product(n, nf) - log_prod.exp()).abs() < 1e-9);
    }
    Ok(p)
}

/// Run every property suite. `Fast` keeps components at 10 nodes or fewer
/// and grids at 1000 or below; `Full` widens them and adds the exhaustive
/// greedy-step search and the product envelope grid.
pub fn verify_properties(level: VerifyLevel) -> Result<VerifyReport> {
    let full = level == VerifyLevel::Full;
    let seed = 0x5eed;
    let mut properties = Vec::new();
    properties.extend(check_path_profiles(50));
    properties.push(if full {
        check_ring_path_sandwich(200, 10_000)
    } else {
        check_ring_path_sandwich(100, 1000)
    });
    properties.push(check_ring_increment(&[10, 50, 100, 500, 1000], 200));
    properties.push(check_link_addition(50, 10, seed)?);
    properties.push(check_rd_table());
    properties.push(check_engagement_sums());
    properties.push(check_oracle_equivalence(if full { 12 } else { 10 }, seed)?);
    properties.push(check_set_monotone(30, if full { 10 } else { 8 }, seed)?);
    properties.push(check_cut_toward_corner(60));
    properties.push(check_consolidation(1000));
    properties.push(check_ring_strategy_order(if full { 400 } else { 100 }, 300, seed)?);
    if full {
        properties.push(check_greedy_step(7, 4)?);
        properties.push(check_product_envelope(10_000, 40)?);
    }
    Ok(VerifyReport { level, properties })
}
