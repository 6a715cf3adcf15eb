//! Jammer placements on rings and fully connected networks.
//!
//! Ring link `t` joins nodes `t` and `(t + 1) mod n`.

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::JammerSet;
use crate::solver::harmonic;

fn check_ring_budget(n: usize, n_tilde: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidTopology(format!("a ring needs at least 2 nodes, got {n}")));
    }
    if n_tilde == 0 || n_tilde > n {
        return Err(Error::Config(format!(
            "ring of {n} nodes takes between 1 and {n} jammers, got {n_tilde}"
        )));
    }
    Ok(())
}

fn ring_link(n: usize, t: usize) -> (usize, usize) {
    (t, (t + 1) % n)
}

fn ring_cuts<I: IntoIterator<Item = usize>>(n: usize, links: I) -> Result<JammerSet> {
    JammerSet::from_pairs(n, links.into_iter().map(|t| ring_link(n, t)))
}

/// Spread `n_tilde` cuts so the segments differ in size by at most one.
pub fn ring_equidistant(n: usize, n_tilde: usize) -> Result<JammerSet> {
    check_ring_budget(n, n_tilde)?;
    // segment a starts at floor(a n / n_tilde); cut the link just before it
    ring_cuts(n, (0..n_tilde).map(|a| (a * n / n_tilde + n - 1) % n))
}

/// Cut links `(0,1), (1,2), ..., (n_tilde-1, n_tilde)`: `n_tilde - 1`
/// isolated nodes and one line of `n - n_tilde + 1`.
pub fn ring_adjacent(n: usize, n_tilde: usize) -> Result<JammerSet> {
    check_ring_budget(n, n_tilde)?;
    ring_cuts(n, 0..n_tilde)
}

/// `n_tilde` distinct ring links drawn uniformly without replacement.
pub fn ring_random(n: usize, n_tilde: usize, seed: u64) -> Result<JammerSet> {
    check_ring_budget(n, n_tilde)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, n, n_tilde);
    ring_cuts(n, picked)
}

pub fn binomial2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Largest `k >= 1` with `C(k, 2) <= links`.
fn largest_k_within(links: usize) -> usize {
    let mut k = ((1.0 + (1.0 + 8.0 * links as f64).sqrt()) / 2.0) as usize;
    k = k.max(1);
    while binomial2(k) > links {
        k -= 1;
    }
    while binomial2(k + 1) <= links {
        k += 1;
    }
    k
}

/// Greedy consolidation of the links that survive `n_jammers` cuts in a
/// fully connected network: one clique of `k` nodes plus `c` links from
/// node `k` into the clique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedyPlan {
    pub n: usize,
    pub n_jammers: usize,
    /// Clique size.
    pub k: usize,
    /// Leftover links attached to node `k`, `0 <= c < k`.
    pub c: usize,
    /// Greedy rounds: smallest `steps >= 1` with `C(steps, 2) >= surviving links`.
    pub steps: usize,
}

impl GreedyPlan {
    pub fn new(n: usize, n_jammers: usize) -> Result<Self> {
        let all = binomial2(n);
        if n == 0 || n_jammers > all {
            return Err(Error::Config(format!(
                "{n_jammers} jammers exceed the {all} links of a {n}-node fully connected network"
            )));
        }
        let surviving = all - n_jammers;
        let k = largest_k_within(surviving);
        let steps = if binomial2(k) == surviving { k.max(1) } else { k + 1 };
        Ok(Self {
            n,
            n_jammers,
            k,
            c: surviving - binomial2(k),
            steps,
        })
    }

    pub fn surviving_links(&self) -> usize {
        binomial2(self.n) - self.n_jammers
    }

    /// Surviving pairs: the clique on `0..k`, then `(i, k)` for `i < c`.
    pub fn links(&self) -> Vec<(usize, usize)> {
        let mut links: Vec<_> = (0..self.k).tuple_combinations().collect();
        links.extend((0..self.c).map(|i| (i, self.k)));
        links
    }

    /// Average age from the clique formula; exact when `c = 0`.
    pub fn average_age(&self, lambda: f64, lambda_s: f64) -> f64 {
        let n = self.n as f64;
        lambda_s / lambda * (harmonic(self.k) + n - self.k as f64)
    }
}

/// Complement of `survivors` among all pairs of `0..n`.
pub fn jam_all_but(n: usize, survivors: &[(usize, usize)]) -> Result<JammerSet> {
    let keep = JammerSet::from_pairs(n, survivors.iter().copied())?;
    JammerSet::from_pairs(n, (0..n).tuple_combinations().filter(|&(i, j)| !keep.contains(i, j)))
}

pub fn fc_greedy(n: usize, n_jammers: usize) -> Result<(GreedyPlan, JammerSet)> {
    let plan = GreedyPlan::new(n, n_jammers)?;
    let jam = jam_all_but(n, &plan.links())?;
    Ok((plan, jam))
}

/// `m_bar` disjoint cliques of `k_bar` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPlan {
    pub m_bar: usize,
    pub k_bar: usize,
}

impl ClusterPlan {
    /// Clusters of size `k_bar` holding exactly the `C(k, 2)` links of a
    /// single `k`-clique, if the division is exact.
    pub fn for_clique(k: usize, k_bar: usize) -> Option<Self> {
        let per = binomial2(k_bar);
        let total = binomial2(k);
        (per > 0 && total.is_multiple_of(per)).then(|| Self {
            m_bar: total / per,
            k_bar,
        })
    }

    pub fn link_budget(&self) -> usize {
        self.m_bar * binomial2(self.k_bar)
    }

    pub fn engaged(&self) -> usize {
        self.m_bar * self.k_bar
    }

    pub fn links(&self) -> Vec<(usize, usize)> {
        (0..self.m_bar)
            .flat_map(|a| {
                let base = a * self.k_bar;
                (base..base + self.k_bar).tuple_combinations()
            })
            .collect()
    }

    /// Closed-form total age in a system of `n` nodes (others isolated).
    pub fn total_age(&self, n: usize, lambda: f64, lambda_s: f64) -> f64 {
        let nf = n as f64;
        let clustered = self.engaged() as f64 * nf / self.k_bar as f64 * harmonic(self.k_bar);
        lambda_s / lambda * (clustered + (n - self.engaged()) as f64 * nf)
    }
}

pub fn fc_clusters(n: usize, k_bar: usize, m_bar: usize) -> Result<JammerSet> {
    if m_bar == 0 || k_bar == 0 || m_bar * k_bar > n {
        return Err(Error::Config(format!(
            "{m_bar} clusters of {k_bar} nodes do not fit in {n} nodes"
        )));
    }
    jam_all_but(n, &ClusterPlan { m_bar, k_bar }.links())
}

/// Largest `n` accepted by [`enumerate_configs`].
pub const ENUMERATION_LIMIT: usize = 8;

fn choose(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of ways to place `n_bar` links among `n` nodes.
pub fn config_count(n: usize, n_bar: usize) -> u128 {
    let pairs = binomial2(n) as u128;
    if n_bar as u128 > pairs {
        0
    } else {
        choose(pairs, n_bar as u128)
    }
}

/// Every set of `n_bar` links on `n` nodes, in lexicographic order of pair index.
pub fn enumerate_configs(n: usize, n_bar: usize) -> Result<impl Iterator<Item = Vec<(usize, usize)>>> {
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooManyConfigs {
            n,
            count: config_count(n, n_bar),
            limit: ENUMERATION_LIMIT,
        });
    }
    if n_bar > binomial2(n) {
        return Err(Error::Config(format!("{n_bar} links exceed the {} pairs of {n} nodes", binomial2(n))));
    }
    let pairs: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    Ok(pairs.into_iter().combinations(n_bar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{GossipNetwork, LinkDenominator, Shape};
    use crate::solver::ring_segments;

    fn segment_sizes(n: usize, jam: &JammerSet) -> Vec<usize> {
        let mut sizes: Vec<usize> = ring_segments(n, jam).unwrap().iter().map(Vec::len).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    #[test]
    fn equidistant_segments() {
        assert_eq!(segment_sizes(12, &ring_equidistant(12, 3).unwrap()), vec![4, 4, 4]);
        assert_eq!(segment_sizes(10, &ring_equidistant(10, 3).unwrap()), vec![4, 3, 3]);
        assert_eq!(segment_sizes(6, &ring_equidistant(6, 6).unwrap()), vec![1; 6]);
        for n in 3..40 {
            for t in 1..=n {
                let sizes = segment_sizes(n, &ring_equidistant(n, t).unwrap());
                assert_eq!(sizes.len(), t);
                assert!(sizes[0] - sizes[t - 1] <= 1);
            }
        }
    }

    #[test]
    fn adjacent_layout() {
        let jam = ring_adjacent(8, 3).unwrap();
        let ring = GossipNetwork::ring(8, 1.0, 1.0).unwrap();
        let d = ring.apply_jammers(&jam).decompose();
        let isolated: Vec<usize> = d
            .components
            .iter()
            .filter(|c| c.shape == Shape::Isolated)
            .flat_map(|c| c.nodes.clone())
            .collect();
        assert_eq!(isolated, vec![1, 2]);
        assert_eq!(segment_sizes(8, &jam), vec![6, 1, 1]);
        assert_eq!(segment_sizes(8, &ring_adjacent(8, 1).unwrap()), vec![8]);
        assert_eq!(segment_sizes(8, &ring_adjacent(8, 8).unwrap()), vec![1; 8]);
    }

    #[test]
    fn random_is_seeded() {
        let a = ring_random(50, 7, 42).unwrap();
        assert_eq!(a, ring_random(50, 7, 42).unwrap());
        assert_eq!(a.len(), 7);
        assert_ne!(a, ring_random(50, 7, 43).unwrap());
        assert_eq!(ring_random(9, 9, 1).unwrap().len(), 9);
    }

    #[test]
    fn ring_budget_errors() {
        assert!(ring_equidistant(5, 6).is_err());
        assert!(ring_adjacent(5, 0).is_err());
        assert!(ring_random(1, 1, 0).is_err());
    }

    #[test]
    fn greedy_plans() {
        let (plan, jam) = fc_greedy(6, 12).unwrap();
        assert_eq!((plan.k, plan.c), (3, 0));
        assert_eq!(jam.len(), 12);
        let fc = GossipNetwork::fully_connected(6, 1.0, 1.0, LinkDenominator::N).unwrap();
        let shapes = fc.apply_jammers(&jam).decompose().shapes();
        assert!(shapes.contains(&(Shape::Clique, 3)));

        let (plan, jam) = fc_greedy(6, 0).unwrap();
        assert_eq!((plan.k, plan.c, plan.steps), (6, 0, 6));
        assert!(jam.is_empty());

        let (plan, _) = fc_greedy(6, 11).unwrap();
        assert_eq!((plan.k, plan.c), (3, 1));
        assert_eq!(binomial2(plan.k) + plan.c, plan.surviving_links());

        assert!(fc_greedy(6, 16).is_err());
    }

    #[test]
    fn greedy_invariants() {
        for n in 1..30 {
            for t in 0..=binomial2(n) {
                let plan = GreedyPlan::new(n, t).unwrap();
                let nb = plan.surviving_links();
                assert_eq!(binomial2(plan.k) + plan.c, nb);
                assert!(plan.c < plan.k);
                assert!(binomial2(plan.steps - 1) <= nb && nb <= binomial2(plan.steps));
                assert_eq!(plan.links().len(), nb);
            }
        }
    }

    #[test]
    fn clusters() {
        let jam = fc_clusters(8, 3, 2).unwrap();
        assert_eq!(jam.len(), binomial2(8) - 6);
        let fc = GossipNetwork::fully_connected(8, 1.0, 1.0, LinkDenominator::N).unwrap();
        let mut shapes = fc.apply_jammers(&jam).decompose().shapes();
        shapes.sort();
        assert_eq!(shapes, vec![(Shape::Isolated, 1), (Shape::Isolated, 1), (Shape::Clique, 3), (Shape::Clique, 3)]);

        // one cluster is the greedy clique with the same budget
        let (_, greedy) = fc_greedy(8, binomial2(8) - binomial2(4)).unwrap();
        assert_eq!(fc_clusters(8, 4, 1).unwrap(), greedy);

        assert!(fc_clusters(8, 3, 3).is_err());
        assert_eq!(ClusterPlan::for_clique(4, 3), Some(ClusterPlan { m_bar: 2, k_bar: 3 }));
        assert_eq!(ClusterPlan::for_clique(5, 3), None);
    }

    #[test]
    fn enumeration_counts() {
        let total: usize = (1..=6).map(|k| enumerate_configs(6, binomial2(k)).unwrap().count()).sum();
        assert_eq!(total, 8480);
        let empty: Vec<_> = enumerate_configs(5, 0).unwrap().collect();
        assert_eq!(empty, vec![Vec::<(usize, usize)>::new()]);
        match enumerate_configs(12, 10) {
            Err(Error::TooManyConfigs { count, .. }) => assert_eq!(count, choose(66, 10)),
            _ => panic!("expected refusal"),
        }
        assert!(enumerate_configs(4, 7).is_err());
    }
}
