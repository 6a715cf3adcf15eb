//! Gossip network topologies, jammer sets and component decomposition.
//!
//! Nodes are indexed `0..n` in the API. The JSON document form uses 1-based
//! ids, matching how node labels are written in experiment configs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Directed rates on one undirected link `(i, j)` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkRates {
    /// Rate of updates `i -> j`.
    pub forward: f64,
    /// Rate of updates `j -> i`.
    pub backward: f64,
}

impl LinkRates {
    pub fn symmetric(rate: f64) -> Self {
        Self {
            forward: rate,
            backward: rate,
        }
    }
}

/// Denominator of the per-link rate in a fully connected network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkDenominator {
    /// Links at `lambda / n`; the variant used by all jamming analysis.
    #[default]
    N,
    /// Links at `lambda / (n - 1)`, so every node pushes at total rate `lambda`.
    NMinusOne,
}

/// A source plus `n` gossiping nodes.
///
/// The source updates its own version at `lambda_s` and pushes to node `j`
/// at `source_rates[j]`. Inter-node links are undirected pairs carrying an
/// independent rate in each direction.
#[derive(Debug, Clone, PartialEq)]
pub struct GossipNetwork {
    n: usize,
    lambda_s: f64,
    source_rates: Vec<f64>,
    links: BTreeMap<(usize, usize), LinkRates>,
}

fn check_rate(what: &str, rate: f64) -> Result<()> {
    if rate.is_finite() && rate >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRate(format!("{what} = {rate}")))
    }
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl GossipNetwork {
    /// A network with no inter-node links.
    pub fn new(lambda_s: f64, source_rates: Vec<f64>) -> Result<Self> {
        if source_rates.is_empty() {
            return Err(Error::InvalidTopology("a network needs at least one node".into()));
        }
        check_rate("lambda_s", lambda_s)?;
        for (j, &r) in source_rates.iter().enumerate() {
            check_rate(&format!("source rate of node {j}"), r)?;
        }
        Ok(Self {
            n: source_rates.len(),
            lambda_s,
            source_rates,
            links: BTreeMap::new(),
        })
    }

    /// `n` isolated nodes, each fed by the source at `lambda / n`.
    pub fn isolated(n: usize, lambda: f64, lambda_s: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidTopology("a network needs at least one node".into()));
        }
        check_rate("lambda", lambda)?;
        Self::new(lambda_s, vec![lambda / n as f64; n])
    }

    /// `n` nodes fed at `lambda / n` with the given undirected links, each at
    /// `link_rate` in both directions. Duplicate pairs are merged.
    pub fn with_links<I>(n: usize, lambda: f64, lambda_s: f64, link_rate: f64, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut net = Self::isolated(n, lambda, lambda_s)?;
        for (i, j) in pairs {
            net.set_link(i, j, LinkRates::symmetric(link_rate))?;
        }
        Ok(net)
    }

    /// Ring of `n` nodes; each node pushes to both neighbours at `lambda / 2`.
    ///
    /// For `n = 2` both neighbour slots point at the same node, so the two
    /// relations merge into one link carrying `lambda` in each direction.
    pub fn ring(n: usize, lambda: f64, lambda_s: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTopology(format!("a ring needs at least 2 nodes, got {n}")));
        }
        if n == 2 {
            return Self::with_links(2, lambda, lambda_s, lambda, [(0, 1)]);
        }
        Self::with_links(n, lambda, lambda_s, lambda / 2.0, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// All-to-all network with links at `lambda / n` or `lambda / (n - 1)`.
    pub fn fully_connected(n: usize, lambda: f64, lambda_s: f64, denominator: LinkDenominator) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTopology(format!(
                "a fully connected network needs at least 2 nodes, got {n}"
            )));
        }
        let rate = match denominator {
            LinkDenominator::N => lambda / n as f64,
            LinkDenominator::NMinusOne => lambda / (n - 1) as f64,
        };
        let pairs = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Self::with_links(n, lambda, lambda_s, rate, pairs)
    }

    /// Path `0 - 1 - ... - (n0-1)` inside a system of `n` nodes; links at `lambda / 2`,
    /// the remaining `n - n0` nodes isolated.
    pub fn line(n0: usize, n: usize, lambda: f64, lambda_s: f64) -> Result<Self> {
        if n0 == 0 || n0 > n {
            return Err(Error::InvalidTopology(format!("line of {n0} nodes in a system of {n}")));
        }
        Self::with_links(n, lambda, lambda_s, lambda / 2.0, (1..n0).map(|i| (i - 1, i)))
    }

    /// Hub `0` linked to leaves `1..=d` at `lambda / n`; all other nodes isolated.
    pub fn star(d: usize, n: usize, lambda: f64, lambda_s: f64) -> Result<Self> {
        if d + 1 > n {
            return Err(Error::InvalidTopology(format!("star of degree {d} needs more than {n} nodes")));
        }
        Self::with_links(n, lambda, lambda_s, lambda / n as f64, (1..=d).map(|leaf| (0, leaf)))
    }

    /// Clique on nodes `0..k` at `lambda / n`; the other `n - k` nodes isolated.
    pub fn mini_fc(k: usize, n: usize, lambda: f64, lambda_s: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidTopology(format!("mini-FC of {k} nodes in a system of {n}")));
        }
        let pairs = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j)));
        Self::with_links(n, lambda, lambda_s, lambda / n as f64, pairs)
    }

    fn check_node(&self, node: usize) -> Result<()> {
        if node < self.n {
            Ok(())
        } else {
            Err(Error::NodeOutOfRange { node, n: self.n })
        }
    }

    /// Insert or replace the link between `i` and `j`. `rates.forward` is
    /// the `i -> j` direction as passed, regardless of index order.
    pub fn set_link(&mut self, i: usize, j: usize, rates: LinkRates) -> Result<()> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(Error::InvalidTopology(format!("self-loop on node {i}")));
        }
        check_rate("link rate", rates.forward)?;
        check_rate("link rate", rates.backward)?;
        let stored = if i < j {
            rates
        } else {
            LinkRates {
                forward: rates.backward,
                backward: rates.forward,
            }
        };
        self.links.insert(ordered(i, j), stored);
        Ok(())
    }

    pub fn remove_link(&mut self, i: usize, j: usize) -> Option<LinkRates> {
        self.links.remove(&ordered(i, j))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda_s(&self) -> f64 {
        self.lambda_s
    }

    pub fn source_rates(&self) -> &[f64] {
        &self.source_rates
    }

    pub fn source_rate(&self, j: usize) -> f64 {
        self.source_rates[j]
    }

    /// Rate of updates from node `i` to node `j`; zero when unlinked.
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        match self.links.get(&ordered(i, j)) {
            Some(r) if i < j => r.forward,
            Some(r) => r.backward,
            None => 0.0,
        }
    }

    pub fn has_link(&self, i: usize, j: usize) -> bool {
        self.links.contains_key(&ordered(i, j))
    }

    /// Undirected links as `((i, j), rates)` with `i < j`, in index order.
    pub fn links(&self) -> impl Iterator<Item = ((usize, usize), LinkRates)> + '_ {
        self.links.iter().map(|(&k, &v)| (k, v))
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Sum of node `i`'s outgoing inter-node rates.
    pub fn out_rate(&self, i: usize) -> f64 {
        self.links()
            .filter_map(|((a, b), r)| {
                if a == i {
                    Some(r.forward)
                } else if b == i {
                    Some(r.backward)
                } else {
                    None
                }
            })
            .sum()
    }

    /// Neighbour lists of the undirected support graph.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for ((i, j), _) in self.links() {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Cut every jammed link. Pairs that match no existing link are reported
    /// through `log::warn!` and otherwise ignored.
    pub fn apply_jammers(&self, jam: &JammerSet) -> GossipNetwork {
        let mut out = self.clone();
        for (i, j) in jam.iter() {
            if out.links.remove(&(i, j)).is_none() {
                log::warn!("jammer on ({}, {}) hits no existing link", i + 1, j + 1);
            }
        }
        out
    }

    /// Jammed pairs that do not correspond to a link of this network.
    pub fn wasted_jammers(&self, jam: &JammerSet) -> Vec<(usize, usize)> {
        jam.iter().filter(|&(i, j)| !self.has_link(i, j)).collect()
    }

    /// Connected components of the undirected support graph, each tagged
    /// with its most specific shape.
    pub fn decompose(&self) -> ComponentDecomposition {
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut components = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            let mut members = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                members.push(v);
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            members.sort_unstable();
            components.push(classify(members, &adj));
        }
        ComponentDecomposition { components }
    }

    pub fn to_document(&self, jam: Option<&JammerSet>) -> NetworkDocument {
        NetworkDocument {
            n: self.n,
            lambda_s: self.lambda_s,
            source_rates: self.source_rates.clone(),
            links: self
                .links()
                .map(|((i, j), r)| LinkRecord {
                    i: i + 1,
                    j: j + 1,
                    rate_ij: r.forward,
                    rate_ji: r.backward,
                })
                .collect(),
            cuts: jam
                .map(|jam| jam.iter().map(|(i, j)| [i + 1, j + 1]).collect())
                .unwrap_or_default(),
        }
    }
}

/// Distinct inter-node links cut by jammers. Source links cannot be jammed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JammerSet {
    cut_links: BTreeSet<(usize, usize)>,
}

impl JammerSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Build from pairs over nodes `0..n`. Repeated pairs count once.
    pub fn from_pairs<I>(n: usize, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut jam = Self::new();
        for (i, j) in pairs {
            jam.insert(n, i, j)?;
        }
        Ok(jam)
    }

    /// Returns `false` if the pair was already cut.
    pub fn insert(&mut self, n: usize, i: usize, j: usize) -> Result<bool> {
        for node in [i, j] {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
        }
        if i == j {
            return Err(Error::InvalidTopology(format!("jammer on self-pair ({i}, {i})")));
        }
        Ok(self.cut_links.insert(ordered(i, j)))
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.cut_links.contains(&ordered(i, j))
    }

    /// Number of distinct cut links.
    pub fn len(&self) -> usize {
        self.cut_links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cut_links.is_empty()
    }

    /// Cut pairs `(i, j)` with `i < j`, in index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cut_links.iter().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Isolated,
    Path,
    Cycle,
    Clique,
    Star,
    General,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Shape::Isolated => "isolated",
            Shape::Path => "path",
            Shape::Cycle => "cycle",
            Shape::Clique => "clique",
            Shape::Star => "star",
            Shape::General => "general",
        };
        f.write_str(s)
    }
}

/// One connected component.
///
/// Node order follows the shape: a path lists nodes end to end starting at
/// the lower-id endpoint, a cycle walks around from its lowest id towards
/// the lower-id neighbour, a star lists the hub first. Other shapes are
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub nodes: Vec<usize>,
    pub shape: Shape,
}

impl Component {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    pub components: Vec<Component>,
}

impl ComponentDecomposition {
    pub fn shapes(&self) -> Vec<(Shape, usize)> {
        self.components.iter().map(|c| (c.shape, c.len())).collect()
    }

    pub fn count(&self, shape: Shape) -> usize {
        self.components.iter().filter(|c| c.shape == shape).count()
    }

    pub fn largest(&self) -> usize {
        self.components.iter().map(Component::len).max().unwrap_or(0)
    }
}

fn walk(start: usize, adj: &[Vec<usize>], len: usize) -> Vec<usize> {
    let mut order = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    while order.len() < len {
        let next = adj[cur]
            .iter()
            .copied()
            .filter(|&w| w != prev && w != start)
            .min()
            .expect("walk stays inside a path or cycle");
        prev = cur;
        cur = next;
        order.push(cur);
    }
    order
}

// A 3-node clique is also a 3-cycle; it is tagged as a clique.
fn classify(members: Vec<usize>, adj: &[Vec<usize>]) -> Component {
    let m = members.len();
    if m == 1 {
        return Component {
            nodes: members,
            shape: Shape::Isolated,
        };
    }
    let degree = |v: usize| adj[v].len();
    let edges: usize = members.iter().map(|&v| degree(v)).sum::<usize>() / 2;
    let max_deg = members.iter().map(|&v| degree(v)).max().unwrap_or(0);

    if edges == m - 1 && max_deg <= 2 {
        let end = members.iter().copied().find(|&v| degree(v) == 1).expect("paths have endpoints");
        let nodes = walk(end, adj, m);
        return Component { nodes, shape: Shape::Path };
    }
    if m >= 3 && edges == m * (m - 1) / 2 {
        return Component {
            nodes: members,
            shape: Shape::Clique,
        };
    }
    if edges == m && members.iter().all(|&v| degree(v) == 2) {
        let nodes = walk(members[0], adj, m);
        return Component { nodes, shape: Shape::Cycle };
    }
    if edges == m - 1 && max_deg == m - 1 {
        let hub = members.iter().copied().find(|&v| degree(v) == m - 1).expect("star hub");
        let mut nodes = vec![hub];
        nodes.extend(members.iter().copied().filter(|&v| v != hub));
        return Component { nodes, shape: Shape::Star };
    }
    Component {
        nodes: members,
        shape: Shape::General,
    }
}

/// JSON interchange form of a network plus an optional jammer set, 1-based ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkDocument {
    pub n: usize,
    pub lambda_s: f64,
    pub source_rates: Vec<f64>,
    #[serde(default)]
    pub links: Vec<LinkRecord>,
    #[serde(default)]
    pub cuts: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub i: usize,
    pub j: usize,
    pub rate_ij: f64,
    pub rate_ji: f64,
}

fn from_one_based(id: usize, n: usize) -> Result<usize> {
    if id == 0 || id > n {
        Err(Error::NodeOutOfRange { node: id, n })
    } else {
        Ok(id - 1)
    }
}

impl NetworkDocument {
    /// Validate and split into the (unjammed) network and its jammer set.
    pub fn into_parts(self) -> Result<(GossipNetwork, JammerSet)> {
        if self.source_rates.len() != self.n {
            return Err(Error::InvalidTopology(format!(
                "n = {} but {} source rates given",
                self.n,
                self.source_rates.len()
            )));
        }
        let mut net = GossipNetwork::new(self.lambda_s, self.source_rates)?;
        for link in &self.links {
            let i = from_one_based(link.i, self.n)?;
            let j = from_one_based(link.j, self.n)?;
            net.set_link(
                i,
                j,
                LinkRates {
                    forward: link.rate_ij,
                    backward: link.rate_ji,
                },
            )?;
        }
        let mut jam = JammerSet::new();
        for [i, j] in &self.cuts {
            jam.insert(self.n, from_one_based(*i, self.n)?, from_one_based(*j, self.n)?)?;
        }
        Ok((net, jam))
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
