use crate::error::{Error, Result};
use crate::network::GossipNetwork;

use super::AgeReport;

/// Default limit on component size for the subset recursion (2^20 sets).
pub const DEFAULT_COMPONENT_CAP: usize = 20;

const HARD_CAP: usize = 26;

/// Ages of every subset of one component, indexed by a bitmask over the
/// component's node list.
#[derive(Debug, Clone)]
pub struct SetAgeTable {
    nodes: Vec<usize>,
    ages: Vec<f64>,
}

impl SetAgeTable {
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Age of the set given as a local bitmask (bit `b` is `nodes()[b]`).
    pub fn age(&self, mask: usize) -> f64 {
        assert!(mask != 0 && mask < self.ages.len(), "set must be a nonempty subset of the component");
        self.ages[mask]
    }

    /// Age of a set given by global node ids; `None` if a node is not in the component.
    pub fn age_of(&self, set: &[usize]) -> Option<f64> {
        let mut mask = 0usize;
        for v in set {
            let b = self.nodes.iter().position(|u| u == v)?;
            mask |= 1 << b;
        }
        (mask != 0).then(|| self.ages[mask])
    }

    /// Singleton ages in component order.
    pub fn node_ages(&self) -> Vec<f64> {
        (0..self.nodes.len()).map(|b| self.ages[1 << b]).collect()
    }

    pub fn full_mask(&self) -> usize {
        self.ages.len() - 1
    }
}

/// Evaluate the set recursion for every subset of `nodes`, which must be a
/// union of connected components (no links leave the set).
///
/// Supersets have larger masks, so one descending sweep visits every
/// `S + i` before `S`.
pub fn component_set_ages(net: &GossipNetwork, nodes: &[usize]) -> Result<SetAgeTable> {
    let m = nodes.len();
    if m == 0 {
        return Err(Error::Degenerate("empty component".into()));
    }
    if m > HARD_CAP {
        return Err(Error::ComponentTooLarge {
            component: 0,
            size: m,
            cap: HARD_CAP,
        });
    }
    // rate_in[a][b]: local a -> local b
    let rate_in: Vec<Vec<f64>> = nodes
        .iter()
        .map(|&a| nodes.iter().map(|&b| if a == b { 0.0 } else { net.rate(a, b) }).collect())
        .collect();
    let src: Vec<f64> = nodes.iter().map(|&v| net.source_rate(v)).collect();
    let lambda_s = net.lambda_s();

    let full = (1usize << m) - 1;
    let mut ages = vec![0.0; full + 1];
    let src_total: f64 = src.iter().sum();
    if src_total <= 0.0 {
        return Err(Error::Unreachable(0));
    }
    ages[full] = lambda_s / src_total;

    for mask in (1..full).rev() {
        let mut num = lambda_s;
        let mut den = 0.0;
        for (b, &s) in src.iter().enumerate() {
            if mask >> b & 1 == 1 {
                den += s;
            }
        }
        for (a, row) in rate_in.iter().enumerate() {
            if mask >> a & 1 == 1 {
                continue;
            }
            let mut into = 0.0;
            let mut bits = mask;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                into += row[b];
                bits &= bits - 1;
            }
            if into > 0.0 {
                num += into * ages[mask | 1 << a];
                den += into;
            }
        }
        ages[mask] = if den > 0.0 { num / den } else { f64::INFINITY };
    }

    let table = SetAgeTable {
        nodes: nodes.to_vec(),
        ages,
    };
    if table.node_ages().iter().any(|a| !a.is_finite()) {
        return Err(Error::Unreachable(0));
    }
    Ok(table)
}

/// Exact per-node ages by the subset recursion on every component.
pub fn solve_subset_dp(net: &GossipNetwork, cap: usize) -> Result<AgeReport> {
    let mut ages = vec![0.0; net.n()];
    for (idx, comp) in net.decompose().components.iter().enumerate() {
        if comp.len() > cap.min(HARD_CAP) {
            return Err(Error::ComponentTooLarge {
                component: idx,
                size: comp.len(),
                cap: cap.min(HARD_CAP),
            });
        }
        let table = component_set_ages(net, &comp.nodes).map_err(|e| match e {
            Error::Unreachable(_) => Error::Unreachable(idx),
            e => e,
        })?;
        for (&v, age) in comp.nodes.iter().zip(table.node_ages()) {
            ages[v] = age;
        }
    }
    Ok(AgeReport::new(ages))
}
