use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::JammerSet;

use super::{path_interval_ages, ring_node_age, AgeReport};

/// How a segment of a jammed ring is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RingModel {
    /// Exact ages of the line segment.
    Line,
    /// Each segment closed into its own ring (lower bound, within a factor 2).
    Miniring,
}

fn link_index(n: usize, i: usize, j: usize) -> Option<usize> {
    if n == 2 {
        return Some(0);
    }
    if (i + 1) % n == j {
        Some(i)
    } else if (j + 1) % n == i {
        Some(j)
    } else {
        None
    }
}

/// Segments left after cutting ring links, each listed end to end.
/// With no cuts the whole ring is returned as one (closed) segment.
pub fn ring_segments(n: usize, jam: &JammerSet) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::InvalidTopology(format!("a ring needs at least 2 nodes, got {n}")));
    }
    let mut cuts = Vec::with_capacity(jam.len());
    for (i, j) in jam.iter() {
        if i >= n || j >= n {
            return Err(Error::NodeOutOfRange { node: i.max(j), n });
        }
        match link_index(n, i, j) {
            Some(t) => cuts.push(t),
            None => {
                return Err(Error::Shape(format!(
                    "({}, {}) is not a link of a {n}-node ring",
                    i + 1,
                    j + 1
                )))
            }
        }
    }
    cuts.sort_unstable();
    cuts.dedup();
    if cuts.is_empty() {
        return Ok(vec![(0..n).collect()]);
    }
    if n == 2 {
        return Ok(vec![vec![0], vec![1]]);
    }
    let q = cuts.len();
    let segments = (0..q)
        .map(|a| {
            let from = cuts[a] + 1;
            let to = if a + 1 < q { cuts[a + 1] } else { cuts[0] + n };
            (from..=to).map(|p| p % n).collect()
        })
        .collect();
    Ok(segments)
}

/// Per-node ages of a ring of `n` nodes with the given jammers, each node
/// fed at `lambda / n` and ring links at `lambda / 2`.
pub fn dismembered_ring_age(
    n: usize,
    jam: &JammerSet,
    model: RingModel,
    lambda: f64,
    lambda_s: f64,
) -> Result<AgeReport> {
    let segments = ring_segments(n, jam)?;
    let nf = n as f64;
    let mut ages = vec![0.0; n];
    if jam.is_empty() {
        ages.fill(ring_node_age(n, nf, lambda, lambda_s));
        return Ok(AgeReport::new(ages));
    }
    for seg in &segments {
        let values = match model {
            RingModel::Line => path_interval_ages(seg.len(), lambda / 2.0, lambda / nf, lambda_s),
            RingModel::Miniring => vec![ring_node_age(seg.len(), nf, lambda, lambda_s); seg.len()],
        };
        for (&v, a) in seg.iter().zip(values) {
            ages[v] = a;
        }
    }
    Ok(AgeReport::new(ages))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::GossipNetwork;
    use crate::solver::{solve_subset_dp, DEFAULT_COMPONENT_CAP};

    #[test]
    fn segments_follow_cuts() {
        let jam = JammerSet::from_pairs(8, [(0, 1), (4, 5)]).unwrap();
        let segs = ring_segments(8, &jam).unwrap();
        assert_eq!(segs, vec![vec![1, 2, 3, 4], vec![5, 6, 7, 0]]);
        let jam = JammerSet::from_pairs(8, [(7, 0)]).unwrap();
        assert_eq!(ring_segments(8, &jam).unwrap(), vec![(0..8).collect::<Vec<_>>()]);
    }

    #[test]
    fn non_ring_pair_rejected() {
        let jam = JammerSet::from_pairs(8, [(0, 2)]).unwrap();
        assert!(matches!(ring_segments(8, &jam), Err(Error::Shape(_))));
    }

    #[test]
    fn all_links_cut() {
        let n = 7;
        let jam = JammerSet::from_pairs(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap();
        for model in [RingModel::Line, RingModel::Miniring] {
            let r = dismembered_ring_age(n, &jam, model, 1.0, 1.0).unwrap();
            assert!(r.per_node.iter().all(|&a| (a - 7.0).abs() < 1e-12));
        }
    }

    #[test]
    fn line_model_is_exact() {
        let n = 10;
        let jam = JammerSet::from_pairs(n, [(2, 3), (3, 4), (8, 9)]).unwrap();
        let net = GossipNetwork::ring(n, 1.0, 1.0).unwrap().apply_jammers(&jam);
        let exact = solve_subset_dp(&net, DEFAULT_COMPONENT_CAP).unwrap();
        let line = dismembered_ring_age(n, &jam, RingModel::Line, 1.0, 1.0).unwrap();
        for (a, b) in line.per_node.iter().zip(&exact.per_node) {
            assert!((a - b).abs() < 1e-12 * b);
        }
    }

    #[test]
    fn two_node_ring() {
        let jam = JammerSet::from_pairs(2, [(0, 1)]).unwrap();
        let r = dismembered_ring_age(2, &jam, RingModel::Line, 1.0, 1.0).unwrap();
        assert_eq!(r.per_node, vec![2.0, 2.0]);
        let r = dismembered_ring_age(2, &JammerSet::new(), RingModel::Line, 1.0, 1.0).unwrap();
        assert!((r.average - 4.0 / 3.0).abs() < 1e-15);
    }
}
