//! Contiguous-set recursions for paths and cycles.
//!
//! On a path or cycle the set recursion only ever reaches contiguous
//! intervals, so ages of all `O(m^2)` intervals suffice. Levels are filled
//! from the whole component (length `m`) down to single nodes.

use serde::{Deserialize, Serialize};

/// A run of `len` consecutive nodes starting at position `start` (0-based)
/// along a path or cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Interval {
    pub start: usize,
    pub len: usize,
}

impl Interval {
    pub fn new(start: usize, len: usize) -> Self {
        Self { start, len }
    }

    /// Last position covered (inclusive).
    pub fn end(&self) -> usize {
        self.start + self.len - 1
    }

    /// Reflection about the gap between positions `pivot` and `pivot + 1`.
    /// `None` if the image leaves a path of `m` nodes.
    pub fn mirror(&self, pivot: usize, m: usize) -> Option<Interval> {
        let start = (2 * pivot + 2).checked_sub(self.start + self.len)?;
        let image = Interval::new(start, self.len);
        (image.end() < m).then_some(image)
    }

    pub fn contains(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end() <= self.end()
    }
}

/// Ages of every interval of a uniform path.
#[derive(Debug, Clone)]
pub struct PathIntervalTable {
    m: usize,
    // levels[len - 1][start]
    levels: Vec<Vec<f64>>,
}

impl PathIntervalTable {
    /// Path of `m` nodes, links at `link_rate` each way, source at `source_rate` per node.
    pub fn new(m: usize, link_rate: f64, source_rate: f64, lambda_s: f64) -> Self {
        assert!(m >= 1, "path needs at least one node");
        let mut levels = vec![Vec::new(); m];
        levels[m - 1] = vec![lambda_s / (m as f64 * source_rate)];
        for len in (1..m).rev() {
            let next = &levels[len];
            let cur = path_level(m, len, next, link_rate, source_rate, lambda_s);
            levels[len - 1] = cur;
        }
        Self { m, levels }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn age(&self, interval: Interval) -> f64 {
        assert!(interval.len >= 1 && interval.end() < self.m, "interval outside the path");
        self.levels[interval.len - 1][interval.start]
    }

    pub fn node_ages(&self) -> Vec<f64> {
        self.levels[0].clone()
    }
}

fn path_level(m: usize, len: usize, next: &[f64], link_rate: f64, source_rate: f64, lambda_s: f64) -> Vec<f64> {
    (0..=m - len)
        .map(|start| {
            let mut num = lambda_s;
            let mut den = len as f64 * source_rate;
            if start > 0 {
                num += link_rate * next[start - 1];
                den += link_rate;
            }
            if start + len < m {
                num += link_rate * next[start];
                den += link_rate;
            }
            num / den
        })
        .collect()
}

/// Per-node ages of a uniform path of `m` nodes using `O(m)` memory.
pub fn path_interval_ages(m: usize, link_rate: f64, source_rate: f64, lambda_s: f64) -> Vec<f64> {
    assert!(m >= 1, "path needs at least one node");
    let mut level = vec![lambda_s / (m as f64 * source_rate)];
    for len in (1..m).rev() {
        level = path_level(m, len, &level, link_rate, source_rate, lambda_s);
    }
    level
}

/// Line segment of `n0` nodes inside a system of `n` nodes: links at
/// `lambda / 2`, source at `lambda / n`.
pub fn solve_path_interval_dp(n0: usize, n: f64, lambda: f64, lambda_s: f64) -> Vec<f64> {
    path_interval_ages(n0, lambda / 2.0, lambda / n, lambda_s)
}

/// Per-node ages of a uniform cycle of `m` nodes.
///
/// An interval of length `m - 1` has a single outside node reached over
/// both boundary links, so its inflow is `2 * link_rate` like every other
/// level. For `m = 2` this is the merged two-node ring.
pub fn cycle_interval_ages(m: usize, link_rate: f64, source_rate: f64, lambda_s: f64) -> Vec<f64> {
    assert!(m >= 2, "cycle needs at least two nodes");
    let mut level = vec![lambda_s / (m as f64 * source_rate); m];
    for len in (1..m).rev() {
        let den = len as f64 * source_rate + 2.0 * link_rate;
        level = (0..m)
            .map(|start| {
                let left = level[(start + m - 1) % m];
                let right = level[start];
                (lambda_s + link_rate * (left + right)) / den
            })
            .collect();
    }
    level
}
