use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::write_rows;
use crate::error::Result;
use crate::network::GossipNetwork;
use crate::placement::{binomial2, enumerate_configs, GreedyPlan};
use crate::solver::{solve, DEFAULT_COMPONENT_CAP};

const N: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationRow {
    pub config_id: usize,
    pub n_bar: usize,
    /// 1-based pairs, e.g. `1-2;1-3`.
    pub links: String,
    pub total_age: f64,
    pub average_age: f64,
    pub greedy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub n_bar: usize,
    pub count: usize,
    pub max_average: f64,
    pub greedy_average: f64,
    pub greedy_attains_max: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationTable {
    pub rows: Vec<EnumerationRow>,
    pub groups: Vec<GroupSummary>,
}

impl EnumerationTable {
    pub fn all_greedy_maximal(&self) -> bool {
        self.groups.iter().all(|g| g.greedy_attains_max)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let header = ["config_id", "n_bar", "links", "total_age", "average_age", "greedy"];
        write_rows(out, &header, &self.rows, |r| {
            vec![
                r.config_id.to_string(),
                r.n_bar.to_string(),
                r.links.clone(),
                r.total_age.to_string(),
                r.average_age.to_string(),
                r.greedy.to_string(),
            ]
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn format_links(links: &[(usize, usize)]) -> String {
    links
        .iter()
        .map(|(i, j)| format!("{}-{}", i + 1, j + 1))
        .collect::<Vec<_>>()
        .join(";")
}

/// Exact ages of every placement of `C(k, 2)` links on six nodes, for
/// `k = 1..=6`, with links at `lambda / n` and `lambda_s = lambda = 1`.
pub fn enumerate_n6() -> Result<EnumerationTable> {
    let mut rows = Vec::new();
    let mut groups = Vec::new();
    for k in 1..=N {
        let n_bar = binomial2(k);
        let configs: Vec<Vec<(usize, usize)>> = enumerate_configs(N, n_bar)?.collect();
        let greedy_links = GreedyPlan::new(N, binomial2(N) - n_bar)?.links();
        let scored = configs
            .par_iter()
            .map(|links| {
                let net = GossipNetwork::with_links(N, 1.0, 1.0, 1.0 / N as f64, links.iter().copied())?;
                solve(&net, DEFAULT_COMPONENT_CAP)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut max_average = f64::NEG_INFINITY;
        let mut greedy_average = f64::NAN;
        for (links, report) in configs.iter().zip(scored) {
            let greedy = *links == greedy_links;
            if greedy {
                greedy_average = report.average;
            }
            max_average = max_average.max(report.average);
            rows.push(EnumerationRow {
                config_id: rows.len() + 1,
                n_bar,
                links: format_links(links),
                total_age: report.total,
                average_age: report.average,
                greedy,
            });
        }
        groups.push(GroupSummary {
            n_bar,
            count: configs.len(),
            max_average,
            greedy_average,
            greedy_attains_max: greedy_average >= max_average * (1.0 - 1e-12),
        });
    }
    Ok(EnumerationTable { rows, groups })
}
