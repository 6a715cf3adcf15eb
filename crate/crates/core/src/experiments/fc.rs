use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fmt_opt, thin_geometric, write_rows, JammerRule, Strategy, SweepSpec};
use crate::error::{Error, Result};
use crate::network::{GossipNetwork, LinkDenominator};
use crate::placement::{binomial2, fc_greedy, GreedyPlan};
use crate::sim::{derive_seed, simulate};

const SIGMAS: f64 = 3.0;
pub const FC_SIM_CAP: usize = 256;

/// Sizes up to `n_max` whose greedy plan is a single clique with no
/// leftover links, thinned geometrically to `max_points`.
pub fn fc_grid(rule: JammerRule, alpha: f64, c: f64, n_max: usize, max_points: usize) -> Vec<usize> {
    let ns: Vec<usize> = (2..=n_max)
        .filter(|&n| {
            let t = rule.count(n, alpha, c);
            t <= binomial2(n) && GreedyPlan::new(n, t).is_ok_and(|p| p.c == 0)
        })
        .collect();
    thin_geometric(&ns, max_points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FcRow {
    pub n: usize,
    pub n_jammers: usize,
    pub strategy: Strategy,
    /// Size of the surviving clique.
    pub k: usize,
    pub age_analytic: f64,
    pub age_sim: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub seed: u64,
    pub violations: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FcTable {
    pub rows: Vec<FcRow>,
    pub skipped: Vec<String>,
}

impl FcTable {
    pub fn violations(&self) -> Vec<String> {
        self.rows
            .iter()
            .flat_map(|r| {
                r.violations
                    .iter()
                    .map(move |v| format!("n={} jammers={} k={}: {v}", r.n, r.n_jammers, r.k))
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        const HEADER: [&str; 8] = [
            "n",
            "n_jammers",
            "strategy",
            "k",
            "age_analytic",
            "age_sim",
            "sim_stderr",
            "seed",
        ];
        write_rows(out, &HEADER, &self.rows, |r| {
            vec![
                r.n.to_string(),
                r.n_jammers.to_string(),
                r.strategy.to_string(),
                r.k.to_string(),
                r.age_analytic.to_string(),
                fmt_opt(r.age_sim),
                fmt_opt(r.sim_stderr),
                r.seed.to_string(),
            ]
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn fc_row(spec: &SweepSpec, n: usize) -> Result<std::result::Result<FcRow, String>> {
    let n_jammers = spec.jammer_rule.count(n, spec.alpha, spec.c);
    if n_jammers > binomial2(n) {
        return Ok(Err(format!("n={n}: {n_jammers} jammers exceed the {} links", binomial2(n))));
    }
    let plan = GreedyPlan::new(n, n_jammers)?;
    if plan.c != 0 {
        return Ok(Err(format!("n={n}: {} leftover links outside the clique", plan.c)));
    }
    let seed = derive_seed(spec.seed, n as u64);
    let ratio = spec.lambda_ratio;
    let age_analytic = plan.average_age(1.0, ratio);
    let sim = if spec.simulates() && n <= spec.sim_cap.unwrap_or(FC_SIM_CAP) {
        let (_, jam) = fc_greedy(n, n_jammers)?;
        let net = GossipNetwork::fully_connected(n, 1.0, ratio, LinkDenominator::N)?.apply_jammers(&jam);
        Some(simulate(&net, &spec.sim_config(seed))?)
    } else {
        None
    };
    let mut violations = Vec::new();
    if let Some(s) = &sim {
        if !((s.average - age_analytic).abs() <= SIGMAS * s.average_std_error) {
            violations.push(format!(
                "simulated age {} +- {} is more than {SIGMAS} standard errors from {age_analytic}",
                s.average, s.average_std_error
            ));
        }
    }
    Ok(Ok(FcRow {
        n,
        n_jammers,
        strategy: Strategy::Greedy,
        k: plan.k,
        age_analytic,
        age_sim: sim.as_ref().map(|s| s.average),
        sim_stderr: sim.as_ref().map(|s| s.average_std_error),
        seed,
        violations,
    }))
}

/// Greedy-placement ages of fully connected networks over the sweep's size grid.
/// Sizes whose surviving links do not form a single clique are skipped.
pub fn sweep_fc(spec: &SweepSpec) -> Result<FcTable> {
    spec.validate()?;
    if spec.strategy != Strategy::Greedy {
        return Err(Error::Config("fully connected sweeps use greedy placement".into()));
    }
    if spec.jammer_rule == JammerRule::Power && !(spec.alpha > 1.0 && spec.alpha <= 2.0) {
        return Err(Error::Domain(format!(
            "power jammer rule needs alpha in (1, 2], got {}",
            spec.alpha
        )));
    }
    let results: Vec<_> = spec.n_values.par_iter().map(|&n| fc_row(spec, n)).collect();
    let mut table = FcTable::default();
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

/// Rows with `n` within a factor 10 of the largest size.
pub fn largest_decade(rows: &[FcRow]) -> &[FcRow] {
    let Some(last) = rows.last() else {
        return rows;
    };
    let from = rows.partition_point(|r| (r.n as f64) < last.n as f64 / 10.0);
    &rows[from..]
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let m = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / m;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::harmonic;

    fn spec(rule: JammerRule, alpha: f64, c: f64, n_values: Vec<usize>) -> SweepSpec {
        SweepSpec {
            alpha,
            c,
            n_values,
            strategy: Strategy::Greedy,
            jammer_rule: rule,
            ..SweepSpec::default()
        }
    }

    #[test]
    fn nlogn_grid_has_no_leftovers() {
        let g = fc_grid(JammerRule::NLogN, 0.0, 1.0, 500, 100);
        assert_eq!(&g[..5], &[2, 3, 4, 13, 14]);
        let t = sweep_fc(&spec(JammerRule::NLogN, 0.0, 1.0, g)).unwrap();
        assert!(t.skipped.is_empty());
        for r in &t.rows {
            assert_eq!(binomial2(r.n) - r.n_jammers, binomial2(r.k));
        }
    }

    #[test]
    fn no_jammers_gives_harmonic_age() {
        // c n^alpha < 1 keeps every link
        let t = sweep_fc(&spec(JammerRule::Power, 1.5, 1e-4, vec![5, 9])).unwrap();
        for r in &t.rows {
            assert_eq!(r.n_jammers, 0);
            assert_eq!(r.k, r.n);
            assert!((r.age_analytic - harmonic(r.n)).abs() < 1e-12);
        }
    }

    #[test]
    fn power_rule_domain() {
        assert!(matches!(
            sweep_fc(&spec(JammerRule::Power, 0.9, 1.0, vec![10])),
            Err(Error::Domain(_))
        ));
        let mut ring = spec(JammerRule::Power, 1.5, 1.0, vec![10]);
        ring.strategy = Strategy::Adjacent;
        assert!(sweep_fc(&ring).is_err());
    }

    #[test]
    fn leftover_sizes_skipped() {
        let t = sweep_fc(&spec(JammerRule::NLogN, 0.0, 1.0, vec![5, 13])).unwrap();
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.skipped.len(), 1);
    }

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<_> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powf(0.8))).collect();
        assert!((log_log_slope(&pts).unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(log_log_slope(&pts[..1]), None);
    }
}
