//! Exact expected version ages.
//!
//! Everything here evaluates the set recursion
//!
//! ```text
//! age(S) = (lambda_s + sum_{i in N(S)} r_i(S) * age(S + i)) / (sum_{j in S} src_j + sum_{i in N(S)} r_i(S))
//! ```
//!
//! where `r_i(S)` is the total rate from outside node `i` into `S` and
//! `age(S)` is the expected minimum age over `S`. The subset solver applies
//! it literally; the interval solvers and closed forms exploit the symmetry
//! of paths, cycles, cliques and stars.

mod bounds;
mod closed_form;
mod dismembered;
mod interval;
mod report;
mod subset;

pub use bounds::{exp_product_bounds, ratio_product, ring_scaling_bounds, ScalingBounds};
pub use closed_form::{
    age_reduction, harmonic, line_corner_age, mini_fc_age, rd_coefficient, rd_hundredths, ring_node_age,
    star_node_age, MiniFcAge,
};
pub use dismembered::{dismembered_ring_age, ring_segments, RingModel};
pub use interval::{
    cycle_interval_ages, path_interval_ages, solve_path_interval_dp, Interval, PathIntervalTable,
};
pub use report::AgeReport;
pub use subset::{component_set_ages, solve_subset_dp, SetAgeTable, DEFAULT_COMPONENT_CAP};

use crate::error::{Error, Result};
use crate::network::{Component, GossipNetwork, Shape};

const UNIFORM_TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= UNIFORM_TOL * a.abs().max(b.abs())
}

/// Common link rate and source rate of a component, if every link carries
/// the same rate in both directions and every node the same source rate.
pub(crate) fn uniform_rates(net: &GossipNetwork, comp: &Component) -> Option<(f64, f64)> {
    let s = net.source_rate(comp.nodes[0]);
    if !comp.nodes.iter().all(|&v| close(net.source_rate(v), s)) {
        return None;
    }
    let mut link = None;
    for (idx, &a) in comp.nodes.iter().enumerate() {
        for &b in &comp.nodes[idx + 1..] {
            if !net.has_link(a, b) {
                continue;
            }
            for r in [net.rate(a, b), net.rate(b, a)] {
                match link {
                    None => link = Some(r),
                    Some(l) if close(l, r) => {}
                    Some(_) => return None,
                }
            }
        }
    }
    link.map(|r| (r, s))
}

/// Which route produced a component's ages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Isolated,
    PathInterval,
    CycleClosedForm,
    CliqueClosedForm,
    SubsetDp,
}

/// Per-node ages for one component using the most specific solver that
/// applies, or `None` when only the subset recursion can handle it.
pub fn specialized_component_ages(net: &GossipNetwork, comp: &Component) -> Option<(Route, Vec<f64>)> {
    let lambda_s = net.lambda_s();
    let m = comp.len();
    if comp.shape == Shape::Isolated {
        let s = net.source_rate(comp.nodes[0]);
        return (s > 0.0).then(|| (Route::Isolated, vec![lambda_s / s]));
    }
    let (r, s) = uniform_rates(net, comp)?;
    if s <= 0.0 || r <= 0.0 {
        return None;
    }
    match comp.shape {
        Shape::Path => Some((Route::PathInterval, path_interval_ages(m, r, s, lambda_s))),
        Shape::Clique if close(r, s) => {
            // links and source both at lambda/n; take n = 1, lambda = s
            let age = mini_fc_age(m, 1.0, s, lambda_s).per_node;
            Some((Route::CliqueClosedForm, vec![age; m]))
        }
        // a triangle is also a 3-cycle
        Shape::Cycle | Shape::Clique if comp.shape == Shape::Cycle || m == 3 => {
            // links at lambda/2, source at lambda/n
            let lambda = 2.0 * r;
            let age = ring_node_age(m, lambda / s, lambda, lambda_s);
            Some((Route::CycleClosedForm, vec![age; m]))
        }
        _ => None,
    }
}

/// Exact ages for every node: specialized solvers where a component's
/// shape and rates allow, the subset recursion otherwise.
pub fn solve(net: &GossipNetwork, cap: usize) -> Result<AgeReport> {
    let mut ages = vec![0.0; net.n()];
    for (idx, comp) in net.decompose().components.iter().enumerate() {
        let values = match specialized_component_ages(net, comp) {
            Some((_, v)) => v,
            None => {
                if comp.len() > cap {
                    return Err(Error::ComponentTooLarge {
                        component: idx,
                        size: comp.len(),
                        cap,
                    });
                }
                let table = component_set_ages(net, &comp.nodes).map_err(|e| match e {
                    Error::Unreachable(_) => Error::Unreachable(idx),
                    e => e,
                })?;
                table.node_ages()
            }
        };
        for (&v, age) in comp.nodes.iter().zip(values) {
            ages[v] = age;
        }
    }
    Ok(AgeReport::new(ages))
}
