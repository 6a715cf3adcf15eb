//! Closed-form ages for rings, line corners, stars and mini-FCs.
//!
//! `n` is the system size. It only enters through the per-node source rate
//! `lambda / n`, so non-integer values are accepted.

const LOG_SPACE_FROM: usize = 1000;

/// Sum of the running products `prod_{k=1..j} 1/(1 + k/n)` for
/// `j = 1..n0-1`, and the last product itself.
fn product_sum(n0: usize, n: f64) -> (f64, f64) {
    let mut sum = 0.0;
    if n0 > LOG_SPACE_FROM {
        let mut log_p = 0.0;
        for k in 1..n0 {
            log_p -= (k as f64 / n).ln_1p();
            sum += log_p.exp();
        }
        (sum, log_p.exp())
    } else {
        let mut p = 1.0;
        for k in 1..n0 {
            p /= k as f64 / n + 1.0;
            sum += p;
        }
        (sum, p)
    }
}

/// Age of any node of a ring of `n0` nodes whose links run at `lambda / 2`
/// and whose source rate is `lambda / n`.
pub fn ring_node_age(n0: usize, n: f64, lambda: f64, lambda_s: f64) -> f64 {
    assert!(n0 >= 1, "ring needs at least one node");
    let (sum, last) = product_sum(n0, n);
    lambda_s / lambda * (sum + n / n0 as f64 * last)
}

/// Age of an end node of a line of `n0` nodes (links `lambda / 2`, source
/// `lambda / n`). Equals the ring form evaluated at half the system size,
/// doubled.
pub fn line_corner_age(n0: usize, n: f64, lambda: f64, lambda_s: f64) -> f64 {
    2.0 * ring_node_age(n0, n / 2.0, lambda, lambda_s)
}

/// Age of the hub of a star whose `d` leaves have degree one, all links and
/// source feeds at `lambda / n`.
pub fn star_node_age(d: usize, n: f64, lambda: f64, lambda_s: f64) -> f64 {
    lambda_s / lambda * n * star_factor(d)
}

// (1 + sum_{d2=0}^{d-1} prod_{d1=0}^{d2} (d - d1)/(d + 1)) / (d + 1)
fn star_factor(d: usize) -> f64 {
    let denom = (d + 1) as f64;
    let mut sum = 1.0;
    let mut p = 1.0;
    for d1 in 0..d {
        p *= (d - d1) as f64 / denom;
        sum += p;
    }
    sum / denom
}

/// Age reduction at a node that gains `d` links, as a fraction of the
/// isolated age `lambda_s * n / lambda`.
pub fn rd_coefficient(d: usize) -> f64 {
    1.0 - star_factor(d)
}

/// `rd_coefficient(d)` rounded down to hundredths.
pub fn rd_hundredths(d: usize) -> u32 {
    // guard against 0.25 landing a hair under
    (rd_coefficient(d) * 100.0 + 1e-9).floor() as u32
}

/// Lower bound on the age reduction when `d` links attach to an isolated node.
pub fn age_reduction(d: usize, n: f64, lambda: f64, lambda_s: f64) -> f64 {
    lambda_s / lambda * n - star_node_age(d, n, lambda, lambda_s)
}

pub fn harmonic(k: usize) -> f64 {
    (1..=k).map(|j| 1.0 / j as f64).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MiniFcAge {
    /// Age of each clique member.
    pub per_node: f64,
    /// Network total including the `n - k` isolated nodes.
    pub total: f64,
}

/// Clique of `k` nodes at `lambda / n` inside a system of `n`, others isolated.
pub fn mini_fc_age(k: usize, n: f64, lambda: f64, lambda_s: f64) -> MiniFcAge {
    assert!(k >= 1, "mini-FC needs at least one node");
    let h = harmonic(k);
    let scale = lambda_s / lambda;
    MiniFcAge {
        per_node: scale * n / k as f64 * h,
        total: scale * (n * h + n * (n - k as f64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_edge_cases() {
        assert_eq!(ring_node_age(1, 9.0, 1.0, 1.0), 9.0);
        assert!((ring_node_age(2, 2.0, 1.0, 1.0) - 4.0 / 3.0).abs() < 1e-15);
        assert!((ring_node_age(6, 6.0, 1.0, 1.0) - 2.4662).abs() < 5e-5);
    }

    #[test]
    fn ring_log_space_agrees() {
        let direct = {
            let mut sum = 0.0;
            let mut p = 1.0;
            for k in 1..1500 {
                p /= k as f64 / 5000.0 + 1.0;
                sum += p;
            }
            sum + 5000.0 / 1500.0 * p
        };
        assert!((ring_node_age(1500, 5000.0, 1.0, 1.0) - direct).abs() < 1e-9 * direct);
    }

    #[test]
    fn line_corner_edge_cases() {
        assert!((line_corner_age(1, 5.0, 1.0, 1.0) - 5.0).abs() < 1e-15);
        assert!((line_corner_age(2, 2.0, 1.0, 1.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn star_values() {
        assert_eq!(star_node_age(0, 7.0, 1.0, 1.0), 7.0);
        assert!((star_node_age(1, 8.0, 1.0, 1.0) - 6.0).abs() < 1e-12);
        assert_eq!(rd_hundredths(1), 25);
        assert_eq!(rd_hundredths(3), 44);
        assert_eq!(rd_hundredths(22), 75);
    }

    #[test]
    fn rd_is_increasing() {
        for d in 1..200 {
            assert!(rd_coefficient(d + 1) > rd_coefficient(d));
        }
    }

    #[test]
    fn mini_fc_values() {
        let two = mini_fc_age(2, 6.0, 1.0, 1.0);
        assert!((two.per_node - 4.5).abs() < 1e-12);
        let three = mini_fc_age(3, 6.0, 1.0, 1.0);
        assert!((three.per_node - 11.0 / 3.0).abs() < 1e-12);
        assert!((three.total - 29.0).abs() < 1e-12);
        let full = mini_fc_age(7, 7.0, 1.0, 1.0);
        assert!((full.per_node - harmonic(7)).abs() < 1e-12);
        assert!((full.total - 7.0 * harmonic(7)).abs() < 1e-12);
    }
}
