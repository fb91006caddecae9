use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-sided 95% critical value of the standard normal.
pub const Z_95: f64 = 1.6449;

/// Allowed excess of the expected cost over the threshold in the weak test.
pub const WEAK_SLACK: f64 = 0.05;

/// Aggregates of one configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub config_id: String,
    pub algorithm: String,
    pub delta: f64,
    pub episodes: usize,
    pub r_hat: f64,
    pub c_hat: f64,
    pub cost_std: f64,
    pub payoff_std: f64,
    pub sat_m: bool,
    pub sat_w: bool,
    pub mean_samples: f64,
}

/// `ĉ ≤ Δ` up to rounding.
pub fn sat_mean(c_hat: f64, delta: f64) -> bool {
    c_hat <= delta + 1e-12
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Rejects `E[cost] > Δ + 0.05` with the one-sided normal-approximated
/// t-test at level 0.05.
pub fn sat_weak(costs: &[f64], delta: f64) -> Result<bool> {
    if costs.len() < 2 {
        return Err(Error::InvalidArgument(format!("weak satisfaction needs at least 2 samples, got {}", costs.len())));
    }
    let (mean, std) = mean_std(costs);
    let bound = delta + WEAK_SLACK;
    if std <= 1e-12 {
        return Ok(mean < bound);
    }
    let t = (mean - bound) / (std / (costs.len() as f64).sqrt());
    Ok(t <= -Z_95)
}

/// Summary of one configuration's episodes, in episode order.
pub fn summarize(
    config_id: &str,
    algorithm: &str,
    delta: f64,
    payoffs: &[f64],
    costs: &[f64],
    samples_per_step: &[f64],
) -> Result<MetricsSummary> {
    if payoffs.len() != costs.len() || costs.len() != samples_per_step.len() {
        return Err(Error::InvalidArgument("episode columns differ in length".into()));
    }
    let (r_hat, payoff_std) = mean_std(payoffs);
    let (c_hat, cost_std) = mean_std(costs);
    let (mean_samples, _) = mean_std(samples_per_step);
    Ok(MetricsSummary {
        config_id: config_id.to_string(),
        algorithm: algorithm.to_string(),
        delta,
        episodes: costs.len(),
        r_hat,
        c_hat,
        cost_std,
        payoff_std,
        sat_m: sat_mean(c_hat, delta),
        sat_w: sat_weak(costs, delta)?,
        mean_samples,
    })
}

/// Mean payoffs of the reference algorithm and one baseline over the
/// configurations both satisfy in the weak sense.
#[derive(Clone, Debug, PartialEq)]
pub struct JointComparison {
    pub baseline: String,
    pub configs: Vec<String>,
    /// `None` when the joint set is empty.
    pub reference_payoff: Option<f64>,
    pub baseline_payoff: Option<f64>,
    /// Per-configuration `(reference r̂, baseline r̂)`.
    pub pairs: Vec<(f64, f64)>,
}

/// Pairs `reference` with every other algorithm on shared config ids.
pub fn joint_payoff_comparison(summaries: &[MetricsSummary], reference: &str) -> Vec<JointComparison> {
    let mut baselines: Vec<&str> = Vec::new();
    for s in summaries {
        if s.algorithm != reference && !baselines.contains(&s.algorithm.as_str()) {
            baselines.push(&s.algorithm);
        }
    }
    baselines
        .into_iter()
        .map(|b| {
            let mut configs = Vec::new();
            let mut pairs = Vec::new();
            for base in summaries.iter().filter(|s| s.algorithm == b && s.sat_w) {
                let r = summaries.iter().find(|s| s.algorithm == reference && s.config_id == base.config_id);
                if let Some(r) = r.filter(|r| r.sat_w) {
                    configs.push(base.config_id.clone());
                    pairs.push((r.r_hat, base.r_hat));
                }
            }
            let mean = |f: fn(&(f64, f64)) -> f64| {
                (!pairs.is_empty()).then(|| pairs.iter().map(f).sum::<f64>() / pairs.len() as f64)
            };
            JointComparison {
                baseline: b.to_string(),
                reference_payoff: mean(|p| p.0),
                baseline_payoff: mean(|p| p.1),
                configs,
                pairs,
            }
        })
        .collect()
}

/// Fraction of the algorithm's configurations with `SAT_W`.
pub fn sat_weak_fraction(summaries: &[MetricsSummary], algorithm: &str) -> Option<f64> {
    let own: Vec<_> = summaries.iter().filter(|s| s.algorithm == algorithm).collect();
    (!own.is_empty()).then(|| own.iter().filter(|s| s.sat_w).count() as f64 / own.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(id: &str, alg: &str, r: f64, sat_w: bool) -> MetricsSummary {
        MetricsSummary {
            config_id: id.into(),
            algorithm: alg.into(),
            delta: 0.0,
            episodes: 2,
            r_hat: r,
            c_hat: 0.0,
            cost_std: 0.0,
            payoff_std: 0.0,
            sat_m: true,
            sat_w,
            mean_samples: 0.0,
        }
    }

    #[test]
    fn sat_mean_examples() {
        assert!(sat_mean(0.3, 0.3));
        assert!(!sat_mean(0.31, 0.3));
        assert!(sat_mean(0.0, 0.0));
    }

    #[test]
    fn sat_weak_examples() {
        assert!(sat_weak(&[0.0; 300], 0.0).unwrap());
        assert!(!sat_weak(&[0.2 + 0.2; 300], 0.2).unwrap());
        // mean exactly Δ + 0.05 with positive variance: statistic 0
        let costs: Vec<f64> = (0..300).map(|i| if i % 2 == 0 { 0.0 } else { 0.5 }).collect();
        assert!(!sat_weak(&costs, 0.2).unwrap());
        assert!(sat_weak(&[0.0], 0.0).is_err());
    }

    #[test]
    fn sat_weak_matches_statistic() {
        let costs: Vec<f64> = (0..100).map(|i| if i < 10 { 1.0 } else { 0.0 }).collect();
        let (m, s) = mean_std(&costs);
        let t = (m - 0.15) / (s / 10.0);
        assert_eq!(sat_weak(&costs, 0.1).unwrap(), t <= -Z_95);
    }

    #[test]
    fn joint_comparison_examples() {
        let none = [summary("a", "tuct", 1.0, true), summary("a", "ramcp", 2.0, false)];
        let j = joint_payoff_comparison(&none, "tuct");
        assert_eq!(j.len(), 1);
        assert!(j[0].configs.is_empty() && j[0].reference_payoff.is_none());

        let same = [summary("a", "tuct", 1.5, true), summary("a", "cc", 1.5, true)];
        let j = joint_payoff_comparison(&same, "tuct");
        assert_eq!(j[0].reference_payoff, j[0].baseline_payoff);

        let two = [
            summary("a", "tuct", 3.0, true),
            summary("b", "tuct", 9.0, true),
            summary("a", "cc", 1.0, true),
            summary("b", "cc", 5.0, false),
        ];
        let j = joint_payoff_comparison(&two, "tuct");
        assert_eq!(j[0].configs, vec!["a".to_string()]);
        assert_eq!((j[0].reference_payoff, j[0].baseline_payoff), (Some(3.0), Some(1.0)));
        assert_eq!(sat_weak_fraction(&two, "cc"), Some(0.5));
    }
}
