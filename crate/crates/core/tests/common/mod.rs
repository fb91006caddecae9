#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use tuct::cmdp::ActionId;
use tuct::pareto::{backup_action_curve, merge_decision_curve, prune, support, ParetoCurve, Point, Successor};
use tuct::tuct::{get_action_dist, ActionEntry, ActionMixture};

pub fn points(max: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0..2.0f64, 0.0..2.0f64).prop_map(|(c, r)| Point::new(c, r)), 1..max)
}

pub fn curve() -> impl Strategy<Value = ParetoCurve> {
    points(8).prop_map(|p| prune(&p).unwrap())
}

/// Successor curves with immediate costs, rewards and normalised probabilities.
pub fn successors() -> impl Strategy<Value = Vec<(f64, ParetoCurve, f64, f64)>> {
    prop::collection::vec((0.05..1.0f64, curve(), 0.0..1.0f64, 0.0..1.0f64), 1..4).prop_map(|mut v| {
        let total: f64 = v.iter().map(|s| s.0).sum();
        for s in &mut v {
            s.0 /= total;
        }
        v
    })
}

pub fn as_successors(raw: &[(f64, ParetoCurve, f64, f64)]) -> Vec<Successor<'_>> {
    raw.iter().map(|(p, c, cost, reward)| Successor { prob: *p, curve: c, cost: *cost, reward: *reward }).collect()
}

/// Nonnegative `(w_c, w_r)` weight pairs on the quarter circle.
pub fn directions() -> Vec<(f64, f64)> {
    (0..=16)
        .map(|k| {
            let t = k as f64 / 16.0 * std::f64::consts::FRAC_PI_2;
            (t.cos(), t.sin())
        })
        .collect()
}

pub fn check_prune_support(pts: &[Point]) -> Result<(), TestCaseError> {
    let c = prune(pts).unwrap();
    prop_assert!(c.is_valid(), "{c}");
    for (wc, wr) in directions() {
        let (a, b) = (support(pts, wc, wr), c.support(wc, wr));
        prop_assert!((a - b).abs() <= 1e-9, "direction ({wc}, {wr}): points {a}, curve {b}");
    }
    for v in c.vertices() {
        prop_assert!(pts.contains(v), "vertex {v:?} is not an input point");
    }
    Ok(())
}

pub fn check_backup_invariants(
    raw: &[(f64, ParetoCurve, f64, f64)],
    gamma_c: f64,
    gamma_r: f64,
) -> Result<(), TestCaseError> {
    let succ = as_successors(raw);
    let b = backup_action_curve(&succ, gamma_c, gamma_r).unwrap();
    prop_assert!(b.is_valid(), "backup {b}");
    let (c0, r0) = succ.iter().fold((0.0, 0.0), |(c, r), s| {
        (
            c + s.prob * (s.cost + gamma_c * s.curve.min_cost()),
            r + s.prob * (s.reward + gamma_r * s.curve.vertices()[0].reward),
        )
    });
    prop_assert!((b.min_cost() - c0).abs() <= 1e-9 && (b.vertices()[0].reward - r0).abs() <= 1e-9);
    let merged = merge_decision_curve(raw.iter().map(|s| &s.1).chain([&b])).unwrap();
    prop_assert!(merged.is_valid(), "merge {merged}");
    Ok(())
}

/// Curves with bonuses and a threshold inside the shifted cost range.
pub fn mixture_case() -> impl Strategy<Value = (Vec<(ParetoCurve, f64)>, f64)> {
    prop::collection::vec((curve(), prop_oneof![Just(0.0), 0.0..0.5f64]), 1..5).prop_flat_map(|entries| {
        let lo = entries.iter().map(|(c, b)| c.min_cost() - b).fold(f64::INFINITY, f64::min);
        let hi = entries.iter().map(|(c, b)| c.max_cost() - b).fold(f64::NEG_INFINITY, f64::max);
        let t = if hi > lo { (lo..hi).boxed() } else { Just(lo).boxed() };
        (Just(entries), t)
    })
}

pub fn check_mixture_binds(entries: &[(ParetoCurve, f64)], threshold: f64) -> Result<(), TestCaseError> {
    let e: Vec<ActionEntry<'_>> = entries
        .iter()
        .enumerate()
        .map(|(i, (c, b))| ActionEntry { action: ActionId(i), curve: c, bonus: *b })
        .collect();
    match get_action_dist(&e, threshold).unwrap() {
        ActionMixture::Deterministic(a) => prop_assert!(a.0 < entries.len()),
        m @ ActionMixture::Mix { low, sigma_low, cost_low, high, sigma_high, cost_high } => {
            prop_assert!(low != high);
            prop_assert!((0.0..=1.0).contains(&sigma_low) && (sigma_low + sigma_high - 1.0).abs() <= 1e-12);
            prop_assert!(cost_low <= threshold + 1e-9 && threshold <= cost_high + 1e-9);
            let mixed = m.mixed_cost().unwrap();
            prop_assert!((mixed - threshold).abs() <= 1e-9, "mixed cost {mixed} vs threshold {threshold}");
        }
    }
    Ok(())
}
