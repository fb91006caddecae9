use std::collections::HashMap;

use super::{ActionId, GenerativeModel, Outcome, ProblemSpec};
use crate::error::{Error, Result};
use crate::pareto::{backup_action_curve, merge_decision_curve, ParetoCurve, Point, Successor};

/// Largest number of `(state, steps)` pairs the backward induction visits.
pub const ORACLE_MAX_ENTRIES: usize = 10_000;

/// Largest vector set kept per unrolled node during enumeration.
const ENUMERATION_MAX_VECTORS: usize = 100_000;

fn dynamics<M: GenerativeModel>(model: &M, state: &M::State, action: ActionId) -> Result<Vec<Outcome<M::State>>> {
    model
        .exact_dynamics(state, action)
        .ok_or_else(|| Error::Unsupported(format!("model has no exact dynamics for {state:?}, action {}", action.0)))
}

/// Exact Pareto curve of `state` with `steps` decisions left, by backward
/// induction over the Bellman equations for Pareto sets.
pub fn exact_pareto_oracle<M: GenerativeModel>(
    model: &M,
    spec: &ProblemSpec,
    state: &M::State,
    steps: usize,
) -> Result<ParetoCurve> {
    let mut memo = HashMap::new();
    oracle_rec(model, spec, state, steps, &mut memo)
}

fn oracle_rec<M: GenerativeModel>(
    model: &M,
    spec: &ProblemSpec,
    state: &M::State,
    steps: usize,
    memo: &mut HashMap<(M::State, usize), ParetoCurve>,
) -> Result<ParetoCurve> {
    if steps == 0 || model.is_terminal(state) {
        return Ok(ParetoCurve::origin());
    }
    if let Some(c) = memo.get(&(state.clone(), steps)) {
        return Ok(c.clone());
    }
    if memo.len() >= ORACLE_MAX_ENTRIES {
        return Err(Error::ResourceLimit(format!("oracle exceeded {ORACLE_MAX_ENTRIES} (state, depth) pairs")));
    }
    let mut action_curves = Vec::new();
    for a in model.actions(state) {
        let outcomes = dynamics(model, state, a)?;
        let mut curves = Vec::with_capacity(outcomes.len());
        for o in &outcomes {
            curves.push(oracle_rec(model, spec, &o.next, steps - 1, memo)?);
        }
        let successors: Vec<Successor<'_>> = outcomes
            .iter()
            .zip(&curves)
            .map(|(o, c)| Successor { prob: o.prob, curve: c, cost: o.cost, reward: o.reward })
            .collect();
        action_curves.push(backup_action_curve(&successors, spec.gamma_c, spec.gamma_r)?);
    }
    let curve = merge_decision_curve(&action_curves)?;
    memo.insert((state.clone(), steps), curve.clone());
    Ok(curve)
}

/// Keeps the points not dominated coordinate-wise by another point.
fn pointwise_frontier(mut points: Vec<Point>) -> Vec<Point> {
    points.sort_by(|a, b| a.cost.total_cmp(&b.cost).then(b.reward.total_cmp(&a.reward)));
    let mut out: Vec<Point> = Vec::with_capacity(points.len());
    for p in points {
        if out.last().map_or(true, |l: &Point| p.reward > l.reward) {
            out.push(p);
        }
    }
    out
}

/// Outcome vectors of every deterministic history-dependent policy over the
/// horizon-unrolled tree from the initial state, minus pointwise-dominated
/// ones. No convex pruning is applied.
///
/// Fails with a resource-limit error when the unrolled tree exceeds
/// `max_nodes` nodes.
pub fn enumerate_policy_vectors<M: GenerativeModel>(
    model: &M,
    spec: &ProblemSpec,
    max_nodes: usize,
) -> Result<Vec<Point>> {
    let init = model.initial_state();
    let mut sizes = HashMap::new();
    let nodes = unrolled_size(model, &init, spec.horizon, max_nodes, &mut sizes)?;
    if nodes > max_nodes {
        return Err(Error::ResourceLimit(format!("unrolled tree has more than {max_nodes} nodes")));
    }
    let mut memo = HashMap::new();
    enumerate_rec(model, spec, &init, spec.horizon, &mut memo)
}

fn unrolled_size<M: GenerativeModel>(
    model: &M,
    state: &M::State,
    steps: usize,
    cap: usize,
    memo: &mut HashMap<(M::State, usize), usize>,
) -> Result<usize> {
    if steps == 0 || model.is_terminal(state) {
        return Ok(1);
    }
    if let Some(&n) = memo.get(&(state.clone(), steps)) {
        return Ok(n);
    }
    let mut n = 1usize;
    for a in model.actions(state) {
        for o in dynamics(model, state, a)? {
            n = n.saturating_add(unrolled_size(model, &o.next, steps - 1, cap, memo)?);
            if n > cap {
                memo.insert((state.clone(), steps), n);
                return Ok(n);
            }
        }
    }
    memo.insert((state.clone(), steps), n);
    Ok(n)
}

fn enumerate_rec<M: GenerativeModel>(
    model: &M,
    spec: &ProblemSpec,
    state: &M::State,
    steps: usize,
    memo: &mut HashMap<(M::State, usize), Vec<Point>>,
) -> Result<Vec<Point>> {
    if steps == 0 || model.is_terminal(state) {
        return Ok(vec![Point::ORIGIN]);
    }
    if let Some(v) = memo.get(&(state.clone(), steps)) {
        return Ok(v.clone());
    }
    let mut all = Vec::new();
    for a in model.actions(state) {
        // Cartesian product over successors: each one picks its own policy.
        let mut acc = vec![Point::ORIGIN];
        for o in dynamics(model, state, a)? {
            let sub = enumerate_rec(model, spec, &o.next, steps - 1, memo)?;
            if acc.len().saturating_mul(sub.len()) > ENUMERATION_MAX_VECTORS {
                return Err(Error::ResourceLimit(format!(
                    "more than {ENUMERATION_MAX_VECTORS} policy vectors at one node"
                )));
            }
            let mut next = Vec::with_capacity(acc.len() * sub.len());
            for p in &acc {
                for q in &sub {
                    next.push(Point::new(
                        p.cost + o.prob * (o.cost + spec.gamma_c * q.cost),
                        p.reward + o.prob * (o.reward + spec.gamma_r * q.reward),
                    ));
                }
            }
            acc = pointwise_frontier(next);
        }
        all.extend(acc);
    }
    let out = pointwise_frontier(all);
    memo.insert((state.clone(), steps), out.clone());
    Ok(out)
}
