//! Probability flows through a sampled search tree.

use super::simplex::{lp_solve, ConstraintKind, LinearProgram, LpOutcome};
use crate::cmdp::{ActionId, ProblemSpec};
use crate::error::{Error, Result};
use crate::pareto::{backup_action_curve, merge_decision_curve, ParetoCurve, Point, Successor};
use crate::tuct::{get_action_dist, ActionEntry, ActionMixture};

#[derive(Clone, Debug, PartialEq)]
pub struct FlowEdge {
    pub prob: f64,
    pub reward: f64,
    pub cost: f64,
    pub child: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowAction {
    pub action: ActionId,
    pub outcomes: Vec<FlowEdge>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowNode {
    pub actions: Vec<FlowAction>,
    /// Estimated (cost, reward) to go, used when no action was tried.
    pub leaf: Point,
}

/// Snapshot of a search tree. Node 0 is the root and every child index is
/// larger than its parent's.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlowTree {
    pub nodes: Vec<FlowNode>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowSolution {
    /// Root action probabilities, summing to one.
    pub distribution: Vec<(ActionId, f64)>,
    /// False when no flow meets the threshold and the min-cost flow was used.
    pub feasible: bool,
    pub cost: f64,
    pub reward: f64,
}

impl FlowTree {
    fn check(&self) -> Result<()> {
        let root = self.nodes.first().ok_or_else(|| Error::InvalidState("empty flow tree".into()))?;
        if root.actions.is_empty() {
            return Err(Error::InvalidState("root has no expanded action".into()));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            for e in n.actions.iter().flat_map(|a| &a.outcomes) {
                if e.child <= i || e.child >= self.nodes.len() {
                    return Err(Error::InvalidArgument(format!("edge {i} -> {} breaks the node order", e.child)));
                }
            }
        }
        Ok(())
    }

    fn depths(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            for e in n.actions.iter().flat_map(|a| &a.outcomes) {
                d[e.child] = d[i] + 1;
            }
        }
        d
    }

    /// Number of flow variables, one per tree edge `(node, action)`.
    pub fn edge_count(&self) -> usize {
        self.nodes.iter().map(|n| n.actions.len()).sum()
    }
}

/// Flow LP over the tree. Returns the program and, per variable, its
/// `(node, action position)`.
pub fn build_flow_lp(
    tree: &FlowTree,
    threshold: Option<f64>,
    spec: &ProblemSpec,
) -> (LinearProgram, Vec<(usize, usize)>, Vec<f64>) {
    let depth = tree.depths();
    let mut vars = Vec::new();
    let mut first_var = vec![usize::MAX; tree.nodes.len()];
    for (i, n) in tree.nodes.iter().enumerate() {
        first_var[i] = vars.len();
        for k in 0..n.actions.len() {
            vars.push((i, k));
        }
    }
    let nv = vars.len();
    let mut reward = vec![0.0; nv];
    let mut cost = vec![0.0; nv];
    for (v, &(i, k)) in vars.iter().enumerate() {
        let (gr, gc) = (spec.gamma_r.powi(depth[i] as i32), spec.gamma_c.powi(depth[i] as i32));
        for e in &tree.nodes[i].actions[k].outcomes {
            let child = &tree.nodes[e.child];
            let (lc, lr) = if child.actions.is_empty() { (child.leaf.cost, child.leaf.reward) } else { (0.0, 0.0) };
            reward[v] += gr * e.prob * (e.reward + spec.gamma_r * lr);
            cost[v] += gc * e.prob * (e.cost + spec.gamma_c * lc);
        }
    }
    let mut lp = LinearProgram::new(reward);
    let mut root = vec![0.0; nv];
    for k in 0..tree.nodes[0].actions.len() {
        root[first_var[0] + k] = 1.0;
    }
    lp.add(root, ConstraintKind::Eq, 1.0);
    for (v, &(i, k)) in vars.iter().enumerate() {
        for e in &tree.nodes[i].actions[k].outcomes {
            let child = &tree.nodes[e.child];
            if child.actions.is_empty() {
                continue;
            }
            let mut row = vec![0.0; nv];
            for kk in 0..child.actions.len() {
                row[first_var[e.child] + kk] = 1.0;
            }
            row[v] = -e.prob;
            lp.add(row, ConstraintKind::Eq, 0.0);
        }
    }
    if let Some(t) = threshold {
        lp.add(cost.clone(), ConstraintKind::Le, t);
    }
    (lp, vars, cost)
}

fn root_distribution(tree: &FlowTree, vars: &[(usize, usize)], x: &[f64]) -> Vec<(ActionId, f64)> {
    let root: Vec<(ActionId, f64)> = vars
        .iter()
        .zip(x)
        .filter(|((i, _), _)| *i == 0)
        .map(|(&(_, k), &v)| (tree.nodes[0].actions[k].action, v.max(0.0)))
        .collect();
    let total: f64 = root.iter().map(|(_, v)| v).sum();
    root.into_iter().map(|(a, v)| (a, v / total)).collect()
}

/// Flow LP solved by the dense simplex.
pub fn solve_flow_dense(tree: &FlowTree, threshold: f64, spec: &ProblemSpec) -> Result<FlowSolution> {
    tree.check()?;
    let (lp, vars, cost) = build_flow_lp(tree, Some(threshold), spec);
    let eval = |x: &[f64], lp: &LinearProgram| {
        let c: f64 = cost.iter().zip(x).map(|(a, b)| a * b).sum();
        let r: f64 = lp.objective.iter().zip(x).map(|(a, b)| a * b).sum();
        (c, r)
    };
    match lp_solve(&lp)? {
        LpOutcome::Optimal { x, .. } => {
            let (c, r) = eval(&x, &lp);
            Ok(FlowSolution { distribution: root_distribution(tree, &vars, &x), feasible: true, cost: c, reward: r })
        }
        LpOutcome::Infeasible => {
            let (mut min_cost, vars, _) = build_flow_lp(tree, None, spec);
            let reward = std::mem::replace(&mut min_cost.objective, cost.iter().map(|c| -c).collect());
            match lp_solve(&min_cost)? {
                LpOutcome::Optimal { x, .. } => {
                    let c: f64 = cost.iter().zip(&x).map(|(a, b)| a * b).sum();
                    let r: f64 = reward.iter().zip(&x).map(|(a, b)| a * b).sum();
                    Ok(FlowSolution {
                        distribution: root_distribution(tree, &vars, &x),
                        feasible: false,
                        cost: c,
                        reward: r,
                    })
                }
                LpOutcome::Infeasible => Err(Error::InvalidState("flow polytope is empty".into())),
            }
        }
    }
}

/// The same optimum computed exactly from the tree's Pareto curves: the
/// flow LP has one side constraint, so its value at `threshold` lies on the
/// root frontier and is reached by mixing at most two root actions.
pub fn solve_flow_structured(tree: &FlowTree, threshold: f64, spec: &ProblemSpec) -> Result<FlowSolution> {
    tree.check()?;
    let n = tree.nodes.len();
    let mut node_curve: Vec<Option<ParetoCurve>> = vec![None; n];
    let mut root_actions: Vec<ParetoCurve> = Vec::new();
    for i in (0..n).rev() {
        let node = &tree.nodes[i];
        if node.actions.is_empty() {
            node_curve[i] = Some(ParetoCurve::singleton(node.leaf));
            continue;
        }
        let mut curves = Vec::with_capacity(node.actions.len());
        for a in &node.actions {
            let succ: Vec<Successor<'_>> = a
                .outcomes
                .iter()
                .map(|e| Successor {
                    prob: e.prob,
                    curve: node_curve[e.child].as_ref().expect("children precede parents in reverse order"),
                    cost: e.cost,
                    reward: e.reward,
                })
                .collect();
            curves.push(backup_action_curve(&succ, spec.gamma_c, spec.gamma_r)?);
        }
        node_curve[i] = Some(merge_decision_curve(&curves)?);
        if i == 0 {
            root_actions = curves;
        }
        for a in &node.actions {
            for e in &a.outcomes {
                node_curve[e.child] = None;
            }
        }
    }
    let root = &tree.nodes[0];
    let entries: Vec<ActionEntry<'_>> = root
        .actions
        .iter()
        .zip(&root_actions)
        .map(|(a, c)| ActionEntry { action: a.action, curve: c, bonus: 0.0 })
        .collect();
    let curve = node_curve[0].take().expect("root curve computed");
    let mixture = get_action_dist(&entries, threshold)?;
    let feasible = threshold >= curve.min_cost();
    let (cost, reward) = if !feasible {
        (curve.min_cost(), curve.min_reward())
    } else if threshold >= curve.max_cost() {
        (curve.max_cost(), curve.max_reward())
    } else {
        (threshold, curve.max_reward_at(threshold).expect("threshold inside the cost range"))
    };
    let distribution = match mixture {
        ActionMixture::Deterministic(a) => vec![(a, 1.0)],
        ActionMixture::Mix { low, sigma_low, high, sigma_high, .. } => vec![(low, sigma_low), (high, sigma_high)],
    };
    Ok(FlowSolution { distribution, feasible, cost, reward })
}

/// Dense simplex for trees with at most `dense_limit` edges, the exact
/// frontier route otherwise.
pub fn solve_flow_lp(tree: &FlowTree, threshold: f64, spec: &ProblemSpec, dense_limit: usize) -> Result<FlowSolution> {
    if tree.edge_count() <= dense_limit {
        solve_flow_dense(tree, threshold, spec)
    } else {
        solve_flow_structured(tree, threshold, spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> ProblemSpec {
        ProblemSpec { horizon: 2, gamma_r: 1.0, gamma_c: 1.0, threshold: 0.5, cost_bound: 2.0 }
    }

    fn edge(child: usize) -> FlowEdge {
        FlowEdge { prob: 1.0, reward: 0.0, cost: 0.0, child }
    }

    /// Root with two actions leading to leaves worth (1, 1) and (0, 0).
    fn two_leaves() -> FlowTree {
        FlowTree {
            nodes: vec![
                FlowNode {
                    actions: vec![
                        FlowAction { action: ActionId(0), outcomes: vec![edge(1)] },
                        FlowAction { action: ActionId(1), outcomes: vec![edge(2)] },
                    ],
                    leaf: Point::ORIGIN,
                },
                FlowNode { actions: vec![], leaf: Point::new(1.0, 1.0) },
                FlowNode { actions: vec![], leaf: Point::new(0.0, 0.0) },
            ],
        }
    }

    fn prob_of(sol: &FlowSolution, a: usize) -> f64 {
        sol.distribution.iter().filter(|(x, _)| x.0 == a).map(|(_, p)| p).sum()
    }

    #[test]
    fn mixes_to_bind_the_constraint() {
        for sol in [
            solve_flow_dense(&two_leaves(), 0.5, &spec()).unwrap(),
            solve_flow_structured(&two_leaves(), 0.5, &spec()).unwrap(),
        ] {
            assert!(sol.feasible);
            assert!((prob_of(&sol, 0) - 0.5).abs() < 1e-9 && (prob_of(&sol, 1) - 0.5).abs() < 1e-9);
            assert!((sol.cost - 0.5).abs() < 1e-9 && (sol.reward - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn slack_and_zero_thresholds() {
        let sol = solve_flow_dense(&two_leaves(), 5.0, &spec()).unwrap();
        assert!((prob_of(&sol, 0) - 1.0).abs() < 1e-9);
        let sol = solve_flow_dense(&two_leaves(), 0.0, &spec()).unwrap();
        assert!((prob_of(&sol, 1) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_threshold_falls_back_to_min_cost() {
        let mut t = two_leaves();
        t.nodes[2].leaf = Point::new(0.4, 0.0);
        let sol = solve_flow_dense(&t, 0.1, &spec()).unwrap();
        assert!(!sol.feasible);
        assert!((prob_of(&sol, 1) - 1.0).abs() < 1e-9 && (sol.cost - 0.4).abs() < 1e-9);
        let s = solve_flow_structured(&t, 0.1, &spec()).unwrap();
        assert!(!s.feasible && (s.cost - 0.4).abs() < 1e-9);
    }

    #[test]
    fn single_action_single_leaf() {
        let t = FlowTree {
            nodes: vec![
                FlowNode {
                    actions: vec![FlowAction { action: ActionId(0), outcomes: vec![edge(1)] }],
                    leaf: Point::ORIGIN,
                },
                FlowNode { actions: vec![], leaf: Point::ORIGIN },
            ],
        };
        assert_eq!(solve_flow_dense(&t, 0.0, &spec()).unwrap().distribution, vec![(ActionId(0), 1.0)]);
    }

    #[test]
    fn empty_root_is_rejected() {
        let t = FlowTree { nodes: vec![FlowNode { actions: vec![], leaf: Point::ORIGIN }] };
        assert!(solve_flow_dense(&t, 0.0, &spec()).is_err());
    }
}
