use std::time::Instant;

use rand::Rng;

use super::config::PlannerConfig;
use super::select::{alpha, exploration_bonus, get_action_dist, ActionEntry, ActionMixture};
use super::threshold::{update_threshold, ObservedOutcome, ThresholdUpdate};
use super::tree::{ActionNode, DecisionNode, NodeId, OutcomeTally, PathStep, Tree};
use crate::cmdp::{ActionId, GenerativeModel, ProblemSpec, Transition};
use crate::error::{Error, Result};
use crate::pareto::{backup_action_curve, merge_decision_curve, prune, ParetoCurve, Point};
use crate::record::{RunRecord, StepTrace};
use crate::{episode_rngs, SimRng};

/// `prune({(c, r), (0, 0)})`: a rollout estimate made cost-optimistic.
pub fn rollout_curve(cost: f64, reward: f64) -> ParetoCurve {
    prune(&[Point::new(cost, reward), Point::ORIGIN]).expect("two finite points")
}

/// Result of a tree descent.
#[derive(Clone, Debug)]
pub struct Leaf<S> {
    pub node: NodeId,
    pub path: Vec<PathStep>,
    /// Fresh transition drawn at `node` whose outcome has no child yet.
    pub pending: Option<(ActionId, Transition<S>)>,
}

/// Search state of one Threshold UCT planner.
pub struct ThresholdUct<'m, M: GenerativeModel> {
    model: &'m M,
    spec: ProblemSpec,
    config: PlannerConfig,
    tree: Tree<M::State>,
}

impl<'m, M: GenerativeModel> ThresholdUct<'m, M> {
    pub fn new(model: &'m M, spec: ProblemSpec, config: PlannerConfig) -> Result<Self> {
        spec.validate()?;
        config.validate()?;
        let root = Self::make_root(model, model.initial_state(), 0);
        Ok(Self { model, spec, config, tree: Tree::new(root) })
    }

    fn make_node(model: &M, state: M::State, depth: usize) -> DecisionNode<M::State> {
        let terminal = model.is_terminal(&state);
        let n = if terminal { 0 } else { model.action_count(&state) };
        DecisionNode { state, depth, terminal, visits: 0, curve: ParetoCurve::origin(), actions: vec![None; n] }
    }

    /// Roots never pass through propagation as a leaf; they start with the
    /// visit a leaf would have received.
    fn make_root(model: &M, state: M::State, depth: usize) -> DecisionNode<M::State> {
        DecisionNode { visits: 1, ..Self::make_node(model, state, depth) }
    }

    pub fn tree(&self) -> &Tree<M::State> {
        &self.tree
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    fn is_leaf(&self, id: NodeId) -> bool {
        let n = self.tree.node(id);
        n.terminal || n.depth >= self.spec.horizon || n.untried_action().is_some()
    }

    /// Tried actions of a node with their exploration bonuses scaled by `e`.
    fn entries(&self, id: NodeId, e: f64) -> Vec<ActionEntry<'_>> {
        let node = self.tree.node(id);
        let a = alpha(node.tried_actions().map(|(_, an)| &an.curve));
        node.tried_actions()
            .map(|(action, an)| ActionEntry {
                action,
                curve: &an.curve,
                bonus: e * exploration_bonus(self.config.exploration, a, node.visits, an.visits),
            })
            .collect()
    }

    pub fn action_dist(&self, id: NodeId, threshold: f64, explore: bool) -> Result<ActionMixture> {
        get_action_dist(&self.entries(id, if explore { 1.0 } else { 0.0 }), threshold)
    }

    /// Threshold update at node `id` after playing `action` and seeing `next`.
    pub fn threshold_update(
        &self,
        id: NodeId,
        threshold: f64,
        mixture: &ActionMixture,
        action: ActionId,
        next: &M::State,
        cost: f64,
    ) -> Result<ThresholdUpdate> {
        let an = self
            .tree
            .action(id, action)
            .ok_or_else(|| Error::InvalidState(format!("action {} was never expanded", action.0)))?;
        let outcome = match an.outcome_index(next) {
            Some(i) => ObservedOutcome::Tallied(i),
            None => ObservedOutcome::Unexpanded { cost },
        };
        update_threshold(threshold, mixture, action, outcome, &self.tree.successors(id, action), &self.spec)
    }

    /// Descends from the root, sampling actions from the exploring threshold
    /// mixture and outcomes from the model, until a leaf or an unseen outcome.
    pub fn get_leaf(&self, threshold: f64, rng: &mut SimRng) -> Result<Leaf<M::State>> {
        let mut id = self.tree.root();
        let mut thr = threshold;
        let mut path = Vec::new();
        while !self.is_leaf(id) {
            let sigma = self.action_dist(id, thr, true)?;
            let a = sigma.sample(rng);
            let tr = self.model.sample(&self.tree.node(id).state, a, rng)?;
            let an = self.tree.action(id, a).expect("sampled actions are expanded");
            match an.outcome_index(&tr.next) {
                Some(outcome) => {
                    thr = self.threshold_update(id, thr, &sigma, a, &tr.next, tr.cost)?.value;
                    path.push(PathStep { node: id, action: a, outcome });
                    id = an.outcomes[outcome].child;
                }
                None => return Ok(Leaf { node: id, path, pending: Some((a, tr)) }),
            }
        }
        Ok(Leaf { node: id, path, pending: None })
    }

    fn exact_prob(&self, state: &M::State, a: ActionId, next: &M::State) -> Result<Option<f64>> {
        if !self.config.exact_dynamics {
            return Ok(None);
        }
        let outcomes = self
            .model
            .exact_dynamics(state, a)
            .ok_or_else(|| Error::Unsupported("exact dynamics requested but the model has none".into()))?;
        let p: f64 = outcomes.iter().filter(|o| &o.next == next).map(|o| o.prob).sum();
        if p <= 0.0 {
            return Err(Error::InvalidState(format!("sampled outcome {next:?} has zero exact probability")));
        }
        Ok(Some(p))
    }

    /// Adds one child below `leaf`: for the pending transition if the descent
    /// stopped on an unseen outcome, otherwise for a fresh transition of the
    /// lowest-index untried action.
    pub fn expand(&mut self, leaf: &mut Leaf<M::State>, rng: &mut SimRng) -> Result<NodeId> {
        let id = leaf.node;
        let (a, tr) = match leaf.pending.take() {
            Some(p) => p,
            None => {
                let node = self.tree.node(id);
                if node.terminal {
                    return Err(Error::InvalidState("cannot expand a terminal node".into()));
                }
                if node.depth >= self.spec.horizon {
                    return Err(Error::InvalidState("cannot expand a node at the horizon".into()));
                }
                let a = node.untried_action().ok_or_else(|| Error::InvalidState("node is fully expanded".into()))?;
                let tr = self.model.sample(&node.state, a, rng)?;
                (a, tr)
            }
        };
        let parent_state = self.tree.node(id).state.clone();
        let exact_prob = self.exact_prob(&parent_state, a, &tr.next)?;
        let depth = self.tree.node(id).depth + 1;
        let child = self.tree.push(Self::make_node(self.model, tr.next.clone(), depth));
        let slot = &mut self.tree.node_mut(id).actions[a.0];
        let an =
            slot.get_or_insert_with(|| ActionNode { visits: 0, curve: ParetoCurve::origin(), outcomes: Vec::new() });
        an.outcomes.push(OutcomeTally {
            state: tr.next,
            count: 0,
            reward: tr.reward,
            cost: tr.cost,
            exact_prob,
            child,
        });
        leaf.path.push(PathStep { node: id, action: a, outcome: an.outcomes.len() - 1 });
        leaf.node = child;
        Ok(child)
    }

    /// Default-policy estimate of a node: uniform random actions up to the
    /// horizon or the rollout cap.
    pub fn rollout(&self, id: NodeId, rng: &mut SimRng) -> Result<ParetoCurve> {
        let node = self.tree.node(id);
        if node.terminal {
            return Ok(ParetoCurve::origin());
        }
        let mut steps = self.spec.horizon.saturating_sub(node.depth);
        if let Some(cap) = self.config.rollout_depth {
            steps = steps.min(cap);
        }
        let (mut c, mut r) = (0.0, 0.0);
        let (mut gc, mut gr) = (1.0, 1.0);
        let mut state = node.state.clone();
        for _ in 0..steps {
            if self.model.is_terminal(&state) {
                break;
            }
            let a = ActionId(rng.gen_range(0..self.model.action_count(&state)));
            let tr = self.model.sample(&state, a, rng)?;
            c += gc * tr.cost;
            r += gr * tr.reward;
            gc *= self.spec.gamma_c;
            gr *= self.spec.gamma_r;
            state = tr.next;
        }
        Ok(rollout_curve(c, r))
    }

    /// Installs `leaf_curve` at the end of `path` and recomputes every curve
    /// and visit count on the way back to the root.
    pub fn propagate(&mut self, path: &[PathStep], leaf: NodeId, leaf_curve: ParetoCurve) -> Result<()> {
        {
            let n = self.tree.node_mut(leaf);
            n.curve = leaf_curve;
            n.visits += 1;
        }
        for step in path.iter().rev() {
            {
                let an = self.tree.node_mut(step.node).actions[step.action.0].as_mut().expect("path actions exist");
                an.visits += 1;
                an.outcomes[step.outcome].count += 1;
            }
            let mut curve = backup_action_curve(
                &self.tree.successors(step.node, step.action),
                self.spec.gamma_c,
                self.spec.gamma_r,
            )?;
            if self.config.simplify_eps > 0.0 {
                curve = curve.simplified(self.config.simplify_eps);
            }
            let node = self.tree.node_mut(step.node);
            node.actions[step.action.0].as_mut().expect("path actions exist").curve = curve;
            node.visits += 1;
            node.curve = merge_decision_curve(node.actions.iter().flatten().map(|a| &a.curve))?;
        }
        Ok(())
    }

    /// One search iteration: descend, expand, roll out, propagate.
    pub fn iterate(&mut self, threshold: f64, rng: &mut SimRng) -> Result<()> {
        let mut leaf = self.get_leaf(threshold, rng)?;
        let node = self.tree.node(leaf.node);
        let closed = leaf.pending.is_none() && (node.terminal || node.depth >= self.spec.horizon);
        let curve = if closed {
            ParetoCurve::origin()
        } else {
            let child = self.expand(&mut leaf, rng)?;
            self.rollout(child, rng)?
        };
        self.propagate(&leaf.path, leaf.node, curve)
    }

    /// Runs iterations until the configured budget is spent; returns the
    /// iteration count.
    pub fn search(&mut self, threshold: f64, rng: &mut SimRng) -> Result<usize> {
        let start = Instant::now();
        let mut n = 0;
        while !self.config.budget.exhausted(n, start.elapsed()) {
            self.iterate(threshold, rng)?;
            n += 1;
        }
        Ok(n)
    }

    /// Moves the root to the child reached by `(action, next)`, keeping its
    /// subtree, or to a fresh node if that outcome was never expanded.
    pub fn advance(&mut self, action: ActionId, next: &M::State) {
        let root = self.tree.root();
        let child = self.tree.action(root, action).and_then(|an| an.outcome_index(next).map(|i| an.outcomes[i].child));
        match child {
            Some(c) => self.tree.reroot(c),
            None => {
                let depth = self.tree.node(root).depth + 1;
                self.tree = Tree::new(Self::make_root(self.model, next.clone(), depth));
            }
        }
    }
}

/// Plays one episode with Threshold UCT. The seed determines both the
/// environment and the planner randomness.
pub fn plan_episode<M: GenerativeModel>(
    model: &M,
    spec: &ProblemSpec,
    config: &PlannerConfig,
    seed: u64,
) -> Result<RunRecord> {
    let (mut env_rng, mut rng) = episode_rngs(seed);
    let mut planner = ThresholdUct::new(model, *spec, *config)?;
    let mut threshold = spec.threshold;
    let mut state = model.initial_state();
    let mut trace = Vec::new();
    let start = Instant::now();
    while trace.len() < spec.horizon && !model.is_terminal(&state) {
        let iterations = planner.search(threshold, &mut rng)?;
        let root = planner.tree().root();
        let sigma = planner.action_dist(root, threshold, false)?;
        let a = sigma.sample(&mut rng);
        let tr = model.sample(&state, a, &mut env_rng)?;
        let next_threshold = planner.threshold_update(root, threshold, &sigma, a, &tr.next, tr.cost)?.value;
        trace.push(StepTrace { action: a, reward: tr.reward, cost: tr.cost, threshold, next_threshold, iterations });
        planner.advance(a, &tr.next);
        threshold = next_threshold;
        state = tr.next;
    }
    Ok(RunRecord::from_trace(trace, spec.gamma_r, spec.gamma_c, start.elapsed().as_secs_f64() * 1e3))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::*;
    use crate::cmdp::{exact_pareto_oracle, TabularCmdp};
    use crate::envs::cmdp_a;
    use crate::pareto::hausdorff_distance;

    fn spec_a() -> ProblemSpec {
        ProblemSpec { horizon: 2, gamma_r: 1.0, gamma_c: 1.0, threshold: 0.5, cost_bound: 2.0 }
    }

    #[test]
    fn single_action_chain() {
        let m = TabularCmdp::chain(1, 1.0, 0.0);
        let spec = ProblemSpec::for_model(&m, 1, 1.0, 1.0, 0.0).unwrap();
        let rec = plan_episode(&m, &spec, &PlannerConfig::with_iterations(10), 1).unwrap();
        assert_eq!((rec.payoff, rec.cost, rec.steps), (1.0, 0.0, 1));
    }

    #[test]
    fn unexpanded_root_is_its_own_leaf() {
        let m = cmdp_a();
        let p = ThresholdUct::new(&m, spec_a(), PlannerConfig::default()).unwrap();
        let leaf = p.get_leaf(0.5, &mut SimRng::seed_from_u64(0)).unwrap();
        assert_eq!((leaf.node, leaf.path.len()), (p.tree().root(), 0));
    }

    #[test]
    fn first_expansion_tallies_one_outcome() {
        let m = cmdp_a();
        let mut p = ThresholdUct::new(&m, spec_a(), PlannerConfig::default()).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        p.iterate(0.5, &mut rng).unwrap();
        let an = p.tree().action(0, ActionId(0)).unwrap();
        assert_eq!(an.outcomes.len(), 1);
        assert_eq!((an.visits, an.outcomes[0].count, p.tree().node(0).visits), (1, 1, 2));
        assert_eq!((an.outcomes[0].reward, an.outcomes[0].cost), (0.0, 0.0));
    }

    #[test]
    fn horizon_nodes_cannot_expand() {
        let m = TabularCmdp::self_loop(1.0, 0.0);
        let spec = ProblemSpec::for_model(&m, 1, 1.0, 1.0, 0.0).unwrap();
        let mut p = ThresholdUct::new(&m, spec, PlannerConfig::default()).unwrap();
        let mut rng = SimRng::seed_from_u64(0);
        p.iterate(0.0, &mut rng).unwrap();
        let child = p.tree().action(0, ActionId(0)).unwrap().outcomes[0].child;
        let mut leaf = Leaf { node: child, path: Vec::new(), pending: None };
        assert!(matches!(p.expand(&mut leaf, &mut rng), Err(Error::InvalidState(_))));
    }

    #[test]
    fn rollout_curves() {
        assert_eq!(rollout_curve(0.0, 2.0).vertices(), &[Point::new(0.0, 2.0)]);
        assert_eq!(rollout_curve(1.0, 1.0).vertices(), &[Point::ORIGIN, Point::new(1.0, 1.0)]);
    }

    #[test]
    fn exact_tree_reproduces_oracle() {
        let m = cmdp_a();
        let config = PlannerConfig { exact_dynamics: true, ..PlannerConfig::with_iterations(200) };
        let mut p = ThresholdUct::new(&m, spec_a(), config).unwrap();
        p.search(0.5, &mut SimRng::seed_from_u64(3)).unwrap();
        let oracle = exact_pareto_oracle(&m, &spec_a(), &0, 2).unwrap();
        assert!(hausdorff_distance(&p.tree().node(0).curve, &oracle) < 1e-9, "{}", p.tree().node(0).curve);
    }

    #[test]
    fn respects_threshold_on_counterexample() {
        let m = cmdp_a();
        let config = PlannerConfig::with_iterations(500);
        let n = 300;
        let mean: f64 = (0..n).map(|s| plan_episode(&m, &spec_a(), &config, s).unwrap().cost).sum::<f64>() / n as f64;
        assert!(mean <= 0.6, "mean cost {mean}");
    }
}
