//! Single-valued UCT over a Lagrangian scalarisation `Q_r − λ·Q_c`.

use std::collections::VecDeque;

use rand::Rng;

use super::flow::{FlowAction, FlowEdge, FlowNode, FlowTree};
use crate::cmdp::{ActionId, GenerativeModel, ProblemSpec};
use crate::error::{Error, Result};
use crate::pareto::Point;
use crate::tuct::{exploration_bonus, PlannerConfig};
use crate::SimRng;

#[derive(Clone, Debug)]
pub struct ScalarOutcome<S> {
    pub state: S,
    pub count: u64,
    pub reward: f64,
    pub cost: f64,
    pub exact_prob: Option<f64>,
    pub child: usize,
}

/// Running means of the returns observed after playing an action.
#[derive(Clone, Debug)]
pub struct ScalarAction<S> {
    pub visits: u64,
    pub q_reward: f64,
    pub q_cost: f64,
    pub outcomes: Vec<ScalarOutcome<S>>,
}

impl<S> ScalarAction<S> {
    pub fn scalarized(&self, lambda: f64) -> f64 {
        self.q_reward - lambda * self.q_cost
    }

    pub fn probabilities(&self) -> Vec<f64> {
        let exact: Option<Vec<f64>> = self.outcomes.iter().map(|o| o.exact_prob).collect();
        match exact {
            Some(p) => {
                let total: f64 = p.iter().sum();
                p.into_iter().map(|x| x / total).collect()
            }
            None => {
                let n: u64 = self.outcomes.iter().map(|o| o.count).sum();
                self.outcomes.iter().map(|o| o.count as f64 / n as f64).collect()
            }
        }
    }

    pub fn expected_cost(&self) -> f64 {
        self.probabilities().iter().zip(&self.outcomes).map(|(p, o)| p * o.cost).sum()
    }
}

#[derive(Clone, Debug)]
pub struct ScalarNode<S> {
    pub state: S,
    pub depth: usize,
    pub terminal: bool,
    pub visits: u64,
    pub actions: Vec<Option<ScalarAction<S>>>,
    /// Most recent rollout estimate (cost, reward) from this node.
    pub rollout: Point,
    /// Span of the returns seen through this node.
    reward_span: (f64, f64),
    cost_span: (f64, f64),
}

impl<S> ScalarNode<S> {
    pub fn action(&self, a: ActionId) -> Option<&ScalarAction<S>> {
        self.actions.get(a.0).and_then(Option::as_ref)
    }

    pub fn tried_actions(&self) -> impl Iterator<Item = (ActionId, &ScalarAction<S>)> {
        self.actions.iter().enumerate().filter_map(|(i, a)| a.as_ref().map(|a| (ActionId(i), a)))
    }

    /// Scale of the scalarised value, `max(reward span, λ·cost span)`.
    pub fn alpha(&self, lambda: f64) -> f64 {
        let r = self.reward_span.1 - self.reward_span.0;
        let c = self.cost_span.1 - self.cost_span.0;
        r.max(lambda * c).max(1e-6)
    }

    /// Tried action maximising `Q_r − λ·Q_c`, ties to the lowest index.
    pub fn greedy(&self, lambda: f64) -> Option<ActionId> {
        let mut best: Option<(ActionId, f64)> = None;
        for (a, an) in self.tried_actions() {
            let v = an.scalarized(lambda);
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((a, v));
            }
        }
        best.map(|(a, _)| a)
    }
}

/// Search tree shared by the Lagrangian and the payoff-only baselines.
pub struct ScalarUct<'m, M: GenerativeModel> {
    model: &'m M,
    spec: ProblemSpec,
    config: PlannerConfig,
    nodes: Vec<ScalarNode<M::State>>,
    root: usize,
}

impl<'m, M: GenerativeModel> ScalarUct<'m, M> {
    pub fn new(model: &'m M, spec: ProblemSpec, config: PlannerConfig) -> Result<Self> {
        spec.validate()?;
        config.validate()?;
        let mut root = Self::make_node(model, model.initial_state(), 0);
        root.visits = 1;
        Ok(Self { model, spec, config, nodes: vec![root], root: 0 })
    }

    fn make_node(model: &M, state: M::State, depth: usize) -> ScalarNode<M::State> {
        let terminal = model.is_terminal(&state);
        let n = if terminal { 0 } else { model.action_count(&state) };
        ScalarNode {
            state,
            depth,
            terminal,
            visits: 0,
            actions: vec![None; n],
            rollout: Point::ORIGIN,
            reward_span: (f64::INFINITY, f64::NEG_INFINITY),
            cost_span: (f64::INFINITY, f64::NEG_INFINITY),
        }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, id: usize) -> &ScalarNode<M::State> {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn select(&self, id: usize, lambda: f64) -> ActionId {
        let node = &self.nodes[id];
        let alpha = node.alpha(lambda);
        let mut best: Option<(ActionId, f64)> = None;
        for (a, an) in node.tried_actions() {
            let v = an.scalarized(lambda) + exploration_bonus(self.config.exploration, alpha, node.visits, an.visits);
            if best.map_or(true, |(_, b)| v > b) {
                best = Some((a, v));
            }
        }
        best.expect("selection needs a tried action").0
    }

    fn rollout(&self, state: &M::State, depth: usize, rng: &mut SimRng) -> Result<Point> {
        let mut steps = self.spec.horizon.saturating_sub(depth);
        if let Some(cap) = self.config.rollout_depth {
            steps = steps.min(cap);
        }
        let (mut c, mut r, mut gc, mut gr) = (0.0, 0.0, 1.0, 1.0);
        let mut s = state.clone();
        for _ in 0..steps {
            if self.model.is_terminal(&s) {
                break;
            }
            let a = ActionId(rng.gen_range(0..self.model.action_count(&s)));
            let tr = self.model.sample(&s, a, rng)?;
            c += gc * tr.cost;
            r += gr * tr.reward;
            gc *= self.spec.gamma_c;
            gr *= self.spec.gamma_r;
            s = tr.next;
        }
        Ok(Point::new(c, r))
    }

    fn exact_prob(&self, state: &M::State, a: ActionId, next: &M::State) -> Result<Option<f64>> {
        if !self.config.exact_dynamics {
            return Ok(None);
        }
        let outcomes = self
            .model
            .exact_dynamics(state, a)
            .ok_or_else(|| Error::Unsupported("exact dynamics requested but the model has none".into()))?;
        Ok(Some(outcomes.iter().filter(|o| &o.next == next).map(|o| o.prob).sum()))
    }

    /// One iteration: UCT descent under `λ`, expansion of one node, a
    /// rollout, and a backup of the sampled discounted returns.
    pub fn iterate(&mut self, lambda: f64, rng: &mut SimRng) -> Result<()> {
        let mut id = self.root;
        let mut path: Vec<(usize, ActionId, usize)> = Vec::new();
        let leaf_value;
        loop {
            let node = &self.nodes[id];
            if node.terminal || node.depth >= self.spec.horizon {
                leaf_value = Point::ORIGIN;
                break;
            }
            let untried = node.actions.iter().position(Option::is_none).map(ActionId);
            let a = untried.unwrap_or_else(|| self.select(id, lambda));
            let tr = self.model.sample(&node.state, a, rng)?;
            if let Some(o) = node.action(a).and_then(|an| an.outcomes.iter().position(|o| o.state == tr.next)) {
                path.push((id, a, o));
                id = node.action(a).expect("checked above").outcomes[o].child;
                continue;
            }
            let exact_prob = self.exact_prob(&node.state, a, &tr.next)?;
            let depth = node.depth + 1;
            let value = self.rollout(&tr.next, depth, rng)?;
            let mut child = Self::make_node(self.model, tr.next.clone(), depth);
            child.rollout = if child.terminal { Point::ORIGIN } else { value };
            let child_value = child.rollout;
            self.nodes.push(child);
            let child_id = self.nodes.len() - 1;
            let an = self.nodes[id].actions[a.0].get_or_insert_with(|| ScalarAction {
                visits: 0,
                q_reward: 0.0,
                q_cost: 0.0,
                outcomes: Vec::new(),
            });
            an.outcomes.push(ScalarOutcome {
                state: tr.next,
                count: 0,
                reward: tr.reward,
                cost: tr.cost,
                exact_prob,
                child: child_id,
            });
            path.push((id, a, an.outcomes.len() - 1));
            id = child_id;
            leaf_value = child_value;
            break;
        }
        self.nodes[id].visits += 1;
        let (mut c, mut r) = (leaf_value.cost, leaf_value.reward);
        for &(nid, a, o) in path.iter().rev() {
            let node = &mut self.nodes[nid];
            node.visits += 1;
            let an = node.actions[a.0].as_mut().expect("path actions exist");
            let out = &mut an.outcomes[o];
            out.count += 1;
            c = out.cost + self.spec.gamma_c * c;
            r = out.reward + self.spec.gamma_r * r;
            an.visits += 1;
            let n = an.visits as f64;
            an.q_reward += (r - an.q_reward) / n;
            an.q_cost += (c - an.q_cost) / n;
            node.reward_span = (node.reward_span.0.min(r), node.reward_span.1.max(r));
            node.cost_span = (node.cost_span.0.min(c), node.cost_span.1.max(c));
        }
        Ok(())
    }

    /// Moves the root to the child reached by `(action, next)`.
    pub fn advance(&mut self, action: ActionId, next: &M::State) {
        let root = &self.nodes[self.root];
        let child = root.action(action).and_then(|an| an.outcomes.iter().find(|o| &o.state == next).map(|o| o.child));
        match child {
            Some(c) => self.reroot(c),
            None => {
                let mut n = Self::make_node(self.model, next.clone(), root.depth + 1);
                n.visits = 1;
                self.nodes = vec![n];
                self.root = 0;
            }
        }
    }

    fn reroot(&mut self, new_root: usize) {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([new_root]);
        while let Some(id) = queue.pop_front() {
            remap[id] = order.len();
            order.push(id);
            for an in self.nodes[id].actions.iter().flatten() {
                queue.extend(an.outcomes.iter().map(|o| o.child));
            }
        }
        let mut old: Vec<Option<ScalarNode<M::State>>> =
            std::mem::take(&mut self.nodes).into_iter().map(Some).collect();
        self.nodes = order
            .iter()
            .map(|&id| {
                let mut n = old[id].take().expect("tree nodes have one parent");
                for an in n.actions.iter_mut().flatten() {
                    for o in &mut an.outcomes {
                        o.child = remap[o.child];
                    }
                }
                n
            })
            .collect();
        self.root = 0;
    }

    /// Snapshot of the subtree under the root for the flow LP, in BFS order.
    pub fn flow_tree(&self) -> FlowTree {
        let mut index = vec![usize::MAX; self.nodes.len()];
        let mut order = vec![self.root];
        index[self.root] = 0;
        let mut k = 0;
        while k < order.len() {
            let id = order[k];
            for an in self.nodes[id].actions.iter().flatten() {
                for o in &an.outcomes {
                    index[o.child] = order.len();
                    order.push(o.child);
                }
            }
            k += 1;
        }
        let nodes = order
            .iter()
            .map(|&id| {
                let n = &self.nodes[id];
                FlowNode {
                    actions: n
                        .tried_actions()
                        .map(|(a, an)| FlowAction {
                            action: a,
                            outcomes: an
                                .probabilities()
                                .into_iter()
                                .zip(&an.outcomes)
                                .map(|(prob, o)| FlowEdge {
                                    prob,
                                    reward: o.reward,
                                    cost: o.cost,
                                    child: index[o.child],
                                })
                                .collect(),
                        })
                        .collect(),
                    leaf: n.rollout,
                }
            })
            .collect();
        FlowTree { nodes }
    }
}
