use std::collections::VecDeque;

use crate::cmdp::ActionId;
use crate::pareto::{ParetoCurve, Successor};

pub type NodeId = usize;

/// Tally of one observed outcome of an action.
#[derive(Clone, Debug)]
pub struct OutcomeTally<S> {
    pub state: S,
    pub count: u64,
    pub reward: f64,
    pub cost: f64,
    /// True transition probability, when the model exposes it.
    pub exact_prob: Option<f64>,
    pub child: NodeId,
}

#[derive(Clone, Debug)]
pub struct ActionNode<S> {
    pub visits: u64,
    pub curve: ParetoCurve,
    pub outcomes: Vec<OutcomeTally<S>>,
}

impl<S: PartialEq> ActionNode<S> {
    pub fn outcome_index(&self, state: &S) -> Option<usize> {
        self.outcomes.iter().position(|o| &o.state == state)
    }

    /// Estimated transition probabilities over the tallied outcomes: exact
    /// probabilities renormalised over the observed support when known,
    /// empirical frequencies otherwise.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.outcomes.len()).map(self.probability_fn()).collect()
    }

    /// Probability of the `i`-th outcome, hoisting the normaliser.
    fn probability_fn(&self) -> impl Fn(usize) -> f64 + '_ {
        let exact = self.outcomes.iter().all(|o| o.exact_prob.is_some());
        let total = if exact {
            self.outcomes.iter().filter_map(|o| o.exact_prob).sum::<f64>()
        } else {
            self.outcomes.iter().map(|o| o.count).sum::<u64>() as f64
        };
        move |i| {
            let o = &self.outcomes[i];
            match o.exact_prob {
                Some(p) if exact => p / total,
                _ => o.count as f64 / total,
            }
        }
    }

    /// Expected immediate cost under the estimated probabilities.
    pub fn expected_cost(&self) -> f64 {
        self.probabilities().iter().zip(&self.outcomes).map(|(p, o)| p * o.cost).sum()
    }
}

#[derive(Clone, Debug)]
pub struct DecisionNode<S> {
    pub state: S,
    /// Steps taken from the start of the episode.
    pub depth: usize,
    pub terminal: bool,
    pub visits: u64,
    pub curve: ParetoCurve,
    /// Indexed by action; `None` for actions never tried here.
    pub actions: Vec<Option<ActionNode<S>>>,
}

impl<S> DecisionNode<S> {
    pub fn action(&self, a: ActionId) -> Option<&ActionNode<S>> {
        self.actions.get(a.0).and_then(Option::as_ref)
    }

    pub fn tried_actions(&self) -> impl Iterator<Item = (ActionId, &ActionNode<S>)> {
        self.actions.iter().enumerate().filter_map(|(i, a)| a.as_ref().map(|a| (ActionId(i), a)))
    }

    /// Lowest-index action not tried yet. All untried actions have zero
    /// visits, so this is also the least visited one.
    pub fn untried_action(&self) -> Option<ActionId> {
        self.actions.iter().position(Option::is_none).map(ActionId)
    }
}

/// One edge of a root-to-leaf path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathStep {
    pub node: NodeId,
    pub action: ActionId,
    pub outcome: usize,
}

/// Arena-allocated search tree.
#[derive(Clone, Debug)]
pub struct Tree<S> {
    nodes: Vec<DecisionNode<S>>,
    root: NodeId,
}

impl<S: Clone + PartialEq> Tree<S> {
    pub fn new(root: DecisionNode<S>) -> Self {
        Self { nodes: vec![root], root: 0 }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &DecisionNode<S> {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut DecisionNode<S> {
        &mut self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push(&mut self, node: DecisionNode<S>) -> NodeId {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn action(&self, id: NodeId, a: ActionId) -> Option<&ActionNode<S>> {
        self.nodes[id].action(a)
    }

    /// Backup inputs of `(id, a)`: estimated probability, child curve and
    /// immediate values of each tallied outcome.
    pub fn successors(&self, id: NodeId, a: ActionId) -> Vec<Successor<'_>> {
        let an = self.nodes[id].action(a).expect("successors of an untried action");
        let prob = an.probability_fn();
        an.outcomes
            .iter()
            .enumerate()
            .map(|(i, o)| Successor {
                prob: prob(i),
                curve: &self.nodes[o.child].curve,
                cost: o.cost,
                reward: o.reward,
            })
            .collect()
    }

    /// Makes `new_root` the root and drops every node outside its subtree.
    pub fn reroot(&mut self, new_root: NodeId) {
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
        let mut old: Vec<Option<DecisionNode<S>>> = std::mem::take(&mut self.nodes).into_iter().map(Some).collect();
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
}
