use rand::Rng;
use rand::SeedableRng;

use super::{ActionId, GenerativeModel, Outcome, Transition};
use crate::error::{Error, Result};
use crate::SimRng;

#[derive(Clone, Debug, PartialEq)]
pub struct TabularOutcome {
    pub next: usize,
    pub prob: f64,
    pub reward: f64,
    pub cost: f64,
}

#[derive(Clone, Debug)]
struct TabularState {
    name: String,
    terminal: bool,
    actions: Vec<Vec<TabularOutcome>>,
}

/// Explicit finite CMDP with known dynamics. States are indices.
#[derive(Clone, Debug)]
pub struct TabularCmdp {
    states: Vec<TabularState>,
    initial: usize,
    max_cost: f64,
}

/// Shape of a randomly generated tabular CMDP.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomCmdpParams {
    pub states: usize,
    pub actions: usize,
    /// Upper bound on successors per state-action pair.
    pub max_successors: usize,
    /// Probability that a transition carries a nonzero cost.
    pub cost_density: f64,
    /// Probability that a non-initial state is terminal.
    pub terminal_prob: f64,
}

impl Default for RandomCmdpParams {
    fn default() -> Self {
        Self { states: 5, actions: 3, max_successors: 2, cost_density: 0.5, terminal_prob: 0.0 }
    }
}

impl TabularCmdp {
    pub fn new(initial: usize) -> Self {
        Self { states: Vec::new(), initial, max_cost: 0.0 }
    }

    /// Adds a state and returns its index.
    pub fn add_state(&mut self, name: impl Into<String>, terminal: bool) -> usize {
        self.states.push(TabularState { name: name.into(), terminal, actions: Vec::new() });
        self.states.len() - 1
    }

    /// Adds an action to `state` with the given outcome distribution.
    pub fn add_action(&mut self, state: usize, outcomes: Vec<TabularOutcome>) -> Result<ActionId> {
        let total: f64 = outcomes.iter().map(|o| o.prob).sum();
        if outcomes.is_empty() || (total - 1.0).abs() > 1e-9 || outcomes.iter().any(|o| o.prob <= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "outcome probabilities of state {state} must be positive and sum to 1"
            )));
        }
        if let Some(o) = outcomes.iter().find(|o| o.next >= self.states.len()) {
            return Err(Error::InvalidArgument(format!("unknown successor state {}", o.next)));
        }
        if let Some(o) = outcomes.iter().find(|o| o.cost < 0.0) {
            return Err(Error::InvalidArgument(format!("negative cost {} is not supported", o.cost)));
        }
        for o in &outcomes {
            self.max_cost = self.max_cost.max(o.cost);
        }
        let st = self.states.get_mut(state).ok_or_else(|| Error::InvalidArgument(format!("unknown state {state}")))?;
        st.actions.push(outcomes);
        Ok(ActionId(st.actions.len() - 1))
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s.name == name)
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.states[state].name
    }

    pub fn outcomes(&self, state: usize, action: ActionId) -> &[TabularOutcome] {
        &self.states[state].actions[action.0]
    }

    /// Deterministic single-action chain of `length` steps ending in a
    /// terminal state.
    pub fn chain(length: usize, reward: f64, cost: f64) -> Self {
        let mut m = TabularCmdp::new(0);
        for i in 0..=length {
            m.add_state(format!("c{i}"), i == length);
        }
        for i in 0..length {
            m.add_action(i, vec![TabularOutcome { next: i + 1, prob: 1.0, reward, cost }])
                .expect("chain outcomes are valid");
        }
        m
    }

    /// One non-terminal state looping onto itself under a single action.
    pub fn self_loop(reward: f64, cost: f64) -> Self {
        let mut m = TabularCmdp::new(0);
        m.add_state("s", false);
        m.add_action(0, vec![TabularOutcome { next: 0, prob: 1.0, reward, cost }]).expect("loop outcome is valid");
        m
    }

    /// Random CMDP with rewards in `[0, 1]` and costs in `{0} ∪ (0, 1]`.
    /// State 0 is initial.
    pub fn random(params: RandomCmdpParams, seed: u64) -> Self {
        let mut rng = SimRng::seed_from_u64(seed);
        let n = params.states.max(1);
        let mut m = TabularCmdp::new(0);
        for s in 0..n {
            let terminal = s > 0 && rng.gen_bool(params.terminal_prob.clamp(0.0, 1.0));
            m.add_state(format!("s{s}"), terminal);
        }
        for s in 0..n {
            if m.states[s].terminal {
                continue;
            }
            for _ in 0..params.actions.max(1) {
                let k = rng.gen_range(1..=params.max_successors.clamp(1, n));
                let mut targets: Vec<usize> = (0..n).collect();
                // partial Fisher-Yates for k distinct successors
                for i in 0..k {
                    let j = rng.gen_range(i..n);
                    targets.swap(i, j);
                }
                let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
                let total: f64 = weights.iter().sum();
                let mut outcomes: Vec<TabularOutcome> = targets[..k]
                    .iter()
                    .zip(&weights)
                    .map(|(&t, &w)| {
                        let reward = (rng.gen_range(0.0..1.0f64) * 100.0).round() / 100.0;
                        let cost = if rng.gen_bool(params.cost_density.clamp(0.0, 1.0)) {
                            (rng.gen_range(0.01..1.0f64) * 100.0).round() / 100.0
                        } else {
                            0.0
                        };
                        TabularOutcome { next: t, prob: w / total, reward, cost }
                    })
                    .collect();
                // fix rounding so the distribution sums to one exactly enough
                let rest: f64 = outcomes[1..].iter().map(|o| o.prob).sum();
                outcomes[0].prob = 1.0 - rest;
                m.add_action(s, outcomes).expect("generated outcomes are valid");
            }
        }
        m
    }
}

impl GenerativeModel for TabularCmdp {
    type State = usize;

    fn initial_state(&self) -> usize {
        self.initial
    }

    fn action_count(&self, state: &usize) -> usize {
        self.states[*state].actions.len()
    }

    fn sample(&self, state: &usize, action: ActionId, rng: &mut SimRng) -> Result<Transition<usize>> {
        let outcomes = self
            .states
            .get(*state)
            .and_then(|s| s.actions.get(action.0))
            .ok_or_else(|| Error::InvalidArgument(format!("action {} not available in state {state}", action.0)))?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for o in outcomes {
            acc += o.prob;
            if u < acc {
                return Ok(Transition { next: o.next, reward: o.reward, cost: o.cost });
            }
        }
        let o = outcomes.last().expect("actions have outcomes");
        Ok(Transition { next: o.next, reward: o.reward, cost: o.cost })
    }

    fn is_terminal(&self, state: &usize) -> bool {
        let s = &self.states[*state];
        s.terminal || s.actions.is_empty()
    }

    fn exact_dynamics(&self, state: &usize, action: ActionId) -> Option<Vec<Outcome<usize>>> {
        let outcomes = self.states.get(*state)?.actions.get(action.0)?;
        Some(outcomes.iter().map(|o| Outcome { next: o.next, prob: o.prob, reward: o.reward, cost: o.cost }).collect())
    }

    fn max_step_cost(&self) -> f64 {
        self.max_cost
    }
}
