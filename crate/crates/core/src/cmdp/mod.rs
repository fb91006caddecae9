//! Constrained MDP abstractions: the generative model interface planners
//! consume, the problem parameters, and exact oracles for small models.

mod oracle;
mod tabular;

pub use oracle::{enumerate_policy_vectors, exact_pareto_oracle, ORACLE_MAX_ENTRIES};
pub use tabular::{RandomCmdpParams, TabularCmdp, TabularOutcome};

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SimRng;

/// Index of an action within the action list of a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ActionId(pub usize);

/// A sampled transition.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition<S> {
    pub next: S,
    pub reward: f64,
    pub cost: f64,
}

/// One support point of an exact transition distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<S> {
    pub next: S,
    pub prob: f64,
    pub reward: f64,
    pub cost: f64,
}

/// Simulator access to a CMDP.
///
/// Rewards and costs are functions of the transition triple. Terminal states
/// are absorbing and pay nothing; planners never query actions there.
pub trait GenerativeModel: Sync {
    type State: Clone + Eq + Hash + Debug + Send + Sync;

    fn initial_state(&self) -> Self::State;

    /// Number of actions available in a non-terminal state; actions are
    /// `ActionId(0..count)`.
    fn action_count(&self, state: &Self::State) -> usize;

    fn actions(&self, state: &Self::State) -> Vec<ActionId> {
        (0..self.action_count(state)).map(ActionId).collect()
    }

    fn sample(&self, state: &Self::State, action: ActionId, rng: &mut SimRng) -> Result<Transition<Self::State>>;

    fn is_terminal(&self, state: &Self::State) -> bool;

    /// Full transition distribution, when the model knows it.
    fn exact_dynamics(&self, _state: &Self::State, _action: ActionId) -> Option<Vec<Outcome<Self::State>>> {
        None
    }

    /// Largest cost any single transition can incur.
    fn max_step_cost(&self) -> f64;
}

/// Horizon, discounts and the cost constraint of a planning problem.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub horizon: usize,
    pub gamma_r: f64,
    pub gamma_c: f64,
    pub threshold: f64,
    /// Upper bound on the accumulated cost of any trajectory.
    pub cost_bound: f64,
}

impl ProblemSpec {
    /// Derives the cost bound as `horizon × max_step_cost` of the model.
    pub fn for_model<M: GenerativeModel>(
        model: &M,
        horizon: usize,
        gamma_r: f64,
        gamma_c: f64,
        threshold: f64,
    ) -> Result<Self> {
        let max_cost = model.max_step_cost();
        if !max_cost.is_finite() || max_cost < 0.0 {
            return Err(Error::Config(format!("model declares unusable max step cost {max_cost}")));
        }
        let spec = Self { horizon, gamma_r, gamma_c, threshold, cost_bound: horizon as f64 * max_cost };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        for (name, g) in [("gamma_r", self.gamma_r), ("gamma_c", self.gamma_c)] {
            if !(g > 0.0 && g <= 1.0) {
                return Err(Error::Config(format!("{name} = {g} outside (0, 1]")));
            }
        }
        if !(self.threshold >= 0.0) || !self.threshold.is_finite() {
            return Err(Error::Config(format!("threshold {} must be a nonnegative real", self.threshold)));
        }
        if !(self.cost_bound >= 0.0) || !self.cost_bound.is_finite() {
            return Err(Error::Config(format!("cost bound {} must be a nonnegative real", self.cost_bound)));
        }
        Ok(())
    }
}

/// Alternating state/action sequence, starting and ending in a state.
#[derive(Clone, Debug, PartialEq)]
pub struct History<S> {
    states: Vec<S>,
    actions: Vec<ActionId>,
}

impl<S: Clone> History<S> {
    pub fn new(initial: S) -> Self {
        Self { states: vec![initial], actions: Vec::new() }
    }

    pub fn push(&mut self, action: ActionId, next: S) {
        self.actions.push(action);
        self.states.push(next);
    }

    /// Number of actions taken.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn last_state(&self) -> &S {
        self.states.last().expect("history always holds a state")
    }

    pub fn states(&self) -> &[S] {
        &self.states
    }

    pub fn actions(&self) -> &[ActionId] {
        &self.actions
    }
}
