//! Threshold UCT: Monte Carlo tree search over Pareto curve estimates with
//! threshold-aware action mixing and outcome-sensitive threshold updates.

mod config;
mod planner;
mod select;
mod threshold;
mod tree;

pub use config::{Budget, PlannerConfig};
pub use planner::{plan_episode, rollout_curve, Leaf, ThresholdUct};
pub use select::{alpha, exploration_bonus, get_action_dist, ActionEntry, ActionMixture};
pub use threshold::{actual_threshold, update_threshold, ObservedOutcome, ThresholdUpdate, UpdateCase};
pub use tree::{ActionNode, DecisionNode, NodeId, OutcomeTally, PathStep, Tree};
