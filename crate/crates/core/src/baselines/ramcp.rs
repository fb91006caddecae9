use std::time::Instant;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::flow::solve_flow_lp;
use super::scalar::ScalarUct;
use crate::cmdp::{ActionId, GenerativeModel, ProblemSpec};
use crate::error::{Error, Result};
use crate::record::{RunRecord, StepTrace};
use crate::tuct::PlannerConfig;
use crate::{episode_rngs, SimRng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RamcpConfig {
    pub search: PlannerConfig,
    /// Trees with at most this many edges go through the dense simplex;
    /// larger ones use the exact frontier solver.
    pub dense_lp_limit: usize,
}

impl Default for RamcpConfig {
    fn default() -> Self {
        Self { search: PlannerConfig::default(), dense_lp_limit: 200 }
    }
}

fn sample_distribution(dist: &[(ActionId, f64)], rng: &mut SimRng) -> Result<ActionId> {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for &(a, p) in dist {
        acc += p;
        if u < acc {
            return Ok(a);
        }
    }
    dist.iter()
        .rev()
        .find(|(_, p)| *p > 0.0)
        .map(|(a, _)| *a)
        .ok_or_else(|| Error::InvalidState("empty root distribution".into()))
}

fn search<M: GenerativeModel>(tree: &mut ScalarUct<'_, M>, config: &PlannerConfig, rng: &mut SimRng) -> Result<usize> {
    let start = Instant::now();
    let mut n = 0;
    while !config.budget.exhausted(n, start.elapsed()) {
        tree.iterate(0.0, rng)?;
        n += 1;
    }
    Ok(n)
}

/// Payoff-only UCT followed by the tree-flow program at every decision; the
/// threshold only loses the incurred cost.
pub fn ramcp_plan_episode<M: GenerativeModel>(
    model: &M,
    spec: &ProblemSpec,
    config: &RamcpConfig,
    seed: u64,
) -> Result<RunRecord> {
    let (mut env_rng, mut rng) = episode_rngs(seed);
    let mut tree = ScalarUct::new(model, *spec, config.search)?;
    let mut threshold = spec.threshold;
    let mut state = model.initial_state();
    let mut trace = Vec::new();
    let start = Instant::now();
    while trace.len() < spec.horizon && !model.is_terminal(&state) {
        let iterations = search(&mut tree, &config.search, &mut rng)?;
        let flow = solve_flow_lp(&tree.flow_tree(), threshold, spec, config.dense_lp_limit)?;
        let a = sample_distribution(&flow.distribution, &mut rng)?;
        let tr = model.sample(&state, a, &mut env_rng)?;
        let next_threshold = (threshold - tr.cost) / spec.gamma_c;
        trace.push(StepTrace { action: a, reward: tr.reward, cost: tr.cost, threshold, next_threshold, iterations });
        tree.advance(a, &tr.next);
        threshold = next_threshold;
        state = tr.next;
    }
    Ok(RunRecord::from_trace(trace, spec.gamma_r, spec.gamma_c, start.elapsed().as_secs_f64() * 1e3))
}

/// Unconstrained payoff UCT playing the greedy root action.
pub fn uct_plan_episode<M: GenerativeModel>(
    model: &M,
    spec: &ProblemSpec,
    config: &PlannerConfig,
    seed: u64,
) -> Result<RunRecord> {
    let (mut env_rng, mut rng) = episode_rngs(seed);
    let mut tree = ScalarUct::new(model, *spec, *config)?;
    let mut state = model.initial_state();
    let mut trace = Vec::new();
    let start = Instant::now();
    while trace.len() < spec.horizon && !model.is_terminal(&state) {
        let iterations = search(&mut tree, config, &mut rng)?;
        let a = tree
            .node(tree.root())
            .greedy(0.0)
            .ok_or_else(|| Error::InvalidState("root has no expanded action".into()))?;
        let tr = model.sample(&state, a, &mut env_rng)?;
        trace.push(StepTrace {
            action: a,
            reward: tr.reward,
            cost: tr.cost,
            threshold: spec.threshold,
            next_threshold: spec.threshold,
            iterations,
        });
        tree.advance(a, &tr.next);
        state = tr.next;
    }
    Ok(RunRecord::from_trace(trace, spec.gamma_r, spec.gamma_c, start.elapsed().as_secs_f64() * 1e3))
}
