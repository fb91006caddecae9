use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::scalar::ScalarUct;
use crate::cmdp::{ActionId, GenerativeModel, ProblemSpec};
use crate::error::{Error, Result};
use crate::record::{RunRecord, StepTrace};
use crate::tuct::{actual_threshold, ActionMixture, PlannerConfig};
use crate::{episode_rngs, SimRng};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CcPomcpConfig {
    pub search: PlannerConfig,
    pub lambda_init: f64,
    pub lambda_cap: f64,
    /// Root actions whose scalarised values lie within `tie_tolerance·α` of
    /// the best are treated as tied and may be mixed.
    pub tie_tolerance: f64,
}

impl Default for CcPomcpConfig {
    fn default() -> Self {
        Self { search: PlannerConfig::default(), lambda_init: 1.0, lambda_cap: 1e4, tie_tolerance: 0.01 }
    }
}

/// Lagrange multiplier with Robbins–Monro steps `1/(1+n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LagrangeState {
    pub lambda: f64,
    pub step: usize,
    pub lambda_max: f64,
}

impl LagrangeState {
    pub fn new(threshold: f64, spec: &ProblemSpec, config: &CcPomcpConfig) -> Self {
        let lambda_max = (spec.cost_bound / threshold.max(1e-6)).min(config.lambda_cap);
        Self { lambda: config.lambda_init.clamp(0.0, lambda_max), step: 0, lambda_max }
    }

    /// Gradient step on the dual: raises λ when the greedy action's cost
    /// estimate exceeds the threshold.
    pub fn update(&mut self, greedy_cost: f64, threshold: f64) {
        let kappa = 1.0 / (1.0 + self.step as f64);
        self.lambda = (self.lambda + kappa * (greedy_cost - threshold)).clamp(0.0, self.lambda_max);
        self.step += 1;
    }
}

/// Lagrangian UCT planner state for one episode.
pub struct CcPomcp<'m, M: GenerativeModel> {
    tree: ScalarUct<'m, M>,
    spec: ProblemSpec,
    config: CcPomcpConfig,
    /// λ after every iteration of the latest decision.
    pub lambda_trace: Vec<f64>,
}

impl<'m, M: GenerativeModel> CcPomcp<'m, M> {
    pub fn new(model: &'m M, spec: ProblemSpec, config: CcPomcpConfig) -> Result<Self> {
        if !(config.tie_tolerance >= 0.0) || !(config.lambda_init >= 0.0) || !(config.lambda_cap > 0.0) {
            return Err(Error::Config("invalid multiplier settings".into()));
        }
        Ok(Self { tree: ScalarUct::new(model, spec, config.search)?, spec, config, lambda_trace: Vec::new() })
    }

    pub fn tree(&self) -> &ScalarUct<'m, M> {
        &self.tree
    }

    /// Runs the search for one decision and returns the final multiplier
    /// state and iteration count.
    pub fn search(&mut self, threshold: f64, rng: &mut SimRng) -> Result<(LagrangeState, usize)> {
        let mut lag = LagrangeState::new(threshold, &self.spec, &self.config);
        self.lambda_trace.clear();
        let start = Instant::now();
        let mut n = 0;
        while !self.config.search.budget.exhausted(n, start.elapsed()) {
            self.tree.iterate(lag.lambda, rng)?;
            let root = self.tree.node(self.tree.root());
            if let Some(g) = root.greedy(lag.lambda) {
                lag.update(root.action(g).expect("greedy action is tried").q_cost, threshold);
            }
            self.lambda_trace.push(lag.lambda);
            n += 1;
        }
        Ok((lag, n))
    }

    /// Greedy root choice under `λ`; near-tied actions are mixed so that the
    /// expected cost estimate meets the threshold.
    pub fn root_policy(&self, lambda: f64, threshold: f64) -> Result<ActionMixture> {
        let root = self.tree.node(self.tree.root());
        let greedy = root.greedy(lambda).ok_or_else(|| Error::InvalidState("root has no expanded action".into()))?;
        let best = root.action(greedy).expect("greedy action is tried").scalarized(lambda);
        let slack = self.config.tie_tolerance * root.alpha(lambda);
        let tied: Vec<(ActionId, f64)> = root
            .tried_actions()
            .filter(|(_, an)| an.scalarized(lambda) >= best - slack)
            .map(|(a, an)| (a, an.q_cost))
            .collect();
        let lo = tied.iter().copied().min_by(|x, y| x.1.total_cmp(&y.1)).expect("greedy action is tied with itself");
        let hi = tied.iter().copied().max_by(|x, y| x.1.total_cmp(&y.1).then(y.0.cmp(&x.0))).expect("non-empty");
        if lo.1 < threshold && threshold < hi.1 {
            let sigma_high = (threshold - lo.1) / (hi.1 - lo.1);
            return Ok(ActionMixture::Mix {
                low: lo.0,
                sigma_low: 1.0 - sigma_high,
                cost_low: lo.1,
                high: hi.0,
                sigma_high,
                cost_high: hi.1,
            });
        }
        if lo.1 >= threshold {
            return Ok(ActionMixture::Deterministic(lo.0));
        }
        Ok(ActionMixture::Deterministic(greedy))
    }

    /// Threshold after playing `action`: the charged threshold minus the
    /// expected immediate cost, rescaled. The observed outcome is ignored.
    pub fn threshold_update(&self, threshold: f64, mixture: &ActionMixture, action: ActionId) -> f64 {
        let root = self.tree.node(self.tree.root());
        let c_bar = root.action(action).map_or(0.0, |an| an.expected_cost());
        (actual_threshold(threshold, mixture, action) - c_bar) / self.spec.gamma_c
    }

    pub fn advance(&mut self, action: ActionId, next: &M::State) {
        self.tree.advance(action, next);
    }
}

pub fn ccpomcp_plan_episode<M: GenerativeModel>(
    model: &M,
    spec: &ProblemSpec,
    config: &CcPomcpConfig,
    seed: u64,
) -> Result<RunRecord> {
    let (mut env_rng, mut rng) = episode_rngs(seed);
    let mut planner = CcPomcp::new(model, *spec, *config)?;
    let mut threshold = spec.threshold;
    let mut state = model.initial_state();
    let mut trace = Vec::new();
    let start = Instant::now();
    while trace.len() < spec.horizon && !model.is_terminal(&state) {
        let (lag, iterations) = planner.search(threshold, &mut rng)?;
        let sigma = planner.root_policy(lag.lambda, threshold)?;
        let a = sigma.sample(&mut rng);
        let tr = model.sample(&state, a, &mut env_rng)?;
        let next_threshold = planner.threshold_update(threshold, &sigma, a);
        trace.push(StepTrace { action: a, reward: tr.reward, cost: tr.cost, threshold, next_threshold, iterations });
        planner.advance(a, &tr.next);
        threshold = next_threshold;
        state = tr.next;
    }
    Ok(RunRecord::from_trace(trace, spec.gamma_r, spec.gamma_c, start.elapsed().as_secs_f64() * 1e3))
}
