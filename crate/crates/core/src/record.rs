use crate::cmdp::ActionId;

/// One real decision step of an episode.
#[derive(Clone, Debug, PartialEq)]
pub struct StepTrace {
    pub action: ActionId,
    pub reward: f64,
    pub cost: f64,
    /// Threshold before the step and after its update.
    pub threshold: f64,
    pub next_threshold: f64,
    /// Search iterations run before the decision.
    pub iterations: usize,
}

/// Outcome of one planned episode.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    /// Discounted accumulated reward.
    pub payoff: f64,
    /// Discounted accumulated cost.
    pub cost: f64,
    pub steps: usize,
    pub samples_per_step: f64,
    pub wall_ms_per_step: f64,
    pub trace: Vec<StepTrace>,
}

impl RunRecord {
    /// Builds the record from the step traces and discount factors.
    pub fn from_trace(trace: Vec<StepTrace>, gamma_r: f64, gamma_c: f64, wall_ms_total: f64) -> Self {
        let mut payoff = 0.0;
        let mut cost = 0.0;
        let (mut gr, mut gc) = (1.0, 1.0);
        for s in &trace {
            payoff += gr * s.reward;
            cost += gc * s.cost;
            gr *= gamma_r;
            gc *= gamma_c;
        }
        let steps = trace.len();
        let per = |x: f64| if steps == 0 { 0.0 } else { x / steps as f64 };
        Self {
            payoff,
            cost,
            steps,
            samples_per_step: per(trace.iter().map(|s| s.iterations as f64).sum()),
            wall_ms_per_step: per(wall_ms_total),
            trace,
        }
    }
}
