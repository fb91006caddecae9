use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Search effort spent on each real decision.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Budget {
    Iterations(usize),
    /// Wall-clock limit in milliseconds.
    WallClockMs(f64),
}

impl Budget {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Budget::Iterations(0) => Err(Error::Config("iteration budget must be positive".into())),
            Budget::WallClockMs(ms) if !(ms > 0.0) => {
                Err(Error::Config(format!("time budget {ms} ms must be positive")))
            }
            _ => Ok(()),
        }
    }

    /// Whether a search that ran `iterations` times for `elapsed` should stop.
    pub fn exhausted(&self, iterations: usize, elapsed: Duration) -> bool {
        match *self {
            Budget::Iterations(n) => iterations >= n,
            Budget::WallClockMs(ms) => iterations > 0 && elapsed.as_secs_f64() * 1e3 >= ms,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    /// Exploration constant `C`.
    pub exploration: f64,
    pub budget: Budget,
    /// Cap on rollout length; `None` rolls out to the horizon.
    pub rollout_depth: Option<usize>,
    /// Use the model's exact transition probabilities instead of tallies.
    pub exact_dynamics: bool,
    /// Vertex simplification tolerance applied after each backup; 0 keeps
    /// curves exact.
    pub simplify_eps: f64,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            exploration: 5.0,
            budget: Budget::Iterations(1000),
            rollout_depth: None,
            exact_dynamics: false,
            simplify_eps: 0.0,
        }
    }
}

impl PlannerConfig {
    pub fn with_iterations(iterations: usize) -> Self {
        Self { budget: Budget::Iterations(iterations), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.budget.validate()?;
        if !(self.exploration >= 0.0) || !self.exploration.is_finite() {
            return Err(Error::Config(format!("exploration constant {} must be a nonnegative real", self.exploration)));
        }
        if !(self.simplify_eps >= 0.0) {
            return Err(Error::Config("simplify_eps must be nonnegative".into()));
        }
        Ok(())
    }
}
