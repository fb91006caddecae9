use super::select::ActionMixture;
use crate::cmdp::{ActionId, ProblemSpec};
use crate::error::{Error, Result};
use crate::pareto::{backup_cost_range, decompose, Successor};

/// Which outcome of the played action was observed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ObservedOutcome {
    /// Index into the action's tallied outcomes.
    Tallied(usize),
    /// An outcome with no node in the tree yet, with its immediate cost.
    Unexpanded { cost: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateCase {
    Unexpanded,
    Mixing,
    Surplus,
    Unfeasible,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdUpdate {
    pub value: f64,
    pub case: UpdateCase,
    /// Cost assigned to the observed outcome by the decomposition.
    pub outcome_cost: Option<f64>,
}

/// Threshold the played action is charged with: `threshold` itself for a
/// deterministic choice, otherwise the vertex cost of the sampled side.
pub fn actual_threshold(threshold: f64, mixture: &ActionMixture, action: ActionId) -> f64 {
    match *mixture {
        ActionMixture::Deterministic(_) => threshold,
        ActionMixture::Mix { low, cost_low, cost_high, .. } => {
            if action == low {
                cost_low
            } else {
                cost_high
            }
        }
    }
}

/// New threshold after playing `action` and observing `outcome`.
///
/// `successors` describe the tallied outcomes of the played action as used
/// by its curve backup.
pub fn update_threshold(
    threshold: f64,
    mixture: &ActionMixture,
    action: ActionId,
    outcome: ObservedOutcome,
    successors: &[Successor<'_>],
    spec: &ProblemSpec,
) -> Result<ThresholdUpdate> {
    let d_act = actual_threshold(threshold, mixture, action);
    let g = spec.gamma_c;
    let t = match outcome {
        ObservedOutcome::Unexpanded { cost } => {
            return Ok(ThresholdUpdate { value: (d_act - cost) / g, case: UpdateCase::Unexpanded, outcome_cost: None })
        }
        ObservedOutcome::Tallied(t) => t,
    };
    if t >= successors.len() {
        return Err(Error::InvalidArgument(format!("outcome {t} is not tallied")));
    }
    let (c_min, c_max) = backup_cost_range(successors, g);
    if d_act >= c_min && d_act <= c_max {
        let c_t = decompose(successors, g, spec.gamma_r, d_act)?.points[t].cost;
        return Ok(ThresholdUpdate { value: c_t, case: UpdateCase::Mixing, outcome_cost: Some(c_t) });
    }
    if d_act > c_max {
        let c_t = decompose(successors, g, spec.gamma_r, c_max)?.points[t].cost;
        let c_bar: f64 = successors.iter().map(|s| s.prob * s.cost).sum();
        let b = spec.cost_bound;
        let denom = c_bar + g * b - c_max;
        let value = if denom > 1e-12 { c_t + (d_act - c_max) * (b - c_t) / denom } else { c_t + (d_act - c_max) / g };
        return Ok(ThresholdUpdate { value, case: UpdateCase::Surplus, outcome_cost: Some(c_t) });
    }
    let c_t = decompose(successors, g, spec.gamma_r, c_min)?.points[t].cost;
    let p = successors[t].prob;
    Ok(ThresholdUpdate {
        value: c_t - (c_min - d_act) / (p * g),
        case: UpdateCase::Unfeasible,
        outcome_cost: Some(c_t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pareto::{ParetoCurve, Point};

    fn cmdp_a_node() -> (ParetoCurve, ParetoCurve) {
        let s2 = crate::pareto::prune(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)]).unwrap();
        let s3 = ParetoCurve::singleton(Point::new(1.0, 0.0));
        (s2, s3)
    }

    fn spec() -> ProblemSpec {
        ProblemSpec { horizon: 2, gamma_r: 1.0, gamma_c: 1.0, threshold: 0.5, cost_bound: 2.0 }
    }

    fn run(d: f64, t: usize) -> ThresholdUpdate {
        let (s2, s3) = cmdp_a_node();
        let succ = [
            Successor { prob: 0.5, curve: &s2, cost: 0.0, reward: 0.0 },
            Successor { prob: 0.5, curve: &s3, cost: 0.0, reward: 0.0 },
        ];
        let m = ActionMixture::Deterministic(ActionId(0));
        update_threshold(d, &m, ActionId(0), ObservedOutcome::Tallied(t), &succ, &spec()).unwrap()
    }

    #[test]
    fn mixing_case() {
        assert_eq!(run(0.5, 0), ThresholdUpdate { value: 0.0, case: UpdateCase::Mixing, outcome_cost: Some(0.0) });
        assert_eq!(run(0.5, 1).value, 1.0);
    }

    #[test]
    fn surplus_case() {
        let u = run(1.2, 1);
        assert_eq!(u.case, UpdateCase::Surplus);
        assert!((u.value - 1.2).abs() < 1e-12);
    }

    #[test]
    fn unfeasible_case() {
        let u = run(0.3, 0);
        assert_eq!(u.case, UpdateCase::Unfeasible);
        assert!((u.value + 0.4).abs() < 1e-12);
    }

    #[test]
    fn unexpanded_and_mixed_sides() {
        let m = ActionMixture::Mix {
            low: ActionId(0),
            sigma_low: 0.5,
            cost_low: 0.2,
            high: ActionId(1),
            sigma_high: 0.5,
            cost_high: 0.8,
        };
        let spec = ProblemSpec { gamma_c: 0.5, ..spec() };
        let u = update_threshold(0.5, &m, ActionId(1), ObservedOutcome::Unexpanded { cost: 0.3 }, &[], &spec).unwrap();
        assert_eq!(u.case, UpdateCase::Unexpanded);
        assert!((u.value - 1.0).abs() < 1e-12);
        assert_eq!(actual_threshold(0.5, &m, ActionId(0)), 0.2);
    }
}
