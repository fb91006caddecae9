use crate::cmdp::{TabularCmdp, TabularOutcome};

fn det(next: usize, reward: f64, cost: f64) -> Vec<TabularOutcome> {
    vec![TabularOutcome { next, prob: 1.0, reward, cost }]
}

/// Two-step CMDP on which ignoring the observed outcome when updating the
/// threshold breaks the constraint.
///
/// `s0` has one action `a1` reaching `s2` or `s3` with probability 1/2. In
/// `s2`, `a4` pays reward 1 at cost 1 and `a5` pays nothing. In `s3` the only
/// action `a6` costs 1. States `s7`, `s8`, `s9` are terminal.
pub fn cmdp_a() -> TabularCmdp {
    let mut m = TabularCmdp::new(0);
    let s0 = m.add_state("s0", false);
    let s2 = m.add_state("s2", false);
    let s3 = m.add_state("s3", false);
    let s7 = m.add_state("s7", true);
    let s8 = m.add_state("s8", true);
    let s9 = m.add_state("s9", true);
    let ok = "CMDP A transitions are valid";
    m.add_action(
        s0,
        vec![
            TabularOutcome { next: s2, prob: 0.5, reward: 0.0, cost: 0.0 },
            TabularOutcome { next: s3, prob: 0.5, reward: 0.0, cost: 0.0 },
        ],
    )
    .expect(ok);
    m.add_action(s2, det(s7, 1.0, 1.0)).expect(ok);
    m.add_action(s2, det(s8, 0.0, 0.0)).expect(ok);
    m.add_action(s3, det(s9, 0.0, 1.0)).expect(ok);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmdp::{exact_pareto_oracle, GenerativeModel, ProblemSpec};

    #[test]
    fn optimal_payoffs() {
        let m = cmdp_a();
        let spec = ProblemSpec::for_model(&m, 2, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(spec.cost_bound, 2.0);
        let curve = exact_pareto_oracle(&m, &spec, &m.initial_state(), 2).unwrap();
        assert_eq!(curve.max_reward_at(0.5), Some(0.0));
        assert!((curve.max_reward_at(0.75).unwrap() - 0.25).abs() < 1e-12);
    }
}
