use rand::Rng;

use crate::cmdp::ActionId;
use crate::error::{Error, Result};
use crate::pareto::{bracket_labeled, prune_labeled, Bracket, ParetoCurve, Point};
use crate::SimRng;

/// Action distribution with support of size at most two.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ActionMixture {
    Deterministic(ActionId),
    Mix { low: ActionId, sigma_low: f64, cost_low: f64, high: ActionId, sigma_high: f64, cost_high: f64 },
}

impl ActionMixture {
    pub fn sample(&self, rng: &mut SimRng) -> ActionId {
        match *self {
            ActionMixture::Deterministic(a) => a,
            ActionMixture::Mix { low, sigma_low, high, .. } => {
                if rng.gen::<f64>() < sigma_low {
                    low
                } else {
                    high
                }
            }
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, ActionMixture::Deterministic(_))
    }

    /// Expected cost of a mix, `σ_l·c_l + σ_h·c_h`.
    pub fn mixed_cost(&self) -> Option<f64> {
        match *self {
            ActionMixture::Deterministic(_) => None,
            ActionMixture::Mix { sigma_low, cost_low, sigma_high, cost_high, .. } => {
                Some(sigma_low * cost_low + sigma_high * cost_high)
            }
        }
    }
}

/// A tried action with its curve estimate and exploration bonus.
#[derive(Clone, Copy, Debug)]
pub struct ActionEntry<'a> {
    pub action: ActionId,
    pub curve: &'a ParetoCurve,
    pub bonus: f64,
}

/// Scale of the exploration bonus: the larger of the reward and cost spans
/// over the vertices of the given action curves, dominated ones included.
pub fn alpha<'a>(curves: impl IntoIterator<Item = &'a ParetoCurve>) -> f64 {
    let (mut c_lo, mut c_hi, mut r_lo, mut r_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for c in curves {
        c_lo = c_lo.min(c.min_cost());
        c_hi = c_hi.max(c.max_cost());
        r_lo = r_lo.min(c.min_reward());
        r_hi = r_hi.max(c.max_reward());
    }
    if c_lo > c_hi {
        return 1e-6;
    }
    (r_hi - r_lo).max(c_hi - c_lo).max(1e-6)
}

/// `C·α·sqrt(ln N(h) / (N(h,a) + 1))`.
pub fn exploration_bonus(c: f64, alpha: f64, node_visits: u64, action_visits: u64) -> f64 {
    if c == 0.0 || node_visits <= 1 {
        return 0.0;
    }
    c * alpha * ((node_visits as f64).ln() / (action_visits as f64 + 1.0)).sqrt()
}

/// Distribution over the tried actions that meets `threshold` on the
/// bonus-shifted frontier (each action's curve moved by `bonus·(−1, 1)`).
pub fn get_action_dist(entries: &[ActionEntry<'_>], threshold: f64) -> Result<ActionMixture> {
    if entries.is_empty() {
        return Err(Error::InvalidState("no expanded action to choose from".into()));
    }
    let mut labeled = Vec::with_capacity(entries.iter().map(|e| e.curve.len()).sum());
    for e in entries {
        labeled.extend(e.curve.vertices().iter().map(|p| (Point::new(p.cost - e.bonus, p.reward + e.bonus), e.action)));
    }
    let frontier = prune_labeled(labeled)?;
    match bracket_labeled(&frontier, threshold) {
        Bracket::AllAbove => {
            let key = |e: &ActionEntry<'_>| e.curve.min_cost() - e.bonus;
            let best = entries
                .iter()
                .min_by(|a, b| key(a).total_cmp(&key(b)).then(a.action.cmp(&b.action)))
                .expect("entries are non-empty");
            Ok(ActionMixture::Deterministic(best.action))
        }
        Bracket::AllBelow => {
            let key = |e: &ActionEntry<'_>| e.curve.max_reward() + e.bonus;
            let best = entries
                .iter()
                .min_by(|a, b| key(b).total_cmp(&key(a)).then(a.action.cmp(&b.action)))
                .expect("entries are non-empty");
            Ok(ActionMixture::Deterministic(best.action))
        }
        Bracket::Pair { low, high } => {
            let (pl, al) = frontier[low];
            let (ph, ah) = frontier[high];
            if low == high || al == ah {
                return Ok(ActionMixture::Deterministic(al));
            }
            let sigma_high = (threshold - pl.cost) / (ph.cost - pl.cost);
            Ok(ActionMixture::Mix {
                low: al,
                sigma_low: 1.0 - sigma_high,
                cost_low: pl.cost,
                high: ah,
                sigma_high,
                cost_high: ph.cost,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(v: &[(f64, f64)]) -> ParetoCurve {
        crate::pareto::prune(&v.iter().map(|&(c, r)| Point::new(c, r)).collect::<Vec<_>>()).unwrap()
    }

    fn entries<'a>(curves: &'a [ParetoCurve]) -> Vec<ActionEntry<'a>> {
        curves.iter().enumerate().map(|(i, c)| ActionEntry { action: ActionId(i), curve: c, bonus: 0.0 }).collect()
    }

    #[test]
    fn mixes_between_bracketing_actions() {
        let cs = [curve(&[(0.0, 0.0)]), curve(&[(1.0, 1.0)])];
        let m = get_action_dist(&entries(&cs), 0.25).unwrap();
        match m {
            ActionMixture::Mix { low, sigma_low, high, sigma_high, .. } => {
                assert_eq!((low, high), (ActionId(0), ActionId(1)));
                assert!((sigma_low - 0.75).abs() < 1e-12 && (sigma_high - 0.25).abs() < 1e-12);
            }
            _ => panic!("expected a mix, got {m:?}"),
        }
        assert!((m.mixed_cost().unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn deterministic_branches() {
        let cs = [curve(&[(0.0, 0.0)]), curve(&[(1.0, 1.0)])];
        assert_eq!(get_action_dist(&entries(&cs), 2.0).unwrap(), ActionMixture::Deterministic(ActionId(1)));
        let cs = [curve(&[(0.5, 0.0)]), curve(&[(0.7, 1.0)])];
        assert_eq!(get_action_dist(&entries(&cs), 0.1).unwrap(), ActionMixture::Deterministic(ActionId(0)));
        // a vertex exactly on the threshold is played as is
        let cs = [curve(&[(0.0, 0.0)]), curve(&[(1.0, 1.0)])];
        assert_eq!(get_action_dist(&entries(&cs), 1.0).unwrap(), ActionMixture::Deterministic(ActionId(1)));
        assert!(get_action_dist(&[], 0.0).is_err());
    }

    #[test]
    fn coinciding_vertices_go_to_lowest_action() {
        let cs = [curve(&[(1.0, 1.0)]), curve(&[(1.0, 1.0)])];
        assert_eq!(get_action_dist(&entries(&cs), 1.0).unwrap(), ActionMixture::Deterministic(ActionId(0)));
    }

    #[test]
    fn bonus_values() {
        assert_eq!(exploration_bonus(3.0, 2.0, 1, 0), 0.0);
        assert_eq!(exploration_bonus(0.0, 2.0, 100, 3), 0.0);
        assert!((exploration_bonus(1.0, 1.0, 8, 1) - ((8f64).ln() / 2.0).sqrt()).abs() < 1e-15);
        assert!((exploration_bonus(1.0, 1.0, 8, 1) - 1.0197).abs() < 1e-4);
    }

    #[test]
    fn alpha_spans_dominated_actions() {
        let dominant = curve(&[(0.9, 1.9)]);
        let dominated = curve(&[(1.0, 1.4)]);
        assert!((alpha([&dominant, &dominated]) - 0.5).abs() < 1e-12);
        assert_eq!(alpha([&dominant]), 1e-6);
        assert_eq!(alpha(std::iter::empty()), 1e-6);
    }
}
