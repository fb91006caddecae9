use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use tuct::cmdp::{ActionId, GenerativeModel};
use tuct::envs::{
    parse_dataset, Delivery, DeliveryConfig, Gridworld, GridworldConfig, TrapMode, GRIDWORLD_LARGE_MINI,
    GRIDWORLD_SMALL_MINI,
};
use tuct::SimRng;

#[test]
fn committed_datasets_regenerate() {
    assert_eq!(GRIDWORLD_SMALL_MINI.text().unwrap(), include_str!("../data/GridworldSmall-mini.txt"));
    assert_eq!(GRIDWORLD_LARGE_MINI.text().unwrap(), include_str!("../data/GridworldLarge-mini.txt"));
    let maps = parse_dataset(include_str!("../data/GridworldSmall-mini.txt")).unwrap();
    assert_eq!(maps.len(), 16);
    assert!(maps.iter().all(|m| m.width() == 6 && m.height() == 6 && m.gold_count() == 5));
}

/// Random walk over reachable states, checking every action's outcome
/// distribution on the way.
fn check_dynamics<M: GenerativeModel>(model: &M, steps: usize, seed: u64) {
    let mut rng = SimRng::seed_from_u64(seed);
    let mut state = model.initial_state();
    for _ in 0..steps {
        if model.is_terminal(&state) {
            state = model.initial_state();
        }
        for a in model.actions(&state) {
            let outcomes = model.exact_dynamics(&state, a).unwrap();
            let total: f64 = outcomes.iter().map(|o| o.prob).sum();
            assert!((total - 1.0).abs() < 1e-12, "{state:?} {a:?}: {total}");
            assert!(outcomes.iter().all(|o| o.prob > 0.0 && o.cost >= 0.0 && o.cost <= model.max_step_cost() + 1e-12));
            for i in 0..outcomes.len() {
                assert!(outcomes[i + 1..].iter().all(|o| o.next != outcomes[i].next), "duplicate successor");
            }
        }
        let a = ActionId(rng.gen_range(0..model.action_count(&state)));
        state = model.sample(&state, a, &mut rng).unwrap().next;
    }
}

/// Sampled frequencies of one state-action pair against its exact law.
fn check_sampling<M: GenerativeModel>(model: &M, state: &M::State, a: ActionId) {
    let mut rng = SimRng::seed_from_u64(5);
    let n = 20_000;
    let mut freq: HashMap<M::State, usize> = HashMap::new();
    for _ in 0..n {
        *freq.entry(model.sample(state, a, &mut rng).unwrap().next).or_default() += 1;
    }
    for o in model.exact_dynamics(state, a).unwrap() {
        let f = *freq.get(&o.next).unwrap_or(&0) as f64 / n as f64;
        assert!((f - o.prob).abs() < 0.02, "{:?}: sampled {f}, exact {}", o.next, o.prob);
    }
}

#[test]
fn gridworld_dynamics_are_distributions() {
    for map in parse_dataset(include_str!("../data/GridworldSmall-mini.txt")).unwrap() {
        let map = Arc::new(map);
        for mode in [TrapMode::Avoid, TrapMode::SoftAvoid] {
            let g = Gridworld::new(map.clone(), GridworldConfig { mode, p_trap: 0.5, p_slide: 0.2 }).unwrap();
            check_dynamics(&g, 200, 1);
            check_sampling(&g, &g.initial_state(), ActionId(1));
        }
    }
}

#[test]
fn delivery_dynamics_are_distributions() {
    let d = Delivery::generate(DeliveryConfig::default()).unwrap();
    check_dynamics(&d, 2000, 2);
    check_sampling(&d, &d.initial_state(), ActionId(0));
}

#[test]
fn delivery_cost_counts_expired_orders() {
    let d = Delivery::generate(DeliveryConfig { seed: 4, ..DeliveryConfig::default() }).unwrap();
    let mut rng = SimRng::seed_from_u64(8);
    for _ in 0..20 {
        let mut state = d.initial_state();
        let (mut cost, mut expired, mut delivered) = (0.0, 0, 0.0);
        for _ in 0..300 {
            let a = ActionId(rng.gen_range(0..d.action_count(&state)));
            let tr = d.sample(&state, a, &mut rng).unwrap();
            // a live order expires when the clock first passes its deadline
            if let Some(o) = state.order.filter(|o| !o.expired) {
                expired += usize::from(tr.next.clock > o.deadline);
            }
            cost += tr.cost;
            delivered += tr.reward;
            state = tr.next;
        }
        assert!((cost - 0.1 * expired as f64).abs() < 1e-9, "cost {cost}, expired {expired}");
        assert!(delivered >= 0.0);
    }
}
