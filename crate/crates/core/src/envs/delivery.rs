//! Maintenance-delivery routing on a synthetic street graph.
//!
//! The agent drives between junctions. Once a maintenance point has waited
//! `period` time units since it was last served or declined and lies within
//! `radius` of the agent, the agent must accept one offered request or
//! decline them all. An accepted request pays 1 on arrival and costs 0.1
//! once if the drive outlasts `delay`.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::cmdp::{ActionId, GenerativeModel, Outcome, Transition};
use crate::error::{Error, Result};
use crate::SimRng;

pub const MAX_TARGETS: usize = 8;
pub const LATE_COST: f64 = 0.1;
const TRAVEL_TIMES: [u32; 3] = [1, 2, 3];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeliveryConfig {
    /// Junction grid columns.
    pub columns: usize,
    /// Junction grid rows.
    pub rows: usize,
    /// Street length between neighbouring junctions.
    pub spacing_km: f64,
    /// Probability that a street is one-way.
    pub one_way: f64,
    pub targets: usize,
    pub period: u32,
    pub radius_km: f64,
    pub delay: u32,
    pub seed: u64,
}

impl Default for DeliveryConfig {
    fn default() -> Self {
        Self {
            columns: 6,
            rows: 5,
            spacing_km: 0.1,
            one_way: 0.3,
            targets: 4,
            period: 8,
            radius_km: 0.4,
            delay: 10,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Street {
    pub to: usize,
    /// Probabilities of travel times 1, 2 and 3.
    pub travel: [f64; 3],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Order {
    pub target: u8,
    pub deadline: u32,
    pub expired: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DeliveryState {
    pub junction: u16,
    pub clock: u32,
    /// Time each target was last served or declined.
    pub last_reset: [u32; MAX_TARGETS],
    pub order: Option<Order>,
    /// Bitmask of offered targets; nonzero in a decision state.
    pub offers: u8,
}

impl DeliveryState {
    pub fn is_decision(&self) -> bool {
        self.offers != 0
    }

    fn offered(&self) -> impl Iterator<Item = usize> + '_ {
        (0..MAX_TARGETS).filter(move |i| self.offers & (1 << i) != 0)
    }
}

#[derive(Clone, Debug)]
pub struct Delivery {
    config: DeliveryConfig,
    streets: Vec<Vec<Street>>,
    targets: Vec<usize>,
    /// `distance[k][j]`: shortest drive from junction `j` to target `k`.
    distance: Vec<Vec<f64>>,
}

fn strongly_connected(streets: &[Vec<Street>]) -> bool {
    let n = streets.len();
    let mut reverse = vec![Vec::new(); n];
    for (from, out) in streets.iter().enumerate() {
        for s in out {
            reverse[s.to].push(from);
        }
    }
    let forward: Vec<Vec<usize>> = streets.iter().map(|o| o.iter().map(|s| s.to).collect()).collect();
    [forward, reverse].iter().all(|adj| hops_from(adj, 0).iter().all(|d| d.is_some()))
}

fn travel_weights(rng: &mut SimRng) -> [f64; 3] {
    let w: [f64; 3] = std::array::from_fn(|_| rng.gen_range(0.05..1.0));
    let total: f64 = w.iter().sum();
    w.map(|x| x / total)
}

fn hops_from(adj: &[Vec<usize>], start: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if dist[v].is_none() {
                dist[v] = Some(dist[u].unwrap() + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

impl Delivery {
    /// Synthesises a strongly connected street grid from `config.seed`.
    pub fn generate(config: DeliveryConfig) -> Result<Self> {
        let n = config.columns * config.rows;
        if !(20..=250).contains(&n) {
            return Err(Error::Config(format!("{n} junctions; expected between 20 and 250")));
        }
        if config.targets == 0 || config.targets > MAX_TARGETS || config.targets > n {
            return Err(Error::Config(format!("targets must be in 1..={MAX_TARGETS}")));
        }
        if config.period == 0 || config.delay == 0 {
            return Err(Error::Config("period and delay must be positive".into()));
        }
        if !(config.spacing_km > 0.0) || !(config.radius_km >= 0.0) || !(0.0..=1.0).contains(&config.one_way) {
            return Err(Error::Config("invalid spacing, radius or one-way probability".into()));
        }
        let mut rng = SimRng::seed_from_u64(config.seed);
        let id = |r: usize, c: usize| r * config.columns + c;
        let mut pairs = Vec::new();
        for r in 0..config.rows {
            for c in 0..config.columns {
                if c + 1 < config.columns {
                    pairs.push((id(r, c), id(r, c + 1)));
                }
                if r + 1 < config.rows {
                    pairs.push((id(r, c), id(r + 1, c)));
                }
            }
        }
        let mut streets = None;
        for _ in 0..1000 {
            let mut out: Vec<Vec<Street>> = vec![Vec::new(); n];
            for &(a, b) in &pairs {
                if rng.gen::<f64>() < config.one_way {
                    let (from, to) = if rng.gen() { (a, b) } else { (b, a) };
                    out[from].push(Street { to, travel: travel_weights(&mut rng) });
                } else {
                    out[a].push(Street { to: b, travel: travel_weights(&mut rng) });
                    out[b].push(Street { to: a, travel: travel_weights(&mut rng) });
                }
            }
            if strongly_connected(&out) {
                for o in &mut out {
                    o.sort_by_key(|s| s.to);
                }
                streets = Some(out);
                break;
            }
        }
        let streets = streets.ok_or_else(|| Error::Generation("no strongly connected street graph found".into()))?;
        let mut junctions: Vec<usize> = (1..n).collect();
        junctions.shuffle(&mut rng);
        let targets: Vec<usize> = junctions[..config.targets].to_vec();
        let mut reverse = vec![Vec::new(); n];
        for (from, out) in streets.iter().enumerate() {
            for s in out {
                reverse[s.to].push(from);
            }
        }
        let distance = targets
            .iter()
            .map(|&t| hops_from(&reverse, t).into_iter().map(|h| h.unwrap() as f64 * config.spacing_km).collect())
            .collect();
        Ok(Self { config, streets, targets, distance })
    }

    pub fn config(&self) -> &DeliveryConfig {
        &self.config
    }

    pub fn junction_count(&self) -> usize {
        self.streets.len()
    }

    pub fn streets(&self, junction: usize) -> &[Street] {
        &self.streets[junction]
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn distance_to_target(&self, target: usize, junction: usize) -> f64 {
        self.distance[target][junction]
    }

    pub fn is_strongly_connected(&self) -> bool {
        strongly_connected(&self.streets)
    }

    fn with_offers(&self, mut s: DeliveryState) -> DeliveryState {
        s.offers = 0;
        if s.order.is_none() {
            for k in 0..self.targets.len() {
                let matured = s.clock.saturating_sub(s.last_reset[k]) >= self.config.period;
                if matured && self.distance[k][s.junction as usize] <= self.config.radius_km + 1e-9 {
                    s.offers |= 1 << k;
                }
            }
        }
        s
    }

    fn decide(&self, s: &DeliveryState, a: ActionId) -> Result<DeliveryState> {
        let offered: Vec<usize> = s.offered().collect();
        let mut next = DeliveryState { offers: 0, ..*s };
        match a.0.cmp(&offered.len()) {
            std::cmp::Ordering::Less => {
                let k = offered[a.0];
                next.last_reset[k] = s.clock;
                next.order = Some(Order { target: k as u8, deadline: s.clock + self.config.delay, expired: false });
            }
            std::cmp::Ordering::Equal => {
                for k in offered {
                    next.last_reset[k] = s.clock;
                }
            }
            std::cmp::Ordering::Greater => {
                return Err(Error::InvalidArgument(format!("decision action {} out of range", a.0)));
            }
        }
        Ok(next)
    }

    fn drive(&self, s: &DeliveryState, street: &Street, time: u32) -> Transition<DeliveryState> {
        let mut next = DeliveryState { junction: street.to as u16, clock: s.clock + time, ..*s };
        let (mut reward, mut cost) = (0.0, 0.0);
        if let Some(mut order) = s.order {
            if !order.expired && next.clock > order.deadline {
                order.expired = true;
                cost = LATE_COST;
            }
            if self.targets[order.target as usize] == street.to {
                reward = 1.0;
                next.order = None;
            } else {
                next.order = Some(order);
            }
        }
        Transition { next: self.with_offers(next), reward, cost }
    }

    fn street(&self, s: &DeliveryState, a: ActionId) -> Result<&Street> {
        self.streets[s.junction as usize]
            .get(a.0)
            .ok_or_else(|| Error::InvalidArgument(format!("junction {} has no street {}", s.junction, a.0)))
    }
}

impl GenerativeModel for Delivery {
    type State = DeliveryState;

    fn initial_state(&self) -> DeliveryState {
        self.with_offers(DeliveryState { junction: 0, clock: 0, last_reset: [0; MAX_TARGETS], order: None, offers: 0 })
    }

    fn action_count(&self, s: &DeliveryState) -> usize {
        if s.is_decision() {
            s.offers.count_ones() as usize + 1
        } else {
            self.streets[s.junction as usize].len()
        }
    }

    fn sample(&self, s: &DeliveryState, a: ActionId, rng: &mut SimRng) -> Result<Transition<DeliveryState>> {
        if s.is_decision() {
            return Ok(Transition { next: self.decide(s, a)?, reward: 0.0, cost: 0.0 });
        }
        let street = self.street(s, a)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut time = TRAVEL_TIMES[2];
        for (t, p) in TRAVEL_TIMES.iter().zip(street.travel) {
            acc += p;
            if u < acc {
                time = *t;
                break;
            }
        }
        Ok(self.drive(s, street, time))
    }

    fn is_terminal(&self, _s: &DeliveryState) -> bool {
        false
    }

    fn exact_dynamics(&self, s: &DeliveryState, a: ActionId) -> Option<Vec<Outcome<DeliveryState>>> {
        if s.is_decision() {
            let next = self.decide(s, a).ok()?;
            return Some(vec![Outcome { next, prob: 1.0, reward: 0.0, cost: 0.0 }]);
        }
        let street = self.street(s, a).ok()?;
        Some(
            TRAVEL_TIMES
                .iter()
                .zip(street.travel)
                .filter(|&(_, p)| p > 0.0)
                .map(|(&t, prob)| {
                    let tr = self.drive(s, street, t);
                    Outcome { next: tr.next, prob, reward: tr.reward, cost: tr.cost }
                })
                .collect(),
        )
    }

    fn max_step_cost(&self) -> f64 {
        LATE_COST
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env() -> Delivery {
        Delivery::generate(DeliveryConfig::default()).unwrap()
    }

    #[test]
    fn graph_is_strongly_connected_and_seeded() {
        let d = env();
        assert!(d.is_strongly_connected());
        assert_eq!(d.junction_count(), 30);
        let again = env();
        assert_eq!(d.targets(), again.targets());
        assert_eq!(d.streets(3), again.streets(3));
        for j in 0..d.junction_count() {
            for s in d.streets(j) {
                assert!((s.travel.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Delivery::generate(DeliveryConfig { columns: 2, rows: 2, ..Default::default() }).is_err());
        assert!(Delivery::generate(DeliveryConfig { period: 0, ..Default::default() }).is_err());
        assert!(Delivery::generate(DeliveryConfig { targets: 9, ..Default::default() }).is_err());
    }

    #[test]
    fn decline_clears_offers_without_payoff() {
        let d = env();
        let mut s = d.initial_state();
        s.clock = 100;
        s.offers = 1;
        let tr = d.sample(&s, ActionId(1), &mut SimRng::seed_from_u64(0)).unwrap();
        assert_eq!((tr.reward, tr.cost, tr.next.offers, tr.next.order), (0.0, 0.0, 0, None));
        assert_eq!(tr.next.last_reset[0], 100);
    }

    #[test]
    fn late_delivery_pays_and_costs_once() {
        let d = env();
        let target = d.targets()[0];
        let from = (0..d.junction_count()).find(|&j| d.streets(j).iter().any(|s| s.to == target)).unwrap();
        let a = d.streets(from).iter().position(|s| s.to == target).unwrap();
        let s = DeliveryState {
            junction: from as u16,
            clock: 5,
            last_reset: [5; MAX_TARGETS],
            order: Some(Order { target: 0, deadline: 5, expired: false }),
            offers: 0,
        };
        let out = d.exact_dynamics(&s, ActionId(a)).unwrap();
        assert!(out.iter().all(|o| o.reward == 1.0 && o.cost == LATE_COST && o.next.order.is_none()));
        let expired = DeliveryState { order: Some(Order { target: 0, deadline: 5, expired: true }), ..s };
        let out = d.exact_dynamics(&expired, ActionId(a)).unwrap();
        assert!(out.iter().all(|o| o.reward == 1.0 && o.cost == 0.0));
    }
}
