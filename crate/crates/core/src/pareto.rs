//! Piecewise-linear Pareto curves over (cost, reward) pairs.
//!
//! A [`ParetoCurve`] stores only the vertices of the upper-left concave
//! frontier of an achievable set: costs and rewards both strictly increase
//! along the vertex list and consecutive slopes strictly decrease. The set it
//! represents is the closure of the convex hull of the vertices under
//! "more cost, less reward".

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance used for vertex deduplication and collinearity.
pub const EPS: f64 = 1e-9;

/// Tolerance on probability vectors passed to the backup operators.
pub const PROB_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point {
    pub cost: f64,
    pub reward: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { cost: 0.0, reward: 0.0 };

    pub const fn new(cost: f64, reward: f64) -> Self {
        Self { cost, reward }
    }

    pub fn is_finite(&self) -> bool {
        self.cost.is_finite() && self.reward.is_finite()
    }

    /// `self ⪯ other`: at least as costly and at most as rewarding.
    pub fn dominated_by(&self, other: &Point) -> bool {
        self.cost >= other.cost && self.reward <= other.reward
    }

    fn lerp(a: Point, b: Point, f: f64) -> Point {
        Point::new(a.cost + f * (b.cost - a.cost), a.reward + f * (b.reward - a.reward))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.cost, self.reward)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParetoCurve {
    vertices: Vec<Point>,
}

/// Position of a threshold relative to the vertex costs of a curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bracket {
    /// Every vertex costs more than the threshold.
    AllAbove,
    /// Every vertex costs less than the threshold.
    AllBelow,
    /// Nearest vertices from below and above (inclusive). Both indices are
    /// equal when a vertex sits exactly on the threshold.
    Pair { low: usize, high: usize },
}

/// One outcome of an action as seen by the action backup.
#[derive(Clone, Copy, Debug)]
pub struct Successor<'a> {
    pub prob: f64,
    pub curve: &'a ParetoCurve,
    pub cost: f64,
    pub reward: f64,
}

/// Per-successor points produced by [`decompose`] together with the
/// combined reward they achieve.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub points: Vec<Point>,
    pub reward: f64,
}

impl ParetoCurve {
    /// The curve of the empty policy.
    pub fn origin() -> Self {
        Self { vertices: vec![Point::ORIGIN] }
    }

    pub fn singleton(p: Point) -> Self {
        Self { vertices: vec![p] }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn min_cost(&self) -> f64 {
        self.vertices[0].cost
    }

    pub fn max_cost(&self) -> f64 {
        self.vertices[self.vertices.len() - 1].cost
    }

    pub fn min_reward(&self) -> f64 {
        self.vertices[0].reward
    }

    pub fn max_reward(&self) -> f64 {
        self.vertices[self.vertices.len() - 1].reward
    }

    pub fn cost_range(&self) -> f64 {
        self.max_cost() - self.min_cost()
    }

    pub fn reward_range(&self) -> f64 {
        self.max_reward() - self.min_reward()
    }

    /// Checks the frontier invariants: finite coordinates, strictly
    /// increasing costs and rewards, strictly decreasing slopes.
    pub fn is_valid(&self) -> bool {
        if self.vertices.is_empty() || !self.vertices.iter().all(Point::is_finite) {
            return false;
        }
        let mut last_slope = f64::INFINITY;
        for w in self.vertices.windows(2) {
            let (dc, dr) = (w[1].cost - w[0].cost, w[1].reward - w[0].reward);
            if dc <= 0.0 || dr <= 0.0 {
                return false;
            }
            let slope = dr / dc;
            if slope >= last_slope {
                return false;
            }
            last_slope = slope;
        }
        true
    }

    /// Scales both coordinates and translates, `self·(gc, gr) + {(c, r)}`.
    pub fn scaled(&self, gamma_c: f64, gamma_r: f64, cost: f64, reward: f64) -> ParetoCurve {
        ParetoCurve {
            vertices: self
                .vertices
                .iter()
                .map(|v| Point::new(gamma_c * v.cost + cost, gamma_r * v.reward + reward))
                .collect(),
        }
    }

    /// Every vertex shifted by the same vector.
    pub fn shifted(&self, dc: f64, dr: f64) -> ParetoCurve {
        self.scaled(1.0, 1.0, dc, dr)
    }

    pub fn bracket(&self, threshold: f64) -> Bracket {
        bracket_costs(self.vertices.iter().map(|v| v.cost), threshold)
    }

    /// Interpolated best reward at the given cost budget. `None` when the
    /// budget is below the cheapest vertex.
    pub fn max_reward_at(&self, threshold: f64) -> Option<f64> {
        match self.bracket(threshold) {
            Bracket::AllAbove => {
                if threshold >= self.min_cost() - EPS {
                    Some(self.min_reward())
                } else {
                    None
                }
            }
            Bracket::AllBelow => Some(self.max_reward()),
            Bracket::Pair { low, high } => {
                let (a, b) = (self.vertices[low], self.vertices[high]);
                if low == high {
                    Some(a.reward)
                } else {
                    let f = (threshold - a.cost) / (b.cost - a.cost);
                    Some(a.reward + f * (b.reward - a.reward))
                }
            }
        }
    }

    /// Support function `max_v (w_r·reward − w_c·cost)`.
    pub fn support(&self, w_c: f64, w_r: f64) -> f64 {
        support(&self.vertices, w_c, w_r)
    }

    /// Drops vertices that sit within `eps` (vertically) of the chord between
    /// their neighbours. `eps = 0` leaves the curve untouched.
    pub fn simplified(&self, eps: f64) -> ParetoCurve {
        if eps <= 0.0 || self.vertices.len() <= 2 {
            return self.clone();
        }
        let mut out: Vec<Point> = Vec::with_capacity(self.vertices.len());
        out.push(self.vertices[0]);
        for i in 1..self.vertices.len() - 1 {
            let (a, b, c) = (out[out.len() - 1], self.vertices[i], self.vertices[i + 1]);
            let f = (b.cost - a.cost) / (c.cost - a.cost);
            let chord = a.reward + f * (c.reward - a.reward);
            if b.reward - chord > eps {
                out.push(b);
            }
        }
        out.push(self.vertices[self.vertices.len() - 1]);
        ParetoCurve { vertices: out }
    }
}

impl fmt::Display for ParetoCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.vertices.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

pub fn support(points: &[Point], w_c: f64, w_r: f64) -> f64 {
    points.iter().map(|p| w_r * p.reward - w_c * p.cost).fold(f64::NEG_INFINITY, f64::max)
}

fn bracket_costs(costs: impl Iterator<Item = f64>, threshold: f64) -> Bracket {
    let mut low: Option<usize> = None;
    let mut high: Option<usize> = None;
    for (i, c) in costs.enumerate() {
        if c <= threshold {
            low = Some(i);
        }
        if c >= threshold && high.is_none() {
            high = Some(i);
        }
    }
    match (low, high) {
        (None, _) => Bracket::AllAbove,
        (_, None) => Bracket::AllBelow,
        (Some(low), Some(high)) => Bracket::Pair { low, high },
    }
}

/// Bracket over a labelled frontier (sorted by cost).
pub fn bracket_labeled<L>(frontier: &[(Point, L)], threshold: f64) -> Bracket {
    bracket_costs(frontier.iter().map(|(p, _)| p.cost), threshold)
}

/// Frontier of a labelled point set. Labels follow their points; among
/// coinciding points the smallest label wins.
pub fn prune_labeled<L: Copy + Ord>(mut items: Vec<(Point, L)>) -> Result<Vec<(Point, L)>> {
    frontier_in_place(&mut items, |&(p, _)| p, |(_, la), (_, lb)| la.cmp(lb))?;
    Ok(items)
}

/// Sorts `items` and truncates them to the upper-left concave frontier: a
/// staircase filter for pointwise dominance fused with an upper hull scan.
fn frontier_in_place<T: Copy>(
    items: &mut Vec<T>,
    point: impl Fn(&T) -> Point,
    tie: impl Fn(&T, &T) -> Ordering,
) -> Result<()> {
    if items.is_empty() {
        return Err(Error::InvalidArgument("cannot prune an empty point set".into()));
    }
    if let Some(p) = items.iter().map(&point).find(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite point {p}")));
    }
    items.sort_by(|x, y| {
        let (a, b) = (point(x), point(y));
        a.cost.total_cmp(&b.cost).then(b.reward.total_cmp(&a.reward)).then_with(|| tie(x, y))
    });
    let mut w = 0;
    for i in 0..items.len() {
        let item = items[i];
        let p = point(&item);
        if w > 0 {
            let last = point(&items[w - 1]);
            if p.reward <= last.reward + EPS {
                continue;
            }
            if p.cost - last.cost <= EPS {
                w -= 1;
            }
        }
        while w >= 2 {
            let a = point(&items[w - 2]);
            let b = point(&items[w - 1]);
            let cross = (b.cost - a.cost) * (p.reward - a.reward) - (b.reward - a.reward) * (p.cost - a.cost);
            if cross >= -1e-12 {
                w -= 1;
            } else {
                break;
            }
        }
        items[w] = item;
        w += 1;
    }
    items.truncate(w);
    Ok(())
}

/// Vertices of the upper-left concave frontier of a point set.
pub fn prune(points: &[Point]) -> Result<ParetoCurve> {
    prune_owned(points.to_vec())
}

/// [`prune`] reusing the buffer of `points`.
pub fn prune_owned(mut points: Vec<Point>) -> Result<ParetoCurve> {
    frontier_in_place(&mut points, |&p| p, |_, _| Ordering::Equal)?;
    Ok(ParetoCurve { vertices: points })
}

/// Frontier of the union of several curves.
pub fn merge_decision_curve<'a, I>(curves: I) -> Result<ParetoCurve>
where
    I: IntoIterator<Item = &'a ParetoCurve>,
{
    let mut points: Vec<Point> = Vec::new();
    for c in curves {
        points.extend_from_slice(&c.vertices);
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("no curves to merge".into()));
    }
    prune_owned(points)
}

struct Segment {
    successor: usize,
    dc: f64,
    dr: f64,
    // endpoint vertex index on the successor's own curve
    to: usize,
}

fn check_probabilities(successors: &[Successor<'_>]) -> Result<()> {
    if successors.is_empty() {
        return Err(Error::InvalidArgument("action has no successors".into()));
    }
    let mut total = 0.0;
    for s in successors {
        if !(s.prob >= 0.0) || !s.prob.is_finite() {
            return Err(Error::InvalidArgument(format!("invalid probability {}", s.prob)));
        }
        total += s.prob;
    }
    if (total - 1.0).abs() > PROB_TOLERANCE {
        return Err(Error::InvalidArgument(format!("probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Starting point (every successor at its cheapest vertex) and the segment
/// list sorted by decreasing slope, ties by successor index.
fn slope_merge(successors: &[Successor<'_>], gamma_c: f64, gamma_r: f64) -> (Point, Vec<Segment>) {
    let mut start = Point::ORIGIN;
    let mut segments = Vec::new();
    for (i, s) in successors.iter().enumerate() {
        if s.prob == 0.0 {
            continue;
        }
        let v = s.curve.vertices();
        start.cost += s.prob * (gamma_c * v[0].cost + s.cost);
        start.reward += s.prob * (gamma_r * v[0].reward + s.reward);
        for k in 1..v.len() {
            segments.push(Segment {
                successor: i,
                dc: s.prob * gamma_c * (v[k].cost - v[k - 1].cost),
                dr: s.prob * gamma_r * (v[k].reward - v[k - 1].reward),
                to: k,
            });
        }
    }
    // dr_a/dc_a > dr_b/dc_b  <=>  dr_a·dc_b > dr_b·dc_a  (all dc > 0)
    segments.sort_by(|a, b| {
        (b.dr * a.dc)
            .partial_cmp(&(a.dr * b.dc))
            .unwrap_or(Ordering::Equal)
            .then(a.successor.cmp(&b.successor))
            .then(a.to.cmp(&b.to))
    });
    (start, segments)
}

/// Frontier of `Σ_s p_s·(P_s·(γ_c, γ_r) + {(c_s, r_s)})`.
pub fn backup_action_curve(successors: &[Successor<'_>], gamma_c: f64, gamma_r: f64) -> Result<ParetoCurve> {
    check_probabilities(successors)?;
    let (start, segments) = slope_merge(successors, gamma_c, gamma_r);
    let mut points = Vec::with_capacity(segments.len() + 1);
    let mut cur = start;
    points.push(cur);
    for s in &segments {
        cur = Point::new(cur.cost + s.dc, cur.reward + s.dr);
        points.push(cur);
    }
    prune_owned(points)
}

/// Cost and reward range `[min, max]` of the backed-up action curve without
/// materialising it.
pub fn backup_cost_range(successors: &[Successor<'_>], gamma_c: f64) -> (f64, f64) {
    let mut lo = 0.0;
    let mut hi = 0.0;
    for s in successors {
        lo += s.prob * (gamma_c * s.curve.min_cost() + s.cost);
        hi += s.prob * (gamma_c * s.curve.max_cost() + s.cost);
    }
    (lo, hi)
}

/// Splits a target cost of the backed-up action curve into one point per
/// successor, maximising the combined reward.
///
/// Every successor starts at its cheapest vertex; the remaining budget buys
/// segments in decreasing reward-per-cost order. The returned points are in
/// each successor's own (undiscounted) coordinates.
pub fn decompose(successors: &[Successor<'_>], gamma_c: f64, gamma_r: f64, target_cost: f64) -> Result<Decomposition> {
    check_probabilities(successors)?;
    let (start, segments) = slope_merge(successors, gamma_c, gamma_r);
    let total: f64 = segments.iter().map(|s| s.dc).sum();
    let tol = EPS * (1.0 + target_cost.abs());
    if target_cost < start.cost - tol || target_cost > start.cost + total + tol {
        return Err(Error::InvalidArgument(format!(
            "target cost {target_cost} outside [{}, {}]",
            start.cost,
            start.cost + total
        )));
    }
    let mut points: Vec<Point> = successors.iter().map(|s| s.curve.vertices()[0]).collect();
    let mut reward = start.reward;
    let mut remaining = (target_cost - start.cost).max(0.0);
    for s in &segments {
        if remaining <= 0.0 {
            break;
        }
        let v = successors[s.successor].curve.vertices();
        if remaining >= s.dc {
            points[s.successor] = v[s.to];
            reward += s.dr;
            remaining -= s.dc;
        } else {
            let f = remaining / s.dc;
            points[s.successor] = Point::lerp(v[s.to - 1], v[s.to], f);
            reward += f * s.dr;
            remaining = 0.0;
        }
    }
    Ok(Decomposition { points, reward })
}

/// Distance from a point to the polyline through `curve`'s vertices.
fn distance_to_polyline(p: Point, curve: &[Point]) -> f64 {
    let seg_dist = |a: Point, b: Point| {
        let (dx, dy) = (b.cost - a.cost, b.reward - a.reward);
        let len2 = dx * dx + dy * dy;
        let t = if len2 == 0.0 {
            0.0
        } else {
            (((p.cost - a.cost) * dx + (p.reward - a.reward) * dy) / len2).clamp(0.0, 1.0)
        };
        let q = Point::lerp(a, b, t);
        ((p.cost - q.cost).powi(2) + (p.reward - q.reward).powi(2)).sqrt()
    };
    if curve.len() == 1 {
        return seg_dist(curve[0], curve[0]);
    }
    curve.windows(2).map(|w| seg_dist(w[0], w[1])).fold(f64::INFINITY, f64::min)
}

/// Symmetric vertex-to-polyline Hausdorff distance between two frontiers.
pub fn hausdorff_distance(a: &ParetoCurve, b: &ParetoCurve) -> f64 {
    let ab = a.vertices.iter().map(|&p| distance_to_polyline(p, &b.vertices)).fold(0.0, f64::max);
    let ba = b.vertices.iter().map(|&p| distance_to_polyline(p, &a.vertices)).fold(0.0, f64::max);
    ab.max(ba)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(f64, f64)]) -> Vec<Point> {
        v.iter().map(|&(c, r)| Point::new(c, r)).collect()
    }

    fn curve(v: &[(f64, f64)]) -> ParetoCurve {
        prune(&pts(v)).unwrap()
    }

    /// A point survives iff no support direction makes it strictly worse
    /// than the set maximum while some direction makes it optimal. Checked by
    /// scanning directions on a fine grid.
    fn oracle_frontier(points: &[Point]) -> Vec<Point> {
        let mut keep = Vec::new();
        for &p in points {
            let mut exposed = false;
            for k in 0..=2000 {
                let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 2000.0;
                let (wc, wr) = (theta.cos(), theta.sin());
                let best = support(points, wc, wr);
                if (wr * p.reward - wc * p.cost) >= best - 1e-12 {
                    exposed = true;
                    break;
                }
            }
            if exposed
                && !keep.iter().any(|q: &Point| (q.cost - p.cost).abs() < EPS && (q.reward - p.reward).abs() < EPS)
            {
                keep.push(p);
            }
        }
        keep.sort_by(|a, b| a.cost.total_cmp(&b.cost));
        keep
    }

    #[test]
    fn prune_singleton() {
        assert_eq!(curve(&[(0.0, 0.0)]).vertices(), &pts(&[(0.0, 0.0)])[..]);
    }

    #[test]
    fn prune_drops_point_under_chord() {
        let input = pts(&[(0.0, 0.0), (1.0, 1.0), (0.5, 0.4)]);
        let expected = oracle_frontier(&input);
        assert_eq!(expected, pts(&[(0.0, 0.0), (1.0, 1.0)]));
        assert_eq!(prune(&input).unwrap().vertices(), &expected[..]);
    }

    #[test]
    fn prune_keeps_point_above_chord() {
        let input = pts(&[(0.0, 0.0), (0.5, 0.9), (1.0, 1.0)]);
        let expected = oracle_frontier(&input);
        assert_eq!(expected.len(), 3);
        assert_eq!(prune(&input).unwrap().vertices(), &expected[..]);
    }

    #[test]
    fn prune_pointwise_dominance() {
        assert_eq!(curve(&[(1.0, 1.0), (2.0, 1.0)]).vertices(), &pts(&[(1.0, 1.0)])[..]);
    }

    #[test]
    fn prune_rejects_empty_and_nan() {
        assert!(matches!(prune(&[]), Err(Error::InvalidArgument(_))));
        assert!(prune(&[Point::new(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn backup_translation_only() {
        let c = ParetoCurve::origin();
        let s = [Successor { prob: 1.0, curve: &c, cost: 1.0, reward: 2.0 }];
        assert_eq!(backup_action_curve(&s, 1.0, 1.0).unwrap().vertices(), &pts(&[(1.0, 2.0)])[..]);
    }

    #[test]
    fn backup_counterexample_node() {
        // Root action of the two-step counterexample: outcome s2 can trade
        // cost for reward one-to-one, outcome s3 is stuck at cost 1.
        let s2 = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        let s3 = curve(&[(1.0, 0.0)]);
        let s = [
            Successor { prob: 0.5, curve: &s2, cost: 0.0, reward: 0.0 },
            Successor { prob: 0.5, curve: &s3, cost: 0.0, reward: 0.0 },
        ];
        let out = backup_action_curve(&s, 1.0, 1.0).unwrap();
        assert_eq!(out.vertices(), &pts(&[(0.5, 0.0), (1.0, 0.5)])[..]);
    }

    #[test]
    fn backup_scales_per_dimension() {
        let c = curve(&[(0.0, 0.0), (2.0, 4.0)]);
        let s = [Successor { prob: 1.0, curve: &c, cost: 0.0, reward: 0.0 }];
        let out = backup_action_curve(&s, 0.5, 0.25).unwrap();
        assert_eq!(out.vertices(), &pts(&[(0.0, 0.0), (1.0, 1.0)])[..]);
    }

    #[test]
    fn backup_rejects_bad_probabilities() {
        let c = ParetoCurve::origin();
        let s = [Successor { prob: 0.7, curve: &c, cost: 0.0, reward: 0.0 }];
        assert!(matches!(backup_action_curve(&s, 1.0, 1.0), Err(Error::InvalidArgument(_))));
        let s = [
            Successor { prob: -0.1, curve: &c, cost: 0.0, reward: 0.0 },
            Successor { prob: 1.1, curve: &c, cost: 0.0, reward: 0.0 },
        ];
        assert!(backup_action_curve(&s, 1.0, 1.0).is_err());
    }

    #[test]
    fn merge_examples() {
        let a = curve(&[(0.0, 0.0)]);
        let b = curve(&[(1.0, 1.0)]);
        assert_eq!(merge_decision_curve([&a, &b]).unwrap(), curve(&[(0.0, 0.0), (1.0, 1.0)]));
        let a = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        let b = curve(&[(0.5, 0.4)]);
        assert_eq!(merge_decision_curve([&a, &b]).unwrap(), a);
        assert_eq!(merge_decision_curve([&a]).unwrap(), a);
        assert!(merge_decision_curve(std::iter::empty()).is_err());
    }

    #[test]
    fn bracket_examples() {
        let c = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(c.bracket(0.25), Bracket::Pair { low: 0, high: 1 });
        assert_eq!(c.bracket(2.0), Bracket::AllBelow);
        assert_eq!(c.bracket(1.0), Bracket::Pair { low: 1, high: 1 });
        let c = curve(&[(0.5, 0.0), (1.0, 0.5)]);
        assert_eq!(c.bracket(0.3), Bracket::AllAbove);
    }

    #[test]
    fn max_reward_examples() {
        let c = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(c.max_reward_at(0.5), Some(0.5));
        assert_eq!(c.max_reward_at(3.0), Some(1.0));
        assert_eq!(curve(&[(0.5, 0.0)]).max_reward_at(0.4), None);
        assert_eq!(curve(&[(0.5, 0.0)]).max_reward_at(0.5), Some(0.0));
    }

    #[test]
    fn decompose_counterexample() {
        let s2 = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        let s3 = curve(&[(1.0, 0.0)]);
        let s = [
            Successor { prob: 0.5, curve: &s2, cost: 0.0, reward: 0.0 },
            Successor { prob: 0.5, curve: &s3, cost: 0.0, reward: 0.0 },
        ];
        let d = decompose(&s, 1.0, 1.0, 0.5).unwrap();
        assert_eq!(d.points, pts(&[(0.0, 0.0), (1.0, 0.0)]));
        assert_eq!(d.reward, 0.0);
        let d = decompose(&s, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(d.points, pts(&[(1.0, 1.0), (1.0, 0.0)]));
        assert_eq!(d.reward, 0.5);
        assert!(decompose(&s, 1.0, 1.0, 0.3).is_err());
        assert!(decompose(&s, 1.0, 1.0, 1.2).is_err());
    }

    #[test]
    fn decompose_passthrough() {
        let c = curve(&[(0.0, 0.0), (2.0, 2.0)]);
        let s = [Successor { prob: 1.0, curve: &c, cost: 0.0, reward: 0.0 }];
        let d = decompose(&s, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(d.points, pts(&[(1.0, 1.0)]));
        assert_eq!(d.reward, 1.0);
    }

    #[test]
    fn decompose_ties_go_to_lowest_successor() {
        let a = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        let b = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        let s = [
            Successor { prob: 0.5, curve: &a, cost: 0.0, reward: 0.0 },
            Successor { prob: 0.5, curve: &b, cost: 0.0, reward: 0.0 },
        ];
        let d = decompose(&s, 1.0, 1.0, 0.25).unwrap();
        assert_eq!(d.points, pts(&[(0.5, 0.5), (0.0, 0.0)]));
    }

    #[test]
    fn simplify_is_off_at_zero() {
        let c = curve(&[(0.0, 0.0), (0.5, 0.5000001), (1.0, 1.0)]);
        assert_eq!(c.simplified(0.0), c);
        assert_eq!(c.simplified(1e-3).len(), 2);
    }

    #[test]
    fn hausdorff_of_equal_curves_is_zero() {
        let c = curve(&[(0.0, 0.0), (0.5, 0.9), (1.0, 1.0)]);
        assert_eq!(hausdorff_distance(&c, &c), 0.0);
        let d = curve(&[(0.0, 0.0), (1.0, 1.0)]);
        assert!(hausdorff_distance(&c, &d) > 0.1);
    }
}
