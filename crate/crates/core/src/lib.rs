//! Online planning for finite-horizon constrained MDPs.
//!
//! The crate provides Threshold UCT ([`tuct`]), a Monte Carlo tree search
//! that keeps piecewise-linear Pareto curves of (cost, reward) tradeoffs in
//! every node, together with two baselines ([`baselines`]), benchmark
//! environments ([`envs`]) and a seeded experiment harness ([`harness`]).

pub mod baselines;
pub mod cmdp;
pub mod envs;
pub mod error;
pub mod harness;
pub mod pareto;
pub mod record;
pub mod tuct;

pub use error::{Error, Result};

/// Random generator used for every stochastic call.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Independent environment and planner generators for one episode seed.
///
/// Real transitions draw from the first stream only, so planners that face
/// no choice see identical trajectories for the same seed.
pub fn episode_rngs(seed: u64) -> (SimRng, SimRng) {
    use rand::SeedableRng;
    let mut env = SimRng::seed_from_u64(seed);
    env.set_stream(0);
    let mut planner = SimRng::seed_from_u64(seed);
    planner.set_stream(1);
    (env, planner)
}
