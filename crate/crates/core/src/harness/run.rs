use super::config::{Algorithm, EnvSpec, ExperimentConfig};
use super::metrics::{summarize, MetricsSummary};
use crate::baselines::{ccpomcp_plan_episode, ramcp_plan_episode, CcPomcpConfig, RamcpConfig};
use crate::cmdp::{GenerativeModel, ProblemSpec, TabularCmdp};
use crate::envs::{cmdp_a, Delivery, Gridworld};
use crate::error::{Error, Result};
use crate::record::RunRecord;
use crate::tuct::plan_episode;

/// SplitMix64 finaliser.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of episode `episode` under `base`.
pub fn episode_seed(base: u64, episode: usize) -> u64 {
    splitmix64(splitmix64(base) ^ episode as u64)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Episodes on the current rayon pool; sequential without the
    /// `parallel` feature.
    #[default]
    Parallel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub seed: u64,
    pub record: RunRecord,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub episodes: Vec<EpisodeRecord>,
    pub summary: MetricsSummary,
}

/// Model described by an [`EnvSpec`].
pub enum EnvInstance {
    Gridworld(Gridworld),
    Delivery(Delivery),
    Tabular(TabularCmdp),
}

impl EnvInstance {
    pub fn build(spec: &EnvSpec) -> Result<Self> {
        Ok(match spec {
            EnvSpec::Gridworld { map, config, .. } => EnvInstance::Gridworld(Gridworld::new(map.clone(), *config)?),
            EnvSpec::Delivery(c) => EnvInstance::Delivery(Delivery::generate(c.clone())?),
            EnvSpec::CmdpA => EnvInstance::Tabular(cmdp_a()),
            EnvSpec::Chain { length, reward, cost } => {
                EnvInstance::Tabular(TabularCmdp::chain(*length, *reward, *cost))
            }
            EnvSpec::RandomCmdp { params, seed } => EnvInstance::Tabular(TabularCmdp::random(*params, *seed)),
        })
    }
}

/// One episode of `config` on `model` with the given seed.
pub fn run_episode<M: GenerativeModel>(model: &M, config: &ExperimentConfig, seed: u64) -> Result<RunRecord> {
    let spec = ProblemSpec::for_model(model, config.horizon, config.gamma_r, config.gamma_c, config.delta)?;
    match config.algorithm {
        Algorithm::Tuct => plan_episode(model, &spec, &config.planner, seed),
        Algorithm::CcPomcp => {
            let cc = CcPomcpConfig { search: config.planner, ..CcPomcpConfig::default() };
            ccpomcp_plan_episode(model, &spec, &cc, seed)
        }
        Algorithm::Ramcp => {
            let rc = RamcpConfig { search: config.planner, dense_lp_limit: config.dense_lp_limit };
            ramcp_plan_episode(model, &spec, &rc, seed)
        }
    }
}

fn run_all<M: GenerativeModel>(
    model: &M,
    config: &ExperimentConfig,
    execution: Execution,
) -> Result<Vec<EpisodeRecord>> {
    let one = |episode: usize| {
        let seed = episode_seed(config.seed, episode);
        run_episode(model, config, seed)
            .map(|record| EpisodeRecord { episode, seed, record })
            .map_err(|e| Error::Episode { episode, seed, source: Box::new(e) })
    };
    let results: Vec<Result<EpisodeRecord>> = match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..config.episodes).into_par_iter().map(one).collect()
        }
        _ => (0..config.episodes).map(one).collect(),
    };
    results.into_iter().collect()
}

/// Runs every episode of `config` and aggregates them. Results do not
/// depend on the execution mode or thread count.
pub fn run_experiment(config: &ExperimentConfig, execution: Execution) -> Result<ExperimentResult> {
    config.validate()?;
    let episodes = match EnvInstance::build(&config.env)? {
        EnvInstance::Gridworld(m) => run_all(&m, config, execution)?,
        EnvInstance::Delivery(m) => run_all(&m, config, execution)?,
        EnvInstance::Tabular(m) => run_all(&m, config, execution)?,
    };
    let summary = summarize_episodes(config, &episodes)?;
    Ok(ExperimentResult { config: config.clone(), episodes, summary })
}

pub fn summarize_episodes(config: &ExperimentConfig, episodes: &[EpisodeRecord]) -> Result<MetricsSummary> {
    let col = |f: fn(&RunRecord) -> f64| episodes.iter().map(|e| f(&e.record)).collect::<Vec<_>>();
    summarize(
        &config.id,
        config.algorithm.as_str(),
        config.delta,
        &col(|r| r.payoff),
        &col(|r| r.cost),
        &col(|r| r.samples_per_step),
    )
}
