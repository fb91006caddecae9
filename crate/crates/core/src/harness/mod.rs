//! Experiment orchestration: configuration grids, seeded episodes, the
//! satisfaction metrics and CSV output.

mod config;
mod csvio;
mod metrics;
mod run;

pub use config::{load_config, parse_config, Algorithm, EnvSpec, ExperimentConfig};
pub use csvio::{
    episode_rows, read_rows, summarize_rows, write_episodes, write_rows, write_summaries, EpisodeRow, SummaryRow,
};
pub use metrics::{
    joint_payoff_comparison, sat_mean, sat_weak, sat_weak_fraction, summarize, JointComparison, MetricsSummary,
    WEAK_SLACK, Z_95,
};
pub use run::{
    episode_seed, run_episode, run_experiment, splitmix64, summarize_episodes, EnvInstance, EpisodeRecord, Execution,
    ExperimentResult,
};
