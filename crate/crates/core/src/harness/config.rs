//! Experiment files.
//!
//! ```toml
//! [experiment.small]
//! env = "gridworld"
//! maps = "data/GridworldSmall-mini.txt"
//! map = "all"
//! mode = "avoid"
//! p_trap = [0.2, 0.5]
//! p_slide = [0.0, 0.2]
//! algorithm = ["tuct", "ccpomcp", "ramcp"]
//! delta = [0.0, 0.15, 0.35]
//! horizon = 20
//! iterations = 1000
//! episodes = 100
//! seed = 7
//! ```
//!
//! Every list-valued key is a grid axis; each section expands to the
//! Cartesian product of its axes. Relative map paths resolve against the
//! directory of the config file.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;
use toml::{Table, Value};

use crate::cmdp::RandomCmdpParams;
use crate::envs::{parse_dataset, DeliveryConfig, GridMap, GridworldConfig, TrapMode};
use crate::error::{Error, Result};
use crate::tuct::{Budget, PlannerConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Tuct,
    CcPomcp,
    Ramcp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Tuct, Algorithm::CcPomcp, Algorithm::Ramcp];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Tuct => "tuct",
            Algorithm::CcPomcp => "ccpomcp",
            Algorithm::Ramcp => "ramcp",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}; expected tuct, ccpomcp or ramcp")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum EnvSpec {
    Gridworld {
        /// Dataset path as written in the config.
        source: String,
        index: usize,
        map: Arc<GridMap>,
        config: GridworldConfig,
    },
    Delivery(DeliveryConfig),
    CmdpA,
    Chain {
        length: usize,
        reward: f64,
        cost: f64,
    },
    RandomCmdp {
        params: RandomCmdpParams,
        seed: u64,
    },
}

impl EnvSpec {
    /// Short name written to the `env` CSV column.
    pub fn name(&self) -> &'static str {
        match self {
            EnvSpec::Gridworld { config, .. } => match config.mode {
                TrapMode::Avoid => "gridworld-avoid",
                TrapMode::SoftAvoid => "gridworld-softavoid",
            },
            EnvSpec::Delivery(_) => "delivery",
            EnvSpec::CmdpA => "cmdp-a",
            EnvSpec::Chain { .. } => "chain",
            EnvSpec::RandomCmdp { .. } => "random-cmdp",
        }
    }
}

/// One point of an experiment grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Section name plus the grid coordinates other than the algorithm, so
    /// that algorithms run on the same instance share an id.
    pub id: String,
    pub env: EnvSpec,
    pub algorithm: Algorithm,
    pub delta: f64,
    pub horizon: usize,
    pub gamma_r: f64,
    pub gamma_c: f64,
    pub planner: PlannerConfig,
    pub episodes: usize,
    pub seed: u64,
    pub dense_lp_limit: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.episodes < 2 {
            return Err(Error::Config(format!("{}: at least 2 episodes are needed, got {}", self.id, self.episodes)));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::Config(format!("{}: threshold {} must be a nonnegative real", self.id, self.delta)));
        }
        self.planner.validate()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    env: String,
    algorithm: String,
    delta: f64,
    horizon: usize,
    #[serde(default = "one")]
    gamma_r: f64,
    #[serde(default = "one")]
    gamma_c: f64,
    iterations: Option<usize>,
    time_ms: Option<f64>,
    #[serde(default = "default_episodes")]
    episodes: usize,
    #[serde(default)]
    seed: u64,
    exploration: Option<f64>,
    rollout_depth: Option<usize>,
    #[serde(default)]
    exact_dynamics: bool,
    dense_lp_limit: Option<usize>,

    maps: Option<String>,
    map: Option<usize>,
    mode: Option<String>,
    p_trap: Option<f64>,
    p_slide: Option<f64>,

    columns: Option<usize>,
    rows: Option<usize>,
    spacing_km: Option<f64>,
    one_way: Option<f64>,
    targets: Option<usize>,
    period: Option<u32>,
    radius_km: Option<f64>,
    delay: Option<u32>,
    graph_seed: Option<u64>,

    length: Option<usize>,
    reward: Option<f64>,
    cost: Option<f64>,

    states: Option<usize>,
    actions: Option<usize>,
    max_successors: Option<usize>,
    cost_density: Option<f64>,
    terminal_prob: Option<f64>,
    model_seed: Option<u64>,
}

fn one() -> f64 {
    1.0
}

fn default_episodes() -> usize {
    300
}

fn need<T>(v: Option<T>, key: &str, section: &str) -> Result<T> {
    v.ok_or_else(|| Error::Config(format!("[experiment.{section}] needs `{key}`")))
}

#[derive(Default)]
struct MapCache {
    datasets: HashMap<PathBuf, Arc<Vec<Arc<GridMap>>>>,
}

impl MapCache {
    fn load(&mut self, path: &Path) -> Result<Arc<Vec<Arc<GridMap>>>> {
        if let Some(d) = self.datasets.get(path) {
            return Ok(d.clone());
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read map dataset {}: {e}", path.display())))?;
        let maps = Arc::new(parse_dataset(&text)?.into_iter().map(Arc::new).collect::<Vec<_>>());
        if maps.is_empty() {
            return Err(Error::Config(format!("map dataset {} is empty", path.display())));
        }
        self.datasets.insert(path.to_path_buf(), maps.clone());
        Ok(maps)
    }
}

fn value_label(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn expand_section(name: &str, section: &Table, base_dir: &Path, cache: &mut MapCache) -> Result<Vec<ExperimentConfig>> {
    let mut section = section.clone();
    if section.get("map").and_then(Value::as_str) == Some("all") {
        let maps = section
            .get("maps")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Config(format!("[experiment.{name}] uses map = \"all\" without `maps`")))?;
        let count = cache.load(&base_dir.join(maps))?.len();
        section.insert("map".into(), Value::Array((0..count as i64).map(Value::Integer).collect()));
    }
    let (axes, fixed): (BTreeMap<_, _>, BTreeMap<_, _>) = section.into_iter().partition(|(_, v)| v.is_array());
    let axes: Vec<(String, Vec<Value>)> = axes
        .into_iter()
        .map(|(k, v)| match v {
            Value::Array(a) if a.is_empty() => {
                Err(Error::Config(format!("[experiment.{name}] `{k}` is an empty list")))
            }
            Value::Array(a) => Ok((k, a)),
            _ => unreachable!(),
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut idx = vec![0usize; axes.len()];
    loop {
        let mut table: Table = fixed.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut coords = Vec::new();
        for ((k, vals), &i) in axes.iter().zip(&idx) {
            table.insert(k.clone(), vals[i].clone());
            if k != "algorithm" {
                coords.push(format!("{k}={}", value_label(&vals[i])));
            }
        }
        let id = if coords.is_empty() { name.to_string() } else { format!("{name}[{}]", coords.join(",")) };
        out.push(build(name, id, table, base_dir, cache)?);
        // odometer increment, last axis fastest
        let mut k = axes.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].1.len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn build(section: &str, id: String, table: Table, base_dir: &Path, cache: &mut MapCache) -> Result<ExperimentConfig> {
    let raw: RawConfig =
        Value::Table(table).try_into().map_err(|e| Error::Config(format!("[experiment.{section}]: {e}")))?;
    let env = match raw.env.as_str() {
        "gridworld" => {
            let source = need(raw.maps, "maps", section)?;
            let maps = cache.load(&base_dir.join(&source))?;
            let index = need(raw.map, "map", section)?;
            let map = maps
                .get(index)
                .cloned()
                .ok_or_else(|| Error::Config(format!("map {index} out of range; {source} has {} maps", maps.len())))?;
            let mode = match need(raw.mode, "mode", section)?.as_str() {
                "avoid" => TrapMode::Avoid,
                "softavoid" | "soft-avoid" | "soft_avoid" => TrapMode::SoftAvoid,
                other => return Err(Error::Config(format!("unknown gridworld mode {other:?}"))),
            };
            let config = GridworldConfig {
                mode,
                p_trap: need(raw.p_trap, "p_trap", section)?,
                p_slide: raw.p_slide.unwrap_or(0.0),
            };
            EnvSpec::Gridworld { source, index, map, config }
        }
        "delivery" => {
            let d = DeliveryConfig::default();
            EnvSpec::Delivery(DeliveryConfig {
                columns: raw.columns.unwrap_or(d.columns),
                rows: raw.rows.unwrap_or(d.rows),
                spacing_km: raw.spacing_km.unwrap_or(d.spacing_km),
                one_way: raw.one_way.unwrap_or(d.one_way),
                targets: raw.targets.unwrap_or(d.targets),
                period: raw.period.unwrap_or(d.period),
                radius_km: raw.radius_km.unwrap_or(d.radius_km),
                delay: raw.delay.unwrap_or(d.delay),
                seed: raw.graph_seed.unwrap_or(d.seed),
            })
        }
        "cmdp-a" => EnvSpec::CmdpA,
        "chain" => EnvSpec::Chain {
            length: need(raw.length, "length", section)?,
            reward: raw.reward.unwrap_or(0.0),
            cost: raw.cost.unwrap_or(0.0),
        },
        "random-cmdp" => {
            let d = RandomCmdpParams::default();
            EnvSpec::RandomCmdp {
                params: RandomCmdpParams {
                    states: raw.states.unwrap_or(d.states),
                    actions: raw.actions.unwrap_or(d.actions),
                    max_successors: raw.max_successors.unwrap_or(d.max_successors),
                    cost_density: raw.cost_density.unwrap_or(d.cost_density),
                    terminal_prob: raw.terminal_prob.unwrap_or(d.terminal_prob),
                },
                seed: raw.model_seed.unwrap_or(0),
            }
        }
        other => return Err(Error::Config(format!("unknown environment {other:?}"))),
    };
    let budget = match (raw.iterations, raw.time_ms) {
        (Some(n), None) => Budget::Iterations(n),
        (None, Some(ms)) => Budget::WallClockMs(ms),
        (None, None) => Budget::Iterations(1000),
        (Some(_), Some(_)) => {
            return Err(Error::Config(format!("[experiment.{section}] sets both `iterations` and `time_ms`")))
        }
    };
    let defaults = PlannerConfig::default();
    let cfg = ExperimentConfig {
        id,
        env,
        algorithm: raw.algorithm.parse()?,
        delta: raw.delta,
        horizon: raw.horizon,
        gamma_r: raw.gamma_r,
        gamma_c: raw.gamma_c,
        planner: PlannerConfig {
            exploration: raw.exploration.unwrap_or(defaults.exploration),
            budget,
            rollout_depth: raw.rollout_depth,
            exact_dynamics: raw.exact_dynamics,
            simplify_eps: defaults.simplify_eps,
        },
        episodes: raw.episodes,
        seed: raw.seed,
        dense_lp_limit: raw.dense_lp_limit.unwrap_or(200),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Expands every `[experiment.<name>]` section, in name order.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<Vec<ExperimentConfig>> {
    let doc: Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
    let experiments = match doc.get("experiment") {
        Some(Value::Table(t)) if !t.is_empty() => t,
        _ => return Err(Error::Config("no [experiment.<name>] sections".into())),
    };
    if let Some(k) = doc.keys().find(|k| *k != "experiment") {
        return Err(Error::Config(format!("unexpected top-level key `{k}`")));
    }
    let mut cache = MapCache::default();
    let mut out = Vec::new();
    for (name, section) in experiments {
        let Value::Table(section) = section else {
            return Err(Error::Config(format!("experiment.{name} must be a table")));
        };
        out.extend(expand_section(name, section, base_dir, &mut cache)?);
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<Vec<ExperimentConfig>> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text, path.parent().unwrap_or(Path::new(".")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_expansion_and_ids() {
        let text = r#"
            [experiment.a]
            env = "cmdp-a"
            algorithm = ["tuct", "ccpomcp"]
            delta = [0, 0.5]
            horizon = 2
            episodes = 4
        "#;
        let cfgs = parse_config(text, Path::new(".")).unwrap();
        assert_eq!(cfgs.len(), 4);
        let ids: Vec<_> = cfgs.iter().map(|c| (c.id.as_str(), c.algorithm)).collect();
        assert_eq!(
            ids,
            vec![
                ("a[delta=0]", Algorithm::Tuct),
                ("a[delta=0.5]", Algorithm::Tuct),
                ("a[delta=0]", Algorithm::CcPomcp),
                ("a[delta=0.5]", Algorithm::CcPomcp),
            ]
        );
        assert_eq!(cfgs[1].delta, 0.5);
        assert_eq!(cfgs[0].planner.budget, Budget::Iterations(1000));
    }

    #[test]
    fn config_errors() {
        let bad = |t: &str| parse_config(t, Path::new(".")).unwrap_err().to_string();
        assert!(bad("").contains("no [experiment"));
        let base = "[experiment.x]\nenv = \"cmdp-a\"\nalgorithm = \"tuct\"\ndelta = 0.5\nhorizon = 2\n";
        assert!(bad(&format!("{base}episodes = 1\n")).contains("at least 2"));
        assert!(bad(&format!("{base}bogus = 1\n")).contains("bogus"));
        assert!(bad(&format!("{base}iterations = 5\ntime_ms = 3\n")).contains("both"));
        assert!(bad(&base.replace("\"tuct\"", "\"dqn\"")).contains("unknown algorithm"));
        assert!(bad(&format!("{base}seed = []\n")).contains("empty list"));
    }
}
