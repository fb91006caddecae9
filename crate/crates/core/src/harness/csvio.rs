use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::metrics::{summarize, MetricsSummary};
use super::run::ExperimentResult;
use crate::error::{Error, Result};

/// One row of the episode CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRow {
    pub config_id: String,
    pub algorithm: String,
    pub env: String,
    pub delta: f64,
    pub seed: u64,
    pub episode: usize,
    pub payoff: f64,
    pub cost: f64,
    pub steps: usize,
    pub samples_per_step: f64,
    /// Empty when timing is omitted for byte-stable output.
    pub wall_ms_per_step: Option<f64>,
}

/// One row of the summary CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub config_id: String,
    pub algorithm: String,
    pub r_hat: f64,
    pub c_hat: f64,
    pub cost_std: f64,
    pub sat_m: bool,
    pub sat_w: bool,
    pub mean_samples: f64,
}

impl From<&MetricsSummary> for SummaryRow {
    fn from(s: &MetricsSummary) -> Self {
        Self {
            config_id: s.config_id.clone(),
            algorithm: s.algorithm.clone(),
            r_hat: s.r_hat,
            c_hat: s.c_hat,
            cost_std: s.cost_std,
            sat_m: s.sat_m,
            sat_w: s.sat_w,
            mean_samples: s.mean_samples,
        }
    }
}

pub fn episode_rows(result: &ExperimentResult, omit_timing: bool) -> Vec<EpisodeRow> {
    let c = &result.config;
    result
        .episodes
        .iter()
        .map(|e| EpisodeRow {
            config_id: c.id.clone(),
            algorithm: c.algorithm.to_string(),
            env: c.env.name().to_string(),
            delta: c.delta,
            seed: e.seed,
            episode: e.episode,
            payoff: e.record.payoff,
            cost: e.record.cost,
            steps: e.record.steps,
            samples_per_step: e.record.samples_per_step,
            wall_ms_per_step: (!omit_timing).then_some(e.record.wall_ms_per_step),
        })
        .collect()
}

pub fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_episodes<W: Write>(out: W, results: &[ExperimentResult], omit_timing: bool) -> Result<()> {
    let rows: Vec<EpisodeRow> = results.iter().flat_map(|r| episode_rows(r, omit_timing)).collect();
    write_rows(out, &rows)
}

pub fn write_summaries<W: Write>(out: W, summaries: &[MetricsSummary]) -> Result<()> {
    let rows: Vec<SummaryRow> = summaries.iter().map(SummaryRow::from).collect();
    write_rows(out, &rows)
}

pub fn read_rows<R: Read, T: for<'de> Deserialize<'de>>(input: R) -> Result<Vec<T>> {
    csv::Reader::from_reader(input).deserialize().map(|r| r.map_err(Error::from)).collect()
}

/// Recomputes the summaries of an episode CSV, one per
/// `(config_id, algorithm)` in order of first appearance.
pub fn summarize_rows(rows: &[EpisodeRow]) -> Result<Vec<MetricsSummary>> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        let k = (r.config_id.as_str(), r.algorithm.as_str());
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(id, alg)| {
            let mut group: Vec<&EpisodeRow> = rows.iter().filter(|r| r.config_id == id && r.algorithm == alg).collect();
            group.sort_by_key(|r| r.episode);
            let col = |f: fn(&EpisodeRow) -> f64| group.iter().map(|r| f(r)).collect::<Vec<_>>();
            summarize(id, alg, group[0].delta, &col(|r| r.payoff), &col(|r| r.cost), &col(|r| r.samples_per_step))
        })
        .collect()
}
