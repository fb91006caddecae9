use std::path::Path;

use tuct::harness::{
    load_config, parse_config, read_rows, run_experiment, summarize_rows, write_episodes, EpisodeRow, Execution,
    ExperimentResult,
};

const MIXED: &str = r#"
[experiment.a]
env = "cmdp-a"
algorithm = ["tuct", "ccpomcp", "ramcp"]
delta = [0.25, 0.5]
horizon = 2
iterations = 200
episodes = 12
seed = 3

[experiment.grid]
env = "gridworld"
maps = "data/GridworldSmall-mini.txt"
map = 2
mode = ["avoid", "softavoid"]
p_trap = 0.5
p_slide = 0.2
algorithm = ["tuct", "ramcp"]
delta = 0.1
horizon = 8
iterations = 100
episodes = 6
seed = 4
"#;

fn run_all(text: &str, execution: Execution) -> Vec<ExperimentResult> {
    parse_config(text, Path::new(env!("CARGO_MANIFEST_DIR")))
        .unwrap()
        .iter()
        .map(|c| run_experiment(c, execution).unwrap())
        .collect()
}

fn csv_bytes(results: &[ExperimentResult]) -> Vec<u8> {
    let mut out = Vec::new();
    write_episodes(&mut out, results, true).unwrap();
    out
}

#[test]
fn reruns_produce_identical_bytes() {
    let a = csv_bytes(&run_all(MIXED, Execution::Parallel));
    let b = csv_bytes(&run_all(MIXED, Execution::Parallel));
    let c = csv_bytes(&run_all(MIXED, Execution::Sequential));
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[cfg(feature = "parallel")]
#[test]
fn thread_count_does_not_change_results() {
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let one = pool(1).install(|| csv_bytes(&run_all(MIXED, Execution::Parallel)));
    let four = pool(4).install(|| csv_bytes(&run_all(MIXED, Execution::Parallel)));
    assert_eq!(one, four);
}

#[test]
fn summaries_round_trip_through_csv() {
    let results = run_all(MIXED, Execution::Parallel);
    let rows: Vec<EpisodeRow> = read_rows(csv_bytes(&results).as_slice()).unwrap();
    assert_eq!(rows.len(), results.iter().map(|r| r.episodes.len()).sum::<usize>());
    assert!(rows.iter().all(|r| r.wall_ms_per_step.is_none()));
    let again = summarize_rows(&rows).unwrap();
    assert_eq!(again.len(), results.len());
    for (s, r) in again.iter().zip(&results) {
        assert_eq!(s, &r.summary);
    }
}

#[test]
fn chain_cost_is_deterministic() {
    let results = run_all(
        r#"
        [experiment.chain]
        env = "chain"
        length = 6
        reward = 1.0
        cost = 0.25
        algorithm = ["tuct", "ccpomcp", "ramcp"]
        delta = 2.0
        horizon = 4
        gamma_c = 0.5
        iterations = 30
        episodes = 5
        "#,
        Execution::Parallel,
    );
    let expected = 0.25 * (1.0 + 0.5 + 0.25 + 0.125);
    for r in &results {
        assert!((r.summary.c_hat - expected).abs() < 1e-12, "{}: {}", r.config.algorithm, r.summary.c_hat);
        assert_eq!(r.summary.cost_std, 0.0);
        assert!(r.summary.sat_m && r.summary.sat_w);
    }
}

#[test]
fn config_files_resolve_maps_next_to_them() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(
        Path::new(env!("CARGO_MANIFEST_DIR")).join("data/GridworldSmall-mini.txt"),
        dir.path().join("maps.txt"),
    )
    .unwrap();
    let path = dir.path().join("exp.toml");
    std::fs::write(
        &path,
        "[experiment.g]\nenv = \"gridworld\"\nmaps = \"maps.txt\"\nmap = \"all\"\nmode = \"avoid\"\np_trap = 0.5\np_slide = 0.0\nalgorithm = \"tuct\"\ndelta = 0.0\nhorizon = 5\niterations = 10\nepisodes = 2\n",
    )
    .unwrap();
    let configs = load_config(&path).unwrap();
    assert_eq!(configs.len(), 16);
    let ids: std::collections::HashSet<_> = configs.iter().map(|c| c.id.clone()).collect();
    assert_eq!(ids.len(), 16);
}
