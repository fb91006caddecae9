use std::path::Path;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tuct::harness::{parse_config, run_experiment, Execution, ExperimentConfig};

fn configs() -> Vec<ExperimentConfig> {
    let text = r#"
        [experiment.bench]
        env = "gridworld"
        maps = "data/GridworldSmall-mini.txt"
        map = 0
        mode = "avoid"
        p_trap = 0.5
        p_slide = 0.2
        algorithm = ["tuct", "ccpomcp", "ramcp"]
        delta = 0.15
        horizon = 10
        iterations = 200
        episodes = 16
        seed = 1
    "#;
    parse_config(text, Path::new(env!("CARGO_MANIFEST_DIR"))).expect("bench config parses")
}

fn episodes(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);
    for config in configs() {
        let name = config.algorithm.to_string();
        for (label, execution) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
            group.bench_with_input(BenchmarkId::new(label, &name), &config, |b, config| {
                b.iter(|| run_experiment(config, execution).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, episodes);
criterion_main!(benches);
