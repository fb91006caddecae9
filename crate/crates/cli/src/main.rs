use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tuct::cmdp::{exact_pareto_oracle, ProblemSpec, RandomCmdpParams, TabularCmdp};
use tuct::envs::{
    cmdp_a, format_dataset, generate_dataset, GeneratorParams, GRIDWORLD_LARGE_MINI, GRIDWORLD_SMALL_MINI,
};
use tuct::harness::{
    joint_payoff_comparison, load_config, read_rows, run_experiment, summarize_rows, write_episodes, write_summaries,
    EpisodeRow, Execution, MetricsSummary,
};

#[derive(Parser)]
#[command(name = "tuct", version, about = "Threshold UCT planners and experiment harness for constrained MDPs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configuration of an experiment file.
    Run(RunArgs),
    /// Generate gridworld maps.
    GenMaps(GenMapsArgs),
    /// Print exact Pareto curves of a small tabular model.
    SolveExact(SolveArgs),
    /// Recompute metrics from an episode CSV.
    Summarize(SummarizeArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Episode CSV.
    #[arg(long)]
    out: PathBuf,
    /// Summary CSV; printed to stdout if absent.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Overrides the base seed of every configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Leave the wall-clock column empty so reruns produce identical bytes.
    #[arg(long)]
    omit_timing: bool,
    /// Run episodes on the calling thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dataset {
    SmallMini,
    LargeMini,
}

#[derive(Args)]
struct GenMapsArgs {
    /// Regenerate a committed dataset; the other generator flags are ignored.
    #[arg(long, value_enum)]
    dataset: Option<Dataset>,
    #[arg(long, default_value_t = 6)]
    width: usize,
    #[arg(long, default_value_t = 6)]
    height: usize,
    #[arg(long, default_value_t = 5)]
    gold: usize,
    #[arg(long, default_value_t = 0.3)]
    trap_density: f64,
    #[arg(long, default_value_t = 0.1)]
    wall_density: f64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    CmdpA,
    Random,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum, default_value = "cmdp-a")]
    model: Model,
    #[arg(long, default_value_t = 2)]
    horizon: usize,
    #[arg(long, default_value_t = 1.0)]
    gamma_r: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma_c: f64,
    /// Also report the best payoff reachable at this cost.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, default_value_t = 4)]
    states: usize,
    #[arg(long, default_value_t = 2)]
    actions: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Episode CSV produced by `run`.
    input: PathBuf,
    /// Summary CSV; a table is printed to stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Reference algorithm for the joint payoff comparison.
    #[arg(long, default_value = "tuct")]
    reference: String,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_table(summaries: &[MetricsSummary], reference: &str) {
    let width = summaries.iter().map(|s| s.config_id.len()).max().unwrap_or(9).max(9);
    println!(
        "{:<width$}  {:<8} {:>9} {:>9} {:>9} {:>6} {:>6} {:>10}",
        "config_id", "algo", "r_hat", "c_hat", "cost_std", "sat_m", "sat_w", "samples"
    );
    for s in summaries {
        println!(
            "{:<width$}  {:<8} {:>9.4} {:>9.4} {:>9.4} {:>6} {:>6} {:>10.1}",
            s.config_id, s.algorithm, s.r_hat, s.c_hat, s.cost_std, s.sat_m, s.sat_w, s.mean_samples
        );
    }
    for j in joint_payoff_comparison(summaries, reference) {
        match (j.reference_payoff, j.baseline_payoff) {
            (Some(r), Some(b)) => println!(
                "joint SAT_W with {}: {} configs, {reference} {r:.4} vs {} {b:.4}",
                j.baseline,
                j.configs.len(),
                j.baseline
            ),
            _ => println!("joint SAT_W with {}: no configs", j.baseline),
        }
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut configs = load_config(&args.config).with_context(|| format!("loading {}", args.config.display()))?;
    if let Some(seed) = args.seed {
        for c in &mut configs {
            c.seed = seed;
        }
    }
    let execution = if args.sequential { Execution::Sequential } else { Execution::Parallel };
    #[cfg(feature = "parallel")]
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.threads).build()?;
    #[cfg(not(feature = "parallel"))]
    if args.threads > 1 {
        eprintln!("built without the `parallel` feature; running sequentially");
    }
    let mut results = Vec::with_capacity(configs.len());
    for (i, c) in configs.iter().enumerate() {
        #[cfg(feature = "parallel")]
        let r = pool.install(|| run_experiment(c, execution));
        #[cfg(not(feature = "parallel"))]
        let r = run_experiment(c, execution);
        let r = r.with_context(|| format!("configuration {} ({})", c.id, c.algorithm))?;
        eprintln!(
            "[{}/{}] {} {}: r_hat {:.4} c_hat {:.4}",
            i + 1,
            configs.len(),
            c.id,
            c.algorithm,
            r.summary.r_hat,
            r.summary.c_hat
        );
        results.push(r);
    }
    let out = File::create(&args.out).with_context(|| format!("cannot create {}", args.out.display()))?;
    write_episodes(BufWriter::new(out), &results, args.omit_timing)?;
    let summaries: Vec<MetricsSummary> = results.into_iter().map(|r| r.summary).collect();
    match &args.summary {
        Some(_) => write_summaries(output(&args.summary)?, &summaries)?,
        None => print_table(&summaries, "tuct"),
    }
    Ok(())
}

fn gen_maps(args: GenMapsArgs) -> Result<()> {
    let text = match args.dataset {
        Some(Dataset::SmallMini) => GRIDWORLD_SMALL_MINI.text()?,
        Some(Dataset::LargeMini) => GRIDWORLD_LARGE_MINI.text()?,
        None => {
            let params = GeneratorParams {
                width: args.width,
                height: args.height,
                gold: args.gold,
                trap_density: args.trap_density,
                wall_density: args.wall_density,
            };
            format_dataset(&params, args.seed, &generate_dataset(&params, args.seed, args.count)?)
        }
    };
    output(&args.out)?.write_all(text.as_bytes())?;
    Ok(())
}

fn solve_exact(args: SolveArgs) -> Result<()> {
    let model = match args.model {
        Model::CmdpA => cmdp_a(),
        Model::Random => {
            let params = RandomCmdpParams { states: args.states, actions: args.actions, ..RandomCmdpParams::default() };
            TabularCmdp::random(params, args.seed)
        }
    };
    let spec = ProblemSpec::for_model(&model, args.horizon, args.gamma_r, args.gamma_c, args.threshold.unwrap_or(0.0))?;
    let curve = exact_pareto_oracle(&model, &spec, &0, args.horizon)?;
    println!("cost,reward");
    for v in curve.vertices() {
        println!("{},{}", v.cost, v.reward);
    }
    if let Some(t) = args.threshold {
        match curve.max_reward_at(t) {
            Some(r) => eprintln!("best payoff at cost {t}: {r}"),
            None => eprintln!("cost {t} is infeasible (cheapest policy costs {})", curve.min_cost()),
        }
    }
    Ok(())
}

fn summarize(args: SummarizeArgs) -> Result<()> {
    let file = File::open(&args.input).with_context(|| format!("cannot open {}", args.input.display()))?;
    let rows: Vec<EpisodeRow> = read_rows(file)?;
    if rows.is_empty() {
        bail!("{} has no episodes", args.input.display());
    }
    let summaries = summarize_rows(&rows)?;
    match &args.out {
        Some(_) => write_summaries(output(&args.out)?, &summaries)?,
        None => print_table(&summaries, &args.reference),
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(a) => run(a),
        Command::GenMaps(a) => gen_maps(a),
        Command::SolveExact(a) => solve_exact(a),
        Command::Summarize(a) => summarize(a),
    }
}
