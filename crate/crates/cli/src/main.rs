//! `memsort`: dataset generation, single sorts, parameter sweeps and trace
//! verification for the in-memory sorting model.

mod bench;
mod svg;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use memsort::datasets::{self, DatasetKind, DatasetParams, DatasetSpec};
use memsort::trace::{parse_trace, write_trace};
use memsort::{
    reference_order, sort_multibank, sorter, verify_trace, Algorithm, BitMatrix, CostModel, SortOptions, Verdict,
};

use crate::bench::{BenchResult, RunKey, Sweep};

#[derive(Parser)]
#[command(name = "memsort", version, about = "Memristive in-memory sorting simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded dataset file (plus a .meta.json sidecar).
    Generate(GenerateArgs),
    /// Sort one dataset file and print the result as JSON.
    Sort(SortArgs),
    /// Sweep distributions, k and bank counts; write CSV and optionally SVG.
    Bench(BenchArgs),
    /// Check a trace file against the sorter rules for a dataset.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Algo {
    Baseline,
    Skip,
}

#[derive(Args, Clone)]
struct CostArgs {
    /// Cycles per column read.
    #[arg(long, default_value_t = 1)]
    cost_cr: u64,
    /// Cycles per repetition stall.
    #[arg(long, default_value_t = 1)]
    cost_stall: u64,
    /// Cycles per state load.
    #[arg(long, default_value_t = 0)]
    cost_sl: u64,
    /// Cycles per row exclusion.
    #[arg(long, default_value_t = 0)]
    cost_re: u64,
}

impl CostArgs {
    fn model(&self) -> CostModel {
        CostModel {
            cycles_per_cr: self.cost_cr,
            cycles_per_stall: self.cost_stall,
            cycles_per_sl: self.cost_sl,
            cycles_per_re: self.cost_re,
            energy: None,
        }
    }
}

/// Distribution parameter overrides; unset values use the defaults for the
/// chosen width.
#[derive(Args, Clone, Default)]
struct ParamArgs {
    #[arg(long)]
    normal_mean: Option<f64>,
    #[arg(long)]
    normal_std: Option<f64>,
    /// Comma-separated cluster centers.
    #[arg(long, value_delimiter = ',')]
    cluster_centers: Option<Vec<f64>>,
    #[arg(long)]
    cluster_std: Option<f64>,
    /// Kruskal edge weights are uniform over [1, max].
    #[arg(long)]
    kruskal_max: Option<u64>,
    #[arg(long)]
    mr_groups: Option<usize>,
    #[arg(long)]
    mr_center_range: Option<u64>,
    #[arg(long)]
    mr_offset_range: Option<u64>,
    #[arg(long)]
    mr_center_prob: Option<f64>,
}

impl ParamArgs {
    fn params(&self, width: u32) -> DatasetParams {
        let mut p = DatasetParams::defaults_for(width);
        if let Some(v) = self.normal_mean {
            p.normal_mean = v;
        }
        if let Some(v) = self.normal_std {
            p.normal_std = v;
        }
        if let Some(v) = &self.cluster_centers {
            p.cluster_centers = v.clone();
        }
        if let Some(v) = self.cluster_std {
            p.cluster_std = v;
        }
        if let Some(v) = self.kruskal_max {
            p.kruskal_max_weight = v;
        }
        if let Some(v) = self.mr_groups {
            p.mapreduce_groups = v;
        }
        if let Some(v) = self.mr_center_range {
            p.mapreduce_center_range = v;
        }
        if let Some(v) = self.mr_offset_range {
            p.mapreduce_offset_range = v;
        }
        if let Some(v) = self.mr_center_prob {
            p.mapreduce_center_prob = v;
        }
        p
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long)]
    dist: DatasetKind,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    w: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct SortArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    w: u32,
    #[arg(long, value_enum, default_value_t = Algo::Skip)]
    algo: Algo,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1)]
    banks: usize,
    /// Write the operation trace here.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Write the sorted values here, one per line.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    cost: CostArgs,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "uniform,normal,clustered,kruskal,mapreduce"
    )]
    dist: Vec<DatasetKind>,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 32)]
    w: u32,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3,4")]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    banks: Vec<usize>,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 10)]
    seeds: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit one row per seed instead of seed-averaged rows.
    #[arg(long)]
    per_seed: bool,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    #[command(flatten)]
    cost: CostArgs,
    #[command(flatten)]
    params: ParamArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    w: u32,
    #[arg(long)]
    trace: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Skip)]
    algo: Algo,
    #[arg(long, default_value_t = 2)]
    k: usize,
}

fn algorithm(algo: Algo, k: usize) -> Algorithm {
    match algo {
        Algo::Baseline => Algorithm::Baseline,
        Algo::Skip => Algorithm::Skip { k },
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let spec = DatasetSpec {
        kind: args.dist,
        n: args.n,
        width: args.w,
        seed: args.seed,
        params: args.params.params(args.w),
    };
    let values = datasets::generate(&spec)?;
    datasets::save_file(&args.out, &values).with_context(|| format!("writing {}", args.out.display()))?;
    datasets::save_metadata(&args.out, &spec)?;
    Ok(())
}

fn cmd_sort(args: SortArgs) -> Result<()> {
    let values = datasets::load_file(&args.input, Some(args.w))?;
    let m = BitMatrix::build(&values, args.w)?;
    let opts = SortOptions {
        cost: args.cost.model(),
        trace: args.trace.is_some(),
    };
    let algo = algorithm(args.algo, args.k);
    let start = std::time::Instant::now();
    let outcome = match algo {
        Algorithm::Skip { k } if args.banks != 1 => sort_multibank(&m, k, args.banks, &opts)?.outcome,
        Algorithm::Baseline if args.banks != 1 => bail!("the baseline sorter is single-bank"),
        _ => sorter::run(&m, algo, &opts),
    };
    let wall_time = start.elapsed();
    let baseline = sorter::sort_baseline(
        &m,
        &SortOptions {
            cost: opts.cost,
            trace: false,
        },
    );

    if let Some(path) = &args.trace {
        let trace = outcome.trace.as_deref().unwrap_or_default();
        fs::write(path, write_trace(trace)).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.out {
        datasets::save_file(path, &outcome.sorted_values())?;
    }

    let key = RunKey {
        dist: "file".to_owned(),
        n: values.len(),
        w: args.w,
        k: match algo {
            Algorithm::Baseline => None,
            Algorithm::Skip { k } => Some(k),
        },
        banks: args.banks,
        seed: None,
    };
    let result = BenchResult::measured(key, &outcome.counters, outcome.cycles, baseline.cycles, wall_time);
    println!("{}", serde_json::to_string(&result)?);

    if outcome.order != reference_order(&values) {
        bail!("sorter output differs from the reference sort");
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let sweep = Sweep {
        dists: args.dist,
        n: args.n,
        w: args.w,
        ks: args.k,
        banks: args.banks,
        seeds: (args.seed..args.seed + args.seeds).collect(),
        params: args.params.params(args.w),
        opts: SortOptions {
            cost: args.cost.model(),
            trace: false,
        },
        per_seed: args.per_seed,
    };
    let rows = bench::run_sweep(&sweep)?;
    let csv = bench::to_csv(&rows);
    match &args.csv {
        Some(path) => fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.svg {
        let chart = svg::speedup_chart(&rows, sweep.banks[0]);
        fs::write(path, chart).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    let values = datasets::load_file(&args.input, Some(args.w))?;
    let m = BitMatrix::build(&values, args.w)?;
    let text = fs::read_to_string(&args.trace).with_context(|| format!("reading {}", args.trace.display()))?;
    let trace = parse_trace(&text)?;
    match verify_trace(&trace, &m, algorithm(args.algo, args.k))? {
        Verdict::Ok => {
            println!("ok: {} events", trace.len());
            Ok(true)
        }
        Verdict::Violation(v) => {
            eprintln!("violation at {v}");
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a).map(|()| true),
        Command::Sort(a) => cmd_sort(a).map(|()| true),
        Command::Bench(a) => cmd_bench(a).map(|()| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
