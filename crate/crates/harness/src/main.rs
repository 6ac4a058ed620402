use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vecsum::apps::{one_mean_certificates, one_mean_coreset};
use vecsum::{Mode, SparseWeights, WeightedSet};
use vecsum_harness::experiment::{construct, Param};
use vecsum_harness::{
    format_weights, metric_summarization, metric_svd, run_experiment, Algorithm, DataSource,
    ExperimentConfig, Grid, HarnessError, Result, SyntheticSpec,
};

/// Build and evaluate vector-summarization coresets.
#[derive(Parser)]
#[command(name = "vecsum-cli", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coreset for the weighted mean; prints `index,weight` lines.
    Summarize(SummarizeArgs),
    /// Coreset for the sum of squared distances to any center.
    OneMean(OneMeanArgs),
    /// Row reweighting for k-subspace approximation.
    Svd(SvdArgs),
    /// Merge-and-reduce over fixed-size chunks of the input.
    Stream(StreamArgs),
    /// Run an experiment grid and write a report.
    Bench(BenchArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Numeric CSV file, one point per line.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generator, e.g. `heavy-tail:n=10000,d=5,seed=1`.
    #[arg(long)]
    synthetic: Option<String>,
}

#[derive(Args)]
struct InputArgs {
    #[command(flatten)]
    source: Source,
    /// Skip the first non-blank line of the CSV input.
    #[arg(long)]
    has_header: bool,
}

impl InputArgs {
    fn data(&self) -> Result<DataSource> {
        match (&self.source.input, &self.source.synthetic) {
            (Some(path), _) => Ok(DataSource::Csv {
                path: path.clone(),
                has_header: self.has_header,
            }),
            (None, Some(spec)) => Ok(DataSource::Synthetic(spec.parse::<SyntheticSpec>()?)),
            (None, None) => Err(HarnessError::Config("give --input or --synthetic".into())),
        }
    }
}

#[derive(Args)]
struct SummarizeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// slow, fast, prob, uniform, sens-sum or stream.
    #[arg(long, default_value = "slow")]
    algo: String,
    #[arg(long, conflicts_with = "sizes")]
    eps: Option<f64>,
    /// Coreset size budget.
    #[arg(long)]
    sizes: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    chunk_size: usize,
    /// Weight file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OneMeanArgs {
    #[command(flatten)]
    input: InputArgs,
    /// slow or fast.
    #[arg(long, default_value = "slow")]
    algo: String,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SvdArgs {
    #[command(flatten)]
    input: InputArgs,
    /// our-svd-slow, our-svd-fast or sens-svd.
    #[arg(long, default_value = "our-svd-slow")]
    algo: String,
    #[arg(long)]
    k: usize,
    #[arg(long, conflicts_with = "sizes")]
    eps: Option<f64>,
    /// Sample size for sens-svd.
    #[arg(long)]
    sizes: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    eps: f64,
    #[arg(long, default_value_t = 1000)]
    chunk_size: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Comma-separated algorithm names.
    #[arg(long, value_delimiter = ',', required = true)]
    algo: Vec<String>,
    /// Comma-separated error targets.
    #[arg(long, value_delimiter = ',', conflicts_with = "sizes", required_unless_present = "sizes")]
    eps: Vec<f64>,
    /// Comma-separated coreset sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    chunk_size: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Leave the time column empty so reruns produce identical files.
    #[arg(long)]
    no_timing: bool,
    /// Report file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => vecsum_harness::io::write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn single_param(eps: Option<f64>, size: Option<usize>) -> Result<Param> {
    match (eps, size) {
        (Some(e), _) => Ok(Param::Eps(e)),
        (None, Some(s)) => Ok(Param::Size(s)),
        (None, None) => Err(HarnessError::Config("give --eps or --sizes".into())),
    }
}

fn grid_of(param: Param) -> Grid {
    match param {
        Param::Eps(e) => Grid::Eps(vec![e]),
        Param::Size(s) => Grid::Sizes(vec![s]),
    }
}

fn summarize(args: SummarizeArgs) -> Result<()> {
    let algorithm: Algorithm = args.algo.parse()?;
    if algorithm.is_svd() {
        return Err(HarnessError::Config(format!("`{}` belongs to the svd command", args.algo)));
    }
    let param = single_param(args.eps, args.sizes)?;
    let mut config = ExperimentConfig::new(vec![algorithm], args.input.data()?, grid_of(param));
    config.delta = args.delta;
    config.seed = args.seed;
    config.chunk_size = args.chunk_size;
    config.validate()?;
    let points = config.data.load()?;
    let c = construct(algorithm, &points, param, &config, args.seed)?;
    let u = SparseWeights::from_dense(&c.weights);
    let set = WeightedSet::uniform(points);
    eprintln!(
        "n={} d={} nnz={} mean_error={:.6e} relative_error={:.6e} time_ms={:.3}",
        set.len(),
        set.dim(),
        c.nnz,
        metric_summarization(&set, &u)?,
        vecsum::summarization_error(&set, &u)?,
        c.time_ms
    );
    emit(&args.out, &format_weights(&u))
}

fn one_mean(args: OneMeanArgs) -> Result<()> {
    let mode = match args.algo.as_str() {
        "slow" => Mode::Slow,
        "fast" => Mode::Fast,
        other => return Err(HarnessError::Config(format!("one-mean takes slow or fast, got `{other}`"))),
    };
    let set = WeightedSet::uniform(args.input.data()?.load()?);
    let u = one_mean_coreset(&set, args.eps, mode)?;
    let cert = one_mean_certificates(&set, &u)?;
    eprintln!(
        "n={} nnz={} mean_norm={:.3e} mass_gap={:.3e} second_moment_gap={:.3e}",
        set.len(),
        u.nnz(),
        cert.mean_norm,
        cert.mass_gap,
        cert.second_moment_gap
    );
    emit(&args.out, &format_weights(&u))
}

fn svd_command(args: SvdArgs) -> Result<()> {
    let algorithm: Algorithm = args.algo.parse()?;
    if !algorithm.is_svd() {
        return Err(HarnessError::Config(format!("`{}` is not an svd algorithm", args.algo)));
    }
    let param = single_param(args.eps, args.sizes)?;
    let mut config = ExperimentConfig::new(vec![algorithm], args.input.data()?, grid_of(param));
    config.k = Some(args.k);
    config.seed = args.seed;
    config.validate()?;
    let points = config.data.load()?;
    let c = construct(algorithm, &points, param, &config, args.seed)?;
    eprintln!(
        "n={} d={} k={} nnz={} svd_error={:.6e} time_ms={:.3}",
        points.rows(),
        points.cols(),
        args.k,
        c.nnz,
        metric_svd(&points, args.k, &c.weights)?,
        c.time_ms
    );
    emit(&args.out, &format_weights(&SparseWeights::from_dense(&c.weights)))
}

fn stream(args: StreamArgs) -> Result<()> {
    summarize(SummarizeArgs {
        input: args.input,
        algo: "stream".into(),
        eps: Some(args.eps),
        sizes: None,
        delta: 0.1,
        seed: 0,
        chunk_size: args.chunk_size,
        out: args.out,
    })
}

fn bench(args: BenchArgs) -> Result<()> {
    let algorithms = args.algo.iter().map(|a| a.parse()).collect::<Result<Vec<Algorithm>>>()?;
    let grid = if args.sizes.is_empty() {
        Grid::Eps(args.eps)
    } else {
        Grid::Sizes(args.sizes)
    };
    let mut config = ExperimentConfig::new(algorithms, args.input.data()?, grid);
    config.trials = args.trials;
    config.delta = args.delta;
    config.k = args.k;
    config.seed = args.seed;
    config.chunk_size = args.chunk_size;
    let report = run_experiment(&config)?;
    for s in report.summary() {
        eprintln!(
            "{} eps={} size={} trials={} error={:.6e} ± {:.3e} coreset_size={:.1} time_ms={:.3}",
            s.algorithm,
            s.eps.map_or("-".into(), |e| e.to_string()),
            s.size.map_or("-".into(), |v| v.to_string()),
            s.trials,
            s.mean_error,
            s.std_error,
            s.mean_coreset_size,
            s.mean_time_ms
        );
    }
    let text = match args.format {
        Format::Csv => report.to_csv(!args.no_timing),
        Format::Json => report.to_json(),
    };
    emit(&args.out, &text)?;
    if let Some(first) = report.failures.first() {
        for f in &report.failures {
            eprintln!("failed: {} trial {}: {}", f.algorithm, f.trial, f.message);
        }
        return Err(HarnessError::Numeric(vecsum::CoresetError::InvalidInput(format!(
            "{} cell(s) failed, first: {}",
            report.failures.len(),
            first.message
        ))));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Summarize(a) => summarize(a),
        Command::OneMean(a) => one_mean(a),
        Command::Svd(a) => svd_command(a),
        Command::Stream(a) => stream(a),
        Command::Bench(a) => bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
