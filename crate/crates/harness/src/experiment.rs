//! Experiment configuration, execution and reports.

use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use vecsum::apps::dim_coreset;
use vecsum::baselines::{sensitivity_sample_sum, sensitivity_sample_svd, uniform_sample, SampleSpec};
use vecsum::coresets::{coreset, coreset_of_size, prob_coreset, CoresetParams, Mode, ProbParams};
use vecsum::streaming::StreamSummary;
use vecsum::{DenseMatrix, SparseWeights, WeightedSet};

use crate::error::{HarnessError, Result};
use crate::io::load_csv;
use crate::metrics::{metric_summarization, metric_svd};
use crate::synthetic::SyntheticSpec;

/// Construction under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Slow,
    Fast,
    Prob,
    Uniform,
    SensSum,
    OurSvdSlow,
    OurSvdFast,
    SensSvd,
    Stream,
}

impl Algorithm {
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Slow,
        Algorithm::Fast,
        Algorithm::Prob,
        Algorithm::Uniform,
        Algorithm::SensSum,
        Algorithm::OurSvdSlow,
        Algorithm::OurSvdFast,
        Algorithm::SensSvd,
        Algorithm::Stream,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Slow => "slow",
            Algorithm::Fast => "fast",
            Algorithm::Prob => "prob",
            Algorithm::Uniform => "uniform",
            Algorithm::SensSum => "sens-sum",
            Algorithm::OurSvdSlow => "our-svd-slow",
            Algorithm::OurSvdFast => "our-svd-fast",
            Algorithm::SensSvd => "sens-svd",
            Algorithm::Stream => "stream",
        }
    }

    /// Whether the error column is the subspace metric.
    pub fn is_svd(self) -> bool {
        matches!(self, Algorithm::OurSvdSlow | Algorithm::OurSvdFast | Algorithm::SensSvd)
    }

    /// Whether trials with different seeds can differ.
    pub fn is_randomized(self) -> bool {
        matches!(
            self,
            Algorithm::Prob | Algorithm::Uniform | Algorithm::SensSum | Algorithm::SensSvd
        )
    }

    fn accepts(self, param: Param) -> bool {
        match (self, param) {
            (Algorithm::Slow | Algorithm::Fast | Algorithm::Prob, _) => true,
            (Algorithm::Uniform | Algorithm::SensSum | Algorithm::SensSvd, Param::Size(_)) => true,
            (Algorithm::OurSvdSlow | Algorithm::OurSvdFast | Algorithm::Stream, Param::Eps(_)) => true,
            _ => false,
        }
    }
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                HarnessError::Config(format!("unknown algorithm `{s}`; expected one of {}", names.join(", ")))
            })
    }
}

/// Where the points come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    Csv { path: PathBuf, has_header: bool },
    Synthetic(SyntheticSpec),
}

impl DataSource {
    pub fn load(&self) -> Result<DenseMatrix> {
        match self {
            DataSource::Csv { path, has_header } => load_csv(path, *has_header),
            DataSource::Synthetic(spec) => Ok(spec.generate()),
        }
    }
}

/// One grid value: an error target or a coreset size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Eps(f64),
    Size(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Eps(Vec<f64>),
    Sizes(Vec<usize>),
}

impl Grid {
    pub fn params(&self) -> Vec<Param> {
        match self {
            Grid::Eps(v) => v.iter().map(|&e| Param::Eps(e)).collect(),
            Grid::Sizes(v) => v.iter().map(|&s| Param::Size(s)).collect(),
        }
    }
}

/// The experiment matrix: every algorithm at every grid value, `trials` times.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub data: DataSource,
    pub grid: Grid,
    pub trials: usize,
    pub delta: f64,
    /// Subspace dimension for the SVD algorithms.
    pub k: Option<usize>,
    /// Trial `t` uses seed `seed + t`.
    pub seed: u64,
    pub chunk_size: usize,
}

impl ExperimentConfig {
    pub fn new(algorithms: Vec<Algorithm>, data: DataSource, grid: Grid) -> Self {
        Self {
            algorithms,
            data,
            grid,
            trials: 1,
            delta: 0.1,
            k: None,
            seed: 0,
            chunk_size: 1000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.algorithms.is_empty() {
            return bad("no algorithms given".into());
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        let params = self.grid.params();
        if params.is_empty() {
            return bad("the eps or size grid is empty".into());
        }
        for p in &params {
            match *p {
                Param::Eps(e) if !(e > 0.0 && e < 1.0) => return bad(format!("eps {e} outside (0, 1)")),
                Param::Size(0) => return bad("sizes must be positive".into()),
                _ => {}
            }
        }
        for &a in &self.algorithms {
            if let Some(p) = params.iter().find(|p| !a.accepts(**p)) {
                let kind = match p {
                    Param::Eps(_) => "--sizes",
                    Param::Size(_) => "--eps",
                };
                return bad(format!("algorithm `{}` needs {kind}", a.name()));
            }
            if a.is_svd() && self.k.is_none() {
                return bad(format!("algorithm `{}` needs --k", a.name()));
            }
        }
        if !(self.delta > 0.0 && self.delta <= 0.9) {
            return bad(format!("delta {} outside (0, 0.9]", self.delta));
        }
        if self.chunk_size < 2 {
            return bad("chunk size must be at least 2".into());
        }
        Ok(())
    }
}

/// One (algorithm, grid value, trial) measurement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub algorithm: String,
    pub n: usize,
    pub d: usize,
    pub eps: Option<f64>,
    pub size: Option<usize>,
    pub coreset_size: usize,
    pub error: f64,
    pub time_ms: f64,
    pub seed: u64,
    pub trial: usize,
}

/// A cell whose construction failed; the other cells still run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellFailure {
    pub algorithm: String,
    pub eps: Option<f64>,
    pub size: Option<usize>,
    pub trial: usize,
    pub message: String,
}

/// Mean and sample standard deviation of the error over trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub algorithm: String,
    pub eps: Option<f64>,
    pub size: Option<usize>,
    pub trials: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub mean_coreset_size: f64,
    pub mean_time_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    pub failures: Vec<CellFailure>,
}

const CSV_HEADER: &str = "algorithm,n,d,eps,size,coreset_size,error,time_ms,seed,trial";

impl ExperimentReport {
    /// CSV with one line per row. Without timing the output depends only on
    /// the configuration and seeds.
    pub fn to_csv(&self, include_timing: bool) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let time = if include_timing {
                format!("{:.3}", r.time_ms)
            } else {
                String::new()
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{:.16e},{},{},{}\n",
                r.algorithm,
                r.n,
                r.d,
                r.eps.map_or(String::new(), |e| e.to_string()),
                r.size.map_or(String::new(), |s| s.to_string()),
                r.coreset_size,
                r.error,
                time,
                r.seed,
                r.trial
            ));
        }
        out
    }

    /// JSON array of row objects.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("rows serialize")
    }

    /// Per-cell aggregates in first-seen order.
    pub fn summary(&self) -> Vec<CellSummary> {
        let mut cells: Vec<CellSummary> = Vec::new();
        let mut members: Vec<Vec<&ReportRow>> = Vec::new();
        for r in &self.rows {
            let pos = cells
                .iter()
                .position(|c| c.algorithm == r.algorithm && c.eps == r.eps && c.size == r.size);
            let j = match pos {
                Some(j) => j,
                None => {
                    cells.push(CellSummary {
                        algorithm: r.algorithm.clone(),
                        eps: r.eps,
                        size: r.size,
                        trials: 0,
                        mean_error: 0.0,
                        std_error: 0.0,
                        mean_coreset_size: 0.0,
                        mean_time_ms: 0.0,
                    });
                    members.push(Vec::new());
                    cells.len() - 1
                }
            };
            members[j].push(r);
        }
        for (c, rows) in cells.iter_mut().zip(&members) {
            let t = rows.len() as f64;
            c.trials = rows.len();
            c.mean_error = rows.iter().map(|r| r.error).sum::<f64>() / t;
            c.mean_coreset_size = rows.iter().map(|r| r.coreset_size as f64).sum::<f64>() / t;
            c.mean_time_ms = rows.iter().map(|r| r.time_ms).sum::<f64>() / t;
            c.std_error = if rows.len() > 1 {
                (rows.iter().map(|r| (r.error - c.mean_error).powi(2)).sum::<f64>() / (t - 1.0)).sqrt()
            } else {
                0.0
            };
        }
        cells
    }
}

/// Output of one construction: weights and the time spent building them.
pub struct Construction {
    pub weights: Vec<f64>,
    pub nnz: usize,
    pub time_ms: f64,
}

fn sparse(u: SparseWeights, n: usize, start: Instant) -> Construction {
    let time_ms = start.elapsed().as_secs_f64() * 1e3;
    Construction {
        nnz: u.nnz(),
        weights: u.to_dense(n),
        time_ms,
    }
}

/// Runs one construction on `points` with unit weights.
pub fn construct(
    algorithm: Algorithm,
    points: &DenseMatrix,
    param: Param,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<Construction> {
    let n = points.rows();
    let set = WeightedSet::uniform(points.clone());
    let k = config.k.unwrap_or(1);
    let start = Instant::now();
    let mismatch = || HarnessError::Config(format!("algorithm `{}` does not accept {param:?}", algorithm.name()));
    let mode = match algorithm {
        Algorithm::Fast | Algorithm::OurSvdFast => Mode::Fast,
        _ => Mode::Slow,
    };
    match (algorithm, param) {
        (Algorithm::Slow | Algorithm::Fast, Param::Eps(e)) => {
            Ok(sparse(coreset(&set, CoresetParams::new(e, mode))?.weights, n, start))
        }
        (Algorithm::Slow | Algorithm::Fast, Param::Size(s)) => Ok(sparse(coreset_of_size(&set, s, mode)?.weights, n, start)),
        (Algorithm::Prob, p) => {
            let epsilon = match p {
                Param::Eps(e) => e,
                Param::Size(s) => 4.0 / s as f64,
            };
            let params = ProbParams {
                epsilon,
                delta: config.delta,
                seed,
            };
            Ok(sparse(prob_coreset(points, params)?.weights(n), n, start))
        }
        (Algorithm::Uniform, Param::Size(s)) => Ok(sparse(uniform_sample(&set, SampleSpec::new(s, seed)?), n, start)),
        (Algorithm::SensSum, Param::Size(s)) => {
            Ok(sparse(sensitivity_sample_sum(&set, SampleSpec::new(s, seed)?), n, start))
        }
        (Algorithm::SensSvd, Param::Size(s)) => {
            Ok(sparse(sensitivity_sample_svd(points, k, SampleSpec::new(s, seed)?)?, n, start))
        }
        (Algorithm::OurSvdSlow | Algorithm::OurSvdFast, Param::Eps(e)) => {
            let out = dim_coreset(points, k, e, mode)?;
            let time_ms = start.elapsed().as_secs_f64() * 1e3;
            Ok(Construction {
                nnz: out.nnz,
                weights: out.weights,
                time_ms,
            })
        }
        (Algorithm::Stream, Param::Eps(e)) => {
            let mut summary = StreamSummary::new(e, config.chunk_size)?;
            summary.insert_all(&set)?;
            Ok(sparse(summary.finalize()?, n, start))
        }
        _ => Err(mismatch()),
    }
}

fn measure(
    algorithm: Algorithm,
    points: &DenseMatrix,
    param: Param,
    config: &ExperimentConfig,
    seed: u64,
) -> Result<(usize, f64, f64)> {
    let c = construct(algorithm, points, param, config, seed)?;
    let error = if algorithm.is_svd() {
        metric_svd(points, config.k.unwrap_or(1), &c.weights)?
    } else {
        let set = WeightedSet::uniform(points.clone());
        metric_summarization(&set, &SparseWeights::from_dense(&c.weights))?
    };
    Ok((c.nnz, error, c.time_ms))
}

/// Runs every cell of the configuration. Configuration problems abort;
/// construction failures are recorded per cell.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let points = config.data.load()?;
    if config.algorithms.iter().any(|a| a.is_svd()) {
        let k = config.k.unwrap_or(1);
        if k == 0 || k >= points.cols() {
            return Err(HarnessError::Config(format!(
                "k must lie in [1, {}) for {}-dimensional data",
                points.cols(),
                points.cols()
            )));
        }
    }
    let (n, d) = (points.rows(), points.cols());
    let mut report = ExperimentReport::default();
    for &algorithm in &config.algorithms {
        for param in config.grid.params() {
            let (eps, size) = match param {
                Param::Eps(e) => (Some(e), None),
                Param::Size(s) => (None, Some(s)),
            };
            for trial in 0..config.trials {
                let seed = config.seed.wrapping_add(trial as u64);
                match measure(algorithm, &points, param, config, seed) {
                    Ok((coreset_size, error, time_ms)) => report.rows.push(ReportRow {
                        algorithm: algorithm.name().to_string(),
                        n,
                        d,
                        eps,
                        size,
                        coreset_size,
                        error,
                        time_ms,
                        seed,
                        trial,
                    }),
                    Err(e) => report.failures.push(CellFailure {
                        algorithm: algorithm.name().to_string(),
                        eps,
                        size,
                        trial,
                        message: e.to_string(),
                    }),
                }
            }
        }
    }
    Ok(report)
}
