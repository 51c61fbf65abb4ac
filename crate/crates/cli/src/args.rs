use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lupi_svm::kernels::KernelSpec;
use lupi_svm::trainers::{Hyperparameters, Method};

#[derive(Debug, Parser)]
#[command(name = "lupisvm", version, about = "SVMs trained with privileged information")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a one-vs-rest model and write it to --model.
    Train(TrainArgs),
    /// Write one predicted label per line.
    Predict(PredictArgs),
    /// Print accuracy on a labelled file.
    Eval(EvalArgs),
    /// Grid-search C (and lambda) on a holdout split.
    Tune(TuneArgs),
    /// Generate a synthetic train/privileged/test triple.
    Gen(GenArgs),
    /// Time the three trainers on synthetic data.
    Bench(BenchArgs),
}

/// Flags shared by every command that trains.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// svm, svm1plus or svm2plus.
    #[arg(long, default_value = "svm2plus")]
    pub method: Method,
    /// Main kernel: linear | rbf:GAMMA | poly:DEG:GAMMA:COEF0.
    #[arg(long, default_value = "linear")]
    pub kernel: KernelSpec,
    /// Privileged kernel (a linear one gets a constant bias coordinate).
    #[arg(long = "priv-kernel", default_value = "linear")]
    pub priv_kernel: KernelSpec,
    #[arg(long = "c", default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    /// Iteration cap for both solvers (default 1e7 SMO updates, 1e5 gradient steps).
    #[arg(long = "max-iter")]
    pub max_iter: Option<u64>,
    /// Threads for per-class training.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

impl SolverArgs {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [("--c", self.c), ("--lambda", self.lambda), ("--tol", self.tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be a positive number, got {v}"));
            }
        }
        if self.jobs == 0 {
            return Err("--jobs must be at least 1".into());
        }
        if self.max_iter == Some(0) {
            return Err("--max-iter must be at least 1".into());
        }
        Ok(())
    }

    pub fn hyperparameters(&self) -> Hyperparameters {
        let mut hp = Hyperparameters::new(self.c, self.lambda)
            .with_kernels(self.kernel, self.priv_kernel)
            .with_tolerance(self.tol);
        if let Some(cap) = self.max_iter {
            hp.smo.max_iterations = cap;
            hp.svm1plus.max_iterations = cap;
        }
        hp
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Training file: `label idx:val ...` per line.
    #[arg(long)]
    pub data: PathBuf,
    /// Privileged features aligned by line (required for svm1plus/svm2plus).
    #[arg(long = "priv")]
    pub privileged: Option<PathBuf>,
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// File to classify; the label column is read but ignored.
    #[arg(long, visible_alias = "test")]
    pub data: PathBuf,
    /// Predictions file (stdout if absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, visible_alias = "test")]
    pub data: PathBuf,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long = "priv")]
    pub privileged: Option<PathBuf>,
    /// Fraction of each class held out for scoring.
    #[arg(long, default_value_t = 0.3)]
    pub holdout: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Output prefix; writes PREFIX.train, PREFIX.priv and PREFIX.test.
    #[arg(long, default_value = "lupi")]
    pub output: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long = "n-test", default_value_t = 1000)]
    pub n_test: usize,
    #[arg(long, default_value_t = 5)]
    pub d: usize,
    #[arg(long, default_value_t = 0.15)]
    pub flip: f64,
    /// Standard deviation of noise added to the privileged slack.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long = "priv-dim", default_value_t = 1)]
    pub priv_dim: usize,
    /// Redraw points closer than this to the true separator.
    #[arg(long = "min-margin", default_value_t = 1e-6)]
    pub min_margin: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "100,200,400")]
    pub sizes: Vec<usize>,
    /// Number of seeds per size.
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// First seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "n-test", default_value_t = 1000)]
    pub n_test: usize,
    #[arg(long, default_value_t = 0.15)]
    pub flip: f64,
    /// CSV file (the CSV goes to stdout after the table if absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long = "c", default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value = "linear")]
    pub kernel: KernelSpec,
    #[arg(long = "priv-kernel", default_value = "linear")]
    pub priv_kernel: KernelSpec,
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
    #[arg(long = "max-iter")]
    pub max_iter: Option<u64>,
}

impl BenchArgs {
    pub fn solver(&self) -> SolverArgs {
        SolverArgs {
            method: Method::Svm2Plus,
            kernel: self.kernel,
            priv_kernel: self.priv_kernel,
            c: self.c,
            lambda: self.lambda,
            tol: self.tol,
            max_iter: self.max_iter,
            jobs: 1,
        }
    }
}
