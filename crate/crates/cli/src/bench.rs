use std::fmt::Write as _;

use lupi_svm::data::{synth_lupi, SynthSpec};
use lupi_svm::trainers::{predict, train_one_vs_rest, Hyperparameters, Method};
use lupi_svm::Error;

use crate::timing::timed;

pub const CSV_HEADER: &str = "method,n,seed,cpu_seconds,wall_seconds,accuracy,converged";

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub seeds: u64,
    /// First synthetic seed; run `k` uses `base_seed + k`.
    pub base_seed: u64,
    /// Template for the synthetic data; `n` and `seed` are overridden.
    pub synth: SynthSpec,
    pub hp: Hyperparameters,
    pub methods: Vec<Method>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![100, 200, 400],
            seeds: 5,
            base_seed: 0,
            synth: SynthSpec::default(),
            hp: Hyperparameters::default(),
            methods: Method::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub n: usize,
    pub seed: u64,
    pub cpu_seconds: f64,
    pub wall_seconds: f64,
    /// Test accuracy in percent.
    pub accuracy: f64,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

fn mean_sd(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Some((mean, var.sqrt()))
}

impl BenchReport {
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        sizes.sort_unstable();
        sizes.dedup();
        sizes
    }

    fn converged_rows(&self, method: Method, n: usize) -> impl Iterator<Item = &BenchRow> {
        self.rows.iter().filter(move |r| r.method == method && r.n == n && r.converged)
    }

    /// Mean and standard deviation of CPU seconds over converged runs.
    pub fn cpu(&self, method: Method, n: usize) -> Option<(f64, f64)> {
        mean_sd(&self.converged_rows(method, n).map(|r| r.cpu_seconds).collect::<Vec<_>>())
    }

    pub fn wall(&self, method: Method, n: usize) -> Option<(f64, f64)> {
        mean_sd(&self.converged_rows(method, n).map(|r| r.wall_seconds).collect::<Vec<_>>())
    }

    pub fn accuracy(&self, method: Method, n: usize) -> Option<(f64, f64)> {
        mean_sd(&self.converged_rows(method, n).map(|r| r.accuracy).collect::<Vec<_>>())
    }

    /// Mean CPU time of the hinge-loss privileged SVM over that of the
    /// squared-hinge one, converged runs only.
    pub fn speedup(&self, n: usize) -> Option<f64> {
        let slow = self.cpu(Method::Svm1Plus, n)?.0;
        let fast = self.cpu(Method::Svm2Plus, n)?.0;
        (fast > 0.0).then(|| slow / fast)
    }

    pub fn csv(&self) -> String {
        let mut out = format!("{CSV_HEADER}\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.method, r.n, r.seed, r.cpu_seconds, r.wall_seconds, r.accuracy, r.converged
            );
        }
        out
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "# training time includes Gram and deformed-kernel construction; data generation excluded"
        );
        let _ = writeln!(out, "# means over converged runs (mean ± sd)");
        let _ = writeln!(
            out,
            "{:<9} {:>5} {:>22} {:>22} {:>16} {:>9}",
            "method", "n", "cpu seconds", "wall seconds", "accuracy %", "converged"
        );
        let methods: Vec<Method> = Method::ALL
            .into_iter()
            .filter(|m| self.rows.iter().any(|r| r.method == *m))
            .collect();
        let cell = |v: Option<(f64, f64)>, digits: usize| match v {
            Some((m, s)) => format!("{m:.digits$} ± {s:.digits$}"),
            None => "-".to_string(),
        };
        for n in self.sizes() {
            for &method in &methods {
                let total = self.rows.iter().filter(|r| r.method == method && r.n == n).count();
                let ok = self.converged_rows(method, n).count();
                let _ = writeln!(
                    out,
                    "{:<9} {:>5} {:>22} {:>22} {:>16} {:>9}",
                    method.to_string(),
                    n,
                    cell(self.cpu(method, n), 6),
                    cell(self.wall(method, n), 6),
                    cell(self.accuracy(method, n), 2),
                    format!("{ok}/{total}")
                );
            }
        }
        let _ = write!(out, "speedup svm1plus/svm2plus (cpu):");
        for n in self.sizes() {
            match self.speedup(n) {
                Some(s) => {
                    let _ = write!(out, "  n={n}: {s:.1}x");
                }
                None => {
                    let _ = write!(out, "  n={n}: -");
                }
            }
        }
        out.push('\n');
        out
    }
}

/// Times every configured method on synthetic data for each size and seed.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, Error> {
    let mut rows = Vec::new();
    for &n in &config.sizes {
        for k in 0..config.seeds {
            let seed = config.base_seed + k;
            let data = synth_lupi(&SynthSpec {
                n,
                seed,
                ..config.synth.clone()
            })?;
            let x = data.train.x_dense()?;
            let z = data.train.z_dense()?;
            let x_test = data.test.x.to_dense(data.train.x.dim)?;
            for &method in &config.methods {
                let (model, cpu_seconds, wall_seconds) =
                    timed(|| train_one_vs_rest(&x, z.as_ref(), &data.train.y, &config.hp, method));
                let model = model?;
                let predicted = predict(&model, &x_test)?;
                let correct = predicted.iter().zip(&data.test.y).filter(|(a, b)| a == b).count();
                rows.push(BenchRow {
                    method,
                    n,
                    seed,
                    cpu_seconds,
                    wall_seconds,
                    accuracy: 100.0 * correct as f64 / data.test.n() as f64,
                    converged: model.converged(),
                });
            }
        }
    }
    Ok(BenchReport { rows })
}
