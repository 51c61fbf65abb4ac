use std::fmt::Write as _;

use lupi_svm::data::{holdout_split, LupiDataset};
use lupi_svm::trainers::{predict, train_one_vs_rest_jobs, Hyperparameters, Method};
use lupi_svm::Error;

/// Values tried for C and, for the privileged methods, λ.
pub const GRID: [f64; 7] = [1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3];

#[derive(Clone, Debug, PartialEq)]
pub struct TuneEntry {
    pub c: f64,
    /// `None` for plain SVM.
    pub lambda: Option<f64>,
    pub correct: usize,
    pub total: usize,
    pub converged: bool,
}

impl TuneEntry {
    /// Holdout accuracy in percent.
    pub fn accuracy(&self) -> f64 {
        100.0 * self.correct as f64 / self.total as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TuneReport {
    pub method: Method,
    pub entries: Vec<TuneEntry>,
    /// Index of the selected entry.
    pub best: usize,
}

impl TuneReport {
    pub fn best(&self) -> &TuneEntry {
        &self.entries[self.best]
    }

    /// `base` with the selected C (and λ).
    pub fn apply(&self, base: &Hyperparameters) -> Hyperparameters {
        let best = self.best();
        Hyperparameters {
            c: best.c,
            lambda: best.lambda.unwrap_or(base.lambda),
            ..base.clone()
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>8} {:>8} {:>9} {:>9}", "C", "lambda", "accuracy", "converged");
        for e in &self.entries {
            let lambda = e.lambda.map_or("-".to_string(), |l| l.to_string());
            let _ = writeln!(out, "{:>8} {:>8} {:>9.2} {:>9}", e.c, lambda, e.accuracy(), e.converged);
        }
        let best = self.best();
        let _ = write!(out, "best C={}", best.c);
        if let Some(l) = best.lambda {
            let _ = write!(out, " lambda={l}");
        }
        let _ = writeln!(out, " accuracy={:.2}", best.accuracy());
        out
    }
}

/// Grid search on a stratified holdout split: trains on the fit part for
/// every grid point and keeps the highest holdout accuracy, breaking ties
/// towards smaller C, then smaller λ.
pub fn tune(
    dataset: &LupiDataset,
    method: Method,
    base: &Hyperparameters,
    holdout: f64,
    seed: u64,
    jobs: usize,
) -> Result<TuneReport, Error> {
    if !(holdout > 0.0 && holdout < 1.0) {
        return Err(Error::InvalidHyperparameter(format!(
            "holdout fraction must lie in (0, 1), got {holdout}"
        )));
    }
    if method.uses_privileged() && dataset.z.is_none() {
        return Err(Error::AlignmentError {
            main: dataset.n(),
            privileged: 0,
        });
    }
    let (fit_idx, holdout_idx) = holdout_split(&dataset.y, holdout, seed)?;
    let fit = dataset.select(&fit_idx);
    let check = dataset.select(&holdout_idx);
    let x_fit = fit.x.to_dense(dataset.x.dim)?;
    let z_fit = match &fit.z {
        Some(z) => Some(z.to_dense(dataset.z.as_ref().map_or(0, |z| z.dim))?),
        None => None,
    };
    let x_check = check.x.to_dense(dataset.x.dim)?;

    let lambdas: Vec<Option<f64>> = if method.uses_privileged() {
        GRID.iter().map(|&l| Some(l)).collect()
    } else {
        vec![None]
    };
    let mut entries = Vec::new();
    let mut best = 0;
    for &c in &GRID {
        for &lambda in &lambdas {
            let hp = Hyperparameters {
                c,
                lambda: lambda.unwrap_or(base.lambda),
                ..base.clone()
            };
            let model = train_one_vs_rest_jobs(&x_fit, z_fit.as_ref(), &fit.y, &hp, method, jobs)?;
            let predicted = predict(&model, &x_check)?;
            let correct = predicted.iter().zip(&check.y).filter(|(a, b)| a == b).count();
            entries.push(TuneEntry {
                c,
                lambda,
                correct,
                total: check.n(),
                converged: model.converged(),
            });
            if correct > entries[best].correct {
                best = entries.len() - 1;
            }
        }
    }
    Ok(TuneReport { method, entries, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use lupi_svm::data::{synth_lupi, SynthSpec};

    fn data() -> LupiDataset {
        synth_lupi(&SynthSpec {
            n: 40,
            n_test: 10,
            seed: 3,
            ..SynthSpec::default()
        })
        .unwrap()
        .train
    }

    #[test]
    fn grid_sizes_and_tie_rule() {
        let data = data();
        let svm = tune(&data, Method::Svm, &Hyperparameters::default(), 0.3, 1, 1).unwrap();
        assert_eq!(svm.entries.len(), 7);
        let plus = tune(&data, Method::Svm2Plus, &Hyperparameters::default(), 0.3, 1, 1).unwrap();
        assert_eq!(plus.entries.len(), 49);
        for report in [&svm, &plus] {
            let best = report.best();
            // Every earlier entry (smaller C, or same C and smaller λ) is strictly worse.
            for e in &report.entries[..report.best] {
                assert!(e.correct < best.correct);
            }
            assert!(report.entries.iter().all(|e| e.correct <= best.correct));
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let data = data();
        let a = tune(&data, Method::Svm1Plus, &Hyperparameters::default(), 0.3, 5, 1).unwrap();
        let b = tune(&data, Method::Svm1Plus, &Hyperparameters::default(), 0.3, 5, 1).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.table(), b.table());
    }

    #[test]
    fn rejects_bad_holdout_and_missing_privileged() {
        let mut data = data();
        assert!(tune(&data, Method::Svm, &Hyperparameters::default(), 0.0, 1, 1).is_err());
        data.z = None;
        assert!(matches!(
            tune(&data, Method::Svm2Plus, &Hyperparameters::default(), 0.3, 1, 1),
            Err(Error::AlignmentError { .. })
        ));
    }
}
