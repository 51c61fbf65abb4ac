use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::linalg::DenseMatrix;

use super::binary::{decision_values, BinaryModel, TrainingKernels};
use super::{Hyperparameters, Method};

/// One-vs-rest classifier: one binary decision function per class.
#[derive(Clone, Debug, PartialEq)]
pub struct MulticlassModel {
    pub method: Method,
    pub kernel: KernelSpec,
    pub dim: usize,
    /// Class labels in ascending order.
    pub classes: Vec<i64>,
    /// Training examples per class (empty for loaded models).
    pub class_counts: Vec<usize>,
    /// `binaries[c]` separates `classes[c]` from the rest.
    pub binaries: Vec<BinaryModel>,
}

impl MulticlassModel {
    pub fn converged(&self) -> bool {
        self.binaries.iter().all(BinaryModel::converged)
    }

    /// Per-class decision values, `result[c][i]` for class `c` and row `i`.
    pub fn decision_values(&self, x_test: &DenseMatrix) -> Result<Vec<Vec<f64>>> {
        self.binaries.iter().map(|b| decision_values(b, x_test)).collect()
    }
}

/// Trains one-vs-rest on a single thread. See [`train_one_vs_rest_jobs`].
pub fn train_one_vs_rest(
    x: &DenseMatrix,
    z: Option<&DenseMatrix>,
    labels: &[i64],
    hp: &Hyperparameters,
    method: Method,
) -> Result<MulticlassModel> {
    train_one_vs_rest_jobs(x, z, labels, hp, method, 1)
}

/// Trains one binary model per class with that class as `+1`.
///
/// Gram matrices (and the deformed kernel) are computed once and shared by
/// every class. With exactly two classes a single binary problem is solved
/// and the second decision function is its negation. Per-class problems run
/// on up to `jobs` threads.
pub fn train_one_vs_rest_jobs(
    x: &DenseMatrix,
    z: Option<&DenseMatrix>,
    labels: &[i64],
    hp: &Hyperparameters,
    method: Method,
    jobs: usize,
) -> Result<MulticlassModel> {
    if labels.len() != x.rows() {
        return Err(Error::dim("training labels", x.rows(), labels.len()));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    if counts.len() < 2 {
        return Err(Error::SingleClassDataset);
    }
    let classes: Vec<i64> = counts.keys().copied().collect();
    let class_counts: Vec<usize> = counts.values().copied().collect();

    let kernels = TrainingKernels::build(x, z, hp, method)?;
    let targets = |class: i64| -> Vec<f64> { labels.iter().map(|&l| if l == class { 1.0 } else { -1.0 }).collect() };

    let binaries = if classes.len() == 2 {
        let first = kernels.fit(method, x, &targets(classes[0]), hp)?;
        let second = first.negated();
        vec![first, second]
    } else {
        let jobs = jobs.max(1).min(classes.len());
        let mut slots: Vec<Option<Result<BinaryModel>>> = (0..classes.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            for (worker, chunk) in slots.chunks_mut(classes.len().div_ceil(jobs)).enumerate() {
                let start = worker * classes.len().div_ceil(jobs);
                let kernels = &kernels;
                let classes = &classes;
                let targets = &targets;
                scope.spawn(move || {
                    for (offset, slot) in chunk.iter_mut().enumerate() {
                        let class = classes[start + offset];
                        *slot = Some(kernels.fit(method, x, &targets(class), hp));
                    }
                });
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("every class slot is filled"))
            .collect::<Result<Vec<_>>>()?
    };

    Ok(MulticlassModel {
        method,
        kernel: hp.kernel_main,
        dim: x.cols(),
        classes,
        class_counts,
        binaries,
    })
}

/// Label of the class with the highest decision value; ties go to the
/// class listed first.
pub fn predict(model: &MulticlassModel, x_test: &DenseMatrix) -> Result<Vec<i64>> {
    let scores = model.decision_values(x_test)?;
    Ok((0..x_test.rows())
        .map(|i| {
            let mut best = 0;
            for c in 1..scores.len() {
                if scores[c][i] > scores[best][i] {
                    best = c;
                }
            }
            model.classes[best]
        })
        .collect())
}
