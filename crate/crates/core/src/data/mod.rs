//! Datasets: sparse text format, privileged-feature alignment, TF-IDF,
//! synthetic generation and per-class sampling.

mod sparse;
mod synth;
mod tfidf;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

pub use sparse::{
    format_sparse, load_privileged, load_sparse, parse_privileged, parse_sparse, write_sparse, SparseMatrix,
    SparseRow,
};
pub use synth::{synth_lupi, Prng, SynthSpec, SyntheticLupi};
pub use tfidf::{tfidf_vectorize, tokenize, Weighting};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Main features, optional privileged features and integer class labels,
/// aligned by row.
#[derive(Clone, Debug, PartialEq)]
pub struct LupiDataset {
    pub x: SparseMatrix,
    pub z: Option<SparseMatrix>,
    pub y: Vec<i64>,
}

impl LupiDataset {
    pub fn new(x: SparseMatrix, z: Option<SparseMatrix>, y: Vec<i64>) -> Result<Self> {
        if y.len() != x.len() {
            return Err(Error::dim("labels", x.len(), y.len()));
        }
        if let Some(z) = &z {
            if z.len() != x.len() {
                return Err(Error::AlignmentError {
                    main: x.len(),
                    privileged: z.len(),
                });
            }
        }
        Ok(LupiDataset { x, z, y })
    }

    /// Reads a main-feature file and, optionally, its privileged companion.
    pub fn load(main: impl AsRef<std::path::Path>, privileged: Option<&std::path::Path>) -> Result<Self> {
        let (x, y) = load_sparse(main)?;
        let z = privileged.map(|p| load_privileged(p, x.len())).transpose()?;
        Self::new(x, z, y)
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn x_dense(&self) -> Result<DenseMatrix> {
        self.x.to_dense(self.x.dim)
    }

    pub fn z_dense(&self) -> Result<Option<DenseMatrix>> {
        self.z.as_ref().map(|z| z.to_dense(z.dim)).transpose()
    }

    /// Rows `indices` in the given order.
    pub fn select(&self, indices: &[usize]) -> LupiDataset {
        LupiDataset {
            x: self.x.select(indices),
            z: self.z.as_ref().map(|z| z.select(indices)),
            y: indices.iter().map(|&i| self.y[i]).collect(),
        }
    }

    /// Row indices per class, classes ascending.
    pub fn class_indices(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut map: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, &label) in self.y.iter().enumerate() {
            map.entry(label).or_default().push(i);
        }
        map
    }
}

/// Samples `k_train` training and up to `k_test` test rows from every class,
/// uniformly without replacement. Selected rows keep their original order.
pub fn sample_per_class(
    dataset: &LupiDataset,
    k_train: usize,
    k_test: usize,
    seed: u64,
) -> Result<(LupiDataset, LupiDataset)> {
    let mut rng = Prng::new(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut indices) in dataset.class_indices() {
        if indices.len() < k_train + 1 {
            return Err(Error::InsufficientClassSize {
                class,
                available: indices.len(),
                required: k_train + 1,
            });
        }
        indices.shuffle(rng.rng());
        train.extend_from_slice(&indices[..k_train]);
        let rest = &indices[k_train..];
        test.extend_from_slice(&rest[..rest.len().min(k_test)]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((dataset.select(&train), dataset.select(&test)))
}

/// Stratified holdout: from each class, `round(fraction · count)` rows (at
/// most `count − 1`) go to the holdout part. Returns `(fit, holdout)` row
/// indices, each ascending.
pub fn holdout_split(labels: &[i64], fraction: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidHyperparameter(format!(
            "holdout fraction must lie in [0, 1), got {fraction}"
        )));
    }
    let mut by_class: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = Prng::new(seed);
    let mut fit = Vec::new();
    let mut holdout = Vec::new();
    for (_, mut indices) in by_class {
        indices.shuffle(rng.rng());
        let take = ((fraction * indices.len() as f64).round() as usize).min(indices.len() - 1);
        holdout.extend_from_slice(&indices[..take]);
        fit.extend_from_slice(&indices[take..]);
    }
    fit.sort_unstable();
    holdout.sort_unstable();
    Ok((fit, holdout))
}
