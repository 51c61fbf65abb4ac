//! Gram matrices for the main and privileged views, and the deformed kernel
//! that folds the privileged view into a standard SVM dual.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{self, cholesky, cholesky_solve, default_jitter_schedule, CholeskyFactor, DenseMatrix};

/// Kernel family and hyperparameters.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum KernelSpec {
    #[default]
    Linear,
    /// `exp(-gamma · ‖a - b‖²)`
    Rbf { gamma: f64 },
    /// `(gamma · aᵀb + coef0)^degree`
    Polynomial { degree: u32, gamma: f64, coef0: f64 },
}

impl KernelSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            KernelSpec::Linear => Ok(()),
            KernelSpec::Rbf { gamma } => {
                if gamma > 0.0 && gamma.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidSpec(format!("rbf gamma must be positive, got {gamma}")))
                }
            }
            KernelSpec::Polynomial { degree, gamma, coef0 } => {
                if degree < 1 {
                    return Err(Error::InvalidSpec("polynomial degree must be at least 1".into()));
                }
                if !(gamma > 0.0 && gamma.is_finite()) {
                    return Err(Error::InvalidSpec(format!("polynomial gamma must be positive, got {gamma}")));
                }
                if !coef0.is_finite() {
                    return Err(Error::InvalidSpec("polynomial coef0 must be finite".into()));
                }
                Ok(())
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, KernelSpec::Linear)
    }

    /// Kernel value for two equally long vectors.
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            KernelSpec::Linear => linalg::dot(a, b),
            KernelSpec::Rbf { gamma } => {
                let dist2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (-gamma * dist2).exp()
            }
            KernelSpec::Polynomial { degree, gamma, coef0 } => {
                (gamma * linalg::dot(a, b) + coef0).powi(degree as i32)
            }
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Linear => write!(f, "linear"),
            KernelSpec::Rbf { gamma } => write!(f, "rbf:{gamma}"),
            KernelSpec::Polynomial { degree, gamma, coef0 } => write!(f, "poly:{degree}:{gamma}:{coef0}"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    /// Parses `linear`, `rbf:<gamma>` or `poly:<degree>:<gamma>:<coef0>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |p: &str| -> Result<f64> {
            p.parse::<f64>()
                .map_err(|_| Error::InvalidSpec(format!("bad number {p:?} in kernel {s:?}")))
        };
        let spec = match parts.as_slice() {
            ["linear"] => KernelSpec::Linear,
            ["rbf", g] => KernelSpec::Rbf { gamma: num(g)? },
            ["poly", d, g, c] => KernelSpec::Polynomial {
                degree: d
                    .parse()
                    .map_err(|_| Error::InvalidSpec(format!("bad degree {d:?} in kernel {s:?}")))?,
                gamma: num(g)?,
                coef0: num(c)?,
            },
            _ => return Err(Error::InvalidSpec(format!("unrecognised kernel {s:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Which feature view a Gram matrix was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeatureView {
    Main,
    Privileged,
}

#[derive(Clone, Debug)]
pub struct GramMatrix {
    pub matrix: DenseMatrix,
    pub spec: KernelSpec,
    pub source: FeatureView,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.matrix.rows()
    }
}

fn rows_of(x: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..x.rows()).map(|i| x.row(i)).collect()
}

fn gram_of(x: &DenseMatrix, spec: KernelSpec, source: FeatureView) -> Result<GramMatrix> {
    spec.validate()?;
    if x.rows() == 0 {
        return Err(Error::dim("gram (rows)", 1, 0));
    }
    let rows = rows_of(x);
    let n = rows.len();
    let mut k = DenseMatrix::zeros(n, n);
    for j in 0..n {
        for i in j..n {
            let v = spec.eval(&rows[i], &rows[j]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(GramMatrix {
        matrix: k,
        spec,
        source,
    })
}

/// Gram matrix of the main features (one example per row of `x`).
pub fn gram(x: &DenseMatrix, spec: KernelSpec) -> Result<GramMatrix> {
    gram_of(x, spec, FeatureView::Main)
}

/// Appends a constant-1 column.
pub fn augment_bias(z: &DenseMatrix) -> DenseMatrix {
    let s = z.cols();
    DenseMatrix::from_fn(z.rows(), s + 1, |i, j| if j < s { z[(i, j)] } else { 1.0 })
}

/// Gram matrix of the privileged features. With a linear kernel and
/// `augment` set, a constant-1 coordinate is appended to every row so the
/// correcting function carries its own offset; nonlinear kernels are used
/// as given.
pub fn privileged_gram(z: &DenseMatrix, spec: KernelSpec, augment: bool) -> Result<GramMatrix> {
    if augment && spec.is_linear() {
        gram_of(&augment_bias(z), spec, FeatureView::Privileged)
    } else {
        gram_of(z, spec, FeatureView::Privileged)
    }
}

/// Kernel values between training rows (rows of the result) and test rows
/// (columns of the result).
pub fn cross_gram(x_train: &DenseMatrix, x_test: &DenseMatrix, spec: KernelSpec) -> Result<DenseMatrix> {
    spec.validate()?;
    if x_train.cols() != x_test.cols() {
        return Err(Error::dim("cross gram (feature dimension)", x_train.cols(), x_test.cols()));
    }
    let train = rows_of(x_train);
    let test = rows_of(x_test);
    Ok(DenseMatrix::from_fn(train.len(), test.len(), |i, j| spec.eval(&train[i], &test[j])))
}

/// `Q = (1/λ)·(K̃ − K̃ (λ/C·I + K̃)⁻¹ K̃)` together with the factorization of
/// `λ/C·I + K̃`, which is reused to recover the correcting function.
#[derive(Clone, Debug)]
pub struct DeformedKernel {
    pub q: DenseMatrix,
    pub c: f64,
    pub lambda: f64,
    factor: CholeskyFactor,
}

impl DeformedKernel {
    pub fn n(&self) -> usize {
        self.q.rows()
    }

    /// Coefficients `(C·K̃ + λI)⁻¹ α` of the correcting function in the
    /// privileged kernel expansion.
    pub fn correcting_coefficients(&self, alpha: &[f64]) -> Result<Vec<f64>> {
        let s = self.factor.solve_vec(alpha)?;
        Ok(s.into_iter().map(|v| v / self.c).collect())
    }

    pub fn jitter_applied(&self) -> f64 {
        self.factor.jitter_applied()
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidHyperparameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Builds the deformed kernel from a privileged Gram matrix.
///
/// `K̃ − K̃(aI + K̃)⁻¹K̃ = a·K̃(aI + K̃)⁻¹` with `a = λ/C`, so `Q = S / C` where
/// `(λ/C·I + K̃) S = K̃`. This avoids the cancellation of the subtracted
/// form when `K̃` dominates `λ/C`.
pub fn deformed_kernel(ktilde: &DenseMatrix, c: f64, lambda: f64) -> Result<DeformedKernel> {
    check_positive("C", c)?;
    check_positive("lambda", lambda)?;
    if !ktilde.is_square() {
        return Err(Error::dim("deformed kernel (square input)", ktilde.rows(), ktilde.cols()));
    }
    let shifted = ktilde.add_diagonal(lambda / c);
    let factor = cholesky(&shifted, &default_jitter_schedule(&shifted))?;
    let s = cholesky_solve(&factor, ktilde)?;
    let mut q = s.scale(1.0 / c);
    q.symmetrize();
    Ok(DeformedKernel { q, c, lambda, factor })
}

/// Checks that every label is exactly -1 or +1.
pub fn validate_binary_labels(y: &[f64]) -> Result<()> {
    match y.iter().position(|&v| v != 1.0 && v != -1.0) {
        Some(index) => Err(Error::InvalidLabel { index, value: y[index] }),
        None => Ok(()),
    }
}

/// `H[i][j] = K[i][j] + Q[i][j]·y_i·y_j`.
pub fn dual_hessian(k: &DenseMatrix, q: &DenseMatrix, y: &[f64]) -> Result<DenseMatrix> {
    let n = k.rows();
    if !k.is_square() {
        return Err(Error::dim("dual hessian (square K)", n, k.cols()));
    }
    if q.rows() != n || q.cols() != n {
        return Err(Error::dim("dual hessian (Q size)", n, q.rows()));
    }
    if y.len() != n {
        return Err(Error::dim("dual hessian (labels)", n, y.len()));
    }
    validate_binary_labels(y)?;
    Ok(DenseMatrix::from_fn(n, n, |i, j| k[(i, j)] + q[(i, j)] * y[i] * y[j]))
}
