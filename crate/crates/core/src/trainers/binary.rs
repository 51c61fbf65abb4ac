use crate::error::{Error, Result};
use crate::kernels::{deformed_kernel, dual_hessian, gram, privileged_gram, DeformedKernel, GramMatrix, KernelSpec};
use crate::linalg::DenseMatrix;
use crate::qp::{check_two_classes, solve_smo, solve_svm1plus_dual};

use super::bias::{hinge_bias, minimize_max_violation};
use super::{Hyperparameters, Method};

/// Multipliers above this value mark support vectors.
pub const SUPPORT_THRESHOLD: f64 = 1e-8;

/// Training-time by-products kept alongside a freshly trained model.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// Full dual vector α.
    pub alpha: Vec<f64>,
    /// β of the hinge-loss privileged dual.
    pub beta: Option<Vec<f64>>,
    pub support_indices: Vec<usize>,
    /// Slack ξ per training example.
    pub slack: Vec<f64>,
    /// Coefficients of the correcting function in the privileged kernel
    /// expansion, `g(z) = Σ c_i k̃(z_i, z) (+ ρ)`.
    pub correcting_coefficients: Vec<f64>,
    /// Explicit correcting offset ρ (hinge-loss privileged SVM only).
    pub correcting_bias: Option<f64>,
    /// Minimised dual objective reported by the solver.
    pub dual_objective: f64,
    pub iterations: u64,
    pub converged: bool,
    /// The bias (or ρ) came from a fallback rule instead of an average over
    /// support vectors.
    pub bias_fallback: bool,
    /// SMO clipped an unbounded multiplier at its numeric cap.
    pub cap_hit: bool,
}

/// Decision function `f(x) = Σ coeff_i · k(sv_i, x) + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryModel {
    pub method: Method,
    pub kernel: KernelSpec,
    /// Main-feature dimension.
    pub dim: usize,
    /// `α_i y_i` for each support vector.
    pub coefficients: Vec<f64>,
    pub support_vectors: Vec<Vec<f64>>,
    pub bias: f64,
    /// Present for models produced by training, absent for loaded ones.
    pub diagnostics: Option<Diagnostics>,
}

impl BinaryModel {
    pub fn converged(&self) -> bool {
        self.diagnostics.as_ref().is_none_or(|d| d.converged)
    }

    /// Model with every decision value negated.
    pub fn negated(&self) -> BinaryModel {
        BinaryModel {
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
            bias: -self.bias,
            diagnostics: None,
            ..self.clone()
        }
    }

    pub fn decision_value(&self, x: &[f64]) -> f64 {
        let sum: f64 = self
            .coefficients
            .iter()
            .zip(&self.support_vectors)
            .map(|(c, sv)| c * self.kernel.eval(sv, x))
            .sum();
        sum + self.bias
    }
}

/// Evaluates the decision function on every row of `x_test`.
pub fn decision_values(model: &BinaryModel, x_test: &DenseMatrix) -> Result<Vec<f64>> {
    if x_test.cols() != model.dim {
        return Err(Error::dim("decision values (feature dimension)", model.dim, x_test.cols()));
    }
    Ok((0..x_test.rows()).map(|i| model.decision_value(&x_test.row(i))).collect())
}

/// Gram matrices shared by every binary problem on one training set.
#[derive(Clone, Debug)]
pub struct TrainingKernels {
    pub main: GramMatrix,
    pub privileged: Option<GramMatrix>,
    /// Deformed kernel (squared-hinge privileged SVM only); independent of
    /// the labels, so one-vs-rest reuses it for every class.
    pub deformed: Option<DeformedKernel>,
}

impl TrainingKernels {
    pub fn build(x: &DenseMatrix, z: Option<&DenseMatrix>, hp: &Hyperparameters, method: Method) -> Result<Self> {
        hp.validate(method)?;
        let main = gram(x, hp.kernel_main)?;
        let (privileged, deformed) = if method.uses_privileged() {
            let z = z.ok_or(Error::AlignmentError {
                main: x.rows(),
                privileged: 0,
            })?;
            if z.rows() != x.rows() {
                return Err(Error::AlignmentError {
                    main: x.rows(),
                    privileged: z.rows(),
                });
            }
            let kt = privileged_gram(z, hp.kernel_priv, hp.augment_privileged)?;
            let deformed = match method {
                Method::Svm2Plus => Some(deformed_kernel(&kt.matrix, hp.c, hp.lambda)?),
                _ => None,
            };
            (Some(kt), deformed)
        } else {
            (None, None)
        };
        Ok(TrainingKernels {
            main,
            privileged,
            deformed,
        })
    }

    pub fn n(&self) -> usize {
        self.main.n()
    }

    /// Trains one binary model on these kernels.
    pub fn fit(&self, method: Method, x: &DenseMatrix, y: &[f64], hp: &Hyperparameters) -> Result<BinaryModel> {
        hp.validate(method)?;
        let n = self.n();
        if x.rows() != n {
            return Err(Error::dim("training rows", n, x.rows()));
        }
        if y.len() != n {
            return Err(Error::dim("training labels", n, y.len()));
        }
        check_two_classes(y)?;
        match method {
            Method::Svm => fit_svm(x, &self.main.matrix, y, hp),
            Method::Svm2Plus => {
                let deformed = self
                    .deformed
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("deformed kernel was not built".into()))?;
                fit_svm2plus(x, &self.main.matrix, deformed, y, hp)
            }
            Method::Svm1Plus => {
                let kt = self
                    .privileged
                    .as_ref()
                    .ok_or_else(|| Error::InvalidSpec("privileged kernel was not built".into()))?;
                fit_svm1plus(x, &self.main.matrix, &kt.matrix, y, hp)
            }
        }
    }
}

fn rows_of(x: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..x.rows()).map(|i| x.row(i)).collect()
}

/// `K (α ⊙ y)`
fn kernel_outputs(k: &DenseMatrix, alpha: &[f64], y: &[f64]) -> Vec<f64> {
    let ay: Vec<f64> = alpha.iter().zip(y).map(|(a, y)| a * y).collect();
    k.matvec(&ay).expect("kernel and multipliers share a dimension")
}

fn assemble(
    method: Method,
    x: &DenseMatrix,
    hp: &Hyperparameters,
    y: &[f64],
    bias: f64,
    diagnostics: Diagnostics,
) -> BinaryModel {
    let rows = rows_of(x);
    let coefficients = diagnostics.support_indices.iter().map(|&i| diagnostics.alpha[i] * y[i]).collect();
    let support_vectors = diagnostics.support_indices.iter().map(|&i| rows[i].clone()).collect();
    BinaryModel {
        method,
        kernel: hp.kernel_main,
        dim: x.cols(),
        coefficients,
        support_vectors,
        bias,
        diagnostics: Some(diagnostics),
    }
}

fn support_of(alpha: &[f64]) -> Vec<usize> {
    (0..alpha.len()).filter(|&i| alpha[i] > SUPPORT_THRESHOLD).collect()
}

fn fit_svm(x: &DenseMatrix, k: &DenseMatrix, y: &[f64], hp: &Hyperparameters) -> Result<BinaryModel> {
    let settings = hp.smo.clone().with_upper_bound(Some(hp.c));
    let sol = solve_smo(k, y, &settings)?;
    let outputs = kernel_outputs(k, &sol.alpha, y);
    let (bias, fallback) = hinge_bias(&sol.alpha, y, &outputs, hp.c);
    let slack = outputs
        .iter()
        .zip(y)
        .map(|(o, y)| (1.0 - y * (o + bias)).max(0.0))
        .collect();
    let diagnostics = Diagnostics {
        support_indices: support_of(&sol.alpha),
        alpha: sol.alpha,
        beta: None,
        slack,
        correcting_coefficients: Vec::new(),
        correcting_bias: None,
        dual_objective: sol.objective,
        iterations: sol.iterations,
        converged: sol.converged,
        bias_fallback: fallback,
        cap_hit: sol.cap_hit,
    };
    Ok(assemble(Method::Svm, x, hp, y, bias, diagnostics))
}

fn fit_svm2plus(
    x: &DenseMatrix,
    k: &DenseMatrix,
    deformed: &DeformedKernel,
    y: &[f64],
    hp: &Hyperparameters,
) -> Result<BinaryModel> {
    if deformed.n() != k.rows() {
        return Err(Error::dim("deformed kernel size", k.rows(), deformed.n()));
    }
    let h = dual_hessian(k, &deformed.q, y)?;
    let settings = hp.smo.clone().with_upper_bound(None);
    let sol = solve_smo(&h, y, &settings)?;
    let slack = deformed.q.matvec(&sol.alpha)?;
    let correcting = deformed.correcting_coefficients(&sol.alpha)?;
    let outputs = kernel_outputs(k, &sol.alpha, y);

    // α_i > 0  ⇒  y_i (o_i + b) = 1 − ξ_i
    let support = support_of(&sol.alpha);
    let (bias, fallback) = if support.is_empty() {
        let radius = 2.0 * (1.0 + max_abs(&outputs) + max_abs(&slack));
        let b = minimize_max_violation(
            |b| {
                (0..y.len())
                    .map(|i| (1.0 - slack[i] - y[i] * (outputs[i] + b)).max(0.0))
                    .fold(0.0, f64::max)
            },
            radius,
        );
        (b, true)
    } else {
        let sum: f64 = support.iter().map(|&i| y[i] * (1.0 - slack[i]) - outputs[i]).sum();
        (sum / support.len() as f64, false)
    };

    let diagnostics = Diagnostics {
        support_indices: support,
        alpha: sol.alpha,
        beta: None,
        slack,
        correcting_coefficients: correcting,
        correcting_bias: None,
        dual_objective: sol.objective,
        iterations: sol.iterations,
        converged: sol.converged,
        bias_fallback: fallback,
        cap_hit: sol.cap_hit,
    };
    Ok(assemble(Method::Svm2Plus, x, hp, y, bias, diagnostics))
}

fn fit_svm1plus(
    x: &DenseMatrix,
    k: &DenseMatrix,
    kt: &DenseMatrix,
    y: &[f64],
    hp: &Hyperparameters,
) -> Result<BinaryModel> {
    let (c, lambda) = (hp.c, hp.lambda);
    let sol = solve_svm1plus_dual(k, kt, y, c, lambda, &hp.svm1plus)?;
    let n = y.len();
    let u: Vec<f64> = (0..n).map(|i| sol.alpha[i] + sol.beta[i] - c).collect();
    let correcting: Vec<f64> = u.iter().map(|v| v / lambda).collect();
    // Correcting values without the offset ρ.
    let partial = kt.matvec(&correcting)?;
    let outputs = kernel_outputs(k, &sol.alpha, y);

    let threshold = 1e-6 * c;
    let alpha_set: Vec<usize> = (0..n).filter(|&i| sol.alpha[i] > threshold).collect();
    let beta_set: Vec<usize> = (0..n).filter(|&i| sol.beta[i] > threshold).collect();
    let mean = |idx: &[usize], f: &dyn Fn(usize) -> f64| idx.iter().map(|&i| f(i)).sum::<f64>() / idx.len() as f64;

    let mut fallback = false;
    // β_i > 0 ⇒ ξ_i = 0.
    let rho = if !beta_set.is_empty() {
        mean(&beta_set, &|i| -partial[i])
    } else {
        let pos: Vec<usize> = alpha_set.iter().copied().filter(|&i| y[i] > 0.0).collect();
        let neg: Vec<usize> = alpha_set.iter().copied().filter(|&i| y[i] < 0.0).collect();
        if !pos.is_empty() && !neg.is_empty() {
            // Margin equations: b + ρ = 1 − s_i − o_i (y = +1), ρ − b = 1 − s_i + o_i (y = −1).
            0.5 * (mean(&pos, &|i| 1.0 - partial[i] - outputs[i]) + mean(&neg, &|i| 1.0 - partial[i] + outputs[i]))
        } else {
            fallback = true;
            partial.iter().map(|s| -s).fold(f64::NEG_INFINITY, f64::max)
        }
    };
    let slack: Vec<f64> = partial.iter().map(|s| s + rho).collect();

    // α_i > 0 ⇒ y_i (o_i + b) = 1 − ξ_i
    let bias = if alpha_set.is_empty() {
        fallback = true;
        let radius = 2.0 * (1.0 + max_abs(&outputs) + max_abs(&slack));
        minimize_max_violation(
            |b| {
                (0..n)
                    .map(|i| (1.0 - slack[i] - y[i] * (outputs[i] + b)).max(0.0))
                    .fold(0.0, f64::max)
            },
            radius,
        )
    } else {
        mean(&alpha_set, &|i| y[i] * (1.0 - slack[i]) - outputs[i])
    };

    let diagnostics = Diagnostics {
        support_indices: support_of(&sol.alpha),
        alpha: sol.alpha,
        beta: Some(sol.beta),
        slack,
        correcting_coefficients: correcting,
        correcting_bias: Some(rho),
        dual_objective: sol.objective,
        iterations: sol.iterations,
        converged: sol.converged,
        bias_fallback: fallback,
        cap_hit: false,
    };
    Ok(assemble(Method::Svm1Plus, x, hp, y, bias, diagnostics))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Hinge-loss SVM on the main features (dual box `0 ≤ α ≤ C`).
pub fn train_svm(x: &DenseMatrix, y: &[f64], hp: &Hyperparameters) -> Result<BinaryModel> {
    check_two_classes(y)?;
    TrainingKernels::build(x, None, hp, Method::Svm)?.fit(Method::Svm, x, y, hp)
}

/// Squared-hinge privileged SVM: SMO on `K + Q ⊙ yyᵀ` with unbounded α,
/// then slack `ξ = Qα`, correcting coefficients `(C·K̃ + λI)⁻¹α` and the
/// bias from the margin equations of the support vectors.
pub fn train_svm2plus(x: &DenseMatrix, z: &DenseMatrix, y: &[f64], hp: &Hyperparameters) -> Result<BinaryModel> {
    check_two_classes(y)?;
    TrainingKernels::build(x, Some(z), hp, Method::Svm2Plus)?.fit(Method::Svm2Plus, x, y, hp)
}

/// Hinge-loss privileged SVM solved through its `2n`-variable dual.
pub fn train_svm1plus(x: &DenseMatrix, z: &DenseMatrix, y: &[f64], hp: &Hyperparameters) -> Result<BinaryModel> {
    check_two_classes(y)?;
    TrainingKernels::build(x, Some(z), hp, Method::Svm1Plus)?.fit(Method::Svm1Plus, x, y, hp)
}
