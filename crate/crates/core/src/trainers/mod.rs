//! Binary and one-vs-rest training for the three methods, plus prediction.

mod bias;
mod binary;
mod multiclass;

use std::fmt;
use std::str::FromStr;

pub use binary::{
    decision_values, train_svm, train_svm1plus, train_svm2plus, BinaryModel, Diagnostics, TrainingKernels,
    SUPPORT_THRESHOLD,
};
pub use multiclass::{predict, train_one_vs_rest, train_one_vs_rest_jobs, MulticlassModel};

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::qp::{SmoSettings, Svm1PlusSettings};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    /// Hinge-loss SVM on the main features only.
    Svm,
    /// Hinge-loss SVM with a correcting function on the privileged features.
    Svm1Plus,
    /// Squared-hinge SVM with a correcting function on the privileged
    /// features, solved through the deformed kernel.
    Svm2Plus,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Svm, Method::Svm1Plus, Method::Svm2Plus];

    pub fn uses_privileged(&self) -> bool {
        !matches!(self, Method::Svm)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Svm => "svm",
            Method::Svm1Plus => "svm1plus",
            Method::Svm2Plus => "svm2plus",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svm" => Ok(Method::Svm),
            "svm1plus" => Ok(Method::Svm1Plus),
            "svm2plus" => Ok(Method::Svm2Plus),
            other => Err(Error::InvalidSpec(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hyperparameters {
    pub c: f64,
    /// Weight of the correcting-function regulariser (privileged methods).
    pub lambda: f64,
    pub kernel_main: KernelSpec,
    pub kernel_priv: KernelSpec,
    /// Append a constant-1 coordinate to privileged rows (linear kernel only).
    pub augment_privileged: bool,
    /// Tolerance and iteration cap for SMO; the box is set by each trainer.
    pub smo: SmoSettings,
    pub svm1plus: Svm1PlusSettings,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            c: 1.0,
            lambda: 1.0,
            kernel_main: KernelSpec::Linear,
            kernel_priv: KernelSpec::Linear,
            augment_privileged: true,
            smo: SmoSettings::default(),
            svm1plus: Svm1PlusSettings::default(),
        }
    }
}

impl Hyperparameters {
    pub fn new(c: f64, lambda: f64) -> Self {
        Hyperparameters {
            c,
            lambda,
            ..Default::default()
        }
    }

    /// Sets the convergence tolerance of both solvers.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.smo.tolerance = tolerance;
        self.svm1plus.tolerance = tolerance;
        self
    }

    pub fn with_kernels(mut self, main: KernelSpec, privileged: KernelSpec) -> Self {
        self.kernel_main = main;
        self.kernel_priv = privileged;
        self
    }

    pub(crate) fn validate(&self, method: Method) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidHyperparameter(format!("C must be positive, got {}", self.c)));
        }
        if method.uses_privileged() && !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidHyperparameter(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        self.kernel_main.validate()?;
        if method.uses_privileged() {
            self.kernel_priv.validate()?;
        }
        Ok(())
    }
}
