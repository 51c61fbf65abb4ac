//! Dual QP solvers.
//!
//! [`solve_smo`] handles the n-variable dual in standard SVM form (plain SVM
//! with a box, and the squared-hinge privileged dual with no box).
//! [`solve_svm1plus_dual`] handles the 2n-variable hinge-loss privileged dual
//! whose constraints do not fit the SMO pattern.

mod smo;
mod svm1plus;

pub use smo::{solve_smo, DualSolution, SmoSettings, DEFAULT_NUMERIC_CAP};
pub use svm1plus::{
    project_feasible, solve_svm1plus_dual, svm1plus_objective, ProjectionSettings, Svm1PlusDualSolution,
    Svm1PlusSettings,
};

use crate::error::{Error, Result};
use crate::kernels::validate_binary_labels;

/// Validates labels and requires both classes to be present.
pub(crate) fn check_two_classes(y: &[f64]) -> Result<()> {
    validate_binary_labels(y)?;
    let pos = y.iter().any(|&v| v > 0.0);
    let neg = y.iter().any(|&v| v < 0.0);
    if pos && neg {
        Ok(())
    } else {
        Err(Error::NoBothClasses)
    }
}
