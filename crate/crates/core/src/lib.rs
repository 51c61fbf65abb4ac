//! Support vector machines that learn with privileged information.
//!
//! Training examples carry a second feature view (the privileged view) that
//! is only available at training time. Three trainers are provided:
//!
//! - plain hinge-loss SVM on the main features,
//! - the hinge-loss privileged SVM, whose dual has `2n` variables,
//! - the squared-hinge privileged SVM, whose dual is an `n`-variable QP in
//!   standard SVM form with the main kernel replaced by `K + Q ⊙ yyᵀ`
//!   ([`kernels::deformed_kernel`]).

pub mod data;
pub mod error;
pub mod kernels;
pub mod linalg;
pub mod qp;
pub mod trainers;

pub use error::{Error, Result};
