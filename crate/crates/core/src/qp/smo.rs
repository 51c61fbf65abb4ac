use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

use super::check_two_classes;

/// Stand-in upper bound for duals that have no box constraint.
pub const DEFAULT_NUMERIC_CAP: f64 = 1e12;

/// Curvature floor for working pairs with non-positive curvature.
const TAU: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct SmoSettings {
    /// Stop once the maximal KKT violation falls to this value.
    pub tolerance: f64,
    pub max_iterations: u64,
    /// Box `α ≤ upper_bound`; `None` means unbounded.
    pub upper_bound: Option<f64>,
    /// Bound used in place of an unbounded box.
    pub numeric_cap: f64,
}

impl Default for SmoSettings {
    fn default() -> Self {
        SmoSettings {
            tolerance: 1e-3,
            max_iterations: 10_000_000,
            upper_bound: None,
            numeric_cap: DEFAULT_NUMERIC_CAP,
        }
    }
}

impl SmoSettings {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn with_upper_bound(mut self, upper_bound: Option<f64>) -> Self {
        self.upper_bound = upper_bound;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualSolution {
    pub alpha: Vec<f64>,
    /// `½(α⊙y)ᵀH(α⊙y) − αᵀ1` at `alpha`.
    pub objective: f64,
    pub iterations: u64,
    pub kkt_violation: f64,
    pub converged: bool,
    /// Set when an unbounded multiplier was clipped at the numeric cap.
    pub cap_hit: bool,
}

/// Minimises `½(α⊙y)ᵀH(α⊙y) − αᵀ1` subject to `0 ≤ α ≤ U`, `yᵀα = 0` by
/// sequential minimal optimisation. Convergence is judged on the maximal
/// violating pair; the second index of each step is picked by second-order gain.
///
/// Ties in the working-set selection go to the lowest index, so the result
/// is a deterministic function of the inputs.
pub fn solve_smo(h: &DenseMatrix, y: &[f64], settings: &SmoSettings) -> Result<DualSolution> {
    let n = y.len();
    if !h.is_square() || h.rows() != n {
        return Err(Error::dim("smo (hessian size)", n, h.rows()));
    }
    check_two_classes(y)?;
    if !(settings.tolerance > 0.0) {
        return Err(Error::InvalidHyperparameter("smo tolerance must be positive".into()));
    }
    let (bound, unbounded) = match settings.upper_bound {
        Some(u) if u > 0.0 && u.is_finite() => (u, false),
        Some(u) => {
            return Err(Error::InvalidHyperparameter(format!("smo upper bound must be positive, got {u}")))
        }
        None => (settings.numeric_cap, true),
    };

    let mut alpha = vec![0.0; n];
    // Gradient of the objective in α: G = D H D α − 1.
    let mut grad = vec![-1.0; n];
    let mut iterations = 0u64;
    let mut cap_hit = false;
    let mut violation;

    let diag: Vec<f64> = (0..n).map(|t| h.column(t)[t]).collect();

    loop {
        // i maximises the violation score over the "up" set; j is chosen
        // among violating "low" indices by the second-order gain, and the
        // stopping test uses the maximal violating pair.
        let mut up: Option<(usize, f64)> = None;
        for t in 0..n {
            let in_up = if y[t] > 0.0 { alpha[t] < bound } else { alpha[t] > 0.0 };
            let score = -y[t] * grad[t];
            if in_up && up.is_none_or(|(_, s)| score > s) {
                up = Some((t, score));
            }
        }
        let Some((i, m)) = up else {
            violation = 0.0;
            break;
        };
        let hi = h.column(i);
        let mut low_min = f64::INFINITY;
        let mut best: Option<(usize, f64)> = None;
        for t in 0..n {
            let in_low = if y[t] > 0.0 { alpha[t] > 0.0 } else { alpha[t] < bound };
            if !in_low {
                continue;
            }
            let score = -y[t] * grad[t];
            low_min = low_min.min(score);
            let gap = m - score;
            if gap > 0.0 {
                let mut curvature = diag[i] + diag[t] - 2.0 * hi[t];
                if curvature <= 0.0 {
                    curvature = TAU;
                }
                let gain = -gap * gap / curvature;
                if best.is_none_or(|(_, g)| gain < g) {
                    best = Some((t, gain));
                }
            }
        }
        violation = if low_min.is_finite() { m - low_min } else { 0.0 };
        if violation <= settings.tolerance {
            break;
        }
        if iterations >= settings.max_iterations {
            break;
        }
        let Some((j, _)) = best else { break };
        iterations += 1;
        let violation_ij = m - (-y[j] * grad[j]);

        let hj = h.column(j);
        let mut curvature = diag[i] + diag[j] - 2.0 * hi[j];
        if curvature <= 0.0 {
            curvature = TAU;
        }
        // Move α_i by y_i·t and α_j by −y_j·t.
        let limit_i = if y[i] > 0.0 { bound - alpha[i] } else { alpha[i] };
        let limit_j = if y[j] > 0.0 { alpha[j] } else { bound - alpha[j] };
        let step = (violation_ij / curvature).min(limit_i).min(limit_j);
        debug_assert!(step * (0.5 * curvature * step - violation_ij) <= 0.0, "objective increased");

        alpha[i] += y[i] * step;
        alpha[j] -= y[j] * step;
        if step == limit_i {
            alpha[i] = if y[i] > 0.0 { bound } else { 0.0 };
        }
        if step == limit_j {
            alpha[j] = if y[j] > 0.0 { 0.0 } else { bound };
        }
        if unbounded && (alpha[i] >= bound || alpha[j] >= bound) {
            cap_hit = true;
        }

        for (k, g) in grad.iter_mut().enumerate() {
            *g += y[k] * step * (hi[k] - hj[k]);
        }
    }

    // ½αᵀ(Dh Dα) − Σα = ½αᵀ(G − 1)
    let objective: f64 = alpha.iter().zip(&grad).map(|(a, g)| 0.5 * a * (g - 1.0)).sum();
    Ok(DualSolution {
        alpha,
        objective,
        iterations,
        kkt_violation: violation.max(0.0),
        converged: violation <= settings.tolerance,
        cap_hit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{dual_hessian, gram, KernelSpec};
    use approx::assert_abs_diff_eq;

    fn two_point_kernel() -> DenseMatrix {
        let x = DenseMatrix::from_rows(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        gram(&x, KernelSpec::Linear).unwrap().matrix
    }

    #[test]
    fn two_point_box_constrained() {
        let k = two_point_kernel();
        let sol = solve_smo(
            &k,
            &[1.0, -1.0],
            &SmoSettings::default().with_upper_bound(Some(1.0)).with_tolerance(1e-12),
        )
        .unwrap();
        assert_abs_diff_eq!(sol.alpha[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.alpha[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective, -0.5, epsilon = 1e-12);
        assert!(sol.converged);
        assert!(!sol.cap_hit);
    }

    #[test]
    fn two_point_deformed_unbounded() {
        let k = two_point_kernel();
        let y = [1.0, -1.0];
        let h = dual_hessian(&k, &DenseMatrix::identity(2).scale(0.5), &y).unwrap();
        let sol = solve_smo(&h, &y, &SmoSettings::default().with_tolerance(1e-12)).unwrap();
        assert_abs_diff_eq!(sol.alpha[0], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.alpha[1], 0.4, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.objective, -0.4, epsilon = 1e-12);
    }

    #[test]
    fn requires_both_classes_and_matching_sizes() {
        let k = two_point_kernel();
        assert!(matches!(
            solve_smo(&k, &[1.0, 1.0], &SmoSettings::default()),
            Err(Error::NoBothClasses)
        ));
        assert!(matches!(
            solve_smo(&k, &[1.0, -1.0, 1.0], &SmoSettings::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            solve_smo(&k, &[1.0, 2.0], &SmoSettings::default()),
            Err(Error::InvalidLabel { .. })
        ));
    }

    #[test]
    fn iteration_cap_reports_not_converged() {
        let x = DenseMatrix::from_fn(20, 2, |i, j| ((i * 7 + j * 3) as f64).sin() * 3.0);
        let k = gram(&x, KernelSpec::Linear).unwrap().matrix;
        let y: Vec<f64> = (0..20).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let settings = SmoSettings {
            max_iterations: 2,
            upper_bound: Some(1.0),
            ..SmoSettings::default()
        };
        let sol = solve_smo(&k, &y, &settings).unwrap();
        assert!(!sol.converged);
        assert_eq!(sol.iterations, 2);
        assert!(sol.kkt_violation > settings.tolerance);
    }

    #[test]
    fn feasibility_and_determinism() {
        let x = DenseMatrix::from_fn(30, 3, |i, j| ((i * 5 + j * 11) as f64 * 0.37).cos() * 2.0);
        let k = gram(&x, KernelSpec::Rbf { gamma: 0.5 }).unwrap().matrix;
        let y: Vec<f64> = (0..30).map(|i| if (i * 7) % 5 < 2 { 1.0 } else { -1.0 }).collect();
        let settings = SmoSettings::default().with_upper_bound(Some(2.0)).with_tolerance(1e-8);
        let a = solve_smo(&k, &y, &settings).unwrap();
        let b = solve_smo(&k, &y, &settings).unwrap();
        assert_eq!(a, b);
        assert!(a.converged);
        assert!(a.alpha.iter().all(|&v| (0.0..=2.0).contains(&v)));
        let balance: f64 = a.alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert!(balance.abs() <= 1e-9 * 30.0);
    }
}
