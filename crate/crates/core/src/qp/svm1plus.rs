use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

use super::check_two_classes;

/// Dykstra projection controls.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionSettings {
    pub tolerance: f64,
    pub max_passes: usize,
}

impl Default for ProjectionSettings {
    fn default() -> Self {
        ProjectionSettings {
            tolerance: 1e-10,
            max_passes: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Svm1PlusSettings {
    /// Stop when `|ΔF| ≤ tolerance · max(1, |F|)` between accepted iterates.
    pub tolerance: f64,
    pub max_iterations: u64,
    pub projection: ProjectionSettings,
    pub power_iterations: usize,
    /// Multiplier applied to the power-iteration Lipschitz estimate.
    pub step_safety: f64,
}

impl Default for Svm1PlusSettings {
    fn default() -> Self {
        Svm1PlusSettings {
            tolerance: 1e-9,
            max_iterations: 100_000,
            projection: ProjectionSettings::default(),
            power_iterations: 50,
            step_safety: 1.1,
        }
    }
}

impl Svm1PlusSettings {
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Svm1PlusDualSolution {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Minimised negation of the dual objective; the dual maximum is
    /// `-objective`.
    pub objective: f64,
    pub iterations: u64,
    pub converged: bool,
    /// Lipschitz constant used for the step `1 / L`.
    pub lipschitz: f64,
}

/// `y = M x` for a symmetric column-major matrix.
fn symv(m: &DenseMatrix, x: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        for (o, mij) in out.iter_mut().zip(m.column(j)) {
            *o += mij * xj;
        }
    }
}

struct Problem<'a> {
    /// `y_i y_j K_ij`
    ky: DenseMatrix,
    kt: &'a DenseMatrix,
    c: f64,
    lambda: f64,
    n: usize,
}

struct Evaluation {
    value: f64,
    grad: Vec<f64>,
}

impl Problem<'_> {
    /// Objective `½αᵀ(DKD)α + (1/2λ)uᵀK̃u − Σα` with `u = α + β − C`, and
    /// its gradient with respect to `(α, β)`.
    fn evaluate(&self, x: &[f64], scratch: &mut [Vec<f64>; 3]) -> Evaluation {
        let n = self.n;
        let (alpha, beta) = x.split_at(n);
        let [u, w, v] = scratch;
        for i in 0..n {
            u[i] = alpha[i] + beta[i] - self.c;
        }
        symv(self.kt, u, w);
        w.iter_mut().for_each(|e| *e /= self.lambda);
        symv(&self.ky, alpha, v);
        let mut value = 0.0;
        let mut grad = vec![0.0; 2 * n];
        for i in 0..n {
            value += 0.5 * alpha[i] * v[i] + 0.5 * u[i] * w[i] - alpha[i];
            grad[i] = v[i] + w[i] - 1.0;
            grad[n + i] = w[i];
        }
        Evaluation { value, grad }
    }

    fn hessian_apply(&self, d: &[f64], scratch: &mut [Vec<f64>; 3]) -> Vec<f64> {
        let n = self.n;
        let (da, db) = d.split_at(n);
        let [s, w, v] = scratch;
        for i in 0..n {
            s[i] = da[i] + db[i];
        }
        symv(self.kt, s, w);
        symv(&self.ky, da, v);
        let mut out = vec![0.0; 2 * n];
        for i in 0..n {
            out[i] = v[i] + w[i] / self.lambda;
            out[n + i] = w[i] / self.lambda;
        }
        out
    }

    fn lipschitz_estimate(&self, iterations: usize, scratch: &mut [Vec<f64>; 3]) -> f64 {
        let mut v: Vec<f64> = (0..2 * self.n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
        let norm = |v: &[f64]| v.iter().map(|e| e * e).sum::<f64>().sqrt();
        let n0 = norm(&v);
        v.iter_mut().for_each(|e| *e /= n0);
        let mut estimate = 0.0;
        for _ in 0..iterations {
            let hv = self.hessian_apply(&v, scratch);
            estimate = v.iter().zip(&hv).map(|(a, b)| a * b).sum::<f64>();
            let nh = norm(&hv);
            if nh == 0.0 {
                break;
            }
            v = hv.into_iter().map(|e| e / nh).collect();
        }
        estimate
    }
}

/// Projects `point = (α, β)` onto `{α, β ≥ 0, Σα_i y_i = 0, Σ(α_i + β_i) = total}`
/// by Dykstra's alternating projections between the affine constraint set
/// and the nonnegative orthant. The result is exactly nonnegative.
///
/// Returns the projected point and the number of passes used.
pub fn project_feasible(
    point: &[f64],
    y: &[f64],
    total: f64,
    settings: &ProjectionSettings,
) -> (Vec<f64>, usize) {
    let n = y.len();
    debug_assert_eq!(point.len(), 2 * n);
    let nf = n as f64;
    let sy: f64 = y.iter().sum();
    // Gram matrix of the two constraint normals (y, 0) and (1, 1).
    let det = nf * 2.0 * nf - sy * sy;
    let residuals = |z: &[f64]| -> (f64, f64) {
        let r1: f64 = y.iter().zip(z).map(|(a, b)| a * b).sum();
        let r2: f64 = z.iter().sum::<f64>() - total;
        (r1, r2)
    };
    let project_affine = |z: &mut [f64]| {
        let (r1, r2) = residuals(z);
        let t1 = (2.0 * nf * r1 - sy * r2) / det;
        let t2 = (nf * r2 - sy * r1) / det;
        for i in 0..n {
            z[i] -= t1 * y[i] + t2;
            z[n + i] -= t2;
        }
    };

    let scale = total.abs().max(1.0);
    let mut x = point.to_vec();
    let mut correction = vec![0.0; 2 * n];
    let mut a = vec![0.0; 2 * n];
    let mut passes = 0;
    while passes < settings.max_passes {
        passes += 1;
        a.copy_from_slice(&x);
        project_affine(&mut a);
        let mut delta: f64 = 0.0;
        for k in 0..2 * n {
            let shifted = a[k] + correction[k];
            let next = shifted.max(0.0);
            correction[k] = shifted - next;
            delta = delta.max((next - x[k]).abs());
            x[k] = next;
        }
        if delta <= settings.tolerance {
            let (r1, r2) = residuals(&x);
            if r1.abs().max(r2.abs()) <= settings.tolerance * scale {
                break;
            }
        }
    }
    (x, passes)
}

/// Negated dual objective of the hinge-loss privileged SVM at `(α, β)`:
/// `½(α⊙y)ᵀK(α⊙y) + (1/2λ)(α + β − C)ᵀK̃(α + β − C) − αᵀ1`.
pub fn svm1plus_objective(
    k: &DenseMatrix,
    ktilde: &DenseMatrix,
    y: &[f64],
    c: f64,
    lambda: f64,
    alpha: &[f64],
    beta: &[f64],
) -> f64 {
    let n = y.len();
    let ay: Vec<f64> = alpha.iter().zip(y).map(|(a, y)| a * y).collect();
    let u: Vec<f64> = alpha.iter().zip(beta).map(|(a, b)| a + b - c).collect();
    let mut kay = vec![0.0; n];
    let mut ktu = vec![0.0; n];
    symv(k, &ay, &mut kay);
    symv(ktilde, &u, &mut ktu);
    let quad_main: f64 = ay.iter().zip(&kay).map(|(a, b)| a * b).sum();
    let quad_priv: f64 = u.iter().zip(&ktu).map(|(a, b)| a * b).sum();
    0.5 * quad_main + 0.5 * quad_priv / lambda - alpha.iter().sum::<f64>()
}

/// Maximises the hinge-loss privileged dual
///
/// `αᵀ1 − ½(α⊙y)ᵀK(α⊙y) − (1/2λ)(α + β − C)ᵀK̃(α + β − C)`
///
/// over `α, β ≥ 0`, `Σ(α_i + β_i − C) = 0`, `Σα_i y_i = 0` by accelerated
/// projected gradient (FISTA with function-value restart) started from the
/// feasible point `α = 0, β = C`.
pub fn solve_svm1plus_dual(
    k: &DenseMatrix,
    ktilde: &DenseMatrix,
    y: &[f64],
    c: f64,
    lambda: f64,
    settings: &Svm1PlusSettings,
) -> Result<Svm1PlusDualSolution> {
    let n = y.len();
    if !k.is_square() || k.rows() != n {
        return Err(Error::dim("svm1plus dual (main kernel size)", n, k.rows()));
    }
    if !ktilde.is_square() || ktilde.rows() != n {
        return Err(Error::dim("svm1plus dual (privileged kernel size)", n, ktilde.rows()));
    }
    check_two_classes(y)?;
    for (name, v) in [("C", c), ("lambda", lambda)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidHyperparameter(format!("{name} must be positive and finite, got {v}")));
        }
    }

    let problem = Problem {
        ky: DenseMatrix::from_fn(n, n, |i, j| y[i] * y[j] * k[(i, j)]),
        kt: ktilde,
        c,
        lambda,
        n,
    };
    let mut scratch = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let estimate = problem.lipschitz_estimate(settings.power_iterations, &mut scratch);
    let lipschitz = if estimate > 0.0 { settings.step_safety * estimate } else { 1.0 };
    let total = n as f64 * c;

    let mut x: Vec<f64> = std::iter::repeat_n(0.0, n).chain(std::iter::repeat_n(c, n)).collect();
    let mut x_prev = x.clone();
    let mut f_x = problem.evaluate(&x, &mut scratch).value;
    let mut momentum = 1.0f64;
    let mut iterations = 0u64;
    let mut converged = false;
    let mut probe = vec![0.0; 2 * n];

    while iterations < settings.max_iterations {
        iterations += 1;
        let next_momentum = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / next_momentum;
        for i in 0..2 * n {
            probe[i] = x[i] + beta * (x[i] - x_prev[i]);
        }
        let at_probe = problem.evaluate(&probe, &mut scratch);
        for i in 0..2 * n {
            probe[i] -= at_probe.grad[i] / lipschitz;
        }
        let (candidate, _) = project_feasible(&probe, y, total, &settings.projection);
        let f_candidate = problem.evaluate(&candidate, &mut scratch).value;

        if f_candidate > f_x && beta > 0.0 {
            // Restart: drop the momentum and take a plain step next time.
            momentum = 1.0;
            x_prev.copy_from_slice(&x);
            continue;
        }
        let change = (f_x - f_candidate).abs();
        x_prev = std::mem::replace(&mut x, candidate);
        f_x = f_candidate;
        momentum = next_momentum;
        if change <= settings.tolerance * f_x.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    let beta = x.split_off(n);
    Ok(Svm1PlusDualSolution {
        alpha: x,
        beta,
        objective: f_x,
        iterations,
        converged,
        lipschitz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gram, privileged_gram, KernelSpec};
    use approx::assert_abs_diff_eq;

    fn constraint_residuals(sol: &Svm1PlusDualSolution, y: &[f64], c: f64) -> (f64, f64) {
        let sum_total: f64 = sol.alpha.iter().zip(&sol.beta).map(|(a, b)| a + b - c).sum();
        let sum_y: f64 = sol.alpha.iter().zip(y).map(|(a, y)| a * y).sum();
        (sum_total, sum_y)
    }

    #[test]
    fn initial_point_is_feasible() {
        let y = [1.0, -1.0, 1.0];
        let c = 0.7;
        let alpha = [0.0; 3];
        let beta = [c; 3];
        let total: f64 = alpha.iter().zip(&beta).map(|(a, b)| a + b - c).sum();
        let balance: f64 = alpha.iter().zip(&y).map(|(a, y)| a * y).sum();
        assert_eq!(total, 0.0);
        assert_eq!(balance, 0.0);
        let mut point = alpha.to_vec();
        point.extend_from_slice(&beta);
        let (projected, _) = project_feasible(&point, &y, 3.0 * c, &ProjectionSettings::default());
        for (p, q) in projected.iter().zip(&point) {
            assert_abs_diff_eq!(p, q, epsilon = 1e-15);
        }
    }

    #[test]
    fn projection_lands_in_feasible_set() {
        let y = [1.0, 1.0, -1.0, -1.0, 1.0];
        let point = [3.0, -1.0, 0.5, 2.0, -0.3, 0.1, -2.0, 1.5, 0.0, 0.4];
        let total = 5.0;
        let (x, passes) = project_feasible(&point, &y, total, &ProjectionSettings::default());
        assert!(passes < 10_000);
        assert!(x.iter().all(|&v| v >= 0.0));
        let r1: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
        let r2: f64 = x.iter().sum::<f64>() - total;
        assert!(r1.abs() <= 1e-9 && r2.abs() <= 1e-9);
        // Projection is idempotent.
        let (again, _) = project_feasible(&x, &y, total, &ProjectionSettings::default());
        for (a, b) in again.iter().zip(&x) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn two_point_symmetric_instance() {
        let x = DenseMatrix::from_rows(&[[1.0, 0.0], [-1.0, 0.0]]).unwrap();
        let k = gram(&x, KernelSpec::Linear).unwrap().matrix;
        let kt = DenseMatrix::identity(2);
        let y = [1.0, -1.0];
        let sol = solve_svm1plus_dual(&k, &kt, &y, 1.0, 1.0, &Svm1PlusSettings::default()).unwrap();
        assert!(sol.converged);
        assert_abs_diff_eq!(sol.alpha[0], sol.alpha[1], epsilon = 1e-6);
        let (r1, r2) = constraint_residuals(&sol, &y, 1.0);
        assert!(r1.abs() <= 1e-7 * 2.0 && r2.abs() <= 1e-7 * 2.0);
        let value = svm1plus_objective(&k, &kt, &y, 1.0, 1.0, &sol.alpha, &sol.beta);
        assert_abs_diff_eq!(value, sol.objective, epsilon = 1e-12);
    }

    #[test]
    fn solution_is_feasible_and_deterministic() {
        let x = DenseMatrix::from_fn(12, 3, |i, j| ((i * 3 + j) as f64 * 0.71).sin() * 2.0);
        let z = DenseMatrix::from_fn(12, 2, |i, j| ((i + 5 * j) as f64 * 0.33).cos());
        let k = gram(&x, KernelSpec::Linear).unwrap().matrix;
        let kt = privileged_gram(&z, KernelSpec::Linear, false).unwrap().matrix;
        let y: Vec<f64> = (0..12).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let settings = Svm1PlusSettings::default();
        let a = solve_svm1plus_dual(&k, &kt, &y, 0.5, 2.0, &settings).unwrap();
        let b = solve_svm1plus_dual(&k, &kt, &y, 0.5, 2.0, &settings).unwrap();
        assert_eq!(a, b);
        assert!(a.alpha.iter().chain(&a.beta).all(|&v| v >= 0.0));
        let (r1, r2) = constraint_residuals(&a, &y, 0.5);
        assert!(r1.abs() <= 1e-7 * 12.0 * 0.5);
        assert!(r2.abs() <= 1e-7 * 12.0);
        // Better than the starting point.
        let start = svm1plus_objective(&k, &kt, &y, 0.5, 2.0, &[0.0; 12], &[0.5; 12]);
        assert!(a.objective < start);
    }

    #[test]
    fn rejects_bad_inputs() {
        let k = DenseMatrix::identity(2);
        let s = Svm1PlusSettings::default();
        assert!(matches!(
            solve_svm1plus_dual(&k, &k, &[1.0, 1.0], 1.0, 1.0, &s),
            Err(Error::NoBothClasses)
        ));
        assert!(solve_svm1plus_dual(&k, &DenseMatrix::identity(3), &[1.0, -1.0], 1.0, 1.0, &s).is_err());
        assert!(matches!(
            solve_svm1plus_dual(&k, &k, &[1.0, -1.0], 0.0, 1.0, &s),
            Err(Error::InvalidHyperparameter(_))
        ));
    }
}
