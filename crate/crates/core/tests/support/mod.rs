//! Reference solvers used only by tests: dense Gaussian elimination,
//! active-set enumeration for small SVM duals, and a long-run projected
//! gradient for the hinge-loss privileged dual with an exact projection.
#![allow(dead_code)]

use lupi_svm::linalg::DenseMatrix;

/// Solves `a x = b` by Gaussian elimination with partial pivoting; `None`
/// when a pivot falls below `1e-12` relative to the largest entry.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

pub fn to_rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i)).collect()
}

pub fn quadratic_objective(h: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let n = alpha.len();
    let mut value = 0.0;
    for i in 0..n {
        let hi: f64 = (0..n).map(|j| h[i][j] * alpha[j]).sum();
        value += 0.5 * alpha[i] * hi - alpha[i];
    }
    value
}

#[derive(Clone, Debug)]
pub struct Reference {
    pub alpha: Vec<f64>,
    pub objective: f64,
}

/// Minimises `½αᵀHα − 1ᵀα` subject to `yᵀα = 0`, `0 ≤ α (≤ upper)` by
/// trying every assignment of each multiplier to {zero, free, upper} (or
/// {zero, free} without an upper bound), solving the equality-constrained
/// stationarity system on the free set, and keeping the best feasible point.
pub fn enumerate_dual(h: &[Vec<f64>], y: &[f64], upper: Option<f64>) -> Reference {
    let n = y.len();
    let states: usize = if upper.is_some() { 3 } else { 2 };
    let patterns = states.pow(n as u32);
    let mut best: Option<Reference> = None;
    let mut state = vec![0u8; n];
    for code in 0..patterns {
        let mut rest = code;
        for s in state.iter_mut() {
            *s = (rest % states) as u8;
            rest /= states;
        }
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 1).collect();
        let mut alpha = vec![0.0; n];
        if let Some(u) = upper {
            for i in 0..n {
                if state[i] == 2 {
                    alpha[i] = u;
                }
            }
        }
        let fixed_sum: f64 = (0..n).map(|i| y[i] * alpha[i]).sum();
        if free.is_empty() {
            if fixed_sum.abs() > 1e-12 {
                continue;
            }
        } else {
            let m = free.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[r][s] = h[i][j];
                }
                a[r][m] = y[i];
                a[m][r] = y[i];
                b[r] = 1.0 - (0..n).filter(|&j| state[j] == 2).map(|j| h[i][j] * alpha[j]).sum::<f64>();
            }
            b[m] = -fixed_sum;
            let Some(sol) = gauss_solve(a, b) else { continue };
            let mut ok = true;
            for (r, &i) in free.iter().enumerate() {
                let v = sol[r];
                if v < -1e-10 || upper.is_some_and(|u| v > u + 1e-10) {
                    ok = false;
                    break;
                }
                alpha[i] = v.max(0.0);
                if let Some(u) = upper {
                    alpha[i] = alpha[i].min(u);
                }
            }
            if !ok {
                continue;
            }
        }
        let objective = quadratic_objective(h, &alpha);
        if best.as_ref().is_none_or(|b| objective < b.objective) {
            best = Some(Reference { alpha, objective });
        }
    }
    best.expect("the zero vector is always feasible")
}

/// Exact Euclidean projection onto
/// `{α, β ≥ 0, Σ y_i α_i = 0, Σ(α_i + β_i) = total}` via the optimality
/// conditions `α = (p_α − μy − ν)₊`, `β = (p_β − ν)₊`: ν is found by a sort
/// for each μ, and μ by bisection on the monotone residual `Σ y_i α_i`.
pub struct ExactProjection {
    mu: f64,
}

impl ExactProjection {
    pub fn new() -> Self {
        ExactProjection { mu: 0.0 }
    }

    fn nu_for(values: &mut [f64], total: f64) -> f64 {
        // Largest ν with Σ (v − ν)₊ = total.
        values.sort_by(|a, b| b.total_cmp(a));
        let mut cumulative = 0.0;
        let mut nu = values[0] - total;
        for (k, &v) in values.iter().enumerate() {
            cumulative += v;
            let candidate = (cumulative - total) / (k + 1) as f64;
            if v <= candidate {
                break;
            }
            nu = candidate;
        }
        nu
    }

    fn evaluate(&self, p: &[f64], y: &[f64], total: f64, mu: f64, scratch: &mut Vec<f64>) -> (f64, f64) {
        let n = y.len();
        scratch.clear();
        scratch.extend((0..n).map(|i| p[i] - mu * y[i]));
        scratch.extend_from_slice(&p[n..]);
        let nu = Self::nu_for(scratch, total);
        let residual: f64 = (0..n).map(|i| y[i] * (p[i] - mu * y[i] - nu).max(0.0)).sum();
        (nu, residual)
    }

    pub fn project(&mut self, p: &[f64], y: &[f64], total: f64) -> Vec<f64> {
        let n = y.len();
        let mut scratch = Vec::with_capacity(2 * n);
        let bound = 2.0 * p.iter().fold(0.0f64, |m, v| m.max(v.abs())) + total + 1.0;
        // Residual is nonincreasing in μ.
        let mut width = 1e-3 * bound;
        let (mut lo, mut hi) = (self.mu - width, self.mu + width);
        while self.evaluate(p, y, total, lo, &mut scratch).1 < 0.0 && lo > -bound {
            width *= 2.0;
            lo = self.mu - width;
        }
        while self.evaluate(p, y, total, hi, &mut scratch).1 > 0.0 && hi < bound {
            width *= 2.0;
            hi = self.mu + width;
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let r = self.evaluate(p, y, total, mid, &mut scratch).1;
            if r > 0.0 {
                lo = mid;
            } else if r < 0.0 {
                hi = mid;
            } else {
                lo = mid;
                hi = mid;
            }
        }
        self.mu = 0.5 * (lo + hi);
        let (nu, _) = self.evaluate(p, y, total, self.mu, &mut scratch);
        let mut out = vec![0.0; 2 * n];
        for i in 0..n {
            out[i] = (p[i] - self.mu * y[i] - nu).max(0.0);
            out[n + i] = (p[n + i] - nu).max(0.0);
        }
        out
    }
}

/// Negated hinge-loss privileged dual
/// `½(α⊙y)ᵀK(α⊙y) + (1/2λ)uᵀK̃u − Σα`, `u = α + β − C`, and its gradient.
pub fn svm1plus_value_grad(
    k: &[Vec<f64>],
    kt: &[Vec<f64>],
    y: &[f64],
    c: f64,
    lambda: f64,
    x: &[f64],
) -> (f64, Vec<f64>) {
    let n = y.len();
    let (alpha, beta) = x.split_at(n);
    let u: Vec<f64> = (0..n).map(|i| alpha[i] + beta[i] - c).collect();
    let mut grad = vec![0.0; 2 * n];
    let mut value = 0.0;
    for i in 0..n {
        let main: f64 = (0..n).map(|j| y[i] * y[j] * k[i][j] * alpha[j]).sum();
        let privileged: f64 = (0..n).map(|j| kt[i][j] * u[j]).sum::<f64>() / lambda;
        value += 0.5 * alpha[i] * main + 0.5 * u[i] * privileged - alpha[i];
        grad[i] = main + privileged - 1.0;
        grad[n + i] = privileged;
    }
    (value, grad)
}

/// Plain projected gradient with step `1/L`, `L` a Gershgorin bound of the
/// Hessian, run for up to `iterations` steps (stopping early once the
/// iterate stops moving). Returns `(objective, α, β)`.
pub fn svm1plus_reference(
    k: &DenseMatrix,
    kt: &DenseMatrix,
    y: &[f64],
    c: f64,
    lambda: f64,
    iterations: usize,
) -> (f64, Vec<f64>, Vec<f64>) {
    let n = y.len();
    let (k, kt) = (to_rows(k), to_rows(kt));
    let mut lipschitz: f64 = 0.0;
    for i in 0..n {
        let top: f64 = (0..n).map(|j| (k[i][j] + kt[i][j] / lambda).abs() + kt[i][j].abs() / lambda).sum();
        let bottom: f64 = (0..n).map(|j| 2.0 * kt[i][j].abs() / lambda).sum();
        lipschitz = lipschitz.max(top).max(bottom);
    }
    let total = n as f64 * c;
    let mut projection = ExactProjection::new();
    let mut x: Vec<f64> = vec![0.0; n].into_iter().chain(vec![c; n]).collect();
    for _ in 0..iterations {
        let (_, grad) = svm1plus_value_grad(&k, &kt, y, c, lambda, &x);
        let step: Vec<f64> = x.iter().zip(&grad).map(|(v, g)| v - g / lipschitz).collect();
        let next = projection.project(&step, y, total);
        let moved = next.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        x = next;
        if moved <= 1e-15 * c.max(1.0) {
            break;
        }
    }
    let (value, _) = svm1plus_value_grad(&k, &kt, y, c, lambda, &x);
    let beta = x.split_off(n);
    (value, x, beta)
}

/// Deterministic SplitMix64 stream for building test instances.
pub struct Stream(u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((self.next_u64() >> 11) as f64 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> DenseMatrix {
        DenseMatrix::from_fn(rows, cols, |_, _| self.uniform(-1.0, 1.0))
    }

    /// ±1 labels with both classes present.
    pub fn labels(&mut self, n: usize) -> Vec<f64> {
        loop {
            let y: Vec<f64> = (0..n).map(|_| if self.next_u64() & 1 == 1 { 1.0 } else { -1.0 }).collect();
            if y.contains(&1.0) && y.contains(&-1.0) {
                return y;
            }
        }
    }
}
