/// Minimises a convex function of the bias by ternary search over
/// `[-radius, radius]`.
pub(crate) fn minimize_max_violation(violation: impl Fn(f64) -> f64, radius: f64) -> f64 {
    let (mut lo, mut hi) = (-radius, radius);
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if violation(m1) <= violation(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    0.5 * (lo + hi)
}

/// Bias of a box-constrained hinge SVM from `outputs = K(α⊙y)`.
///
/// Averages `y_i − outputs_i` over free support vectors; without any, takes
/// the midpoint of the interval allowed by the bounded multipliers.
/// Returns the bias and whether the interval rule was used.
pub(crate) fn hinge_bias(alpha: &[f64], y: &[f64], outputs: &[f64], c: f64) -> (f64, bool) {
    let eps = 1e-8 * c;
    let free: Vec<f64> = alpha
        .iter()
        .zip(y)
        .zip(outputs)
        .filter(|((a, _), _)| **a > eps && **a < c - eps)
        .map(|((_, y), o)| y - o)
        .collect();
    if !free.is_empty() {
        return (free.iter().sum::<f64>() / free.len() as f64, false);
    }
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    for ((&a, &yi), &o) in alpha.iter().zip(y).zip(outputs) {
        // y_i (o_i + b) ≥ 1 when α_i = 0, ≤ 1 when α_i = C.
        let edge = yi - o;
        let at_lower = a <= eps;
        if (yi > 0.0) == at_lower {
            lower = lower.max(edge);
        } else {
            upper = upper.min(edge);
        }
    }
    let b = match (lower.is_finite(), upper.is_finite()) {
        (true, true) => 0.5 * (lower + upper),
        (true, false) => lower,
        (false, true) => upper,
        (false, false) => 0.0,
    };
    (b, true)
}
