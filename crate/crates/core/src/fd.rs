//! Finite-difference weights on arbitrary (possibly nonuniform) stencils.

/// Weights for the `m`-th derivative at `z` given stencil nodes `x`
/// (Fornberg's recurrence). The stencil need not contain `z`, which is how
/// one-sided tip fits excluding the tip node are built.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<f64> {
    let n = x.len();
    assert!(
        n > m,
        "stencil of {n} nodes cannot resolve derivative order {m}"
    );
    let mut c = vec![vec![0.0_f64; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0_f64;
    let mut c4 = x[0] - z;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0_f64;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c.swap_remove(m)
}

/// Apply a weight vector to samples.
pub fn apply(weights: &[f64], values: &[f64]) -> f64 {
    weights.iter().zip(values).map(|(w, v)| w * v).sum()
}

fn uniform_spacing(x: &[f64]) -> Option<f64> {
    let dx = x[1] - x[0];
    let tol = 1e-12 * dx.abs().max(1e-300);
    for w in x.windows(2) {
        if (w[1] - w[0] - dx).abs() > tol {
            return None;
        }
    }
    Some(dx)
}

/// First derivative of sampled data: centered 3-point stencils inside,
/// one-sided 3-point at the ends. Second order on smooth grids; uniform
/// grids take a closed-form path (flow stepping calls this per step).
pub fn derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 3);
    let mut out = vec![0.0; n];
    if let Some(dx) = uniform_spacing(x) {
        out[0] = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * dx);
        for i in 1..n - 1 {
            out[i] = (y[i + 1] - y[i - 1]) / (2.0 * dx);
        }
        out[n - 1] = (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * dx);
        return out;
    }
    out[0] = apply(&fd_weights(x[0], &x[0..3], 1), &y[0..3]);
    for i in 1..n - 1 {
        out[i] = apply(&fd_weights(x[i], &x[i - 1..i + 2], 1), &y[i - 1..i + 2]);
    }
    out[n - 1] = apply(&fd_weights(x[n - 1], &x[n - 3..n], 1), &y[n - 3..n]);
    out
}

/// Second derivative of sampled data: 3-point stencils inside, 4-point
/// one-sided at the ends.
pub fn second_derivative(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 4);
    let mut out = vec![0.0; n];
    if let Some(dx) = uniform_spacing(x) {
        let dx2 = dx * dx;
        out[0] = (2.0 * y[0] - 5.0 * y[1] + 4.0 * y[2] - y[3]) / dx2;
        for i in 1..n - 1 {
            out[i] = (y[i - 1] - 2.0 * y[i] + y[i + 1]) / dx2;
        }
        out[n - 1] = (2.0 * y[n - 1] - 5.0 * y[n - 2] + 4.0 * y[n - 3] - y[n - 4]) / dx2;
        return out;
    }
    out[0] = apply(&fd_weights(x[0], &x[0..4], 2), &y[0..4]);
    for i in 1..n - 1 {
        out[i] = apply(&fd_weights(x[i], &x[i - 1..i + 2], 2), &y[i - 1..i + 2]);
    }
    out[n - 1] = apply(&fd_weights(x[n - 1], &x[n - 4..n], 2), &y[n - 4..n]);
    out
}

/// Composite trapezoid of samples on the grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    acc
}

/// Cumulative trapezoid; `out[0] = 0`.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for i in 1..x.len() {
        out[i] = out[i - 1] + 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    out
}

/// Integral over `[p, q]` of the quadratic through `(xs, ys)`.
fn quad_panel(xs: [f64; 3], ys: [f64; 3], p: f64, q: f64) -> f64 {
    let mut acc = 0.0;
    for j in 0..3 {
        let (xa, xb) = match j {
            0 => (xs[1], xs[2]),
            1 => (xs[0], xs[2]),
            _ => (xs[0], xs[1]),
        };
        let denom = (xs[j] - xa) * (xs[j] - xb);
        // ∫ (x-xa)(x-xb) dx = x³/3 - (xa+xb)x²/2 + xa·xb·x
        let prim = |x: f64| x * x * x / 3.0 - 0.5 * (xa + xb) * x * x + xa * xb * x;
        acc += ys[j] * (prim(q) - prim(p)) / denom;
    }
    acc
}

/// Cumulative integral with per-cell quadratic panels (averaging the two
/// bracketing quadratics inside); one order better than the trapezoid on
/// smooth data, used where trapezoid bias is resolvable.
pub fn cumulative_quadratic(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 3);
    let mut out = vec![0.0; n];
    for i in 1..n {
        let (lo, hi) = (x[i - 1], x[i]);
        let left = if i >= 2 {
            quad_panel(
                [x[i - 2], x[i - 1], x[i]],
                [y[i - 2], y[i - 1], y[i]],
                lo,
                hi,
            )
        } else {
            quad_panel([x[0], x[1], x[2]], [y[0], y[1], y[2]], lo, hi)
        };
        let right = if i + 1 < n {
            quad_panel(
                [x[i - 1], x[i], x[i + 1]],
                [y[i - 1], y[i], y[i + 1]],
                lo,
                hi,
            )
        } else {
            left
        };
        out[i] = out[i - 1] + 0.5 * (left + right);
    }
    out
}
