//! Nelder–Mead simplex minimization for small, dense parameter vectors.
//!
//! Kept private: the only consumer is the constrained output-entropy search,
//! which needs stall-based convergence reporting rather than a generic
//! optimizer interface.

pub(crate) struct Options {
    pub max_evaluations: usize,
    /// Converged when the best value improves by less than
    /// `stall_rel_tol · max(1, |f|)` over this many consecutive iterations.
    pub stall_iterations: usize,
    pub stall_rel_tol: f64,
    pub initial_step: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_evaluations: 100_000,
            stall_iterations: 50,
            stall_rel_tol: 1e-10,
            initial_step: 0.1,
        }
    }
}

pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Final simplex spread f_worst − f_best (diagnostic residual).
    pub residual: f64,
}

/// Minimizes `f` from `x0` with the standard reflection/expansion/contraction
/// coefficients (1, 2, 1/2) and shrink factor 1/2.
pub(crate) fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &Options) -> Outcome {
    let n = x0.len();
    assert!(n > 0, "need at least one parameter");

    let mut evaluations = 0usize;
    let mut eval = |x: &[f64], count: &mut usize| -> f64 {
        *count += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    // Initial simplex: x0 plus a bump along each coordinate.
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    points.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step * (p[i].abs().max(0.25));
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p, &mut evaluations)).collect();

    let mut iterations = 0usize;
    let mut stall = 0usize;
    let mut last_best = f64::INFINITY;
    let mut converged = false;

    while evaluations < opts.max_evaluations {
        // Order the simplex: best first.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        if last_best - best <= opts.stall_rel_tol * best.abs().max(1.0) {
            stall += 1;
            if stall >= opts.stall_iterations {
                converged = true;
                break;
            }
        } else {
            stall = 0;
        }
        last_best = best;
        iterations += 1;

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; n];
        for p in &points[..n] {
            for (c, x) in centroid.iter_mut().zip(p) {
                *c += x / n as f64;
            }
        }
        let worst = values[n];
        let second_worst = values[n - 1];

        let blend = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let reflected = blend(1.0);
        let fr = eval(&reflected, &mut evaluations);

        if fr < values[0] {
            let expanded = blend(2.0);
            let fe = eval(&expanded, &mut evaluations);
            if fe < fr {
                points[n] = expanded;
                values[n] = fe;
            } else {
                points[n] = reflected;
                values[n] = fr;
            }
        } else if fr < second_worst {
            points[n] = reflected;
            values[n] = fr;
        } else {
            let contracted = if fr < worst { blend(0.5) } else { blend(-0.5) };
            let fc = eval(&contracted, &mut evaluations);
            if fc < worst.min(fr) {
                points[n] = contracted;
                values[n] = fc;
            } else {
                // Shrink toward the best vertex.
                for i in 1..=n {
                    let shrunk: Vec<f64> = points[0]
                        .iter()
                        .zip(&points[i])
                        .map(|(b, x)| b + 0.5 * (x - b))
                        .collect();
                    values[i] = eval(&shrunk, &mut evaluations);
                    points[i] = shrunk;
                }
            }
        }
    }

    let mut best_idx = 0;
    for i in 1..values.len() {
        if values[i] < values[best_idx] {
            best_idx = i;
        }
    }
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - values[best_idx];

    Outcome {
        x: points[best_idx].clone(),
        f: values[best_idx],
        iterations,
        evaluations,
        converged,
        residual: spread,
    }
}
