//! Gradient descent with a backtracking line search.

use super::cost::CostFunction;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

pub(crate) struct Descent {
    pub x: Vec<f64>,
    pub cost: f64,
    pub iterations: u64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Steps along the negative gradient. The first trial step is the
/// Barzilai–Borwein estimate `sᵀs / sᵀy` from the previous move (or twice the
/// previous step when that is unavailable), halved until the
/// sufficient-decrease test passes. Stops on a small gradient, an exhausted
/// iteration budget, or a step that can no longer make progress.
pub(crate) fn descend(f: &CostFunction, mut x: Vec<f64>, max_iterations: u64, grad_tol: f64) -> Descent {
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut fx = f.cost_and_gradient(&x, &mut g);
    let mut trial = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut step = 1.0;
    let mut iterations = 0;
    while iterations < max_iterations {
        let g2 = dot(&g, &g);
        if g2.sqrt() < grad_tol || !fx.is_finite() {
            break;
        }
        let mut accepted = None;
        while step >= MIN_STEP {
            for i in 0..n {
                trial[i] = x[i] - step * g[i];
            }
            let ft = f.cost(&trial);
            if ft <= fx - ARMIJO * step * g2 {
                accepted = Some(ft);
                break;
            }
            step *= 0.5;
        }
        if accepted.is_none() {
            break;
        }
        fx = f.cost_and_gradient(&trial, &mut g_new);
        // s = -step·g, y = g_new - g
        let sy = -step * (dot(&g_new, &g) - g2);
        let ss = step * step * g2;
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut g, &mut g_new);
        iterations += 1;
        step = if sy > 0.0 { ss / sy } else { 2.0 * step };
    }
    Descent {
        x,
        cost: fx,
        iterations,
    }
}
