//! Derivative-free Nelder–Mead minimization with dimension-adaptive
//! coefficients.

use std::cell::Cell;

/// Stopping rules for [`nelder_mead`].
#[derive(Clone, Copy, Debug)]
pub struct SimplexOptions {
    pub max_evaluations: usize,
    /// Converged when the spread of simplex values falls below this.
    pub f_tol: f64,
    /// ... and every vertex lies within this distance of the best one.
    pub x_tol: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 5_000,
            f_tol: 1e-14,
            x_tol: 1e-10,
            initial_step: 0.3,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0`. Non-finite objective values are treated
/// as `+∞`.
pub fn nelder_mead<F>(f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    assert!(n > 0, "nelder_mead needs at least one parameter");
    let nf = n as f64;
    let (alpha, gamma) = (1.0, 1.0 + 2.0 / nf);
    let (rho, sigma) = (0.75 - 0.5 / nf, 1.0 - 1.0 / nf);

    let evals = Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }

    let mut converged = false;
    while evals.get() < opts.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[n].1;
        let spread = (worst - best).abs();
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread <= opts.f_tol && size <= opts.x_tol {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(x, _)| x[k]).sum::<f64>() / nf)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(alpha);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(alpha * gamma);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < simplex[n].1 {
            let xc = along(alpha * rho);
            let fc = eval(&xc);
            (xc, fc)
        } else {
            let xc = along(-rho);
            let fc = eval(&xc);
            (xc, fc)
        };
        if fc < simplex[n].1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        // shrink towards the best vertex
        let x_best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let x: Vec<f64> = x_best
                .iter()
                .zip(&vertex.0)
                .map(|(b, v)| b + sigma * (v - b))
                .collect();
            let v = eval(&x);
            *vertex = (x, v);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexResult {
        x,
        value,
        evaluations: evals.get(),
        converged,
    }
}
