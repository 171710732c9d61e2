//! Nelder–Mead simplex minimizer for small, derivative-free problems.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexSettings {
    /// Initial vertex offset along each coordinate.
    pub initial_step: f64,
    /// Stop when every vertex is within this relative distance of the best.
    pub x_tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for SimplexSettings {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            x_tolerance: 1e-6,
            max_evaluations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimize `f` starting from `x0`, with per-coordinate initial steps
/// `settings.initial_step * scale[i]`.
pub fn minimize<F>(
    mut f: F,
    x0: &[f64],
    scale: &[f64],
    settings: &SimplexSettings,
) -> SimplexOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    assert_eq!(scale.len(), n);
    let evaluations = std::cell::Cell::new(0usize);
    let mut eval = |x: &[f64]| {
        evaluations.set(evaluations.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let v0 = eval(x0);
    simplex.push((x0.to_vec(), v0));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += settings.initial_step * scale[i];
        let v = eval(&x);
        simplex.push((x, v));
    }

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .zip(scale)
                    .map(|((a, b), s)| (a - b).abs() / s)
            })
            .fold(0.0f64, f64::max);
        if spread < settings.x_tolerance {
            converged = true;
            break;
        }
        if evaluations.get() >= settings.max_evaluations {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64, worst: &[f64]| -> Vec<f64> {
            centroid
                .iter()
                .zip(worst)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let worst = simplex[n].0.clone();
        let xr = along(alpha, &worst);
        let fr = eval(&xr);
        if fr < simplex[0].1 {
            let xe = along(gamma, &worst);
            let fe = eval(&xe);
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
            continue;
        }
        // outside contraction when the reflection improved on the worst
        // vertex, inside contraction otherwise
        let outside = fr < simplex[n].1;
        let xc = along(if outside { rho } else { -rho }, &worst);
        let fc = eval(&xc);
        let accept = if outside { fc <= fr } else { fc < simplex[n].1 };
        if accept {
            simplex[n] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for (x, v) in simplex.iter_mut().skip(1) {
            for (xi, bi) in x.iter_mut().zip(&best) {
                *xi = bi + sigma * (*xi - bi);
            }
            *v = eval(x);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    SimplexOutcome {
        x,
        value,
        evaluations: evaluations.get(),
        converged,
    }
}
