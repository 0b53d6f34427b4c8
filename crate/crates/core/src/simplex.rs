//! Nelder–Mead downhill simplex for small unconstrained problems.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy)]
pub(crate) struct SimplexOptions {
    /// Stop when the spread of function values across the simplex drops below this.
    pub ftol: f64,
    /// ...and the simplex diameter drops below this.
    pub xtol: f64,
    pub max_evals: usize,
    /// Restarts from the incumbent with a fresh simplex; a collapsed simplex
    /// is the usual Nelder–Mead failure mode.
    pub restarts: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self { ftol: 1e-13, xtol: 1e-9, max_evals: 4000, restarts: 2 }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
}

/// Minimizes `f` starting from `x0` with initial edge lengths `step`.
pub(crate) fn minimize<F: FnMut(&[f64]) -> f64>(mut f: F, x0: &[f64], step: &[f64], opts: SimplexOptions) -> SimplexResult {
    let mut best = run(&mut f, x0, step, opts);
    let mut scale = 1.0;
    for _ in 0..opts.restarts {
        scale *= 0.1;
        let small: Vec<f64> = step.iter().map(|s| s * scale).collect();
        let next = run(&mut f, &best.x, &small, opts);
        let gained = best.value - next.value;
        if next.value < best.value {
            best = next;
        }
        if gained <= opts.ftol {
            break;
        }
    }
    best
}

fn run<F: FnMut(&[f64]) -> f64>(f: &mut F, x0: &[f64], step: &[f64], opts: SimplexOptions) -> SimplexResult {
    let dim = x0.len();
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    pts.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += step[i];
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| f(p)).collect();
    let mut evals = dim + 1;
    let mut centroid = vec![0.0; dim];

    loop {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[dim] - vals[0];
        let diameter = pts[1..]
            .iter()
            .map(|p| p.iter().zip(&pts[0]).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs())))
            .fold(0.0_f64, f64::max);
        if (spread <= opts.ftol && diameter <= opts.xtol) || evals >= opts.max_evals {
            break;
        }

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for p in &pts[..dim] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&pts[dim]).map(|(c, w)| c + t * (w - c)).collect() };

        let reflected = along(-1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < vals[0] {
            let expanded = along(-2.0);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                pts[dim] = expanded;
                vals[dim] = fe;
            } else {
                pts[dim] = reflected;
                vals[dim] = fr;
            }
            continue;
        }
        if fr < vals[dim - 1] {
            pts[dim] = reflected;
            vals[dim] = fr;
            continue;
        }
        let (contracted, fc) = if fr < vals[dim] {
            let c = along(-0.5);
            let v = f(&c);
            (c, v)
        } else {
            let c = along(0.5);
            let v = f(&c);
            (c, v)
        };
        evals += 1;
        if fc < vals[dim].min(fr) {
            pts[dim] = contracted;
            vals[dim] = fc;
            continue;
        }
        // shrink toward the best vertex
        for i in 1..=dim {
            let p: Vec<f64> = pts[i].iter().zip(&pts[0]).map(|(x, b)| b + 0.5 * (x - b)).collect();
            vals[i] = f(&p);
            pts[i] = p;
        }
        evals += dim;
    }
    let i = (0..=dim).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap_or(0);
    SimplexResult { x: pts[i].clone(), value: vals[i] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_rosenbrock_minimum() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(rosen, &[-1.2, 1.0], &[0.5, 0.5], SimplexOptions { max_evals: 20_000, ..Default::default() });
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn quadratic_in_four_dimensions() {
        let target = [0.3, -1.0, 2.0, 0.5];
        let f = |x: &[f64]| x.iter().zip(&target).enumerate().map(|(i, (a, b))| (i + 1) as f64 * (a - b).powi(2)).sum::<f64>();
        let r = minimize(f, &[0.0; 4], &[1.0; 4], SimplexOptions::default());
        for (a, b) in r.x.iter().zip(&target) {
            assert!((a - b).abs() < 1e-6);
        }
    }
}
