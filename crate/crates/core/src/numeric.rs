//! Small numerical helpers shared by the grid scans.

/// Nelder-Mead minimization in the plane. Returns the best point and value.
pub fn nelder_mead<F: Fn(f64, f64) -> f64>(f: F, start: (f64, f64), step: f64, tol: f64, max_iter: usize) -> ((f64, f64), f64) {
    let mut simplex = [
        (start, f(start.0, start.1)),
        ((start.0 + step, start.1), f(start.0 + step, start.1)),
        ((start.0, start.1 + step), f(start.0, start.1 + step)),
    ];
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (best, worst) = (simplex[0], simplex[2]);
        let size = ((simplex[1].0 .0 - best.0 .0).abs() + (simplex[1].0 .1 - best.0 .1).abs())
            .max((worst.0 .0 - best.0 .0).abs() + (worst.0 .1 - best.0 .1).abs());
        if size < tol {
            break;
        }
        let c = ((simplex[0].0 .0 + simplex[1].0 .0) / 2.0, (simplex[0].0 .1 + simplex[1].0 .1) / 2.0);
        let at = |s: f64| (c.0 + s * (worst.0 .0 - c.0), c.1 + s * (worst.0 .1 - c.1));
        let r = at(-1.0);
        let fr = f(r.0, r.1);
        if fr < best.1 {
            let e = at(-2.0);
            let fe = f(e.0, e.1);
            simplex[2] = if fe < fr { (e, fe) } else { (r, fr) };
        } else if fr < simplex[1].1 {
            simplex[2] = (r, fr);
        } else {
            let k = at(0.5);
            let fk = f(k.0, k.1);
            if fk < worst.1 {
                simplex[2] = (k, fk);
            } else {
                for i in 1..3 {
                    let p = ((simplex[i].0 .0 + best.0 .0) / 2.0, (simplex[i].0 .1 + best.0 .1) / 2.0);
                    simplex[i] = (p, f(p.0, p.1));
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex[0]
}

/// Evenly spaced samples `lo..=hi`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![(lo + hi) / 2.0];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Rayon pool honoring `MOUTARD_LAB_THREADS` when set.
pub fn with_pool<R: Send, F: FnOnce() -> R + Send>(f: F) -> R {
    match std::env::var("MOUTARD_LAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        Some(n) if n > 0 => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        },
        _ => f(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_quadratic_minimum() {
        let ((x, y), v) = nelder_mead(|x, y| (x - 1.0).powi(2) + 3.0 * (y + 2.0).powi(2) + 5.0, (0.0, 0.0), 0.5, 1e-12, 2000);
        assert!((x - 1.0).abs() < 1e-6 && (y + 2.0).abs() < 1e-6 && (v - 5.0).abs() < 1e-10);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }
}
