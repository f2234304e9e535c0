use std::f64::consts::PI;

use rayon::prelude::*;

use crate::algebra::{TriPoly, Var};
use crate::numeric::{linspace, nelder_mead, with_pool};

const CIRCLE_SAMPLES: usize = 10_000;
const GRID: usize = 401;
const REFINE: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    /// Grid minimum positive and leading form positive on the sampled circle.
    /// Not a proof.
    CertifiedPositive,
    ZeroFound { x: f64, y: f64 },
    Inconclusive(String),
}

impl Verdict {
    pub fn label(&self) -> String {
        match self {
            Verdict::CertifiedPositive => "certified-positive (heuristic)".to_string(),
            Verdict::ZeroFound { x, y } => format!("zero found at ({x}, {y})"),
            Verdict::Inconclusive(why) => format!("inconclusive: {why}"),
        }
    }
}

/// Heuristic evidence that a real polynomial has no zeros in the plane.
#[derive(Clone, Debug)]
pub struct Certificate {
    /// +1 or -1: the overall sign applied so the leading form is positive.
    pub sign: f64,
    /// Outside this radius the leading form provably dominates.
    pub radius: f64,
    /// Minimum of `sign * tau` over the grid after local refinement.
    pub grid_min: f64,
    pub argmin: (f64, f64),
    /// Minimum of `sign * leading form` on the unit circle.
    pub leading_form_min: f64,
    pub verdict: Verdict,
}

fn real_at(p: &TriPoly, x: f64, y: f64) -> f64 {
    p.eval_xyt(x, y, 0.0).re
}

/// Grid-plus-leading-form positivity check of a sigma-fixed, `t`-free
/// polynomial.
pub fn certify_nonvanishing(tau: &TriPoly) -> Certificate {
    let inconclusive = |why: &str| Certificate {
        sign: 1.0,
        radius: 0.0,
        grid_min: f64::NAN,
        argmin: (f64::NAN, f64::NAN),
        leading_form_min: f64::NAN,
        verdict: Verdict::Inconclusive(why.to_string()),
    };
    if tau.contains_var(Var::T) {
        return inconclusive("tau depends on t");
    }
    if !tau.is_sigma_fixed() {
        return inconclusive("tau is not real (not sigma-fixed)");
    }
    if tau.is_zero() {
        return Certificate { verdict: Verdict::ZeroFound { x: 0.0, y: 0.0 }, ..inconclusive("") };
    }
    let d = tau.spatial_degree();
    let leading = TriPoly::from_terms(tau.terms().filter(|(e, _)| e[0] + e[1] == d).map(|(e, c)| (c.clone(), *e)));
    let lower: f64 = tau
        .terms()
        .filter(|(e, _)| e[0] + e[1] < d)
        .map(|(_, c)| c.to_complex64().norm())
        .sum();

    let circle: Vec<(f64, f64)> = (0..CIRCLE_SAMPLES)
        .map(|k| {
            let phi = 2.0 * PI * k as f64 / CIRCLE_SAMPLES as f64;
            (phi, real_at(&leading, phi.cos(), phi.sin()))
        })
        .collect();
    let lmin = circle.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let lmax = circle.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);

    if d == 0 {
        let v = real_at(tau, 0.0, 0.0);
        return Certificate {
            sign: v.signum(),
            radius: 0.0,
            grid_min: v.abs(),
            argmin: (0.0, 0.0),
            leading_form_min: v.abs(),
            verdict: Verdict::CertifiedPositive,
        };
    }
    if lmin < 0.0 && lmax > 0.0 {
        // Indefinite leading form: tau changes sign far out.
        let scale = lmax.max(-lmin);
        let rho = 10.0 * (1.0 + lower / scale);
        return match zero_on_circle(tau, rho) {
            Some((x, y)) => Certificate {
                sign: 1.0,
                radius: rho,
                grid_min: f64::NAN,
                argmin: (x, y),
                leading_form_min: lmin,
                verdict: Verdict::ZeroFound { x, y },
            },
            None => inconclusive("indefinite leading form but no sign change located"),
        };
    }
    let sign = if lmin > 0.0 { 1.0 } else { -1.0 };
    let m = (sign * if sign > 0.0 { lmin } else { lmax }).max(0.0);
    if m == 0.0 {
        return inconclusive("leading form vanishes on the unit circle");
    }
    let radius = (lower / m).max(1.0);

    let axis = linspace(-radius, radius, GRID);
    let mut samples: Vec<(f64, f64, f64)> = with_pool(|| {
        axis.par_iter()
            .flat_map_iter(|&x| axis.iter().map(move |&y| (x, y, sign * real_at(tau, x, y))))
            .collect()
    });
    samples.sort_by(|a, b| a.2.total_cmp(&b.2));
    let h = 2.0 * radius / (GRID - 1) as f64;
    let mut best = (samples[0].0, samples[0].1, samples[0].2);
    for s in samples.iter().take(REFINE) {
        let ((x, y), v) = nelder_mead(|x, y| sign * real_at(tau, x, y), (s.0, s.1), h, 1e-12, 4000);
        if v < best.2 && x.abs() <= radius * 1.5 && y.abs() <= radius * 1.5 {
            best = (x, y, v);
        }
    }
    let verdict = if best.2 > 0.0 {
        Verdict::CertifiedPositive
    } else {
        let (x, y) = bisect_to_zero(tau, sign, (best.0, best.1), radius * 1.01 + 1.0);
        Verdict::ZeroFound { x, y }
    };
    Certificate { sign, radius, grid_min: best.2, argmin: (best.0, best.1), leading_form_min: m, verdict }
}

/// From a point where `sign * tau <= 0`, bisect outwards along a ray to a
/// point outside `far` where the leading form makes it positive.
fn bisect_to_zero(tau: &TriPoly, sign: f64, from: (f64, f64), far: f64) -> (f64, f64) {
    let f = |x: f64, y: f64| sign * real_at(tau, x, y);
    if f(from.0, from.1) == 0.0 {
        return from;
    }
    let norm = (from.0 * from.0 + from.1 * from.1).sqrt();
    let dir = if norm > 1e-12 { (from.0 / norm, from.1 / norm) } else { (1.0, 0.0) };
    let outer = (from.0 + dir.0 * 2.0 * far, from.1 + dir.1 * 2.0 * far);
    let (mut a, mut b) = (from, outer);
    for _ in 0..200 {
        let m = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        if f(m.0, m.1) <= 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    a
}

fn zero_on_circle(tau: &TriPoly, rho: f64) -> Option<(f64, f64)> {
    let n = 4096;
    let at = |phi: f64| real_at(tau, rho * phi.cos(), rho * phi.sin());
    for k in 0..n {
        let (mut a, mut b) = (2.0 * PI * k as f64 / n as f64, 2.0 * PI * (k + 1) as f64 / n as f64);
        let (fa, fb) = (at(a), at(b));
        if fa == 0.0 {
            return Some((rho * a.cos(), rho * a.sin()));
        }
        if fa.signum() != fb.signum() {
            for _ in 0..100 {
                let m = (a + b) / 2.0;
                if at(m).signum() == fa.signum() {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some((rho * a.cos(), rho * a.sin()));
        }
    }
    None
}
