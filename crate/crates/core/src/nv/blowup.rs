use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::gaussian::rat_to_f64;
use crate::algebra::{GaussianRational, TriPoly, Var};
use crate::error::{Error, Result};
use crate::grid::Window;
use crate::moutard::{certify_nonvanishing, Verdict};
use crate::numeric::{linspace, nelder_mead, with_pool};

const GRID: usize = 401;
const MAX_DENOMINATOR: i64 = 1000;

/// First time at which `Phi(., ., t)` acquires a real zero.
#[derive(Clone, Debug)]
pub struct BlowupReport {
    pub t_star: f64,
    /// Present when every witness was confirmed as an exact rational critical
    /// point of `g`.
    pub t_star_exact: Option<BigRational>,
    /// Points attaining the minimum of `g`, sorted.
    pub witnesses: Vec<(f64, f64)>,
    /// `Phi = sign * (g - c t)` after normalization.
    pub g: TriPoly,
    pub c: BigRational,
    pub g_min: f64,
}

impl BlowupReport {
    pub fn witness(&self) -> (f64, f64) {
        self.witnesses[0]
    }
}

/// Writes `Phi = +-(g(x, y) - c t)` with `c > 0` and `g > 0`, and returns
/// `t* = min g / c` with the minimizers.
pub fn blowup_time(phi: &TriPoly) -> Result<BlowupReport> {
    let slices = phi.t_slices();
    if slices.len() > 2 {
        return Err(Error::NotAffineInT);
    }
    let s0 = slices[0].clone();
    let s1 = slices.get(1).cloned().unwrap_or_else(TriPoly::zero);
    if !s1.is_constant() || !s1.constant_term().is_real() {
        return Err(Error::NotAffineInT);
    }
    let cert = certify_nonvanishing(&s0);
    match cert.verdict {
        Verdict::CertifiedPositive => {}
        Verdict::ZeroFound { x, y } => {
            return Err(Error::NoBlowup(format!("already singular at t = 0, zero near ({x}, {y})")))
        }
        Verdict::Inconclusive(why) => return Err(Error::NoBlowup(why)),
    }
    let sign = GaussianRational::from(cert.sign as i64);
    let g = s0.scale(&sign);
    let c = -(&s1.constant_term() * &sign).re;
    if !c.is_positive() {
        return Err(Error::NoBlowup("Phi does not decrease towards zero in time".into()));
    }
    let c_f = rat_to_f64(&c);

    let minima = plane_minima(&g, cert.leading_form_min);
    let g_min = minima.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * g_min.abs().max(1.0);
    let mut witnesses: Vec<(f64, f64)> = minima.iter().filter(|m| m.1 <= g_min + tol).map(|m| m.0).collect();
    witnesses.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let exact: Option<Vec<BigRational>> = witnesses.iter().map(|&(x, y)| exact_critical_value(&g, x, y)).collect();
    let t_star_exact = exact.and_then(|vals| {
        let first = vals.first()?.clone();
        vals.iter().all(|v| *v == first).then(|| first / &c)
    });
    let t_star = t_star_exact.as_ref().map(rat_to_f64).unwrap_or(g_min / c_f);
    Ok(BlowupReport { t_star, t_star_exact, witnesses, g, c, g_min })
}

fn value(g: &TriPoly, x: f64, y: f64) -> f64 {
    g.eval_xyt(x, y, 0.0).re
}

/// Local minima of a polynomial bounded below by its positive leading form.
fn plane_minima(g: &TriPoly, leading_min: f64) -> Vec<((f64, f64), f64)> {
    let d = g.spatial_degree();
    if d == 0 {
        return vec![((0.0, 0.0), value(g, 0.0, 0.0))];
    }
    let lower: f64 = g
        .terms()
        .filter(|(e, _)| e[0] + e[1] < d)
        .map(|(_, c)| c.to_complex64().norm())
        .sum();
    // Outside this radius g exceeds g(0, 0), so the minimum lies inside.
    let radius = ((lower + value(g, 0.0, 0.0).max(0.0)) / leading_min).max(1.0);
    let axis = linspace(-radius, radius, GRID);
    let vals: Vec<f64> = with_pool(|| {
        axis.par_iter().flat_map_iter(|&x| axis.iter().map(move |&y| value(g, x, y))).collect()
    });
    let at = |i: usize, j: usize| vals[i * GRID + j];
    let h = 2.0 * radius / (GRID - 1) as f64;
    let mut seeds = Vec::new();
    for i in 0..GRID {
        for j in 0..GRID {
            let v = at(i, j);
            let mut is_min = true;
            for (di, dj) in [(-1i64, -1i64), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)] {
                let (a, b) = (i as i64 + di, j as i64 + dj);
                if a < 0 || b < 0 || a >= GRID as i64 || b >= GRID as i64 {
                    continue;
                }
                if at(a as usize, b as usize) < v {
                    is_min = false;
                    break;
                }
            }
            if is_min {
                seeds.push((axis[i], axis[j]));
            }
        }
    }
    let mut out: Vec<((f64, f64), f64)> = Vec::new();
    for s in seeds {
        let (p, v) = nelder_mead(|x, y| value(g, x, y), s, h, 1e-13, 5000);
        if !out.iter().any(|(q, _)| (q.0 - p.0).abs() < 1e-5 && (q.1 - p.1).abs() < 1e-5) {
            out.push((p, v));
        }
    }
    out
}

/// Snaps a numeric minimizer to nearby small-denominator rationals and, if the
/// exact gradient vanishes there, returns the exact value of `g`.
fn exact_critical_value(g: &TriPoly, x: f64, y: f64) -> Option<BigRational> {
    let qx = approx_rational(x, MAX_DENOMINATOR, 1e-5)?;
    let qy = approx_rational(y, MAX_DENOMINATOR, 1e-5)?;
    let z = GaussianRational::new(qx.clone(), qy.clone());
    let w = z.conj();
    let t = GaussianRational::zero();
    let gz = g.derive(Var::Z).eval_exact(&z, &w, &t);
    let gw = g.derive(Var::W).eval_exact(&z, &w, &t);
    // grad = 0 in (x, y) iff both Wirtinger derivatives vanish.
    if !(gz.is_zero() && gw.is_zero()) {
        return None;
    }
    let v = g.eval_exact(&z, &w, &t);
    v.is_real().then_some(v.re)
}

/// Best rational approximation with bounded denominator (continued fractions).
pub(crate) fn approx_rational(v: f64, max_den: i64, tol: f64) -> Option<BigRational> {
    if !v.is_finite() {
        return None;
    }
    let (mut h0, mut h1, mut k0, mut k1) = (0i64, 1i64, 1i64, 0i64);
    let mut r = v;
    for _ in 0..40 {
        let a = r.floor();
        let ai = a.to_i64()?;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = ai.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (h1 as f64 / k1 as f64 - v).abs() < 1e-14 {
            break;
        }
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if k1 == 0 {
        return None;
    }
    let q = BigRational::new(BigInt::from(h1), BigInt::from(k1));
    ((rat_to_f64(&q) - v).abs() <= tol).then_some(q)
}

/// Sign-change points of `Phi(., ., t)` on grid edges, linearly interpolated.
pub fn singular_set(phi: &TriPoly, t: f64, window: &Window, resolution: usize) -> Vec<(f64, f64)> {
    let n = resolution.max(2);
    let xs = linspace(window.x_min, window.x_max, n);
    let ys = linspace(window.y_min, window.y_max, n);
    let vals: Vec<f64> = with_pool(|| {
        xs.par_iter().flat_map_iter(|&x| ys.iter().map(move |&y| phi.eval_xyt(x, y, t).re)).collect()
    });
    let at = |i: usize, j: usize| vals[i * n + j];
    let mut out = Vec::new();
    let interp = |a: (f64, f64, f64), b: (f64, f64, f64)| {
        let s = a.2 / (a.2 - b.2);
        (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1))
    };
    for i in 0..n {
        for j in 0..n {
            let here = (xs[i], ys[j], at(i, j));
            if here.2 == 0.0 {
                out.push((here.0, here.1));
                continue;
            }
            if i + 1 < n {
                let next = (xs[i + 1], ys[j], at(i + 1, j));
                if here.2 * next.2 < 0.0 {
                    out.push(interp(here, next));
                }
            }
            if j + 1 < n {
                let next = (xs[i], ys[j + 1], at(i, j + 1));
                if here.2 * next.2 < 0.0 {
                    out.push(interp(here, next));
                }
            }
        }
    }
    out
}
