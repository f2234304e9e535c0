//! The linear flow induced on polynomial coefficients by `p_t = p_zzz`, and the
//! motion of the roots.
//!
//! Writing `p = s_0 z^N + s_1 z^(N-1) + ... + s_N`, the flow is
//! `s_k' = (N-k+3)(N-k+2)(N-k+1) s_(k-3)`. The generator is nilpotent, so the
//! exponential is a polynomial in `t`.

use nalgebra::{DMatrix, Schur};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::algebra::{GaussianRational, TriPoly, Var};
use crate::error::{Error, Result};
use crate::moutard::HarmonicSeed;

/// Root separation below which root matching is abandoned.
pub const ILL_CONDITIONED_SEPARATION: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaState {
    pub n: usize,
    /// `s_0 ..= s_N`, leading coefficient first.
    pub sigma: Vec<GaussianRational>,
}

impl SigmaState {
    pub fn new(sigma: Vec<GaussianRational>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::InvalidParams("need at least one coefficient".into()));
        }
        Ok(Self { n: sigma.len() - 1, sigma })
    }

    pub fn from_ints(sigma: &[i64]) -> Self {
        Self::new(sigma.iter().map(|&c| GaussianRational::from(c)).collect()).expect("non-empty")
    }

    /// Reads off the coefficients of a polynomial in `z` of degree `n`.
    pub fn from_seed(p: &HarmonicSeed, n: usize) -> Result<Self> {
        let deg = p.poly().degree_in(Var::Z) as usize;
        if deg > n {
            return Err(Error::InvalidParams(format!("seed has degree {deg} > {n}")));
        }
        Ok(Self { n, sigma: (0..=n).map(|k| p.poly().coeff([(n - k) as u32, 0, 0])).collect() })
    }

    pub fn to_poly(&self) -> TriPoly {
        TriPoly::from_terms(self.sigma.iter().enumerate().map(|(k, c)| (c.clone(), [(self.n - k) as u32, 0, 0])))
    }

    /// One application of the generator.
    fn generator(&self) -> Vec<GaussianRational> {
        let n = self.n as i64;
        (0..=self.n)
            .map(|k| {
                if k < 3 {
                    return GaussianRational::zero();
                }
                let m = n - k as i64;
                self.sigma[k - 3].clone() * GaussianRational::from((m + 3) * (m + 2) * (m + 1))
            })
            .collect()
    }

    fn powers_of_generator(&self) -> Vec<Vec<GaussianRational>> {
        let mut out = vec![self.sigma.clone()];
        let mut cur = self.clone();
        loop {
            let next = cur.generator();
            if next.iter().all(|c| c.is_zero()) {
                break;
            }
            out.push(next.clone());
            cur = SigmaState { n: self.n, sigma: next };
        }
        out
    }

    /// Numeric coefficients at a floating-point time.
    pub fn coefficients_at(&self, t: f64) -> Vec<Complex64> {
        let mut acc = vec![Complex64::zero(); self.n + 1];
        let mut weight = 1.0;
        for (j, g) in self.powers_of_generator().iter().enumerate() {
            if j > 0 {
                weight *= t / j as f64;
            }
            for (a, c) in acc.iter_mut().zip(g) {
                *a += c.to_complex64() * weight;
            }
        }
        acc
    }
}

/// Exact state at time `t`.
pub fn sigma_evolve(state: &SigmaState, t: &BigRational) -> SigmaState {
    let tg = GaussianRational::real(t.clone());
    let mut acc = vec![GaussianRational::zero(); state.n + 1];
    let mut weight = GaussianRational::one();
    for (j, g) in state.powers_of_generator().iter().enumerate() {
        if j > 0 {
            weight = &(&weight * &tg) * &GaussianRational::real(BigRational::new(BigInt::one(), BigInt::from(j)));
        }
        for (a, c) in acc.iter_mut().zip(g) {
            *a += &(&weight * c);
        }
    }
    debug_assert_eq!(acc[0], state.sigma[0]);
    SigmaState { n: state.n, sigma: acc }
}

/// Roots of `s_0 z^N + ... + s_N` from the companion matrix, polished by Newton.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let lead = coeffs[0];
    if lead.norm() == 0.0 {
        return Err(Error::InvalidParams("leading coefficient vanishes".into()));
    }
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let monic: Vec<Complex64> = coeffs.iter().map(|c| c / lead).collect();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -monic[j + 1];
    }
    for i in 1..n {
        m[(i, i - 1)] = Complex64::one();
    }
    let eig = companion_eigenvalues(&m).ok_or_else(|| Error::InvalidParams("eigenvalue iteration failed".into()))?;
    let eval = |z: Complex64| {
        monic.iter().fold((Complex64::zero(), Complex64::zero()), |(p, dp), c| (p * z + c, dp * z + p))
    };
    Ok(eig
        .iter()
        .map(|&z0| {
            let mut z = z0;
            for _ in 0..100 {
                let (p, dp) = eval(z);
                if dp.norm() < 1e-300 {
                    break;
                }
                let cand = z - p / dp;
                if eval(cand).0.norm() < p.norm() {
                    z = cand;
                } else {
                    break;
                }
            }
            z
        })
        .collect())
}

/// Unshifted-symmetric companion matrices (e.g. `z^3 + c`) stall the Schur
/// iteration, so a capped attempt is followed by retries on `M + sI`.
fn companion_eigenvalues(m: &DMatrix<Complex64>) -> Option<Vec<Complex64>> {
    let n = m.nrows();
    let scale = m.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for k in 0..6 {
        let s = if k == 0 { Complex64::zero() } else { Complex64::new(0.37, 0.61) * (scale * k as f64) };
        let shifted = m + DMatrix::<Complex64>::identity(n, n) * s;
        if let Some(schur) = Schur::try_new(shifted, 1e-15, 10_000) {
            if let Some(ev) = schur.eigenvalues() {
                return Some(ev.iter().map(|e| e - s).collect());
            }
        }
    }
    None
}

/// Root multisets along a list of times, continued by greedy nearest-neighbour
/// matching.
#[derive(Clone, Debug)]
pub struct RootTrajectory {
    pub times: Vec<f64>,
    /// `roots[i][k]` is root `k` at `times[i]`, ordered to follow step `i-1`.
    pub roots: Vec<Vec<Complex64>>,
    /// False where the step from `i-1` to `i` could not be matched reliably.
    pub matched: Vec<bool>,
    pub warnings: Vec<String>,
}

fn min_separation(roots: &[Complex64]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            best = best.min((roots[i] - roots[j]).norm());
        }
    }
    best
}

pub fn roots_trajectory(state0: &SigmaState, times: &[f64]) -> Result<RootTrajectory> {
    if state0.sigma[0].is_zero() {
        return Err(Error::InvalidParams("leading coefficient must be nonzero".into()));
    }
    let raw: Vec<Result<Vec<Complex64>>> =
        crate::numeric::with_pool(|| times.par_iter().map(|&t| polynomial_roots(&state0.coefficients_at(t))).collect());
    let mut roots: Vec<Vec<Complex64>> = Vec::with_capacity(times.len());
    let mut matched = Vec::with_capacity(times.len());
    let mut warnings = Vec::new();
    for (i, r) in raw.into_iter().enumerate() {
        let r = r?;
        let sep = min_separation(&r);
        let ill = sep < ILL_CONDITIONED_SEPARATION;
        if ill {
            warnings.push(format!("IllConditioned: root separation {sep:.3e} at t = {}", times[i]));
        }
        if i == 0 {
            roots.push(r);
            matched.push(!ill);
            continue;
        }
        let prev = &roots[i - 1];
        let prev_ill = min_separation(prev) < ILL_CONDITIONED_SEPARATION;
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (a, pa) in prev.iter().enumerate() {
            for (b, rb) in r.iter().enumerate() {
                pairs.push(((pa - rb).norm(), a, b));
            }
        }
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut slot: Vec<Option<Complex64>> = vec![None; r.len()];
        let mut used = vec![false; r.len()];
        for (_, a, b) in pairs {
            if slot[a].is_none() && !used[b] {
                slot[a] = Some(r[b]);
                used[b] = true;
            }
        }
        roots.push(slot.into_iter().map(|s| s.expect("square assignment")).collect());
        matched.push(!(ill || prev_ill));
    }
    Ok(RootTrajectory { times: times.to_vec(), roots, matched, warnings })
}
