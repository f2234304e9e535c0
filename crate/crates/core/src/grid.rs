//! Sampling fields on rectangular lattices and writing them as CSV.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{linspace, with_pool};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn square(half: f64) -> Self {
        Self { x_min: -half, x_max: half, y_min: -half, y_max: half }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.x_min, self.x_max, self.y_min, self.y_max].iter().all(|v| v.is_finite())
            && self.x_max > self.x_min
            && self.y_max > self.y_min;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("degenerate window {:?}", self)))
        }
    }
}

/// A field sampled on an `nx` by `ny` lattice, row-major with `y` as the slow
/// index.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridReport {
    pub field: String,
    pub window: Window,
    pub resolution: (usize, usize),
    pub t: f64,
    pub values: Vec<f64>,
    pub metadata: serde_json::Value,
}

impl GridReport {
    pub fn xs(&self) -> Vec<f64> {
        linspace(self.window.x_min, self.window.x_max, self.resolution.0)
    }

    pub fn ys(&self) -> Vec<f64> {
        linspace(self.window.y_min, self.window.y_max, self.resolution.1)
    }

    /// Lattice coordinates of flat index `k`.
    pub fn point(&self, k: usize) -> (f64, f64) {
        let (nx, ny) = self.resolution;
        let (i, j) = (k % nx, k / nx);
        (linspace(self.window.x_min, self.window.x_max, nx)[i], linspace(self.window.y_min, self.window.y_max, ny)[j])
    }

    /// CSV with header `x,y,value`, or `x,y,t,value` when `with_t`.
    pub fn write_csv<W: Write>(&self, out: W, with_t: bool) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        if with_t {
            w.write_record(["x", "y", "t", "value"])?;
        } else {
            w.write_record(["x", "y", "value"])?;
        }
        let (xs, ys) = (self.xs(), self.ys());
        for (j, y) in ys.iter().enumerate() {
            for (i, x) in xs.iter().enumerate() {
                let v = self.values[j * xs.len() + i];
                let mut rec = vec![x.to_string(), y.to_string()];
                if with_t {
                    rec.push(self.t.to_string());
                }
                rec.push(v.to_string());
                w.write_record(&rec)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluates `f` on the lattice. A pole becomes NaN when `allow_poles`, and an
/// error otherwise.
pub fn export_grid<F>(
    field: &str,
    f: F,
    window: Window,
    resolution: (usize, usize),
    t: f64,
    allow_poles: bool,
    metadata: serde_json::Value,
) -> Result<GridReport>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
{
    sample(field, &f, None, window, resolution, t, allow_poles, metadata)
}

/// Like [`export_grid`], but also treats both ends of every lattice edge
/// across which `guard` changes sign as poles. `guard` is the real
/// denominator, whose zero curve generically misses the lattice points.
#[allow(clippy::too_many_arguments)]
pub fn export_grid_guarded<F, G>(
    field: &str,
    f: F,
    guard: G,
    window: Window,
    resolution: (usize, usize),
    t: f64,
    allow_poles: bool,
    metadata: serde_json::Value,
) -> Result<GridReport>
where
    F: Fn(f64, f64) -> Result<f64> + Sync,
    G: Fn(f64, f64) -> f64 + Sync,
{
    sample(field, &f, Some(&guard), window, resolution, t, allow_poles, metadata)
}

type Guard<'a> = Option<&'a (dyn Fn(f64, f64) -> f64 + Sync)>;

#[allow(clippy::too_many_arguments)]
fn sample(
    field: &str,
    f: &(dyn Fn(f64, f64) -> Result<f64> + Sync),
    guard: Guard<'_>,
    window: Window,
    resolution: (usize, usize),
    t: f64,
    allow_poles: bool,
    metadata: serde_json::Value,
) -> Result<GridReport> {
    window.validate()?;
    let (nx, ny) = resolution;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidParams(format!("resolution must be at least 2 per axis, got {nx}x{ny}")));
    }
    let xs = linspace(window.x_min, window.x_max, nx);
    let ys = linspace(window.y_min, window.y_max, ny);
    let near_zero = match guard {
        Some(g) => sign_change_mask(g, &xs, &ys),
        None => vec![false; nx * ny],
    };
    let samples: Vec<Result<f64>> = with_pool(|| {
        (0..nx * ny)
            .into_par_iter()
            .map(|k| {
                let (x, y) = (xs[k % nx], ys[k / nx]);
                if near_zero[k] {
                    return Err(Error::Pole { x, y, t });
                }
                match f(x, y) {
                    Ok(v) if v.is_finite() => Ok(v),
                    Ok(_) => Err(Error::Pole { x, y, t }),
                    Err(e) => Err(e),
                }
            })
            .collect()
    });
    let mut values = Vec::with_capacity(samples.len());
    for s in samples {
        match s {
            Ok(v) => values.push(v),
            Err(Error::Pole { .. }) if allow_poles => values.push(f64::NAN),
            Err(e) => return Err(e),
        }
    }
    Ok(GridReport { field: field.to_string(), window, resolution, t, values, metadata })
}

fn sign_change_mask(g: &(dyn Fn(f64, f64) -> f64 + Sync), xs: &[f64], ys: &[f64]) -> Vec<bool> {
    let nx = xs.len();
    let vals: Vec<f64> = with_pool(|| (0..nx * ys.len()).into_par_iter().map(|k| g(xs[k % nx], ys[k / nx])).collect());
    let mut mask: Vec<bool> = vals.iter().map(|v| *v == 0.0 || !v.is_finite()).collect();
    for k in 0..vals.len() {
        let (i, j) = (k % nx, k / nx);
        for n in [(i + 1 < nx).then_some(k + 1), (j + 1 < ys.len()).then_some(k + nx)].into_iter().flatten() {
            if vals[k] * vals[n] < 0.0 {
                mask[k] = true;
                mask[n] = true;
            }
        }
    }
    mask
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_and_csv() {
        let g = export_grid("sum", |x, y| Ok(x + 10.0 * y), Window::square(1.0), (3, 2), 0.0, false, serde_json::json!({}))
            .unwrap();
        assert_eq!(g.values, vec![-11.0, -10.0, -9.0, 9.0, 10.0, 11.0]);
        assert_eq!(g.point(4), (0.0, 1.0));
        let mut buf = Vec::new();
        g.write_csv(&mut buf, false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("x,y,value\n-1,-1,-11\n"));
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn poles() {
        let f = |x: f64, y: f64| if x == 0.0 { Err(Error::Pole { x, y, t: 0.0 }) } else { Ok(1.0 / x) };
        let w = Window::square(1.0);
        assert!(matches!(export_grid("f", f, w, (3, 3), 0.0, false, serde_json::Value::Null), Err(Error::Pole { .. })));
        let g = export_grid("f", f, w, (3, 3), 0.0, true, serde_json::Value::Null).unwrap();
        assert_eq!(g.values.iter().filter(|v| v.is_nan()).count(), 3);
    }

    #[test]
    fn guard_marks_crossings() {
        let w = Window::square(1.0);
        let f = |_: f64, _: f64| Ok(1.0);
        let g = |x: f64, _: f64| x - 0.25;
        assert!(matches!(export_grid_guarded("f", f, g, w, (5, 2), 0.0, false, serde_json::Value::Null), Err(Error::Pole { .. })));
        let r = export_grid_guarded("f", f, g, w, (5, 2), 0.0, true, serde_json::Value::Null).unwrap();
        // x = 0 and x = 0.5 straddle the zero in each of the two rows.
        assert_eq!(r.values.iter().filter(|v| v.is_nan()).count(), 4);
        assert!(r.values[2].is_nan() && r.values[3].is_nan() && !r.values[1].is_nan());
    }

    #[test]
    fn bad_window() {
        let w = Window { x_min: 1.0, x_max: 0.0, y_min: 0.0, y_max: 1.0 };
        assert!(export_grid("f", |_, _| Ok(0.0), w, (3, 3), 0.0, false, serde_json::Value::Null).is_err());
    }
}
