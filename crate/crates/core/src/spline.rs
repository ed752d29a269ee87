//! Natural cubic splines, used only to resample spectra between grids.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{GridGeometry, SpectrumGrid};

/// Second derivatives of the natural cubic spline through equally spaced
/// samples `y` with spacing `h`.
fn natural_second_derivatives(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    let mut m = vec![0.0; n];
    if n < 3 {
        return m;
    }
    // Tridiagonal system (1, 4, 1) · m = 6/h² · Δ²y on interior nodes.
    let inner = n - 2;
    let mut diag = vec![4.0; inner];
    let mut rhs: Vec<f64> = (1..n - 1)
        .map(|i| 6.0 * (y[i + 1] - 2.0 * y[i] + y[i - 1]) / (h * h))
        .collect();
    for k in 1..inner {
        let w = 1.0 / diag[k - 1];
        diag[k] -= w;
        rhs[k] -= w * rhs[k - 1];
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for k in (0..inner - 1).rev() {
        m[k + 1] = (rhs[k] - m[k + 2]) / diag[k];
    }
    m
}

fn eval_1d(y: &[f64], m: &[f64], x0: f64, h: f64, x: f64) -> f64 {
    let last = y.len() - 1;
    let t = (x - x0) / h;
    let k = (t.max(0.0) as usize).min(last - 1);
    let a = (k as f64 + 1.0) - t;
    let b = t - k as f64;
    a * y[k]
        + b * y[k + 1]
        + ((a * a * a - a) * m[k] + (b * b * b - b) * m[k + 1]) * h * h / 6.0
}

/// Tensor-product natural cubic spline over a [`SpectrumGrid`].
pub struct BicubicSpline<'a> {
    grid: &'a SpectrumGrid,
    // Second derivatives along q for each p-row.
    row_m: Vec<Vec<f64>>,
}

impl<'a> BicubicSpline<'a> {
    pub fn new(grid: &'a SpectrumGrid) -> Self {
        let g = grid.geometry();
        let dq = g.dq();
        let row_m = (0..g.n)
            .map(|i| natural_second_derivatives(&grid.values()[i * g.n..(i + 1) * g.n], dq))
            .collect();
        BicubicSpline { grid, row_m }
    }

    /// Spline value at `(p, q)`; zero outside the bounding box.
    pub fn eval(&self, p: f64, q: f64) -> f64 {
        let g = self.grid.geometry();
        if !g.contains(p, q) {
            return 0.0;
        }
        let column: Vec<f64> = (0..g.n)
            .map(|i| {
                let row = &self.grid.values()[i * g.n..(i + 1) * g.n];
                eval_1d(row, &self.row_m[i], g.q_min, g.dq(), q)
            })
            .collect();
        let m = natural_second_derivatives(&column, g.dp());
        eval_1d(&column, &m, g.p_min, g.dp(), p)
    }
}

/// Resamples `grid` onto `target` by spline interpolation. Negative
/// overshoot is kept; callers clamp if they need feasibility.
pub fn resample(grid: &SpectrumGrid, target: GridGeometry) -> SpectrumGrid {
    let spline = BicubicSpline::new(grid);
    SpectrumGrid::from_fn(target, |p, q| spline.eval(p, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_reproduction() {
        let g = GridGeometry::square(9, 1.0).unwrap();
        let s = SpectrumGrid::constant(g, 0.37);
        let spline = BicubicSpline::new(&s);
        for &(p, q) in &[(0.1, 0.2), (-0.93, 0.55), (0.0, -0.999)] {
            assert!((spline.eval(p, q) - 0.37).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolates_nodes() {
        let g = GridGeometry::new(7, -1.0, 2.0, 0.0, 1.5).unwrap();
        let s = SpectrumGrid::from_fn(g, |p, q| (p * 1.3).sin() + q * q * q);
        let spline = BicubicSpline::new(&s);
        for i in 0..7 {
            for j in 0..7 {
                assert!((spline.eval(g.p(i), g.q(j)) - s.get(i, j)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_exact_away_from_boundary() {
        // The natural end condition perturbs the quadratic by a term decaying
        // like (2 − √3)^k with distance k from the ends; at the centre of a
        // 64-node grid it is far below 1e-12.
        let g = GridGeometry::square(64, 2.0).unwrap();
        let s = SpectrumGrid::from_fn(g, |p, _| p * p);
        let spline = BicubicSpline::new(&s);
        for &(p, q) in &[(0.013, 0.2), (-0.21, -0.05), (0.1, 0.0), (0.0317, 0.3)] {
            assert!((spline.eval(p, q) - p * p).abs() < 1e-12, "p={p}");
        }
    }

    #[test]
    fn outside_is_zero() {
        let g = GridGeometry::square(5, 1.0).unwrap();
        let s = SpectrumGrid::constant(g, 1.0);
        assert_eq!(s.interpolate_spline(1.2, 0.0), 0.0);
    }

    #[test]
    fn resample_identity_geometry() {
        let g = GridGeometry::square(12, 1.0).unwrap();
        let s = SpectrumGrid::from_fn(g, |p, q| (-(p * p + 2.0 * q * q)).exp());
        let r = resample(&s, g);
        for (a, b) in r.values().iter().zip(s.values()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
