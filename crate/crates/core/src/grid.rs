//! Uniform Cartesian wavenumber grid and the spectrum values sampled on it.

use alloc::vec;
use alloc::vec::Vec;


#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Node layout of an `n × n` grid over `[p_min, p_max] × [q_min, q_max]` (rad/m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridGeometry {
    pub n: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
}

impl GridGeometry {
    pub fn new(n: usize, p_min: f64, p_max: f64, q_min: f64, q_max: f64) -> Result<Self> {
        let geom = GridGeometry { n, p_min, p_max, q_min, q_max };
        geom.validate()?;
        Ok(geom)
    }

    /// Square grid `[-half_width, half_width]²`.
    pub fn square(n: usize, half_width: f64) -> Result<Self> {
        Self::new(n, -half_width, half_width, -half_width, half_width)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidParameter("grid needs at least 4 points per axis"));
        }
        let finite = [self.p_min, self.p_max, self.q_min, self.q_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.p_min >= self.p_max || self.q_min >= self.q_max {
            return Err(Error::InvalidParameter("grid bounds must be finite and increasing"));
        }
        Ok(())
    }

    #[inline]
    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn dq(&self) -> f64 {
        (self.q_max - self.q_min) / (self.n - 1) as f64
    }

    #[inline]
    pub fn p(&self, i: usize) -> f64 {
        self.p_min + i as f64 * self.dp()
    }

    #[inline]
    pub fn q(&self, j: usize) -> f64 {
        self.q_min + j as f64 * self.dq()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n + j
    }

    #[inline]
    pub fn contains(&self, p: f64, q: f64) -> bool {
        p >= self.p_min && p <= self.p_max && q >= self.q_min && q <= self.q_max
    }

    /// Tensor trapezoidal weight of node `(i, j)`.
    #[inline]
    pub fn cell_weight(&self, i: usize, j: usize) -> f64 {
        let last = self.n - 1;
        let wp = if i == 0 || i == last { 0.5 } else { 1.0 };
        let wq = if j == 0 || j == last { 0.5 } else { 1.0 };
        wp * wq * self.dp() * self.dq()
    }

    /// Trapezoidal weights for every node, row-major.
    pub fn cell_weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.len());
        for i in 0..self.n {
            for j in 0..self.n {
                w.push(self.cell_weight(i, j));
            }
        }
        w
    }

    /// Bilinear interpolation stencil at `(p, q)`: four `(node index, weight)`
    /// pairs, or `None` outside the bounding box.
    pub fn bilinear_stencil(&self, p: f64, q: f64) -> Option<[(usize, f64); 4]> {
        if !self.contains(p, q) {
            return None;
        }
        let last = self.n - 1;
        let x = (p - self.p_min) / self.dp();
        let y = (q - self.q_min) / self.dq();
        let i = (x as usize).min(last - 1);
        let j = (y as usize).min(last - 1);
        let tx = x - i as f64;
        let ty = y - j as f64;
        Some([
            (self.index(i, j), (1.0 - tx) * (1.0 - ty)),
            (self.index(i + 1, j), tx * (1.0 - ty)),
            (self.index(i, j + 1), (1.0 - tx) * ty),
            (self.index(i + 1, j + 1), tx * ty),
        ])
    }
}

/// Spectral density sampled on a [`GridGeometry`]; row index ↔ `p`, column ↔ `q`.
///
/// Values outside the bounding box are taken to be zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    geometry: GridGeometry,
    values: Vec<f64>,
}

impl SpectrumGrid {
    pub fn zeros(geometry: GridGeometry) -> Self {
        SpectrumGrid { geometry, values: vec![0.0; geometry.len()] }
    }

    pub fn constant(geometry: GridGeometry, value: f64) -> Self {
        SpectrumGrid { geometry, values: vec![value; geometry.len()] }
    }

    pub fn from_values(geometry: GridGeometry, values: Vec<f64>) -> Result<Self> {
        geometry.validate()?;
        if values.len() != geometry.len() {
            return Err(Error::InvalidParameter("value count must equal n*n"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spectrum values must be finite"));
        }
        Ok(SpectrumGrid { geometry, values })
    }

    /// Samples `f(p, q)` at every node.
    pub fn from_fn(geometry: GridGeometry, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(geometry.len());
        for i in 0..geometry.n {
            let p = geometry.p(i);
            for j in 0..geometry.n {
                values.push(f(p, geometry.q(j)));
            }
        }
        SpectrumGrid { geometry, values }
    }

    #[inline]
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.geometry.index(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.geometry.index(i, j);
        self.values[k] = v;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        SpectrumGrid {
            geometry: self.geometry,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn check_same_geometry(&self, other: &SpectrumGrid) -> Result<()> {
        if self.geometry == other.geometry {
            Ok(())
        } else {
            Err(Error::GeometryMismatch)
        }
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    /// Bilinear interpolant at `(p, q)`; zero outside the grid.
    pub fn interpolate_bilinear(&self, p: f64, q: f64) -> f64 {
        match self.geometry.bilinear_stencil(p, q) {
            Some(stencil) => stencil.iter().map(|&(k, w)| w * self.values[k]).sum(),
            None => 0.0,
        }
    }

    /// Natural bicubic spline value at `(p, q)`; zero outside the grid.
    ///
    /// Rebuilds the spline on each call; use [`crate::spline::BicubicSpline`]
    /// for repeated queries.
    pub fn interpolate_spline(&self, p: f64, q: f64) -> f64 {
        crate::spline::BicubicSpline::new(self).eval(p, q)
    }

    /// Trapezoidal approximation of `∬ S dp dq`.
    pub fn integrate_cellwise(&self) -> f64 {
        let g = &self.geometry;
        let mut total = 0.0;
        for i in 0..g.n {
            let mut row = 0.0;
            for j in 0..g.n {
                row += g.cell_weight(i, j) * self.values[g.index(i, j)];
            }
            total += row;
        }
        total
    }

    /// Squared discrete L² norm (trapezoidal).
    pub fn l2_norm_sq(&self) -> f64 {
        self.map(|v| v * v).integrate_cellwise()
    }

    /// Relative L² error `‖S_true − S‖ / ‖S_true‖ × 100` in percent.
    pub fn rel_l2_error(&self, truth: &SpectrumGrid) -> Result<f64> {
        self.check_same_geometry(truth)?;
        let reference = truth.l2_norm_sq();
        if reference == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let diff = SpectrumGrid {
            geometry: self.geometry,
            values: self.values.iter().zip(&truth.values).map(|(a, b)| b - a).collect(),
        };
        Ok((diff.l2_norm_sq() / reference).sqrt() * 100.0)
    }
}
