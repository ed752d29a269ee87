//! The discrete forward operator `A[S](ω)`.
//!
//! For every admissible `ω` and sign pair, the level curve `f_{m1,m2} = ω` is
//! cut into segments; each segment contributes
//! `2⁶πk₀⁴ · |Γ|² ds / |∇f| · S̃(m₁k₁) S̃(m₂k₂)` where `S̃` is the bilinear
//! interpolant. Since `S̃` is linear in the node values, `A[S](ω)` is a sparse
//! quadratic form, precomputed once as a [`QuadratureTable`].

use alloc::vec::Vec;
use core::f64::consts::PI;


#[allow(unused_imports)]
use num_traits::Float;

use crate::contour::{self, BraggField, ContourSegment};
use crate::doppler::{DopplerSpectrum, FrequencyDomain};
use crate::grid::{GridGeometry, SpectrumGrid};
use crate::physics::{self, RadarParams, SignPair};
use crate::{Error, Result};

/// `2⁶ π k₀⁴`.
#[inline]
pub fn scale_constant(params: &RadarParams) -> f64 {
    64.0 * PI * params.k0.powi(4)
}

type Stencil = [(u32, f64); 4];

/// One quadrature node: `weight · (a · S)(b · S)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableEntry {
    pub a: Stencil,
    pub b: Stencil,
    pub weight: f64,
}

impl TableEntry {
    #[inline]
    fn apply(stencil: &Stencil, s: &[f64]) -> f64 {
        stencil[0].1 * s[stencil[0].0 as usize]
            + stencil[1].1 * s[stencil[1].0 as usize]
            + stencil[2].1 * s[stencil[2].0 as usize]
            + stencil[3].1 * s[stencil[3].0 as usize]
    }

    #[inline]
    pub fn evaluate(&self, s: &[f64]) -> f64 {
        self.weight * Self::apply(&self.a, s) * Self::apply(&self.b, s)
    }
}

/// Per-`ω` sparse bilinear forms representing the discrete forward operator.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureTable {
    geometry: GridGeometry,
    quad_geometry: GridGeometry,
    domain: FrequencyDomain,
    params: RadarParams,
    entries: Vec<TableEntry>,
    // entries[offsets[k]..offsets[k + 1]] belong to omegas[k].
    offsets: Vec<usize>,
}

impl QuadratureTable {
    #[inline]
    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    #[inline]
    pub fn quad_geometry(&self) -> &GridGeometry {
        &self.quad_geometry
    }

    #[inline]
    pub fn domain(&self) -> &FrequencyDomain {
        &self.domain
    }

    #[inline]
    pub fn params(&self) -> &RadarParams {
        &self.params
    }

    #[inline]
    pub fn entries(&self, k: usize) -> &[TableEntry] {
        &self.entries[self.offsets[k]..self.offsets[k + 1]]
    }

    pub fn entry_count(&self) -> usize {
        self.entries.len()
    }

    pub fn check_spectrum(&self, s: &SpectrumGrid) -> Result<()> {
        if *s.geometry() == self.geometry {
            Ok(())
        } else {
            Err(Error::GeometryMismatch)
        }
    }

    /// `A[S](ω_k)` for a raw value slice.
    #[inline]
    pub fn eval_row(&self, k: usize, s: &[f64]) -> f64 {
        self.entries(k).iter().map(|e| e.evaluate(s)).sum()
    }

    /// `A[S]` on every `ω` sample.
    pub fn eval_all(&self, s: &[f64]) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..self.domain.len()).into_par_iter().map(|k| self.eval_row(k, s)).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..self.domain.len()).map(|k| self.eval_row(k, s)).collect()
        }
    }

    /// Accumulates `Σ_k coef_k · ∂A(ω_k)/∂S` into `out`, i.e.
    /// `Σ_k coef_k (B_k + B_kᵀ) S`.
    pub fn accumulate_adjoint(&self, s: &[f64], coef: &[f64], out: &mut [f64]) {
        for (k, &c) in coef.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for e in self.entries(k) {
                let w = c * e.weight;
                let sa = TableEntry::apply(&e.a, s);
                let sb = TableEntry::apply(&e.b, s);
                for &(idx, wt) in &e.a {
                    out[idx as usize] += w * wt * sb;
                }
                for &(idx, wt) in &e.b {
                    out[idx as usize] += w * wt * sa;
                }
            }
        }
    }

    /// Directional derivative `A'[S]h` on every `ω` sample.
    pub fn eval_derivative(&self, s: &[f64], h: &[f64]) -> Vec<f64> {
        (0..self.domain.len())
            .map(|k| {
                self.entries(k)
                    .iter()
                    .map(|e| {
                        let (sa, sb) = (TableEntry::apply(&e.a, s), TableEntry::apply(&e.b, s));
                        let (ha, hb) = (TableEntry::apply(&e.a, h), TableEntry::apply(&e.b, h));
                        e.weight * (sa * hb + ha * sb)
                    })
                    .sum()
            })
            .collect()
    }
}

fn to_stencil(raw: [(usize, f64); 4]) -> Stencil {
    raw.map(|(k, w)| (k as u32, w))
}

/// Evaluation points `m₁k₁` and `m₂k₂` at quadrature-plane point `x`.
#[inline]
pub fn evaluation_points(x: [f64; 2], signs: SignPair, params: &RadarParams) -> ([f64; 2], [f64; 2]) {
    let w = physics::wavevectors(x[0], x[1], params);
    let (m1, m2) = (signs.m1f(), signs.m2f());
    ([m1 * w.k1_vec[0], m1 * w.k1_vec[1]], [m2 * w.k2_vec[0], m2 * w.k2_vec[1]])
}

fn segment_entry(seg: &ContourSegment, signs: SignPair, params: &RadarParams, geom: &GridGeometry) -> Option<TableEntry> {
    let (pa, pb) = evaluation_points(seg.midpoint, signs, params);
    let a = geom.bilinear_stencil(pa[0], pa[1])?;
    let b = geom.bilinear_stencil(pb[0], pb[1])?;
    let weight = scale_constant(params) * seg.kernel;
    weight.is_finite().then(|| TableEntry { a: to_stencil(a), b: to_stencil(b), weight })
}

fn assemble_row(omega: f64, fields: &[BraggField], params: &RadarParams, geom: &GridGeometry) -> Vec<TableEntry> {
    let mut row = Vec::new();
    for field in fields {
        for seg in contour::contour_segments(field, omega, params) {
            if let Some(e) = segment_entry(&seg, field.signs, params, geom) {
                row.push(e);
            }
        }
    }
    row
}

/// Precomputes the quadrature table for spectra on `geom`, with contours traced
/// on `quad_geom`.
pub fn assemble_table(
    domain: &FrequencyDomain,
    params: &RadarParams,
    geom: &GridGeometry,
    quad_geom: &GridGeometry,
) -> Result<QuadratureTable> {
    params.validate()?;
    geom.validate()?;
    quad_geom.validate()?;
    if u32::try_from(geom.len()).is_err() {
        return Err(Error::InvalidParameter("spectrum grid too large for table indices"));
    }
    let fields: Vec<BraggField> = SignPair::ALL
        .iter()
        .map(|&s| BraggField::new(s, *quad_geom, params))
        .collect();

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<TableEntry>> = {
        use rayon::prelude::*;
        domain
            .omegas()
            .par_iter()
            .map(|&w| assemble_row(w, &fields, params, geom))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<TableEntry>> = domain
        .omegas()
        .iter()
        .map(|&w| assemble_row(w, &fields, params, geom))
        .collect();

    let mut offsets = Vec::with_capacity(rows.len() + 1);
    offsets.push(0);
    let mut entries = Vec::with_capacity(rows.iter().map(Vec::len).sum());
    for row in rows {
        entries.extend(row);
        offsets.push(entries.len());
    }
    Ok(QuadratureTable {
        geometry: *geom,
        quad_geometry: *quad_geom,
        domain: domain.clone(),
        params: *params,
        entries,
        offsets,
    })
}

/// `σ₂ = A[S]` on the table's frequency domain.
pub fn forward(s: &SpectrumGrid, table: &QuadratureTable) -> Result<DopplerSpectrum> {
    table.check_spectrum(s)?;
    DopplerSpectrum::new(table.domain.clone(), table.eval_all(s.values()))
}

/// Midpoint-rule contour integral of `A[S](ω)` evaluated directly from the
/// contours and the interpolated spectrum, without a table.
pub fn forward_direct(s: &SpectrumGrid, omega: f64, params: &RadarParams, quad_geom: &GridGeometry) -> f64 {
    let c = scale_constant(params);
    let mut total = 0.0;
    for signs in SignPair::ALL {
        let field = BraggField::new(signs, *quad_geom, params);
        for seg in contour::contour_segments(&field, omega, params) {
            let (pa, pb) = evaluation_points(seg.midpoint, signs, params);
            let sa = s.interpolate_bilinear(pa[0], pa[1]);
            let sb = s.interpolate_bilinear(pb[0], pb[1]);
            total += c * seg.kernel * sa * sb;
        }
    }
    total
}

/// Polar quadrature mesh for the mollified oracle.
///
/// Angles are uniform. Radii are uniform with spacing `step`, except inside
/// `ring_band` of `|x| = k₀`, where nodes are uniform in `√|k₀² − r²|` with
/// spacing `ring_step` so that the sharp `Γ_E` structure there is resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMesh {
    pub radius: f64,
    pub step: f64,
    pub ring_band: f64,
    pub ring_step: f64,
}

impl OracleMesh {
    /// Mesh covering `plane` with spacing `step`.
    pub fn covering(plane: &GridGeometry, step: f64) -> Self {
        let radius = [plane.p_min, plane.p_max]
            .iter()
            .flat_map(|&p| [plane.q_min, plane.q_max].map(|q| p.hypot(q)))
            .fold(0.0, f64::max);
        OracleMesh { radius, step, ring_band: 0.05, ring_step: 2e-4 }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if ok(self.radius) && ok(self.step) && ok(self.ring_band) && ok(self.ring_step) {
            Ok(())
        } else {
            Err(Error::InvalidParameter("oracle mesh parameters must be positive"))
        }
    }

    /// Number of angular nodes (even, so the mesh is symmetric under `x → −x`).
    pub fn angles(&self) -> usize {
        let n = (2.0 * PI * self.radius / self.step).ceil() as usize;
        (n + n % 2).max(8)
    }

    /// Radial nodes with trapezoidal weights for `∫ F(r) r dr`.
    pub fn radial_nodes(&self, k0: f64) -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = Vec::new();
        let r_in = (k0 - self.ring_band).max(0.0).min(self.radius);
        let r_out = (k0 + self.ring_band).min(self.radius);
        trapezoid_piece(&mut pts, 0.0, r_in, self.step, |r| (r, r));
        if self.radius > r_in {
            // r = √(k₀² − x²), so r dr = −x dx.
            let x_hi = (k0 * k0 - r_in * r_in).sqrt();
            let x_lo = (k0 * k0 - self.radius.min(k0).powi(2)).max(0.0).sqrt();
            trapezoid_piece(&mut pts, x_lo, x_hi, self.ring_step, |x| ((k0 * k0 - x * x).max(0.0).sqrt(), x));
        }
        if self.radius > k0 {
            // r = √(k₀² + y²), so r dr = y dy.
            let y_hi = (r_out * r_out - k0 * k0).sqrt();
            trapezoid_piece(&mut pts, 0.0, y_hi, self.ring_step, |y| ((k0 * k0 + y * y).sqrt(), y));
            trapezoid_piece(&mut pts, r_out, self.radius, self.step, |r| (r, r));
        }
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(core::cmp::Ordering::Equal));
        // Merge nodes shared by adjacent pieces.
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for (r, w) in pts {
            match merged.last_mut() {
                Some(last) if (last.0 - r).abs() <= 1e-12 * r.max(1.0) => last.1 += w,
                _ => merged.push((r, w)),
            }
        }
        merged
    }
}

/// Appends trapezoid nodes of a uniform parameter `u ∈ [u0, u1]` mapped to
/// `(r, r·|dr/du|)`.
fn trapezoid_piece(out: &mut Vec<(f64, f64)>, u0: f64, u1: f64, h: f64, map: impl Fn(f64) -> (f64, f64)) {
    if u1 <= u0 {
        return;
    }
    let m = ((u1 - u0) / h).ceil().max(1.0) as usize;
    let du = (u1 - u0) / m as f64;
    for i in 0..=m {
        let (r, jac) = map(u0 + i as f64 * du);
        let w = if i == 0 || i == m { 0.5 * du } else { du };
        out.push((r, w * jac));
    }
}

/// Brute-force evaluation of the forward relation with the delta function
/// replaced by a unit-mass Gaussian of width `sigma_moll` (rad/s), integrated
/// over the plane on `mesh`. Test oracle only.
pub fn forward_mollified_oracle(
    s: &SpectrumGrid,
    omega: f64,
    params: &RadarParams,
    sigma_moll: f64,
    mesh: &OracleMesh,
) -> Result<f64> {
    Ok(mollified_spectrum(s, &[omega], params, &[sigma_moll], mesh)?[0][0])
}

/// [`forward_mollified_oracle`] for many `ω` and mollifier widths at once,
/// in a single pass over the mesh. Returns one vector per width.
pub fn mollified_spectrum(
    s: &SpectrumGrid,
    omegas: &[f64],
    params: &RadarParams,
    sigmas: &[f64],
    mesh: &OracleMesh,
) -> Result<Vec<Vec<f64>>> {
    mesh.validate()?;
    if sigmas.is_empty() || sigmas.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::InvalidParameter("mollifier width must be positive"));
    }
    let mut order: Vec<usize> = (0..omegas.len()).collect();
    order.sort_by(|&a, &b| omegas[a].partial_cmp(&omegas[b]).unwrap_or(core::cmp::Ordering::Equal));
    let sorted: Vec<f64> = order.iter().map(|&k| omegas[k]).collect();
    let reach = 8.0 * sigmas.iter().cloned().fold(0.0, f64::max);
    let norms: Vec<f64> = sigmas.iter().map(|sg| 1.0 / (sg * (2.0 * PI).sqrt())).collect();
    let two_gk0 = 2.0 * params.g * params.k0;
    let n_omega = sorted.len();
    let radial = mesh.radial_nodes(params.k0);
    let n_phi = mesh.angles();
    let dphi = 2.0 * PI / n_phi as f64;

    let ring = |&(r, wr): &(f64, f64)| -> Vec<f64> {
        let mut acc = alloc::vec![0.0; n_omega * sigmas.len()];
        for a in 0..n_phi {
            let phi = a as f64 * dphi;
            let (p, q) = (r * phi.cos(), r * phi.sin());
            let cell = wr * dphi;
            for signs in SignPair::ALL {
                let f = physics::bragg_freq(p, q, signs, params);
                let lo = sorted.partition_point(|&w| w < f - reach);
                let hi = sorted.partition_point(|&w| w <= f + reach);
                if lo == hi {
                    continue;
                }
                let (pa, pb) = evaluation_points([p, q], signs, params);
                let ss = s.interpolate_bilinear(pa[0], pa[1]) * s.interpolate_bilinear(pb[0], pb[1]);
                if ss == 0.0 {
                    continue;
                }
                let w = physics::wavevectors(p, q, params);
                let Ok((ge, _)) = physics::coupling_components(signs, 0.0, &w, params) else {
                    continue;
                };
                // Γ_H = h0 + h1·R(ω) with R(ω) = (2gk₀ + ω²)/(2gk₀ − ω²).
                let dot = w.k1_vec[0] * w.k2_vec[0] + w.k1_vec[1] * w.k2_vec[1];
                let mag = w.k1 * w.k2;
                let h0 = 0.5 * (w.k1 + w.k2);
                let h1 = 0.5 * (mag - dot) / (signs.m1f() * signs.m2f() * mag.sqrt());
                for (k, &om) in sorted.iter().enumerate().take(hi).skip(lo) {
                    let rr = (two_gk0 + om * om) / (two_gk0 - om * om);
                    let im = ge.im - (h0 + h1 * rr);
                    let base = cell * (ge.re * ge.re + im * im) * ss;
                    for (l, (&sg, &nm)) in sigmas.iter().zip(&norms).enumerate() {
                        let z = (om - f) / sg;
                        if z.abs() <= 8.0 {
                            acc[l * n_omega + k] += base * nm * (-0.5 * z * z).exp();
                        }
                    }
                }
            }
        }
        acc
    };

    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        radial.par_iter().map(ring).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = radial.iter().map(ring).collect();

    let c = scale_constant(params);
    let mut total = alloc::vec![0.0; n_omega * sigmas.len()];
    for r in rows {
        for (t, v) in total.iter_mut().zip(r) {
            *t += v;
        }
    }
    Ok((0..sigmas.len())
        .map(|l| {
            let mut out = alloc::vec![0.0; omegas.len()];
            for (pos, &k) in order.iter().enumerate() {
                out[k] = c * total[l * n_omega + pos];
            }
            out
        })
        .collect())
}
