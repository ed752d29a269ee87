//! Level curves `f_{m1,m2}^{-1}(ω)` by marching squares on the quadrature plane.
//!
//! Edge crossings are refined against the exact Bragg frequency function, and
//! segment midpoints are projected back onto the level set by Newton steps, so
//! every quadrature node lies on the curve to within `CONTOUR_TOL`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::GridGeometry;
use crate::physics::{self, GammaEVariant, RadarParams, SignPair};
use crate::{Error, Result};

/// Absolute tolerance (rad/s) on `|f − ω|` at refined vertices and midpoints.
pub const CONTOUR_TOL: f64 = 1e-10;

const MIN_SEGMENT: f64 = 1e-12;

/// One straight piece of a level curve together with its midpoint data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSegment {
    pub start: [f64; 2],
    pub end: [f64; 2],
    /// Quadrature node: chord midpoint projected onto the level set.
    pub midpoint: [f64; 2],
    /// Chord length.
    pub ds: f64,
    /// `|∇f|` at the midpoint.
    pub grad_norm: f64,
    /// `|Γ|²` at the midpoint.
    pub gamma_sq: f64,
    /// `∫ |Γ|²/|∇f| ds` along start → midpoint → end. Equals the midpoint
    /// rule away from the `Γ_E` resonance ring and is integrated adaptively
    /// near it.
    pub kernel: f64,
}

/// An ordered polyline of contour segments (closed curves repeat no vertex).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContourPolyline {
    pub vertices: Vec<[f64; 2]>,
    pub segments: Vec<ContourSegment>,
}

impl ContourPolyline {
    pub fn length(&self) -> f64 {
        self.segments.iter().map(|s| s.ds).sum()
    }
}

/// `f_{m1,m2}` sampled at every node of the quadrature plane, with its range.
#[derive(Debug, Clone)]
pub struct BraggField {
    pub signs: SignPair,
    pub geometry: GridGeometry,
    values: Vec<f64>,
    min: f64,
    max: f64,
}

impl BraggField {
    pub fn new(signs: SignPair, geometry: GridGeometry, params: &RadarParams) -> Self {
        let mut values = Vec::with_capacity(geometry.len());
        for i in 0..geometry.n {
            let p = geometry.p(i);
            for j in 0..geometry.n {
                values.push(physics::bragg_freq(p, geometry.q(j), signs, params));
            }
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        BraggField { signs, geometry, values, min, max }
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn range(&self) -> (f64, f64) {
        (self.min, self.max)
    }
}

/// Bounding box of the quadrature-plane points whose two evaluation points
/// `m₁k₁`, `m₂k₂` can both fall inside `spectrum`, with `n` nodes per axis.
pub fn quadrature_plane(spectrum: &GridGeometry, params: &RadarParams, n: usize) -> Result<GridGeometry> {
    let k0 = params.k0;
    let g = spectrum;
    let mut bbox: Option<[f64; 4]> = None;
    for s in SignPair::ALL {
        let (p1, q1) = if s.m1 > 0 {
            ((g.p_min + k0, g.p_max + k0), (g.q_min, g.q_max))
        } else {
            ((k0 - g.p_max, k0 - g.p_min), (-g.q_max, -g.q_min))
        };
        let (p2, q2) = if s.m2 > 0 {
            ((-g.p_max - k0, -g.p_min - k0), (-g.q_max, -g.q_min))
        } else {
            ((g.p_min - k0, g.p_max - k0), (g.q_min, g.q_max))
        };
        let p = (p1.0.max(p2.0), p1.1.min(p2.1));
        let q = (q1.0.max(q2.0), q1.1.min(q2.1));
        if p.0 >= p.1 || q.0 >= q.1 {
            continue;
        }
        bbox = Some(match bbox {
            None => [p.0, p.1, q.0, q.1],
            Some(b) => [b[0].min(p.0), b[1].max(p.1), b[2].min(q.0), b[3].max(q.1)],
        });
    }
    let b = bbox.ok_or(Error::InvalidParameter("spectrum grid too small for any scattering pair"))?;
    GridGeometry::new(n, b[0], b[1], b[2], b[3])
}

/// Crossing of the level on the edge between nodes `a` and `b`, refined by
/// the Illinois variant of regula falsi on the exact function.
fn refine_crossing(a: [f64; 2], b: [f64; 2], fa: f64, fb: f64, level: f64, eval: &impl Fn(f64, f64) -> f64) -> [f64; 2] {
    let point = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let (mut t0, mut t1) = (0.0, 1.0);
    let (mut g0, mut g1) = (fa - level, fb - level);
    if g0 == 0.0 {
        return a;
    }
    if g1 == 0.0 {
        return b;
    }
    let mut side = 0i8;
    let mut t = t0 - g0 * (t1 - t0) / (g1 - g0);
    for _ in 0..100 {
        t = t0 - g0 * (t1 - t0) / (g1 - g0);
        let x = point(t);
        let gt = eval(x[0], x[1]) - level;
        if gt.abs() <= 0.1 * CONTOUR_TOL || (t1 - t0).abs() < 1e-15 {
            break;
        }
        if (gt > 0.0) == (g1 > 0.0) {
            t1 = t;
            g1 = gt;
            if side == -1 {
                g0 *= 0.5;
            }
            side = -1;
        } else {
            t0 = t;
            g0 = gt;
            if side == 1 {
                g1 *= 0.5;
            }
            side = 1;
        }
    }
    point(t)
}

/// Projects `x` onto the level set of `f` by up to three Newton steps along the
/// gradient. Falls back to `x` if a step would move farther than `max_step`.
fn project(x: [f64; 2], level: f64, signs: SignPair, params: &RadarParams, max_step: f64) -> [f64; 2] {
    let mut y = x;
    for _ in 0..3 {
        let r = physics::bragg_freq(y[0], y[1], signs, params) - level;
        if r.abs() <= 0.1 * CONTOUR_TOL {
            break;
        }
        let (gp, gq) = physics::bragg_freq_grad_unchecked(y[0], y[1], signs, params);
        let gg = gp * gp + gq * gq;
        if !(gg > 0.0 && gg.is_finite()) {
            return x;
        }
        let next = [y[0] - r * gp / gg, y[1] - r * gq / gg];
        if (next[0] - x[0]).hypot(next[1] - x[1]) > max_step {
            return x;
        }
        y = next;
    }
    y
}

// Edge pairs per marching-squares case; corners c0=(i,j), c1=(i+1,j),
// c2=(i+1,j+1), c3=(i,j+1); edges e0=c0c1, e1=c1c2, e2=c3c2, e3=c0c3.
const CASES: [&[(u8, u8)]; 16] = [
    &[],
    &[(3, 0)],
    &[(0, 1)],
    &[(3, 1)],
    &[(1, 2)],
    &[], // saddle
    &[(0, 2)],
    &[(3, 2)],
    &[(2, 3)],
    &[(0, 2)],
    &[], // saddle
    &[(1, 2)],
    &[(1, 3)],
    &[(0, 1)],
    &[(3, 0)],
    &[],
];

/// Raw segments of `field = level` with endpoint edge ids, in cell order.
fn raw_segments(field: &BraggField, level: f64, params: &RadarParams) -> Vec<([f64; 2], [f64; 2], usize, usize)> {
    let g = &field.geometry;
    let n = g.n;
    let mut out = Vec::new();
    if level < field.min || level > field.max {
        return out;
    }
    let eval = |p: f64, q: f64| physics::bragg_freq(p, q, field.signs, params);
    let v = &field.values;
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            let corners = [g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)];
            let fv = [v[corners[0]], v[corners[1]], v[corners[2]], v[corners[3]]];
            let mut case = 0usize;
            for (bit, &f) in fv.iter().enumerate() {
                if f >= level {
                    case |= 1 << bit;
                }
            }
            if case == 0 || case == 15 {
                continue;
            }
            let pairs: &[(u8, u8)] = match case {
                5 | 10 => {
                    let centre = 0.25 * (fv[0] + fv[1] + fv[2] + fv[3]) >= level;
                    match (case, centre) {
                        (5, true) | (10, false) => &[(0, 1), (2, 3)],
                        _ => &[(3, 0), (1, 2)],
                    }
                }
                c => CASES[c],
            };
            let pos = |c: usize| [g.p(if c == 1 || c == 2 { i + 1 } else { i }), g.q(if c >= 2 { j + 1 } else { j })];
            let edge = |e: u8| -> ([f64; 2], usize) {
                let (ca, cb, id) = match e {
                    0 => (0, 1, 2 * g.index(i, j)),
                    1 => (1, 2, 2 * g.index(i + 1, j) + 1),
                    2 => (3, 2, 2 * g.index(i, j + 1)),
                    _ => (0, 3, 2 * g.index(i, j) + 1),
                };
                (refine_crossing(pos(ca), pos(cb), fv[ca], fv[cb], level, &eval), id)
            };
            for &(ea, eb) in pairs {
                let (a, ida) = edge(ea);
                let (b, idb) = edge(eb);
                out.push((a, b, ida, idb));
            }
        }
    }
    out
}

fn attach(
    a: [f64; 2],
    b: [f64; 2],
    omega: f64,
    signs: SignPair,
    params: &RadarParams,
) -> Option<ContourSegment> {
    let ds = (b[0] - a[0]).hypot(b[1] - a[1]);
    if !(ds >= MIN_SEGMENT) {
        return None;
    }
    if params.in_exclusion_disk(a[0], a[1]) || params.in_exclusion_disk(b[0], b[1]) {
        return None;
    }
    let chord_mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    if params.in_exclusion_disk(chord_mid[0], chord_mid[1]) {
        return None;
    }
    let midpoint = project(chord_mid, omega, signs, params, ds);
    if params.in_exclusion_disk(midpoint[0], midpoint[1]) {
        return None;
    }
    let (gp, gq) = physics::bragg_freq_grad_unchecked(midpoint[0], midpoint[1], signs, params);
    let grad_norm = gp.hypot(gq);
    let gamma = physics::coupling_gamma(signs, omega, midpoint[0], midpoint[1], params).ok()?;
    if !(grad_norm > 0.0 && grad_norm.is_finite()) {
        return None;
    }
    let gamma_sq = gamma.norm_sqr();
    let kernel = if near_resonance(a, midpoint, params) || near_resonance(midpoint, b, params) {
        path_kernel(a, midpoint, omega, signs, params)? + path_kernel(midpoint, b, omega, signs, params)?
    } else {
        gamma_sq * ds / grad_norm
    };
    if !kernel.is_finite() {
        return None;
    }
    Some(ContourSegment { start: a, end: b, midpoint, ds, grad_norm, gamma_sq, kernel })
}

/// Radii where `|Γ_E|` varies on scales far below the grid spacing: the
/// circle `|x| = k₀` where `k₁·k₂` changes sign, and the resonance just
/// inside it where `(k₁·k₂)^{1/2} = k₀ Re Δ`.
fn resonance_radii(params: &RadarParams) -> [f64; 2] {
    let k0 = params.k0;
    let shift = (k0 * params.delta.re).max(0.0);
    [(k0 * k0 - shift * shift).max(0.0).sqrt(), k0]
}

const RESONANCE_BAND: f64 = 0.02;

fn near_resonance(a: [f64; 2], b: [f64; 2], params: &RadarParams) -> bool {
    if params.gamma_e_variant != GammaEVariant::DotProduct {
        return false;
    }
    let (r_lo, r_hi) = radial_range(a, b);
    let band = RESONANCE_BAND * params.k0;
    let [inner, outer] = resonance_radii(params);
    r_lo <= outer + band && r_hi >= inner - band
}

/// Smallest and largest distance from the origin along the chord `a → b`.
fn radial_range(a: [f64; 2], b: [f64; 2]) -> (f64, f64) {
    let d = [b[0] - a[0], b[1] - a[1]];
    let dd = d[0] * d[0] + d[1] * d[1];
    let t = if dd > 0.0 { (-(a[0] * d[0] + a[1] * d[1]) / dd).clamp(0.0, 1.0) } else { 0.0 };
    let closest = (a[0] + t * d[0]).hypot(a[1] + t * d[1]);
    (closest, a[0].hypot(a[1]).max(b[0].hypot(b[1])))
}

/// `|Γ|²/|∇f|` at `x`.
fn kernel_density(x: [f64; 2], omega: f64, signs: SignPair, params: &RadarParams) -> Option<f64> {
    let (gp, gq) = physics::bragg_freq_grad_unchecked(x[0], x[1], signs, params);
    let gamma = physics::coupling_gamma(signs, omega, x[0], x[1], params).ok()?;
    let v = gamma.norm_sqr() / gp.hypot(gq);
    v.is_finite().then_some(v)
}

/// Adaptive Simpson integral of the kernel density along the chord `a → b`,
/// split where the chord crosses the resonance radii so that the sharp peak
/// always sits at a panel boundary.
fn path_kernel(a: [f64; 2], b: [f64; 2], omega: f64, signs: SignPair, params: &RadarParams) -> Option<f64> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = d[0].hypot(d[1]);
    if len == 0.0 {
        return Some(0.0);
    }
    let dd = len * len;
    let ad = a[0] * d[0] + a[1] * d[1];
    let aa = a[0] * a[0] + a[1] * a[1];
    let mut cuts: Vec<f64> = vec![0.0, 1.0];
    let closest = -ad / dd;
    if closest > 0.0 && closest < 1.0 {
        cuts.push(closest);
    }
    for r in resonance_radii(params) {
        // |a + t d|² = r²
        let disc = ad * ad - dd * (aa - r * r);
        if disc >= 0.0 {
            let root = disc.sqrt();
            for t in [(-ad - root) / dd, (-ad + root) / dd] {
                if t > 0.0 && t < 1.0 {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    let point = |t: f64| [a[0] + t * d[0], a[1] + t * d[1]];
    let density = |t: f64| kernel_density(point(t), omega, signs, params);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 <= 0.0 {
            continue;
        }
        let tm = 0.5 * (t0 + t1);
        let (f0, fm, f1) = (density(t0)?, density(tm)?, density(t1)?);
        let whole = (t1 - t0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += adaptive_simpson(&density, t0, t1, f0, fm, f1, whole, 1e-10 * whole.abs().max(1e-300), 40)?;
    }
    Some(total * len)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> Option<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm)?, f(rm)?);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    Some(
        adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?,
    )
}

/// All admissible segments of `f_{m1,m2}^{-1}(ω)` on the field's plane, in
/// deterministic cell order.
pub fn contour_segments(field: &BraggField, omega: f64, params: &RadarParams) -> Vec<ContourSegment> {
    raw_segments(field, omega, params)
        .into_iter()
        .filter_map(|(a, b, _, _)| attach(a, b, omega, field.signs, params))
        .collect()
}

/// Level curves of `f_{m1,m2} − ω` on `quad_grid`, chained into polylines and
/// clipped against the exclusion disks. Empty when `ω` is outside the range
/// of `f` on the grid.
pub fn extract_contours(
    omega: f64,
    signs: SignPair,
    params: &RadarParams,
    quad_grid: &GridGeometry,
) -> Vec<ContourPolyline> {
    let field = BraggField::new(signs, *quad_grid, params);
    extract_from_field(&field, omega, params)
}

pub fn extract_from_field(field: &BraggField, omega: f64, params: &RadarParams) -> Vec<ContourPolyline> {
    let raw = raw_segments(field, omega, params);
    let mut by_edge: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (k, seg) in raw.iter().enumerate() {
        by_edge.entry(seg.2).or_default().push(k);
        by_edge.entry(seg.3).or_default().push(k);
    }
    let neighbour = |k: usize, edge: usize| -> Option<usize> {
        by_edge.get(&edge).and_then(|v| v.iter().copied().find(|&o| o != k))
    };

    let mut used = vec![false; raw.len()];
    let mut chains: Vec<Vec<([f64; 2], [f64; 2])>> = Vec::new();
    for start in 0..raw.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let (a, b, ea, eb) = raw[start];
        let mut forward = vec![(a, b)];
        // Walk forward from the end edge.
        let mut edge = eb;
        let mut cur = start;
        while let Some(next) = neighbour(cur, edge) {
            if used[next] {
                break;
            }
            used[next] = true;
            let (na, nb, nea, neb) = raw[next];
            if nea == edge {
                forward.push((na, nb));
                edge = neb;
            } else {
                forward.push((nb, na));
                edge = nea;
            }
            cur = next;
        }
        // Walk backward from the start edge.
        let mut backward: Vec<([f64; 2], [f64; 2])> = Vec::new();
        let mut edge = ea;
        let mut cur = start;
        while let Some(next) = neighbour(cur, edge) {
            if used[next] {
                break;
            }
            used[next] = true;
            let (na, nb, nea, neb) = raw[next];
            if neb == edge {
                backward.push((na, nb));
                edge = nea;
            } else {
                backward.push((nb, na));
                edge = neb;
            }
            cur = next;
        }
        backward.reverse();
        backward.extend(forward);
        chains.push(backward);
    }

    // Attach midpoint data; an excluded segment splits its chain.
    let mut out = Vec::new();
    for chain in chains {
        let mut current = ContourPolyline::default();
        for (a, b) in chain {
            match attach(a, b, omega, field.signs, params) {
                Some(seg) => {
                    if current.vertices.is_empty() {
                        current.vertices.push(a);
                    }
                    current.vertices.push(b);
                    current.segments.push(seg);
                }
                None => {
                    if !current.segments.is_empty() {
                        out.push(core::mem::take(&mut current));
                    }
                    current = ContourPolyline::default();
                }
            }
        }
        if !current.segments.is_empty() {
            out.push(current);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> RadarParams {
        RadarParams::new(0.51).unwrap()
    }

    fn plane(n: usize) -> GridGeometry {
        GridGeometry::square(n, 1.5).unwrap()
    }

    #[test]
    fn empty_below_range_of_f11() {
        let p = params();
        let s = SignPair { m1: 1, m2: 1 };
        let field = BraggField::new(s, plane(101), &p);
        // f_{1,1} ≥ √(2 g k₀) everywhere: brute-force minimum over the nodes.
        let (min, _) = field.range();
        assert!(min >= p.first_order_frequency() - 1e-12);
        assert!(extract_from_field(&field, 0.0, &p).is_empty());
        assert!(extract_from_field(&field, 0.9 * p.first_order_frequency(), &p).is_empty());
    }

    #[test]
    fn zero_level_of_f1m1_is_the_q_axis() {
        let p = params();
        let s = SignPair { m1: 1, m2: -1 };
        // Odd node count puts p = 0 on a grid line.
        let g = plane(61);
        let curves = extract_contours(0.0, s, &p, &g);
        let mut qs: Vec<f64> = Vec::new();
        for c in &curves {
            for v in &c.vertices {
                assert!(v[0].abs() < 1e-12, "vertex off axis: {v:?}");
                qs.push(v[1]);
            }
        }
        let lo = qs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = qs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(lo <= -1.5 + 1e-12 && hi >= 1.5 - 1e-12);
        // The two segments touching the origin fall in its exclusion disk,
        // which splits the axis into two polylines.
        assert_eq!(curves.len(), 2);
        let total: f64 = curves.iter().map(|c| c.length()).sum();
        assert!((total - (3.0 - 2.0 * g.dq())).abs() < 1e-9, "length {total}");
    }

    #[test]
    fn midpoints_lie_on_level_set() {
        let p = params();
        for (s, omega) in [
            (SignPair { m1: 1, m2: 1 }, 1.2 * p.first_order_frequency()),
            (SignPair { m1: 1, m2: -1 }, 0.7 * p.first_order_frequency()),
            (SignPair { m1: -1, m2: -1 }, -2.5 * p.bragg_scale()),
        ] {
            let field = BraggField::new(s, plane(121), &p);
            let segs = contour_segments(&field, omega, &p);
            assert!(!segs.is_empty());
            for seg in segs {
                let f = physics::bragg_freq(seg.midpoint[0], seg.midpoint[1], s, &p);
                assert!((f - omega).abs() <= CONTOUR_TOL, "{s:?} residual {}", f - omega);
                assert!(seg.grad_norm > 0.0);
                for v in [seg.start, seg.end] {
                    let f = physics::bragg_freq(v[0], v[1], s, &p);
                    assert!((f - omega).abs() <= CONTOUR_TOL);
                }
            }
        }
    }

    #[test]
    fn arc_length_converges_under_refinement() {
        // Self-convergence: with L(h) the length on a grid of spacing h,
        // the ratio (L(h) − L(h/2)) / (L(h/2) − L(h/4)) ≥ 2 for order ≥ 1.
        let p = params();
        let s = SignPair { m1: 1, m2: 1 };
        let omega = 1.3 * p.first_order_frequency();
        let length = |n: usize| -> f64 {
            extract_contours(omega, s, &p, &plane(n)).iter().map(|c| c.length()).sum()
        };
        let (l1, l2, l3) = (length(41), length(81), length(161));
        let ratio = (l2 - l1).abs() / (l3 - l2).abs();
        assert!(ratio >= 2.0, "ratio {ratio} lengths {l1} {l2} {l3}");
        assert!((l3 - l2).abs() < (l2 - l1).abs());
    }

    #[test]
    fn polylines_cover_all_segments() {
        let p = params();
        let s = SignPair { m1: 1, m2: 1 };
        let omega = 1.6 * p.first_order_frequency();
        let field = BraggField::new(s, plane(97), &p);
        let curves = extract_from_field(&field, omega, &p);
        let segs = contour_segments(&field, omega, &p);
        let n: usize = curves.iter().map(|c| c.segments.len()).sum();
        assert_eq!(n, segs.len());
        for c in &curves {
            assert_eq!(c.vertices.len(), c.segments.len() + 1);
            for (k, seg) in c.segments.iter().enumerate() {
                let (a, b) = (c.vertices[k], c.vertices[k + 1]);
                assert!(a == seg.start || a == seg.end);
                assert!(b == seg.start || b == seg.end);
            }
        }
    }

    #[test]
    fn quadrature_plane_for_symmetric_grid() {
        let p = params();
        let g = GridGeometry::square(64, 2.0).unwrap();
        let qp = quadrature_plane(&g, &p, 253).unwrap();
        assert!((qp.p_min + 2.0 - p.k0).abs() < 1e-15);
        assert!((qp.p_max - 2.0 + p.k0).abs() < 1e-15);
        assert_eq!((qp.q_min, qp.q_max), (-2.0, 2.0));
        let tiny = GridGeometry::square(8, 0.2).unwrap();
        assert!(quadrature_plane(&tiny, &p, 10).is_err());
    }
}
