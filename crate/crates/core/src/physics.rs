//! Closed-form scattering kernels: wavevectors, the Bragg frequency function
//! `f_{m1,m2}`, its gradient and the coupling coefficient `Γ = Γ_E − iΓ_H`.

use num_complex::Complex64;

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Deep-water gravitational acceleration used by default (m/s²).
pub const DEFAULT_GRAVITY: f64 = 9.806;

/// Which square root appears in the denominator of `Γ_E`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaEVariant {
    /// `(k₁·k₂)^{1/2}`, principal complex branch.
    #[default]
    DotProduct,
    /// `(k₁ k₂)^{1/2}` with the product of magnitudes.
    MagnitudeProduct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarParams {
    /// Radar wavenumber `|k₀|` (rad/m) of the transmitted wavevector `(k₀, 0)`.
    pub k0: f64,
    pub g: f64,
    /// Complex ocean surface impedance.
    pub delta: Complex64,
    /// Half-width ε (rad/s) of the bands removed around the singular frequencies.
    pub exclusion_halfwidth: f64,
    pub gamma_e_variant: GammaEVariant,
}

impl RadarParams {
    /// Parameters with the default impedance, gravity and exclusion width.
    pub fn new(k0: f64) -> Result<Self> {
        let g = DEFAULT_GRAVITY;
        let params = RadarParams {
            k0,
            g,
            delta: Complex64::new(0.011, -0.012),
            exclusion_halfwidth: 0.05 * (g * k0).sqrt(),
            gamma_e_variant: GammaEVariant::DotProduct,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k0 > 0.0 && self.k0.is_finite()) {
            return Err(Error::InvalidParameter("k0 must be positive"));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParameter("g must be positive"));
        }
        if !(self.exclusion_halfwidth > 0.0) {
            return Err(Error::InvalidParameter("exclusion half-width must be positive"));
        }
        if !(self.delta.re.is_finite() && self.delta.im.is_finite()) {
            return Err(Error::InvalidParameter("impedance must be finite"));
        }
        Ok(())
    }

    /// `√(g k₀)`; the saddle value of `f_{1,1}` is twice this.
    #[inline]
    pub fn bragg_scale(&self) -> f64 {
        (self.g * self.k0).sqrt()
    }

    /// First-order Bragg line `√(2 g k₀)`.
    #[inline]
    pub fn first_order_frequency(&self) -> f64 {
        (2.0 * self.g * self.k0).sqrt()
    }

    /// Frequencies (positive branch) that admissible `ω` must avoid: 0, the
    /// first-order line and the saddle value.
    pub fn singular_frequencies(&self) -> [f64; 3] {
        [0.0, self.first_order_frequency(), 2.0 * self.bragg_scale()]
    }

    /// Whether `|ω|` keeps distance ≥ ε from every singular frequency.
    pub fn is_admissible_frequency(&self, omega: f64) -> bool {
        // Small slack so band edges computed as `s ± ε` stay admissible.
        let min_gap = self.exclusion_halfwidth * (1.0 - 1e-9);
        omega.is_finite() && self.singular_frequencies().iter().all(|&s| (omega.abs() - s).abs() >= min_gap)
    }

    /// Radius of the disks around `(0, 0)` and `(±k₀, 0)` where `∇f` degenerates.
    #[inline]
    pub fn exclusion_radius(&self) -> f64 {
        1e-3 * self.k0
    }

    pub fn in_exclusion_disk(&self, p: f64, q: f64) -> bool {
        let r2 = self.exclusion_radius().powi(2);
        [(0.0, 0.0), (self.k0, 0.0), (-self.k0, 0.0)]
            .iter()
            .any(|&(cp, cq)| (p - cp).powi(2) + (q - cq).powi(2) < r2)
    }
}

/// Sign choice `(m₁, m₂) ∈ {±1}²` of one term of the double sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignPair {
    pub m1: i8,
    pub m2: i8,
}

impl SignPair {
    pub const ALL: [SignPair; 4] = [
        SignPair { m1: 1, m2: 1 },
        SignPair { m1: 1, m2: -1 },
        SignPair { m1: -1, m2: 1 },
        SignPair { m1: -1, m2: -1 },
    ];

    pub fn new(m1: i8, m2: i8) -> Result<Self> {
        if m1.abs() != 1 || m2.abs() != 1 {
            return Err(Error::InvalidParameter("signs must be ±1"));
        }
        Ok(SignPair { m1, m2 })
    }

    #[inline]
    pub fn swapped(self) -> Self {
        SignPair { m1: self.m2, m2: self.m1 }
    }

    #[inline]
    pub fn m1f(self) -> f64 {
        f64::from(self.m1)
    }

    #[inline]
    pub fn m2f(self) -> f64 {
        f64::from(self.m2)
    }
}

/// The pair of scattering wavevectors at a quadrature-plane point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wavevectors {
    pub k1_vec: [f64; 2],
    pub k2_vec: [f64; 2],
    pub k1: f64,
    pub k2: f64,
}

/// `k₁ = (p − k₀, q)`, `k₂ = (−p − k₀, −q)` and their lengths.
#[inline]
pub fn wavevectors(p: f64, q: f64, params: &RadarParams) -> Wavevectors {
    let k1_vec = [p - params.k0, q];
    let k2_vec = [-p - params.k0, -q];
    Wavevectors {
        k1_vec,
        k2_vec,
        k1: k1_vec[0].hypot(k1_vec[1]),
        k2: k2_vec[0].hypot(k2_vec[1]),
    }
}

/// `f_{m1,m2}(p, q) = m₁√(g k₁) + m₂√(g k₂)`.
#[inline]
pub fn bragg_freq(p: f64, q: f64, signs: SignPair, params: &RadarParams) -> f64 {
    let w = wavevectors(p, q, params);
    signs.m1f() * (params.g * w.k1).sqrt() + signs.m2f() * (params.g * w.k2).sqrt()
}

/// Analytic `∇f_{m1,m2}` without the exclusion check. Infinite at `(±k₀, 0)`.
pub fn bragg_freq_grad_unchecked(p: f64, q: f64, signs: SignPair, params: &RadarParams) -> (f64, f64) {
    let sg = params.g.sqrt();
    let r1sq = (p - params.k0).powi(2) + q * q;
    let r2sq = (p + params.k0).powi(2) + q * q;
    let c1 = 0.5 * signs.m1f() * sg * r1sq.powf(-0.75);
    let c2 = 0.5 * signs.m2f() * sg * r2sq.powf(-0.75);
    (c1 * (p - params.k0) + c2 * (p + params.k0), (c1 + c2) * q)
}

/// Analytic `∇f_{m1,m2}`; errors inside the exclusion disks.
pub fn bragg_freq_grad(p: f64, q: f64, signs: SignPair, params: &RadarParams) -> Result<(f64, f64)> {
    if params.in_exclusion_disk(p, q) {
        return Err(Error::ExcludedPoint);
    }
    Ok(bragg_freq_grad_unchecked(p, q, signs, params))
}

/// The electromagnetic (complex) and hydrodynamic (real) parts `(Γ_E, Γ_H)`.
pub fn coupling_components(
    signs: SignPair,
    omega: f64,
    w: &Wavevectors,
    params: &RadarParams,
) -> Result<(Complex64, f64)> {
    if w.k1 == 0.0 || w.k2 == 0.0 {
        return Err(Error::DegenerateWavevector);
    }
    let k0 = params.k0;
    let dot12 = w.k1_vec[0] * w.k2_vec[0] + w.k1_vec[1] * w.k2_vec[1];
    let mag12 = w.k1 * w.k2;

    // Γ_E: k₀-vector is (k₀, 0), so k_i·k₀ = k_i,x · k₀.
    let proj = (w.k1_vec[0] * k0) * (w.k2_vec[0] * k0) / (k0 * k0);
    let root = match params.gamma_e_variant {
        GammaEVariant::DotProduct => Complex64::new(dot12, 0.0).sqrt(),
        GammaEVariant::MagnitudeProduct => Complex64::new(mag12.sqrt(), 0.0),
    };
    let gamma_e = Complex64::new(proj - 2.0 * dot12, 0.0) / (root - params.delta * k0) * 0.5;

    let two_gk0 = 2.0 * params.g * k0;
    let omega_sq = omega * omega;
    let m1m2 = signs.m1f() * signs.m2f();
    let gamma_h = 0.5
        * (w.k1 + w.k2
            + (mag12 - dot12) / (m1m2 * mag12.sqrt()) * (two_gk0 + omega_sq) / (two_gk0 - omega_sq));

    Ok((gamma_e, gamma_h))
}

/// Coupling coefficient `Γ = Γ_E − iΓ_H` for scattering wavevectors `w`.
pub fn coupling_gamma_vectors(signs: SignPair, omega: f64, w: &Wavevectors, params: &RadarParams) -> Result<Complex64> {
    let (gamma_e, gamma_h) = coupling_components(signs, omega, w, params)?;
    Ok(gamma_e - Complex64::new(0.0, gamma_h))
}

/// Coupling coefficient at quadrature-plane point `(p, q)`.
pub fn coupling_gamma(signs: SignPair, omega: f64, p: f64, q: f64, params: &RadarParams) -> Result<Complex64> {
    coupling_gamma_vectors(signs, omega, &wavevectors(p, q, params), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> RadarParams {
        RadarParams::new(0.51).unwrap()
    }

    #[test]
    fn wavevectors_at_origin() {
        let p = RadarParams::new(0.35).unwrap();
        let w = wavevectors(0.0, 0.0, &p);
        assert_eq!(w.k1_vec, [-0.35, 0.0]);
        assert_eq!(w.k2_vec, [-0.35, 0.0]);
        assert_eq!(w.k1, 0.35);
        assert_eq!(w.k2, 0.35);
        assert_eq!(wavevectors(0.35, 0.0, &p).k1, 0.0);
    }

    #[test]
    fn wavevectors_sum_is_minus_two_k0() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let w = wavevectors(a, b, &p);
            assert!((w.k1_vec[0] + w.k2_vec[0] + 2.0 * p.k0).abs() < 1e-14);
            assert_eq!(w.k1_vec[1] + w.k2_vec[1], 0.0);
        }
    }

    #[test]
    fn bragg_freq_identities() {
        let p = params();
        let pp = SignPair { m1: 1, m2: 1 };
        let pm = SignPair { m1: 1, m2: -1 };
        let mm = SignPair { m1: -1, m2: -1 };
        assert!((bragg_freq(0.0, 0.0, pp, &p) - 2.0 * p.bragg_scale()).abs() < 1e-14);
        for q in [-1.7, -0.2, 0.0, 0.4, 2.5] {
            assert_eq!(bragg_freq(0.0, q, pm, &p), 0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            assert_eq!(bragg_freq(a, b, mm, &p), -bragg_freq(a, b, pp, &p));
            for s in SignPair::ALL {
                assert_eq!(bragg_freq(a, b, s, &p), bragg_freq(-a, -b, s.swapped(), &p));
            }
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 100 {
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            // Keep well clear of the singular points so the stencil stays smooth.
            if [(0.0, 0.0), (p.k0, 0.0), (-p.k0, 0.0)]
                .iter()
                .any(|&(x, y): &(f64, f64)| (a - x).hypot(b - y) < 0.05)
            {
                continue;
            }
            for s in SignPair::ALL {
                let (gp, gq) = bragg_freq_grad(a, b, s, &p).unwrap();
                let h = 1e-6;
                let fp = (bragg_freq(a + h, b, s, &p) - bragg_freq(a - h, b, s, &p)) / (2.0 * h);
                let fq = (bragg_freq(a, b + h, s, &p) - bragg_freq(a, b - h, s, &p)) / (2.0 * h);
                let scale = gp.hypot(gq);
                assert!((gp - fp).abs() / scale < 1e-6, "dp at ({a},{b}) {s:?}");
                assert!((gq - fq).abs() / scale < 1e-6, "dq at ({a},{b}) {s:?}");
            }
            checked += 1;
        }
    }

    #[test]
    fn gradient_symmetry_and_degeneracy() {
        let p = params();
        let pp = SignPair { m1: 1, m2: 1 };
        for a in [-1.3, -0.2, 0.3, 0.9] {
            assert_eq!(bragg_freq_grad(a, 0.0, pp, &p).unwrap().1, 0.0);
        }
        let (gp, gq) = bragg_freq_grad_unchecked(0.0, 0.0, pp, &p);
        assert!(gp.abs() < 1e-15 && gq == 0.0);
        assert_eq!(bragg_freq_grad(0.0, 0.0, pp, &p), Err(Error::ExcludedPoint));
        assert_eq!(bragg_freq_grad(p.k0, 1e-5, pp, &p), Err(Error::ExcludedPoint));
    }

    #[test]
    fn gamma_magnitude_symmetric_under_swap() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let wb = p.bragg_scale();
        let mut n = 0;
        while n < 100 {
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let omega = rng.random_range(-2.8 * wb..2.8 * wb);
            if !p.is_admissible_frequency(omega) || p.in_exclusion_disk(a, b) {
                continue;
            }
            for s in SignPair::ALL {
                let g1 = coupling_gamma(s, omega, a, b, &p).unwrap().norm();
                let g2 = coupling_gamma(s, omega, -a, -b, &p).unwrap().norm();
                assert!((g1 - g2).abs() <= 1e-12 * g1.max(1e-300));
            }
            n += 1;
        }
    }

    #[test]
    fn gamma_e_real_without_impedance() {
        let mut p = params();
        p.delta = Complex64::new(0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let w = wavevectors(a, b, &p);
            let dot = w.k1_vec[0] * w.k2_vec[0] + w.k1_vec[1] * w.k2_vec[1];
            if dot < 0.0 || w.k1 == 0.0 || w.k2 == 0.0 {
                continue;
            }
            for s in SignPair::ALL {
                let (ge, gh) = coupling_components(s, 1.0, &w, &p).unwrap();
                assert_eq!(ge.im, 0.0);
                assert!(ge.re.is_finite() && gh.is_finite());
            }
        }
    }

    #[test]
    fn gamma_rejects_zero_wavevector() {
        let p = params();
        let s = SignPair { m1: 1, m2: 1 };
        assert_eq!(coupling_gamma(s, 1.0, p.k0, 0.0, &p), Err(Error::DegenerateWavevector));
        assert_eq!(coupling_gamma(s, 1.0, -p.k0, 0.0, &p), Err(Error::DegenerateWavevector));
    }

    #[test]
    fn admissibility() {
        let p = params();
        assert!(!p.is_admissible_frequency(0.0));
        assert!(!p.is_admissible_frequency(-p.first_order_frequency()));
        assert!(!p.is_admissible_frequency(2.0 * p.bragg_scale() + 0.5 * p.exclusion_halfwidth));
        assert!(p.is_admissible_frequency(1.1 * p.first_order_frequency()));
    }

    #[test]
    fn sign_pair_validation() {
        assert!(SignPair::new(1, -1).is_ok());
        assert!(SignPair::new(0, 1).is_err());
        assert!(SignPair::new(1, 2).is_err());
    }
}
