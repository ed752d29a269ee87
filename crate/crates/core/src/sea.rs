//! Synthetic sea states: Mitsuyasu frequency spectrum with cosine-power
//! directional spreading, mapped onto the Cartesian wavenumber plane.

use core::f64::consts::PI;


#[allow(unused_imports)]
use num_traits::Float;

use crate::grid::{GridGeometry, SpectrumGrid};
use crate::{Error, Result};

/// Panels of the composite Simpson rule used for the spreading normalization.
pub const SPREADING_PANELS: usize = 2048;

/// How the directional spectrum `Ŝ(f, θ)` is sampled when converting to `S(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreqConvention {
    /// Evaluate at `f = ω/2π` and include the `1/2π` Jacobian; preserves energy.
    #[default]
    EnergyPreserving,
    /// Pass `ω` itself as the frequency argument, without a Jacobian.
    AngularArgument,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeaStateParams {
    /// Significant wave height (m).
    pub hs: f64,
    /// Significant wave period (s).
    pub t13: f64,
    /// Dominant direction (rad), measured from the positive `p` axis.
    pub theta0: f64,
    pub s_max: f64,
    pub convention: FreqConvention,
}

impl SeaStateParams {
    pub fn new(hs: f64, t13: f64, theta0: f64, s_max: f64) -> Result<Self> {
        let p = SeaStateParams { hs, t13, theta0, s_max, convention: FreqConvention::default() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hs > 0.0 && self.hs.is_finite()) {
            return Err(Error::InvalidParameter("hs must be positive"));
        }
        if !(self.t13 > 0.0 && self.t13.is_finite()) {
            return Err(Error::InvalidParameter("t13 must be positive"));
        }
        if !(self.theta0 > -PI && self.theta0 <= PI) {
            return Err(Error::InvalidParameter("theta0 must lie in (-pi, pi]"));
        }
        if !(self.s_max >= 0.0 && self.s_max.is_finite()) {
            return Err(Error::InvalidParameter("s_max must be nonnegative"));
        }
        Ok(())
    }

    /// Peak frequency `f_p = 1/(1.05 T)` (Hz).
    #[inline]
    pub fn peak_frequency(&self) -> f64 {
        1.0 / (1.05 * self.t13)
    }
}

/// Mitsuyasu frequency spectrum `K(f)` (m²/Hz); zero for `f ≤ 0`.
pub fn freq_spectrum(f: f64, params: &SeaStateParams) -> f64 {
    if !(f > 0.0) {
        return 0.0;
    }
    let x = params.t13 * f;
    0.257 * params.hs * params.hs * params.t13 * x.powi(-5) * (-1.03 * x.powi(-4)).exp()
}

/// Frequency-dependent spreading exponent `s(f)`.
pub fn spreading_exponent(f: f64, params: &SeaStateParams) -> f64 {
    let r = f / params.peak_frequency();
    if f <= params.peak_frequency() {
        params.s_max * r.powi(5)
    } else {
        params.s_max * r.powf(-2.5)
    }
}

/// Folds an angle in `(−π, π]` into `[−π/2, π/2]`.
pub fn wrap_half(theta: f64) -> f64 {
    if theta < -PI / 2.0 {
        theta + PI
    } else if theta > PI / 2.0 {
        theta - PI
    } else {
        theta
    }
}

fn spreading_kernel(theta: f64, theta0: f64, s: f64) -> f64 {
    let c = wrap_half(0.5 * (theta - theta0)).cos().max(0.0);
    if s == 0.0 {
        1.0
    } else {
        c.powf(2.0 * s)
    }
}

/// Composite Simpson rule on `[a, b]` with an even number of panels.
fn simpson(a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Normalization `G₀` so that the spreading function integrates to one over
/// `(−π, π]`.
pub fn spreading_normalization(s: f64, theta0: f64) -> f64 {
    1.0 / simpson(-PI, PI, SPREADING_PANELS, |t| spreading_kernel(t, theta0, s))
}

/// Directional spreading `G(f, θ)` (1/rad).
pub fn spreading(f: f64, theta: f64, params: &SeaStateParams) -> f64 {
    let s = spreading_exponent(f, params);
    spreading_normalization(s, params.theta0) * spreading_kernel(theta, params.theta0, s)
}

/// Directional spectrum `Ŝ(f, θ) = K(f) G(f, θ)`.
pub fn directional_spectrum(f: f64, theta: f64, params: &SeaStateParams) -> f64 {
    if !(f > 0.0) {
        return 0.0;
    }
    freq_spectrum(f, params) * spreading(f, theta, params)
}

/// Samples the wavenumber spectrum `S(p, q) = (1/k)(∂ω/∂k) Ŝ` on `geom`
/// using deep-water dispersion `ω = √(gk)`. The node at `k = 0` is set to zero.
pub fn make_wavenumber_spectrum(params: &SeaStateParams, geom: GridGeometry, g: f64) -> Result<SpectrumGrid> {
    params.validate()?;
    geom.validate()?;
    if !(g > 0.0) {
        return Err(Error::InvalidParameter("gravity must be positive"));
    }
    Ok(SpectrumGrid::from_fn(geom, |p, q| {
        let k = p.hypot(q);
        if k == 0.0 {
            return 0.0;
        }
        let omega = (g * k).sqrt();
        let domega_dk = 0.5 * (g / k).sqrt();
        let theta = q.atan2(p);
        let s_hat = match params.convention {
            FreqConvention::EnergyPreserving => directional_spectrum(omega / (2.0 * PI), theta, params) / (2.0 * PI),
            FreqConvention::AngularArgument => directional_spectrum(omega, theta, params),
        };
        s_hat * domega_dk / k
    }))
}

/// `H_s = 4√(∫S)`.
pub fn significant_wave_height(s: &SpectrumGrid) -> Result<f64> {
    if !s.is_nonnegative() {
        return Err(Error::Infeasible);
    }
    Ok(4.0 * s.integrate_cellwise().sqrt())
}

/// Relative wave-height error in percent.
pub fn rel_hs_error(h: f64, h_true: f64) -> Result<f64> {
    if h_true == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((h_true - h).abs() / h_true.abs() * 100.0)
}
