//! Regularized objective `Θ(S) = ‖A[S] − σ₂‖²_{L²(K)} + λ‖S‖²_{L²} + αΦ(S)`,
//! its exact discrete gradient and the proximity operator of `αΦ`.

use alloc::vec::Vec;

use crate::doppler::DopplerSpectrum;
use crate::forward::QuadratureTable;
use crate::grid::SpectrumGrid;
use crate::{Error, Result};

/// Weights of the Tikhonov (`lambda`) and sparsity (`alpha`) terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveParams {
    pub lambda: f64,
    pub alpha: f64,
}

impl ObjectiveParams {
    pub fn new(lambda: f64, alpha: f64) -> Result<Self> {
        let p = ObjectiveParams { lambda, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidParameter("lambda must be positive"));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter("alpha must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBreakdown {
    pub data_misfit: f64,
    pub tikhonov: f64,
    /// `α Σ S_ij`, or `+∞` when any entry is negative.
    pub sparsity: f64,
    pub total: f64,
}

impl ObjectiveBreakdown {
    /// `data_misfit + tikhonov`, the differentiable part `F`.
    #[inline]
    pub fn smooth(&self) -> f64 {
        self.data_misfit + self.tikhonov
    }
}

/// `Φ(S) = Σ S_ij` on the nonnegative cone, `+∞` elsewhere.
pub fn phi(s: &SpectrumGrid) -> f64 {
    if s.is_nonnegative() {
        s.values().iter().sum()
    } else {
        f64::INFINITY
    }
}

fn check(s: &SpectrumGrid, sigma2: &DopplerSpectrum, table: &QuadratureTable) -> Result<()> {
    table.check_spectrum(s)?;
    if sigma2.domain() != table.domain() {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

fn residual(s: &SpectrumGrid, sigma2: &DopplerSpectrum, table: &QuadratureTable) -> Vec<f64> {
    let mut r = table.eval_all(s.values());
    for (v, y) in r.iter_mut().zip(sigma2.values()) {
        *v -= y;
    }
    r
}

/// Evaluates every term of `Θ` at `s`.
pub fn theta(
    s: &SpectrumGrid,
    sigma2: &DopplerSpectrum,
    table: &QuadratureTable,
    params: &ObjectiveParams,
) -> Result<ObjectiveBreakdown> {
    check(s, sigma2, table)?;
    let r = residual(s, sigma2, table);
    let data_misfit = table.domain().norm_sq(&r);
    let tikhonov = params.lambda * s.l2_norm_sq();
    let sparsity = params.alpha * phi(s);
    Ok(ObjectiveBreakdown { data_misfit, tikhonov, sparsity, total: data_misfit + tikhonov + sparsity })
}

/// Gradient of the smooth part `F` as a grid function: the exact derivative
/// of the discrete functional divided by each node's trapezoidal weight, so
/// that `dF(S)[h] = Σ c_ij ∇F_ij h_ij`.
pub fn grad_f(
    s: &SpectrumGrid,
    sigma2: &DopplerSpectrum,
    table: &QuadratureTable,
    params: &ObjectiveParams,
) -> Result<SpectrumGrid> {
    check(s, sigma2, table)?;
    let r = residual(s, sigma2, table);
    let coef: Vec<f64> = r.iter().zip(table.domain().weights()).map(|(r, w)| 2.0 * w * r).collect();
    let mut g = alloc::vec![0.0; s.values().len()];
    table.accumulate_adjoint(s.values(), &coef, &mut g);
    let weights = s.geometry().cell_weights();
    for ((gi, ci), si) in g.iter_mut().zip(weights).zip(s.values()) {
        *gi = *gi / ci + 2.0 * params.lambda * si;
    }
    SpectrumGrid::from_values(*s.geometry(), g)
}

/// Proximity operator of `ξΦ`: elementwise `max(u − ξ, 0)`.
pub fn prox(u: &SpectrumGrid, xi: f64) -> SpectrumGrid {
    u.map(|v| (v - xi).max(0.0))
}
