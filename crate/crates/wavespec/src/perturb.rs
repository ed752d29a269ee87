//! Seeded multiplicative perturbations rescaled to an exact relative error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use wavespec_core::{DopplerSpectrum, SpectrumGrid};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationKind {
    SpectrumInit,
    DopplerNoise,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    pub kind: PerturbationKind,
    pub target_rel_error_pct: f64,
    pub rng_seed: u64,
}

impl PerturbationSpec {
    fn check(&self, kind: PerturbationKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Format(format!("expected a {kind:?} perturbation, got {:?}", self.kind)));
        }
        if !(self.target_rel_error_pct >= 0.0 && self.target_rel_error_pct.is_finite()) {
            return Err(Error::Format("perturbation target must be a nonnegative number".into()));
        }
        Ok(())
    }
}

/// Relative errors achieved by a perturbation, in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Achieved {
    pub pre_clamp_pct: f64,
    pub post_clamp_pct: f64,
}

/// Stream seed for one experiment cell, stable across platforms and runs.
pub fn derive_seed(seed: u64, level_pct: f64, cell: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(level_pct.to_bits().to_le_bytes());
    h.update(cell.to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Draws `e_k = x_k u_k` with `u_k ~ U(−1, 1)` and scales it so that
/// `‖e‖_w / ‖x‖_w` equals `target` exactly in the weighted norm.
fn scaled_noise(x: &[f64], weights: &[f64], target: f64, seed: u64) -> Result<Vec<f64>> {
    let norm = |v: &[f64]| v.iter().zip(weights).map(|(a, w)| w * a * a).sum::<f64>().sqrt();
    let base = norm(x);
    if base == 0.0 {
        return Err(Error::Core(wavespec_core::Error::ZeroNorm));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut e: Vec<f64> = x.iter().map(|v| v * rng.random_range(-1.0..1.0)).collect();
    let mut size = norm(&e);
    // A draw of all zeros is astronomically unlikely; redraw rather than divide by zero.
    while size == 0.0 {
        e = x.iter().map(|v| v * rng.random_range(-1.0..1.0)).collect();
        size = norm(&e);
    }
    let c = target * base / size;
    Ok(e.into_iter().map(|v| v * c).collect())
}

fn weighted_rel(a: &[f64], b: &[f64], weights: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).zip(weights).map(|((x, y), w)| w * (x - y) * (x - y)).sum();
    let den: f64 = b.iter().zip(weights).map(|(y, w)| w * y * y).sum();
    (num / den).sqrt() * 100.0
}

/// Perturbs an initial spectrum to the requested relative L² error and clamps
/// negative entries to zero.
pub fn perturb_spectrum(truth: &SpectrumGrid, spec: &PerturbationSpec) -> Result<(SpectrumGrid, Achieved)> {
    spec.check(PerturbationKind::SpectrumInit)?;
    if spec.target_rel_error_pct == 0.0 {
        return Ok((truth.clone(), Achieved { pre_clamp_pct: 0.0, post_clamp_pct: 0.0 }));
    }
    let weights = truth.geometry().cell_weights();
    let e = scaled_noise(truth.values(), &weights, spec.target_rel_error_pct / 100.0, spec.rng_seed)?;
    let raw: Vec<f64> = truth.values().iter().zip(&e).map(|(s, e)| s + e).collect();
    let pre = SpectrumGrid::from_values(*truth.geometry(), raw)?;
    let pre_clamp_pct = pre.rel_l2_error(truth)?;
    let out = pre.map(|v| v.max(0.0));
    let post_clamp_pct = out.rel_l2_error(truth)?;
    Ok((out, Achieved { pre_clamp_pct, post_clamp_pct }))
}

/// Adds multiplicative noise to a Doppler spectrum at the requested relative
/// L²(K) level and clamps negative samples to zero.
pub fn add_doppler_noise(sigma2: &DopplerSpectrum, spec: &PerturbationSpec) -> Result<(DopplerSpectrum, Achieved)> {
    spec.check(PerturbationKind::DopplerNoise)?;
    if spec.target_rel_error_pct == 0.0 {
        return Ok((sigma2.clone(), Achieved { pre_clamp_pct: 0.0, post_clamp_pct: 0.0 }));
    }
    let weights = sigma2.domain().weights();
    let e = scaled_noise(sigma2.values(), weights, spec.target_rel_error_pct / 100.0, spec.rng_seed)?;
    let raw: Vec<f64> = sigma2.values().iter().zip(&e).map(|(s, e)| s + e).collect();
    let pre_clamp_pct = weighted_rel(&raw, sigma2.values(), weights);
    let clamped: Vec<f64> = raw.into_iter().map(|v| v.max(0.0)).collect();
    let post_clamp_pct = weighted_rel(&clamped, sigma2.values(), weights);
    Ok((DopplerSpectrum::new(sigma2.domain().clone(), clamped)?, Achieved { pre_clamp_pct, post_clamp_pct }))
}
