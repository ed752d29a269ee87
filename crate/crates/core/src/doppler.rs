//! Admissible frequency domain `K` and Doppler spectra sampled on it.

use alloc::vec;
use alloc::vec::Vec;


#[allow(unused_imports)]
use num_traits::Float;

use crate::physics::RadarParams;
use crate::{Error, Result};

/// Ordered `ω` samples (rad/s) with positive quadrature weights.
///
/// Samples are grouped into contiguous bands that never straddle a singular
/// frequency; weights are trapezoidal within each band.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyDomain {
    omegas: Vec<f64>,
    weights: Vec<f64>,
}

impl FrequencyDomain {
    /// The default domain: `±[ε, ω_max]` with `ω_max = max_factor·√(g k₀)`,
    /// minus ε-bands around `√(2gk₀)` and `2√(gk₀)`, with `samples` points in
    /// total distributed over the six bands in proportion to their length.
    pub fn symmetric(params: &RadarParams, max_factor: f64, samples: usize) -> Result<Self> {
        params.validate()?;
        let eps = params.exclusion_halfwidth;
        let omega_max = max_factor * params.bragg_scale();
        let [_, first, saddle] = params.singular_frequencies();
        let mut positive: Vec<(f64, f64)> = Vec::new();
        let mut lo = eps;
        for s in [first, saddle] {
            if s - eps > omega_max {
                break;
            }
            if s - eps > lo {
                positive.push((lo, s - eps));
            }
            lo = s + eps;
        }
        if omega_max > lo {
            positive.push((lo, omega_max));
        }
        let mut bands: Vec<(f64, f64)> = positive.iter().rev().map(|&(a, b)| (-b, -a)).collect();
        bands.extend(positive.iter().copied());
        if bands.is_empty() || samples < 2 * bands.len() {
            return Err(Error::InvalidParameter("frequency domain needs at least two samples per band"));
        }

        // Largest-remainder apportionment with a floor of two samples per band.
        let total_len: f64 = bands.iter().map(|(a, b)| b - a).sum();
        let spare = samples - 2 * bands.len();
        let exact: Vec<f64> = bands.iter().map(|(a, b)| spare as f64 * (b - a) / total_len).collect();
        let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let mut left = spare - counts.iter().sum::<usize>();
        let mut order: Vec<usize> = (0..bands.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.partial_cmp(&ra).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b))
        });
        for &k in order.iter() {
            if left == 0 {
                break;
            }
            counts[k] += 1;
            left -= 1;
        }

        let mut omegas = Vec::with_capacity(samples);
        let mut weights = Vec::with_capacity(samples);
        for (&(a, b), extra) in bands.iter().zip(counts) {
            let m = extra + 2;
            let h = (b - a) / (m - 1) as f64;
            for i in 0..m {
                omegas.push(if i == m - 1 { b } else { a + i as f64 * h });
                weights.push(if i == 0 || i == m - 1 { 0.5 * h } else { h });
            }
        }
        Ok(FrequencyDomain { omegas, weights })
    }

    /// Builds a domain from arbitrary samples; inadmissible samples are
    /// rejected by the caller beforehand. Samples are sorted and split into
    /// bands at singular frequencies.
    pub fn from_samples(mut omegas: Vec<f64>, params: &RadarParams) -> Result<Self> {
        if omegas.iter().any(|w| !params.is_admissible_frequency(*w)) {
            return Err(Error::InvalidParameter("frequency sample outside the admissible domain"));
        }
        omegas.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
        omegas.dedup();
        let n = omegas.len();
        let mut weights = vec![0.0; n];
        if n == 1 {
            weights[0] = 1.0;
            return Ok(FrequencyDomain { omegas, weights });
        }
        let singular = params.singular_frequencies();
        let crosses = |a: f64, b: f64| {
            singular
                .iter()
                .flat_map(|&s| [s, -s])
                .any(|s| a < s && s < b)
        };
        let mut start = 0;
        for k in 1..=n {
            if k < n && !crosses(omegas[k - 1], omegas[k]) {
                continue;
            }
            // Band omegas[start..k].
            if k - start == 1 {
                let left = if start > 0 { omegas[start] - omegas[start - 1] } else { f64::INFINITY };
                let right = if k < n { omegas[k] - omegas[start] } else { f64::INFINITY };
                weights[start] = 0.5 * left.min(right);
            } else {
                for i in start..k - 1 {
                    let h = omegas[i + 1] - omegas[i];
                    weights[i] += 0.5 * h;
                    weights[i + 1] += 0.5 * h;
                }
            }
            start = k;
        }
        Ok(FrequencyDomain { omegas, weights })
    }

    /// Explicit samples and weights, validated for positivity and order.
    pub fn from_parts(omegas: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if omegas.len() != weights.len() {
            return Err(Error::InvalidParameter("omega and weight counts differ"));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidParameter("quadrature weights must be positive"));
        }
        if omegas.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("omega samples must be strictly increasing"));
        }
        Ok(FrequencyDomain { omegas, weights })
    }

    pub fn empty() -> Self {
        FrequencyDomain { omegas: Vec::new(), weights: Vec::new() }
    }

    #[inline]
    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    #[inline]
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    /// Weighted squared norm `Σ w_k v_k²` of a function sampled on the domain.
    pub fn norm_sq(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v * v).sum()
    }
}

/// Second-order Doppler spectrum `σ₂(ω)` sampled on a [`FrequencyDomain`].
#[derive(Debug, Clone, PartialEq)]
pub struct DopplerSpectrum {
    domain: FrequencyDomain,
    values: Vec<f64>,
}

impl DopplerSpectrum {
    pub fn new(domain: FrequencyDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::DomainMismatch);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("Doppler values must be finite"));
        }
        Ok(DopplerSpectrum { domain, values })
    }

    pub fn zeros(domain: FrequencyDomain) -> Self {
        let values = vec![0.0; domain.len()];
        DopplerSpectrum { domain, values }
    }

    #[inline]
    pub fn domain(&self) -> &FrequencyDomain {
        &self.domain
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Weighted L²(K) norm.
    pub fn norm(&self) -> f64 {
        self.domain.norm_sq(&self.values).sqrt()
    }

    pub fn check_same_domain(&self, other: &DopplerSpectrum) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    /// Relative L²(K) distance `‖self − reference‖ / ‖reference‖`.
    pub fn rel_distance(&self, reference: &DopplerSpectrum) -> Result<f64> {
        self.check_same_domain(reference)?;
        let den = reference.norm();
        if den == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let diff: Vec<f64> = self.values.iter().zip(&reference.values).map(|(a, b)| a - b).collect();
        Ok(self.domain.norm_sq(&diff).sqrt() / den)
    }
}
