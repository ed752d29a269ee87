//! Scenario configuration: one JSON document holding every experiment knob.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use wavespec_core::contour::quadrature_plane;
use wavespec_core::num_complex::Complex64;
use wavespec_core::sea::make_wavenumber_spectrum;
use wavespec_core::{
    assemble_table, FreqConvention, FrequencyDomain, GammaEVariant, GridGeometry, ObjectiveParams, QuadratureTable,
    RadarParams, SeaStateParams, SolverConfig, SpectrumGrid, Tolerance,
};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub radar: RadarConfig,
    pub grid: GridConfig,
    pub frequency: FrequencyConfig,
    pub sea: SeaConfig,
    pub solver: SolverSettings,
    pub experiments: ExperimentConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadarConfig {
    pub k0: f64,
    pub gravity: f64,
    /// Ocean surface impedance as `[re, im]`.
    pub impedance: [f64; 2],
    pub gamma_e_variant: GammaEVariantName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaEVariantName {
    DotProduct,
    MagnitudeProduct,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// Quadrature plane resolution relative to the spectrum grid.
    pub quad_scale: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrequencyConfig {
    /// `ω_max` in units of `√(g k₀)`.
    pub max_factor: f64,
    pub samples: usize,
    /// Exclusion half-width ε in units of `√(g k₀)`.
    pub exclusion_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeaConfig {
    pub hs: f64,
    pub t13: f64,
    pub theta0: f64,
    pub s_max: f64,
    pub freq_convention: FreqConventionName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreqConventionName {
    EnergyPreserving,
    AngularArgument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSettings {
    pub lambda: f64,
    pub alpha: f64,
    pub t0: f64,
    pub mu: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    /// Stop when `|ΔΘ| < tol_theta_rel · Θ(S₀)`.
    pub tol_theta_rel: f64,
    pub reset_step_each_iter: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Initial perturbation for `reconstruct --init perturbed`.
    pub perturbation_pct: f64,
    pub seed: u64,
    pub sweep_levels_pct: Vec<f64>,
    pub seeds: Vec<u64>,
    pub noise_levels_pct: Vec<f64>,
    pub noise_iterations: usize,
    /// Doppler noise levels δ (fractions) of the stability sweep.
    pub stability_deltas: Vec<f64>,
    /// `λ = stability_lambda_coef · √δ`.
    pub stability_lambda_coef: f64,
    /// `α = stability_alpha_coef · δ`.
    pub stability_alpha_coef: f64,
    pub stability_iterations: usize,
}

impl Default for RadarConfig {
    fn default() -> Self {
        RadarConfig {
            k0: 0.51,
            gravity: wavespec_core::physics::DEFAULT_GRAVITY,
            impedance: [0.011, -0.012],
            gamma_e_variant: GammaEVariantName::DotProduct,
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 64, p_min: -2.0, p_max: 2.0, q_min: -2.0, q_max: 2.0, quad_scale: 4 }
    }
}

impl Default for FrequencyConfig {
    fn default() -> Self {
        FrequencyConfig { max_factor: 2.8, samples: 257, exclusion_factor: 0.05 }
    }
}

impl Default for SeaConfig {
    fn default() -> Self {
        SeaConfig { hs: 1.0, t13: 3.0, theta0: 0.0, s_max: 25.0, freq_convention: FreqConventionName::EnergyPreserving }
    }
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            lambda: 1e-3,
            alpha: 1e-6,
            t0: 1.0,
            mu: 0.5,
            max_iter: 20,
            max_backtracks: 40,
            tol_theta_rel: 1e-10,
            reset_step_each_iter: false,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            perturbation_pct: 40.0,
            seed: 0,
            sweep_levels_pct: (1..=10).map(|k| 5.0 * k as f64).collect(),
            seeds: (0..5).collect(),
            noise_levels_pct: vec![0.5, 1.0, 5.0],
            noise_iterations: 10,
            stability_deltas: vec![0.005, 0.01, 0.05],
            stability_lambda_coef: 1e-2,
            stability_alpha_coef: 1e-4,
            stability_iterations: 20,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Applies `key.path=value` overrides. Values are parsed as JSON and fall
    /// back to plain strings.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut doc = serde_json::to_value(self).expect("config serializes");
        for item in overrides {
            let (path, raw) =
                item.split_once('=').ok_or_else(|| Error::Format(format!("override `{item}` is not key=value")))?;
            let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            let mut slot = &mut doc;
            for key in path.split('.') {
                slot = slot
                    .as_object_mut()
                    .and_then(|m| m.get_mut(key))
                    .ok_or_else(|| Error::Format(format!("unknown config key `{path}`")))?;
            }
            *slot = value;
        }
        serde_json::from_value(doc).map_err(|e| Error::Format(format!("invalid override: {e}")))
    }

    /// Hex SHA-256 of the compact JSON form.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn radar_params(&self) -> Result<RadarParams> {
        let r = &self.radar;
        let params = RadarParams {
            k0: r.k0,
            g: r.gravity,
            delta: Complex64::new(r.impedance[0], r.impedance[1]),
            exclusion_halfwidth: self.frequency.exclusion_factor * (r.gravity * r.k0).sqrt(),
            gamma_e_variant: match r.gamma_e_variant {
                GammaEVariantName::DotProduct => GammaEVariant::DotProduct,
                GammaEVariantName::MagnitudeProduct => GammaEVariant::MagnitudeProduct,
            },
        };
        params.validate()?;
        Ok(params)
    }

    pub fn geometry(&self) -> Result<GridGeometry> {
        let g = &self.grid;
        Ok(GridGeometry::new(g.n, g.p_min, g.p_max, g.q_min, g.q_max)?)
    }

    pub fn sea_params(&self) -> Result<SeaStateParams> {
        let s = &self.sea;
        let mut params = SeaStateParams::new(s.hs, s.t13, s.theta0, s.s_max)?;
        params.convention = match s.freq_convention {
            FreqConventionName::EnergyPreserving => FreqConvention::EnergyPreserving,
            FreqConventionName::AngularArgument => FreqConvention::AngularArgument,
        };
        Ok(params)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let s = &self.solver;
        let config = SolverConfig {
            objective: ObjectiveParams::new(s.lambda, s.alpha)?,
            t0: s.t0,
            mu: s.mu,
            max_iter: s.max_iter,
            max_backtracks: s.max_backtracks,
            tol_theta: Tolerance::RelativeToInitial(s.tol_theta_rel),
            reset_step_each_iter: s.reset_step_each_iter,
        };
        config.validate()?;
        Ok(config)
    }

    /// Validates every section and assembles the derived objects.
    pub fn build(&self) -> Result<Scenario> {
        if self.grid.quad_scale == 0 {
            return Err(Error::Format("grid.quad_scale must be at least 1".into()));
        }
        let params = self.radar_params()?;
        let geometry = self.geometry()?;
        let quad_geometry = quadrature_plane(&geometry, &params, self.grid.quad_scale * (geometry.n - 1) + 1)?;
        let domain = FrequencyDomain::symmetric(&params, self.frequency.max_factor, self.frequency.samples)?;
        let e = &self.experiments;
        if e.sweep_levels_pct.iter().chain(&e.noise_levels_pct).any(|v| !(*v >= 0.0)) {
            return Err(Error::Format("experiment levels must be nonnegative".into()));
        }
        if e.stability_deltas.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::Format("stability deltas must be positive".into()));
        }
        Ok(Scenario {
            config: self.clone(),
            params,
            geometry,
            quad_geometry,
            domain,
            sea: self.sea_params()?,
            solver: self.solver_config()?,
        })
    }
}

/// A validated configuration with its derived geometry, domain and parameters.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub params: RadarParams,
    pub geometry: GridGeometry,
    pub quad_geometry: GridGeometry,
    pub domain: FrequencyDomain,
    pub sea: SeaStateParams,
    pub solver: SolverConfig,
}

impl Scenario {
    pub fn table(&self) -> Result<QuadratureTable> {
        self.table_on(&self.domain)
    }

    pub fn table_on(&self, domain: &FrequencyDomain) -> Result<QuadratureTable> {
        Ok(assemble_table(domain, &self.params, &self.geometry, &self.quad_geometry)?)
    }

    /// The model spectrum for the configured sea state.
    pub fn truth(&self) -> Result<SpectrumGrid> {
        Ok(make_wavenumber_spectrum(&self.sea, self.geometry, self.params.g)?)
    }
}
