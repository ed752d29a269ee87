//! Experiment drivers: perturbation sweeps, the Doppler noise table, the
//! noise-level stability sweep and the λ heuristic.

use rayon::prelude::*;

use wavespec_core::sea::{rel_hs_error, significant_wave_height};
use wavespec_core::{
    forward, solve, DopplerSpectrum, ObjectiveParams, QuadratureTable, SolveTrace, SolverConfig, SpectrumGrid,
};

use crate::error::{Error, Result};
use crate::io::{NoiseRow, StabilityRow, SweepRow};
use crate::perturb::{add_doppler_noise, derive_seed, perturb_spectrum, PerturbationKind, PerturbationSpec};

/// Shared inputs of every experiment: the operator, the truth and its clean data.
pub struct Experiment<'a> {
    pub table: &'a QuadratureTable,
    pub truth: &'a SpectrumGrid,
    pub clean: &'a DopplerSpectrum,
    pub solver: SolverConfig,
}

impl<'a> Experiment<'a> {
    pub fn new(table: &'a QuadratureTable, truth: &'a SpectrumGrid, clean: &'a DopplerSpectrum, solver: SolverConfig) -> Self {
        Experiment { table, truth, clean, solver }
    }

    fn hs_truth(&self) -> Result<f64> {
        Ok(significant_wave_height(self.truth)?)
    }

    fn hs_err(&self, s: &SpectrumGrid) -> Result<f64> {
        Ok(rel_hs_error(significant_wave_height(s)?, self.hs_truth()?)?)
    }
}

fn status(trace: &SolveTrace) -> String {
    trace.termination.as_str().to_string()
}

fn failed(cell: &str, err: &Error) -> String {
    log::warn!("{cell} failed: {err}");
    "failed".to_string()
}

/// Perturbs the truth to each level, solves against the clean data and
/// records initial and final errors. One row per `(level, seed)`, ordered by
/// level then seed; failed cells are kept with empty metrics.
pub fn run_perturbation_sweep(exp: &Experiment, levels: &[f64], seeds: &[u64]) -> Vec<SweepRow> {
    let cells: Vec<(f64, u64, u64)> = levels
        .iter()
        .flat_map(|&l| seeds.iter().map(move |&s| (l, s)))
        .enumerate()
        .map(|(k, (l, s))| (l, s, k as u64))
        .collect();
    cells
        .par_iter()
        .map(|&(level, seed, cell)| {
            let run = || -> Result<SweepRow> {
                let spec = PerturbationSpec {
                    kind: PerturbationKind::SpectrumInit,
                    target_rel_error_pct: level,
                    rng_seed: derive_seed(seed, level, cell),
                };
                let (s0, achieved) = perturb_spectrum(exp.truth, &spec)?;
                let trace = solve(&s0, exp.clean, exp.table, &exp.solver, Some(exp.truth))?;
                Ok(SweepRow {
                    level_pct: level,
                    seed,
                    err_init_pct: Some(achieved.post_clamp_pct),
                    err_final_pct: trace.last().rel_err_pct,
                    hs_err_init_pct: Some(exp.hs_err(&s0)?),
                    hs_err_final_pct: Some(exp.hs_err(&trace.spectrum)?),
                    iters: trace.iterations(),
                    status: status(&trace),
                })
            };
            run().unwrap_or_else(|e| SweepRow {
                level_pct: level,
                seed,
                err_init_pct: None,
                err_final_pct: None,
                hs_err_init_pct: None,
                hs_err_final_pct: None,
                iters: 0,
                status: failed(&format!("sweep cell ({level}%, seed {seed})"), &e),
            })
        })
        .collect()
}

/// Starts at the truth, adds Doppler noise at each level and runs
/// `iterations` solver steps. One row per level.
pub fn run_noise_table(exp: &Experiment, noise_levels: &[f64], iterations: usize, seed: u64) -> Vec<NoiseRow> {
    let solver = SolverConfig { max_iter: iterations, ..exp.solver };
    noise_levels
        .par_iter()
        .enumerate()
        .map(|(k, &level)| {
            let run = || -> Result<NoiseRow> {
                let spec = PerturbationSpec {
                    kind: PerturbationKind::DopplerNoise,
                    target_rel_error_pct: level,
                    rng_seed: derive_seed(seed, level, k as u64),
                };
                let (noisy, achieved) = add_doppler_noise(exp.clean, &spec)?;
                let trace = solve(exp.truth, &noisy, exp.table, &solver, Some(exp.truth))?;
                Ok(NoiseRow {
                    noise_pct: level,
                    seed,
                    achieved_noise_pct: Some(achieved.post_clamp_pct),
                    spectrum_err_pct: trace.last().rel_err_pct,
                    hs_err_pct: Some(exp.hs_err(&trace.spectrum)?),
                    iters: trace.iterations(),
                    status: status(&trace),
                })
            };
            run().unwrap_or_else(|e| NoiseRow {
                noise_pct: level,
                seed,
                achieved_noise_pct: None,
                spectrum_err_pct: None,
                hs_err_pct: None,
                iters: 0,
                status: failed(&format!("noise level {level}%"), &e),
            })
        })
        .collect()
}

/// Parameter choice of the stability sweep: `λ = c·√δ`, `α = c′·δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRule {
    pub lambda_coef: f64,
    pub alpha_coef: f64,
    pub iterations: usize,
}

/// For each noise level δ (a fraction), perturbs the data by δ, scales λ and
/// α with δ and solves from the truth. One row per `(δ, seed)`.
pub fn run_stability(exp: &Experiment, deltas: &[f64], seeds: &[u64], rule: StabilityRule) -> Vec<StabilityRow> {
    let cells: Vec<(f64, u64, u64)> = deltas
        .iter()
        .flat_map(|&d| seeds.iter().map(move |&s| (d, s)))
        .enumerate()
        .map(|(k, (d, s))| (d, s, k as u64))
        .collect();
    cells
        .par_iter()
        .map(|&(delta, seed, cell)| {
            let lambda = rule.lambda_coef * delta.sqrt();
            let alpha = rule.alpha_coef * delta;
            let run = || -> Result<StabilityRow> {
                let solver = SolverConfig {
                    objective: ObjectiveParams::new(lambda, alpha)?,
                    max_iter: rule.iterations,
                    ..exp.solver
                };
                let spec = PerturbationSpec {
                    kind: PerturbationKind::DopplerNoise,
                    target_rel_error_pct: 100.0 * delta,
                    rng_seed: derive_seed(seed, delta, cell),
                };
                let (noisy, _) = add_doppler_noise(exp.clean, &spec)?;
                let trace = solve(exp.truth, &noisy, exp.table, &solver, Some(exp.truth))?;
                Ok(StabilityRow {
                    delta,
                    seed,
                    lambda,
                    alpha,
                    err_final_pct: trace.last().rel_err_pct,
                    hs_err_final_pct: Some(exp.hs_err(&trace.spectrum)?),
                    iters: trace.iterations(),
                    status: status(&trace),
                })
            };
            run().unwrap_or_else(|e| StabilityRow {
                delta,
                seed,
                lambda,
                alpha,
                err_final_pct: None,
                hs_err_final_pct: None,
                iters: 0,
                status: failed(&format!("stability cell (δ = {delta}, seed {seed})"), &e),
            })
        })
        .collect()
}

/// Mean of `metric` over the rows sharing each key, in first-seen key order.
/// Rows where the metric is missing are skipped.
pub fn group_means<T>(rows: &[T], key: impl Fn(&T) -> f64, metric: impl Fn(&T) -> Option<f64>) -> Vec<(f64, f64, usize)> {
    let mut out: Vec<(f64, f64, usize)> = Vec::new();
    for row in rows {
        let k = key(row);
        let idx = match out.iter().position(|e| e.0 == k) {
            Some(i) => i,
            None => {
                out.push((k, 0.0, 0));
                out.len() - 1
            }
        };
        if let Some(v) = metric(row) {
            out[idx].1 += v;
            out[idx].2 += 1;
        }
    }
    for e in &mut out {
        e.1 = if e.2 > 0 { e.1 / e.2 as f64 } else { f64::NAN };
    }
    out
}

/// Candidate Tikhonov weight `10⁴·‖σ₂ − A[S_init]‖ / ‖σ₂‖` over `K`.
pub fn suggest_lambda(sigma2: &DopplerSpectrum, s_init: &SpectrumGrid, table: &QuadratureTable) -> Result<f64> {
    let model = forward(s_init, table)?;
    if sigma2.norm() == 0.0 {
        return Err(Error::Core(wavespec_core::Error::ZeroNorm));
    }
    Ok(model.rel_distance(sigma2)? * 1e4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavespec_core::contour::quadrature_plane;
    use wavespec_core::sea::make_wavenumber_spectrum;
    use wavespec_core::{assemble_table, FrequencyDomain, GridGeometry, RadarParams, SeaStateParams};

    struct Fixture {
        table: QuadratureTable,
        truth: SpectrumGrid,
        clean: DopplerSpectrum,
    }

    fn fixture() -> Fixture {
        let params = RadarParams::new(0.51).unwrap();
        let geom = GridGeometry::square(16, 2.0).unwrap();
        let quad = quadrature_plane(&geom, &params, 31).unwrap();
        let domain = FrequencyDomain::symmetric(&params, 2.8, 48).unwrap();
        let table = assemble_table(&domain, &params, &geom, &quad).unwrap();
        let sea = SeaStateParams::new(1.0, 3.0, 0.0, 25.0).unwrap();
        let truth = make_wavenumber_spectrum(&sea, geom, params.g).unwrap();
        let clean = forward(&truth, &table).unwrap();
        Fixture { table, truth, clean }
    }

    fn solver() -> SolverConfig {
        SolverConfig { max_iter: 3, ..SolverConfig::new(ObjectiveParams::new(1e-3, 1e-6).unwrap()) }
    }

    #[test]
    fn sweep_cardinality_order_and_level_zero() {
        let f = fixture();
        let exp = Experiment::new(&f.table, &f.truth, &f.clean, solver());
        let rows = run_perturbation_sweep(&exp, &[0.0, 10.0], &[0, 1, 2]);
        assert_eq!(rows.len(), 6);
        let keys: Vec<(f64, u64)> = rows.iter().map(|r| (r.level_pct, r.seed)).collect();
        assert_eq!(keys, [(0.0, 0), (0.0, 1), (0.0, 2), (10.0, 0), (10.0, 1), (10.0, 2)]);
        for r in &rows[..3] {
            assert_eq!(r.err_init_pct, Some(0.0));
            assert!(r.err_final_pct.unwrap() < 1.0);
            assert!(r.hs_err_final_pct.unwrap() < 1.0);
        }
        assert!(rows[3..].iter().all(|r| r.err_init_pct.unwrap() <= 10.0 + 1e-9));
        assert_eq!(run_perturbation_sweep(&exp, &[0.0, 10.0], &[0, 1, 2]), rows);
    }

    #[test]
    fn failed_cells_are_recorded() {
        let f = fixture();
        let zero = SpectrumGrid::zeros(*f.truth.geometry());
        let exp = Experiment::new(&f.table, &zero, &f.clean, solver());
        let rows = run_perturbation_sweep(&exp, &[5.0], &[0, 1]);
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.status == "failed" && r.err_final_pct.is_none()));
    }

    #[test]
    fn noise_table_rows() {
        let f = fixture();
        let exp = Experiment::new(&f.table, &f.truth, &f.clean, solver());
        let rows = run_noise_table(&exp, &[0.0, 0.5, 1.0, 5.0], 2, 0);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows.iter().map(|r| r.noise_pct).collect::<Vec<_>>(), [0.0, 0.5, 1.0, 5.0]);
        assert!(rows.iter().all(|r| r.iters <= 2));
        assert!((rows[3].achieved_noise_pct.unwrap() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn stability_rows_scale_parameters() {
        let f = fixture();
        let exp = Experiment::new(&f.table, &f.truth, &f.clean, solver());
        let rule = StabilityRule { lambda_coef: 1e-2, alpha_coef: 1e-4, iterations: 2 };
        let rows = run_stability(&exp, &[0.01, 0.04], &[0], rule);
        assert_eq!(rows.len(), 2);
        assert!((rows[0].lambda - 1e-3).abs() < 1e-15);
        assert!((rows[1].lambda - 2e-3).abs() < 1e-15);
        assert!((rows[1].alpha - 4e-6).abs() < 1e-18);
    }

    #[test]
    fn group_means_by_key() {
        let rows = [(1.0, Some(2.0)), (2.0, Some(5.0)), (1.0, Some(4.0)), (2.0, None)];
        let m = group_means(&rows, |r| r.0, |r| r.1);
        assert_eq!(m, vec![(1.0, 3.0, 2), (2.0, 5.0, 1)]);
    }

    #[test]
    fn suggest_lambda_cases() {
        let f = fixture();
        assert_eq!(suggest_lambda(&f.clean, &f.truth, &f.table).unwrap(), 0.0);
        let zero = SpectrumGrid::zeros(*f.truth.geometry());
        assert!((suggest_lambda(&f.clean, &zero, &f.table).unwrap() - 1e4).abs() < 1e-9);
        let half = f.truth.scaled(0.5);
        // A is quadratic, so A[S/2] = A[S]/4 and the ratio is 3/4.
        assert!((suggest_lambda(&f.clean, &half, &f.table).unwrap() - 7.5e3).abs() < 1e-6);
        let silent = DopplerSpectrum::zeros(f.clean.domain().clone());
        assert!(suggest_lambda(&silent, &f.truth, &f.table).is_err());
    }
}
