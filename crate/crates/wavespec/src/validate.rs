//! Embedded verification suite: each check measures one quantity against a
//! fixed tolerance and reports both.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wavespec_core::contour::quadrature_plane;
use wavespec_core::forward::mollified_spectrum;
use wavespec_core::objective::{grad_f, prox, theta};
use wavespec_core::physics::coupling_gamma;
use wavespec_core::sea::{freq_spectrum, significant_wave_height};
use wavespec_core::{
    assemble_table, fixed_point_residual, forward, solve, DopplerSpectrum, FrequencyDomain, GridGeometry,
    ObjectiveParams, OracleMesh, QuadratureTable, RadarParams, SignPair, SolverConfig, SpectrumGrid, Termination,
    Tolerance,
};

use crate::config::Scenario;
use crate::error::Result;
use crate::perturb::{perturb_spectrum, PerturbationKind, PerturbationSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub detail: String,
}

impl CheckResult {
    fn below(name: &'static str, measured: f64, threshold: f64, detail: String) -> Self {
        CheckResult { name, passed: measured < threshold, measured, threshold, detail }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {}: measured {:.3e} (limit {:.1e}) {}", self.name, self.measured, self.threshold, self.detail)
    }
}

fn random_grid(geom: GridGeometry, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> SpectrumGrid {
    SpectrumGrid::from_fn(geom, |_, _| rng.random_range(lo..hi))
}

fn small_table(params: &RadarParams, n: usize, samples: usize) -> Result<QuadratureTable> {
    let geom = GridGeometry::square(n, 2.0)?;
    let quad = quadrature_plane(&geom, params, 4 * (n - 1) + 1)?;
    let domain = FrequencyDomain::symmetric(params, 2.8, samples)?;
    Ok(assemble_table(&domain, params, &geom, &quad)?)
}

/// Directional derivatives of the smooth objective against central
/// differences on a 16×16 grid. `corrupt` perturbs the analytic gradient so
/// the check can be seen to fail.
pub fn gradient_check(params: &RadarParams, directions: usize, seed: u64, corrupt: bool) -> Result<CheckResult> {
    let table = small_table(params, 16, 65)?;
    let geom = *table.geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_grid(geom, &mut rng, 0.1, 1.0);
    let sigma_vals = (0..table.domain().len()).map(|_| rng.random_range(0.0..0.05)).collect();
    let sigma = DopplerSpectrum::new(table.domain().clone(), sigma_vals)?;
    let obj = ObjectiveParams::new(1e-3, 1e-6)?;
    let smooth = |x: &SpectrumGrid| theta(x, &sigma, &table, &obj).map(|t| t.smooth());
    let mut grad = grad_f(&s, &sigma, &table, &obj)?;
    if corrupt {
        grad = grad.map(|g| g * (1.0 + 1e-3));
    }
    let weights = geom.cell_weights();
    let eps = 1e-4;
    let mut worst = 0.0_f64;
    for _ in 0..directions {
        let h = random_grid(geom, &mut rng, -1.0, 1.0);
        let shift = |c: f64| {
            SpectrumGrid::from_values(geom, s.values().iter().zip(h.values()).map(|(a, b)| a + c * b).collect())
        };
        let fd = (smooth(&shift(eps)?)? - smooth(&shift(-eps)?)?) / (2.0 * eps);
        let analytic: f64 = grad.values().iter().zip(h.values()).zip(&weights).map(|((g, h), c)| c * g * h).sum();
        worst = worst.max((fd - analytic).abs() / analytic.abs().max(f64::MIN_POSITIVE));
    }
    Ok(CheckResult::below("gradient", worst, 1e-5, format!("max relative error over {directions} directions")))
}

/// `A[S+h] − A[S] − A′[S]h = A[h]` on random instances.
pub fn quadratic_identity(params: &RadarParams, trials: usize, seed: u64) -> Result<CheckResult> {
    let table = small_table(params, 12, 41)?;
    let geom = *table.geometry();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let s = random_grid(geom, &mut rng, 0.0, 1.0);
        let h = random_grid(geom, &mut rng, -0.5, 0.5);
        let sh: Vec<f64> = s.values().iter().zip(h.values()).map(|(a, b)| a + b).collect();
        let a_sh = table.eval_all(&sh);
        let a_s = table.eval_all(s.values());
        let a_h = table.eval_all(h.values());
        let d = table.eval_derivative(s.values(), h.values());
        let scale = a_sh.iter().chain(&a_s).chain(&d).fold(0.0_f64, |m, v| m.max(v.abs()));
        for k in 0..a_sh.len() {
            worst = worst.max((a_sh[k] - a_s[k] - d[k] - a_h[k]).abs() / scale);
        }
    }
    Ok(CheckResult { passed: worst <= 1e-12, ..CheckResult::below("quadratic identity", worst, 1e-12, format!("{trials} random instances")) })
}

/// `|Γ|` is invariant under swapping the scattering wavevectors, realized by
/// `(p, q) → (−p, −q)`.
pub fn gamma_symmetry(params: &RadarParams, points: usize, seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let wb = params.bragg_scale();
    let mut worst = 0.0_f64;
    let mut n = 0;
    while n < points {
        let (a, b) = (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let omega = rng.random_range(-2.8 * wb..2.8 * wb);
        if !params.is_admissible_frequency(omega) || params.in_exclusion_disk(a, b) {
            continue;
        }
        for s in SignPair::ALL {
            let g1 = coupling_gamma(s, omega, a, b, params)?.norm();
            let g2 = coupling_gamma(s, omega, -a, -b, params)?.norm();
            worst = worst.max((g1 - g2).abs() / g1.max(f64::MIN_POSITIVE));
        }
        n += 1;
    }
    Ok(CheckResult {
        passed: worst <= 1e-12,
        ..CheckResult::below("gamma symmetry", worst, 1e-12, format!("{points} points x 4 sign pairs"))
    })
}

/// Feasibility, nonexpansiveness and idempotence of the prox operator.
pub fn prox_properties(trials: usize, seed: u64) -> Result<CheckResult> {
    let geom = GridGeometry::square(8, 1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    for _ in 0..trials {
        let u = random_grid(geom, &mut rng, -1.0, 1.0);
        let v = random_grid(geom, &mut rng, -1.0, 1.0);
        let xi = rng.random_range(0.0..0.5);
        let (pu, pv) = (prox(&u, xi), prox(&v, xi));
        if !pu.is_nonnegative() {
            worst = f64::INFINITY;
        }
        let dist = |a: &SpectrumGrid, b: &SpectrumGrid| {
            a.values().iter().zip(b.values()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
        };
        worst = worst.max(dist(&pu, &pv) - dist(&u, &v));
        worst = worst.max(dist(&prox(&pu, 0.0), &pu));
    }
    Ok(CheckResult {
        passed: worst <= 0.0,
        ..CheckResult::below("prox", worst.max(0.0), f64::EPSILON, format!("{trials} random pairs"))
    })
}

/// H_s of the generated spectrum against the configured value.
pub fn hs_consistency(scenario: &Scenario) -> Result<CheckResult> {
    let truth = scenario.truth()?;
    let hs = significant_wave_height(&truth)?;
    let rel = (hs - scenario.sea.hs).abs() / scenario.sea.hs;
    Ok(CheckResult::below("hs self-consistency", rel, 0.05, format!("H_s = {hs:.4} m, configured {} m", scenario.sea.hs)))
}

/// `4√∫K(f) df` for unit H_s against the closed form `4√(0.257/4.12)`.
pub fn frequency_integral(scenario: &Scenario) -> Result<CheckResult> {
    let mut sea = scenario.sea;
    sea.hs = 1.0;
    // Substituting x = (T f)⁻⁴ maps f ∈ (0, ∞) onto x ∈ (0, ∞) with a smooth,
    // exponentially decaying integrand; integrate over [1e-12, 60].
    let panels = 20_000;
    let (a, b) = (1e-12, 60.0);
    let h = (b - a) / panels as f64;
    let g = |x: f64| {
        let f = x.powf(-0.25) / sea.t13;
        freq_spectrum(f, &sea) * 0.25 * x.powf(-1.25) / sea.t13
    };
    let mut sum = g(a) + g(b);
    for k in 1..panels {
        sum += g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    let integral = sum * h / 3.0;
    let hs = 4.0 * integral.sqrt();
    let expected = 4.0 * (0.257_f64 / 4.12).sqrt();
    let err = (hs - 0.9990).abs().max((hs - expected).abs());
    Ok(CheckResult::below("frequency integral", err, 1e-3, format!("4*sqrt(integral) = {hs:.6}")))
}

/// Refinement schedule of the mollified brute-force oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSchedule {
    /// Mollifier widths (rad/s), coarse to fine; the finest is compared.
    pub sigmas: Vec<f64>,
    pub mesh_step: f64,
    pub ring_step: f64,
    /// Quadrature plane scale of the forward operator being checked.
    pub quad_scale: usize,
    pub tolerance: f64,
    /// Denominator floor relative to `max |σ₂|`.
    pub floor: f64,
}

impl Default for OracleSchedule {
    fn default() -> Self {
        OracleSchedule {
            sigmas: vec![0.005, 0.0025, 0.00125],
            mesh_step: 5e-4,
            ring_step: 2e-4,
            quad_scale: 8,
            tolerance: 0.02,
            floor: 1e-3,
        }
    }
}

/// Per-width worst relative discrepancies plus the final verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub per_width: Vec<(f64, f64, f64)>,
    pub check: CheckResult,
}

/// Forward operator on the model spectrum against the mollified oracle at
/// every sample of the scenario's frequency domain.
pub fn oracle_equivalence(scenario: &Scenario, schedule: &OracleSchedule) -> Result<OracleReport> {
    let start = Instant::now();
    let geometry = scenario.geometry;
    let quad = quadrature_plane(&geometry, &scenario.params, schedule.quad_scale * (geometry.n - 1) + 1)?;
    let table = assemble_table(&scenario.domain, &scenario.params, &geometry, &quad)?;
    let truth = scenario.truth()?;
    let sigma2 = forward(&truth, &table)?;
    let mut mesh = OracleMesh::covering(&quad, schedule.mesh_step);
    mesh.ring_step = schedule.ring_step;
    let oracle = mollified_spectrum(&truth, scenario.domain.omegas(), &scenario.params, &schedule.sigmas, &mesh)?;
    let top = sigma2.values().iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let per_width: Vec<(f64, f64, f64)> = schedule
        .sigmas
        .iter()
        .zip(&oracle)
        .map(|(&sg, o)| {
            let (worst, at) = sigma2
                .values()
                .iter()
                .zip(o)
                .zip(scenario.domain.omegas())
                .map(|((a, b), &w)| ((a - b).abs() / a.abs().max(schedule.floor * top), w))
                .fold((0.0, f64::NAN), |acc, x| if x.0 > acc.0 { x } else { acc });
            (sg, worst, at)
        })
        .collect();
    let &(_, worst, at) = per_width.last().expect("schedule has at least one width");
    let detail = format!(
        "worst at omega = {at:.4} rad/s, {} samples, {:.0} s",
        scenario.domain.len(),
        start.elapsed().as_secs_f64()
    );
    Ok(OracleReport { per_width, check: CheckResult::below("oracle equivalence", worst, schedule.tolerance, detail) })
}

/// Outcome of the solver contract check.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverContract {
    pub monotone: bool,
    pub feasible: bool,
    pub termination: Termination,
    pub iterations: usize,
    pub residual: f64,
    pub check: CheckResult,
}

/// Runs the solver to convergence from a perturbed start and checks monotone
/// descent, feasibility of every accepted iterate and the fixed-point residual.
/// The residual is taken at the nominal step `t0`: the last accepted step can
/// be a heavily backtracked one, which would make the residual trivially small.
pub fn solver_contract(scenario: &Scenario, table: &QuadratureTable, max_iter: usize) -> Result<SolverContract> {
    let truth = scenario.truth()?;
    let sigma2 = forward(&truth, table)?;
    let spec = PerturbationSpec { kind: PerturbationKind::SpectrumInit, target_rel_error_pct: 40.0, rng_seed: 1 };
    let (s0, _) = perturb_spectrum(&truth, &spec)?;
    let config = SolverConfig { max_iter, tol_theta: Tolerance::RelativeToInitial(1e-10), ..scenario.solver };
    let trace = solve(&s0, &sigma2, table, &config, Some(&truth))?;
    let monotone = trace.records.windows(2).all(|w| w[1].theta.total <= w[0].theta.total);
    // Every recorded objective is finite only for nonnegative iterates.
    let feasible = trace.spectrum.is_nonnegative() && trace.records.iter().all(|r| r.theta.sparsity.is_finite());
    let residual = fixed_point_residual(&trace.spectrum, &sigma2, table, &config, config.t0)?;
    let converged = trace.termination == Termination::Converged;
    let check = CheckResult {
        name: "solver contract",
        passed: monotone && feasible && converged && residual < 1e-3,
        measured: residual,
        threshold: 1e-3,
        detail: format!(
            "{} after {} iterations, monotone {monotone}, feasible {feasible}",
            trace.termination.as_str(),
            trace.iterations()
        ),
    };
    Ok(SolverContract { monotone, feasible, termination: trace.termination, iterations: trace.iterations(), residual, check })
}

/// Runs the suite on `scenario`. `quick` skips the two slow checks: the
/// solver run to convergence and the brute-force oracle comparison.
pub fn run_suite(scenario: &Scenario, quick: bool) -> Result<Vec<CheckResult>> {
    let params = &scenario.params;
    let seed = scenario.config.experiments.seed;
    let mut out = vec![
        gradient_check(params, 50, seed, false)?,
        quadratic_identity(params, 5, seed)?,
        gamma_symmetry(params, 100, seed)?,
        prox_properties(200, seed)?,
        hs_consistency(scenario)?,
        frequency_integral(scenario)?,
    ];
    if !quick {
        let table = scenario.table()?;
        out.push(solver_contract(scenario, &table, 200_000)?.check);
        out.push(oracle_equivalence(scenario, &OracleSchedule::default())?.check);
    }
    Ok(out)
}
