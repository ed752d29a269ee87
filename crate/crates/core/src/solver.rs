//! Proximal gradient descent with backtracking on the regularized objective.

use alloc::vec::Vec;


#[allow(unused_imports)]
use num_traits::Float;

use crate::doppler::DopplerSpectrum;
use crate::forward::QuadratureTable;
use crate::grid::SpectrumGrid;
use crate::objective::{self, ObjectiveBreakdown, ObjectiveParams};
use crate::sea::significant_wave_height;
use crate::{Error, Result};

/// Stopping threshold on `|Θ(S_{n+1}) − Θ(S_n)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    /// Multiple of `Θ(S_0)`.
    RelativeToInitial(f64),
}

impl Tolerance {
    fn resolve(self, theta0: f64) -> f64 {
        match self {
            Tolerance::Absolute(v) => v,
            Tolerance::RelativeToInitial(r) => r * theta0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub objective: ObjectiveParams,
    /// Initial step size `t`.
    pub t0: f64,
    /// Backtracking shrink factor `μ ∈ (0, 1)`.
    pub mu: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
    pub tol_theta: Tolerance,
    /// Restart every iteration from `t0` instead of carrying the last step.
    pub reset_step_each_iter: bool,
}

impl SolverConfig {
    pub fn new(objective: ObjectiveParams) -> Self {
        SolverConfig {
            objective,
            t0: 1.0,
            mu: 0.5,
            max_iter: 20,
            max_backtracks: 40,
            tol_theta: Tolerance::RelativeToInitial(1e-10),
            reset_step_each_iter: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.objective.validate()?;
        if !(self.t0 > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidParameter("t0 must be positive"));
        }
        if !(self.mu > 0.0 && self.mu < 1.0) {
            return Err(Error::InvalidParameter("mu must lie in (0, 1)"));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// `|ΔΘ|` fell below the tolerance.
    Converged,
    MaxIterations,
    /// Backtracking budget exhausted without descent.
    Stalled,
}

impl Termination {
    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
            Termination::Stalled => "stalled",
        }
    }
}

/// State after one accepted iteration (iteration 0 is the initial guess).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub theta: ObjectiveBreakdown,
    pub step: f64,
    pub backtracks: usize,
    pub rel_err_pct: Option<f64>,
    pub hs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveTrace {
    pub records: Vec<IterationRecord>,
    pub spectrum: SpectrumGrid,
    pub termination: Termination,
    /// Step size of the last accepted update (`t0` if none was accepted).
    pub final_step: f64,
}

impl SolveTrace {
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("trace always holds the initial record")
    }
}

fn prox_step(s: &SpectrumGrid, grad: &SpectrumGrid, t: f64, alpha: f64) -> SpectrumGrid {
    let values = s
        .values()
        .iter()
        .zip(grad.values())
        .map(|(v, g)| (v - t * g - t * alpha).max(0.0))
        .collect();
    SpectrumGrid::from_values(*s.geometry(), values).expect("prox of finite values is finite")
}

fn record(
    iter: usize,
    s: &SpectrumGrid,
    theta: ObjectiveBreakdown,
    step: f64,
    backtracks: usize,
    truth: Option<&SpectrumGrid>,
) -> Result<IterationRecord> {
    let rel_err_pct = truth.map(|t| s.rel_l2_error(t)).transpose()?;
    Ok(IterationRecord { iter, theta, step, backtracks, rel_err_pct, hs: significant_wave_height(s)? })
}

/// Runs proximal gradient descent from `s0`.
///
/// Each iteration forms `S_{n+1} = P_{tα}(S_n − t∇F(S_n))` and shrinks
/// `t ← μt` until `Θ(S_{n+1}) ≤ Θ(S_n)`. Stops when `|ΔΘ|` drops below the
/// tolerance, after `max_iter` iterations, or when backtracking stalls.
pub fn solve(
    s0: &SpectrumGrid,
    sigma2: &DopplerSpectrum,
    table: &QuadratureTable,
    config: &SolverConfig,
    truth: Option<&SpectrumGrid>,
) -> Result<SolveTrace> {
    config.validate()?;
    if !s0.is_nonnegative() {
        return Err(Error::Infeasible);
    }
    if let Some(t) = truth {
        s0.check_same_geometry(t)?;
    }
    let obj = &config.objective;
    let mut s = s0.clone();
    let mut theta = objective::theta(&s, sigma2, table, obj)?;
    let tol = config.tol_theta.resolve(theta.total);
    let mut records = Vec::with_capacity(config.max_iter + 1);
    records.push(record(0, &s, theta, 0.0, 0, truth)?);

    let mut t = config.t0;
    let mut final_step = config.t0;
    let mut termination = Termination::MaxIterations;
    for iter in 1..=config.max_iter {
        if config.reset_step_each_iter {
            t = config.t0;
        }
        let grad = objective::grad_f(&s, sigma2, table, obj)?;
        let mut backtracks = 0;
        let accepted = loop {
            let candidate = prox_step(&s, &grad, t, obj.alpha);
            let cand_theta = objective::theta(&candidate, sigma2, table, obj)?;
            if !cand_theta.total.is_finite() && !theta.total.is_finite() {
                return Err(Error::InvalidParameter("objective is not finite"));
            }
            if cand_theta.total <= theta.total {
                break Some((candidate, cand_theta));
            }
            if backtracks == config.max_backtracks {
                break None;
            }
            t *= config.mu;
            backtracks += 1;
        };
        let Some((next, next_theta)) = accepted else {
            termination = Termination::Stalled;
            break;
        };
        let change = (theta.total - next_theta.total).abs();
        s = next;
        theta = next_theta;
        final_step = t;
        records.push(record(iter, &s, theta, t, backtracks, truth)?);
        if change < tol {
            termination = Termination::Converged;
            break;
        }
    }
    Ok(SolveTrace { records, spectrum: s, termination, final_step })
}

/// Relative distance `‖S − P_{tα}(S − t∇F(S))‖ / ‖S‖` from the prox-gradient
/// fixed point. Falls back to the absolute distance when `‖S‖ = 0`.
pub fn fixed_point_residual(
    s: &SpectrumGrid,
    sigma2: &DopplerSpectrum,
    table: &QuadratureTable,
    config: &SolverConfig,
    t: f64,
) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter("step must be positive"));
    }
    let grad = objective::grad_f(s, sigma2, table, &config.objective)?;
    let image = prox_step(s, &grad, t, config.objective.alpha);
    let diff = SpectrumGrid::from_values(
        *s.geometry(),
        s.values().iter().zip(image.values()).map(|(a, b)| a - b).collect(),
    )?;
    let num = diff.l2_norm_sq().sqrt();
    let den = s.l2_norm_sq().sqrt();
    Ok(if den > 0.0 { num / den } else { num })
}
