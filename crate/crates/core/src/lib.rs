//! Reconstruction of the directional ocean wave spectrum from second-order
//! HF radar Doppler spectra.
//!
//! The forward relation maps a wavenumber spectrum `S(p, q)` to the
//! second-order Doppler continuum `σ₂(ω)` through a line integral over the
//! level sets of the Bragg frequency function. After discretization the
//! operator is an explicit quadratic form in the grid values of `S`
//! ([`QuadratureTable`]); reconstruction minimizes a Tikhonov functional with
//! a nonnegative sparsity penalty by proximal gradient descent ([`solve`]).
//!
//! The crate is `no_std` (with `alloc`). Enable `parallel` for rayon-backed
//! table assembly and evaluation.

#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

mod error;

pub mod contour;
pub mod doppler;
pub mod forward;
pub mod grid;
pub mod objective;
pub mod physics;
pub mod sea;
pub mod solver;
pub mod spline;

pub use num_complex;

pub use doppler::{DopplerSpectrum, FrequencyDomain};
pub use error::Error;
pub use forward::{assemble_table, forward, forward_mollified_oracle, OracleMesh, QuadratureTable};
pub use grid::{GridGeometry, SpectrumGrid};
pub use objective::{grad_f, phi, prox, theta, ObjectiveBreakdown, ObjectiveParams};
pub use physics::{GammaEVariant, RadarParams, SignPair};
pub use sea::{FreqConvention, SeaStateParams};
pub use solver::{fixed_point_residual, solve, SolveTrace, SolverConfig, Termination, Tolerance};

pub type Result<T> = core::result::Result<T, Error>;
