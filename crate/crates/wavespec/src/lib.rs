//! File formats, experiment drivers and the command-line front end for
//! [`wavespec_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod perturb;
pub mod validate;

pub use error::{Error, Result};
pub use wavespec_core as core;
