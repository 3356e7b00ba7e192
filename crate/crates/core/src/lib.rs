//! Noise spectral density of a weak-force sensor: an optomechanical cavity
//! with an intracavity parametric amplifier and two series-coupled
//! mechanical oscillators.
//!
//! The usual entry point is [`Model::new`], which validates SI parameters,
//! rescales them to internal units (`omega_m1 = 1`) and solves the mean
//! field. Spectra are then evaluated with [`spectrum::noise_psd`] and
//! checked against [`spectrum::psd_oracle`] and
//! [`normal_modes::appendix_psd`].

pub mod config;
pub mod dynamics;
pub mod error;
pub mod model;
pub mod normal_modes;
pub mod params;
pub mod presets;
pub mod spectrum;
pub mod steady;
pub mod sweep;

pub use error::{Error, ParamError, Result};
pub use model::{Model, ModelOptions};
pub use params::SystemParams;
pub use spectrum::{noise_psd, psd_oracle, SpectrumPoint, ThermalConvention};
