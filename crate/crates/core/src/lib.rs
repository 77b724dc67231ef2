//! Confinement-model Raman analysis for semiconductor nanowires.
//!
//! This crate provides:
//!
//! - **Spectrum handling** ([`spectrum`], [`io`]): two-column text spectra
//!   with JSON metadata sidecars, linear baseline removal, cropping, and
//!   peak normalization.
//! - **Forward lineshape model** ([`rcf`]): the phonon-confinement zone
//!   integral that turns a wire diameter (or a diameter distribution) into
//!   a down-shifted, broadened, asymmetric Raman lineshape.
//! - **Feature extraction** ([`features`]): peak position, FWHM, asymmetry
//!   and amplitude, plus first-order feature-versus-power fits whose
//!   intercept estimates the heating-free spectrum.
//! - **Diameter inversion** ([`diameter`]): least-squares fits of measured
//!   spectra to the forward model, recovering a single diameter, a uniform
//!   diameter interval, or nonnegative weights on a diameter grid.
//! - **Thermometry** ([`thermal`]): Stokes/anti-Stokes intensity ratios,
//!   Boltzmann temperature estimates, ratio-versus-power slopes, and
//!   bulk-relative thermal conductivity.
//!
//! All operations are pure functions over immutable inputs and use fixed,
//! deterministic numerics (Gauss-Legendre quadrature with a configured node
//! count, fixed search schedules), so identical inputs always produce
//! identical outputs.

// Validations are written as !(x > 0.0) on purpose: the negated form also
// rejects NaN, which x <= 0.0 would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diameter;
pub mod error;
pub mod features;
pub mod io;
pub mod numeric;
pub mod rcf;
pub mod spectrum;
pub mod thermal;

pub use diameter::{
    fit_grid_distribution, fit_interval_distribution, fit_single_diameter, DiameterDistribution,
    FitReport,
};
pub use error::{Error, Result};
pub use features::{extract_features, fit_feature_vs_power, LineFit, PeakFeatures, PowerSeries};
pub use io::{load_meta, load_spectrum, parse_spectrum, save_meta, save_spectrum};
pub use rcf::{
    calibrate_c, confinement_weight, dispersion_omega, rcf_intensity, simulate_spectrum,
    DiameterSpec, Geometry, ModelSpectrumRequest, RcfParams,
};
pub use spectrum::{MeasurementMeta, Spectrum};
pub use thermal::{
    boltzmann_ratio, default_absorption_table, equivalent_absorbed_power, fit_ratio_slope,
    relative_kappa, stokes_antistokes_ratio, temperature_from_ratio, AbsorptionTable,
    KappaEstimate, StokesPair, TemperatureConvention,
};
