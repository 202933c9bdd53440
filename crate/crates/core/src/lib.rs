//! Panel econometrics and epidemic-wave tooling for country-level mask usage
//! and excess mortality data.
//!
//! * [`ingest`] loads and validates the daily, weekly and covariate CSV files.
//! * [`waves`] splits the analysis window into phases and finds each country's
//!   minimal-mass wave per phase.
//! * [`indices`] turns waves into the five mask-usage indices.
//! * [`stats`], [`regress`] supply correlations, bootstrap intervals, signed-rank
//!   tests and OLS with standardized coefficients.
//! * [`analysis`] assembles the cross-country tables and [`plot`] draws the
//!   figures as SVG.
//! * [`twfe`] fits two-way fixed-effects models with lagged outcomes and
//!   [`falsify`] runs them on synthetic panels with known structure.

pub mod analysis;
pub mod calendar;
pub mod demo;
pub mod error;
pub mod falsify;
pub mod indices;
pub mod ingest;
pub mod plot;
pub mod regress;
pub mod stats;
pub mod svg;
pub mod twfe;
pub mod waves;

pub use error::{Error, Result};
