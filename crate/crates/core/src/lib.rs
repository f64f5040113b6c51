//! Defect (kink) statistics for the transverse-field Ising chain and the
//! long-range Kitaev chain under approximate counterdiabatic driving.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: system specifications, quench protocols, momentum grids and
//!   counterdiabatic (CD) coefficients of Krylov order `n`.
//! * [`dynamics`]: per-mode two-level propagation and probability tables.
//! * [`analytic`]: special functions and closed-form sudden-limit, Kibble-Zurek
//!   and crossover results.
//! * [`statistics`]: cumulants, the exact Poisson-binomial kink distribution
//!   and Gaussian surrogates.
//! * [`kitaev`]: the long-range Kitaev extension.
//! * [`experiments`]: sweeps, fits, breakdown/collapse analysis and the
//!   validation suite.

pub mod analytic;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod kitaev;
pub mod model;
pub mod statistics;

pub use error::{Error, Result};
