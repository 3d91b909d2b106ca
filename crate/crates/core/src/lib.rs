//! Monotone and ENO finite-volume schemes for scalar convex conservation
//! laws, with exact front tracking and Wasserstein-1 error measurement.

// `!(x > 0.0)` style guards deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod duality;
pub mod eno;
pub mod error;
pub mod flux;
pub mod front;
pub mod grid;
pub mod metrics;
mod quadrature;
pub mod shock;
pub mod solver;
pub mod step;
pub mod study;

pub use error::{Error, Result};
pub use flux::{ConvexFlux, NumericalFlux, Scheme};
pub use grid::{project, Grid, GridFunction};
pub use metrics::{dlip_norm, l1_distance, w1, w1_discrete};
pub use solver::{Order, SchemeConfig};
pub use step::StepFunction;
pub use study::{ErrorTable, OutputFormat, RunConfig};
