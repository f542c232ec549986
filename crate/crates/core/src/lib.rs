//! Stationary flow and linear stability of a heated, electrically conducting
//! polymeric fluid between parallel electrode plates.

pub mod asymptotics;
pub mod baseflow;
pub mod config;
pub mod error;
pub mod lincoeff;
pub mod numerics;
pub mod oracle;

pub use asymptotics::{
    asymptotic_eigenvalues, dispersion_residual, phase_integral, stability_margin, EigenFamily,
    SignConvention, StabilityReport,
};
pub use baseflow::{base_flow_residuals, solve_base_flow, BaseFlow};
pub use config::{Grid, ModelParams};
pub use error::{Error, Result};
pub use lincoeff::{build_coefficients, d_diagonals, LinearCoefficients};
