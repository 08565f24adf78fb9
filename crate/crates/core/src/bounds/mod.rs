//! Numerical verification of the distortion inequalities.
//!
//! Every inequality is evaluated as a [`BoundCheck`]. Where both sides share
//! a leading term that is known in closed form, the margin is computed after
//! cancelling it analytically, so that sharp bounds are decided in binary64
//! far beyond the point where the two sides agree to all printed digits.

mod check;
mod constants;
mod families;
mod grid;
mod monotone;
mod report;

pub use check::{BoundCheck, CheckDomain, Inequality, Point, Side, LIMIT_TOLERANCE, STRICT_RELATIVE_TOLERANCE};
pub use constants::{ConstantEntry, Constants};
pub use families::{
    eta_linear_exp_bounds, eta_power_bounds, eta_sandwich, lambda_exp_bounds, lambda_linear_bounds, lambda_sandwich, lambda_taylor_bounds,
    log_convexity_check, PointData,
};
pub use grid::{verify_grid, verify_grid_with, Execution, Family, GridSpec, MonotoneSampling};
pub use monotone::{eta_versus_k, lambda_versus_k, power_versus_k};
pub use report::{FamilySummary, Skip, Summary, Tightest, VerifyReport};
