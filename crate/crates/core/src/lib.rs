//! Extremal integrals `∫ c dC` over two-dimensional copulas.
//!
//! Bounds come from dyadic grids, where each level is an assignment problem.
//! Closed-form optima are available for monotone costs and for costs of the
//! form `φ(x + y)`. Optimality can be checked through dual certificates or
//! c-cyclical monotonicity of the support.

pub mod analytic;
pub mod cli;
pub mod copula;
pub mod costfn;
pub mod error;
pub mod format;
pub mod grid;
pub mod lap;
pub mod plot;
pub mod sequences;
pub mod verify;

pub use costfn::{parse_cost, registry_cost, CostFunction};
pub use error::{Error, Result};
pub use grid::{bound, DiscreteCoupling, GridSpec, Mode};
pub use lap::{solve_lap, Assignment, CostMatrix, Sense};
