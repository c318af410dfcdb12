//! Solitons, conserved quantities, potential-well classification and
//! pseudospectral evolution for the derivative nonlinear Schrödinger
//! equation with an added quintic term,
//!
//! ```text
//! i u_t + u_xx + i |u|^2 u_x + b |u|^4 u = 0,   gamma = 1 + 16 b / 3.
//! ```

pub mod classifier;
pub mod closedform;
pub mod error;
pub mod evolve;
pub mod field;
pub mod functionals;
pub mod gauge;
pub mod numerics;
pub mod oracle;
pub mod random;
pub mod solitons;

pub use error::{Error, Result};
pub use field::{Field, Grid};
pub use functionals::Frame;
pub use solitons::{ModelParams, SolitonParams};
