pub mod cli;
pub mod config;
pub mod convergence;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod mc;
pub mod model;
pub mod replication;
mod scheme;
pub mod system;
pub mod u1;

pub use error::{Equation, Error, Result};
pub use grid::{Field1D, Field2D, Grid1D, Grid2D};
pub use model::{ModelParams, Payoff, PayoffTable};
