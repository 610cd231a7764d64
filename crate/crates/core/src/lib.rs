pub mod cli;
pub mod coeffs;
pub mod comparison;
pub mod distributional;
pub mod error;
pub mod jacobi;
pub mod search;
pub mod solver;

pub use error::{Error, Result};
