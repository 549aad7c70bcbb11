pub mod cli;
pub mod error;
pub mod fem;
pub mod geometry;
pub mod linalg;
pub mod solver;
pub mod validation;

pub use error::{Error, Result};

#[cfg(test)]
pub(crate) mod testutil;
