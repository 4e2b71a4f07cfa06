//! Exact verification of Nahm-sum identities.

pub mod bailey;
pub mod cartan;
pub mod cli;
pub mod dsl;
pub mod error;
pub mod identities;
pub mod nahm;
pub mod qseries;
pub mod rational;

pub use error::{Error, Result};
