pub mod cli;
pub mod dyadic;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod kernels;
pub mod means;
pub mod report;
pub mod walsh;
pub mod weights;

pub use error::{Error, Result};
