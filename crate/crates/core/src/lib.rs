pub mod error;
pub mod geometry;
pub mod montecarlo;
pub mod oracle;
pub mod profile;
pub mod ranking;
pub mod rules;

pub use error::{Error, Result};
