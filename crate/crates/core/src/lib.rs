pub mod adversary;
pub mod algo1;
pub mod algo2;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod oracle;
pub mod placement;
pub mod protocol;
pub mod sorting;

pub use error::{Error, Result};
