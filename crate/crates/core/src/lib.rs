pub mod cli;
pub mod coderivatives;
pub mod cones;
pub mod criteria;
pub mod config;
pub mod error;
pub mod expr;
pub mod fixtures;
pub mod linalg;
pub mod normals;
pub mod oracle;
pub mod sampling;
pub mod sets;
pub mod subdiff;

pub use config::ToleranceConfig;
pub use error::{Error, Result};
