pub mod bloch;
pub mod bounds;
pub mod engine;
pub mod error;
pub mod figures;
pub mod optimizer;
pub mod sampler;
pub mod scenario_file;
pub mod scenarios;
pub mod verify;

pub use error::{LgError, Result};
