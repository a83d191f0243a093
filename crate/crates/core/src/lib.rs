pub mod bounds;
pub mod circuitham;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod par;
pub mod report;
pub mod stoquastic;
pub mod walks;

pub use error::{Error, Result};
