pub mod algorithms;
pub mod bench;
pub mod error;
pub mod linalg;
pub mod random;
pub mod theory;

pub use error::{Error, Result};
