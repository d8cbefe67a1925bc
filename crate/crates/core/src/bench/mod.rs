//! Random problem ensembles and the recovery experiments run on them.

mod ensemble;
mod presets;
mod report;
mod sweep;

pub use ensemble::*;
pub use presets::*;
pub use report::*;
pub use sweep::*;
