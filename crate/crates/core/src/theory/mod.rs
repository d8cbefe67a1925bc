//! Restricted isometry constants, recovery bounds and numerical checks of
//! the supporting inequalities.

mod bounds;
mod ric;
mod theta;
mod verify;

pub use bounds::*;
pub use ric::*;
pub use theta::*;
pub use verify::*;
