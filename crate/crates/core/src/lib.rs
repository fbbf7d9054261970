pub mod action;
pub mod error;
pub mod fixtures;
pub mod formats;
pub mod holomorph;
pub mod orbit;
pub mod platform;
pub mod protocol;
pub mod quantum;

pub use error::{Error, Result};
pub use holomorph::{HolomorphPoint, Pair};
