//! Interpolatory weighted-H2 model reduction for SISO descriptor systems.

pub mod baselines;
pub mod error;
pub mod lti;
pub mod numkit;
pub mod reduce;
pub mod wh2;

pub use error::{Error, Result};
