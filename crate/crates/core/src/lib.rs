pub mod arith;
pub mod constants;
pub mod error;
pub mod family;
pub mod heights;
pub mod poly;
pub mod preperiodic;

pub use error::{Error, Result};
