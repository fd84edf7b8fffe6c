pub mod arith;
pub mod curves;
pub mod error;
pub mod family;
pub mod localred;
pub mod padic;
pub mod quadring;
pub mod solvability;
pub mod ternary;
pub mod threedescent;
pub mod twodescent;

pub use error::{Error, Result};
