pub mod base;
pub mod contact;
pub mod error;
pub mod models;
pub mod nullity;
pub mod para;
pub mod report;
pub mod sampling;
pub mod tensor;

pub use error::{Error, Result};
