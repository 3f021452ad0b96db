pub mod data;
pub mod diagnostics;
pub mod distribution;
pub mod error;
pub mod gibbs;
pub mod par;
pub mod samplers;
pub mod special;

pub use error::{Error, Result};
