pub mod error;
pub mod features;
pub mod letor;
pub mod util;

pub use error::{Error, Result};
