//! Exact invariants of a configuration of points carrying a panel of functions.

pub mod configmodel;
pub mod equations;
pub mod error;
pub mod exactlin;
pub mod partition;
pub mod poly;
pub mod filtration;
pub mod fibre;
pub mod liealg;
pub mod nilorbit;
pub mod springerchar;
pub mod generate;
pub mod instance;
mod modp;

pub use error::Error;
