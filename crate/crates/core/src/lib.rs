pub mod distance;
pub mod error;
pub mod measures;
pub mod ot;
pub mod quadrature;
pub mod simulation;
pub mod wavelet;
pub mod wlot;

pub use error::{Error, Result};
