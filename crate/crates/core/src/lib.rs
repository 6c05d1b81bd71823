//! Periodic approximate solutions of difference schemes for polynomial ODEs.

pub mod algebra;
pub mod error;
pub mod groebner;
pub mod models;
mod modular;
pub mod numeric;
pub mod periodicity;
pub mod schemes;
pub mod univar;

pub use error::{Error, Result};
