//! Norms, operators and traces for temporally weighted fractional
//! Sobolev-Slobodetskii spaces, evaluated on discretized domains.

pub mod error;
pub mod grids;
pub mod interpolation;
pub mod io;
pub mod norms;
pub mod operators;
pub mod oracle;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
