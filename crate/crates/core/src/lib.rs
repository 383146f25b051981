pub mod catalog;
pub mod cli;
pub mod cone;
pub mod error;
pub mod io;
pub mod k3n;
pub mod lattice;
pub mod matrix;
pub mod num;

pub use error::{Error, Result};
