pub mod corpus;
pub mod error;
pub mod extension;
pub mod lattice;
pub mod one_dim;
pub mod structure;
pub mod tree;

pub use error::{Error, Result};
