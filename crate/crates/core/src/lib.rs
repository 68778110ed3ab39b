pub mod chern;
pub mod circle;
pub mod cli;
pub mod error;
pub mod fredholm;
pub mod groups;
pub mod linalg;
pub mod schur;
pub mod selftest;
pub mod snumbers;

pub use error::{Error, Result};
