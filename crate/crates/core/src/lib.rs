pub mod baselines;
pub mod cli;
pub mod error;
pub mod graph;
pub mod problems;
pub mod prox1d;
pub mod regularizers;
pub mod snake;
pub mod trace;
pub mod walks;

pub use error::{Error, Result};
