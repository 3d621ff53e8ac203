//! Simulation toolkit for confetti percolation: the dead leaves model with
//! square leaves colored black with probability `p` and white otherwise.

pub mod cli;
pub mod coloring;
pub mod connectivity;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod index;
pub mod process;
pub mod rng;
pub mod trials;

pub use error::{Error, Result};
