//! Ergodicity analysis of the Markovian single-server retrial queue with a
//! constant retrial rate.
//!
//! The crate classifies the regime of the queue, certifies convergence
//! rates through weighted-l1 logarithmic norms and checks the resulting
//! bounds against a truncated forward-Kolmogorov solver and a Monte Carlo
//! simulator.

mod banded;
pub mod ergodicity;
pub mod error;
pub mod kolmogorov;
pub mod model;
pub mod simulate;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
