//! Probabilistic metric spaces under the strong topology, the Lévy metric on
//! distance distribution functions, summability-matrix densities over ideals
//! of ℕ, and finite-horizon detectors for strong `A^I`-statistical
//! convergence, Cauchyness, limit points and cluster points.
//!
//! ```
//! use pmstat::distfn::StepDistFn;
//!
//! let f = StepDistFn::unit_step(0.3).unwrap();
//! assert_eq!(f.levy_to_eps0(), 0.3);
//! ```

pub mod cli;
pub mod convergence;
pub mod distfn;
pub mod error;
pub mod harness;
pub mod pmspace;
pub mod summability;
pub mod triangle;

pub use error::{Error, Result};
