//! Ground-state fidelity, fidelity susceptibility and von Neumann entropy of the
//! extended Harper model on Fibonacci approximants, with the finite-size scaling
//! and phase-diagram tooling built on them.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod config;
pub mod entropy;
pub mod error;
pub mod fidelity;
pub mod model;
pub mod output;
pub mod scaling;
pub mod scan;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use faer::c64;
