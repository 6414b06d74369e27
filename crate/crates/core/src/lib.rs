//! Wigner-Yanase skew information as a coherence measure, the Hellinger angle
//! and the speed bound that ties them together under unitary parameter encoding.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod campaign;
pub mod cli;
pub mod coherence;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod qubit_analytic;
pub mod states;

pub use error::{Error, Result};
