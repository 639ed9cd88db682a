//! Rearrangement-invariant function spaces over step functions on `[0, 1)` or
//! `[0, ∞)`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod cli;
pub mod deciders;
pub mod error;
pub mod harness;
pub mod io;
pub mod norms;
pub mod num;
pub mod orlicz;
pub mod rearrange;
pub mod step;
pub mod weight;

pub use error::{Error, Result};
pub use step::{Alpha, Piece, StepFunction};
