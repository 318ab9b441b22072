//! Variationally accelerated series for pi, Catalan's constant, the Riemann
//! zeta function and a generalized Hurwitz zeta function, with a
//! minimal-sensitivity optimizer for the free parameter `lambda`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod error;
pub mod hurwitz;
pub mod numerics;
pub mod pms;
pub mod riemann;
pub mod table;

pub use error::{Error, Result};
pub use numerics::{Complex, PrecisionContext, Real};
