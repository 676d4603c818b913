//! Wave-packet dynamics, output formats and the command-line front end for
//! quasi-Landau level simulations. The numerical core is re-exported as
//! [`core`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub use quasi_landau_core as core;

pub mod cli;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod output;
pub mod spectral;

pub use error::{Result, SimError};
