//! Quasi-Landau levels of two-dimensional spin-1/2 neutral atoms in a
//! quadratic electric field `E = γ y² ŷ`.
//!
//! The coupling `α (σ × p)·E` reduces to `α γ y² pₓ σ_z`, so each
//! `(kₓ, σ_z)` sector is a one-dimensional oscillator (or inverted
//! oscillator) in `y` with `ω_c² = 2 α γ ħ kₓ / m`. This crate holds the
//! closed-form spectrum together with the finite-difference operators and
//! tridiagonal eigensolvers used to check it, plus the thermally smeared
//! spectral density.
//!
//! Everything here is `no_std` (with `alloc`). FFT-based propagation, file
//! formats and the command-line front end live in the `quasi-landau` crate.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod eigensolve;
pub mod error;
pub mod fields;
pub mod hermite;
pub mod quadrature;
pub mod thermal;
pub mod units;

pub use error::{Error, Result};
pub use units::PhysParams;
