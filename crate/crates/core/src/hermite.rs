//! Normalized Hermite functions
//! `ψ_n(ξ) = (2ⁿ n! √π)^{-1/2} H_n(ξ) e^{-ξ²/2}`.
//!
//! Evaluated with the normalized three-term recurrence
//! `ψ_{n+1} = sqrt(2/(n+1)) ξ ψ_n − sqrt(n/(n+1)) ψ_{n−1}`, which is the
//! physicists' `H_{n+1} = 2ξH_n − 2nH_{n−1}` with the `2ⁿ n!` factor
//! folded in, so nothing overflows for large `n`.

use alloc::vec::Vec;

const PI_QUARTER_ROOT_INV: f64 = 0.751_125_544_464_942_5; // π^{-1/4}

/// `ψ_n(ξ)`.
pub fn hermite_function(n: usize, xi: f64) -> f64 {
    let mut prev = 0.0;
    let mut cur = PI_QUARTER_ROOT_INV * libm::exp(-0.5 * xi * xi);
    for k in 0..n {
        let kf = k as f64;
        let next = libm::sqrt(2.0 / (kf + 1.0)) * xi * cur - libm::sqrt(kf / (kf + 1.0)) * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `ψ_0(ξ) ..= ψ_n_max(ξ)` in one recurrence pass.
pub fn hermite_functions_upto(n_max: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let mut prev = 0.0;
    let mut cur = PI_QUARTER_ROOT_INV * libm::exp(-0.5 * xi * xi);
    out.push(cur);
    for k in 0..n_max {
        let kf = k as f64;
        let next = libm::sqrt(2.0 / (kf + 1.0)) * xi * cur - libm::sqrt(kf / (kf + 1.0)) * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Physicists' Hermite polynomial `H_n(ξ)`; overflows past n ≈ 150.
pub fn hermite_polynomial(n: usize, xi: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * xi;
    for k in 1..n {
        let next = 2.0 * xi * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}
