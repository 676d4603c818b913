//! Physical parameters, constants and the order-of-magnitude gap estimates.
//!
//! Values are SI unless a constructor says otherwise. The numerical
//! modules work in oscillator units (`ħ = m = ω_c = 1`); [`UnitScale`]
//! carries the conversion back to SI.

use crate::error::{Error, Result};
use alloc::format;

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant (J/K), exact.
pub const K_B: f64 = 1.380_649e-23;
/// Electron volt (J), exact.
pub const EV: f64 = 1.602_176_634e-19;
/// Vacuum permittivity (F/m), CODATA 2018.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Unified atomic mass unit (kg), CODATA 2018.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Mass of a ⁴⁰K atom (kg).
pub const MASS_K40: f64 = 39.963_998_166 * ATOMIC_MASS_UNIT;

/// Physical parameters of the atom and the field.
///
/// The spin-orbit strength `β = α γ ħ` is derived on demand; it is only
/// stored when a scenario sets it directly (`beta_override`), as for a
/// laser-engineered `β y² kₓ σ_z` coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysParams {
    /// Atomic mass (kg).
    pub mass: f64,
    /// Coupling constant α (m²·s⁻¹·V⁻¹).
    pub alpha: f64,
    /// Field curvature γ (V·m⁻³).
    pub gamma: f64,
    pub hbar: f64,
    pub k_b: f64,
    /// Joules per electron volt.
    pub ev: f64,
    /// Direct spin-orbit strength β (kg·m·s⁻²), replacing `α γ ħ` when set.
    pub beta_override: Option<f64>,
}

impl PhysParams {
    /// SI parameters with CODATA constants.
    pub fn si(mass: f64, alpha: f64, gamma: f64) -> Self {
        PhysParams {
            mass,
            alpha,
            gamma,
            hbar: HBAR,
            k_b: K_B,
            ev: EV,
            beta_override: None,
        }
    }

    /// `ħ = m = k_B = 1` with `α = γ = 1`.
    pub fn natural() -> Self {
        PhysParams {
            mass: 1.0,
            alpha: 1.0,
            gamma: 1.0,
            hbar: 1.0,
            k_b: 1.0,
            ev: 1.0,
            beta_override: None,
        }
    }

    /// Natural units in which `ω_c(kx) = 1`, so lengths are oscillator
    /// lengths of the `(kx, +1)` sector and energies are in `ħ ω_c`.
    pub fn oscillator_units(kx: f64) -> Self {
        PhysParams {
            alpha: 1.0 / (2.0 * kx),
            ..Self::natural()
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta_override = Some(beta);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("mass", self.mass), ("hbar", self.hbar), ("k_b", self.k_b), ("ev", self.ev)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::argument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let non_negative = [
            ("alpha", self.alpha),
            ("gamma", self.gamma),
            ("beta_soc", self.beta_override.unwrap_or(0.0)),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::argument(format!("{name} must be non-negative and finite, got {v}")));
            }
        }
        Ok(())
    }

    /// The spin-orbit strength in effect: the override if present, else `α γ ħ`.
    pub fn coupling_beta(&self) -> f64 {
        self.beta_override.unwrap_or_else(|| derived_beta(self))
    }

    /// Coefficient of `y² pₓ σ_z` in the reduced Hamiltonian (`β / ħ`, i.e. `α γ`).
    pub fn coupling_coefficient(&self) -> f64 {
        self.coupling_beta() / self.hbar
    }

    /// `ω_c` for `|kx|`, without the sign check of [`cyclotron_frequency`].
    pub(crate) fn omega_for_magnitude(&self, kx_abs: f64) -> f64 {
        libm::sqrt(2.0 * self.coupling_beta() * kx_abs / self.mass)
    }

    /// Free kinetic energy `ħ² kx² / 2m`.
    pub fn kinetic_energy(&self, kx: f64) -> f64 {
        self.hbar * self.hbar * kx * kx / (2.0 * self.mass)
    }
}

/// `β = α γ ħ`, the strength of the equivalent `β y² kₓ σ_z` coupling.
pub fn derived_beta(params: &PhysParams) -> f64 {
    params.alpha * params.gamma * params.hbar
}

/// Oscillator frequency `ω_c = sqrt(2 β kx / m)` of the confined branch.
pub fn cyclotron_frequency(params: &PhysParams, kx: f64) -> Result<f64> {
    if !(kx > 0.0) {
        return Err(Error::domain(format!(
            "unconfined sector has no real oscillator frequency (kx = {kx})"
        )));
    }
    let omega = params.omega_for_magnitude(kx);
    if omega <= 0.0 {
        return Err(Error::domain("zero spin-orbit coupling gives no oscillator frequency"));
    }
    Ok(omega)
}

/// Gap estimate at a given longitudinal velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateReport {
    pub omega_c: f64,
    pub gap_j: f64,
    pub gap_ev: f64,
    pub temperature_k: f64,
    /// Spin-orbit strength used (kg·m·s⁻²).
    pub beta: f64,
    pub vx: f64,
    pub params_echo: PhysParams,
}

/// Level spacing `ħ ω_c` at velocity `vx`, in joules, eV and kelvin.
///
/// With `β` from `beta_override` (or the params' own override) the
/// frequency is `sqrt(2 β vx / ħ)`; otherwise `sqrt(2 α γ vx)`.
pub fn estimate_gap(params: &PhysParams, vx: f64, beta_override: Option<f64>) -> Result<EstimateReport> {
    if !(vx > 0.0) {
        return Err(Error::domain(format!("velocity must be positive, got vx = {vx}")));
    }
    let omega_c = match beta_override.or(params.beta_override) {
        Some(beta) => libm::sqrt(2.0 * beta * vx / params.hbar),
        None => libm::sqrt(2.0 * params.alpha * params.gamma * vx),
    };
    let beta = beta_override.unwrap_or_else(|| params.coupling_beta());
    let gap_j = params.hbar * omega_c;
    Ok(EstimateReport {
        omega_c,
        gap_j,
        gap_ev: gap_j / params.ev,
        temperature_k: gap_j / params.k_b,
        beta,
        vx,
        params_echo: *params,
    })
}

/// Oscillator-unit scales for one confined sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitScale {
    /// `ω_c` (s⁻¹).
    pub omega: f64,
    /// Oscillator length `sqrt(ħ / m ω_c)` (m).
    pub length: f64,
    /// `ħ ω_c` (J).
    pub energy: f64,
    /// `1 / ω_c` (s).
    pub time: f64,
}

/// Scales that turn `-ħ²/2m ∂²_y + ½ m ω_c² y²` into `½ (p̃² + ỹ²)`.
pub fn to_natural_units(params: &PhysParams, kx: f64) -> Result<UnitScale> {
    let omega = cyclotron_frequency(params, kx)?;
    Ok(UnitScale {
        omega,
        length: libm::sqrt(params.hbar / (params.mass * omega)),
        energy: params.hbar * omega,
        time: 1.0 / omega,
    })
}
