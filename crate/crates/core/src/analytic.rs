//! Closed-form quasi-Landau spectrum and transverse eigenstates.
//!
//! In a confined sector the transverse problem is a harmonic oscillator with
//! `ω_c(kx)`, so `E_n = ħ ω_c (n + ½) + ħ² kx² / 2m` and `φ_n` is a Hermite
//! function in units of the oscillator length.

use crate::error::{Error, Result};
use crate::hermite::hermite_function;
use crate::units::PhysParams;
use alloc::format;
use alloc::vec::Vec;

/// Spin projection along z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub fn sign(self) -> f64 {
        match self {
            Spin::Up => 1.0,
            Spin::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Spin {
        match self {
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

/// A longitudinal wave number paired with a σ_z eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub kx: f64,
    pub spin: Spin,
}

impl Sector {
    pub fn new(kx: f64, spin: Spin) -> Self {
        Sector { kx, spin }
    }

    /// `(kx, σ_z) → (−kx, −σ_z)`, which leaves the reduced Hamiltonian unchanged.
    pub fn mirrored(self) -> Self {
        Sector { kx: -self.kx, spin: self.spin.flipped() }
    }

    /// `sign(kx)·σ_z`, or 0 at `kx = 0`.
    pub fn potential_sign(self) -> f64 {
        if self.kx == 0.0 {
            0.0
        } else {
            libm::copysign(1.0, self.kx) * self.spin.sign()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confinement {
    /// Transverse potential `+½ m ω_c² y²`.
    Confined,
    /// Transverse potential `−½ m ω_c² y²`; the atom leaves the channel.
    Unconfined,
    /// `kx = 0`: free transverse motion.
    Marginal,
}

pub fn classify_sector(s: Sector) -> Confinement {
    let sign = s.potential_sign();
    if sign > 0.0 {
        Confinement::Confined
    } else if sign < 0.0 {
        Confinement::Unconfined
    } else {
        Confinement::Marginal
    }
}

/// Oscillator frequency of a confined sector; errors otherwise.
pub fn sector_frequency(params: &PhysParams, s: Sector) -> Result<f64> {
    match classify_sector(s) {
        Confinement::Confined => {}
        Confinement::Unconfined => {
            return Err(Error::domain(format!(
                "no discrete spectrum: sector kx = {}, sigma_z = {} is unconfined",
                s.kx,
                s.spin.sign()
            )))
        }
        Confinement::Marginal => {
            return Err(Error::domain("no discrete spectrum: kx = 0 is marginal (free transverse motion)"))
        }
    }
    crate::units::cyclotron_frequency(params, s.kx.abs())
}

/// `E_n = ħ ω_c (n + ½) + ħ² kx² / 2m` for a confined sector.
pub fn dispersion(params: &PhysParams, s: Sector, n: usize) -> Result<f64> {
    let omega = sector_frequency(params, s)?;
    Ok(params.hbar * omega * (n as f64 + 0.5) + params.kinetic_energy(s.kx))
}

/// The lowest `n_max` levels of one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub sector: Sector,
    pub energies: Vec<f64>,
    pub omega_c: f64,
    /// `ħ² kx² / 2m`.
    pub kinetic_offset: f64,
}

impl LevelSet {
    pub fn n_max(&self) -> usize {
        self.energies.len()
    }
}

pub fn level_set(params: &PhysParams, s: Sector, n_max: usize) -> Result<LevelSet> {
    let omega_c = sector_frequency(params, s)?;
    let kinetic_offset = params.kinetic_energy(s.kx);
    let energies = (0..n_max)
        .map(|n| params.hbar * omega_c * (n as f64 + 0.5) + kinetic_offset)
        .collect();
    Ok(LevelSet { sector: s, energies, omega_c, kinetic_offset })
}

/// Required half-extent of a grid, in oscillator lengths, to hold `φ_n`.
pub fn required_extent(n: usize) -> f64 {
    libm::sqrt(2.0 * n as f64 + 1.0) + 4.0
}

/// Real transverse eigenfunction sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenfunctionSample {
    pub grid_y: Vec<f64>,
    /// Amplitudes in m^{-1/2} (or ℓ^{-1/2} in oscillator units).
    pub values: Vec<f64>,
    pub n: usize,
}

impl EigenfunctionSample {
    /// `Σ φ² h` assuming a uniform grid.
    pub fn discrete_norm(&self) -> f64 {
        let h = uniform_spacing(&self.grid_y);
        self.values.iter().map(|v| v * v).sum::<f64>() * h
    }

    /// Number of sign changes of `φ_n`, ignoring samples below `1e-12` of the peak.
    pub fn node_count(&self) -> usize {
        count_sign_changes(&self.values)
    }
}

pub(crate) fn uniform_spacing(grid: &[f64]) -> f64 {
    if grid.len() < 2 {
        return 0.0;
    }
    (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64
}

/// Sign changes in a sampled real function, skipping near-zero samples.
pub fn count_sign_changes(values: &[f64]) -> usize {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * peak;
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            changes += 1;
        }
        last = v;
    }
    changes
}

/// `φ_n(y) = ℓ^{-1/2} ψ_n(y/ℓ)` with `ℓ = sqrt(ħ / m ω_c)`; positive as `y → +∞`.
pub fn eigenfunction(params: &PhysParams, s: Sector, n: usize, grid_y: &[f64]) -> Result<EigenfunctionSample> {
    let omega = sector_frequency(params, s)?;
    let ell = libm::sqrt(params.hbar / (params.mass * omega));
    if grid_y.len() < 2 {
        return Err(Error::argument("eigenfunction grid needs at least two points"));
    }
    let lo = grid_y.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = grid_y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let actual = (-lo).min(hi) / ell;
    let required = required_extent(n);
    if actual < required {
        return Err(Error::GridTooNarrow { required, actual });
    }
    let scale = 1.0 / libm::sqrt(ell);
    let values = grid_y.iter().map(|&y| scale * hermite_function(n, y / ell)).collect();
    Ok(EigenfunctionSample { grid_y: grid_y.to_vec(), values, n })
}

/// Pointwise `|φ_n(y)|²`.
pub fn probability_density(sample: &EigenfunctionSample) -> Vec<f64> {
    sample.values.iter().map(|v| v * v).collect()
}

/// `E_n(kx) / ħω_max` over `kx ∈ (0, k_max]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumScan {
    pub kx_values: Vec<f64>,
    pub k_max: f64,
    pub omega_max: f64,
    /// `bands[n][i] = E_n(kx_i) / ħω_max`.
    pub bands: Vec<Vec<f64>>,
}

pub fn spectrum_scan(params: &PhysParams, k_max: f64, n_bands: usize, n_k: usize) -> Result<SpectrumScan> {
    if !(k_max > 0.0) {
        return Err(Error::argument(format!("k_max must be positive, got {k_max}")));
    }
    if n_k < 2 {
        return Err(Error::argument(format!("need at least 2 kx samples, got {n_k}")));
    }
    let omega_max = crate::units::cyclotron_frequency(params, k_max)?;
    let unit = params.hbar * omega_max;
    // kx_i = k_max·i/n_k, i = 1..=n_k: kx = 0 is excluded.
    let kx_values: Vec<f64> = (1..=n_k).map(|i| k_max * i as f64 / n_k as f64).collect();
    let bands = (0..n_bands)
        .map(|n| {
            kx_values
                .iter()
                .map(|&kx| dispersion(params, Sector::new(kx, Spin::Up), n).map(|e| e / unit))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumScan { kx_values, k_max, omega_max, bands })
}

/// Level spacings at fixed kx and along kx at fixed n.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    pub kx: f64,
    /// `E_{n+1} − E_n` at `kx`, for `n < n_max`.
    pub gaps_at_kx: Vec<f64>,
    /// `kx·2^j` for the kx sweep.
    pub kx_sweep: Vec<f64>,
    /// `E_1 − E_0` at each kx of the sweep.
    pub gaps_along_kx: Vec<f64>,
}

impl GapReport {
    /// Ratio of neighbouring sweep gaps; `sqrt(2)` for a square-root law.
    pub fn sweep_ratios(&self) -> Vec<f64> {
        self.gaps_along_kx.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

const GAP_SWEEP_DOUBLINGS: usize = 6;

/// Contrast with ordinary Landau levels: equal spacings at fixed kx, but the
/// spacing itself grows like `sqrt(kx)`.
pub fn landau_contrast(params: &PhysParams, s: Sector, n_max: usize) -> Result<GapReport> {
    let levels = level_set(params, s, n_max + 1)?;
    let gaps_at_kx = levels.energies.windows(2).map(|w| w[1] - w[0]).collect();
    let mut kx_sweep = Vec::with_capacity(GAP_SWEEP_DOUBLINGS);
    let mut gaps_along_kx = Vec::with_capacity(GAP_SWEEP_DOUBLINGS);
    let mut kx = s.kx;
    for _ in 0..GAP_SWEEP_DOUBLINGS {
        let sector = Sector::new(kx, s.spin);
        gaps_along_kx.push(dispersion(params, sector, 1)? - dispersion(params, sector, 0)?);
        kx_sweep.push(kx);
        kx *= 2.0;
    }
    Ok(GapReport { kx: s.kx, gaps_at_kx, kx_sweep, gaps_along_kx })
}
