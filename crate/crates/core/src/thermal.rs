//! Thermally smeared quasi-Landau spectrum.
//!
//! Atoms in the ring trap carry `kx > 0` with the Boltzmann weight
//! `exp(−β_th ħ² kx² / 2m)`; the transverse momentum integrates out because
//! the levels are already quantized in `y`. Each level `E_n(kx)` is then
//! broadened by a Gaussian kernel of width `σ_E` and binned.
//!
//! Every level gets equal weight before the kx average: level occupations are
//! not modelled.
//!
//! Integrals over kx are done in `u = sqrt(kx)`, where `E_n(kx)` is smooth
//! down to `kx = 0`.

use crate::analytic::{dispersion, Sector, Spin};
use crate::error::{Error, Result};
use crate::quadrature::CompositeRule;
use crate::units::PhysParams;
use alloc::format;
use alloc::vec::Vec;

/// Gauss–Legendre points per panel.
const RULE_ORDER: usize = 10;
const INITIAL_PANELS: usize = 4;
const MAX_PANELS: usize = 1 << 14;
/// Relative drift of the partition function at which panel doubling stops.
const WEIGHT_DRIFT_TOL: f64 = 1e-9;
/// `ln(1e13)`: the weight at the default cutoff is 1e-13 of the peak.
const CUTOFF_LOG_RATIO: f64 = 29.933_606_208_922_594;
/// Kernel tails beyond this many σ are dropped (mass < 1e-18).
const KERNEL_REACH: f64 = 9.0;
/// Default bins extend this many σ beyond the sampled energies.
const RANGE_MARGIN: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ThermalEnsemble {
    pub temperature: f64,
    /// `1 / k_B T` (J⁻¹).
    pub beta_th: f64,
    /// kx domain `(k_lo, k_hi]`.
    pub kx_domain: (f64, f64),
    pub n_kx_samples: usize,
    panels: usize,
    /// `β_th ħ² / 2m`.
    exponent: f64,
    partition: f64,
}

impl ThermalEnsemble {
    /// The positive half-line `(0, k_cut]`, with `k_cut` where the weight
    /// has dropped to 1e-13 of its peak.
    pub fn new(params: &PhysParams, temperature: f64) -> Result<Self> {
        let exponent = Self::exponent_for(params, temperature)?;
        let k_cut = libm::sqrt(CUTOFF_LOG_RATIO / exponent);
        Self::build(temperature, params, exponent, (0.0, k_cut))
    }

    /// Restrict kx to `(k_lo, k_hi]`, e.g. to pin the ensemble near one wave number.
    pub fn with_domain(params: &PhysParams, temperature: f64, k_lo: f64, k_hi: f64) -> Result<Self> {
        let exponent = Self::exponent_for(params, temperature)?;
        if !(k_lo >= 0.0 && k_hi > k_lo) {
            return Err(Error::argument(format!("invalid kx domain ({k_lo}, {k_hi}]")));
        }
        Self::build(temperature, params, exponent, (k_lo, k_hi))
    }

    fn exponent_for(params: &PhysParams, temperature: f64) -> Result<f64> {
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::argument(format!("temperature must be positive, got {temperature}")));
        }
        let beta_th = 1.0 / (params.k_b * temperature);
        Ok(beta_th * params.hbar * params.hbar / (2.0 * params.mass))
    }

    fn build(temperature: f64, params: &PhysParams, exponent: f64, domain: (f64, f64)) -> Result<Self> {
        let mut ens = ThermalEnsemble {
            temperature,
            beta_th: 1.0 / (params.k_b * temperature),
            kx_domain: domain,
            n_kx_samples: 0,
            panels: INITIAL_PANELS,
            exponent,
            partition: 0.0,
        };
        let mut z = ens.raw_partition(ens.panels);
        loop {
            if ens.panels >= MAX_PANELS {
                return Err(Error::argument("thermal quadrature did not converge"));
            }
            let z2 = ens.raw_partition(2 * ens.panels);
            ens.panels *= 2;
            let drift = ((z2 - z) / z2).abs();
            z = z2;
            if drift < WEIGHT_DRIFT_TOL {
                break;
            }
        }
        ens.partition = z;
        ens.n_kx_samples = ens.panels * RULE_ORDER;
        Ok(ens)
    }

    fn rule(&self, panels: usize) -> CompositeRule {
        let (lo, hi) = self.kx_domain;
        CompositeRule::new(libm::sqrt(lo), libm::sqrt(hi), panels, RULE_ORDER)
    }

    /// Boltzmann factor relative to the lower edge of the domain, so a
    /// narrow domain far out in the tail does not underflow.
    fn boltzmann(&self, kx: f64) -> f64 {
        let k_lo = self.kx_domain.0;
        libm::exp(-self.exponent * (kx * kx - k_lo * k_lo))
    }

    fn raw_partition(&self, panels: usize) -> f64 {
        self.rule(panels).integrate(|u| 2.0 * u * self.boltzmann(u * u))
    }

    /// Quadrature nodes in kx with normalized weights (summing to 1).
    pub fn samples(&self) -> Vec<(f64, f64)> {
        self.samples_with(self.panels)
    }

    fn samples_with(&self, panels: usize) -> Vec<(f64, f64)> {
        let rule = self.rule(panels);
        let z = self.raw_partition(panels);
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&u, &w)| (u * u, w * 2.0 * u * self.boltzmann(u * u) / z))
            .collect()
    }

    /// `sqrt(⟨kx²⟩)`.
    pub fn kx_rms(&self) -> f64 {
        libm::sqrt(self.samples().iter().map(|(k, w)| w * k * k).sum())
    }
}

/// Normalized kx marginal `w(kx) = exp(−β_th ħ² kx² / 2m) / Z` on the ensemble's domain.
pub fn momentum_weight(ens: &ThermalEnsemble, kx: f64) -> Result<f64> {
    let (lo, hi) = ens.kx_domain;
    if !(kx > 0.0) {
        return Err(Error::domain(format!("kx must be positive on the ring-trap branch, got {kx}")));
    }
    if !(kx > lo && kx <= hi) {
        return Err(Error::domain(format!("kx = {kx} outside the ensemble domain ({lo}, {hi}]")));
    }
    Ok(ens.boltzmann(kx) / ens.partition)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    /// Bin centres (J).
    pub energy_bins: Vec<f64>,
    pub bin_width: f64,
    /// Probability per bin; sums to 1.
    pub weights: Vec<f64>,
    pub broadening_sigma: f64,
    pub n_levels: usize,
    /// `sqrt(⟨kx²⟩)` of the ensemble.
    pub kx_rms: f64,
    /// `ħ ω_c` at `kx_rms`.
    pub hbar_omega_ref: f64,
}

impl SpectralDensity {
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Weight per unit energy.
    pub fn density(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.bin_width).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearingOptions {
    pub n_levels: usize,
    pub bins: usize,
    /// Gaussian kernel width (J).
    pub sigma_e: f64,
    /// Explicit bin range; must cover `[0, E_max + 5σ]`.
    pub energy_range: Option<(f64, f64)>,
}

/// `D(E) = (1/N) Σ_n ∫ dkx w(kx) G_σ(E − E_n(kx))`, integrated over each bin.
pub fn smeared_spectrum(ens: &ThermalEnsemble, params: &PhysParams, opts: &SmearingOptions) -> Result<SpectralDensity> {
    let SmearingOptions { n_levels, bins, sigma_e, energy_range } = *opts;
    if !(sigma_e > 0.0) {
        return Err(Error::argument(format!("sigma_E must be positive, got {sigma_e}")));
    }
    if bins < 64 {
        return Err(Error::argument(format!("need at least 64 bins, got {bins}")));
    }
    if n_levels == 0 {
        return Err(Error::argument("need at least one level"));
    }

    // Refine until neighbouring nodes of the top level are within σ/2 in energy.
    let top = n_levels - 1;
    let mut panels = ens.panels;
    let (samples, energies) = loop {
        let samples = ens.samples_with(panels);
        let energies = level_energies(params, &samples, n_levels)?;
        let max_step = energies[top].windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
        if max_step <= 0.5 * sigma_e || panels >= MAX_PANELS {
            break (samples, energies);
        }
        panels *= 2;
    };

    let e_max = energies.iter().flatten().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e_min = energies.iter().flatten().cloned().fold(f64::INFINITY, f64::min);
    let (lo, hi) = match energy_range {
        Some((lo, hi)) => {
            if !(lo <= 0.0 && hi >= e_max + 5.0 * sigma_e) {
                return Err(Error::argument(format!(
                    "bin range [{lo}, {hi}] must cover [0, {}]",
                    e_max + 5.0 * sigma_e
                )));
            }
            (lo, hi)
        }
        None => ((e_min - RANGE_MARGIN * sigma_e).min(0.0), e_max + RANGE_MARGIN * sigma_e),
    };
    let bin_width = (hi - lo) / bins as f64;
    let mut weights = alloc::vec![0.0; bins];
    let inv = 1.0 / (core::f64::consts::SQRT_2 * sigma_e);
    let level_share = 1.0 / n_levels as f64;
    for level in &energies {
        for (&e, &(_, w)) in level.iter().zip(&samples) {
            let first = libm::floor((e - KERNEL_REACH * sigma_e - lo) / bin_width).max(0.0) as usize;
            let last = (libm::ceil((e + KERNEL_REACH * sigma_e - lo) / bin_width) as usize).min(bins);
            let mut cdf_left = libm::erf((lo + first as f64 * bin_width - e) * inv);
            for (b, slot) in weights.iter_mut().enumerate().take(last).skip(first) {
                let cdf_right = libm::erf((lo + (b + 1) as f64 * bin_width - e) * inv);
                *slot += level_share * w * 0.5 * (cdf_right - cdf_left);
                cdf_left = cdf_right;
            }
        }
    }

    let kx_rms = libm::sqrt(samples.iter().map(|(k, w)| w * k * k).sum());
    let hbar_omega_ref = params.hbar * params.omega_for_magnitude(kx_rms);
    let energy_bins = (0..bins).map(|b| lo + (b as f64 + 0.5) * bin_width).collect();
    Ok(SpectralDensity {
        energy_bins,
        bin_width,
        weights,
        broadening_sigma: sigma_e,
        n_levels,
        kx_rms,
        hbar_omega_ref,
    })
}

fn level_energies(params: &PhysParams, samples: &[(f64, f64)], n_levels: usize) -> Result<Vec<Vec<f64>>> {
    (0..n_levels)
        .map(|n| {
            samples
                .iter()
                .map(|&(k, _)| dispersion(params, Sector::new(k, Spin::Up), n))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Bins that are local maxima over ±2 neighbours and above 1e-3 of the global peak.
pub fn find_peaks(d: &SpectralDensity) -> Vec<usize> {
    let w = &d.weights;
    let peak = w.iter().cloned().fold(0.0, f64::max);
    let n = w.len();
    (0..n)
        .filter(|&i| {
            w[i] > 1e-3 * peak
                && (i.saturating_sub(2)..(i + 3).min(n)).all(|j| j == i || (j < i && w[j] < w[i]) || (j > i && w[j] <= w[i]))
        })
        .collect()
}

/// `(max − min)/(max + min)` of the density between the two lowest peaks;
/// 0 when fewer than two peaks are found.
pub fn gap_visibility(d: &SpectralDensity) -> f64 {
    let peaks = find_peaks(d);
    if peaks.len() < 2 {
        return 0.0;
    }
    let window = &d.weights[peaks[0]..=peaks[1]];
    let max = window.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = window.iter().cloned().fold(f64::INFINITY, f64::min);
    if max + min <= 0.0 {
        return 0.0;
    }
    (max - min) / (max + min)
}
