//! File formats. CSV headers and column orders are fixed; floats are
//! written in shortest round-trip form so identical runs give identical bytes.
//!
//! Snapshot files (`snapshot_NNNNN.bin`) hold `|ψ₊|²` and `|ψ₋|²` on the
//! evolution grid, little-endian:
//!
//! | offset | type        | content                         |
//! |--------|-------------|---------------------------------|
//! | 0      | `[u8; 8]`   | magic `QLSNAP01`                |
//! | 8      | `u64`       | `nx`                            |
//! | 16     | `u64`       | `ny`                            |
//! | 24     | `f64` × 4   | `lx`, `y_min`, `y_max`, `time`  |
//! | 56     | `f64` × nxny | `|ψ₊|²` at index `j·nx + i`     |
//! | …      | `f64` × nxny | `|ψ₋|²`                        |
//!
//! Lengths and time are in the run's units.

use crate::error::{Result, SimError};
use quasi_landau_core::analytic::{EigenfunctionSample, SpectrumScan};
use quasi_landau_core::eigensolve::{ConvergenceTable, DeviationReport};
use quasi_landau_core::thermal::SpectralDensity;
use quasi_landau_core::units::EstimateReport;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

pub const SPECTRUM_HEADER: [&str; 3] = ["kx_over_kmax", "band_n", "E_over_hbar_omega_max"];
pub const DENSITY_HEADER: [&str; 3] = ["y", "n", "density"];
pub const POTENTIAL_HEADER: [&str; 2] = ["y", "V"];
pub const EIGEN_HEADER: [&str; 4] = ["n", "E_numeric", "E_analytic", "rel_error"];
pub const EVOLUTION_HEADER: [&str; 6] = ["t", "survival_plus", "survival_minus", "width_plus", "width_minus", "norm_total"];
pub const THERMAL_HEADER: [&str; 3] = ["E_J", "E_over_hbar_omega_ref", "density"];
pub const CONVERGENCE_HEADER: [&str; 4] = ["n_points", "spacing", "max_rel_error", "ratio"];
pub const SWEEP_HEADER: [&str; 4] = ["temperature", "visibility", "peaks", "total_weight"];
pub const SNAPSHOT_MAGIC: &[u8; 8] = b"QLSNAP01";

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    std::fs::create_dir_all(dir).map_err(|e| SimError::io(dir, e))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| SimError::io(&path, e))?;
    Ok((path, BufWriter::new(file)))
}

fn csv_writer(dir: &Path, name: &str, header: &[&str]) -> Result<(PathBuf, csv::Writer<BufWriter<File>>)> {
    let (path, file) = create(dir, name)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header)?;
    Ok((path, w))
}

fn finish(path: PathBuf, mut w: csv::Writer<BufWriter<File>>) -> Result<PathBuf> {
    w.flush().map_err(|e| SimError::io(&path, e))?;
    Ok(path)
}

/// One row per (band, kx), band-major.
pub fn write_spectrum(dir: &Path, scan: &SpectrumScan) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, "spectrum.csv", &SPECTRUM_HEADER)?;
    for (n, band) in scan.bands.iter().enumerate() {
        for (kx, e) in scan.kx_values.iter().zip(band) {
            w.write_record([(kx / scan.k_max).to_string(), n.to_string(), e.to_string()])?;
        }
    }
    finish(path, w)
}

pub fn write_density(dir: &Path, samples: &[EigenfunctionSample]) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, "density.csv", &DENSITY_HEADER)?;
    for s in samples {
        for (y, v) in s.grid_y.iter().zip(&s.values) {
            w.write_record([y.to_string(), s.n.to_string(), (v * v).to_string()])?;
        }
    }
    finish(path, w)
}

pub fn write_potential(dir: &Path, y: &[f64], v: &[f64]) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, "potential.csv", &POTENTIAL_HEADER)?;
    for (y, v) in y.iter().zip(v) {
        w.write_record([y.to_string(), v.to_string()])?;
    }
    finish(path, w)
}

pub fn write_eigen(dir: &Path, report: &DeviationReport) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, "eigen.csv", &EIGEN_HEADER)?;
    for l in &report.levels {
        w.write_record([l.n.to_string(), l.numeric.to_string(), l.analytic.to_string(), l.rel_error.to_string()])?;
    }
    finish(path, w)
}

/// One sample of the evolution report, already in output units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolutionRow {
    pub t: f64,
    pub survival_plus: f64,
    pub survival_minus: f64,
    pub width_plus: f64,
    pub width_minus: f64,
    pub norm_total: f64,
}

pub fn write_evolution(dir: &Path, rows: &[EvolutionRow]) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, "evolution.csv", &EVOLUTION_HEADER)?;
    for r in rows {
        w.write_record(
            [r.t, r.survival_plus, r.survival_minus, r.width_plus, r.width_minus, r.norm_total].map(|v| v.to_string()),
        )?;
    }
    finish(path, w)
}

/// Spectral density with a leading `#` line recording the reference `ħω`.
/// Energies are in the run's units (joules for SI runs).
pub fn write_thermal(dir: &Path, d: &SpectralDensity) -> Result<PathBuf> {
    let (path, mut file) = create(dir, "thermal.csv")?;
    writeln!(
        file,
        "# hbar_omega_ref = {}, kx_rms = {}, sigma_E = {}, n_levels = {}",
        d.hbar_omega_ref,
        d.kx_rms,
        d.broadening_sigma,
        d.n_levels
    )
    .map_err(|e| SimError::io(&path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(THERMAL_HEADER)?;
    for (e, rho) in d.energy_bins.iter().zip(d.density()) {
        w.write_record([
            e.to_string(),
            (e / d.hbar_omega_ref).to_string(),
            rho.to_string(),
        ])?;
    }
    finish(path, w)
}

/// `(temperature, visibility, peak count, total weight)` per sweep point.
pub fn write_sweep(dir: &Path, rows: &[(f64, f64, usize, f64)]) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, "thermal_sweep.csv", &SWEEP_HEADER)?;
    for (t, v, p, tw) in rows {
        w.write_record([t.to_string(), v.to_string(), p.to_string(), tw.to_string()])?;
    }
    finish(path, w)
}

pub fn write_convergence(dir: &Path, table: &ConvergenceTable) -> Result<PathBuf> {
    let (path, mut w) = csv_writer(dir, "convergence.csv", &CONVERGENCE_HEADER)?;
    for r in &table.rows {
        let ratio = r.ratio.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([r.n_points.to_string(), r.spacing.to_string(), r.max_rel_error.to_string(), ratio])?;
    }
    finish(path, w)
}

pub fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<PathBuf> {
    let (path, mut file) = create(dir, name)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    writeln!(file).and_then(|_| file.flush()).map_err(|e| SimError::io(&path, e))?;
    Ok(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateJson {
    pub omega_c: f64,
    #[serde(rename = "gap_J")]
    pub gap_j: f64,
    #[serde(rename = "gap_eV")]
    pub gap_ev: f64,
    #[serde(rename = "temperature_K")]
    pub temperature_k: f64,
    pub beta: f64,
    pub vx: f64,
}

impl From<&EstimateReport> for EstimateJson {
    fn from(r: &EstimateReport) -> Self {
        EstimateJson {
            omega_c: r.omega_c,
            gap_j: r.gap_j,
            gap_ev: r.gap_ev,
            temperature_k: r.temperature_k,
            beta: r.beta,
            vx: r.vx,
        }
    }
}

pub fn estimate_text(r: &EstimateReport) -> String {
    format!(
        "vx            = {} m/s\nbeta          = {:e} kg m s^-2\nomega_c       = {:e} s^-1\ngap           = {:e} J\ngap           = {:e} eV\ntemperature   = {:e} K\n",
        r.vx, r.beta, r.omega_c, r.gap_j, r.gap_ev, r.temperature_k
    )
}

pub fn write_estimate(dir: &Path, r: &EstimateReport) -> Result<(PathBuf, PathBuf)> {
    let json = write_json(dir, "estimate.json", &EstimateJson::from(r))?;
    let (text, mut file) = create(dir, "estimate.txt")?;
    file.write_all(estimate_text(r).as_bytes())
        .and_then(|_| file.flush())
        .map_err(|e| SimError::io(&text, e))?;
    Ok((json, text))
}

/// Densities of a field in the layout documented at the top of this module.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub time: f64,
    pub density_plus: Vec<f64>,
    pub density_minus: Vec<f64>,
}

pub fn write_snapshot(path: &Path, s: &Snapshot) -> Result<()> {
    let file = File::create(path).map_err(|e| SimError::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut bytes = Vec::with_capacity(56 + 16 * s.nx * s.ny);
    bytes.extend_from_slice(SNAPSHOT_MAGIC);
    bytes.extend_from_slice(&(s.nx as u64).to_le_bytes());
    bytes.extend_from_slice(&(s.ny as u64).to_le_bytes());
    for v in [s.lx, s.y_min, s.y_max, s.time].iter().chain(&s.density_plus).chain(&s.density_minus) {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&bytes).and_then(|_| w.flush()).map_err(|e| SimError::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut bytes = Vec::new();
    File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| SimError::io(path, e))?;
    let bad = || SimError::config(format!("{} is not a snapshot file", path.display()));
    if bytes.len() < 56 || &bytes[..8] != SNAPSHOT_MAGIC {
        return Err(bad());
    }
    let u = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap()) as usize;
    let f = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
    let (nx, ny) = (u(8), u(16));
    let n = nx.checked_mul(ny).ok_or_else(bad)?;
    if bytes.len() != 56 + 16 * n {
        return Err(bad());
    }
    let block = |start: usize| (0..n).map(|i| f(start + 8 * i)).collect::<Vec<_>>();
    Ok(Snapshot {
        nx,
        ny,
        lx: f(24),
        y_min: f(32),
        y_max: f(40),
        time: f(48),
        density_plus: block(56),
        density_minus: block(56 + 8 * n),
    })
}
