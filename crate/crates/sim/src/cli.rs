//! Command-line front end. Every command writes its files plus a
//! `run-manifest.json` echoing all resolved inputs into `--out`.

use crate::config::{load_config, PhysInputs, Resolved, Units};
use crate::dynamics::{evolve_with, initial_packet, EvolveOptions, Grid2D, PacketSpec, SpinState, SpinorField};
use crate::error::{Result, SimError};
use crate::output::{self, EvolutionRow, Snapshot};
use clap::{Args, Parser, Subcommand, ValueEnum};
use quasi_landau_core::analytic::{eigenfunction, required_extent, spectrum_scan, Sector, Spin};
use quasi_landau_core::eigensolve::{compare_to_analytic, convergence_study, default_extent, lowest_eigenpairs_with, EigenMethod};
use quasi_landau_core::fields::{build_effective_1d, potential_profile, Grid1D};
use quasi_landau_core::thermal::{find_peaks, gap_visibility, smeared_spectrum, SmearingOptions, ThermalEnsemble};
use quasi_landau_core::units::{cyclotron_frequency, estimate_gap, to_natural_units};
use quasi_landau_core::PhysParams;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(name = "quasi-landau", version, about = "Quasi-Landau levels of spin-1/2 neutral atoms in a quadratic electric field")]
pub struct Cli {
    /// `key = value` file with mass_kg, alpha, gamma, beta_soc, temperature_K, vx.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory for all output files (created if missing).
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Do not print the summary.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Level spacing, in eV and kelvin, at a given longitudinal velocity.
    Estimate(EstimateArgs),
    /// Bands E_n(kx) over (0, k_max] and transverse densities.
    Spectrum(SpectrumArgs),
    /// Finite-difference eigenpairs compared with the analytic ladder.
    Eigen(EigenArgs),
    /// Split-step evolution of a wave packet on the ring.
    Evolve(EvolveArgs),
    /// Thermally smeared spectral density.
    Thermal(ThermalArgs),
    /// Eigenvalue error against grid size.
    Convergence(ConvergenceArgs),
}

/// Physical inputs; each overrides the config file.
#[derive(Args, Debug, Clone, Default, Serialize)]
pub struct PhysArgs {
    /// Unit system [default: si for estimate, natural otherwise].
    #[arg(long, value_enum)]
    pub units: Option<Units>,
    #[arg(long = "mass-kg", value_name = "M")]
    pub mass_kg: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Direct spin-orbit strength, replacing alpha·gamma·hbar.
    #[arg(long, alias = "beta-soc")]
    pub beta: Option<f64>,
    /// Longitudinal velocity; sets the reference wave number m·vx/hbar.
    #[arg(long)]
    pub vx: Option<f64>,
    #[arg(long, alias = "temperature-k")]
    pub temperature: Option<f64>,
}

impl PhysArgs {
    fn inputs(&self) -> PhysInputs {
        PhysInputs {
            mass_kg: self.mass_kg,
            alpha: self.alpha,
            gamma: self.gamma,
            beta_soc: self.beta,
            temperature_k: self.temperature,
            vx: self.vx,
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    #[arg(long, default_value_t = 5)]
    pub n_bands: usize,
    #[arg(long, default_value_t = 200)]
    pub n_k: usize,
    /// Largest wave number [default: m·vx/hbar].
    #[arg(long)]
    pub k_max: Option<f64>,
    /// Number of densities |φ_n|² written to density.csv (at k_max).
    #[arg(long, default_value_t = 5)]
    pub density_levels: usize,
    #[arg(long, default_value_t = 401)]
    pub density_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SpinArg {
    Up,
    Down,
}

impl From<SpinArg> for Spin {
    fn from(s: SpinArg) -> Spin {
        match s {
            SpinArg::Up => Spin::Up,
            SpinArg::Down => Spin::Down,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    /// Implicit-shift QL.
    Ql,
    /// Sturm-sequence bisection.
    Bisection,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EigenArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    /// Wave number of the sector [default: m·vx/hbar].
    #[arg(long, allow_hyphen_values = true)]
    pub kx: Option<f64>,
    #[arg(long, value_enum, default_value_t = SpinArg::Up)]
    pub spin: SpinArg,
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    #[arg(long, default_value_t = 2048)]
    pub points: usize,
    /// Half-width in oscillator lengths [default: sqrt(2·levels+1) + 6].
    #[arg(long)]
    pub extent: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::Ql)]
    pub method: MethodArg,
    /// Also write the sector's transverse potential to potential.csv.
    #[arg(long)]
    pub potential: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PacketSpin {
    Up,
    Down,
    Superposition,
}

/// Lengths are in oscillator lengths and times in 1/ω_c of the reference
/// sector (kx = m·vx/hbar, spin up); evolution.csv is in the run's units.
#[derive(Args, Debug, Clone, Serialize)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    #[arg(long, value_enum, default_value_t = PacketSpin::Superposition)]
    pub spin: PacketSpin,
    /// The ring holds this many wavelengths of the reference wave number.
    #[arg(long, default_value_t = 8)]
    pub kx_index: u32,
    #[arg(long, default_value_t = 32)]
    pub nx: usize,
    #[arg(long, default_value_t = 128)]
    pub ny: usize,
    #[arg(long, default_value_t = 12.0)]
    pub y_extent: f64,
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub y0: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 3.0)]
    pub t_end: f64,
    #[arg(long, default_value_t = 4.0)]
    pub y_trap: f64,
    /// Report every this many steps.
    #[arg(long, default_value_t = 10)]
    pub stride: usize,
    #[arg(long)]
    pub no_absorber: bool,
    /// Write a density snapshot every this many steps (0: none).
    #[arg(long, default_value_t = 0)]
    pub snapshot_every: usize,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ThermalArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    #[arg(long, default_value_t = 1024)]
    pub bins: usize,
    /// Kernel width in units of hbar·ω_c at the reference wave number.
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    /// Comma-separated temperatures; writes thermal_sweep.csv.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub phys: PhysArgs,
    #[arg(long, value_delimiter = ',', default_value = "256,512,1024,2048")]
    pub points: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    pub levels: usize,
    /// Half-width in oscillator lengths [default: sqrt(2·levels+1) + 6].
    #[arg(long)]
    pub extent: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub kx: Option<f64>,
}

/// Files written and a human-readable summary.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

#[derive(Serialize)]
struct Manifest<'a, A: Serialize> {
    program: &'static str,
    version: &'static str,
    command: &'static str,
    physics: Resolved,
    options: &'a A,
    outputs: Vec<String>,
}

fn resolve(cli: &Cli, phys: &PhysArgs, default_units: Units) -> Result<Resolved> {
    let file = match &cli.config {
        Some(path) => PhysInputs::from_map(&load_config(path)?),
        None => PhysInputs::default(),
    };
    Resolved::resolve(phys.units.unwrap_or(default_units), file.overridden_by(phys.inputs()))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(SimError::config(format!("--{name} must be positive, got {v}")))
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<()> {
    if v >= min {
        Ok(())
    } else {
        Err(SimError::config(format!("--{name} must be at least {min}, got {v}")))
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let (name, physics, options, mut outcome) = match &cli.command {
        Command::Estimate(a) => {
            let r = resolve(cli, &a.phys, Units::Si)?;
            ("estimate", r, serde_json::to_value(a)?, cmd_estimate(&r, &cli.out)?)
        }
        Command::Spectrum(a) => {
            let r = resolve(cli, &a.phys, Units::Natural)?;
            ("spectrum", r, serde_json::to_value(a)?, cmd_spectrum(&r, a, &cli.out)?)
        }
        Command::Eigen(a) => {
            let r = resolve(cli, &a.phys, Units::Natural)?;
            ("eigen", r, serde_json::to_value(a)?, cmd_eigen(&r, a, &cli.out)?)
        }
        Command::Evolve(a) => {
            let r = resolve(cli, &a.phys, Units::Natural)?;
            ("evolve", r, serde_json::to_value(a)?, cmd_evolve(&r, a, &cli.out)?)
        }
        Command::Thermal(a) => {
            let r = resolve(cli, &a.phys, Units::Natural)?;
            ("thermal", r, serde_json::to_value(a)?, cmd_thermal(&r, a, &cli.out)?)
        }
        Command::Convergence(a) => {
            let r = resolve(cli, &a.phys, Units::Natural)?;
            ("convergence", r, serde_json::to_value(a)?, cmd_convergence(&r, a, &cli.out)?)
        }
    };
    let manifest = Manifest {
        program: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: name,
        physics,
        options: &options,
        outputs: outcome
            .files
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
    };
    outcome.files.push(output::write_json(&cli.out, "run-manifest.json", &manifest)?);
    Ok(outcome)
}

pub fn cmd_estimate(r: &Resolved, out: &Path) -> Result<Outcome> {
    let report = estimate_gap(&r.params(), r.require_vx()?, r.beta_soc)?;
    let (json, text) = output::write_estimate(out, &report)?;
    Ok(Outcome { files: vec![json, text], summary: output::estimate_text(&report) })
}

pub fn cmd_spectrum(r: &Resolved, a: &SpectrumArgs, out: &Path) -> Result<Outcome> {
    at_least("n-bands", a.n_bands, 1)?;
    at_least("n-k", a.n_k, 2)?;
    at_least("density-points", a.density_points, 16)?;
    let params = r.params();
    let k_max = match a.k_max {
        Some(k) => {
            positive("k-max", k)?;
            k
        }
        None => r.reference_kx()?,
    };
    let scan = spectrum_scan(&params, k_max, a.n_bands, a.n_k)?;
    let mut files = vec![output::write_spectrum(out, &scan)?];

    if a.density_levels > 0 {
        let sector = Sector::new(k_max, Spin::Up);
        let ell = to_natural_units(&params, k_max)?.length;
        let extent = (required_extent(a.density_levels - 1) + 1.0) * ell;
        let grid = Grid1D::symmetric(extent, a.density_points)?.points();
        let samples = (0..a.density_levels)
            .map(|n| eigenfunction(&params, sector, n, &grid))
            .collect::<quasi_landau_core::Result<Vec<_>>>()?;
        files.push(output::write_density(out, &samples)?);
    }
    let last = scan.bands.iter().map(|b| b[b.len() - 1]).collect::<Vec<_>>();
    let mut summary = format!("k_max = {k_max:e}, omega_max = {:e}\nE_n(k_max) / hbar omega_max:", scan.omega_max);
    for e in last {
        write!(summary, " {e:.6}").unwrap();
    }
    summary.push('\n');
    Ok(Outcome { files, summary })
}

pub fn cmd_eigen(r: &Resolved, a: &EigenArgs, out: &Path) -> Result<Outcome> {
    at_least("levels", a.levels, 1)?;
    let params = r.params();
    let kx = match a.kx {
        Some(k) => k,
        None => r.reference_kx()?,
    };
    let sector = Sector::new(kx, a.spin.into());
    let ell = to_natural_units(&params, kx.abs())?.length;
    let extent = a.extent.unwrap_or_else(|| default_extent(a.levels));
    positive("extent", extent)?;
    let grid = Grid1D::symmetric(extent * ell, a.points)?;
    let mut files = Vec::new();
    if a.potential {
        files.push(output::write_potential(out, &grid.points(), &potential_profile(&params, sector, &grid))?);
    }
    let op = build_effective_1d(&params, sector, &grid)?;
    let method = match a.method {
        MethodArg::Ql => EigenMethod::ImplicitQl,
        MethodArg::Bisection => EigenMethod::SturmBisection,
    };
    let res = lowest_eigenpairs_with(&op, a.levels, method)?;
    let report = compare_to_analytic(&res, &params, sector)?;
    files.push(output::write_eigen(out, &report)?);
    let max_residual = res
        .residual_norms
        .iter()
        .zip(&res.values)
        .map(|(r, v)| r / v.abs())
        .fold(0.0, f64::max);
    let summary = format!(
        "{} levels on {} points, extent ±{extent} oscillator lengths\nmax relative eigenvalue error = {:e}\nmax overlap error = {:e}\nmax relative residual = {:e}\n",
        a.levels,
        a.points,
        report.max_rel_error(),
        report.max_overlap_error(),
        max_residual
    );
    Ok(Outcome { files, summary })
}

fn snapshot_of(field: &SpinorField, length: f64, time: f64) -> Snapshot {
    let g = field.grid;
    // Densities per unit area in run units.
    let area = length * length;
    Snapshot {
        nx: g.nx,
        ny: g.ny,
        lx: g.lx * length,
        y_min: g.y_min * length,
        y_max: g.y_max * length,
        time: field.time * time,
        density_plus: field.psi.up.iter().map(|z| z.norm_sqr() / area).collect(),
        density_minus: field.psi.down.iter().map(|z| z.norm_sqr() / area).collect(),
    }
}

pub fn cmd_evolve(r: &Resolved, a: &EvolveArgs, out: &Path) -> Result<Outcome> {
    for (name, v) in [("dt", a.dt), ("t-end", a.t_end), ("width", a.width), ("y-extent", a.y_extent), ("y-trap", a.y_trap)] {
        positive(name, v)?;
    }
    at_least("stride", a.stride, 1)?;
    if a.kx_index == 0 {
        return Err(SimError::config("--kx-index must be at least 1"));
    }
    let params = r.params();
    let k_ref = r.reference_kx()?;
    let scale = to_natural_units(&params, k_ref)?;
    // Oscillator units of the reference sector: ω_c = ħ = m = 1.
    let kx0 = k_ref * scale.length;
    let internal = PhysParams::oscillator_units(kx0);
    let grid = Grid2D::for_wave_number(kx0, a.kx_index, a.nx, a.y_extent, a.ny)?;
    let spin = match a.spin {
        PacketSpin::Up => SpinState::Up,
        PacketSpin::Down => SpinState::Down,
        PacketSpin::Superposition => SpinState::Superposition,
    };
    let field = initial_packet(&grid, &PacketSpec { kx0, width_y: a.width, y0: a.y0, ky0: 0.0, spin })?;
    let n_steps = (a.t_end / a.dt).round() as usize;
    let opts = EvolveOptions { absorber: !a.no_absorber, y_trap: a.y_trap, stride: a.stride };

    let mut files = Vec::new();
    if a.snapshot_every > 0 {
        std::fs::create_dir_all(out).map_err(|e| SimError::io(out, e))?;
    }
    let write_snapshot = |step: usize, f: &SpinorField, files: &mut Vec<PathBuf>| -> Result<()> {
        let path = out.join(format!("snapshot_{step:05}.bin"));
        output::write_snapshot(&path, &snapshot_of(f, scale.length, scale.time))?;
        files.push(path);
        Ok(())
    };
    if a.snapshot_every > 0 {
        write_snapshot(0, &field, &mut files)?;
    }
    let (_, report) = evolve_with(field, &internal, a.dt, n_steps, &opts, |step, f| {
        if a.snapshot_every > 0 && step % a.snapshot_every == 0 {
            write_snapshot(step, f, &mut files)?;
        }
        Ok(())
    })?;

    let rows: Vec<EvolutionRow> = (0..report.len())
        .map(|i| EvolutionRow {
            t: report.times[i] * scale.time,
            survival_plus: report.survival_plus[i],
            survival_minus: report.survival_minus[i],
            width_plus: report.width_plus[i] * scale.length,
            width_minus: report.width_minus[i] * scale.length,
            norm_total: report.norm_total[i],
        })
        .collect();
    files.insert(0, output::write_evolution(out, &rows)?);
    let last = rows.last().expect("report has the initial sample");
    let summary = format!(
        "{n_steps} steps of {} / omega_c, omega_c = {:e}\nat t = {:e}: survival_plus = {:.6}, survival_minus = {:.6}, norm = {:.12}\n",
        a.dt, scale.omega, last.t, last.survival_plus, last.survival_minus, last.norm_total
    );
    Ok(Outcome { files, summary })
}

pub fn cmd_thermal(r: &Resolved, a: &ThermalArgs, out: &Path) -> Result<Outcome> {
    at_least("levels", a.levels, 1)?;
    at_least("bins", a.bins, 64)?;
    positive("sigma", a.sigma)?;
    let params = r.params();
    let temperature = match (r.temperature, r.units) {
        (Some(t), _) => t,
        (None, Units::Natural) => 0.01,
        (None, Units::Si) => r.require_temperature()?,
    };
    let sigma_e = a.sigma * params.hbar * cyclotron_frequency(&params, r.reference_kx()?)?;
    let smear = |t: f64| -> Result<_> {
        let ens = ThermalEnsemble::new(&params, t)?;
        let opts = SmearingOptions { n_levels: a.levels, bins: a.bins, sigma_e, energy_range: None };
        Ok(smeared_spectrum(&ens, &params, &opts)?)
    };
    let d = smear(temperature)?;
    let mut files = vec![output::write_thermal(out, &d)?];
    let mut summary = format!(
        "T = {temperature:e}, sigma_E = {sigma_e:e}\ntotal weight = {:.15}, peaks = {}, visibility = {:.6}\n",
        d.total_weight(),
        find_peaks(&d).len(),
        gap_visibility(&d)
    );
    if let Some(temps) = &a.sweep {
        let mut rows = Vec::with_capacity(temps.len());
        for &t in temps {
            positive("sweep", t)?;
            let d = smear(t)?;
            rows.push((t, gap_visibility(&d), find_peaks(&d).len(), d.total_weight()));
        }
        for (t, v, p, _) in &rows {
            writeln!(summary, "  T = {t:e}: visibility = {v:.6}, peaks = {p}").unwrap();
        }
        files.push(output::write_sweep(out, &rows)?);
    }
    Ok(Outcome { files, summary })
}

pub fn cmd_convergence(r: &Resolved, a: &ConvergenceArgs, out: &Path) -> Result<Outcome> {
    at_least("levels", a.levels, 1)?;
    let params = r.params();
    let kx = match a.kx {
        Some(k) => k,
        None => r.reference_kx()?,
    };
    let table = convergence_study(&params, Sector::new(kx, Spin::Up), &a.points, a.levels, a.extent)?;
    let files = vec![output::write_convergence(out, &table)?];
    let mut summary = String::new();
    for row in &table.rows {
        let ratio = row.ratio.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into());
        writeln!(summary, "{:>6} points: max rel error {:.4e}, ratio {ratio}", row.n_points, row.max_rel_error).unwrap();
    }
    writeln!(
        summary,
        "fitted order {:.4}, extent ±{} oscillator lengths{}",
        table.fitted_order,
        table.extent,
        if table.truncation_dominated { ", truncation-dominated" } else { "" }
    )
    .unwrap();
    Ok(Outcome { files, summary })
}
