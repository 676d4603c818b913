//! Split-step propagation of two-component wave packets on a ring.
//!
//! `x` is periodic with circumference `lx`, so only the wave numbers
//! `2πj/lx` exist. The Hamiltonian `p²/2m + α γ y² pₓ σ_z` is split as
//! `A = p_y²/2m`, diagonal in `(x, k_y)`, and
//! `B = pₓ²/2m + α γ y² pₓ σ_z`, diagonal in `(kₓ, y)`. Each factor is
//! applied exactly; a Strang step is `A(dt/2) B(dt) A(dt/2)`.

use crate::error::{Result, SimError};
use crate::spectral::wave_numbers;
use num_complex::Complex64;
use quasi_landau_core::fields::PlaneSpinor;
use quasi_landau_core::PhysParams;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Fraction of the y-range covered by the absorbing ramp on each side.
pub const ABSORBER_FRACTION: f64 = 0.1;
/// Fraction of the y-range watched by the support-spill monitor on each side.
pub const SPILL_FRACTION: f64 = 0.05;
/// Norm allowed in the spill region before an absorber-off run aborts.
pub const SPILL_LIMIT: f64 = 1e-8;
const MIN_POINTS: usize = 32;

/// Ring in `x` times a finite channel in `y`, both sampled periodically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    /// Ring circumference.
    pub lx: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl Grid2D {
    pub fn new(lx: f64, nx: usize, y_min: f64, y_max: f64, ny: usize) -> Result<Self> {
        for (name, n) in [("nx", nx), ("ny", ny)] {
            if n < MIN_POINTS || !n.is_power_of_two() {
                return Err(SimError::config(format!("{name} must be a power of two >= {MIN_POINTS}, got {n}")));
            }
        }
        if !(lx > 0.0) || !(y_max > y_min) {
            return Err(SimError::config(format!("invalid extents lx = {lx}, y = [{y_min}, {y_max}]")));
        }
        Ok(Grid2D { lx, nx, y_min, y_max, ny })
    }

    /// Ring of circumference `2π·index/kx0`, so `kx0` is lattice wave number `index`.
    pub fn for_wave_number(kx0: f64, index: u32, nx: usize, y_extent: f64, ny: usize) -> Result<Self> {
        Self::new(2.0 * PI * index as f64 / kx0, nx, -y_extent, y_extent, ny)
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.hx() * i as f64
    }

    pub fn y_at(&self, j: usize) -> f64 {
        self.y_min + self.hy() * j as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Wave number of lattice index `j`.
    pub fn allowed_kx(&self, j: i64) -> f64 {
        2.0 * PI * j as f64 / self.lx
    }

    /// Lattice index of `kx`, or an error naming the two nearest allowed values.
    pub fn lattice_index(&self, kx: f64) -> Result<i64> {
        let x = kx * self.lx / (2.0 * PI);
        let j = x.round();
        if (x - j).abs() > 1e-9 * x.abs().max(1.0) {
            let (lo, hi) = (x.floor() as i64, x.ceil() as i64);
            return Err(SimError::config(format!(
                "kx0 = {kx} is not on the ring lattice; nearest allowed values are {} and {}",
                self.allowed_kx(lo),
                self.allowed_kx(hi)
            )));
        }
        let j = j as i64;
        if j.unsigned_abs() as usize >= self.nx / 2 {
            return Err(SimError::config(format!(
                "kx0 = {kx} (index {j}) is not resolved by nx = {}",
                self.nx
            )));
        }
        Ok(j)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpinState {
    Up,
    Down,
    /// Equal-weight `(|↑⟩ + |↓⟩)/√2`.
    Superposition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PacketSpec {
    /// Longitudinal wave number; must lie on the ring lattice.
    pub kx0: f64,
    /// Gaussian parameter `w` in `exp(−(y−y0)²/2w²)`; the oscillator length
    /// gives the ground state.
    pub width_y: f64,
    pub y0: f64,
    pub ky0: f64,
    pub spin: SpinState,
}

impl PacketSpec {
    pub fn centered(kx0: f64, width_y: f64, spin: SpinState) -> Self {
        PacketSpec { kx0, width_y, y0: 0.0, ky0: 0.0, spin }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: Grid2D,
    /// Components `σ_z = +1` (`up`) and `−1` (`down`), row-major in y.
    pub psi: PlaneSpinor,
    pub time: f64,
}

impl SpinorField {
    fn cell(&self) -> f64 {
        self.grid.hx() * self.grid.hy()
    }

    fn component(&self, up: bool) -> &[Complex64] {
        if up {
            &self.psi.up
        } else {
            &self.psi.down
        }
    }

    /// Sum of `|ψ|²` over rows selected by `rows`.
    fn partial_norm(&self, up: bool, rows: impl Fn(f64) -> bool) -> f64 {
        let nx = self.grid.nx;
        let mut total = 0.0;
        for (j, row) in self.component(up).chunks_exact(nx).enumerate() {
            if rows(self.grid.y_at(j)) {
                total += row.iter().map(|z| z.norm_sqr()).sum::<f64>();
            }
        }
        total * self.cell()
    }

    /// `(‖ψ₊‖², ‖ψ₋‖²)`.
    pub fn norms(&self) -> (f64, f64) {
        (self.partial_norm(true, |_| true), self.partial_norm(false, |_| true))
    }

    pub fn total_norm(&self) -> f64 {
        let (a, b) = self.norms();
        a + b
    }

    /// Mean and rms width in y of one component (zeros for an empty one).
    pub fn center_and_width(&self, up: bool) -> (f64, f64) {
        let nx = self.grid.nx;
        let (mut m0, mut m1, mut m2) = (0.0, 0.0, 0.0);
        for (j, row) in self.component(up).chunks_exact(nx).enumerate() {
            let y = self.grid.y_at(j);
            let w: f64 = row.iter().map(|z| z.norm_sqr()).sum();
            m0 += w;
            m1 += w * y;
            m2 += w * y * y;
        }
        if m0 <= f64::MIN_POSITIVE {
            return (0.0, 0.0);
        }
        let mean = m1 / m0;
        (mean, (m2 / m0 - mean * mean).max(0.0).sqrt())
    }

    /// Exact integral of one component's density over `a < y < b` (within one period).
    ///
    /// `|ψ|²` of a band-limited field is itself band-limited, with twice the
    /// bandwidth, so it is recovered exactly on a zero-padded grid and
    /// integrated term by term. A window edge between samples costs nothing.
    pub fn window_norm(&self, up: bool, a: f64, b: f64) -> f64 {
        let g = self.grid;
        let (nx, ny) = (g.nx, g.ny);
        let np = 2 * ny;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(ny);
        let inv = planner.plan_fft_inverse(np);
        let fwd_p = planner.plan_fft_forward(np);
        let comp = self.component(up);
        let mut rho = vec![Complex64::new(0.0, 0.0); np];
        let mut col = vec![Complex64::new(0.0, 0.0); ny];
        let mut pad = vec![Complex64::new(0.0, 0.0); np];
        for i in 0..nx {
            for (j, c) in col.iter_mut().enumerate() {
                *c = comp[j * nx + i];
            }
            fwd.process(&mut col);
            pad.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            let half = ny / 2;
            pad[..half].copy_from_slice(&col[..half]);
            pad[np - half + 1..].copy_from_slice(&col[half + 1..]);
            pad[half] = col[half] * 0.5;
            pad[np - half] = col[half] * 0.5;
            inv.process(&mut pad);
            for (r, z) in rho.iter_mut().zip(&pad) {
                *r += (z / ny as f64).norm_sqr();
            }
        }
        fwd_p.process(&mut rho);
        let period = g.y_max - g.y_min;
        let (u1, u2) = (a - g.y_min, b - g.y_min);
        let mut total = 0.0;
        for (k, c) in rho.iter().enumerate() {
            let c = c / np as f64;
            let kk = if k < ny { k as f64 } else { k as f64 - np as f64 };
            if k == 0 {
                total += c.re * (u2 - u1);
            } else {
                let kappa = 2.0 * PI * kk / period;
                let e = |u: f64| Complex64::from_polar(1.0, kappa * u);
                total += ((e(u2) - e(u1)) * c / Complex64::new(0.0, kappa)).re;
            }
        }
        total * g.hx()
    }

    /// Norm outside `|y − centre| < (1 − 2·fraction)·half-range` summed over both components.
    fn outer_norm(&self, fraction: f64) -> f64 {
        let g = self.grid;
        let margin = fraction * (g.y_max - g.y_min);
        let (lo, hi) = (g.y_min + margin, g.y_max - margin);
        let outside = |y: f64| y < lo || y > hi;
        self.partial_norm(true, outside) + self.partial_norm(false, outside)
    }
}

/// A normalized `exp(i kx0 x) · exp(−(y−y0)²/2w² + i ky0 y)` packet in the chosen spin state.
pub fn initial_packet(grid: &Grid2D, spec: &PacketSpec) -> Result<SpinorField> {
    grid.lattice_index(spec.kx0)?;
    if !(spec.width_y > 0.0) {
        return Err(SimError::config(format!("packet width must be positive, got {}", spec.width_y)));
    }
    let half = 0.5 * (grid.y_max - grid.y_min);
    let mid = 0.5 * (grid.y_max + grid.y_min);
    if (spec.y0 - mid).abs() + 6.0 * spec.width_y > half {
        return Err(SimError::config(format!(
            "packet (y0 = {}, width = {}) does not fit in y = [{}, {}]",
            spec.y0, spec.width_y, grid.y_min, grid.y_max
        )));
    }
    let mut profile = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        let y = grid.y_at(j);
        let envelope = (-(y - spec.y0).powi(2) / (2.0 * spec.width_y * spec.width_y)).exp();
        for i in 0..grid.nx {
            let phase = spec.kx0 * grid.x_at(i) + spec.ky0 * y;
            profile.push(Complex64::from_polar(envelope, phase));
        }
    }
    let norm: f64 = profile.iter().map(|z| z.norm_sqr()).sum::<f64>() * grid.hx() * grid.hy();
    let (a_up, a_down) = match spec.spin {
        SpinState::Up => (1.0, 0.0),
        SpinState::Down => (0.0, 1.0),
        SpinState::Superposition => (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
    };
    let scale = 1.0 / norm.sqrt();
    let psi = PlaneSpinor {
        up: profile.iter().map(|z| z * (a_up * scale)).collect(),
        down: profile.iter().map(|z| z * (a_down * scale)).collect(),
    };
    Ok(SpinorField { grid: *grid, psi, time: 0.0 })
}

/// Per-component norm inside `|y| < y_trap`.
pub fn survival_probability(field: &SpinorField, y_trap: f64) -> Result<(f64, f64)> {
    if !(y_trap > 0.0 && y_trap < field.grid.y_max) {
        return Err(SimError::config(format!(
            "y_trap must lie in (0, {}), got {y_trap}",
            field.grid.y_max
        )));
    }
    Ok((field.window_norm(true, -y_trap, y_trap), field.window_norm(false, -y_trap, y_trap)))
}

/// Power in each lattice wave number, summed over y, per component.
pub fn kx_spectrum(field: &SpinorField) -> [Vec<f64>; 2] {
    let nx = field.grid.nx;
    let fft = FftPlanner::new().plan_fft_forward(nx);
    let mut out = [vec![0.0; nx], vec![0.0; nx]];
    for (c, comp) in [&field.psi.up, &field.psi.down].into_iter().enumerate() {
        let mut buf = comp.clone();
        for row in buf.chunks_exact_mut(nx) {
            fft.process(row);
            for (acc, z) in out[c].iter_mut().zip(row.iter()) {
                *acc += z.norm_sqr();
            }
        }
    }
    out
}

/// `cos²` ramp over the outer [`ABSORBER_FRACTION`] of the y-range, per row.
pub fn absorber_mask(grid: &Grid2D) -> Vec<f64> {
    let width = ABSORBER_FRACTION * (grid.y_max - grid.y_min);
    (0..grid.ny)
        .map(|j| {
            let y = grid.y_at(j);
            let depth = ((grid.y_min + width - y).max(y - (grid.y_max - width)) / width).max(0.0);
            if depth <= 0.0 {
                1.0
            } else {
                (0.5 * PI * depth.min(1.0)).cos().powi(2)
            }
        })
        .collect()
}

/// Largest phase per unit time of the two non-commuting parts.
///
/// `pₓ²/2m` commutes with the whole Hamiltonian, so it is applied exactly
/// inside `B` but left out of the bound; only `p_y²/2m` and the coupling
/// `α γ y² kₓ` can alias.
fn phase_rates(grid: &Grid2D, params: &PhysParams) -> (f64, f64) {
    let ky_max = PI / grid.hy();
    let a_rate = params.hbar * ky_max * ky_max / (2.0 * params.mass);
    let c = params.coupling_coefficient();
    let y_max = grid.y_min.abs().max(grid.y_max.abs());
    let kx_max = wave_numbers(grid.nx, grid.lx).into_iter().map(f64::abs).fold(0.0, f64::max);
    (a_rate, c * y_max * y_max * kx_max)
}

/// Largest `dt` keeping the phase of either non-commuting factor below π.
pub fn max_time_step(grid: &Grid2D, params: &PhysParams) -> f64 {
    let (a, b) = phase_rates(grid, params);
    PI / a.max(b)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub absorber: bool,
    /// Half-width of the survival window.
    pub y_trap: f64,
    /// Record the report every `stride` steps (and at the last step).
    pub stride: usize,
}

/// Sampled observables of a run.
///
/// Survival is the fraction of each component's initial population found
/// inside `|y| < y_trap` (0 for a component that starts empty).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvolutionReport {
    pub times: Vec<f64>,
    pub survival_plus: Vec<f64>,
    pub survival_minus: Vec<f64>,
    pub width_plus: Vec<f64>,
    pub width_minus: Vec<f64>,
    pub center_plus: Vec<f64>,
    pub center_minus: Vec<f64>,
    pub norm_plus: Vec<f64>,
    pub norm_minus: Vec<f64>,
    pub norm_total: Vec<f64>,
}

impl EvolutionReport {
    fn record(&mut self, field: &SpinorField, y_trap: f64, initial: (f64, f64)) {
        let frac = |n: f64, n0: f64| if n0 > 0.0 { n / n0 } else { 0.0 };
        let (np, nm) = field.norms();
        let (cp, wp) = field.center_and_width(true);
        let (cm, wm) = field.center_and_width(false);
        self.times.push(field.time);
        self.survival_plus.push(frac(field.window_norm(true, -y_trap, y_trap), initial.0));
        self.survival_minus.push(frac(field.window_norm(false, -y_trap, y_trap), initial.1));
        self.width_plus.push(wp);
        self.width_minus.push(wm);
        self.center_plus.push(cp);
        self.center_minus.push(cm);
        self.norm_plus.push(np);
        self.norm_minus.push(nm);
        self.norm_total.push(np + nm);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Precomputed Strang step for one grid, parameter set and `dt`.
pub struct Propagator {
    grid: Grid2D,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
    /// `exp(−i ħ k_y² dt / 4m) / ny`.
    a_half: Vec<Complex64>,
    /// `exp(−i dt (ħ kₓ²/2m ± α γ y² kₓ)) / nx` for `σ_z = ±1`, row-major.
    b_up: Vec<Complex64>,
    b_down: Vec<Complex64>,
    mask: Option<Vec<f64>>,
}

impl Propagator {
    pub fn new(grid: &Grid2D, params: &PhysParams, dt: f64, absorber: bool) -> Result<Self> {
        let max_dt = max_time_step(grid, params);
        if !(dt > 0.0) || dt >= max_dt {
            return Err(SimError::TimeStep { dt, max_dt });
        }
        let mut planner = FftPlanner::new();
        let ky = wave_numbers(grid.ny, grid.y_max - grid.y_min);
        let kx = wave_numbers(grid.nx, grid.lx);
        let a_half = ky
            .iter()
            .map(|k| Complex64::from_polar(1.0 / grid.ny as f64, -params.hbar * k * k * dt / (4.0 * params.mass)))
            .collect();
        let c = params.coupling_coefficient();
        let b_table = |sigma: f64| -> Vec<Complex64> {
            let mut t = Vec::with_capacity(grid.len());
            for j in 0..grid.ny {
                let y = grid.y_at(j);
                for k in &kx {
                    let rate = params.hbar * k * k / (2.0 * params.mass) + sigma * c * y * y * k;
                    t.push(Complex64::from_polar(1.0 / grid.nx as f64, -rate * dt));
                }
            }
            t
        };
        Ok(Propagator {
            grid: *grid,
            fft_x: planner.plan_fft_forward(grid.nx),
            ifft_x: planner.plan_fft_inverse(grid.nx),
            fft_y: planner.plan_fft_forward(grid.ny),
            ifft_y: planner.plan_fft_inverse(grid.ny),
            a_half,
            b_up: b_table(1.0),
            b_down: b_table(-1.0),
            mask: absorber.then(|| absorber_mask(grid)),
        })
    }

    fn apply_a_half(&self, f: &mut [Complex64], col: &mut [Complex64]) {
        let nx = self.grid.nx;
        for i in 0..nx {
            for (j, c) in col.iter_mut().enumerate() {
                *c = f[j * nx + i];
            }
            self.fft_y.process(col);
            col.iter_mut().zip(&self.a_half).for_each(|(z, p)| *z *= p);
            self.ifft_y.process(col);
            for (j, c) in col.iter().enumerate() {
                f[j * nx + i] = *c;
            }
        }
    }

    fn apply_b(&self, f: &mut [Complex64], table: &[Complex64]) {
        let nx = self.grid.nx;
        for (row, phases) in f.chunks_exact_mut(nx).zip(table.chunks_exact(nx)) {
            self.fft_x.process(row);
            row.iter_mut().zip(phases).for_each(|(z, p)| *z *= p);
            self.ifft_x.process(row);
        }
    }

    /// One Strang step, then the absorber mask if enabled.
    pub fn step(&self, field: &mut SpinorField) {
        let mut col = vec![Complex64::new(0.0, 0.0); self.grid.ny];
        for (comp, table) in [(&mut field.psi.up, &self.b_up), (&mut field.psi.down, &self.b_down)] {
            self.apply_a_half(comp, &mut col);
            self.apply_b(comp, table);
            self.apply_a_half(comp, &mut col);
            if let Some(mask) = &self.mask {
                for (row, m) in comp.chunks_exact_mut(self.grid.nx).zip(mask) {
                    row.iter_mut().for_each(|z| *z *= m);
                }
            }
        }
    }
}

/// Evolve `n_steps` Strang steps of size `dt`.
///
/// With the absorber off the run aborts if more than [`SPILL_LIMIT`] of the
/// norm reaches the outer [`SPILL_FRACTION`] of the y-range, since the
/// periodic y-transform would wrap it around.
pub fn evolve(
    field: SpinorField,
    params: &PhysParams,
    dt: f64,
    n_steps: usize,
    opts: &EvolveOptions,
) -> Result<(SpinorField, EvolutionReport)> {
    evolve_with(field, params, dt, n_steps, opts, |_, _| Ok(()))
}

/// [`evolve`] with `on_step(step, field)` called after every step.
pub fn evolve_with(
    mut field: SpinorField,
    params: &PhysParams,
    dt: f64,
    n_steps: usize,
    opts: &EvolveOptions,
    mut on_step: impl FnMut(usize, &SpinorField) -> Result<()>,
) -> Result<(SpinorField, EvolutionReport)> {
    if opts.stride == 0 {
        return Err(SimError::config("report stride must be at least 1"));
    }
    survival_probability(&field, opts.y_trap)?;
    let prop = Propagator::new(&field.grid, params, dt, opts.absorber)?;
    let initial = field.norms();
    let t0 = field.time;
    let mut report = EvolutionReport::default();
    report.record(&field, opts.y_trap, initial);
    for step in 1..=n_steps {
        prop.step(&mut field);
        field.time = t0 + dt * step as f64;
        if !opts.absorber {
            let spill = field.outer_norm(SPILL_FRACTION);
            if spill > SPILL_LIMIT {
                return Err(SimError::SupportSpill { time: field.time, norm: spill });
            }
        }
        if step % opts.stride == 0 || step == n_steps {
            report.record(&field, opts.y_trap, initial);
        }
        on_step(step, &field)?;
    }
    Ok((field, report))
}

/// Norm a free packet leaves on the grid after running into the absorber.
///
/// A packet with transverse momentum `ky0` (no channel) starts at the centre
/// and moves into the upper ramp. Once `duration` is long enough for the
/// incident packet to have entered the ramp, whatever remains was reflected
/// or leaked through the periodic seam.
pub fn absorber_reflectivity(grid: &Grid2D, params: &PhysParams, ky0: f64, width: f64, dt: f64, duration: f64) -> Result<f64> {
    let free = PhysParams { alpha: 0.0, beta_override: Some(0.0), ..*params };
    let spec = PacketSpec { kx0: grid.allowed_kx(1), width_y: width, y0: 0.0, ky0, spin: SpinState::Up };
    let field = initial_packet(grid, &spec)?;
    let n_steps = (duration / dt).ceil() as usize;
    let opts = EvolveOptions { absorber: true, y_trap: 0.5 * grid.y_max, stride: n_steps.max(1) };
    let (out, _) = evolve(field, &free, dt, n_steps, &opts)?;
    Ok(out.total_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn lattice_index_inverts_allowed_kx(j in -15i64..=15, kx0 in 0.1f64..10.0, index in 1u32..8) {
            let g = Grid2D::for_wave_number(kx0, index, 32, 10.0, 64).unwrap();
            prop_assert_eq!(g.lattice_index(g.allowed_kx(j)).unwrap(), j);
            prop_assert!(g.lattice_index(g.allowed_kx(j) + 0.3 * g.allowed_kx(1)).is_err());
        }

        #[test]
        fn survival_is_a_fraction(y0 in -4.0f64..4.0, width in 0.3f64..1.0, trap in 0.5f64..9.0) {
            let g = grid();
            let f = initial_packet(&g, &PacketSpec { kx0: 2.0, width_y: width, y0, ky0: 0.0, spin: SpinState::Up }).unwrap();
            let (s, empty) = survival_probability(&f, trap).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&s));
            prop_assert_eq!(empty, 0.0);
        }
    }

    fn grid() -> Grid2D {
        Grid2D::for_wave_number(2.0, 8, 32, 12.0, 128).unwrap()
    }

    #[test]
    fn grid_rules() {
        assert!(Grid2D::new(1.0, 48, -1.0, 1.0, 64).is_err());
        assert!(Grid2D::new(1.0, 16, -1.0, 1.0, 64).is_err());
        let g = grid();
        assert_eq!(g.lattice_index(2.0).unwrap(), 8);
        assert!((g.allowed_kx(8) - 2.0).abs() < 1e-12);
        let err = g.lattice_index(2.1).unwrap_err().to_string();
        assert!(err.contains("2") && err.contains("2.25"), "{err}");
        assert!(g.lattice_index(g.allowed_kx(16)).is_err());
    }

    #[test]
    fn packet_construction() {
        let g = grid();
        let f = initial_packet(&g, &PacketSpec::centered(2.0, 1.0, SpinState::Up)).unwrap();
        assert!((f.total_norm() - 1.0).abs() < 1e-12);
        assert!(f.psi.down.iter().all(|z| z.norm() == 0.0));
        assert_eq!(survival_probability(&f, 6.0).unwrap().1, 0.0);
        assert!((survival_probability(&f, 6.0).unwrap().0 - 1.0).abs() < 1e-12);

        let s = initial_packet(&g, &PacketSpec::centered(2.0, 1.0, SpinState::Superposition)).unwrap();
        let (a, b) = survival_probability(&s, 8.0).unwrap();
        assert!((a - 0.5).abs() < 1e-12 && (b - 0.5).abs() < 1e-12);

        assert!(initial_packet(&g, &PacketSpec::centered(2.1, 1.0, SpinState::Up)).is_err());
        assert!(initial_packet(&g, &PacketSpec::centered(2.0, 3.0, SpinState::Up)).is_err());
        assert!(survival_probability(&f, 12.0).is_err());
        assert!(survival_probability(&f, 0.0).is_err());
    }

    #[test]
    fn mask_shape() {
        let g = grid();
        let m = absorber_mask(&g);
        assert_eq!(m[64], 1.0);
        assert!(m[0] < 1e-12);
        assert!(m.iter().all(|&v| (0.0..=1.0).contains(&v)));
        // Ramp occupies 2.4 of 24 on each side.
        let ones = m.iter().filter(|&&v| v == 1.0).count();
        assert!((100..=104).contains(&ones), "{ones}");
    }

    #[test]
    fn time_step_guard() {
        let g = grid();
        let p = PhysParams::oscillator_units(2.0);
        let max_dt = max_time_step(&g, &p);
        assert!(max_dt > 0.01 && max_dt < 0.03, "{max_dt}");
        let f = initial_packet(&g, &PacketSpec::centered(2.0, 1.0, SpinState::Up)).unwrap();
        let opts = EvolveOptions { absorber: false, y_trap: 4.0, stride: 1 };
        match evolve(f, &p, 2.0 * max_dt, 1, &opts) {
            Err(SimError::TimeStep { max_dt: m, .. }) => assert_eq!(m, max_dt),
            other => panic!("expected TimeStep error, got {other:?}"),
        }
    }

    #[test]
    fn spill_monitor_aborts() {
        // Free packet drifting straight at the boundary with no absorber.
        let g = grid();
        let p = PhysParams { alpha: 0.0, ..PhysParams::natural() };
        let spec = PacketSpec { kx0: 2.0, width_y: 1.0, y0: 0.0, ky0: 4.0, spin: SpinState::Up };
        let f = initial_packet(&g, &spec).unwrap();
        let opts = EvolveOptions { absorber: false, y_trap: 4.0, stride: 10 };
        assert!(matches!(evolve(f, &p, 0.01, 500, &opts), Err(SimError::SupportSpill { .. })));
    }
}
