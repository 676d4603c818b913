//! Field profile, synthetic gauge field and discretized Hamiltonians.
//!
//! The electric field `E = γ y² ŷ` turns `α (σ × p)·E` into
//! `α γ y² pₓ σ_z`. [`SpinBlockOperator`] is that reduced, σ_z-diagonal
//! form; [`apply_raw_hamiltonian`] evaluates the unreduced cross product
//! term by term so the two can be compared on arbitrary spinors.

use crate::analytic::{classify_sector, Confinement, Sector};
use crate::error::{Error, Result};
use crate::units::{PhysParams, EPSILON_0};
use alloc::format;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Sub};
use num_complex::Complex64;

/// `E(y) = γ y² ŷ`, sourced by the charge density `ρ(y) = 2 ε₀ γ y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldConfig {
    /// Field curvature γ (V·m⁻³).
    pub gamma: f64,
    pub epsilon_0: f64,
}

impl FieldConfig {
    pub fn new(gamma: f64) -> Self {
        FieldConfig { gamma, epsilon_0: EPSILON_0 }
    }

    pub fn from_params(params: &PhysParams) -> Self {
        Self::new(params.gamma)
    }

    /// Cartesian components `(Eₓ, E_y, E_z)` at height `y`.
    pub fn e_field(&self, y: f64) -> [f64; 3] {
        [0.0, self.gamma * y * y, 0.0]
    }

    /// `ρ(y) = ε₀ ∂_y E_y = 2 ε₀ γ y`.
    pub fn charge_density(&self, y: f64) -> f64 {
        2.0 * self.epsilon_0 * self.gamma * y
    }
}

/// A 2×2 complex matrix in spin space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[Complex64::new(0.0, 0.0); 2]; 2]);

    pub fn identity() -> Mat2 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[one, zero], [zero, one]])
    }

    pub fn sigma_x() -> Mat2 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[zero, one], [one, zero]])
    }

    pub fn sigma_y() -> Mat2 {
        let i = Complex64::new(0.0, 1.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[zero, -i], [i, zero]])
    }

    pub fn sigma_z() -> Mat2 {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Mat2([[one, zero], [zero, -one]])
    }

    /// `[σₓ, σ_y, σ_z]`.
    pub fn pauli() -> [Mat2; 3] {
        [Self::sigma_x(), Self::sigma_y(), Self::sigma_z()]
    }

    pub fn scale(self, c: Complex64) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0] * c, m[0][1] * c], [m[1][0] * c, m[1][1] * c]])
    }

    pub fn adjoint(self) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn commutator(self, other: Mat2) -> Mat2 {
        self * other - other * self
    }

    pub fn anticommutator(self, other: Mat2) -> Mat2 {
        self * other + other * self
    }

    /// Largest singular value.
    pub fn spectral_norm(self) -> f64 {
        let g = (self.adjoint() * self).0;
        let a = g[0][0].re;
        let d = g[1][1].re;
        let b = g[0][1].norm();
        let half = 0.5 * (a - d);
        libm::sqrt(0.5 * (a + d) + libm::sqrt(half * half + b * b))
    }

    pub fn max_abs(self) -> f64 {
        self.0.iter().flatten().fold(0.0, |m, z| m.max(z.norm()))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        Mat2([[a[0][0] + b[0][0], a[0][1] + b[0][1]], [a[1][0] + b[1][0], a[1][1] + b[1][1]]])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + o.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }
}

/// Levi-Civita symbol `ε_ijk`.
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// Spin-matrix-valued vector potential `A_eff = E × σ` (Cartesian components).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeField(pub [Mat2; 3]);

/// `A_eff(y) = E(y) × σ`; for `E = γ y² ŷ` this is `γ y² (σ_z x̂ − σₓ ẑ)`.
pub fn effective_gauge(field: &FieldConfig, y: f64) -> GaugeField {
    let e = field.e_field(y);
    let sigma = Mat2::pauli();
    let mut a = [Mat2::ZERO; 3];
    for (i, ai) in a.iter_mut().enumerate() {
        for j in 0..3 {
            for (k, sk) in sigma.iter().enumerate() {
                let eps = levi_civita(i, j, k);
                if eps != 0.0 && e[j] != 0.0 {
                    *ai = *ai + sk.scale(Complex64::new(eps * e[j], 0.0));
                }
            }
        }
    }
    GaugeField(a)
}

/// Uniform grid on `[y_min, y_max]` with Dirichlet ends.
///
/// All `n_points` samples are unknowns; the wave function is taken to
/// vanish one spacing beyond either end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub y_min: f64,
    pub y_max: f64,
    pub n_points: usize,
}

pub const MIN_GRID_POINTS: usize = 16;
/// Point count of the default eigensolver grid.
pub const DEFAULT_GRID_POINTS: usize = 2048;
/// Margin, in oscillator lengths, of the default grid beyond the classical
/// turning point of the highest requested level.
pub const DEFAULT_GRID_MARGIN: f64 = 6.0;

impl Grid1D {
    pub fn new(y_min: f64, y_max: f64, n_points: usize) -> Result<Self> {
        if n_points < MIN_GRID_POINTS {
            return Err(Error::argument(format!(
                "grid needs at least {MIN_GRID_POINTS} points, got {n_points}"
            )));
        }
        if !(y_max > y_min) || !y_min.is_finite() || !y_max.is_finite() {
            return Err(Error::argument(format!("invalid grid range [{y_min}, {y_max}]")));
        }
        Ok(Grid1D { y_min, y_max, n_points })
    }

    pub fn symmetric(extent: f64, n_points: usize) -> Result<Self> {
        Self::new(-extent, extent, n_points)
    }

    /// `±(sqrt(2 n_levels + 1) + 6) ℓ` with 2048 points.
    pub fn default_for_levels(oscillator_length: f64, n_levels: usize) -> Result<Self> {
        let extent = (libm::sqrt(2.0 * n_levels as f64 + 1.0) + DEFAULT_GRID_MARGIN) * oscillator_length;
        Self::symmetric(extent, DEFAULT_GRID_POINTS)
    }

    pub fn spacing(&self) -> f64 {
        (self.y_max - self.y_min) / (self.n_points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.y_min + self.spacing() * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.point(i)).collect()
    }
}

/// Real symmetric tridiagonal operator; only one off-diagonal is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
    pub grid: Grid1D,
}

impl TridiagonalOperator {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * v[i + 1];
            }
            out.push(acc);
        }
        out
    }

    /// Gershgorin bound on `‖H‖₂`.
    pub fn norm_bound(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }
}

/// `V(y) = sign(kx)·σ_z·½ m ω_c² y²` with `ω_c` from `|kx|`; zero when `kx = 0`.
pub fn potential_profile(params: &PhysParams, s: Sector, grid: &Grid1D) -> Vec<f64> {
    let sign = s.potential_sign();
    let omega = params.omega_for_magnitude(s.kx.abs());
    let k = sign * 0.5 * params.mass * omega * omega;
    grid.points().into_iter().map(|y| k * y * y).collect()
}

/// Three-point finite-difference `−ħ²/2m ∂²_y + ½ m ω_c² y²` for a confined sector.
pub fn build_effective_1d(params: &PhysParams, s: Sector, grid: &Grid1D) -> Result<TridiagonalOperator> {
    match classify_sector(s) {
        Confinement::Confined => {}
        Confinement::Unconfined => {
            return Err(Error::domain(format!(
                "spectrum unbounded below: sector kx = {}, sigma_z = {} sees an inverted oscillator",
                s.kx,
                s.spin.sign()
            )))
        }
        Confinement::Marginal => {
            return Err(Error::domain("kx = 0 has no confining potential; refusing to eigensolve"))
        }
    }
    if params.omega_for_magnitude(s.kx.abs()) <= 0.0 {
        return Err(Error::domain("zero spin-orbit coupling gives no confining potential"));
    }
    let h = grid.spacing();
    let kinetic = params.hbar * params.hbar / (params.mass * h * h);
    let diag = potential_profile(params, s, grid).into_iter().map(|v| kinetic + v).collect();
    let offdiag = alloc::vec![-0.5 * kinetic; grid.n_points - 1];
    Ok(TridiagonalOperator { diag, offdiag, grid: *grid })
}

/// Complex field samples on a periodic `nx × ny` plane, row-major in `y`
/// (`index = j·nx + i` for `x_i`, `y_j`).
pub trait PlaneDerivatives {
    fn nx(&self) -> usize;
    fn ny(&self) -> usize;
    /// Height of row `j`.
    fn y_at(&self, j: usize) -> f64;
    fn d_dx(&self, f: &[Complex64]) -> Vec<Complex64>;
    fn d_dy(&self, f: &[Complex64]) -> Vec<Complex64>;
    fn d2_dx2(&self, f: &[Complex64]) -> Vec<Complex64>;
    fn d2_dy2(&self, f: &[Complex64]) -> Vec<Complex64>;
}

/// Two-component wave function on a plane, components `σ_z = +1, −1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneSpinor {
    pub up: Vec<Complex64>,
    pub down: Vec<Complex64>,
}

impl PlaneSpinor {
    pub fn zeros(len: usize) -> Self {
        PlaneSpinor {
            up: alloc::vec![Complex64::new(0.0, 0.0); len],
            down: alloc::vec![Complex64::new(0.0, 0.0); len],
        }
    }

    pub fn components(&self) -> [&[Complex64]; 2] {
        [&self.up, &self.down]
    }

    /// Euclidean norm of the stacked samples.
    pub fn l2(&self) -> f64 {
        libm::sqrt(self.up.iter().chain(&self.down).map(|z| z.norm_sqr()).sum())
    }

    pub fn sub(&self, other: &PlaneSpinor) -> PlaneSpinor {
        PlaneSpinor {
            up: self.up.iter().zip(&other.up).map(|(a, b)| a - b).collect(),
            down: self.down.iter().zip(&other.down).map(|(a, b)| a - b).collect(),
        }
    }
}

/// The σ_z-diagonal Hamiltonian `H^± = p²/2m ± α γ y² pₓ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinBlockOperator {
    pub mass: f64,
    pub hbar: f64,
    /// `α γ`, the coefficient of `y² pₓ σ_z`.
    pub coupling: f64,
    /// `α γ ħ` (kg·m·s⁻²).
    pub coupling_coefficient: f64,
}

/// Reduce `p²/2m + α(σ × p)·E` for `E = γ y² ŷ` to its σ_z blocks.
pub fn reduce_to_spin_diagonal(field: &FieldConfig, params: &PhysParams) -> SpinBlockOperator {
    let coupling = params.alpha * field.gamma;
    SpinBlockOperator {
        mass: params.mass,
        hbar: params.hbar,
        coupling,
        coupling_coefficient: coupling * params.hbar,
    }
}

fn kinetic(mass: f64, hbar: f64, d: &impl PlaneDerivatives, f: &[Complex64]) -> Vec<Complex64> {
    let c = -hbar * hbar / (2.0 * mass);
    d.d2_dx2(f).iter().zip(d.d2_dy2(f)).map(|(a, b)| (a + b) * c).collect()
}

impl SpinBlockOperator {
    /// The scalar block `H^σ` applied to one component.
    pub fn apply_block(&self, sigma: f64, d: &impl PlaneDerivatives, f: &[Complex64]) -> Vec<Complex64> {
        let nx = d.nx();
        let mut out = kinetic(self.mass, self.hbar, d, f);
        let dx = d.d_dx(f);
        // p_x = -iħ ∂_x
        let minus_i_hbar = Complex64::new(0.0, -self.hbar);
        for (idx, o) in out.iter_mut().enumerate() {
            let y = d.y_at(idx / nx);
            *o += dx[idx] * minus_i_hbar * (sigma * self.coupling * y * y);
        }
        out
    }

    pub fn apply(&self, d: &impl PlaneDerivatives, psi: &PlaneSpinor) -> PlaneSpinor {
        PlaneSpinor { up: self.apply_block(1.0, d, &psi.up), down: self.apply_block(-1.0, d, &psi.down) }
    }
}

/// `p²/2m + α (σ × p)·E` evaluated without any reduction.
///
/// The cross product is summed over `ε_kij E_k σ_i p_j` for all Cartesian
/// indices, with the products `E_k p_j` symmetrized as
/// `½ (E_k p_j + p_j E_k)`. Motion is planar, so `p_z ψ = 0`.
pub fn apply_raw_hamiltonian(
    field: &FieldConfig,
    params: &PhysParams,
    d: &impl PlaneDerivatives,
    psi: &PlaneSpinor,
) -> PlaneSpinor {
    let nx = d.nx();
    let len = psi.up.len();
    let sigma = Mat2::pauli();
    let e_at = |idx: usize| field.e_field(d.y_at(idx / nx));
    let mut out = PlaneSpinor {
        up: kinetic(params.mass, params.hbar, d, &psi.up),
        down: kinetic(params.mass, params.hbar, d, &psi.down),
    };
    let minus_i_hbar = Complex64::new(0.0, -params.hbar);
    let comps = psi.components();

    for k in 0..3 {
        if (0..len).all(|idx| e_at(idx)[k] == 0.0) {
            continue;
        }
        // p_j applied to ψ_b and to E_k ψ_b for the in-plane directions.
        for j in 0..2 {
            let derivative = |f: &[Complex64]| if j == 0 { d.d_dx(f) } else { d.d_dy(f) };
            let mut sym = [Vec::new(), Vec::new()];
            for (b, comp) in comps.iter().enumerate() {
                let p_psi = derivative(comp);
                let e_psi: Vec<Complex64> = comp.iter().enumerate().map(|(idx, z)| z * e_at(idx)[k]).collect();
                let p_e_psi = derivative(&e_psi);
                sym[b] = p_psi
                    .iter()
                    .zip(&p_e_psi)
                    .enumerate()
                    .map(|(idx, (a, c))| (a * e_at(idx)[k] + c) * 0.5 * minus_i_hbar)
                    .collect();
            }
            for (i, s_i) in sigma.iter().enumerate() {
                let eps = levi_civita(k, i, j);
                if eps == 0.0 {
                    continue;
                }
                let m = s_i.0;
                let c = params.alpha * eps;
                for idx in 0..len {
                    let (u, w) = (sym[0][idx], sym[1][idx]);
                    out.up[idx] += (m[0][0] * u + m[0][1] * w) * c;
                    out.down[idx] += (m[1][0] * u + m[1][1] * w) * c;
                }
            }
        }
    }
    out
}
