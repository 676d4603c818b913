//! Lowest eigenpairs of symmetric tridiagonal operators.
//!
//! Eigenvalues come from implicit-shift QL ([`EigenMethod::ImplicitQl`]) or,
//! independently, from Sturm-sequence bisection
//! ([`EigenMethod::SturmBisection`]). Eigenvectors are computed by inverse
//! iteration with a partially pivoted tridiagonal LU in both cases.

use crate::analytic::{eigenfunction, sector_frequency, Sector};
use crate::error::{Error, Result};
use crate::fields::{build_effective_1d, Grid1D, TridiagonalOperator};
use crate::units::PhysParams;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    #[default]
    ImplicitQl,
    SturmBisection,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// One vector per eigenvalue, normalized so `Σ v² h = 1`.
    pub vectors: Vec<Vec<f64>>,
    /// `‖H v − λ v‖` in the same `h`-weighted norm.
    pub residual_norms: Vec<f64>,
    pub grid: Grid1D,
}

impl EigenResult {
    /// `max |⟨v_i|v_j⟩ − δ_ij|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let h = self.grid.spacing();
        let mut worst = 0.0f64;
        for (i, a) in self.vectors.iter().enumerate() {
            for (j, b) in self.vectors.iter().enumerate() {
                let dot = weighted_dot(a, b, h);
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expect).abs());
            }
        }
        worst
    }
}

fn weighted_dot(a: &[f64], b: &[f64], h: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * h
}

/// Number of eigenvalues strictly below `x` (LDLᵀ pivot signs).
pub fn sturm_count(diag: &[f64], offdiag: &[f64], x: f64, pivot_min: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let coupling = if i > 0 { offdiag[i - 1] * offdiag[i - 1] / q } else { 0.0 };
        q = diag[i] - x - coupling;
        if q.abs() < pivot_min {
            q = -pivot_min;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// The `k` smallest eigenvalues by bisection on the Sturm count.
pub fn bisection_lowest(diag: &[f64], offdiag: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let left = if i > 0 { offdiag[i - 1].abs() } else { 0.0 };
        let right = if i + 1 < n { offdiag[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - left - right);
        hi = hi.max(diag[i] + left + right);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivot_min = f64::MIN_POSITIVE.max(f64::EPSILON * f64::EPSILON * scale);
    let mut values = Vec::with_capacity(k);
    for j in 0..k.min(n) {
        // Smallest x with count(x) > j.
        let (mut a, mut b) = (lo, hi);
        while b - a > 2.0 * f64::EPSILON * a.abs().max(b.abs()) + pivot_min {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, offdiag, mid, pivot_min) > j {
                b = mid;
            } else {
                a = mid;
            }
        }
        values.push(0.5 * (a + b));
    }
    values
}

const QL_MAX_SWEEPS: usize = 60;

/// All eigenvalues by implicit-shift QL, ascending.
pub fn ql_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n.saturating_sub(1)].copy_from_slice(&offdiag[..n.saturating_sub(1)]);

    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > QL_MAX_SWEEPS {
                return Err(Error::argument(format!("QL failed to converge at index {l}")));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + libm::copysign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(f64::total_cmp);
    Ok(d)
}

/// LU of `T − μ I` with partial pivoting; `u0` diagonal, `u1`, `u2` super-diagonals.
struct PivotedLu {
    l: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl PivotedLu {
    fn factor(op: &TridiagonalOperator, shift: f64, pivot_floor: f64) -> Self {
        let n = op.len();
        let mut d: Vec<f64> = op.diag.iter().map(|x| x - shift).collect();
        let mut du = op.offdiag.clone();
        let dl = op.offdiag.clone();
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].abs() >= dl[i].abs() {
                if d[i].abs() < pivot_floor {
                    d[i] = pivot_floor;
                }
                let f = dl[i] / d[i];
                l[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                // Swap rows i and i+1.
                let f = d[i] / dl[i];
                d[i] = dl[i];
                l[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 2 < n {
                    u2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        if let Some(last) = d.last_mut() {
            if last.abs() < pivot_floor {
                *last = pivot_floor;
            }
        }
        PivotedLu { l, u0: d, u1: du, u2, swapped }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = b.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= self.l[i] * b[i];
        }
        for i in (0..n).rev() {
            let mut acc = b[i];
            if i + 1 < n {
                acc -= self.u1[i] * b[i + 1];
            }
            if i + 2 < n {
                acc -= self.u2[i] * b[i + 2];
            }
            b[i] = acc / self.u0[i];
        }
    }
}

const INVERSE_ITERATIONS: usize = 4;

fn normalize(v: &mut [f64], h: f64) {
    let norm = libm::sqrt(weighted_dot(v, v, h));
    v.iter_mut().for_each(|x| *x /= norm);
}

/// Scale so the outermost lobe toward `+∞` is positive.
fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(&tail) = v.iter().rev().find(|x| x.abs() > 1e-3 * peak) {
        if tail < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

fn inverse_iteration(op: &TridiagonalOperator, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
    let n = op.len();
    let h = op.grid.spacing();
    let floor = f64::EPSILON * op.norm_bound().max(f64::MIN_POSITIVE);
    let lu = PivotedLu::factor(op, lambda, floor);
    // Deterministic start vector with components along every eigenvector.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * libm::sin(0.37 * i as f64 + 0.1)).collect();
    for _ in 0..INVERSE_ITERATIONS {
        lu.solve(&mut v);
        for p in previous {
            let c = weighted_dot(&v, p, h);
            v.iter_mut().zip(p).for_each(|(x, y)| *x -= c * y);
        }
        normalize(&mut v, h);
    }
    fix_sign(&mut v);
    v
}

/// The `k` lowest eigenpairs with the default method.
pub fn lowest_eigenpairs(op: &TridiagonalOperator, k: usize) -> Result<EigenResult> {
    lowest_eigenpairs_with(op, k, EigenMethod::default())
}

pub fn lowest_eigenpairs_with(op: &TridiagonalOperator, k: usize, method: EigenMethod) -> Result<EigenResult> {
    let n = op.len();
    if k == 0 || k > n / 4 {
        return Err(Error::argument(format!(
            "requested {k} eigenpairs; need 1 <= k <= n_points/4 = {}",
            n / 4
        )));
    }
    let values = match method {
        EigenMethod::ImplicitQl => {
            let mut all = ql_eigenvalues(&op.diag, &op.offdiag)?;
            all.truncate(k);
            all
        }
        EigenMethod::SturmBisection => bisection_lowest(&op.diag, &op.offdiag, k),
    };
    let h = op.grid.spacing();
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(k);
    let mut residual_norms = Vec::with_capacity(k);
    for &lambda in &values {
        let v = inverse_iteration(op, lambda, &vectors);
        let hv = op.apply(&v);
        let r: f64 = hv.iter().zip(&v).map(|(a, b)| (a - lambda * b) * (a - lambda * b)).sum();
        residual_norms.push(libm::sqrt(r * h));
        vectors.push(v);
    }
    Ok(EigenResult { values, vectors, residual_norms, grid: op.grid })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelDeviation {
    pub n: usize,
    pub numeric: f64,
    /// `(n + ½) ħ ω_c`.
    pub analytic: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    /// `1 − |⟨v_n|φ_n⟩|`.
    pub overlap_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeviationReport {
    pub levels: Vec<LevelDeviation>,
    /// `ħ² kx² / 2m`, to be added for the full dispersion `E_n(kx)`.
    pub kinetic_offset: f64,
}

impl DeviationReport {
    pub fn max_rel_error(&self) -> f64 {
        self.levels.iter().fold(0.0, |m, l| m.max(l.rel_error))
    }

    pub fn max_overlap_error(&self) -> f64 {
        self.levels.iter().fold(0.0, |m, l| m.max(l.overlap_error))
    }
}

/// Per-level comparison of a numerical spectrum with `(n + ½) ħ ω_c` and `φ_n`.
pub fn compare_to_analytic(res: &EigenResult, params: &PhysParams, s: Sector) -> Result<DeviationReport> {
    compare_levels(res, params, s, res.values.len())
}

/// As [`compare_to_analytic`] but insisting on exactly `expected_levels` levels.
pub fn compare_levels(res: &EigenResult, params: &PhysParams, s: Sector, expected_levels: usize) -> Result<DeviationReport> {
    if res.values.len() != expected_levels || res.vectors.len() != expected_levels {
        return Err(Error::argument(format!(
            "level-count mismatch: result has {} values and {} vectors, expected {expected_levels}",
            res.values.len(),
            res.vectors.len()
        )));
    }
    let omega = sector_frequency(params, s)?;
    let grid = res.grid.points();
    let h = res.grid.spacing();
    let levels = res
        .values
        .iter()
        .zip(&res.vectors)
        .enumerate()
        .map(|(n, (&numeric, v))| {
            let analytic = params.hbar * omega * (n as f64 + 0.5);
            let phi = eigenfunction(params, s, n, &grid)?.values;
            let phi_norm = libm::sqrt(weighted_dot(&phi, &phi, h));
            let overlap = weighted_dot(v, &phi, h).abs() / phi_norm;
            let abs_error = (numeric - analytic).abs();
            Ok(LevelDeviation {
                n,
                numeric,
                analytic,
                abs_error,
                rel_error: abs_error / analytic,
                overlap_error: 1.0 - overlap,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DeviationReport { levels, kinetic_offset: params.kinetic_energy(s.kx) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n_points: usize,
    /// Spacing in oscillator lengths.
    pub spacing: f64,
    pub max_rel_error: f64,
    /// Error of the previous (coarser) row divided by this one.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Half-extent used, in oscillator lengths.
    pub extent: f64,
    /// Least-squares slope of `log error` against `log h`.
    pub fitted_order: f64,
    /// True when enlarging the box changes the finest-grid error by more
    /// than 10%, i.e. the error is dominated by the finite extent.
    pub truncation_dominated: bool,
}

/// Default half-extent for `k` levels, in oscillator lengths.
pub fn default_extent(k: usize) -> f64 {
    libm::sqrt(2.0 * k as f64 + 1.0) + crate::fields::DEFAULT_GRID_MARGIN
}

fn max_rel_error_on(params: &PhysParams, s: Sector, grid: &Grid1D, k: usize) -> Result<f64> {
    let op = build_effective_1d(params, s, grid)?;
    let omega = sector_frequency(params, s)?;
    let values = {
        let mut all = ql_eigenvalues(&op.diag, &op.offdiag)?;
        all.truncate(k);
        all
    };
    Ok(values
        .iter()
        .enumerate()
        .map(|(n, v)| {
            let exact = params.hbar * omega * (n as f64 + 0.5);
            (v - exact).abs() / exact
        })
        .fold(0.0, f64::max))
}

/// Maximum relative eigenvalue error of the lowest `k` levels for each grid size.
///
/// `extent` is the half-width in oscillator lengths; `None` uses [`default_extent`].
pub fn convergence_study(
    params: &PhysParams,
    s: Sector,
    n_points_list: &[usize],
    k: usize,
    extent: Option<f64>,
) -> Result<ConvergenceTable> {
    if n_points_list.is_empty() {
        return Err(Error::argument("convergence study needs at least one grid size"));
    }
    if n_points_list.windows(2).any(|w| w[1] <= w[0]) || n_points_list[0] < 64 {
        return Err(Error::argument("grid sizes must be ascending and at least 64"));
    }
    let omega = sector_frequency(params, s)?;
    let ell = libm::sqrt(params.hbar / (params.mass * omega));
    let extent = extent.unwrap_or_else(|| default_extent(k));
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(n_points_list.len());
    for &n_points in n_points_list {
        let grid = Grid1D::symmetric(extent * ell, n_points)?;
        let err = max_rel_error_on(params, s, &grid, k)?;
        let ratio = rows.last().map(|prev| prev.max_rel_error / err);
        rows.push(ConvergenceRow { n_points, spacing: grid.spacing() / ell, max_rel_error: err, ratio });
    }

    // Least squares in log-log.
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.max_rel_error > 0.0)
        .map(|r| (libm::log(r.spacing), libm::log(r.max_rel_error)))
        .collect();
    let fitted_order = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    } else {
        f64::NAN
    };

    // Re-run the finest spacing on a box four lengths wider.
    let finest = rows.last().expect("non-empty");
    let wider_extent = extent + 4.0;
    let wider_points = libm::round(2.0 * wider_extent / finest.spacing) as usize + 1;
    let wider = Grid1D::symmetric(wider_extent * ell, wider_points)?;
    let wider_err = max_rel_error_on(params, s, &wider, k)?;
    let truncation_dominated = (finest.max_rel_error - wider_err).abs() > 0.1 * wider_err;

    Ok(ConvergenceTable { rows, extent, fitted_order, truncation_dominated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::Spin;

    fn oscillator(extent: f64, n: usize) -> (PhysParams, Sector, TridiagonalOperator) {
        let p = PhysParams::oscillator_units(1.0);
        let s = Sector::new(1.0, Spin::Up);
        let g = Grid1D::symmetric(extent, n).unwrap();
        let op = build_effective_1d(&p, s, &g).unwrap();
        (p, s, op)
    }

    /// Dense Jacobi eigenvalues as an independent oracle for small matrices.
    fn jacobi_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
        let n = diag.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][i] = diag[i];
            if i + 1 < n {
                a[i][i + 1] = off[i];
                a[i + 1][i] = off[i];
            }
        }
        for _ in 0..100 {
            let mut off_norm = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off_norm += a[p][q] * a[p][q];
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
            if off_norm < 1e-30 {
                break;
            }
        }
        let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        d.sort_by(f64::total_cmp);
        d
    }

    #[test]
    fn ql_and_bisection_match_dense_oracle() {
        let diag = [4.0, -1.0, 2.5, 0.3, 7.0, 1.0, -3.0, 2.0];
        let off = [1.0, 0.5, -2.0, 0.1, 3.0, -0.7, 1.2];
        let dense = jacobi_eigenvalues(&diag, &off);
        let ql = ql_eigenvalues(&diag, &off).unwrap();
        let bis = bisection_lowest(&diag, &off, 8);
        for i in 0..8 {
            assert!((ql[i] - dense[i]).abs() < 1e-12, "{i}: {} vs {}", ql[i], dense[i]);
            assert!((bis[i] - dense[i]).abs() < 1e-12, "{i}: {} vs {}", bis[i], dense[i]);
        }
    }

    #[test]
    fn ql_handles_decoupled_blocks() {
        let diag = [3.0, 1.0, 2.0, 5.0];
        let off = [0.0, 0.0, 0.0];
        assert_eq!(ql_eigenvalues(&diag, &off).unwrap(), vec![1.0, 2.0, 3.0, 5.0]);
    }

    #[test]
    fn sturm_count_brackets() {
        let diag = [2.0, 2.0, 2.0];
        let off = [-1.0, -1.0];
        // eigenvalues 2 - √2, 2, 2 + √2
        assert_eq!(sturm_count(&diag, &off, 0.5, 1e-300), 0);
        assert_eq!(sturm_count(&diag, &off, 1.0, 1e-300), 1);
        assert_eq!(sturm_count(&diag, &off, 2.5, 1e-300), 2);
        assert_eq!(sturm_count(&diag, &off, 4.0, 1e-300), 3);
    }

    #[test]
    fn oscillator_ladder_and_methods_agree() {
        let (_, _, op) = oscillator(10.0, 2048);
        let ql = lowest_eigenpairs_with(&op, 5, EigenMethod::ImplicitQl).unwrap();
        let bis = lowest_eigenpairs_with(&op, 5, EigenMethod::SturmBisection).unwrap();
        let h = op.grid.spacing();
        for n in 0..5 {
            let exact = n as f64 + 0.5;
            // Leading 3-point stencil error: −(h²/24)⟨p⁴⟩, ⟨p⁴⟩ = ¾(2n² + 2n + 1).
            let p4 = 0.75 * (2.0 * (n * n) as f64 + 2.0 * n as f64 + 1.0);
            let predicted = -h * h / 24.0 * p4;
            let err = ql.values[n] - exact;
            assert!((err - predicted).abs() < 0.02 * predicted.abs(), "n={n}: {err} vs {predicted}");
            assert!((ql.values[n] - bis.values[n]).abs() < 1e-10 * exact);
        }
    }

    #[test]
    fn residuals_orthonormality_positivity() {
        let (_, _, op) = oscillator(10.0, 2048);
        let res = lowest_eigenpairs(&op, 10).unwrap();
        for (lambda, r) in res.values.iter().zip(&res.residual_norms) {
            assert!(*lambda > 0.0);
            assert!(r / lambda < 1e-10, "residual {r} at {lambda}");
        }
        assert!(res.orthonormality_defect() < 1e-8);
        for w in res.values.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn parity_alternates_on_symmetric_grid() {
        let (_, _, op) = oscillator(9.0, 1024);
        let res = lowest_eigenpairs(&op, 6).unwrap();
        let n = op.len();
        for (k, v) in res.vectors.iter().enumerate() {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            let defect = (0..n).map(|i| (v[i] - sign * v[n - 1 - i]).abs()).fold(0.0, f64::max);
            assert!(defect < 1e-8, "state {k} parity defect {defect}");
        }
    }

    #[test]
    fn range_rule() {
        let op = TridiagonalOperator {
            diag: vec![1.0, 2.0],
            offdiag: vec![0.5],
            grid: Grid1D { y_min: 0.0, y_max: 1.0, n_points: 2 },
        };
        assert!(matches!(lowest_eigenpairs(&op, 1), Err(Error::Argument(_))));
        let (_, _, op) = oscillator(8.0, 64);
        assert!(lowest_eigenpairs(&op, 0).is_err());
        assert!(lowest_eigenpairs(&op, 17).is_err());
        assert!(lowest_eigenpairs(&op, 16).is_ok());
    }

    #[test]
    fn deterministic() {
        let (_, _, op) = oscillator(8.0, 512);
        assert_eq!(lowest_eigenpairs(&op, 4).unwrap(), lowest_eigenpairs(&op, 4).unwrap());
    }

    #[test]
    fn comparison_report() {
        let (p, s, op) = oscillator(default_extent(8), 2048);
        let res = lowest_eigenpairs(&op, 8).unwrap();
        let report = compare_to_analytic(&res, &p, s).unwrap();
        assert_eq!(report.levels.len(), 8);
        assert!((report.kinetic_offset - 0.5).abs() < 1e-15);
        for l in &report.levels {
            assert_eq!(l.analytic, l.n as f64 + 0.5);
            assert!(l.overlap_error < 1e-6, "n={} overlap {}", l.n, l.overlap_error);
        }
        assert!(report.max_rel_error() < 1e-4);
        assert!(compare_levels(&res, &p, s, 7).is_err());
        let unconfined = Sector::new(1.0, Spin::Down);
        assert!(compare_to_analytic(&res, &p, unconfined).unwrap_err().is_domain());
    }

    #[test]
    fn convergence_is_second_order() {
        let p = PhysParams::oscillator_units(1.0);
        let s = Sector::new(1.0, Spin::Up);
        let table = convergence_study(&p, s, &[256, 512], 4, None).unwrap();
        let ratio = table.rows[1].ratio.unwrap();
        assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
        assert!(!table.truncation_dominated);
        assert!((table.fitted_order - 2.0).abs() < 0.1);
        let again = convergence_study(&p, s, &[256, 512], 4, None).unwrap();
        assert_eq!(table, again);
    }

    #[test]
    fn narrow_box_is_flagged() {
        let p = PhysParams::oscillator_units(1.0);
        let s = Sector::new(1.0, Spin::Up);
        // sqrt(2·4+1) = 3 lengths: the n = 3 state is cut off.
        let table = convergence_study(&p, s, &[256, 512], 4, Some(2.5)).unwrap();
        assert!(table.truncation_dominated);
        assert!(convergence_study(&p, s, &[512, 256], 4, None).is_err());
        assert!(convergence_study(&p, s, &[32, 64], 4, None).is_err());
    }
}
