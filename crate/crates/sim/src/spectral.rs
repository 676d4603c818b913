//! Fourier differentiation on a periodic plane.

use num_complex::Complex64;
use quasi_landau_core::fields::PlaneDerivatives;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::sync::Arc;

/// Angular wave numbers of an `n`-point FFT over length `l`, in FFT order.
pub fn wave_numbers(n: usize, l: f64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let j = if i < n.div_ceil(2) { i as f64 } else { i as f64 - n as f64 };
            2.0 * PI * j / l
        })
        .collect()
}

/// `nx × ny` periodic grid: `x ∈ [0, lx)`, `y ∈ [y_min, y_max)`.
pub struct SpectralPlane {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub y_min: f64,
    pub y_max: f64,
    kx: Vec<f64>,
    ky: Vec<f64>,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
}

impl SpectralPlane {
    pub fn new(nx: usize, ny: usize, lx: f64, y_min: f64, y_max: f64) -> Self {
        let mut planner = FftPlanner::new();
        SpectralPlane {
            nx,
            ny,
            lx,
            y_min,
            y_max,
            kx: wave_numbers(nx, lx),
            ky: wave_numbers(ny, y_max - y_min),
            fft_x: planner.plan_fft_forward(nx),
            ifft_x: planner.plan_fft_inverse(nx),
            fft_y: planner.plan_fft_forward(ny),
            ifft_y: planner.plan_fft_inverse(ny),
        }
    }

    pub fn hy(&self) -> f64 {
        (self.y_max - self.y_min) / self.ny as f64
    }

    pub fn hx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    pub fn x_at(&self, i: usize) -> f64 {
        self.hx() * i as f64
    }

    /// Multiply each row's x-spectrum by `factor(kx)`.
    fn along_x(&self, f: &[Complex64], factor: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let mut out = f.to_vec();
        let scale = 1.0 / self.nx as f64;
        for row in out.chunks_exact_mut(self.nx) {
            self.fft_x.process(row);
            for (z, &k) in row.iter_mut().zip(&self.kx) {
                *z *= factor(k) * scale;
            }
            self.ifft_x.process(row);
        }
        out
    }

    /// Multiply each column's y-spectrum by `factor(ky)`.
    fn along_y(&self, f: &[Complex64], factor: impl Fn(f64) -> Complex64) -> Vec<Complex64> {
        let mut out = f.to_vec();
        let mut col = vec![Complex64::new(0.0, 0.0); self.ny];
        let scale = 1.0 / self.ny as f64;
        for i in 0..self.nx {
            for (j, c) in col.iter_mut().enumerate() {
                *c = out[j * self.nx + i];
            }
            self.fft_y.process(&mut col);
            for (z, &k) in col.iter_mut().zip(&self.ky) {
                *z *= factor(k) * scale;
            }
            self.ifft_y.process(&mut col);
            for (j, c) in col.iter().enumerate() {
                out[j * self.nx + i] = *c;
            }
        }
        out
    }
}

/// `i k`, with the unpaired Nyquist mode of an even grid dropped.
fn first_derivative_symbol(k: f64, nyquist: f64) -> Complex64 {
    if (k.abs() - nyquist).abs() < 1e-9 * nyquist {
        Complex64::new(0.0, 0.0)
    } else {
        Complex64::new(0.0, k)
    }
}

impl PlaneDerivatives for SpectralPlane {
    fn nx(&self) -> usize {
        self.nx
    }

    fn ny(&self) -> usize {
        self.ny
    }

    fn y_at(&self, j: usize) -> f64 {
        self.y_min + self.hy() * j as f64
    }

    fn d_dx(&self, f: &[Complex64]) -> Vec<Complex64> {
        let nyq = PI / self.hx();
        self.along_x(f, |k| first_derivative_symbol(k, nyq))
    }

    fn d_dy(&self, f: &[Complex64]) -> Vec<Complex64> {
        let nyq = PI / self.hy();
        self.along_y(f, |k| first_derivative_symbol(k, nyq))
    }

    fn d2_dx2(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.along_x(f, |k| Complex64::new(-k * k, 0.0))
    }

    fn d2_dy2(&self, f: &[Complex64]) -> Vec<Complex64> {
        self.along_y(f, |k| Complex64::new(-k * k, 0.0))
    }
}
