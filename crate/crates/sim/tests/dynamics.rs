use num_complex::Complex64;
use quasi_landau::core::fields::{reduce_to_spin_diagonal, FieldConfig, PlaneSpinor};
use quasi_landau::core::PhysParams;
use quasi_landau::dynamics::*;
use quasi_landau::spectral::SpectralPlane;
use std::f64::consts::PI;

const KX0: f64 = 2.0;

fn channel() -> (Grid2D, PhysParams) {
    (Grid2D::for_wave_number(KX0, 8, 32, 12.0, 128).unwrap(), PhysParams::oscillator_units(KX0))
}

fn packet(grid: &Grid2D, kx0: f64, y0: f64, spin: SpinState) -> SpinorField {
    initial_packet(grid, &PacketSpec { kx0, width_y: 1.0, y0, ky0: 0.0, spin }).unwrap()
}

/// Both components confined: `σ_z = +1` at `+kx0`, `σ_z = −1` at `−kx0`.
fn confined_pair(grid: &Grid2D) -> SpinorField {
    let up = packet(grid, KX0, 0.5, SpinState::Up);
    let down = packet(grid, -KX0, -0.3, SpinState::Down);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    SpinorField {
        grid: *grid,
        psi: PlaneSpinor {
            up: up.psi.up.iter().map(|z| z * s).collect(),
            down: down.psi.down.iter().map(|z| z * s).collect(),
        },
        time: 0.0,
    }
}

fn distance(a: &SpinorField, b: &SpinorField) -> f64 {
    a.psi.sub(&b.psi).l2() * (a.grid.hx() * a.grid.hy()).sqrt()
}

#[test]
fn ground_packet_energy_matches_dispersion() {
    let (g, p) = channel();
    let f = packet(&g, KX0, 0.0, SpinState::Up);
    let plane = SpectralPlane::new(g.nx, g.ny, g.lx, g.y_min, g.y_max);
    let op = reduce_to_spin_diagonal(&FieldConfig::from_params(&p), &p);
    let hpsi = op.apply(&plane, &f.psi);
    let e: Complex64 = f.psi.up.iter().zip(&hpsi.up).map(|(a, b)| a.conj() * b).sum::<Complex64>() * g.hx() * g.hy();
    let expected = 0.5 + KX0 * KX0 / 2.0;
    assert!((e.re - expected).abs() < 1e-6, "{e}");
    assert!(e.im.abs() < 1e-10);
}

#[test]
fn free_packet_spreads_like_closed_form() {
    let g = Grid2D::for_wave_number(KX0, 8, 32, 20.0, 256).unwrap();
    let p = PhysParams { alpha: 0.0, ..PhysParams::natural() };
    let w = 1.0;
    let f = packet(&g, KX0, 0.0, SpinState::Up);
    let dt = 0.01;
    let opts = EvolveOptions { absorber: false, y_trap: 5.0, stride: 50 };
    let (_, r) = evolve(f, &p, dt, 300, &opts).unwrap();
    for (t, width) in r.times.iter().zip(&r.width_plus) {
        let exact = w / 2f64.sqrt() * (1.0 + (t / (w * w)).powi(2)).sqrt();
        assert!((width / exact - 1.0).abs() < 1e-6, "t = {t}: {width} vs {exact}");
    }
}

#[test]
fn unitary_and_spin_conserving_over_ten_thousand_steps() {
    let (g, p) = channel();
    let f = confined_pair(&g);
    let (n0p, n0m) = f.norms();
    let spectrum0 = kx_spectrum(&f);
    let opts = EvolveOptions { absorber: false, y_trap: 4.0, stride: 500 };
    let (out, r) = evolve(f, &p, 0.01, 10_000, &opts).unwrap();
    for i in 0..r.len() {
        assert!((r.norm_total[i] - 1.0).abs() < 1e-10);
        assert!((r.norm_plus[i] - n0p).abs() < 1e-10);
        assert!((r.norm_minus[i] - n0m).abs() < 1e-10);
    }
    let spectrum1 = kx_spectrum(&out);
    let scale: f64 = spectrum0[0].iter().chain(&spectrum0[1]).sum();
    for c in 0..2 {
        for (a, b) in spectrum0[c].iter().zip(&spectrum1[c]) {
            assert!((a - b).abs() < 1e-10 * scale);
        }
    }
}

#[test]
fn kx_mixture_keeps_its_spectrum() {
    let (g, p) = channel();
    let a = packet(&g, KX0, 0.0, SpinState::Up);
    let b = packet(&g, g.allowed_kx(9), 1.0, SpinState::Up);
    let mut f = a.clone();
    for (z, w) in f.psi.up.iter_mut().zip(&b.psi.up) {
        *z = (*z + w) * 0.5;
    }
    let before = kx_spectrum(&f);
    let opts = EvolveOptions { absorber: false, y_trap: 4.0, stride: 100 };
    let (out, _) = evolve(f, &p, 0.01, 2000, &opts).unwrap();
    let after = kx_spectrum(&out);
    let scale: f64 = before[0].iter().sum();
    assert!(before[0][8] > 0.1 * scale && before[0][9] > 0.1 * scale);
    for (x, y) in before[0].iter().zip(&after[0]) {
        assert!((x - y).abs() < 1e-10 * scale);
    }
}

#[test]
fn displaced_packet_returns_after_one_period() {
    let (g, p) = channel();
    let y0 = 2.0;
    let f = packet(&g, KX0, y0, SpinState::Up);
    let steps = 700;
    let dt = 2.0 * PI / steps as f64;
    let opts = EvolveOptions { absorber: false, y_trap: 6.0, stride: 175 };
    let (_, r) = evolve(f, &p, dt, steps, &opts).unwrap();
    // Quarter periods: y0, 0, −y0, 0, y0.
    let expect = [y0, 0.0, -y0, 0.0, y0];
    for (c, e) in r.center_plus.iter().zip(expect) {
        assert!((c - e).abs() < 1e-3 * y0, "{:?}", r.center_plus);
    }
}

#[test]
fn strang_splitting_is_second_order() {
    let (g, p) = channel();
    let f = packet(&g, KX0, 1.0, SpinState::Superposition);
    let opts = EvolveOptions { absorber: false, y_trap: 4.0, stride: 1000 };
    let run = |dt: f64| evolve(f.clone(), &p, dt, (1.0 / dt).round() as usize, &opts).unwrap().0;
    let reference = run(0.00125);
    let e1 = distance(&run(0.02), &reference);
    let e2 = distance(&run(0.01), &reference);
    let ratio = e1 / e2;
    assert!((3.5..4.5).contains(&ratio), "ratio {ratio} ({e1}, {e2})");
}

#[test]
fn absorber_calibration() {
    let (g, p) = channel();
    // Fast packets are absorbed almost entirely, slow ones partly bounce.
    let fast = absorber_reflectivity(&g, &p, 6.0, 1.0, 0.01, 3.0).unwrap();
    let slow = absorber_reflectivity(&g, &p, 2.0, 1.0, 0.01, 10.0).unwrap();
    println!("absorber reflectivity: ky0 = 6 -> {fast:.3e}, ky0 = 2 -> {slow:.3e}");
    assert!(fast < 5e-3, "{fast}");
    assert!(slow < 0.5, "{slow}");
}

#[test]
fn survival_window_is_resolution_independent() {
    // Same physical packet on two resolutions: window integrals agree even
    // though the window edge falls between samples.
    let (g, _) = channel();
    let fine = Grid2D::for_wave_number(KX0, 8, 32, 12.0, 512).unwrap();
    let a = survival_probability(&packet(&g, KX0, 2.5, SpinState::Up), 3.0).unwrap().0;
    let b = survival_probability(&packet(&fine, KX0, 2.5, SpinState::Up), 3.0).unwrap().0;
    let exact = 0.5 * (erf(0.5) + erf(5.5));
    assert!((a - exact).abs() < 1e-10 && (b - exact).abs() < 1e-10, "{a} {b} {exact}");
}

fn erf(x: f64) -> f64 {
    // Simpson rule on the integrand.
    let n = 20000;
    let h = x / n as f64;
    let f = |t: f64| (-t * t).exp();
    let mut s = f(0.0) + f(x);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0 * 2.0 / PI.sqrt()
}
