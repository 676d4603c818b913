//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p quasi-landau --test acceptance`.

use num_complex::Complex64;
use quasi_landau::cli::cmd_estimate;
use quasi_landau::config::{PhysInputs, Resolved, Units};
use quasi_landau::core::analytic::{spectrum_scan, Sector, Spin};
use quasi_landau::core::eigensolve::{compare_to_analytic, convergence_study, default_extent, lowest_eigenpairs};
use quasi_landau::core::fields::{apply_raw_hamiltonian, build_effective_1d, reduce_to_spin_diagonal, FieldConfig, Grid1D, PlaneSpinor};
use quasi_landau::core::thermal::{gap_visibility, smeared_spectrum, SmearingOptions, ThermalEnsemble};
use quasi_landau::core::units::cyclotron_frequency;
use quasi_landau::core::PhysParams;
use quasi_landau::dynamics::{evolve, initial_packet, EvolutionReport, EvolveOptions, Grid2D, PacketSpec, SpinState, SpinorField};
use quasi_landau::spectral::SpectralPlane;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Verdict {
    pass: bool,
    detail: String,
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn estimate_reproduction() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let run = |inputs: PhysInputs| -> serde_json::Value {
        let r = Resolved::resolve(Units::Si, inputs).unwrap();
        cmd_estimate(&r, dir.path()).unwrap();
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("estimate.json")).unwrap()).unwrap()
    };
    let a = run(PhysInputs { alpha: Some(3.6e-16), gamma: Some(1e10), vx: Some(0.1), ..Default::default() });
    let b = run(PhysInputs { beta_soc: Some(1e-20), vx: Some(0.1), ..Default::default() });
    let gap_a = a["gap_eV"].as_f64().unwrap();
    let gap_b = b["gap_eV"].as_f64().unwrap();
    let temp_b = b["temperature_K"].as_f64().unwrap();
    let (ea, eb, et) = (rel(gap_a, 5.504e-19), rel(gap_b, 2.8e-9), rel(temp_b, 3.25e-5));
    Verdict {
        pass: ea < 0.02 && eb < 0.03 && et < 0.03,
        detail: format!(
            "gap {gap_a:.4e} eV (dev {:.2}% / 2%), gap {gap_b:.4e} eV (dev {:.2}% / 3%), T {temp_b:.4e} K (dev {:.2}% / 3%)",
            100.0 * ea,
            100.0 * eb,
            100.0 * et
        ),
    }
}

fn analytic_vs_numeric() -> Verdict {
    let params = PhysParams::oscillator_units(1.0);
    let s = Sector::new(1.0, Spin::Up);
    let grid = Grid1D::default_for_levels(1.0, 8).unwrap();
    let res = lowest_eigenpairs(&build_effective_1d(&params, s, &grid).unwrap(), 8).unwrap();
    let report = compare_to_analytic(&res, &params, s).unwrap();
    let (e, o) = (report.max_rel_error(), report.max_overlap_error());
    Verdict {
        pass: e < 1e-6 && o < 1e-6,
        detail: format!(
            "{} points, extent ±{:.3}: max rel eigenvalue error {e:.3e} ({} 1e-6), max overlap error {o:.3e} ({} 1e-6)",
            grid.n_points,
            default_extent(8),
            if e < 1e-6 { "<" } else { ">=" },
            if o < 1e-6 { "<" } else { ">=" }
        ),
    }
}

fn discretization_order() -> Verdict {
    let params = PhysParams::oscillator_units(1.0);
    let table = convergence_study(&params, Sector::new(1.0, Spin::Up), &[256, 512, 1024, 2048], 8, None).unwrap();
    let ratios: Vec<f64> = table.rows.iter().filter_map(|r| r.ratio).collect();
    Verdict {
        pass: ratios.len() == 3 && ratios.iter().all(|r| (3.5..=4.5).contains(r)),
        detail: format!("ratios {:.4?}, fitted order {:.4}", ratios, table.fitted_order),
    }
}

fn random_smooth_spinor(rng: &mut impl Rng, plane: &SpectralPlane) -> PlaneSpinor {
    let mut comp = || {
        let modes: Vec<(f64, f64, Complex64)> = (0..10)
            .map(|_| {
                (
                    rng.gen_range(-6i32..=6) as f64,
                    rng.gen_range(-6i32..=6) as f64,
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                )
            })
            .collect();
        let ly = plane.y_max - plane.y_min;
        let mut f = Vec::with_capacity(plane.nx * plane.ny);
        for j in 0..plane.ny {
            let y = ly * j as f64 / plane.ny as f64;
            for i in 0..plane.nx {
                let x = plane.x_at(i);
                f.push(
                    modes
                        .iter()
                        .map(|(mx, my, c)| c * Complex64::from_polar(1.0, 2.0 * PI * (mx * x / plane.lx + my * y / ly)))
                        .sum(),
                );
            }
        }
        f
    };
    PlaneSpinor { up: comp(), down: comp() }
}

fn operator_identity() -> Verdict {
    let plane = SpectralPlane::new(64, 64, 2.0 * PI, -4.0, 4.0);
    let params = PhysParams { alpha: 0.8, gamma: 1.7, ..PhysParams::natural() };
    let field = FieldConfig::from_params(&params);
    let blocks = reduce_to_spin_diagonal(&field, &params);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let psi = random_smooth_spinor(&mut rng, &plane);
        let raw = apply_raw_hamiltonian(&field, &params, &plane, &psi);
        let red = blocks.apply(&plane, &psi);
        worst = worst.max(raw.sub(&red).l2() / red.l2());
    }
    Verdict { pass: worst < 1e-10, detail: format!("20 spinors on 64x64, worst relative mismatch {worst:.3e}") }
}

/// Documented ring channel: kx0 = 1 in oscillator units of the (kx0, +1)
/// sector, ring of 8 wavelengths, y in ±12.
fn ring(nx: usize, ny: usize) -> (Grid2D, PhysParams) {
    (Grid2D::for_wave_number(1.0, 8, nx, 12.0, ny).unwrap(), PhysParams::oscillator_units(1.0))
}

fn dichotomy_run(nx: usize, ny: usize, dt: f64, t_end: f64) -> EvolutionReport {
    let (g, p) = ring(nx, ny);
    let f = initial_packet(&g, &PacketSpec::centered(1.0, 1.0, SpinState::Superposition)).unwrap();
    let stride = (0.5 / dt).round() as usize;
    let opts = EvolveOptions { absorber: true, y_trap: 4.0, stride };
    evolve(f, &p, dt, (t_end / dt).round() as usize, &opts).unwrap().1
}

fn sector_dichotomy() -> Verdict {
    let t_end = 10.0 * 2.0 * PI;
    let base = dichotomy_run(32, 128, 0.01, t_end);
    let reference = dichotomy_run(64, 256, 0.005, t_end);
    let min_plus = base.survival_plus.iter().copied().fold(1.0, f64::min);
    let at3 = base.times.iter().position(|t| (t - 3.0).abs() < 1e-9).expect("t = 3 sampled");
    let minus3 = base.survival_minus[at3];
    let mut curve_gap = 0.0f64;
    for (i, t) in base.times.iter().enumerate() {
        let j = reference.times.iter().position(|s| (s - t).abs() < 1e-9).expect("common sample times");
        curve_gap = curve_gap
            .max((base.survival_plus[i] - reference.survival_plus[j]).abs())
            .max((base.survival_minus[i] - reference.survival_minus[j]).abs());
    }
    Verdict {
        pass: min_plus >= 0.99 && minus3 < 0.5 && curve_gap <= 1e-3,
        detail: format!(
            "confined min survival {min_plus:.8} over 10 periods, unconfined survival {minus3:.4} at t = 3/omega_c, reference gap {curve_gap:.2e}"
        ),
    }
}

fn unitarity() -> Verdict {
    let (g, p) = ring(32, 128);
    // Both components confined: spin up at +kx0, spin down at -kx0.
    let up = initial_packet(&g, &PacketSpec { kx0: 1.0, width_y: 1.0, y0: 0.7, ky0: 0.0, spin: SpinState::Up }).unwrap();
    let down = initial_packet(&g, &PacketSpec { kx0: -1.0, width_y: 1.2, y0: -0.4, ky0: 0.3, spin: SpinState::Down }).unwrap();
    let (a, b) = (0.8f64.sqrt(), 0.2f64.sqrt());
    let field = SpinorField {
        grid: g,
        psi: PlaneSpinor {
            up: up.psi.up.iter().map(|z| z * a).collect(),
            down: down.psi.down.iter().map(|z| z * b).collect(),
        },
        time: 0.0,
    };
    let (n0p, n0m) = field.norms();
    let opts = EvolveOptions { absorber: false, y_trap: 4.0, stride: 100 };
    let (_, r) = evolve(field, &p, 0.01, 10_000, &opts).unwrap();
    let total = r.norm_total.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max);
    let plus = r.norm_plus.iter().map(|n| (n - n0p).abs()).fold(0.0, f64::max);
    let minus = r.norm_minus.iter().map(|n| (n - n0m).abs()).fold(0.0, f64::max);
    Verdict {
        pass: total < 1e-10 && plus < 1e-10 && minus < 1e-10,
        detail: format!("10^4 steps: drift total {total:.2e}, plus {plus:.2e}, minus {minus:.2e}"),
    }
}

fn dispersion_shape() -> Verdict {
    let params = PhysParams::oscillator_units(1.0);
    let scan = spectrum_scan(&params, 1.0, 5, 200).unwrap();
    let mut gap_err = 0.0f64;
    let mut sqrt_err = 0.0f64;
    for (i, &kx) in scan.kx_values.iter().enumerate() {
        let omega = cyclotron_frequency(&params, kx).unwrap();
        let expected = omega / scan.omega_max;
        for n in 0..4 {
            gap_err = gap_err.max(rel(scan.bands[n + 1][i] - scan.bands[n][i], expected));
        }
        sqrt_err = sqrt_err.max(rel(cyclotron_frequency(&params, 4.0 * kx).unwrap(), 2.0 * omega));
    }
    Verdict {
        pass: gap_err < 1e-12 && sqrt_err < 1e-12,
        detail: format!("max gap deviation {gap_err:.2e}, max |omega(4k)/2omega(k) - 1| {sqrt_err:.2e}"),
    }
}

fn thermal_smearing() -> Verdict {
    let params = PhysParams::oscillator_units(1.0);
    let temps = [1e-3, 3e-3, 1e-2, 3e-2, 1e-1];
    let opts = SmearingOptions { n_levels: 5, bins: 1024, sigma_e: 0.01, energy_range: None };
    let mut vis = Vec::new();
    let mut weight_err = 0.0f64;
    for t in temps {
        let d = smeared_spectrum(&ThermalEnsemble::new(&params, t).unwrap(), &params, &opts).unwrap();
        weight_err = weight_err.max((d.total_weight() - 1.0).abs());
        vis.push(gap_visibility(&d));
    }
    let monotone = vis.windows(2).all(|w| w[1] <= w[0]);
    Verdict {
        pass: weight_err <= 1e-9 && monotone,
        detail: format!("T {temps:?}: visibility {vis:.4?}, max weight error {weight_err:.2e}"),
    }
}

type Criterion = (&'static str, Duration, fn() -> Verdict);

fn main() {
    let criteria: [Criterion; 8] = [
        ("estimate reproduction", Duration::from_secs(1), estimate_reproduction),
        ("analytic vs numeric spectrum", Duration::from_secs(10), analytic_vs_numeric),
        ("discretization order", Duration::from_secs(30), discretization_order),
        ("operator identity", Duration::from_secs(10), operator_identity),
        ("sector dichotomy", Duration::from_secs(300), sector_dichotomy),
        ("unitarity and spin conservation", Duration::from_secs(120), unitarity),
        ("dispersion shape", Duration::from_secs(1), dispersion_shape),
        ("thermal smearing", Duration::from_secs(60), thermal_smearing),
    ];
    let mut failures = 0;
    for (i, (name, budget, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let elapsed = start.elapsed();
        let ok = v.pass && elapsed < *budget;
        if !ok {
            failures += 1;
        }
        println!(
            "criterion {}: {} {name}: {} [{:.2?} / {:?}]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            elapsed,
            budget
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
