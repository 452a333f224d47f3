//! Acceptance criteria 1 to 10. Each test prints its sub-checks and one
//! `criterion N ...: PASS|FAIL` line, then asserts.
//!
//! Run with `cargo test -p qwalk-lab --test acceptance -- --nocapture --test-threads 1`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, FRAC_PI_6, FRAC_PI_8, PI};
use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use qwalk_core::asymptotics::{empirical_density_compare, parity_smoothed_density, WeakLimitDensity};
use qwalk_core::bessel::bessel_i_scaled;
use qwalk_core::classical::{
    classical_limit_evolve, combined_density_diffusion_check, diffusion_evolve, persistent_evolve, persistent_two_step_check,
    PersistentParams,
};
use qwalk_core::ctqw::{chiral_decompose, ctqw_analytic_field, ctqw_evolve, limit_analytic_field, limit_pair_evolve, CtqwParams};
use qwalk_core::dtqw::{dtqw_evolve, initial_symmetric_entangled, DtqwParams};
use qwalk_core::fit::log_log_slope;
use qwalk_core::highdim::{ctqw3d_evolve, effective_generator_3d, footnote_hamiltonian_3d, zeroth_order_defect, Ordering, Scalar3DField};
use qwalk_core::lattice::{site_index, site_position};
use qwalk_core::limit::{bch_scan, coinless_spectral_equivalence, convergence_scan, even_odd_split, laplacian_hamiltonian};
use qwalk_core::pauli::hermitian_eigenvalues;
use qwalk_core::{ChiralProbability, Complex64, ProbabilityField, ScalarWaveField, SpinorField};
use qwalk_lab::io::read_surface;
use qwalk_lab::{run_figure1, Figure1Config};

struct Criterion {
    id: u32,
    name: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: u32, name: &'static str) -> Self {
        Self { id, name, checks: Vec::new() }
    }

    fn check(&mut self, label: impl Into<String>, ok: bool) {
        self.checks.push((label.into(), ok));
    }

    fn finish(self) {
        for (label, ok) in &self.checks {
            println!("    [{}] {label}", if *ok { "ok" } else { "FAIL" });
        }
        let pass = self.checks.iter().all(|(_, ok)| *ok);
        println!("criterion {} {}: {}", self.id, self.name, if pass { "PASS" } else { "FAIL" });
        let failed: Vec<&str> = self.checks.iter().filter(|(_, ok)| !ok).map(|(l, _)| l.as_str()).collect();
        assert!(pass, "criterion {} failed: {failed:?}", self.id);
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ring_for(reach: f64) -> usize {
    (2 * reach.ceil() as usize + 80).div_ceil(4) * 4
}

#[test]
fn criterion_01_conservation() {
    let mut cr = Criterion::new(1, "unitarity and conservation");

    let start = initial_symmetric_entangled(2048).unwrap();
    for theta in [FRAC_PI_8, FRAC_PI_4, FRAC_PI_3, FRAC_PI_2 - 0.05] {
        let params = DtqwParams::new(theta, 2048, 1000).unwrap();
        let drift = (dtqw_evolve(&start, &params).unwrap().field.norm_sqr() - 1.0).abs();
        cr.check(format!("dtqw theta={theta:.4} N=2048 1000 steps: drift {drift:.2e} <= 1e-12"), drift <= 1e-12);
    }

    let delta = ScalarWaveField::delta(1024, 0).unwrap();
    let pair_start = initial_symmetric_entangled(1024).unwrap();
    for t in [1.0, 100.0, 1000.0] {
        let p = CtqwParams::new(0.125, t).unwrap();
        let scalar = (ctqw_evolve(&delta, &p).unwrap().field.norm_sqr() - 1.0).abs();
        let pair = (limit_pair_evolve(&pair_start, &p).unwrap().field.norm_sqr() - 1.0).abs();
        cr.check(format!("ctqw t={t} N=1024: drift {scalar:.2e} <= 1e-13"), scalar <= 1e-13);
        cr.check(format!("limit system t={t} N=1024: drift {pair:.2e} <= 1e-13"), pair <= 1e-13);
    }

    let chiral = ChiralProbability::delta_right(256, 0).unwrap();
    for alpha in [0.0, 0.1, 0.5, 0.9, 1.0] {
        let out = persistent_evolve(&chiral, alpha, 10_000).unwrap();
        let drift = (out.total() - 1.0).abs();
        cr.check(
            format!("persistent alpha={alpha} 1e4 steps: drift {drift:.2e}, min {:.2e}", out.min_value()),
            drift <= 1e-12 && out.min_value() >= -1e-14,
        );
    }
    for t in [1.0, 50.0, 400.0] {
        let out = classical_limit_evolve(&chiral, 0.125, t).unwrap();
        let drift = (out.total() - 1.0).abs();
        cr.check(
            format!("classical limit t={t}: drift {drift:.2e}, min {:.2e}", out.min_value()),
            drift <= 1e-12 && out.min_value() >= -1e-14,
        );
        let diff = diffusion_evolve(&ProbabilityField::delta(256, 0).unwrap(), 0.125, t).unwrap();
        let drift = (diff.total() - 1.0).abs();
        cr.check(
            format!("diffusion t={t}: drift {drift:.2e}, min {:.2e}", diff.min_value()),
            drift <= 1e-12 && diff.min_value() >= -1e-14,
        );
    }
    cr.finish();
}

#[test]
fn criterion_02_closed_forms() {
    let mut cr = Criterion::new(2, "closed-form oracles");

    let p = CtqwParams::new(0.125, 100.0).unwrap();
    let numeric = ctqw_evolve(&ScalarWaveField::delta(512, 0).unwrap(), &p).unwrap().field;
    let exact = ctqw_analytic_field(512, &p).unwrap();
    let worst = numeric.amplitudes().iter().zip(exact.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    cr.check(format!("ctqw vs e^(-2iγt) i^n J_n(2γt), N=512 t=100: max {worst:.2e} <= 1e-10"), worst <= 1e-10);

    for t in [25.0, 100.0] {
        let p = CtqwParams::new(0.125, t).unwrap();
        let numeric = limit_pair_evolve(&initial_symmetric_entangled(512).unwrap(), &p).unwrap().field;
        let exact = limit_analytic_field(512, &p).unwrap();
        let worst = (0..512)
            .map(|i| (numeric.right()[i] - exact.right()[i]).norm().max((numeric.left()[i] - exact.left()[i]).norm()))
            .fold(0.0, f64::max);
        cr.check(format!("limit system vs Bessel solution t={t}: max {worst:.2e} <= 1e-9"), worst <= 1e-9);
    }

    let (gamma, t) = (0.125, 40.0);
    let numeric = diffusion_evolve(&ProbabilityField::delta(256, 0).unwrap(), gamma, t).unwrap();
    let worst = (0..256)
        .map(|i| {
            let n = site_position(256, i);
            (numeric.values()[i] - bessel_i_scaled(n, 2.0 * gamma * t).unwrap()).abs()
        })
        .fold(0.0, f64::max);
    cr.check(format!("diffusion vs e^(-2γt) I_n(2γt) at 2γt=10: max {worst:.2e} <= 1e-10"), worst <= 1e-10);
    cr.finish();
}

#[test]
fn criterion_03_bch_order() {
    let mut cr = Criterion::new(3, "second-order expansion residual");
    let clock = Instant::now();
    let scan = bch_scan(&[0.1, 0.05, 0.025, 0.0125], 32).unwrap();
    let elapsed = clock.elapsed().as_secs_f64();
    cr.check(format!("fitted slope {:.4} in 2.0 ± 0.1", scan.fitted_slope), (scan.fitted_slope - 2.0).abs() <= 0.1);
    cr.check(format!("runtime {elapsed:.3} s < 1 s"), elapsed < 1.0);
    cr.finish();
}

#[test]
fn criterion_04_limit_convergence() {
    let mut cr = Criterion::new(4, "coined walk converges to the limit system");
    let start = initial_symmetric_entangled(128).unwrap();
    for time in [4.0, 8.0, 16.0] {
        let scan = convergence_scan(0.125, time, &[40, 80, 160, 320], &start).unwrap();
        let slope = scan.fitted_slope.unwrap_or(f64::NAN);
        let errors: Vec<String> = scan.entries.iter().map(|e| format!("{:.3e}", e.state_error)).collect();
        cr.check(format!("2γt={}: errors [{}], slope {slope:.4} in 1.0 ± 0.15", 0.25 * time, errors.join(", ")), (slope - 1.0).abs() <= 0.15);
        cr.check(format!("2γt={}: errors strictly decrease in tau", 0.25 * time), scan.strictly_decreasing());
        cr.check(format!("2γt={}: no wraparound", 0.25 * time), !scan.wraparound_risk);
    }
    cr.finish();
}

#[test]
fn criterion_05_chiral_structure() {
    let mut cr = Criterion::new(5, "chiral components");
    let gamma = 0.125;
    let start = initial_symmetric_entangled(256).unwrap();
    let mut worst: f64 = 0.0;
    for step in 0..=20 {
        let t = 5.0 * step as f64;
        let out = limit_pair_evolve(&start, &CtqwParams::new(gamma, t).unwrap()).unwrap().field;
        worst = worst.max(chiral_decompose(&out, gamma, t).unwrap().minus.norm_sqr().sqrt());
    }
    cr.check(format!("max ||Ψ-(t)|| over t=0..100: {worst:.2e} <= 1e-12"), worst <= 1e-12);

    let scrambled = SpinorField::from_fn(64, |n| {
        let x = n as f64;
        (c((0.3 * x).sin() * (-x * x / 40.0).exp(), 0.1 * (x / 5.0).cos()), c(0.2 * (-x * x / 30.0).exp(), (0.7 * x).sin() * 0.05))
    })
    .unwrap();
    let (t0, dt) = (2.5, 11.0);
    let evolved = limit_pair_evolve(&scrambled, &CtqwParams::new(gamma, dt).unwrap()).unwrap().field;
    let after = chiral_decompose(&evolved, gamma, t0 + dt).unwrap();
    let before = chiral_decompose(&scrambled, gamma, t0).unwrap().evolve(dt).unwrap();
    let gap = after.plus.distance(&before.plus).unwrap().max(after.minus.distance(&before.minus).unwrap());
    cr.check(format!("decompose/evolve commute: {gap:.2e} <= 1e-12"), gap <= 1e-12);
    cr.finish();
}

/// Composite three-point Gauss-Legendre rule in `u` with `x = R sin u`.
fn integrate_density(d: &WeakLimitDensity) -> f64 {
    let r = d.reach();
    let f = |u: f64| d.density(r * u.sin()) * r * u.cos();
    let m = 4000;
    let h = PI / m as f64;
    let node = 0.6f64.sqrt() * 0.5 * h;
    (0..m)
        .map(|j| {
            let mid = -FRAC_PI_2 + (j as f64 + 0.5) * h;
            h / 18.0 * (5.0 * f(mid - node) + 8.0 * f(mid) + 5.0 * f(mid + node))
        })
        .sum()
}

fn ctqw_weak_distance(t: f64) -> f64 {
    let gamma = 0.125;
    let analytic = WeakLimitDensity::ctqw(gamma, t).unwrap();
    let n = ring_for(analytic.reach());
    let rho = ctqw_evolve(&ScalarWaveField::delta(n, 0).unwrap(), &CtqwParams::new(gamma, t).unwrap()).unwrap().field.density();
    empirical_density_compare(&rho, &analytic, 0.9).unwrap().distance
}

fn dtqw_weak_distance(tau: usize) -> f64 {
    let theta = 0.5f64.acos();
    let analytic = WeakLimitDensity::dtqw(theta, tau as f64 + 0.5).unwrap();
    let n = ring_for(analytic.reach() + 1.0);
    let rho = parity_smoothed_density(&initial_symmetric_entangled(n).unwrap(), theta, tau);
    empirical_density_compare(&rho, &analytic, 0.9).unwrap().distance
}

#[test]
fn criterion_06_weak_limits() {
    let mut cr = Criterion::new(6, "long-time densities");
    for (label, d) in [
        ("ctqw gamma=1/8 t=100", WeakLimitDensity::ctqw(0.125, 100.0).unwrap()),
        ("dtqw cos theta=1/4 tau=100", WeakLimitDensity::dtqw(0.25f64.acos(), 100.0).unwrap()),
        ("dtqw cos theta=1/2 tau=1000", WeakLimitDensity::dtqw(0.5f64.acos(), 1000.0).unwrap()),
    ] {
        let total = integrate_density(&d);
        cr.check(format!("{label}: integral {total:.9} = 1 ± 1e-6"), (total - 1.0).abs() <= 1e-6);
    }
    let (c500, c1000, c2000) = (ctqw_weak_distance(500.0), ctqw_weak_distance(1000.0), ctqw_weak_distance(2000.0));
    cr.check(format!("ctqw binned L1 at t=1000: {c1000:.4} <= 0.05"), c1000 <= 0.05);
    cr.check(format!("ctqw L1 t=2000 {c2000:.4} < t=500 {c500:.4}"), c2000 < c500);
    let (d500, d1000, d2000) = (dtqw_weak_distance(500), dtqw_weak_distance(1000), dtqw_weak_distance(2000));
    cr.check(format!("dtqw (cos theta=1/2, parity-smoothed) binned L1 at tau=1000: {d1000:.4} <= 0.05"), d1000 <= 0.05);
    cr.check(format!("dtqw L1 tau=2000 {d2000:.4} < tau=500 {d500:.4}"), d2000 < d500);
    cr.finish();
}

#[test]
fn criterion_07_classical_chain() {
    let mut cr = Criterion::new(7, "classical limit chain");
    let lumpy = ChiralProbability::from_fn(64, |n| {
        let x = n as f64;
        (1.0 + (0.9 * x).sin().abs() * (-x * x / 20.0).exp(), 0.5 + (0.4 * x).cos().powi(2))
    })
    .unwrap();
    let total = lumpy.total();
    let lumpy = ChiralProbability::from_components(
        lumpy.right().iter().map(|v| v / total).collect(),
        lumpy.left().iter().map(|v| v / total).collect(),
    )
    .unwrap();
    let worst = [0.0, 0.2, 0.5, 0.8, 1.0].iter().map(|a| persistent_two_step_check(&lumpy, *a).unwrap()).fold(0.0, f64::max);
    cr.check(format!("two-step identity defect {worst:.2e} <= 1e-14"), worst <= 1e-14);

    let (gamma, t, dt) = (0.125, 20.0, 1e-3);
    let start = ChiralProbability::delta_right(64, 0).unwrap();
    let alpha = PersistentParams::from_rate(gamma, dt).unwrap().alpha();
    let walked = persistent_evolve(&start, alpha, (t / dt).round() as usize).unwrap();
    let exact = classical_limit_evolve(&start, gamma, t).unwrap();
    let gap = walked.l1_distance(&exact).unwrap();
    cr.check(format!("limit vs persistent walk (dt=1e-3, t=20): L1 {gap:.2e} <= 1e-3"), gap <= 1e-3);

    let defect = combined_density_diffusion_check(&ChiralProbability::delta_right(128, 0).unwrap(), gamma, 40.0).unwrap();
    cr.check(format!("combined density obeys lattice diffusion: {defect:.2e} <= 1e-10"), defect <= 1e-10);
    let defect = combined_density_diffusion_check(&lumpy, 0.3, 7.0).unwrap();
    cr.check(format!("same for a spread-out start: {defect:.2e} <= 1e-10"), defect <= 1e-10);
    cr.finish();
}

#[test]
fn criterion_08_coinless() {
    let mut cr = Criterion::new(8, "coinless walk");
    for n in [8, 16, 32] {
        let (even, odd) = even_odd_split(n).unwrap();
        let full = laplacian_hamiltonian(n).unwrap();
        let sum = even.sum(&odd).unwrap();
        let exact = (0..n).all(|i| (0..n).all(|j| sum.get(i, j) == full.get(i, j)));
        cr.check(format!("N={n}: even + odd = H exactly"), exact);
        for theta in [FRAC_PI_6, FRAC_PI_3] {
            let d = coinless_spectral_equivalence(theta, n).unwrap();
            cr.check(format!("N={n} theta={theta:.4}: spectral distance {d:.2e} <= 1e-10"), d <= 1e-10);
        }
    }
    cr.finish();
}

#[test]
fn criterion_09_three_dimensions() {
    let mut cr = Criterion::new(9, "three dimensions");
    let gamma = 0.125;
    let mut worst: f64 = 0.0;
    for a in 0..7 {
        for b in 0..7 {
            for d in 0..7 {
                let k = [-PI + (a as f64 + 0.5) * 2.0 * PI / 7.0, -PI + (b as f64 + 0.3) * 2.0 * PI / 7.0, -PI + (d as f64 + 0.1) * 2.0 * PI / 7.0];
                let e = 2.0 * gamma * (k[0].cos() * k[1].cos() * k[2].cos()).abs();
                let ev = hermitian_eigenvalues(&footnote_hamiltonian_3d(k, gamma).to_dense());
                for (got, want) in ev.iter().zip([-e, -e, e, e]) {
                    worst = worst.max((got - want).abs());
                }
            }
        }
    }
    cr.check(format!("eigenvalues ±2γΠcos k on a 7^3 grid: max {worst:.2e} <= 1e-13"), worst <= 1e-13);

    let grid: Vec<f64> = (0..5).map(|j| -PI + (j as f64 + 0.5) * 2.0 * PI / 5.0).collect();
    let (mut sym, mut naive): (f64, f64) = (0.0, 0.0);
    for &x in &grid {
        for &y in &grid {
            for &z in &grid {
                sym = sym.max(zeroth_order_defect([x, y, z], Ordering::Symmetric));
                naive = naive.max(zeroth_order_defect([x, y, z], Ordering::Naive));
            }
        }
    }
    cr.check(format!("symmetric zeroth-order defect on 5^3 grid: max {sym:.2e} <= 1e-13"), sym <= 1e-13);
    cr.check(format!("naive zeroth-order defect on 5^3 grid: max {naive:.3} >= 0.1"), naive >= 0.1);

    let k = [0.5, 0.7, 0.9];
    let h = footnote_hamiltonian_3d(k, gamma).matrix;
    let deltas = [0.04, 0.02, 0.01, 0.005];
    let errors: Vec<f64> =
        deltas.iter().map(|d| (effective_generator_3d(k, *d, gamma, Ordering::Symmetric).unwrap().matrix - h).norm()).collect();
    let slope = log_log_slope(&deltas, &errors).unwrap();
    cr.check(format!("effective generator error slope {slope:.4} in 1.0 ± 0.2"), (slope - 1.0).abs() <= 0.2);

    // dense oracle: e^{-iHt} from the eigen-decomposition of the 512×512 lattice operator
    let (n, t) = (8usize, 6.0);
    let total = n * n * n;
    let index = |p: [i64; 3]| (site_index(n, p[0]) * n + site_index(n, p[1])) * n + site_index(n, p[2]);
    let mut hmat = DMatrix::<Complex64>::zeros(total, total);
    for i in 0..total {
        let p = [site_position(n, i / (n * n)), site_position(n, (i / n) % n), site_position(n, i % n)];
        for dx in [-1, 1] {
            for dy in [-1, 1] {
                for dz in [-1, 1] {
                    hmat[(i, index([p[0] + dx, p[1] + dy, p[2] + dz]))] += c(-gamma / 4.0, 0.0);
                }
            }
        }
    }
    let eig = SymmetricEigen::new(hmat);
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| c((e * t).cos(), -(e * t).sin())));
    let u = &eig.eigenvectors * phases * eig.eigenvectors.adjoint();
    let raw = Scalar3DField::from_fn([n; 3], |p| c((-0.2 * (p[0] * p[0] + 2 * p[1] * p[1]) as f64).exp(), 0.15 * p[2] as f64)).unwrap();
    let scale = 1.0 / raw.norm_sqr().sqrt();
    let state = Scalar3DField::from_fn([n; 3], |p| raw.at(p) * scale).unwrap();
    let want = u * DVector::from_column_slice(state.amplitudes());
    let got = ctqw3d_evolve(&state, gamma, t).unwrap().field;
    let gap = got.amplitudes().iter().zip(want.iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    cr.check(format!("3D walk vs dense exponential on 8^3: {gap:.2e} <= 1e-10"), gap <= 1e-10);
    let drift = (got.norm_sqr() - 1.0).abs();
    cr.check(format!("3D norm drift {drift:.2e} <= 1e-12"), drift <= 1e-12);
    cr.finish();
}

#[test]
fn criterion_10_figure1() {
    let mut cr = Criterion::new(10, "figure 1 reproduction");
    let config = Figure1Config::default();
    let out = run_figure1(&config).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let written = out.write_to(dir.path()).unwrap();
    for tag in ["a", "b", "c"] {
        let csv = dir.path().join(format!("panel_{tag}.csv"));
        let svg = dir.path().join(format!("panel_{tag}.svg"));
        let surface = read_surface(std::fs::File::open(&csv).unwrap(), "panel").unwrap();
        let shape_ok = surface.times.len() == 101 && surface.positions.len() == 256;
        let rects = std::fs::read_to_string(&svg).unwrap().matches("<rect").count();
        cr.check(format!("panel ({tag}): CSV 101 x 256 surface, SVG with {rects} rects"), shape_ok && rects == 101 * 256 + 1);
    }
    cr.check(format!("{} files written", written.len()), written.len() == 7);

    cr.check(format!("L1(a, b) at t=tau=100: {:.4} <= 0.35", out.l1_a_b), out.l1_a_b <= 0.35);
    cr.check(format!("L1(b, c) at t=100: {:.4} <= 0.02", out.l1_b_c), out.l1_b_c <= 0.02);
    cr.check(
        format!("max group velocity {:.8} = cos theta ± 1e-5", out.max_group_velocity),
        (out.max_group_velocity - config.cos_theta).abs() <= 1e-5,
    );
    let front = config.cos_theta * config.t_max as f64;
    let peaks_ok = [out.peak_left, out.peak_right].iter().all(|p| {
        let x = (*p as f64).abs();
        x <= front && x >= front - 3.0
    }) && out.peak_left == -out.peak_right;
    cr.check(format!("twin peaks at {} and {} behind the fronts ±{front}", out.peak_left, out.peak_right), peaks_ok);
    cr.check(
        format!("panel (c) origin density {:.10} = J0(25)^2 {:.10}", out.rho_c_origin, out.j0_squared),
        (out.rho_c_origin - out.j0_squared).abs() <= 1e-12,
    );
    cr.finish();
}
