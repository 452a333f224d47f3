//! Discrete-time quantum walk with coin `e^{−iθσ_x}`: real-space stepping,
//! the per-momentum propagator and its dispersion relation.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{dft_ring, idft_ring, Evolved, ProbabilityField, SpinorField, WindowGuard, I};
use crate::pauli::{unitarity_defect2, Mat2};

/// Coin angle, ring size and number of steps for a DTQW run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DtqwParams {
    pub theta: f64,
    pub n_sites: usize,
    pub steps: usize,
}

impl DtqwParams {
    pub fn new(theta: f64, n_sites: usize, steps: usize) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
            return Err(Error::OutOfDomain { name: "theta", value: theta });
        }
        crate::lattice::check_even(n_sites)?;
        Ok(Self { theta, n_sites, steps })
    }

    pub fn from_cos_theta(cos_theta: f64, n_sites: usize, steps: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&cos_theta) {
            return Err(Error::OutOfDomain { name: "cos_theta", value: cos_theta });
        }
        Self::new(libm::acos(cos_theta), n_sites, steps)
    }

    /// `δ = π/2 − θ`.
    pub fn delta(&self) -> f64 {
        FRAC_PI_2 - self.theta
    }

    pub fn guard(&self) -> WindowGuard {
        WindowGuard::new(self.n_sites, libm::cos(self.theta), self.steps as f64)
    }
}

/// A 2×2 matrix attached to one momentum value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumOperator2 {
    pub k: f64,
    pub matrix: Mat2,
}

impl MomentumOperator2 {
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect2(&self.matrix)
    }

    pub fn determinant(&self) -> Complex64 {
        self.matrix.determinant()
    }

    pub fn apply(&self, right: Complex64, left: Complex64) -> (Complex64, Complex64) {
        let m = &self.matrix;
        (m[(0, 0)] * right + m[(0, 1)] * left, m[(1, 0)] * right + m[(1, 1)] * left)
    }
}

/// One step: `ψ_R'(n) = cosθ ψ_R(n−1) − i sinθ ψ_L(n−1)`,
/// `ψ_L'(n) = cosθ ψ_L(n+1) − i sinθ ψ_R(n+1)`.
pub fn dtqw_step(state: &SpinorField, theta: f64) -> SpinorField {
    let n = state.n_sites();
    let (c, s) = (libm::cos(theta), libm::sin(theta));
    let (r, l) = (state.right(), state.left());
    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for i in 0..n {
        let behind = (i + n - 1) % n;
        let ahead = (i + 1) % n;
        right.push(r[behind] * c - I * s * l[behind]);
        left.push(l[ahead] * c - I * s * r[ahead]);
    }
    // finite in, finite out; sizes unchanged
    SpinorField::from_components(right, left).expect("step preserves field shape")
}

fn check_size(state: &SpinorField, params: &DtqwParams) -> Result<()> {
    if state.n_sites() != params.n_sites {
        return Err(Error::SizeMismatch { left: state.n_sites(), right: params.n_sites });
    }
    Ok(())
}

/// `τ` real-space steps.
pub fn dtqw_evolve(state: &SpinorField, params: &DtqwParams) -> Result<Evolved<SpinorField>> {
    check_size(state, params)?;
    let mut field = state.clone();
    for _ in 0..params.steps {
        field = dtqw_step(&field, params.theta);
    }
    Ok(Evolved { field, guard: params.guard() })
}

/// Densities `ρ(n, τ)` for `τ = 0..=steps`.
pub fn dtqw_densities(state: &SpinorField, theta: f64, steps: usize) -> Vec<ProbabilityField> {
    let mut field = state.clone();
    let mut out = Vec::with_capacity(steps + 1);
    out.push(field.density());
    for _ in 0..steps {
        field = dtqw_step(&field, theta);
        out.push(field.density());
    }
    out
}

/// `U(k) = e^{−ikσ_z} e^{−iθσ_x}`, written out entrywise.
pub fn momentum_propagator(k: f64, theta: f64) -> MomentumOperator2 {
    let (c, s) = (libm::cos(theta), libm::sin(theta));
    let minus = Complex64::from_polar(1.0, -k);
    let plus = Complex64::from_polar(1.0, k);
    MomentumOperator2 {
        k,
        matrix: Mat2::new(minus * c, -I * minus * s, -I * plus * s, plus * c),
    }
}

/// `U^τ` for `U ∈ SU(2)` through its eigenphases `e^{∓iω}`:
/// `U^τ = cos(τω) + sin(τω)/sin(ω) · (U − cos ω)`.
pub fn su2_power(u: &Mat2, tau: usize) -> Mat2 {
    let cos_omega = (0.5 * u.trace().re).clamp(-1.0, 1.0);
    let omega = libm::acos(cos_omega);
    let sin_omega = libm::sin(omega);
    if sin_omega.abs() < 1e-6 {
        // U = ±I up to O(sin ω); eigen-split is ill-conditioned, square instead
        let mut result = Mat2::identity();
        let mut base = *u;
        let mut e = tau;
        while e > 0 {
            if e & 1 == 1 {
                result *= base;
            }
            base = base * base;
            e >>= 1;
        }
        return result;
    }
    let t = tau as f64;
    let ratio = libm::sin(t * omega) / sin_omega;
    Mat2::identity() * Complex64::new(libm::cos(t * omega) - ratio * cos_omega, 0.0) + u * Complex64::new(ratio, 0.0)
}

/// Same evolution as [`dtqw_evolve`] computed in momentum space.
pub fn dtqw_evolve_momentum(state: &SpinorField, params: &DtqwParams) -> Result<Evolved<SpinorField>> {
    check_size(state, params)?;
    let mut phi = dft_ring(state)?;
    let grid = phi.grid;
    for m in 0..grid.len() {
        let u = momentum_propagator(grid.k(m), params.theta);
        let power = MomentumOperator2 { k: u.k, matrix: su2_power(&u.matrix, params.steps) };
        let (r, l) = power.apply(phi.components[0][m], phi.components[1][m]);
        phi.components[0][m] = r;
        phi.components[1][m] = l;
    }
    Ok(Evolved { field: idft_ring(&phi)?, guard: params.guard() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    /// Positive eigenphase, `cos ω = cos θ cos k`.
    pub omega: f64,
    pub group_velocity: f64,
}

const GROUP_VELOCITY_STEP: f64 = 1e-6;

fn eigenphase(k: f64, theta: f64) -> Result<f64> {
    let c = libm::cos(theta) * libm::cos(k);
    if libm::fabs(c) >= 1.0 {
        return Err(Error::DegenerateDispersion { k, theta });
    }
    Ok(libm::acos(c))
}

/// Eigenphase of `U(k)` and its centered-difference slope `dω/dk`.
pub fn dispersion(k: f64, theta: f64) -> Result<Dispersion> {
    if !theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::OutOfDomain { name: "theta", value: theta });
    }
    let h = GROUP_VELOCITY_STEP;
    let omega = eigenphase(k, theta)?;
    let forward = eigenphase(k + h, theta)?;
    let backward = eigenphase(k - h, theta)?;
    Ok(Dispersion { omega, group_velocity: (forward - backward) / (2.0 * h) })
}

/// Largest `|dω/dk|` over the `n`-point momentum grid.
pub fn max_group_velocity(theta: f64, n: usize) -> Result<f64> {
    let grid = crate::lattice::MomentumGrid::new(n)?;
    let mut best = 0.0f64;
    for k in grid.values() {
        best = best.max(libm::fabs(dispersion(k, theta)?.group_velocity));
    }
    Ok(best)
}

/// `ψ_R = (δ_{n,0} + δ_{n,1})/2`, `ψ_L = (δ_{n,−1} + δ_{n,0})/2`.
pub fn initial_symmetric_entangled(n_sites: usize) -> Result<SpinorField> {
    if n_sites < 8 {
        return Err(Error::LatticeTooSmall { got: n_sites, min: 8 });
    }
    let half = Complex64::new(0.5, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    SpinorField::from_fn(n_sites, |n| {
        let r = if n == 0 || n == 1 { half } else { zero };
        let l = if n == -1 || n == 0 { half } else { zero };
        (r, l)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{exp_involution2, sigma_x, sigma_z};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    fn right_mover(n_sites: usize) -> SpinorField {
        SpinorField::from_fn(n_sites, |n| {
            (if n == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }, Complex64::new(0.0, 0.0))
        })
        .unwrap()
    }

    fn only_site(state: &SpinorField, n: i64, r: Complex64, l: Complex64) {
        for i in 0..state.n_sites() {
            let m = crate::lattice::site_position(state.n_sites(), i);
            let (er, el) = if m == n { (r, l) } else { (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)) };
            assert!((state.right()[i] - er).norm() < 1e-15, "R at {m}");
            assert!((state.left()[i] - el).norm() < 1e-15, "L at {m}");
        }
    }

    #[test]
    fn step_examples() {
        let start = right_mover(16);
        let zero = Complex64::new(0.0, 0.0);
        only_site(&dtqw_step(&start, 0.0), 1, Complex64::new(1.0, 0.0), zero);
        let flipped = dtqw_step(&start, FRAC_PI_2);
        assert!((flipped.left_at(-1) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
        assert!((flipped.norm_sqr() - 1.0).abs() < 1e-15);
        let mixed = dtqw_step(&start, FRAC_PI_4);
        let r2 = core::f64::consts::FRAC_1_SQRT_2;
        assert!((mixed.right_at(1) - Complex64::new(r2, 0.0)).norm() < 1e-15);
        assert!((mixed.left_at(-1) - Complex64::new(0.0, -r2)).norm() < 1e-15);
    }

    #[test]
    fn evolve_examples() {
        let start = right_mover(16);
        let same = dtqw_evolve(&start, &DtqwParams::new(0.7, 16, 0).unwrap()).unwrap();
        assert_eq!(same.field, start);
        let twice = dtqw_evolve(&start, &DtqwParams::new(FRAC_PI_2, 16, 2).unwrap()).unwrap().field;
        only_site(&twice, 0, Complex64::new(-1.0, 0.0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn twin_peaks_follow_cos_theta() {
        let params = DtqwParams::from_cos_theta(0.25, 256, 100).unwrap();
        let start = initial_symmetric_entangled(256).unwrap();
        let real = dtqw_evolve(&start, &params).unwrap().field;
        let oracle = dtqw_evolve_momentum(&start, &params).unwrap().field;
        assert!(real.distance(&oracle).unwrap() < 1e-11);
        let rho = real.density();
        let peak = |range: core::ops::RangeInclusive<i64>| range.max_by(|a, b| rho.at(*a).total_cmp(&rho.at(*b))).unwrap();
        let right_peak = peak(1..=60);
        let left_peak = peak(-60..=-1);
        assert!((right_peak - 25).abs() <= 3, "right peak at {right_peak}");
        assert!((left_peak + 25).abs() <= 3, "left peak at {left_peak}");
    }

    #[test]
    fn propagator_matches_product_of_exponentials() {
        for (k, theta) in [(0.0, 0.0), (0.3, 1.1), (-2.0, 0.4), (FRAC_PI_2, FRAC_PI_3)] {
            let u = momentum_propagator(k, theta);
            let product = exp_involution2(&sigma_z(), k) * exp_involution2(&sigma_x(), theta);
            assert!((u.matrix - product).norm() < 1e-15);
            assert!(u.unitarity_defect() < 1e-13);
            assert!((u.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        }
        assert!((momentum_propagator(0.0, 0.0).matrix - Mat2::identity()).norm() == 0.0);
        let u = momentum_propagator(FRAC_PI_2, FRAC_PI_3);
        assert!((u.matrix[(0, 0)] - Complex64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn su2_power_matches_repeated_product() {
        for (k, theta, tau) in [(0.4, 0.9, 7), (1.3, 0.2, 40), (0.0, 0.0, 5), (0.0, 1e-9, 12)] {
            let u = momentum_propagator(k, theta).matrix;
            let mut direct = Mat2::identity();
            for _ in 0..tau {
                direct *= u;
            }
            assert!((su2_power(&u, tau) - direct).norm() < 1e-13);
        }
    }

    #[test]
    fn dispersion_examples() {
        for k in [-2.0, 0.0, 0.5, 3.0] {
            let d = dispersion(k, FRAC_PI_2).unwrap();
            assert_abs_diff_eq!(d.omega, FRAC_PI_2, epsilon = 1e-15);
            assert_abs_diff_eq!(d.group_velocity, 0.0, epsilon = 1e-9);
        }
        for theta in [0.3, 1.0, 1.4] {
            assert_abs_diff_eq!(dispersion(0.0, theta).unwrap().omega, theta, epsilon = 1e-12);
            let vmax = max_group_velocity(theta, 256).unwrap();
            assert_abs_diff_eq!(vmax, libm::cos(theta), epsilon = 1e-5);
        }
        assert!(matches!(dispersion(0.0, 0.0), Err(Error::DegenerateDispersion { .. })));
        assert!(dispersion(0.2, 2.0).is_err());
    }

    #[test]
    fn dispersion_matches_diagonalization() {
        for (k, theta) in [(0.4, 0.9), (2.2, 0.3), (-1.0, 1.2)] {
            let u = momentum_propagator(k, theta).matrix;
            // eigenvalues of a 2×2: (tr ± √(tr² − 4 det)) / 2
            let tr = u.trace();
            let det = u.determinant();
            let disc = (tr * tr - det * 4.0).sqrt();
            let lambda = (tr + disc) * 0.5;
            assert_abs_diff_eq!(lambda.arg().abs(), dispersion(k, theta).unwrap().omega, epsilon = 1e-12);
        }
    }

    #[test]
    fn initial_state() {
        let s = initial_symmetric_entangled(16).unwrap();
        assert_eq!(s.norm_sqr(), 1.0);
        let rho = s.density();
        assert_eq!((rho.at(0), rho.at(1), rho.at(-1)), (0.5, 0.25, 0.25));
        for n in -8..8 {
            assert_eq!(s.right_at(n), s.left_at(n - 1));
        }
        assert!(initial_symmetric_entangled(6).is_err());
    }

    #[test]
    fn norm_drift_over_many_steps() {
        for theta in [0.0, FRAC_PI_6, FRAC_PI_4, FRAC_PI_2 - 0.01] {
            let params = DtqwParams::new(theta, 128, 1000).unwrap();
            let out = dtqw_evolve(&initial_symmetric_entangled(128).unwrap(), &params).unwrap();
            assert!((out.field.norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn real_and_momentum_paths_agree() {
        let params = DtqwParams::new(FRAC_PI_3, 256, 100).unwrap();
        let start = initial_symmetric_entangled(256).unwrap();
        let a = dtqw_evolve(&start, &params).unwrap();
        let b = dtqw_evolve_momentum(&start, &params).unwrap();
        assert!(a.field.distance(&b.field).unwrap() < 1e-11);
        assert!(!a.wraparound_risk());
    }

    #[test]
    fn light_cone_is_exact() {
        let mut field = right_mover(128);
        for tau in 1..=40i64 {
            field = dtqw_step(&field, 0.8);
            for n in -64..64i64 {
                if n.abs() > tau {
                    assert_eq!(field.right_at(n), Complex64::new(0.0, 0.0));
                    assert_eq!(field.left_at(n), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn inversion_symmetry() {
        let start = initial_symmetric_entangled(64).unwrap();
        let params = DtqwParams::new(1.1, 64, 25).unwrap();
        let a = dtqw_evolve(&start.mirror(), &params).unwrap().field;
        let b = dtqw_evolve(&start, &params).unwrap().field.mirror();
        assert!(a.distance(&b).unwrap() < 1e-13);
    }

    #[test]
    fn guard_flags_small_rings() {
        let params = DtqwParams::from_cos_theta(0.9, 64, 100).unwrap();
        let out = dtqw_evolve(&initial_symmetric_entangled(64).unwrap(), &params).unwrap();
        assert!(out.wraparound_risk());
    }

    #[test]
    fn parameter_validation() {
        assert!(DtqwParams::new(-0.1, 16, 1).is_err());
        assert!(DtqwParams::new(0.1, 15, 1).is_err());
        assert!(DtqwParams::from_cos_theta(1.5, 16, 1).is_err());
        let params = DtqwParams::new(0.5, 16, 3).unwrap();
        assert!(dtqw_evolve(&right_mover(32), &params).is_err());
    }
}
