//! The `θ = π/2 − δ → π/2` limit of the discrete walk: residual of the
//! single-exponential form of `U²`, the limit Hamiltonian and propagator,
//! convergence scans, and the coinless even/odd lattice splitting.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ctqw::{i_pow, limit_pair_evolve, CtqwParams};
use crate::dtqw::{dtqw_evolve, momentum_propagator, DtqwParams, MomentumOperator2};
use crate::error::{Error, Result};
use crate::fit::log_log_slope;
use crate::lattice::{check_even, site_position, MomentumGrid, SpinorField, WindowGuard};
use crate::pauli::{eigenphases, identity2, sigma_x, sigma_y, Mat2};

/// `σ_x cos k + σ_y sin k`, an involution.
fn tilted_sigma(k: f64) -> Mat2 {
    sigma_x() * Complex64::new(libm::cos(k), 0.0) + sigma_y() * Complex64::new(libm::sin(k), 0.0)
}

/// `exp(i a (σ_x cos k + σ_y sin k))`.
fn exp_tilted(k: f64, a: f64) -> Mat2 {
    identity2() * Complex64::new(libm::cos(a), 0.0) + tilted_sigma(k) * Complex64::new(0.0, libm::sin(a))
}

/// `‖U(k, π/2 − δ)² + exp[2iδ cos k (σ_x cos k + σ_y sin k)]‖_F`, which is `O(δ²)`.
pub fn bch_residual(k: f64, delta: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&delta) {
        return Err(Error::OutOfDomain { name: "delta", value: delta });
    }
    let u = momentum_propagator(k, FRAC_PI_2 - delta).matrix;
    Ok((u * u + exp_tilted(k, 2.0 * delta * libm::cos(k))).norm())
}

/// Residuals averaged over a momentum grid, with the fitted log-log order.
#[derive(Debug, Clone, PartialEq)]
pub struct BchScan {
    pub deltas: Vec<f64>,
    pub mean_residuals: Vec<f64>,
    pub fitted_slope: f64,
}

pub fn bch_scan(deltas: &[f64], k_points: usize) -> Result<BchScan> {
    let grid = MomentumGrid::new(k_points)?;
    let mean_residuals = deltas
        .iter()
        .map(|&d| {
            let total = grid.values().map(|k| bch_residual(k, d)).sum::<Result<f64>>()?;
            Ok(total / k_points as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    let fitted_slope = log_log_slope(deltas, &mean_residuals)?;
    Ok(BchScan { deltas: deltas.to_vec(), mean_residuals, fitted_slope })
}

/// `H(k) = −2γ cos k (σ_x cos k + σ_y sin k)`.
pub fn limit_hamiltonian(k: f64, gamma: f64) -> MomentumOperator2 {
    MomentumOperator2 { k, matrix: tilted_sigma(k) * Complex64::new(-2.0 * gamma * libm::cos(k), 0.0) }
}

/// `e^{−iH(k)t} = exp[2iγt cos k (σ_x cos k + σ_y sin k)]`.
pub fn limit_evolution_operator(k: f64, gamma: f64, time: f64) -> Mat2 {
    exp_tilted(k, 2.0 * gamma * time * libm::cos(k))
}

/// `e^{−iΦ} e^{−iH(k)t}` with `Φ = τπ/2`.
pub fn limit_propagator(k: f64, gamma: f64, time: f64, tau: usize) -> Result<MomentumOperator2> {
    if !tau.is_multiple_of(2) {
        return Err(Error::OddSteps(tau));
    }
    let phase = i_pow(-(tau as i64));
    Ok(MomentumOperator2 { k, matrix: limit_evolution_operator(k, gamma, time) * phase })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanEntry {
    pub delta: f64,
    pub tau: usize,
    pub state_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitScanResult {
    pub gamma: f64,
    pub time: f64,
    pub entries: Vec<ScanEntry>,
    /// Slope of `ln(error)` against `ln(δ)`; absent when an error vanishes.
    pub fitted_slope: Option<f64>,
    pub wraparound_risk: bool,
}

impl LimitScanResult {
    /// Errors strictly decrease as `τ` grows.
    pub fn strictly_decreasing(&self) -> bool {
        let mut sorted = self.entries.clone();
        sorted.sort_by_key(|e| e.tau);
        sorted.windows(2).all(|w| w[1].state_error < w[0].state_error)
    }
}

/// Compares `τ` steps of the discrete walk at `θ = π/2 − 2γt/τ` with
/// `e^{−iτπ/2}` times the limit system evolved for time `t`.
pub fn convergence_scan(gamma: f64, time: f64, taus: &[usize], initial: &SpinorField) -> Result<LimitScanResult> {
    let params = CtqwParams::new(gamma, time)?;
    if taus.is_empty() {
        return Err(Error::Invalid("convergence scan needs at least one step count"));
    }
    let target = limit_pair_evolve(initial, &params)?;
    let mut wraparound_risk = target.wraparound_risk();
    let reach = 2.0 * gamma * time;
    let mut entries = Vec::with_capacity(taus.len());
    for &tau in taus {
        if tau == 0 || tau % 2 != 0 {
            return Err(Error::OddSteps(tau));
        }
        let delta = reach / tau as f64;
        if libm::fabs(delta * tau as f64 - reach) > 1e-12 * reach.max(1.0) {
            return Err(Error::Invalid("τ·δ does not reproduce 2γt"));
        }
        let walk = DtqwParams::new(FRAC_PI_2 - delta, initial.n_sites(), tau)?;
        let discrete = dtqw_evolve(initial, &walk)?;
        wraparound_risk |= discrete.wraparound_risk();
        let reference = target.field.scaled(i_pow(-(tau as i64)));
        entries.push(ScanEntry { delta, tau, state_error: discrete.field.distance(&reference)? });
    }
    let fitted_slope = if entries.len() >= 2 && entries.iter().all(|e| e.state_error > 0.0 && e.delta > 0.0) {
        let ds: Vec<f64> = entries.iter().map(|e| e.delta).collect();
        let es: Vec<f64> = entries.iter().map(|e| e.state_error).collect();
        Some(log_log_slope(&ds, &es)?)
    } else {
        None
    };
    Ok(LimitScanResult { gamma, time, entries, fitted_slope, wraparound_risk })
}

/// Ring size needed so that the limit system for `2γt` stays clear of wraparound.
pub fn scan_guard(n_sites: usize, gamma: f64, time: f64) -> WindowGuard {
    WindowGuard::new(n_sites, 2.0 * gamma, time)
}

/// Real symmetric lattice operator on a ring, dense row-major by storage index.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeHamiltonian {
    n_sites: usize,
    entries: Vec<f64>,
    pairs: Vec<(usize, usize)>,
}

impl LatticeHamiltonian {
    fn zeros(n_sites: usize) -> Self {
        Self { n_sites, entries: vec![0.0; n_sites * n_sites], pairs: Vec::new() }
    }

    fn add(&mut self, row: usize, col: usize, value: f64) {
        self.entries[row * self.n_sites + col] += value;
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Entry between storage indices `row` and `col`.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n_sites + col]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n_sites).all(|i| (0..self.n_sites).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.chunks(self.n_sites).map(|row| row.iter().sum()).collect()
    }

    /// Disjoint site pairs that carry the 2×2 blocks (empty for the full Laplacian).
    pub fn blocks(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.n_sites != other.n_sites {
            return Err(Error::SizeMismatch { left: self.n_sites, right: other.n_sites });
        }
        Ok(Self {
            n_sites: self.n_sites,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
            pairs: Vec::new(),
        })
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n_sites, self.n_sites, |i, j| Complex64::new(self.get(i, j), 0.0))
    }

    /// `exp(iθH)` assembled from closed-form 2×2 block exponentials.
    pub fn block_exponential(&self, angle: f64) -> Result<DMatrix<Complex64>> {
        if self.pairs.len() * 2 != self.n_sites {
            return Err(Error::Invalid("operator is not block-diagonal in site pairs"));
        }
        let mut out = DMatrix::<Complex64>::zeros(self.n_sites, self.n_sites);
        for &(a, b) in &self.pairs {
            // B = m·I + [[d, o], [o, −d]], and the traceless part squares to r²·I
            let (haa, hab, hbb) = (self.get(a, a), self.get(a, b), self.get(b, b));
            let m = 0.5 * (haa + hbb);
            let d = 0.5 * (haa - hbb);
            let r = libm::sqrt(d * d + hab * hab);
            let global = Complex64::from_polar(1.0, angle * m);
            let cos = Complex64::new(libm::cos(angle * r), 0.0);
            let isinc = if r == 0.0 {
                Complex64::new(0.0, angle)
            } else {
                Complex64::new(0.0, libm::sin(angle * r) / r)
            };
            out[(a, a)] = global * (cos + isinc * d);
            out[(b, b)] = global * (cos - isinc * d);
            out[(a, b)] = global * isinc * hab;
            out[(b, a)] = global * isinc * hab;
        }
        Ok(out)
    }
}

/// `H_{n,m} = 2δ_{n,m} − δ_{n+1,m} − δ_{n−1,m}` on the ring.
pub fn laplacian_hamiltonian(n_sites: usize) -> Result<LatticeHamiltonian> {
    check_even(n_sites)?;
    let mut h = LatticeHamiltonian::zeros(n_sites);
    for i in 0..n_sites {
        h.add(i, i, 2.0);
        h.add(i, (i + 1) % n_sites, -1.0);
        h.add(i, (i + n_sites - 1) % n_sites, -1.0);
    }
    Ok(h)
}

/// `H = H^even + H^odd`: `H^even` couples each even position `n` to `n+1`,
/// `H^odd` couples each odd position `n` to `n+1`.
pub fn even_odd_split(n_sites: usize) -> Result<(LatticeHamiltonian, LatticeHamiltonian)> {
    check_even(n_sites)?;
    let build = |parity: i64| {
        let mut h = LatticeHamiltonian::zeros(n_sites);
        for i in 0..n_sites {
            let p = site_position(n_sites, i);
            let ahead = (i + 1) % n_sites;
            let behind = (i + n_sites - 1) % n_sites;
            // row n: δ_{n,m} − ½(1 ± (−1)ⁿ)δ_{n+1,m} − ½(1 ∓ (−1)ⁿ)δ_{n−1,m}
            h.add(i, i, 1.0);
            if p.rem_euclid(2) == parity {
                h.add(i, ahead, -1.0);
                h.pairs.push((i, ahead));
            } else {
                h.add(i, behind, -1.0);
            }
        }
        h
    };
    Ok((build(0), build(1)))
}

/// `U(θ₁, θ₂) = exp(iθ₂H^odd) exp(iθ₁H^even)` as a dense `N × N` matrix.
pub fn coinless_propagator(theta1: f64, theta2: f64, n_sites: usize) -> Result<DMatrix<Complex64>> {
    let (even, odd) = even_odd_split(n_sites)?;
    Ok(odd.block_exponential(theta2)? * even.block_exponential(theta1)?)
}

fn chord(a: f64, b: f64) -> f64 {
    (Complex64::from_polar(1.0, a) - Complex64::from_polar(1.0, b)).norm()
}

/// Bottleneck distance between two equal-size multisets of unit-circle
/// phases, minimized over one common rotation.
pub fn phase_multiset_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let wrap = |x: f64| {
        let r = libm::fmod(x, 2.0 * PI);
        if r < 0.0 {
            r + 2.0 * PI
        } else {
            r
        }
    };
    let mut sa: Vec<f64> = a.iter().map(|&x| wrap(x)).collect();
    sa.sort_by(f64::total_cmp);
    let n = a.len();
    let mut best = f64::INFINITY;
    // rotations that carry b[0] onto each a; exact when the spectra coincide
    for &anchor in &sa {
        let shift = anchor - b[0];
        let mut sb: Vec<f64> = b.iter().map(|&x| wrap(x + shift)).collect();
        sb.sort_by(f64::total_cmp);
        for offset in 0..n {
            let worst = (0..n).map(|i| chord(sa[i], sb[(i + offset) % n])).fold(0.0, f64::max);
            best = best.min(worst);
        }
    }
    Ok(best)
}

/// Spectral distance between the coinless walk `U(θ − π/2, π/2)` on `N` sites and
/// the discrete walk `⊕_K U(K, θ)` over the `N/2` cell momenta `K = 2πj/(N/2)`.
pub fn coinless_spectral_equivalence(theta: f64, n_sites: usize) -> Result<f64> {
    check_even(n_sites)?;
    let coinless = eigenphases(&coinless_propagator(theta - FRAC_PI_2, FRAC_PI_2, n_sites)?);
    let cells = n_sites / 2;
    let mut walk = Vec::with_capacity(n_sites);
    for j in 0..cells {
        let k = 2.0 * PI * j as f64 / cells as f64;
        let u = momentum_propagator(k, theta).matrix;
        let dense = DMatrix::from_fn(2, 2, |r, c| u[(r, c)]);
        walk.extend(eigenphases(&dense));
    }
    phase_multiset_distance(&coinless, &walk)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dtqw::initial_symmetric_entangled;
    use crate::pauli::{hermitian_eigenvalues, unitarity_defect_dense};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_3, FRAC_PI_4, FRAC_PI_6};

    /// Taylor series of `exp(A)` with scaling and squaring; independent of the
    /// closed-form block exponentials.
    fn expm_series(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let n = a.nrows();
        let norm = a.norm();
        let squarings = if norm > 0.5 { libm::ceil(libm::log2(norm / 0.5)) as u32 } else { 0 };
        let scaled = a / Complex64::new(libm::pow(2.0, squarings as f64), 0.0);
        let mut result = DMatrix::<Complex64>::identity(n, n);
        let mut term = DMatrix::<Complex64>::identity(n, n);
        for k in 1..30 {
            term = &term * &scaled / Complex64::new(k as f64, 0.0);
            result += &term;
        }
        for _ in 0..squarings {
            result = &result * &result;
        }
        result
    }

    #[test]
    fn bch_residual_examples() {
        let ratio = bch_residual(0.7, 0.05).unwrap() / bch_residual(0.7, 0.025).unwrap();
        assert!((ratio - 4.0).abs() <= 0.4, "{ratio}");
        for k in [0.0, 0.4, 2.0, -1.1] {
            assert!(bch_residual(k, 0.0).unwrap() < 1e-15);
        }
        assert!(bch_residual(FRAC_PI_2, 0.1).unwrap() < 1e-15);
        assert!(bch_residual(0.1, 0.6).is_err());
    }

    #[test]
    fn bch_order_is_two() {
        let scan = bch_scan(&[0.1, 0.05, 0.025, 0.0125], 32).unwrap();
        assert!((scan.fitted_slope - 2.0).abs() <= 0.1, "{}", scan.fitted_slope);
    }

    #[test]
    fn hamiltonian_examples() {
        let g = 0.125;
        let h0 = limit_hamiltonian(0.0, g).matrix;
        assert!((h0 - sigma_x() * Complex64::new(-2.0 * g, 0.0)).norm() < 1e-16);
        assert!(limit_hamiltonian(FRAC_PI_2, g).matrix.norm() < 1e-16);
        let h = limit_hamiltonian(1.0, g).matrix;
        let dense = DMatrix::from_fn(2, 2, |r, c| h[(r, c)]);
        let values = hermitian_eigenvalues(&dense);
        assert_abs_diff_eq!(values[1], 0.25 * libm::cos(1.0), epsilon = 1e-15);
        assert_abs_diff_eq!(values[0], -0.135_076, epsilon = 1e-6);
        assert!(h.trace().norm() < 1e-16);
        assert!((h - h.adjoint()).norm() < 1e-16);
    }

    #[test]
    fn propagator_examples() {
        let g = 0.125;
        assert!((limit_propagator(0.3, g, 0.0, 0).unwrap().matrix - identity2()).norm() < 1e-16);
        let two = limit_propagator(0.3, g, 2.0, 2).unwrap().matrix;
        assert!((two + limit_evolution_operator(0.3, g, 2.0)).norm() < 1e-16);
        let flat = limit_propagator(FRAC_PI_2, g, 5.0, 6).unwrap().matrix;
        assert!((flat - identity2() * i_pow(-6)).norm() < 1e-15);
        assert!(matches!(limit_propagator(0.3, g, 1.0, 3), Err(Error::OddSteps(3))));
        for (k, t) in [(0.2, 3.0), (-2.5, 17.0), (1.4, 0.01)] {
            assert!(limit_propagator(k, 0.3, t, 4).unwrap().unitarity_defect() < 1e-13);
        }
    }

    #[test]
    fn evolution_operator_matches_series_exponential() {
        let (k, g, t) = (0.9, 0.125, 11.0);
        let h = limit_hamiltonian(k, g).matrix;
        let dense = DMatrix::from_fn(2, 2, |r, c| h[(r, c)] * Complex64::new(0.0, -t));
        let series = expm_series(&dense);
        let closed = limit_evolution_operator(k, g, t);
        for r in 0..2 {
            for c in 0..2 {
                assert!((series[(r, c)] - closed[(r, c)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn convergence_is_first_order() {
        let initial = initial_symmetric_entangled(128).unwrap();
        let scan = convergence_scan(0.125, 8.0, &[40, 80, 160, 320], &initial).unwrap();
        let slope = scan.fitted_slope.unwrap();
        assert!((slope - 1.0).abs() <= 0.15, "{slope}");
        assert!(scan.strictly_decreasing());
        for e in &scan.entries {
            assert_abs_diff_eq!(e.delta * e.tau as f64, 2.0, epsilon = 1e-14);
        }
        let fine = convergence_scan(0.125, 8.0, &[40, 1280], &initial).unwrap();
        assert!(fine.entries[1].state_error < fine.entries[0].state_error);
    }

    #[test]
    fn convergence_scan_at_zero_time() {
        let initial = initial_symmetric_entangled(64).unwrap();
        let scan = convergence_scan(0.125, 0.0, &[2, 4, 40], &initial).unwrap();
        assert!(scan.entries.iter().all(|e| e.state_error <= 1e-14));
        assert!(convergence_scan(0.125, 1.0, &[3], &initial).is_err());
        assert!(convergence_scan(0.125, 1.0, &[], &initial).is_err());
    }

    #[test]
    fn split_reassembles_laplacian() {
        for n in [2, 4, 8, 16] {
            let (even, odd) = even_odd_split(n).unwrap();
            let full = laplacian_hamiltonian(n).unwrap();
            assert_eq!(even.sum(&odd).unwrap().entries, full.entries);
            assert!(even.is_symmetric() && odd.is_symmetric());
            assert!(even.row_sums().iter().chain(odd.row_sums().iter()).all(|s| *s == 0.0));
            assert_eq!(even.blocks().len(), n / 2);
        }
        let (even, odd) = even_odd_split(8).unwrap();
        let sum = even.sum(&odd).unwrap();
        let (a, b) = (crate::lattice::site_index(8, 0), crate::lattice::site_index(8, 1));
        assert_eq!(sum.get(a, b), -1.0);
        assert!(even_odd_split(7).is_err());
    }

    #[test]
    fn block_spectrum() {
        let (even, _) = even_odd_split(8).unwrap();
        for &(a, b) in even.blocks() {
            let block = DMatrix::from_row_slice(
                2,
                2,
                &[even.get(a, a), even.get(a, b), even.get(b, a), even.get(b, b)].map(|x| Complex64::new(x, 0.0)),
            );
            let values = hermitian_eigenvalues(&block);
            assert_abs_diff_eq!(values[0], 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(values[1], 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn block_exponentials_match_series() {
        let (even, odd) = even_odd_split(8).unwrap();
        for (h, angle) in [(&even, 0.3), (&odd, -1.2), (&even, FRAC_PI_2)] {
            let generator = h.to_complex() * Complex64::new(0.0, angle);
            let series = expm_series(&generator);
            assert!((series - h.block_exponential(angle).unwrap()).norm() < 1e-13);
        }
    }

    #[test]
    fn coinless_examples() {
        let u = coinless_propagator(0.0, 0.0, 8).unwrap();
        assert!((u - DMatrix::<Complex64>::identity(8, 8)).norm() < 1e-15);
        let patel = coinless_propagator(FRAC_PI_4, FRAC_PI_4, 16).unwrap();
        assert!(unitarity_defect_dense(&patel) <= 1e-12);
        assert!(coinless_propagator(0.1, 0.1, 9).is_err());
    }

    #[test]
    fn coinless_spectrum_matches_walk() {
        assert!(coinless_spectral_equivalence(FRAC_PI_2, 8).unwrap() <= 1e-10);
        assert!(coinless_spectral_equivalence(FRAC_PI_3, 16).unwrap() <= 1e-10);
        assert!(coinless_spectral_equivalence(FRAC_PI_3, 4).unwrap() <= 1e-10);
        for theta in [FRAC_PI_6, FRAC_PI_3, FRAC_PI_2 * 0.9] {
            for n in [8, 16, 32] {
                let d = coinless_spectral_equivalence(theta, n).unwrap();
                assert!(d <= 1e-10, "θ={theta} N={n}: {d}");
            }
        }
    }

    #[test]
    fn multiset_distance_detects_differences() {
        let a = [0.1, 1.0, 2.0];
        let rotated: Vec<f64> = [2.0, 0.1, 1.0].iter().map(|x| x + 0.7).collect();
        assert!(phase_multiset_distance(&a, &rotated).unwrap() < 1e-14);
        assert!(phase_multiset_distance(&a, &[0.1, 1.0, 2.5]).unwrap() > 0.1);
        assert!(phase_multiset_distance(&a, &[0.1]).is_err());
    }
}
