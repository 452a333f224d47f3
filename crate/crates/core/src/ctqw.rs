//! Continuous-time walks: the scalar lattice Schrödinger equation, the
//! two-component system reached in the `θ → π/2` limit, the split of that
//! system into two independent scalar walks, and Bessel closed forms.
//!
//! All evolution is spectral (exact per-momentum phases); the Runge–Kutta
//! integrator for the limit system exists only as a cross-check.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::lattice::{
    check_even, dft_ring, idft_ring, site_index, Evolved, ScalarWaveField, SpinorField, WindowGuard, I,
};
use crate::limit::limit_evolution_operator;

/// Hopping rate and elapsed time for continuous-time evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CtqwParams {
    pub gamma: f64,
    pub time: f64,
}

impl CtqwParams {
    pub fn new(gamma: f64, time: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::OutOfDomain { name: "gamma", value: gamma });
        }
        if !(time.is_finite() && time >= 0.0) {
            return Err(Error::OutOfDomain { name: "time", value: time });
        }
        Ok(Self { gamma, time })
    }

    /// Light-cone speed `c = 2γ`.
    pub fn speed(&self) -> f64 {
        2.0 * self.gamma
    }

    pub fn guard(&self, n_sites: usize) -> WindowGuard {
        WindowGuard::new(n_sites, self.speed(), self.time)
    }
}

/// `E(k) = 2γ(1 − cos k)`, the dispersion of `−γ × (lattice Laplacian)`.
pub fn laplacian_energy(k: f64, gamma: f64) -> f64 {
    2.0 * gamma * (1.0 - libm::cos(k))
}

/// Spectral evolution of each component under `i∂_t ψ = −s·γ[ψ(n+1) − 2ψ(n) + ψ(n−1)]`
/// with `s = ±1`.
fn laplacian_evolve_components(
    components: Vec<&[Complex64]>,
    gamma: f64,
    time: f64,
    sign: f64,
) -> Result<Vec<Vec<Complex64>>> {
    let n = components.first().map_or(0, |c| c.len());
    check_even(n)?;
    if time == 0.0 {
        return Ok(components.into_iter().map(<[Complex64]>::to_vec).collect());
    }
    let dft = crate::lattice::RingDft::new(n)?;
    let grid = crate::lattice::MomentumGrid::new(n)?;
    let phases: Vec<Complex64> =
        grid.values().map(|k| Complex64::from_polar(1.0, -sign * laplacian_energy(k, gamma) * time)).collect();
    Ok(components
        .into_iter()
        .map(|c| {
            let phi: Vec<Complex64> = dft.forward(c).into_iter().zip(&phases).map(|(z, p)| z * p).collect();
            dft.inverse(&phi)
        })
        .collect())
}

/// Scalar walk `i∂_t ψ(n) = −γ[ψ(n+1) − 2ψ(n) + ψ(n−1)]`.
pub fn ctqw_evolve(state: &ScalarWaveField, params: &CtqwParams) -> Result<Evolved<ScalarWaveField>> {
    let mut out = laplacian_evolve_components(alloc::vec![state.amplitudes()], params.gamma, params.time, 1.0)?;
    Ok(Evolved {
        field: ScalarWaveField::from_amplitudes(out.pop().unwrap_or_default())?,
        guard: params.guard(state.n_sites()),
    })
}

/// `ψ(n, t) = e^{−2iγt} iⁿ J_n(2γt)`, the walk started from `δ_{n,0}`.
pub fn ctqw_analytic(n: i64, params: &CtqwParams) -> Result<Complex64> {
    let x = 2.0 * params.gamma * params.time;
    Ok(Complex64::from_polar(1.0, -x) * i_pow(n) * bessel_j(n, x)?)
}

/// The closed form on a whole ring.
pub fn ctqw_analytic_field(n_sites: usize, params: &CtqwParams) -> Result<ScalarWaveField> {
    check_even(n_sites)?;
    let amps = (0..n_sites)
        .map(|i| ctqw_analytic(crate::lattice::site_position(n_sites, i), params))
        .collect::<Result<Vec<_>>>()?;
    ScalarWaveField::from_amplitudes(amps)
}

pub(crate) fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Two-component limit system
/// `i∂_t ψ_R(n) = −γ[ψ_L(n) + ψ_L(n−2)]`, `i∂_t ψ_L(n) = −γ[ψ_R(n) + ψ_R(n+2)]`,
/// evolved exactly with `e^{−iH(k)t}` per momentum.
pub fn limit_pair_evolve(state: &SpinorField, params: &CtqwParams) -> Result<Evolved<SpinorField>> {
    if params.time == 0.0 {
        return Ok(Evolved { field: state.clone(), guard: params.guard(state.n_sites()) });
    }
    let mut phi = dft_ring(state)?;
    let grid = phi.grid;
    for m in 0..grid.len() {
        let u = limit_evolution_operator(grid.k(m), params.gamma, params.time);
        let (r, l) = (phi.components[0][m], phi.components[1][m]);
        phi.components[0][m] = u[(0, 0)] * r + u[(0, 1)] * l;
        phi.components[1][m] = u[(1, 0)] * r + u[(1, 1)] * l;
    }
    Ok(Evolved { field: idft_ring(&phi)?, guard: params.guard(state.n_sites()) })
}

fn limit_rhs(state: &SpinorField, gamma: f64) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = state.n_sites();
    let (r, l) = (state.right(), state.left());
    let coupling = I * gamma; // −i·(−γ)
    let right = (0..n).map(|i| coupling * (l[i] + l[(i + n - 2) % n])).collect();
    let left = (0..n).map(|i| coupling * (r[i] + r[(i + 2) % n])).collect();
    (right, left)
}

/// Classic fourth-order Runge–Kutta integration of the real-space limit system.
pub fn limit_pair_rk4(state: &SpinorField, params: &CtqwParams, dt: f64) -> Result<SpinorField> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::OutOfDomain { name: "dt", value: dt });
    }
    let steps = libm::ceil(params.time / dt) as usize;
    if steps == 0 {
        return Ok(state.clone());
    }
    let h = params.time / steps as f64;
    let axpy = |base: &SpinorField, k: &(Vec<Complex64>, Vec<Complex64>), a: f64| {
        SpinorField::from_components(
            base.right().iter().zip(&k.0).map(|(x, d)| x + d * a).collect(),
            base.left().iter().zip(&k.1).map(|(x, d)| x + d * a).collect(),
        )
    };
    let mut y = state.clone();
    for _ in 0..steps {
        let k1 = limit_rhs(&y, params.gamma);
        let k2 = limit_rhs(&axpy(&y, &k1, h / 2.0)?, params.gamma);
        let k3 = limit_rhs(&axpy(&y, &k2, h / 2.0)?, params.gamma);
        let k4 = limit_rhs(&axpy(&y, &k3, h)?, params.gamma);
        let n = y.n_sites();
        let combine = |a: &[Complex64], k1: &[Complex64], k2: &[Complex64], k3: &[Complex64], k4: &[Complex64]| {
            (0..n).map(|i| a[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0)).collect::<Vec<_>>()
        };
        y = SpinorField::from_components(
            combine(y.right(), &k1.0, &k2.0, &k3.0, &k4.0),
            combine(y.left(), &k1.1, &k2.1, &k3.1, &k4.1),
        )?;
    }
    Ok(y)
}

/// The split `Ψ = e^{2iγt}Ψ₊ + e^{−2iγt}Ψ₋` of a limit-system state at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiralPair {
    pub plus: SpinorField,
    pub minus: SpinorField,
    pub gamma: f64,
    pub time: f64,
}

impl ChiralPair {
    pub fn recombine(&self) -> SpinorField {
        let up = Complex64::from_polar(1.0, 2.0 * self.gamma * self.time);
        let (p, m) = (&self.plus, &self.minus);
        let combine = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| x * up + y * up.conj()).collect();
        SpinorField::from_components(combine(p.right(), m.right()), combine(p.left(), m.left()))
            .expect("components share one shape")
    }

    /// Advance both components by `duration`: `Ψ₊` under `−γΔ`, `Ψ₋` under `+γΔ`.
    pub fn evolve(&self, duration: f64) -> Result<Self> {
        let advance = |field: &SpinorField, sign: f64| -> Result<SpinorField> {
            let mut out = laplacian_evolve_components(
                alloc::vec![field.right(), field.left()],
                self.gamma,
                duration,
                sign,
            )?;
            let left = out.pop().unwrap_or_default();
            let right = out.pop().unwrap_or_default();
            SpinorField::from_components(right, left)
        };
        Ok(Self {
            plus: advance(&self.plus, 1.0)?,
            minus: advance(&self.minus, -1.0)?,
            gamma: self.gamma,
            time: self.time + duration,
        })
    }
}

/// `Ψ±(n,t) = ½ e^{∓2iγt} (ψ_R(n) ± ψ_L(n−1), ψ_L(n) ± ψ_R(n+1))`.
pub fn chiral_decompose(state: &SpinorField, gamma: f64, time: f64) -> Result<ChiralPair> {
    let n_sites = state.n_sites();
    check_even(n_sites)?;
    let (r, l) = (state.right(), state.left());
    let build = |sign: f64, phase: Complex64| -> Result<SpinorField> {
        let right = (0..n_sites).map(|i| (r[i] + l[(i + n_sites - 1) % n_sites] * sign) * phase * 0.5).collect();
        let left = (0..n_sites).map(|i| (l[i] + r[(i + 1) % n_sites] * sign) * phase * 0.5).collect();
        SpinorField::from_components(right, left)
    };
    let down = Complex64::from_polar(1.0, -2.0 * gamma * time);
    Ok(ChiralPair { plus: build(1.0, down)?, minus: build(-1.0, down.conj())?, gamma, time })
}

/// `ψ_R = ½ iⁿ (J_n − iJ_{n−1})`, `ψ_L = ½ iⁿ (J_n + iJ_{n+1})` at argument `2γt`:
/// the limit system started from the symmetric entangled state.
pub fn limit_analytic(n: i64, params: &CtqwParams) -> Result<(Complex64, Complex64)> {
    let x = 2.0 * params.gamma * params.time;
    let (jm, j0, jp) = (bessel_j(n - 1, x)?, bessel_j(n, x)?, bessel_j(n + 1, x)?);
    let prefactor = i_pow(n) * 0.5;
    Ok((prefactor * Complex64::new(j0, -jm), prefactor * Complex64::new(j0, jp)))
}

pub fn limit_analytic_field(n_sites: usize, params: &CtqwParams) -> Result<SpinorField> {
    check_even(n_sites)?;
    let mut right = alloc::vec![Complex64::new(0.0, 0.0); n_sites];
    let mut left = right.clone();
    for i in 0..n_sites {
        let n = crate::lattice::site_position(n_sites, i);
        let (r, l) = limit_analytic(n, params)?;
        right[site_index(n_sites, n)] = r;
        left[site_index(n_sites, n)] = l;
    }
    SpinorField::from_components(right, left)
}
