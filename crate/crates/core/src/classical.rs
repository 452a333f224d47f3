//! Persistent random walk and its `α → 0` continuous-time limit, evolved as
//! deterministic probability vectors.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::bessel::bessel_i_scaled;
use crate::error::{Error, Result};
use crate::lattice::{check_even, site_position, ChiralProbability, MomentumGrid, ProbabilityField, RingDft};

/// Persistence `α` (probability of keeping direction); `β = 1 − α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistentParams {
    alpha: f64,
}

impl PersistentParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfDomain { name: "alpha", value: alpha });
        }
        Ok(Self { alpha })
    }

    /// `α = cos²θ`, the walk obtained by measuring the coin after every step.
    pub fn from_coin_angle(theta: f64) -> Result<Self> {
        let c = libm::cos(theta);
        Self::new(c * c)
    }

    /// `α = 2γΔt` for a time step `Δt`.
    pub fn from_rate(gamma: f64, dt: f64) -> Result<Self> {
        Self::new(2.0 * gamma * dt)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        1.0 - self.alpha
    }
}

/// `p_R'(n) = α p_R(n−1) + β p_L(n−1)`, `p_L'(n) = α p_L(n+1) + β p_R(n+1)`.
pub fn persistent_step(p: &ChiralProbability, alpha: f64) -> Result<ChiralProbability> {
    PersistentParams::new(alpha)?;
    let n = p.n_sites();
    // each site keeps α·p and passes on p − α·p, so the split itself loses no mass
    let split = |v: &[f64]| -> Vec<(f64, f64)> {
        v.iter()
            .map(|x| {
                let keep = alpha * x;
                (keep, x - keep)
            })
            .collect()
    };
    let (r, l) = (split(p.right()), split(p.left()));
    let right = (0..n).map(|i| {
        let j = (i + n - 1) % n;
        r[j].0 + l[j].1
    });
    let left = (0..n).map(|i| {
        let j = (i + 1) % n;
        l[j].0 + r[j].1
    });
    ChiralProbability::from_components(right.collect(), left.collect())
}

pub fn persistent_evolve(p: &ChiralProbability, alpha: f64, steps: usize) -> Result<ChiralProbability> {
    let mut out = p.clone();
    for _ in 0..steps {
        out = persistent_step(&out, alpha)?;
    }
    Ok(out)
}

/// The two-step map written out directly:
/// `p_R(n,τ+2) = α² p_R(n−2) + αβ[p_L(n−2) + p_L(n)] + β² p_R(n)`, and mirror for `p_L`.
pub fn persistent_two_step(p: &ChiralProbability, alpha: f64) -> Result<ChiralProbability> {
    let params = PersistentParams::new(alpha)?;
    let (a, b) = (params.alpha(), params.beta());
    let n = p.n_sites();
    let (r, l) = (p.right(), p.left());
    let right = (0..n).map(|i| {
        let back2 = (i + n - 2) % n;
        a * a * r[back2] + a * b * (l[back2] + l[i]) + b * b * r[i]
    });
    let left = (0..n).map(|i| {
        let ahead2 = (i + 2) % n;
        a * a * l[ahead2] + a * b * (r[ahead2] + r[i]) + b * b * l[i]
    });
    ChiralProbability::from_components(right.collect(), left.collect())
}

/// L1 gap between two single steps and the direct two-step formula.
pub fn persistent_two_step_check(p: &ChiralProbability, alpha: f64) -> Result<f64> {
    let iterated = persistent_step(&persistent_step(p, alpha)?, alpha)?;
    iterated.l1_distance(&persistent_two_step(p, alpha)?)
}

/// Exact evolution of
/// `∂_t p_R(n) = −2γ p_R(n) + γ[p_L(n−2) + p_L(n)]`,
/// `∂_t p_L(n) = −2γ p_L(n) + γ[p_R(n+2) + p_R(n)]`.
///
/// Per momentum the generator is `−2γ + 2γ cos k M` with `M = [[0, e^{−ik}], [e^{ik}, 0]]`
/// and `M² = I`, so the propagator is `e^{−2γt}[cosh(2γt cos k) + sinh(2γt cos k) M]`.
pub fn classical_limit_evolve(p: &ChiralProbability, gamma: f64, time: f64) -> Result<ChiralProbability> {
    check_rate(gamma, time)?;
    let n = p.n_sites();
    check_even(n)?;
    let dft = RingDft::new(n)?;
    let grid = MomentumGrid::new(n)?;
    let lift = |v: &[f64]| v.iter().map(|x| Complex64::new(*x, 0.0)).collect::<Vec<_>>();
    let fr = dft.forward(&lift(p.right()));
    let fl = dft.forward(&lift(p.left()));
    let decay = libm::exp(-2.0 * gamma * time);
    let mut gr = Vec::with_capacity(n);
    let mut gl = Vec::with_capacity(n);
    for m in 0..n {
        let k = grid.k(m);
        let a = 2.0 * gamma * time * libm::cos(k);
        let (ch, sh) = (decay * libm::cosh(a), decay * libm::sinh(a));
        gr.push(fr[m] * ch + Complex64::from_polar(sh, -k) * fl[m]);
        gl.push(Complex64::from_polar(sh, k) * fr[m] + fl[m] * ch);
    }
    let right = dft.inverse(&gr).into_iter().map(|z| z.re).collect();
    let left = dft.inverse(&gl).into_iter().map(|z| z.re).collect();
    ChiralProbability::from_components(right, left)
}

fn check_rate(gamma: f64, time: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::OutOfDomain { name: "gamma", value: gamma });
    }
    if !(time.is_finite() && time >= 0.0) {
        return Err(Error::OutOfDomain { name: "time", value: time });
    }
    Ok(())
}

/// Lattice diffusion `∂_t p(n) = γ[p(n+1) − 2p(n) + p(n−1)]`, exact.
pub fn diffusion_evolve(p: &ProbabilityField, gamma: f64, time: f64) -> Result<ProbabilityField> {
    check_rate(gamma, time)?;
    let n = p.n_sites();
    let dft = RingDft::new(n)?;
    let grid = MomentumGrid::new(n)?;
    let lifted: Vec<Complex64> = p.values().iter().map(|x| Complex64::new(*x, 0.0)).collect();
    let phi: Vec<Complex64> = dft
        .forward(&lifted)
        .into_iter()
        .zip(grid.values())
        .map(|(z, k)| z * libm::exp(-2.0 * gamma * time * (1.0 - libm::cos(k))))
        .collect();
    ProbabilityField::from_values(dft.inverse(&phi).into_iter().map(|z| z.re).collect())
}

/// `e^{−2γt} I_n(2γt)`, diffusion from a point source on the infinite lattice.
pub fn diffusion_analytic(n: i64, gamma: f64, time: f64) -> Result<f64> {
    check_rate(gamma, time)?;
    bessel_i_scaled(n, 2.0 * gamma * time)
}

/// `p(n) = p_R(n) + p_L(n−1)`.
pub fn combined_density(p: &ChiralProbability) -> ProbabilityField {
    let n = p.n_sites();
    let values = (0..n).map(|i| p.right()[i] + p.left()[(i + n - 1) % n]).collect();
    ProbabilityField::from_values(values).expect("chiral field has an even size")
}

/// L1 gap between the combined density of the evolved chiral field and
/// lattice diffusion applied to the initial combined density.
pub fn combined_density_diffusion_check(p: &ChiralProbability, gamma: f64, time: f64) -> Result<f64> {
    let evolved = combined_density(&classical_limit_evolve(p, gamma, time)?);
    let diffused = diffusion_evolve(&combined_density(p), gamma, time)?;
    crate::lattice::l1_distance(&evolved, &diffused)
}

/// Diffusion from a point source summed over ring images.
pub fn diffusion_analytic_field(n_sites: usize, gamma: f64, time: f64, images: i64) -> Result<ProbabilityField> {
    check_even(n_sites)?;
    let len = n_sites as i64;
    let values = (0..n_sites)
        .map(|i| {
            let n = site_position(n_sites, i);
            (-images..=images).map(|w| diffusion_analytic(n + w * len, gamma, time)).sum::<Result<f64>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ProbabilityField::from_values(values)
}
